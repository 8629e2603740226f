"""
基础数据模型: 带权竞技场、可达博弈、套索 (lasso) 与代价计算。

顶点在内部是稠密整数, 名字只保存在 names 表里; 玩家编号 0..t, 0 永远是系统。
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, TypeVar, Union

import networkx as nx

from .errors import InvalidInputError


class _Top:
    """+inf. Absorbs addition, compares above every natural number."""

    _instance: Optional["_Top"] = None

    def __new__(cls) -> "_Top":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (_Top, ())

    def __repr__(self) -> str:
        return "TOP"

    def __str__(self) -> str:
        return "inf"

    def __add__(self, other):
        if isinstance(other, (int, _Top)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return self
        return NotImplemented

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("reach_runner.TOP")

    def __lt__(self, other) -> bool:
        if isinstance(other, (int, _Top)):
            return False
        return NotImplemented

    def __le__(self, other) -> bool:
        if isinstance(other, (int, _Top)):
            return other is self
        return NotImplemented

    def __gt__(self, other) -> bool:
        if isinstance(other, (int, _Top)):
            return other is not self
        return NotImplemented

    def __ge__(self, other) -> bool:
        if isinstance(other, (int, _Top)):
            return True
        return NotImplemented


TOP = _Top()
Cost = Union[int, _Top]


def is_top(value: object) -> bool:
    return value is TOP


def cap_cost(value: Cost, bound: Cost) -> Cost:
    """value above bound collapses to TOP."""
    if value is TOP or (bound is not TOP and value > bound):
        return TOP
    return value


def format_cost(value: Cost) -> str:
    return "inf" if value is TOP else str(value)


@dataclass(frozen=True)
class CostVector:
    entries: Tuple[Cost, ...]

    def __getitem__(self, i: int) -> Cost:
        return self.entries[i]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Cost]:
        return iter(self.entries)

    def le(self, other: "CostVector") -> bool:
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def lt(self, other: "CostVector") -> bool:
        """Strict componentwise order: <= everywhere and different somewhere."""
        return self.le(other) and self.entries != other.entries

    def sort_key(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((1, 0) if e is TOP else (0, e) for e in self.entries)

    def to_text(self) -> str:
        return "(" + ", ".join(format_cost(e) for e in self.entries) + ")"


Edge = Tuple[int, int]


@dataclass(frozen=True)
class WeightedArena:
    names: Tuple[str, ...]
    owner: Tuple[int, ...]
    num_players: int
    edges: Tuple[Tuple[int, int, Tuple[int, ...]], ...]
    _succ: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _pred: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _weights: Dict[Edge, Tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.names)
        succ: List[List[int]] = [[] for _ in range(n)]
        pred: List[List[int]] = [[] for _ in range(n)]
        weights: Dict[Edge, Tuple[int, ...]] = {}
        for u, v, w in self.edges:
            if 0 <= u < n and 0 <= v < n and (u, v) not in weights:
                succ[u].append(v)
                pred[v].append(u)
            weights.setdefault((u, v), tuple(w))
        object.__setattr__(self, "_succ", tuple(tuple(sorted(s)) for s in succ))
        object.__setattr__(self, "_pred", tuple(tuple(sorted(p)) for p in pred))
        object.__setattr__(self, "_weights", weights)

    @classmethod
    def build(
        cls,
        names: Sequence[str],
        owner: Sequence[int],
        num_players: int,
        edges: Iterable[Tuple[int, int, Sequence[int]]],
    ) -> "WeightedArena":
        ordered = tuple(sorted((int(u), int(v), tuple(int(x) for x in w)) for u, v, w in edges))
        return cls(tuple(names), tuple(int(o) for o in owner), int(num_players), ordered)

    @property
    def vertex_count(self) -> int:
        return len(self.names)

    @property
    def vertices(self) -> range:
        return range(len(self.names))

    def successors(self, v: int) -> Tuple[int, ...]:
        return self._succ[v]

    def predecessors(self, v: int) -> Tuple[int, ...]:
        return self._pred[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._weights

    def weight(self, u: int, v: int, player: int) -> int:
        return self._weights[(u, v)][player]

    def weight_vector(self, u: int, v: int) -> Tuple[int, ...]:
        return self._weights[(u, v)]

    @property
    def max_weight(self) -> int:
        return max((max(w) if w else 0 for _, _, w in self.edges), default=0)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError as e:
            raise InvalidInputError(f"unknown vertex {name!r}") from e

    def owned_by(self, player: int) -> List[int]:
        return [v for v in self.vertices if self.owner[v] == player]


@dataclass(frozen=True)
class ReachabilityGame:
    arena: WeightedArena
    targets: Tuple[FrozenSet[int], ...]
    initial: int

    @classmethod
    def from_names(
        cls,
        num_players: int,
        vertices: Sequence[Tuple[str, int]],
        edges: Iterable[Tuple[str, str, Sequence[int]]],
        targets: Mapping[int, Iterable[str]],
        initial: str,
    ) -> "ReachabilityGame":
        names = [n for n, _ in vertices]
        index = {n: k for k, n in enumerate(names)}
        try:
            arena = WeightedArena.build(
                names,
                [o for _, o in vertices],
                num_players,
                [(index[a], index[b], w) for a, b, w in edges],
            )
            target_sets = tuple(
                frozenset(index[n] for n in targets.get(i, ())) for i in range(num_players)
            )
            return cls(arena, target_sets, index[initial])
        except KeyError as e:
            raise InvalidInputError(f"unknown vertex {e.args[0]!r}") from e

    @property
    def num_players(self) -> int:
        return self.arena.num_players

    @property
    def env_players(self) -> range:
        return range(1, self.arena.num_players)

    def name(self, v: int) -> str:
        return self.arena.names[v]

    def players_at(self, v: int) -> FrozenSet[int]:
        return frozenset(i for i, t in enumerate(self.targets) if v in t)

    def names_of(self, seq: Iterable[int]) -> List[str]:
        return [self.arena.names[v] for v in seq]


@dataclass(frozen=True)
class Lasso:
    """mu (nu)^omega, always stored in its minimal representation."""

    prefix: Tuple[int, ...]
    cycle: Tuple[int, ...]

    def __post_init__(self) -> None:
        prefix, cycle = tuple(self.prefix), tuple(self.cycle)
        if not cycle:
            raise InvalidInputError("lasso cycle must be nonempty")
        n = len(cycle)
        for p in range(1, n + 1):
            if n % p == 0 and cycle[:p] * (n // p) == cycle:
                cycle = cycle[:p]
                break
        while prefix and prefix[-1] == cycle[-1]:
            cycle = (prefix[-1],) + cycle[:-1]
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    @property
    def vertices(self) -> Tuple[int, ...]:
        return self.prefix + self.cycle

    def __len__(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def at(self, n: int) -> int:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]

    def unroll(self, k: int = 1) -> Tuple[int, ...]:
        return self.prefix + self.cycle * k

    def sort_key(self) -> Tuple[Tuple[int, ...], int]:
        return (self.vertices, len(self.prefix))

    def describe(self, game: ReachabilityGame) -> str:
        mu = " ".join(game.names_of(self.prefix))
        nu = " ".join(game.names_of(self.cycle))
        return f"{mu} ({nu})^w".strip()


def validate_game(game: ReachabilityGame) -> List[str]:
    arena = game.arena
    n = arena.vertex_count
    problems: List[str] = []
    if len(set(arena.names)) != n:
        problems.append("duplicate vertex names")
    if len(arena.owner) != n:
        problems.append(f"owner table has {len(arena.owner)} entries for {n} vertices")
    for v, o in enumerate(arena.owner):
        if not 0 <= o < arena.num_players:
            problems.append(f"vertex {arena.names[v] if v < n else v}: owner {o} is not a declared player")
    seen = set()
    for u, v, w in arena.edges:
        label = f"edge ({u},{v})"
        if not (0 <= u < n and 0 <= v < n):
            problems.append(f"{label}: endpoint is not a declared vertex")
            continue
        label = f"edge {arena.names[u]}->{arena.names[v]}"
        if (u, v) in seen:
            problems.append(f"{label}: declared twice")
        seen.add((u, v))
        if len(w) != arena.num_players:
            problems.append(f"{label}: {len(w)} weights for {arena.num_players} players")
        if any(x < 0 for x in w):
            problems.append(f"{label}: negative weight")
    for v in arena.vertices:
        if not arena.successors(v):
            problems.append(f"vertex {arena.names[v]}: no successor")
    if len(game.targets) != arena.num_players:
        problems.append(f"{len(game.targets)} target sets for {arena.num_players} players")
    for i, t in enumerate(game.targets):
        for v in sorted(t):
            if not 0 <= v < n:
                problems.append(f"target of player {i}: vertex {v} is not declared")
    if not 0 <= game.initial < n:
        problems.append(f"initial vertex {game.initial} is not declared")
    return problems


def check_history(game: ReachabilityGame, h: Sequence[int]) -> None:
    arena = game.arena
    for v in h:
        if not 0 <= v < arena.vertex_count:
            raise InvalidInputError(f"vertex {v} is not declared")
    for u, v in zip(h, h[1:]):
        if not arena.has_edge(u, v):
            raise InvalidInputError(f"broken edge {arena.names[u]}->{arena.names[v]}")


def check_lasso(game: ReachabilityGame, pi: Lasso) -> None:
    seq = pi.vertices
    if seq[0] != game.initial:
        raise InvalidInputError(
            f"lasso starts at {game.name(seq[0])}, not at initial {game.name(game.initial)}"
        )
    check_history(game, seq + (pi.cycle[0],))


def visit_set(game: ReachabilityGame, h: Sequence[int]) -> FrozenSet[int]:
    check_history(game, h)
    return frozenset(i for i, t in enumerate(game.targets) if any(v in t for v in h))


def weight_of_history(game: ReachabilityGame, h: Sequence[int], player: int) -> int:
    return sum(game.arena.weight(u, v, player) for u, v in zip(h, h[1:]))


def _cost_from(game: ReachabilityGame, pi: Lasso, start: int, player: int, horizon: int) -> Cost:
    target = game.targets[player]
    acc = 0
    prev = None
    for k in range(start, start + horizon):
        v = pi.at(k)
        if prev is not None:
            acc += game.arena.weight(prev, v, player)
        if v in target:
            return acc
        prev = v
    return TOP


def cost_of_lasso(game: ReachabilityGame, pi: Lasso) -> CostVector:
    check_lasso(game, pi)
    n = len(pi)
    return CostVector(tuple(_cost_from(game, pi, 0, i, n) for i in range(game.num_players)))


def payoff(game: ReachabilityGame, pi: Lasso) -> CostVector:
    """Environment part of the cost vector; player i sits at index i - 1."""
    return CostVector(cost_of_lasso(game, pi).entries[1:])


def suffix_cost(game: ReachabilityGame, pi: Lasso, n: int, player: int) -> Cost:
    # the suffix from n contains every vertex it will ever see within |mu nu| + |nu| steps
    return _cost_from(game, pi, n, player, len(pi) + len(pi.cycle) + 1)


def _erase_loops(seq: Sequence[int]) -> List[int]:
    out: List[int] = []
    where: Dict[int, int] = {}
    for v in seq:
        if v in where:
            keep = where[v]
            for dropped in out[keep + 1:]:
                where.pop(dropped, None)
            del out[keep + 1:]
        else:
            where[v] = len(out)
            out.append(v)
    return out


def _erase_weightless_loops(arena: WeightedArena, seq: Sequence[int], player: int) -> List[int]:
    out = list(seq)
    changed = True
    while changed:
        changed = False
        for m in range(len(out)):
            for n in range(m + 1, len(out)):
                if out[n] == out[m] and sum(
                    arena.weight(a, b, player) for a, b in zip(out[m:n], out[m + 1:n + 1])
                ) == 0:
                    del out[m:n]
                    changed = True
                    break
            if changed:
                break
    return out


def shrink_lasso(
    arena: WeightedArena,
    pi: Lasso,
    targets: Sequence[FrozenSet[int]],
    protect: Optional[Tuple[int, int]] = None,
) -> Lasso:
    """Cycle removal between consecutive first visits of `targets`, then truncation.

    protect = (k, c) keeps the longest prefix whose weight for targets[k]'s weight
    dimension stays <= c, except for cycles of weight 0 in that dimension.
    """
    n = len(pi)
    seq = [pi.at(k) for k in range(n + arena.vertex_count + 1)]
    first: Dict[int, int] = {}
    for k, v in enumerate(seq[:n]):
        for i, t in enumerate(targets):
            if i not in first and v in t:
                first[i] = k
    bounds = sorted({0} | set(first.values()))
    last = bounds[-1]

    guard = -1
    weight_dim = -1
    if protect is not None and protect[0] in first:
        weight_dim, c = protect
        acc = 0
        guard = 0
        for k in range(1, first[weight_dim] + 1):
            acc += arena.weight(seq[k - 1], seq[k], weight_dim)
            if acc > c:
                break
            guard = k

    out: List[int] = []
    for a, b in zip(bounds, bounds[1:]):
        if guard >= b - 1:
            part = _erase_weightless_loops(arena, seq[a:b], weight_dim)
        elif a <= guard:
            part = _erase_weightless_loops(arena, seq[a:guard + 1], weight_dim)
            part += _erase_loops(seq[guard + 1:b])
        else:
            part = _erase_loops(seq[a:b])
        out.extend(part)
    out.append(seq[last])

    tail = [seq[last]]
    where = {seq[last]: 0}
    k = last + 1
    while seq[k] not in where:
        where[seq[k]] = len(tail)
        tail.append(seq[k])
        k += 1
    j = where[seq[k]]
    return Lasso(tuple(out[:-1]) + tuple(tail[:j]), tuple(tail[j:]))


def normalize_lasso(
    game: ReachabilityGame,
    pi: Lasso,
    preserve_prefix_weight_for: Optional[Tuple[int, int]] = None,
) -> Lasso:
    check_lasso(game, pi)
    return shrink_lasso(game.arena, pi, game.targets, preserve_prefix_weight_for)


def restrict_choices(game: ReachabilityGame, choice: Mapping[int, int]) -> ReachabilityGame:
    """Bake a memoryless player-0 choice into the arena."""
    arena = game.arena
    for v, s in choice.items():
        if arena.owner[v] != 0 or not arena.has_edge(v, s):
            raise InvalidInputError(f"choice {arena.names[v]}->{arena.names[s]} is not a player-0 move")
    edges = [
        (u, v, w)
        for u, v, w in arena.edges
        if arena.owner[u] != 0 or u not in choice or choice[u] == v
    ]
    return ReachabilityGame(
        WeightedArena(arena.names, arena.owner, arena.num_players, tuple(edges)),
        game.targets,
        game.initial,
    )


def close_lasso(
    arena: WeightedArena,
    history: Sequence[int],
    allowed: Optional[FrozenSet[int]] = None,
) -> Lasso:
    """Extend history by smallest-id successors (inside `allowed`) until a vertex repeats."""
    tail = [history[-1]]
    where = {history[-1]: 0}
    while True:
        options = [s for s in arena.successors(tail[-1]) if allowed is None or s in allowed]
        if not options:
            raise InvalidInputError(f"vertex {arena.names[tail[-1]]} has no successor to continue")
        nxt = options[0]
        if nxt in where:
            j = where[nxt]
            return Lasso(tuple(history[:-1]) + tuple(tail[:j]), tuple(tail[j:]))
        where[nxt] = len(tail)
        tail.append(nxt)


State = TypeVar("State", bound=tuple)


def settled_lasso(
    root: State,
    expand: Callable[[State], Iterable[State]],
    settled: Callable[[State], bool],
) -> Optional[Lasso]:
    """BFS over a finite state graph whose states start with an arena vertex.

    Returns the lasso through the first (BFS order) settled state lying on a cycle of
    settled states, or None.
    """
    parent: Dict[State, Optional[State]] = {root: None}
    order: List[State] = [root]
    graph = nx.DiGraph()
    graph.add_node(root)
    queue = deque([root])
    while queue:
        state = queue.popleft()
        for child in expand(state):
            graph.add_edge(state, child)
            if child not in parent:
                parent[child] = state
                order.append(child)
                queue.append(child)

    final = graph.subgraph([s for s in order if settled(s)])
    rank = {s: k for k, s in enumerate(order)}
    on_cycle = set()
    for comp in nx.strongly_connected_components(final):
        if len(comp) > 1:
            on_cycle |= comp
        elif final.has_edge(next(iter(comp)), next(iter(comp))):
            on_cycle |= comp
    for target in order:
        if target not in on_cycle:
            continue
        lead: List[State] = []
        node: Optional[State] = target
        while node is not None:
            lead.append(node)
            node = parent[node]
        lead.reverse()
        if final.has_edge(target, target):
            loop = [target]
        else:
            best: Optional[List[State]] = None
            for s in sorted(final.successors(target), key=rank.__getitem__):
                if not nx.has_path(final, s, target):
                    continue
                path = nx.shortest_path(final, s, target)
                if best is None or len(path) < len(best):
                    best = path
            assert best is not None
            loop = [target] + best[:-1]
        return Lasso(tuple(s[0] for s in lead[:-1]), tuple(s[0] for s in loop))
    return None
