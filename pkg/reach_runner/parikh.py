"""
精确权重向量路径: 在 (顶点, 截断后的累计权重向量) 上做 BFS, 代替猜测式的 Parikh 证书。
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .arena import WeightedArena
from .errors import InvalidInputError

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class Subgraph:
    vertices: FrozenSet[int]
    edges: FrozenSet[Tuple[int, int]]
    _succ: Dict[int, Tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        succ: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            if u in succ and v in self.vertices:
                succ[u].append(v)
        object.__setattr__(self, "_succ", {v: tuple(sorted(s)) for v, s in succ.items()})

    @classmethod
    def induced(
        cls,
        arena: WeightedArena,
        vertices: Iterable[int],
        stop_at: Iterable[int] = (),
    ) -> "Subgraph":
        """Edges between `vertices`, minus every edge leaving a `stop_at` vertex."""
        keep = frozenset(vertices)
        stop = frozenset(stop_at)
        edges = frozenset(
            (u, v)
            for u in keep
            if u not in stop
            for v in arena.successors(u)
            if v in keep
        )
        return cls(keep, edges)

    @classmethod
    def whole(cls, arena: WeightedArena) -> "Subgraph":
        return cls.induced(arena, arena.vertices)

    def successors(self, v: int) -> Tuple[int, ...]:
        return self._succ.get(v, ())


@dataclass(frozen=True)
class PathQuery:
    arena: WeightedArena
    subgraph: Subgraph
    source: int
    sink: int
    dims: Tuple[int, ...]
    required: Vector
    caps: Vector
    # positions in dims that clamp at their cap instead of being dropped
    saturating: FrozenSet[int] = frozenset()

    def __post_init__(self) -> None:
        if not (len(self.dims) == len(self.required) == len(self.caps)):
            raise InvalidInputError("dims, required and caps must have the same length")
        if any(r > c for r, c in zip(self.required, self.caps)):
            raise InvalidInputError("required vector exceeds caps")
        if self.source not in self.subgraph.vertices or self.sink not in self.subgraph.vertices:
            raise InvalidInputError("source and sink must lie in the subgraph")


def _advance(
    arena: WeightedArena,
    u: int,
    v: int,
    vec: Vector,
    dims: Tuple[int, ...],
    caps: Vector,
    saturating: FrozenSet[int],
) -> Optional[Vector]:
    out = []
    for j, d in enumerate(dims):
        x = vec[j] + arena.weight(u, v, d)
        if x > caps[j]:
            if j not in saturating:
                return None
            x = caps[j]
        out.append(x)
    return tuple(out)


def exact_weight_path_exists(q: PathQuery) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    zero = tuple(0 for _ in q.dims)
    root = (q.source, zero)
    goal = (q.sink, tuple(q.required))
    parent: Dict[Tuple[int, Vector], Optional[Tuple[int, Vector]]] = {root: None}
    queue = deque([root])
    while queue and goal not in parent:
        state = queue.popleft()
        v, vec = state
        for s in q.subgraph.successors(v):
            nxt = _advance(q.arena, v, s, vec, q.dims, q.caps, q.saturating)
            if nxt is None or (s, nxt) in parent:
                continue
            parent[(s, nxt)] = state
            queue.append((s, nxt))
    if goal not in parent:
        return False, None
    path: List[int] = []
    node: Optional[Tuple[int, Vector]] = goal
    while node is not None:
        path.append(node[0])
        node = parent[node]
    return True, tuple(reversed(path))


def reachable_weight_vectors(
    arena: WeightedArena,
    subgraph: Subgraph,
    source: int,
    dims: Tuple[int, ...],
    caps: Vector,
    saturating: FrozenSet[int] = frozenset(),
) -> Dict[int, Set[Vector]]:
    zero = tuple(0 for _ in dims)
    found: Dict[int, Set[Vector]] = {v: set() for v in subgraph.vertices}
    if source not in subgraph.vertices:
        return found
    found[source].add(zero)
    queue = deque([(source, zero)])
    while queue:
        v, vec = queue.popleft()
        for s in subgraph.successors(v):
            nxt = _advance(arena, v, s, vec, dims, caps, saturating)
            if nxt is None or nxt in found[s]:
                continue
            found[s].add(nxt)
            queue.append((s, nxt))
    return found


def cycle_avoiding_exists(subgraph: Subgraph, anchor: int, forbidden: Iterable[int]) -> bool:
    blocked = frozenset(forbidden)
    if anchor in blocked or anchor not in subgraph.vertices:
        return False
    seen: Set[int] = set()
    stack = [s for s in subgraph.successors(anchor) if s not in blocked]
    while stack:
        v = stack.pop()
        if v == anchor:
            return True
        if v in seen:
            continue
        seen.add(v)
        stack.extend(s for s in subgraph.successors(v) if s not in blocked)
    return False
