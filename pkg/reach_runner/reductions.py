"""
硬度归约的实例生成器 (倒计时博弈 / 子集和博弈 / 二划分 / QBF) 与源问题的文本解析。

生成器只负责构造, 不判断真假; 源问题的真值在测试里独立计算。
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from .arena import ReachabilityGame
from .errors import Diagnostic, FormatError, ReductionError

Vertex = Tuple[str, int]
WeightedEdge = Tuple[str, str, Tuple[int, ...]]


@dataclass(frozen=True)
class CountdownGame:
    states: Tuple[str, ...]
    # (s, d, s') with d > 0
    edges: Tuple[Tuple[str, int, str], ...]
    initial: str
    threshold: int

    def durations(self, s: str) -> List[int]:
        return sorted({d for a, d, _ in self.edges if a == s})

    def successors(self, s: str, d: int) -> List[str]:
        return sorted({b for a, k, b in self.edges if a == s and k == d})


@dataclass(frozen=True)
class SubsetSumRound:
    a: int
    b: int
    e: int
    f: int


@dataclass(frozen=True)
class SubsetSumInstance:
    """forall P1 in {A1,B1} exists P2 in {E1,F1} ... sum(P) == T."""

    target: int
    rounds: Tuple[SubsetSumRound, ...]


Literal = Tuple[str, bool]


@dataclass(frozen=True)
class QbfInstance:
    # quantifier blocks in prefix order: ("exists" | "forall", variables)
    blocks: Tuple[Tuple[str, Tuple[str, ...]], ...]
    clauses: Tuple[Tuple[Literal, ...], ...]

    @property
    def variables(self) -> List[str]:
        return [x for _, names in self.blocks for x in names]

    def quantifier(self, x: str) -> str:
        for q, names in self.blocks:
            if x in names:
                return q
        raise ReductionError(f"variable {x!r} is not quantified")

    def evaluate(self, valuation: Dict[str, bool]) -> bool:
        return all(any(valuation[x] == positive for x, positive in c) for c in self.clauses)


def _check_countdown(cg: CountdownGame, reserved: Iterable[str]) -> None:
    if cg.initial not in cg.states:
        raise ReductionError(f"initial state {cg.initial!r} is not declared")
    if cg.threshold < 0:
        raise ReductionError("countdown threshold must be a natural number")
    clash = set(cg.states) & set(reserved)
    if clash:
        raise ReductionError(f"state names {sorted(clash)} are reserved by the construction")
    for a, d, b in cg.edges:
        if a not in cg.states or b not in cg.states:
            raise ReductionError(f"edge ({a}, {d}, {b}) names an undeclared state")
        if d <= 0:
            raise ReductionError(f"edge ({a}, {d}, {b}): durations must be positive")
    for s in cg.states:
        if not cg.durations(s):
            raise ReductionError(f"state {s!r} has no outgoing duration")


def _choice_name(s: str, d: int) -> str:
    return f"{s}.{d}"


def gen_countdown_ncns(cg: CountdownGame) -> Tuple[ReachabilityGame, int]:
    """Three players; player 2 owns v0, D and E. Threshold 2c."""
    _check_countdown(cg, ("v0", "D", "E"))
    c = cg.threshold
    vertices: List[Vertex] = [("v0", 2), ("D", 2), ("E", 2)]
    edges: List[WeightedEdge] = [
        ("v0", "D", (2 * c, 0, 2 * c)),
        ("v0", cg.initial, (0, 0, 0)),
        ("D", "D", (0, 0, 0)),
        ("E", "E", (0, 0, 0)),
    ]
    for s in cg.states:
        vertices.append((s, 0))
        for d in cg.durations(s):
            pick = _choice_name(s, 2 * d)
            vertices.append((pick, 1))
            edges.append((s, pick, (0, 0, 0)))
            edges.append((pick, "E", (2 * d, 0, 1)))
            for s2 in cg.successors(s, d):
                edges.append((pick, s2, (2 * d, 0, 2 * d)))
    names = [n for n, _ in vertices]
    game = ReachabilityGame.from_names(
        3,
        vertices,
        edges,
        {0: ("D", "E"), 1: names, 2: ("D", "E")},
        "v0",
    )
    return game, 2 * c


def gen_countdown_bounded_ncns(cg: CountdownGame) -> Tuple[ReachabilityGame, Tuple[int, ...], int]:
    """Two players with satisficing objectives: player 1 is content iff cost_1 <= c."""
    _check_countdown(cg, ("E", "v1", "v2"))
    c = cg.threshold
    vertices: List[Vertex] = [("E", 1), ("v1", 1), ("v2", 1)]
    edges: List[WeightedEdge] = [
        ("E", "v1", (c + 1, 1)),
        ("E", "v2", (0, 0)),
        ("v1", "v1", (0, 0)),
        ("v2", "v2", (0, 0)),
    ]
    for s in cg.states:
        vertices.append((s, 0))
        edges.append((s, "E", (0, 0)))
        for d in cg.durations(s):
            pick = _choice_name(s, d)
            vertices.append((pick, 1))
            edges.append((s, pick, (0, 0)))
            for s2 in cg.successors(s, d):
                edges.append((pick, s2, (d, d)))
    game = ReachabilityGame.from_names(
        2,
        vertices,
        edges,
        {0: ("v1", "v2"), 1: ("v1", "v2")},
        cg.initial,
    )
    return game, (c,), c


def normalize_subsetsum(psi: SubsetSumInstance) -> SubsetSumInstance:
    t = psi.target
    if t < 0:
        raise ReductionError("target T must be a natural number")
    rounds: List[SubsetSumRound] = []
    for k, r in enumerate(psi.rounds, start=1):
        if min(r.a, r.b, r.e, r.f) < 0:
            raise ReductionError(f"round {k}: constants must be natural numbers")
        if r.a > t or r.b > t:
            raise ReductionError(f"round {k}: universal constant exceeds T, instance is trivially false")
        if r.e > t and r.f > t:
            raise ReductionError(f"round {k}: both existential constants exceed T, instance is trivially false")
        e, f = r.e, r.f
        if e > t:
            e = f
        elif f > t:
            f = e
        rounds.append(SubsetSumRound(r.a, r.b, e, f))
    return SubsetSumInstance(t, tuple(rounds))


def gen_subsetsum_ncns(psi: SubsetSumInstance) -> Tuple[ReachabilityGame, int]:
    """
    Chain v0 -> ... -> R, stage owners alternate 1 (universal) and 0 (existential).
    Every pick X goes through its own vertex: weights (T-X, X) then (0, 0).
    """
    psi = normalize_subsetsum(psi)
    t = psi.target
    n = len(psi.rounds)
    if n == 0:
        raise ReductionError("subset-sum game needs at least one round")
    stages: List[Vertex] = []
    for k in range(1, n + 1):
        stages.append((f"u{k}", 1))
        stages.append((f"x{k}", 0))
    stages[0] = ("v0", 1)
    vertices: List[Vertex] = list(stages) + [("L", 1), ("R", 0)]
    edges: List[WeightedEdge] = [
        ("v0", "L", (0, t + 1)),
        ("L", "L", (0, 0)),
        ("R", "R", (0, 0)),
    ]
    order = [name for name, _ in stages] + ["R"]
    for k, r in enumerate(psi.rounds):
        for offset, picks in ((0, (("A", r.a), ("B", r.b))), (1, (("E", r.e), ("F", r.f)))):
            here, there = order[2 * k + offset], order[2 * k + offset + 1]
            for label, x in picks:
                mid = f"{here}.{label}{k + 1}"
                vertices.append((mid, 0))
                edges.append((here, mid, (t - x, x)))
                edges.append((mid, there, (0, 0)))
    game = ReachabilityGame.from_names(2, vertices, edges, {0: ("R",), 1: ("R", "L")}, "v0")
    return game, (2 * n - 1) * t


def _bipartition_chain(
    items: Sequence[int],
    left: Tuple[int, int],
    weights,
) -> Tuple[List[Vertex], List[WeightedEdge]]:
    vertices: List[Vertex] = [("v0", 1), ("L", 0), ("R", 0)]
    edges: List[WeightedEdge] = [("v0", "L", left), ("L", "L", (0, 0)), ("R", "R", (0, 0))]
    chain = [f"v{k}" for k in range(1, len(items) + 1)] + ["R"]
    edges.append(("v0", chain[0], (0, 0)))
    for k, a in enumerate(items, start=1):
        here = chain[k - 1]
        vertices.append((here, 0))
        for side, w in zip("AB", weights(a)):
            mid = f"{here}.{side}"
            vertices.append((mid, 0))
            edges.append((here, mid, w))
            edges.append((mid, chain[k], (0, 0)))
    return vertices, edges


def _check_multiset(items: Sequence[int]) -> int:
    if any(a < 0 for a in items):
        raise ReductionError("multiset entries must be natural numbers")
    total = sum(items)
    if total % 2:
        raise ReductionError(f"sum {total} is odd, no bi-partition instance")
    return total


def gen_bipartition_cns(items: Sequence[int]) -> Tuple[ReachabilityGame, int]:
    total = _check_multiset(items)
    half = total // 2
    vertices, edges = _bipartition_chain(items, (0, half), lambda a: ((a, 0), (0, a)))
    game = ReachabilityGame.from_names(2, vertices, edges, {0: ("R",), 1: ("L", "R")}, "v0")
    return game, half


def gen_bipartition_uncnv(items: Sequence[int]) -> Tuple[ReachabilityGame, int]:
    """Checked against full_machine: UNCNV answers NO exactly when the multiset splits evenly."""
    total = _check_multiset(items)
    half = total // 2
    if half - 1 < 0:
        raise ReductionError("empty sum gives the negative threshold T/2 - 1")
    n = len(items)
    vertices, edges = _bipartition_chain(
        items,
        (0, half * (2 * n - 1)),
        lambda a: ((a, total), (0, total - a)),
    )
    game = ReachabilityGame.from_names(2, vertices, edges, {0: ("L", "R"), 1: ("L", "R")}, "v0")
    return game, half - 1


def _check_clauses(phi: QbfInstance) -> None:
    declared = phi.variables
    if len(set(declared)) != len(declared):
        raise ReductionError("a variable is quantified twice")
    for k, clause in enumerate(phi.clauses, start=1):
        if len(clause) != 3:
            raise ReductionError(f"clause {k} has {len(clause)} literals, 3CNF needs exactly 3")
        for x, _ in clause:
            if x not in declared:
                raise ReductionError(f"clause {k} uses the undeclared variable {x!r}")


def _literal_vertex(tag: str, x: str, positive: bool) -> str:
    return f"{tag}:{x}" if positive else f"{tag}:!{x}"


def _valuation_chain(
    tag: str,
    start: str,
    variables: Sequence[str],
    owner_of,
    vertices: List[Vertex],
    edges: List[WeightedEdge],
    zero: Tuple[int, ...],
) -> str:
    """start -> (x | !x) -> join -> ... ; returns the last join vertex."""
    here = start
    for k, x in enumerate(variables, start=1):
        vertices.append((here, owner_of(x)))
        nxt = f"{tag}.{k}"
        for positive in (True, False):
            lit = _literal_vertex(tag, x, positive)
            vertices.append((lit, 1))
            edges.append((here, lit, zero))
            edges.append((lit, nxt, zero))
        here = nxt
    return here


def gen_qbf_ncpv(phi: QbfInstance) -> ReachabilityGame:
    """
    exists X forall Y not(phi) is true iff NCPV at threshold 0 answers NO.
    Player 0 owns nothing; the environment's targets are
    (T_1, T_x1, T_!x1, ..., T_C1, ...) in that order.
    """
    _check_clauses(phi)
    kinds = [q for q, _ in phi.blocks]
    if kinds not in ([], ["exists"], ["exists", "forall"]):
        raise ReductionError("sigma-2 instance needs one exists block optionally followed by one forall block")
    xs = list(phi.blocks[0][1]) if phi.blocks else []
    ys = list(phi.blocks[1][1]) if len(phi.blocks) > 1 else []
    n_players = 2 + 2 * len(xs) + len(phi.clauses)
    zero = tuple(0 for _ in range(n_players))
    vertices: List[Vertex] = [("v0", 1)]
    edges: List[WeightedEdge] = [("v0", "v1", zero), ("v0", "v2", zero)]
    end1 = _valuation_chain("a1", "v1", xs, lambda _: 1, vertices, edges, zero)
    end2 = _valuation_chain("a2", "v2", xs + ys, lambda _: 1, vertices, edges, zero)
    for end in (end1, end2):
        vertices.append((end, 1))
        edges.append((end, end, zero))
    targets: Dict[int, List[str]] = {0: ["v2"], 1: ["v2"]}
    slot = 2
    for x in xs:
        for positive in (True, False):
            targets[slot] = [_literal_vertex("a1", x, positive), _literal_vertex("a2", x, positive)]
            slot += 1
    for clause in phi.clauses:
        targets[slot] = ["v1"] + sorted({_literal_vertex("a2", x, positive) for x, positive in clause})
        slot += 1
    return ReachabilityGame.from_names(n_players, _dedupe(vertices), edges, targets, "v0")


def gen_coqbf_cps(phi: QbfInstance) -> ReachabilityGame:
    """
    Q1 x1 ... Qn xn [phi = 0] is true iff CPS at threshold 0 answers YES.
    Existential choice vertices belong to player 0; targets (T_0, T_1, T_C1, ...).
    """
    _check_clauses(phi)
    xs = phi.variables
    if not xs:
        raise ReductionError("coQBF instance needs at least one variable")
    n_players = 2 + len(phi.clauses)
    zero = tuple(0 for _ in range(n_players))
    first = "q.0"
    vertices: List[Vertex] = [("v0", 1), ("v1", 1)]
    edges: List[WeightedEdge] = [("v0", "v1", zero), ("v1", "v1", zero), ("v0", first, zero)]
    end = _valuation_chain(
        "q",
        first,
        xs,
        lambda x: 0 if phi.quantifier(x) == "exists" else 1,
        vertices,
        edges,
        zero,
    )
    vertices.append((end, 1))
    edges.append((end, end, zero))
    targets: Dict[int, List[str]] = {0: ["v1"], 1: [first]}
    for k, clause in enumerate(phi.clauses, start=2):
        targets[k] = ["v1"] + sorted({_literal_vertex("q", x, positive) for x, positive in clause})
    return ReachabilityGame.from_names(n_players, vertices, edges, targets, "v0")


def _dedupe(vertices: Sequence[Vertex]) -> List[Vertex]:
    seen: Dict[str, int] = {}
    for name, owner in vertices:
        seen.setdefault(name, owner)
    return list(seen.items())


# ---------------------------------------------------------------------------
# 源问题文本格式
# ---------------------------------------------------------------------------

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _lines(text: str) -> Iterable[Tuple[int, List[str]]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _natural(token: str, no: int, col: int, errors: List[Diagnostic]) -> int:
    if not token.isdigit():
        errors.append(Diagnostic(no, col, f"expected a natural number, got {token!r}"))
        return 0
    return int(token)


def parse_countdown(text: str) -> CountdownGame:
    errors: List[Diagnostic] = []
    states: List[str] = []
    edges: List[Tuple[str, int, str]] = []
    initial = None
    threshold = None
    for no, words in _lines(text):
        head = words[0]
        if head == "state" and len(words) in (2, 3):
            if not _NAME.match(words[1]):
                errors.append(Diagnostic(no, 7, f"bad state name {words[1]!r}"))
            states.append(words[1])
            if len(words) == 3:
                if words[2] != "initial":
                    errors.append(Diagnostic(no, 8 + len(words[1]), f"unexpected {words[2]!r}"))
                elif initial is not None:
                    errors.append(Diagnostic(no, 1, "second initial state"))
                else:
                    initial = words[1]
        elif head == "edge" and len(words) == 4:
            edges.append((words[1], _natural(words[2], no, 6 + len(words[1]), errors), words[3]))
        elif head == "threshold" and len(words) == 2:
            threshold = _natural(words[1], no, 11, errors)
        else:
            errors.append(Diagnostic(no, 1, f"cannot read {' '.join(words)!r}"))
    if initial is None:
        errors.append(Diagnostic(0, 0, "no initial state"))
    if threshold is None:
        errors.append(Diagnostic(0, 0, "no threshold"))
    if errors:
        raise FormatError(errors)
    return CountdownGame(tuple(states), tuple(edges), initial, threshold)


def parse_subsetsum(text: str) -> SubsetSumInstance:
    errors: List[Diagnostic] = []
    target = None
    rounds: List[SubsetSumRound] = []
    for no, words in _lines(text):
        if words[0] == "target" and len(words) == 2:
            target = _natural(words[1], no, 8, errors)
        elif words[0] == "round" and len(words) == 5:
            a, b, e, f = (_natural(w, no, 7, errors) for w in words[1:])
            rounds.append(SubsetSumRound(a, b, e, f))
        else:
            errors.append(Diagnostic(no, 1, f"cannot read {' '.join(words)!r}"))
    if target is None:
        errors.append(Diagnostic(0, 0, "no target line"))
    if errors:
        raise FormatError(errors)
    return SubsetSumInstance(target, tuple(rounds))


def parse_multiset(text: str) -> List[int]:
    errors: List[Diagnostic] = []
    items: List[int] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for m in re.finditer(r"[^\s,]+", line):
            items.append(_natural(m.group(0), no, m.start() + 1, errors))
    if errors:
        raise FormatError(errors)
    return items


def parse_qbf(text: str) -> QbfInstance:
    errors: List[Diagnostic] = []
    blocks: List[Tuple[str, Tuple[str, ...]]] = []
    clauses: List[Tuple[Literal, ...]] = []
    for no, words in _lines(text):
        head = words[0]
        if head in ("exists", "forall"):
            for w in words[1:]:
                if not _NAME.match(w):
                    errors.append(Diagnostic(no, 1, f"bad variable name {w!r}"))
            blocks.append((head, tuple(words[1:])))
        elif head == "clause":
            lits: List[Literal] = []
            for w in words[1:]:
                positive = not w.startswith("-")
                name = w.lstrip("-")
                if not _NAME.match(name):
                    errors.append(Diagnostic(no, 1, f"bad literal {w!r}"))
                lits.append((name, positive))
            clauses.append(tuple(lits))
        else:
            errors.append(Diagnostic(no, 1, f"cannot read {' '.join(words)!r}"))
    if errors:
        raise FormatError(errors)
    return QbfInstance(tuple(blocks), tuple(clauses))
