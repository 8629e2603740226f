"""
文件格式: 博弈 / Mealy 机文档 (逐行文本或 JSON, schema 1) 以及判定证书的写出与回放校验。
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .arena import (
    TOP,
    Cost,
    CostVector,
    Lasso,
    ReachabilityGame,
    check_lasso,
    cost_of_lasso,
    format_cost,
    payoff,
    validate_game,
)
from .errors import Diagnostic, FormatError, ReachGameError
from .mealy import MealyMachine, machine_violations, product_game
from .nash import is_nash_outcome
from .ncns_one_env import check_c_witness
from .pareto import ParetoContext, ensure_po, is_pareto_optimal
from .zerosum import ZeroSumView, min_cost_reach_values

SCHEMA = 1
_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class ProblemBlock:
    name: str
    threshold: int
    machine: Optional[str] = None


@dataclass(frozen=True)
class GameDocument:
    game: ReachabilityGame
    problem: Optional[ProblemBlock] = None


def _tokens(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        found = [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(line)]
        if found:
            yield no, found


def _int(tok: Tuple[str, int], no: int, errors: List[Diagnostic]) -> int:
    text, col = tok
    if not re.fullmatch(r"\d+", text):
        errors.append(Diagnostic(no, col, f"expected a natural number, got {text!r}"))
        return 0
    return int(text)


def _is_json(text: str) -> bool:
    return text.lstrip().startswith("{")


def _load_json(text: str) -> Dict[str, Any]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError([Diagnostic(e.lineno, e.colno, e.msg)]) from e
    if not isinstance(data, dict):
        raise FormatError([Diagnostic(1, 1, "top-level JSON value must be an object")])
    if data.get("schema") != SCHEMA:
        raise FormatError([Diagnostic(1, 1, f"unsupported schema {data.get('schema')!r}")])
    return data


# ---------------------------------------------------------------------------
# game documents
# ---------------------------------------------------------------------------


def _build_game(
    players: int,
    vertices: List[Tuple[str, int]],
    edges: List[Tuple[str, str, List[int], int]],
    targets: Dict[int, List[str]],
    initial: Optional[str],
    errors: List[Diagnostic],
) -> ReachabilityGame:
    declared = {n for n, _ in vertices}
    for a, b, w, no in edges:
        for name in (a, b):
            if name not in declared:
                errors.append(Diagnostic(no, 1, f"edge {a}->{b}: vertex {name!r} is not declared"))
        if len(w) != players:
            errors.append(Diagnostic(no, 1, f"edge {a}->{b}: {len(w)} weights for {players} players"))
    for i, names in targets.items():
        if not 0 <= i < players:
            errors.append(Diagnostic(0, 0, f"target set for undeclared player {i}"))
        for name in names:
            if name not in declared:
                errors.append(Diagnostic(0, 0, f"target of player {i}: vertex {name!r} is not declared"))
    if initial is None:
        errors.append(Diagnostic(0, 0, "no initial vertex"))
    elif initial not in declared:
        errors.append(Diagnostic(0, 0, f"initial vertex {initial!r} is not declared"))
    if errors:
        raise FormatError(errors)
    game = ReachabilityGame.from_names(
        players,
        vertices,
        [(a, b, w) for a, b, w, _ in edges],
        {i: names for i, names in targets.items() if 0 <= i < players},
        initial,
    )
    problems = validate_game(game)
    if problems:
        raise FormatError([Diagnostic(0, 0, p) for p in problems])
    return game


def _parse_game_text(text: str) -> GameDocument:
    errors: List[Diagnostic] = []
    players: Optional[int] = None
    vertices: List[Tuple[str, int]] = []
    edges: List[Tuple[str, str, List[int], int]] = []
    targets: Dict[int, List[str]] = {}
    initial: Optional[str] = None
    problem: Optional[ProblemBlock] = None
    header = False
    for no, toks in _tokens(text):
        words = [t for t, _ in toks]
        head = words[0]
        if not header:
            if words != ["reachgame", str(SCHEMA)]:
                errors.append(Diagnostic(no, 1, f"expected 'reachgame {SCHEMA}' header"))
                raise FormatError(errors)
            header = True
            continue
        if head == "players" and len(words) == 2:
            players = _int(toks[1], no, errors)
        elif head == "vertex" and len(words) == 4 and words[2] == "owner":
            vertices.append((words[1], _int(toks[3], no, errors)))
        elif head == "edge" and len(words) >= 3:
            edges.append((words[1], words[2], [_int(t, no, errors) for t in toks[3:]], no))
        elif head == "target" and len(words) >= 2:
            targets.setdefault(_int(toks[1], no, errors), []).extend(words[2:])
        elif head == "initial" and len(words) == 2:
            initial = words[1]
        elif head == "problem" and len(words) in (4, 6) and words[2] == "threshold":
            machine = None
            if len(words) == 6:
                if words[4] != "machine":
                    errors.append(Diagnostic(no, toks[4][1], f"expected 'machine', got {words[4]!r}"))
                machine = words[5]
            problem = ProblemBlock(words[1], _int(toks[3], no, errors), machine)
        else:
            errors.append(Diagnostic(no, toks[0][1], f"cannot read {' '.join(words)!r}"))
    if not header:
        raise FormatError([Diagnostic(1, 1, "empty game document")])
    if players is None:
        errors.append(Diagnostic(0, 0, "no 'players' line"))
        raise FormatError(errors)
    return GameDocument(_build_game(players, vertices, edges, targets, initial, errors), problem)


def _parse_game_json(data: Dict[str, Any]) -> GameDocument:
    errors: List[Diagnostic] = []
    try:
        players = int(data["players"])
        vertices = [(str(v["name"]), int(v["owner"])) for v in data["vertices"]]
        edges = [
            (str(e["from"]), str(e["to"]), [int(x) for x in e["weights"]], k + 1)
            for k, e in enumerate(data["edges"])
        ]
        targets = {int(i): [str(n) for n in names] for i, names in data.get("targets", {}).items()}
        initial = str(data["initial"])
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError([Diagnostic(0, 0, f"malformed game JSON: {e!r}")]) from e
    problem = None
    if data.get("problem"):
        block = data["problem"]
        problem = ProblemBlock(str(block["name"]), int(block["threshold"]), block.get("machine"))
    return GameDocument(_build_game(players, vertices, edges, targets, initial, errors), problem)


def parse_game_document(text: str) -> GameDocument:
    if _is_json(text):
        return _parse_game_json(_load_json(text))
    return _parse_game_text(text)


def parse_game(text: str) -> ReachabilityGame:
    return parse_game_document(text).game


def _game_json(game: ReachabilityGame, problem: Optional[ProblemBlock] = None) -> Dict[str, Any]:
    arena = game.arena
    data: Dict[str, Any] = {
        "schema": SCHEMA,
        "players": arena.num_players,
        "vertices": [{"name": n, "owner": o} for n, o in zip(arena.names, arena.owner)],
        "edges": [
            {"from": arena.names[u], "to": arena.names[v], "weights": list(w)}
            for u, v, w in arena.edges
        ],
        "targets": {str(i): game.names_of(sorted(t)) for i, t in enumerate(game.targets)},
        "initial": game.name(game.initial),
    }
    if problem is not None:
        data["problem"] = {"name": problem.name, "threshold": problem.threshold, "machine": problem.machine}
    return data


def serialize_game(game: ReachabilityGame, fmt: str = "text", problem: Optional[ProblemBlock] = None) -> str:
    if fmt == "json":
        return json.dumps(_game_json(game, problem), ensure_ascii=False, indent=2) + "\n"
    arena = game.arena
    lines = [f"reachgame {SCHEMA}", f"players {arena.num_players}"]
    lines += [f"vertex {n} owner {o}" for n, o in zip(arena.names, arena.owner)]
    lines += [
        f"edge {arena.names[u]} {arena.names[v]} {' '.join(str(x) for x in w)}"
        for u, v, w in arena.edges
    ]
    for i, t in enumerate(game.targets):
        lines.append(" ".join([f"target {i}"] + game.names_of(sorted(t))))
    lines.append(f"initial {game.name(game.initial)}")
    if problem is not None:
        tail = f" machine {problem.machine}" if problem.machine else ""
        lines.append(f"problem {problem.name} threshold {problem.threshold}{tail}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Mealy machine documents
# ---------------------------------------------------------------------------


def _build_machine(
    game: ReachabilityGame,
    states: List[str],
    initial: Optional[str],
    delta: List[Tuple[str, str, List[str], int]],
    tau: List[Tuple[str, str, List[str], int]],
    errors: List[Diagnostic],
) -> MealyMachine:
    arena = game.arena
    sid = {s: k for k, s in enumerate(states)}
    vid = {n: k for k, n in enumerate(arena.names)}
    if initial is None:
        errors.append(Diagnostic(0, 0, "no initial memory state"))
    update: Dict[Tuple[int, int], frozenset] = {}
    defaults: Dict[int, frozenset] = {}
    next_move: Dict[Tuple[int, int], frozenset] = {}
    for m, v, image, no in delta:
        if m not in sid or any(x not in sid for x in image):
            errors.append(Diagnostic(no, 1, f"delta {m} {v}: undeclared memory state"))
            continue
        if v == "*":
            defaults[sid[m]] = frozenset(sid[x] for x in image)
        elif v not in vid:
            errors.append(Diagnostic(no, 1, f"delta {m} {v}: vertex is not declared"))
        else:
            update[(sid[m], vid[v])] = frozenset(sid[x] for x in image)
    for m, v, moves, no in tau:
        if m not in sid or v not in vid or any(x not in vid for x in moves):
            errors.append(Diagnostic(no, 1, f"tau {m} {v}: undeclared state or vertex"))
            continue
        next_move[(sid[m], vid[v])] = frozenset(vid[x] for x in moves)
    if errors:
        raise FormatError(errors)
    for m, image in defaults.items():
        for v in arena.vertices:
            update.setdefault((m, v), image)
    machine = MealyMachine(tuple(states), sid[initial], update, next_move)
    problems = machine_violations(game, machine)
    if problems:
        raise FormatError([Diagnostic(0, 0, p) for p in problems])
    return machine


def parse_machine(text: str, game: ReachabilityGame) -> MealyMachine:
    if _is_json(text):
        data = _load_json(text)
        try:
            states = [str(s) for s in data["states"]]
            initial = str(data["initial"])
            delta = [(str(d["state"]), str(d["vertex"]), [str(x) for x in d["to"]], 0) for d in data["delta"]]
            tau = [(str(d["state"]), str(d["vertex"]), [str(x) for x in d["moves"]], 0) for d in data.get("tau", [])]
        except (KeyError, TypeError) as e:
            raise FormatError([Diagnostic(0, 0, f"malformed machine JSON: {e!r}")]) from e
        return _build_machine(game, states, initial, delta, tau, [])

    errors: List[Diagnostic] = []
    states: List[str] = []
    initial = None
    delta: List[Tuple[str, str, List[str], int]] = []
    tau: List[Tuple[str, str, List[str], int]] = []
    header = False
    for no, toks in _tokens(text):
        words = [t for t, _ in toks]
        if not header:
            if words != ["mealy", str(SCHEMA)]:
                raise FormatError([Diagnostic(no, 1, f"expected 'mealy {SCHEMA}' header")])
            header = True
            continue
        head = words[0]
        if head == "state" and len(words) in (2, 3):
            states.append(words[1])
            if len(words) == 3:
                if words[2] != "initial":
                    errors.append(Diagnostic(no, toks[2][1], f"unexpected {words[2]!r}"))
                else:
                    initial = words[1]
        elif head == "delta" and len(words) >= 4:
            delta.append((words[1], words[2], words[3:], no))
        elif head == "tau" and len(words) >= 4:
            tau.append((words[1], words[2], words[3:], no))
        else:
            errors.append(Diagnostic(no, toks[0][1], f"cannot read {' '.join(words)!r}"))
    if not header:
        raise FormatError([Diagnostic(1, 1, "empty machine document")])
    return _build_machine(game, states, initial, delta, tau, errors)


def _machine_entries(machine: MealyMachine, game: ReachabilityGame):
    names = game.arena.names
    for (m, v), image in sorted(machine.update.items()):
        yield "delta", machine.states[m], names[v], [machine.states[x] for x in sorted(image)]
    for (m, v), moves in sorted(machine.next_move.items()):
        yield "tau", machine.states[m], names[v], [names[x] for x in sorted(moves)]


def serialize_machine(machine: MealyMachine, game: ReachabilityGame, fmt: str = "text") -> str:
    if fmt == "json":
        data = {
            "schema": SCHEMA,
            "states": list(machine.states),
            "initial": machine.states[machine.initial],
            "delta": [],
            "tau": [],
        }
        for kind, m, v, image in _machine_entries(machine, game):
            key = "to" if kind == "delta" else "moves"
            data[kind].append({"state": m, "vertex": v, key: image})
        return json.dumps(data, ensure_ascii=False, indent=2) + "\n"
    lines = [f"mealy {SCHEMA}"]
    for k, s in enumerate(machine.states):
        lines.append(f"state {s} initial" if k == machine.initial else f"state {s}")
    for kind, m, v, image in _machine_entries(machine, game):
        lines.append(" ".join([kind, m, v] + image))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def cost_to_json(x: Cost) -> Any:
    return "inf" if x is TOP else x


def cost_from_json(x: Any) -> Cost:
    if x == "inf":
        return TOP
    if isinstance(x, int) and x >= 0:
        return x
    raise FormatError([Diagnostic(0, 0, f"bad cost {x!r}")])


def lasso_to_json(game: ReachabilityGame, pi: Optional[Lasso]) -> Optional[Dict[str, List[str]]]:
    if pi is None:
        return None
    return {"prefix": game.names_of(pi.prefix), "cycle": game.names_of(pi.cycle)}


def lasso_from_json(game: ReachabilityGame, data: Optional[Dict[str, Any]]) -> Optional[Lasso]:
    if data is None:
        return None
    try:
        idx = game.arena.index
        return Lasso(tuple(idx(n) for n in data["prefix"]), tuple(idx(n) for n in data["cycle"]))
    except (KeyError, TypeError) as e:
        raise FormatError([Diagnostic(0, 0, f"malformed lasso: {e!r}")]) from e


@dataclass(frozen=True)
class Certificate:
    problem: str
    threshold: int
    verdict: str
    game: ReachabilityGame
    machine: Optional[MealyMachine] = None
    lasso: Optional[Lasso] = None
    product_lasso: Optional[Lasso] = None
    costs: Tuple[Cost, ...] = ()
    extra: Dict[str, Any] = field(default_factory=dict)


def build_certificate(
    problem: str,
    threshold: int,
    verdict: str,
    game: ReachabilityGame,
    machine: Optional[MealyMachine] = None,
    lasso: Optional[Lasso] = None,
    product_lasso: Optional[Lasso] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "schema": SCHEMA,
        "problem": problem,
        "threshold": threshold,
        "verdict": verdict,
        "game": _game_json(game),
        "machine": json.loads(serialize_machine(machine, game, "json")) if machine else None,
        "lasso": lasso_to_json(game, lasso),
        "product_lasso": None,
        "costs": [cost_to_json(x) for x in cost_of_lasso(game, lasso)] if lasso else [],
        "extra": dict(extra or {}),
    }
    if machine is not None and product_lasso is not None:
        data["product_lasso"] = lasso_to_json(product_game(game, machine).game, product_lasso)
    return data


def parse_certificate(text: str) -> Certificate:
    data = _load_json(text)
    try:
        game = _parse_game_json(data["game"]).game
        machine = None
        if data.get("machine"):
            machine = parse_machine(json.dumps(data["machine"]), game)
        product_lasso = None
        if data.get("product_lasso") is not None:
            if machine is None:
                raise FormatError([Diagnostic(0, 0, "product lasso without a machine")])
            product_lasso = lasso_from_json(product_game(game, machine).game, data["product_lasso"])
        return Certificate(
            problem=str(data["problem"]).upper(),
            threshold=int(data["threshold"]),
            verdict=str(data["verdict"]),
            game=game,
            machine=machine,
            lasso=lasso_from_json(game, data.get("lasso")),
            product_lasso=product_lasso,
            costs=tuple(cost_from_json(x) for x in data.get("costs", [])),
            extra=dict(data.get("extra") or {}),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError([Diagnostic(0, 0, f"malformed certificate: {e!r}")]) from e


def _replay(cert: Certificate) -> List[str]:
    problems: List[str] = []
    game, c = cert.game, cert.threshold
    if cert.lasso is not None:
        check_lasso(game, cert.lasso)
        costs = cost_of_lasso(game, cert.lasso)
        if tuple(costs) != cert.costs:
            problems.append(
                f"claimed costs {CostVector(cert.costs).to_text()} but the lasso costs {costs.to_text()}"
            )
    kind = (cert.problem, cert.verdict)
    if kind == ("CNS", "YES"):
        if not is_nash_outcome(game, cert.lasso):
            problems.append("lasso is not Visit Val*-consistent")
        if cost_of_lasso(game, cert.lasso)[0] > c:
            problems.append("cost_0 exceeds the threshold")
    elif kind in (("NCNV", "NO"), ("UNCNV", "NO")):
        product = product_game(game, cert.machine)
        if not is_nash_outcome(product.game, cert.product_lasso):
            problems.append("counterexample is not a Nash outcome of the product")
        if cost_of_lasso(product.game, cert.product_lasso)[0] <= c:
            problems.append("counterexample does not exceed the threshold")
    elif kind == ("CPS", "YES"):
        p = payoff(game, cert.lasso)
        if cost_of_lasso(game, cert.lasso)[0] > c:
            problems.append("cost_0 exceeds the threshold")
        if not ensure_po(game, cert.lasso, p):
            problems.append("some environment deviation beats the claimed payoff")
    elif kind in (("NCPV", "NO"), ("UNCPV", "NO")):
        product = product_game(game, cert.machine)
        pl = cert.product_lasso
        p = payoff(product.game, pl)
        if cost_of_lasso(product.game, pl)[0] <= c:
            problems.append("counterexample does not exceed the threshold")
        if cert.problem == "NCPV":
            ok = is_pareto_optimal(ParetoContext.for_threshold(product.game, c, above=True), p)
        else:
            ok = ensure_po(product.game, pl, p)
        if not ok:
            problems.append("counterexample payoff is not Pareto-optimal")
    elif kind == ("NCNS1", "YES"):
        if cert.lasso is None:
            values = min_cost_reach_values(ZeroSumView(game.arena, 0), game.targets[0], 0)
            if values[game.initial] > c:
                problems.append("no witness and player 0 cannot force cost_0 <= c alone")
        elif "d" not in cert.extra:
            problems.append("c-witness certificate carries no d")
        else:
            d = cost_from_json(cert.extra["d"])
            if d is TOP:
                problems.append("d of a c-witness must be finite")
            elif not check_c_witness(game, c, d, cert.lasso):
                problems.append("lasso is not a c-witness")
    return problems


def check_certificate(path: Path) -> Tuple[bool, List[str]]:
    """Re-parse a certificate and recompute every predicate it claims."""
    cert = parse_certificate(Path(path).read_text(encoding="utf-8"))
    try:
        problems = _replay(cert)
    except ReachGameError as e:
        problems = [f"{e.kind}: {e}"]
    return not problems, problems
