import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .arena import Lasso, ReachabilityGame, cost_of_lasso
from .errors import InvalidInputError, ReachGameError
from .formats import (
    ProblemBlock,
    build_certificate,
    check_certificate,
    cost_to_json,
    lasso_to_json,
    parse_game_document,
    parse_machine,
    serialize_game,
    serialize_machine,
)
from .mealy import MealyMachine, full_machine, memoryless_machine, product_game
from .nash import solve_cns, verify_ncnv, verify_uncnv
from .ncns_one_env import solve_ncns_one_env
from .oracle import PROBLEMS, OracleInstance, oracle_decide
from .pareto import solve_cps, verify_ncpv, verify_uncpv
from .reductions import (
    gen_bipartition_cns,
    gen_bipartition_uncnv,
    gen_coqbf_cps,
    gen_countdown_bounded_ncns,
    gen_countdown_ncns,
    gen_qbf_ncpv,
    gen_subsetsum_ncns,
    parse_countdown,
    parse_multiset,
    parse_qbf,
    parse_subsetsum,
)
from .settings import load_env_file, parse_budget

EXIT_YES = 0
EXIT_NO = 1
EXIT_ERROR = 2

SOLVE = ("cns", "cps", "ncns1")
VERIFY = ("ncnv", "uncnv", "ncpv", "uncpv")
GENERATORS = ("countdown", "countdown-bounded", "subsetsum", "bipartition", "bipartition-uncnv", "qbf", "coqbf")


def ensure_dirs(base_dir: Path) -> Dict[str, Path]:
    outputs = base_dir / "outputs"
    certificates_dir = outputs / "certificates"
    logs_dir = outputs / "logs"
    for d in (outputs, certificates_dir, logs_dir):
        d.mkdir(parents=True, exist_ok=True)
    return {
        "outputs": outputs,
        "certificates": certificates_dir,
        "logs": logs_dir,
    }


def say(quiet: bool, message: str) -> None:
    if not quiet:
        print(f"[ReachGame] {message}", flush=True)


def resolve_instance(name: str, base_dir: Path, suffix: str) -> Path:
    """A real path wins; otherwise `name` is looked up in base_dir/instances."""
    path = Path(name)
    if path.exists():
        return path
    for candidate in (base_dir / "instances" / name, base_dir / "instances" / f"{name}{suffix}"):
        if candidate.exists():
            return candidate
    raise InvalidInputError(f"no such file or instance: {name}")


def load_game(name: str, base_dir: Path) -> Tuple[ReachabilityGame, Optional[ProblemBlock], Path]:
    path = resolve_instance(name, base_dir, ".game")
    doc = parse_game_document(path.read_text(encoding="utf-8"))
    return doc.game, doc.problem, path


def load_machine(name: str, game: ReachabilityGame, base_dir: Path, near: Optional[Path] = None) -> MealyMachine:
    if near is not None and (near.parent / name).exists():
        path = near.parent / name
    else:
        path = resolve_instance(name, base_dir, ".mealy")
    return parse_machine(path.read_text(encoding="utf-8"), game)


def _threshold(args: argparse.Namespace, problem: Optional[ProblemBlock]) -> int:
    if args.threshold is not None:
        return args.threshold
    if problem is not None:
        return problem.threshold
    raise InvalidInputError("--threshold is required (the game file has no problem block)")


def _machine(args, game, problem, base_dir, game_path) -> Optional[MealyMachine]:
    ref = args.machine or (problem.machine if problem else None)
    if ref is None:
        return None
    return load_machine(ref, game, base_dir, game_path)


def _verdict(ok: bool) -> str:
    return "YES" if ok else "NO"


def _report(
    command: str,
    problem: str,
    verdict: str,
    threshold: Optional[int],
    game: Optional[ReachabilityGame],
    lasso: Optional[Lasso],
    extra: Dict[str, Any],
    started: float,
) -> Dict[str, Any]:
    return {
        "schema": 1,
        "command": command,
        "problem": problem,
        "verdict": verdict,
        "threshold": threshold,
        "lasso": lasso_to_json(game, lasso) if game is not None else None,
        "costs": [cost_to_json(x) for x in cost_of_lasso(game, lasso)] if lasso is not None else None,
        "extra": extra,
        "elapsed_seconds": round(time.time() - started, 6),
    }


def print_report(report: Dict[str, Any], fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, ensure_ascii=False, indent=2), flush=True)
        return
    for key in ("command", "problem", "verdict", "threshold"):
        print(f"{key}: {report[key]}", flush=True)
    if report.get("lasso"):
        words = report["lasso"]["prefix"] + ["(" + " ".join(report["lasso"]["cycle"]) + ")^w"]
        print(f"lasso: {' '.join(words)}", flush=True)
        print(f"costs: ({', '.join(str(x) for x in report['costs'])})", flush=True)
    for key, value in sorted(report.get("extra", {}).items()):
        print(f"{key}: {value}", flush=True)
    print(f"elapsed_seconds: {report['elapsed_seconds']}", flush=True)


def _write_certificate(target: str, paths: Dict[str, Path], data: Dict[str, Any], quiet: bool) -> Path:
    path = Path(target)
    if len(path.parts) == 1:
        path = paths["certificates"] / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, ensure_ascii=False, indent=2), encoding="utf-8")
    say(quiet, f"证书已写入 → {path}")
    return path


def run_solve(args: argparse.Namespace, base_dir: Path, paths: Dict[str, Path], started: float) -> Tuple[int, Dict[str, Any]]:
    game, problem, _ = load_game(args.game, base_dir)
    c = _threshold(args, problem)
    say(args.quiet, f"求解 {args.problem.upper()}: |V|={game.arena.vertex_count}, 玩家数={game.num_players}, c={c}")
    extra: Dict[str, Any] = {}
    if args.problem == "cns":
        ok, lasso = solve_cns(game, c)
    elif args.problem == "cps":
        ok, found = solve_cps(game, c)
        lasso = found[0] if found else None
        if found:
            extra["payoff"] = [cost_to_json(x) for x in found[1]]
    else:
        result = solve_ncns_one_env(game, c, jobs=args.jobs)
        ok, lasso = result.answer, result.play
        if result.answer:
            extra["d"] = cost_to_json(result.d)
    verdict = _verdict(ok)
    name = "NCNS1" if args.problem == "ncns1" else args.problem.upper()
    if args.certificate:
        cert = build_certificate(name, c, verdict, game, lasso=lasso, extra=extra)
        _write_certificate(args.certificate, paths, cert, args.quiet)
    report = _report("solve", name, verdict, c, game, lasso, extra, started)
    return (EXIT_YES if ok else EXIT_NO), report


def run_verify(args: argparse.Namespace, base_dir: Path, paths: Dict[str, Path], started: float) -> Tuple[int, Dict[str, Any]]:
    game, problem, game_path = load_game(args.game, base_dir)
    c = _threshold(args, problem)
    machine = _machine(args, game, problem, base_dir, game_path)
    if machine is None:
        raise InvalidInputError(f"verify {args.problem} needs --machine")
    product = product_game(game, machine)
    say(
        args.quiet,
        f"校验 {args.problem.upper()}: 乘积顶点数={product.game.arena.vertex_count}, "
        f"确定性={machine.is_deterministic}, c={c}",
    )
    verifier = {"ncnv": verify_ncnv, "uncnv": verify_uncnv, "ncpv": verify_ncpv, "uncpv": verify_uncpv}[args.problem]
    ok, counterexample = verifier(product, c)
    lasso = product.project(counterexample) if counterexample is not None else None
    extra: Dict[str, Any] = {}
    if counterexample is not None:
        extra["product_lasso"] = lasso_to_json(product.game, counterexample)
    verdict = _verdict(ok)
    name = args.problem.upper()
    if args.certificate:
        cert = build_certificate(name, c, verdict, game, machine, lasso, counterexample)
        _write_certificate(args.certificate, paths, cert, args.quiet)
    report = _report("verify", name, verdict, c, game, lasso, extra, started)
    return (EXIT_YES if ok else EXIT_NO), report


def run_oracle(args: argparse.Namespace, base_dir: Path, paths: Dict[str, Path], started: float) -> Tuple[int, Dict[str, Any]]:
    game, problem, game_path = load_game(args.game, base_dir)
    c = _threshold(args, problem)
    machine = _machine(args, game, problem, base_dir, game_path)
    bounds = tuple(int(x) for x in args.bounds.split(",")) if args.bounds else ()
    budget = parse_budget(args.budget)
    name = args.problem.upper()
    say(args.quiet, f"暴力参照 {name}: 预算={budget}")
    ok = oracle_decide(name, OracleInstance(game, c, machine, bounds), budget, jobs=args.jobs)
    report = _report("oracle", name, _verdict(ok), c, None, None, {}, started)
    return (EXIT_YES if ok else EXIT_NO), report


def _generate(kind: str, text: str, game_out: Path) -> Tuple[ReachabilityGame, ProblemBlock, Optional[MealyMachine], Dict[str, Any]]:
    extra: Dict[str, Any] = {}
    machine_name = game_out.with_suffix(".mealy").name
    if kind == "countdown":
        game, c = gen_countdown_ncns(parse_countdown(text))
        return game, ProblemBlock("NCNS", c), None, extra
    if kind == "countdown-bounded":
        game, bounds, c = gen_countdown_bounded_ncns(parse_countdown(text))
        extra["bounds"] = list(bounds)
        return game, ProblemBlock("NCNS_BOUNDED", c), None, extra
    if kind == "subsetsum":
        game, c = gen_subsetsum_ncns(parse_subsetsum(text))
        return game, ProblemBlock("NCNS1", c), None, extra
    if kind == "bipartition":
        game, c = gen_bipartition_cns(parse_multiset(text))
        return game, ProblemBlock("CNS", c), None, extra
    if kind == "bipartition-uncnv":
        game, c = gen_bipartition_uncnv(parse_multiset(text))
        return game, ProblemBlock("UNCNV", c, machine_name), full_machine(game), extra
    if kind == "qbf":
        game = gen_qbf_ncpv(parse_qbf(text))
        return game, ProblemBlock("NCPV", 0, machine_name), memoryless_machine(game, {}), extra
    game = gen_coqbf_cps(parse_qbf(text))
    return game, ProblemBlock("CPS", 0), None, extra


def run_gen(args: argparse.Namespace, base_dir: Path, paths: Dict[str, Path], started: float) -> Tuple[int, Dict[str, Any]]:
    source = resolve_instance(args.input, base_dir, ".txt")
    out = Path(args.out) if args.out else paths["outputs"] / f"{args.kind}.game"
    game, block, machine, extra = _generate(args.kind, source.read_text(encoding="utf-8"), out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(serialize_game(game, args.file_format, block), encoding="utf-8")
    say(args.quiet, f"实例已生成 → {out} ({game.arena.vertex_count} 个顶点, {game.num_players} 个玩家)")
    extra.update({"game": str(out), "vertices": game.arena.vertex_count, "players": game.num_players})
    if machine is not None:
        machine_path = out.with_suffix(".mealy")
        machine_path.write_text(serialize_machine(machine, game, args.file_format), encoding="utf-8")
        extra["machine"] = str(machine_path)
    report = _report("gen", block.name, "YES", block.threshold, None, None, extra, started)
    return EXIT_YES, report


def run_check(args: argparse.Namespace, base_dir: Path, paths: Dict[str, Path], started: float) -> Tuple[int, Dict[str, Any]]:
    game, problem, game_path = load_game(args.game, base_dir)
    machine = _machine(args, game, problem, base_dir, game_path)
    extra: Dict[str, Any] = {"vertices": game.arena.vertex_count, "players": game.num_players}
    if machine is not None:
        extra["memory"] = len(machine.states)
        extra["deterministic"] = machine.is_deterministic
    say(args.quiet, f"文件校验通过: {game_path}")
    report = _report("check", problem.name if problem else "-", "YES", None, None, None, extra, started)
    return EXIT_YES, report


def run_check_certificate(args: argparse.Namespace, base_dir: Path, paths: Dict[str, Path], started: float) -> Tuple[int, Dict[str, Any]]:
    ok, problems = check_certificate(Path(args.file))
    for p in problems:
        say(args.quiet, f"证书问题: {p}")
    report = _report("check-certificate", "-", _verdict(ok), None, None, None, {"problems": problems}, started)
    return (EXIT_YES if ok else EXIT_NO), report


def parse_args(argv: List[str]) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="多玩家带权可达博弈的理性验证与综合")
    parser.add_argument("--base-dir", default=str(Path(__file__).resolve().parents[1]))
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--log", action="store_true", help="write outputs/logs/<command>_<problem>.report.json")
    parser.add_argument("--format", dest="report_format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    def game_flags(p: argparse.ArgumentParser, machine: bool = True) -> None:
        p.add_argument("--game", required=True)
        p.add_argument("--threshold", type=int)
        if machine:
            p.add_argument("--machine")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--certificate")

    p = sub.add_parser("solve")
    p.add_argument("problem", choices=SOLVE)
    game_flags(p, machine=False)

    p = sub.add_parser("verify")
    p.add_argument("problem", choices=VERIFY)
    game_flags(p)

    p = sub.add_parser("oracle")
    p.add_argument("problem", type=str.upper, choices=PROBLEMS)
    game_flags(p)
    p.add_argument("--budget", help="lasso=N,horizon=N,profiles=N,memory=K")
    p.add_argument("--bounds", help="satisficing bounds d_1,...,d_t for NCNS_BOUNDED")

    p = sub.add_parser("gen")
    p.add_argument("kind", choices=GENERATORS)
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--file-format", choices=("text", "json"), default="text")

    p = sub.add_parser("check")
    p.add_argument("--game", required=True)
    p.add_argument("--machine")

    p = sub.add_parser("check-certificate")
    p.add_argument("file")
    return parser.parse_args(argv)


HANDLERS = {
    "solve": run_solve,
    "verify": run_verify,
    "oracle": run_oracle,
    "gen": run_gen,
    "check": run_check,
    "check-certificate": run_check_certificate,
}


def _problem_label(args: argparse.Namespace) -> str:
    return str(getattr(args, "problem", None) or getattr(args, "kind", None) or "all").lower()


def run_command(argv: List[str]) -> int:
    args = parse_args(argv)
    base_dir = Path(args.base_dir)
    load_env_file(base_dir)
    paths = ensure_dirs(base_dir)
    label = f"{args.command}_{_problem_label(args)}"
    started = time.time()
    try:
        status, report = HANDLERS[args.command](args, base_dir, paths, started)
    except ReachGameError as e:
        err_path = paths["logs"] / f"{label}.error.txt"
        err_path.write_text(f"{e.kind}: {e}", encoding="utf-8")
        say(args.quiet, f"失败 ({e.kind}): {e} → {err_path}")
        report = {
            "schema": 1,
            "command": args.command,
            "problem": _problem_label(args).upper(),
            "verdict": "INCONCLUSIVE" if e.kind in ("inconclusive", "budget") else "ERROR",
            "error": {"kind": e.kind, "message": str(e)},
            "elapsed_seconds": round(time.time() - started, 6),
        }
        if args.report_format == "json":
            print(json.dumps(report, ensure_ascii=False, indent=2), flush=True)
        if args.log:
            (paths["logs"] / f"{label}.report.json").write_text(
                json.dumps(report, ensure_ascii=False, indent=2), encoding="utf-8"
            )
        return EXIT_ERROR
    print_report(report, args.report_format)
    if args.log:
        log_path = paths["logs"] / f"{label}.report.json"
        log_path.write_text(json.dumps(report, ensure_ascii=False, indent=2), encoding="utf-8")
        say(args.quiet, f"报告已写入 → {log_path}")
    return status


def main(argv: List[str]) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main(sys.argv[1:])
