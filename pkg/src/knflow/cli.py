"""knf: command-line surface for the flow, retraction, sampling and the verification corpus.

Exit codes: 0 success, 1 numerical or verification failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import matcore
from .config import ToleranceConfig, load_config
from .errors import KnflowError, NumericalBreakdown
from .groups import Representation, Word, word_ball
from .invariants import trace_invariants
from .kempfness import flow, polystable_diagnostic
from .sampling import sample
from .scaling import full_retract, stage_one

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON: {exc}") from exc


def _read_rep(path: str) -> Representation:
    data = _read_json(path)
    try:
        return Representation.from_json(data)
    except (KeyError, TypeError, ValueError, KnflowError) as exc:
        raise UsageError(f"{path}: not a representation: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def resolve_config(args) -> ToleranceConfig:
    """Config file, then KNF_SEED, then command-line flags."""
    try:
        tol = load_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise UsageError(f"bad config: {exc}") from exc
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.max_iters is not None:
        changes["max_iters"] = args.max_iters
    if args.tol_mu is not None:
        changes["tol_mu"] = args.tol_mu
    try:
        return tol.replace(**changes) if changes else tol
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# --------------------------------------------------------------- commands


def cmd_verify(args, tol: ToleranceConfig) -> int:
    from .corpus import run_corpus

    report = run_corpus(tol)
    _write(args.out, _dump(report))
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_flow(args, tol: ToleranceConfig) -> int:
    rep = _read_rep(args.rep)
    trace = flow(rep, tol, record=bool(args.t))
    prefix = args.out or Path(args.rep).with_suffix("").as_posix()
    Path(f"{prefix}.trace.csv").write_text(trace.to_csv())
    Path(f"{prefix}.final.json").write_text(_dump(trace.final_rep.to_json()))
    if args.t:
        # snapshot at iteration fraction t of the run
        snaps = [trace.snapshots[min(int(t * trace.num_steps), trace.num_steps)].to_json() for t in args.t]
        Path(f"{prefix}.snapshots.json").write_text(_dump(snaps))
    diag = polystable_diagnostic(trace, tol)
    print(f"steps: {trace.num_steps}")
    print(f"stop: {trace.stop_reason.value}")
    print(f"moment_norm: {trace.final.moment_norm:.6g}")
    print(f"kn_value: {trace.final.kn_value:.12g}")
    print(f"conjugator_norm: {trace.conjugator_norm:.6g}")
    print(f"diagnostic: {diag.value}")
    return EXIT_OK


def cmd_retract(args, tol: ToleranceConfig) -> int:
    rep = _read_rep(args.rep)
    ts = args.t or [1.0]
    if any(not 0.0 <= t <= 1.0 for t in ts):
        raise UsageError("--t values must lie in [0, 1]")
    if not rep.presentation.nilpotent:
        raise UsageError(f"presentation {rep.presentation.name!r} is not flagged nilpotent")
    trace = stage_one(rep, tol) if any(t > 0 for t in ts) else None
    snaps = [full_retract(rep, t, tol, trace) for t in ts]
    _write(args.out, _dump([s.to_json() for s in snaps]))
    status = EXIT_OK
    for t, s in zip(ts, snaps):
        if t == 1.0:
            worst = max(matcore.unitarity_residual(m) for m in s.matrices)
            ok = worst <= tol.tol_unitary * max(1.0, s.norm_sq())
            print(f"unitarity audit t=1: residual {worst:.3g} {'ok' if ok else 'FAILED'}", file=sys.stderr)
            if not ok:
                status = EXIT_FAIL
    return status


def cmd_sample(args, tol: ToleranceConfig) -> int:
    try:
        reps = sample(args.preset, args.count, tol.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(args.out, _dump([r.to_json() for r in reps]))
    return EXIT_OK


def cmd_invariants(args, tol: ToleranceConfig) -> int:
    rep = _read_rep(args.rep)
    if args.words:
        try:
            words = [Word.from_json(w) for w in _read_json(args.words)]
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{args.words}: not a word list: {exc}") from exc
    else:
        words = word_ball(rep.presentation, args.radius)
    _write(args.out, _dump(trace_invariants(rep, words, tol).to_json()))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON tolerance config")
    common.add_argument("--seed", type=int, help="overrides config seed and KNF_SEED")
    common.add_argument("--max-iters", type=int, dest="max_iters")
    common.add_argument("--tol-mu", type=float, dest="tol_mu")
    common.add_argument("--out", help="output path (or prefix for flow); default stdout")

    p = argparse.ArgumentParser(prog="knf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", parents=[common], help="run the verification corpus")

    f = sub.add_parser("flow", parents=[common], help="run the moment-map flow on a representation")
    f.add_argument("rep")
    f.add_argument("--t", type=float, action="append", help="also save the iterate at run fraction t")

    r = sub.add_parser("retract", parents=[common], help="deformation-retract snapshots")
    r.add_argument("rep")
    r.add_argument("--t", type=float, action="append", help="retraction parameter (repeatable)")

    s = sub.add_parser("sample", parents=[common], help="seeded random representations")
    s.add_argument("preset")
    s.add_argument("--count", type=int, default=1)

    i = sub.add_parser("invariants", parents=[common], help="trace invariants of word images")
    i.add_argument("rep")
    i.add_argument("--words", help="JSON list of words; default: the word ball")
    i.add_argument("--radius", type=int, default=2)
    return p


COMMANDS = {
    "verify": cmd_verify,
    "flow": cmd_flow,
    "retract": cmd_retract,
    "sample": cmd_sample,
    "invariants": cmd_invariants,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = resolve_config(args)
        return COMMANDS[args.command](args, tol)
    except UsageError as exc:
        print(f"knf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalBreakdown, KnflowError, ArithmeticError) as exc:
        print(f"knf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
