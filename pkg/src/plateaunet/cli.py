"""Command-line entry point.

Exit codes: 0 success (training reached its target), 1 usage error,
2 training finished without reaching the target.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import io
from .bp_lab import ansatz_variance_scan, identity_proximity, lemma_battery, log_variance_slope
from .encoding import asymmetric_input, pi4_input
from .errors import ConfigurationError
from .trainer import SCHEMES, TrainConfig, aggregate, depth_for, run_configs, sweep_configs, train

log = logging.getLogger("plateaunet")

EXIT_OK, EXIT_USAGE, EXIT_NOT_REACHED = 0, 1, 2
MIN_CONCLUSIVE_SAMPLES = 100


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_range(text: str) -> list[int]:
    """``"a:b"`` (inclusive), ``"a:b:step"``, or a comma list ``"2,4,6"``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            step = parts[2] if len(parts) == 3 else 1
            if step < 1:
                raise ValueError
            values = list(range(parts[0], parts[1] + 1, step))
        else:
            values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"bad qubit range {text!r}") from None
    if not values or min(values) < 1:
        raise UsageError(f"qubit range {text!r} is empty or non-positive")
    return values


def parse_schemes(text: str) -> list[str]:
    schemes = [s.strip() for s in text.split(",") if s.strip()]
    if not schemes:
        raise UsageError("empty scheme list")
    bad = [s for s in schemes if s not in SCHEMES]
    if bad:
        raise UsageError(f"unknown schemes {bad}; choose from {list(SCHEMES)}")
    return schemes


def _input_angles(kind: str, n: int):
    return asymmetric_input(n) if kind == "asym" else pi4_input(n)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _out(args, command: str) -> Path:
    return Path(args.out) if args.out else io.default_out_dir(command)


def cmd_train(args) -> int:
    if args.scheme is None:
        raise UsageError("--scheme is required")
    cfg = TrainConfig(args.scheme, args.qubits, args.depth, args.eta, args.target,
                      args.max_epochs, args.seed, args.input, entangler=args.entangler)
    result = train(cfg)
    out = _out(args, "train")
    io.write_trajectory(out / "trajectory.csv", result)
    summary = result.summary()
    summary.update(wall_time=result.wall_time, timestamp=_now())
    io.write_json(out / "summary.json", summary)
    if result.final_model is not None:
        (out / "model.json").write_text(result.final_model.to_json() + "\n", encoding="utf-8")
    log.info("reached=%s epochs=%s final_cost=%.6g", result.reached, result.epochs_to_target, result.final_cost)
    return EXIT_OK if result.reached else EXIT_NOT_REACHED


def cmd_sweep(args) -> int:
    schemes = parse_schemes(args.schemes)
    n_values = parse_range(args.qubits_range)
    configs = sweep_configs(schemes, n_values, args.depth_rule, args.reps, args.seed_base,
                            eta=args.eta, target_cost=args.target, max_epochs=args.max_epochs,
                            input=args.input, entangler=args.entangler)
    exp_id = io.experiment_id("sweep", {
        "schemes": schemes, "n": n_values, "depth_rule": args.depth_rule, "reps": args.reps,
        "seed_base": args.seed_base, "eta": args.eta, "target": args.target,
        "max_epochs": args.max_epochs, "input": args.input, "entangler": args.entangler,
    })
    started = _now()
    results = run_configs(configs, args.workers)
    out = _out(args, "sweep")
    io.write_csv(out / "records.csv", io.RECORD_COLUMNS, (io.run_record(r, exp_id) for r in results))
    cells = aggregate(results)
    io.write_csv(out / "aggregate.csv", io.AGGREGATE_COLUMNS, (io.aggregate_row(c) for c in cells))
    if args.trajectories:
        rows = ({"scheme": r.config.scheme, "n": r.config.n_qubits, "seed": r.config.seed,
                 "epoch": e, "cost": float(c)} for r in results for e, c in r.trajectory)
        io.write_csv(out / "trajectories.csv", ["scheme", "n", "seed", "epoch", "cost"], rows)
    io.write_json(out / "summary.json", {
        "experiment_id": exp_id, "started": started, "finished": _now(),
        "runs": len(results), "failures": sum(not r.reached for r in results),
        "timings": [{"scheme": r.config.scheme, "n": r.config.n_qubits, "seed": r.config.seed,
                     "wall_time": r.wall_time} for r in results],
    })
    for c in cells:
        log.info("%-6s n=%-2d L=%-2d mean=%s failures=%d", c.scheme, c.n_qubits, c.depth_L,
                 c.mean_epochs, c.failures)
    return EXIT_OK


def cmd_variance(args) -> int:
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    n_values = parse_range(args.qubits_range)
    rng = np.random.default_rng(args.seed)
    reports = ansatz_variance_scan(n_values, args.samples, args.param_index, rng, args.depth_rule)
    out = _out(args, "variance")
    cols = ["n", "L", "param_index", "mean", "variance", "stderr", "variance_stderr", "samples"]
    io.write_csv(out / "variance.csv", cols, (
        {"n": r.n_qubits, "L": r.depth_L, "param_index": r.param_index, "mean": r.mean,
         "variance": r.variance, "stderr": r.stderr, "variance_stderr": r.variance_stderr,
         "samples": r.samples} for r in reports))
    slope = log_variance_slope(reports)
    io.write_json(out / "summary.json", {"log_variance_slope": slope, "rows": len(reports),
                                         "seed": args.seed, "timestamp": _now()})
    log.info("slope of ln Var vs n: %.4f", slope)
    return EXIT_OK


def cmd_lemmas(args) -> int:
    if args.dim < 2 or args.dim > 64:
        raise UsageError("--dim must be in [2, 64]")
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    rng = np.random.default_rng(args.seed)
    reports = lemma_battery(args.dim, args.samples, 2 * args.samples, rng)
    out = _out(args, "lemmas")
    rows = [r.as_row() for r in reports]
    io.write_csv(out / "lemmas.csv", list(rows[0]), rows)
    conclusive = args.samples >= MIN_CONCLUSIVE_SAMPLES
    io.write_json(out / "summary.json", {
        "dim": args.dim, "samples": args.samples, "seed": args.seed,
        "statistically_conclusive": conclusive,
        "all_within_3se": all(r.within() for r in reports), "timestamp": _now(),
    })
    for r in reports:
        print(f"lemma {r.lemma} {r.label:<17} est={r.estimate.real:+.6f} exact={r.analytic.real:+.6f} "
              f"z={r.z_score:.2f} {'ok' if r.within() else 'MISS'}")
    if not conclusive:
        print(f"statistically inconclusive: fewer than {MIN_CONCLUSIVE_SAMPLES} samples")
    return EXIT_OK


def cmd_identity(args) -> int:
    schemes = parse_schemes(args.schemes)
    if args.seeds < 1:
        raise UsageError("--seeds must be at least 1")
    seeds = list(range(args.seed_base, args.seed_base + args.seeds))
    rows = []
    for scheme in schemes:
        for n in parse_range(args.qubits_range):
            L = depth_for(n, args.depth_rule)
            rep = identity_proximity(scheme, n, L, seeds, _input_angles(args.input, n), args.entangler)
            rows += [{"scheme": scheme, "n": n, "L": L, "seed": s, "mu": m} for s, m in zip(seeds, rep.mu)]
    out = _out(args, "identity")
    io.write_csv(out / "identity.csv", ["scheme", "n", "L", "seed", "mu"], rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="plateaunet", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="flat JSON file of defaults; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, *, eta=True):
        sp.add_argument("--out", default=None, help=f"output directory (default ${io.OUT_ENV}/<command>)")
        sp.add_argument("--entangler", default="linear-cnot-ladder")
        if eta:
            sp.add_argument("--eta", type=float, default=0.1)
            sp.add_argument("--max-epochs", type=int, default=10000)
            sp.add_argument("--input", choices=["pi4", "zero"], default="pi4")

    t = sub.add_parser("train", help="one training run")
    t.add_argument("--scheme", choices=SCHEMES)
    t.add_argument("--qubits", type=int, required=True)
    t.add_argument("--depth", type=int, required=True)
    t.add_argument("--target", type=float, default=0.001)
    t.add_argument("--seed", type=int, default=0)
    common(t)
    t.set_defaults(func=cmd_train)

    s = sub.add_parser("sweep", help="repeated training over schemes and qubit counts")
    s.add_argument("--schemes", required=True)
    s.add_argument("--qubits-range", required=True)
    s.add_argument("--depth-rule", default="equal")
    s.add_argument("--target", type=float, default=0.001)
    s.add_argument("--reps", type=int, default=10)
    s.add_argument("--seed-base", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--trajectories", action="store_true", help="also write every cost trajectory")
    common(s)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("variance", help="gradient-variance scan of the ansatz")
    v.add_argument("--qubits-range", required=True)
    v.add_argument("--depth-rule", default="equal")
    v.add_argument("--samples", type=int, default=500)
    v.add_argument("--param-index", type=int, default=0)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_variance)

    lm = sub.add_parser("lemmas", help="Monte-Carlo checks of the Haar moment identities")
    lm.add_argument("--dim", type=int, required=True)
    lm.add_argument("--samples", type=int, default=100000)
    lm.add_argument("--seed", type=int, default=0)
    lm.add_argument("--out", default=None)
    lm.set_defaults(func=cmd_lemmas)

    i = sub.add_parser("identity", help="identity-proximity metric of initial circuits")
    i.add_argument("--schemes", required=True)
    i.add_argument("--qubits-range", required=True)
    i.add_argument("--depth-rule", default="equal")
    i.add_argument("--seeds", type=int, default=10)
    i.add_argument("--seed-base", type=int, default=0)
    i.add_argument("--input", choices=["pi4", "asym"], default="pi4")
    common(i, eta=False)
    i.set_defaults(func=cmd_identity)
    return p


def _install_config(parser: argparse.ArgumentParser, path: str) -> None:
    """Config-file values become subcommand defaults (and satisfy required flags)."""
    values = io.load_config(path)
    if isinstance(values.get("schemes"), list):
        values["schemes"] = ",".join(values["schemes"])
    for sub in parser._subparsers._group_actions[0].choices.values():
        dests = {a.dest for a in sub._actions}
        sub.set_defaults(**{k: v for k, v in values.items() if k in dests})
        for a in sub._actions:
            if a.dest in values:
                a.required = False


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            _install_config(parser, known.config)
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        return args.func(args)
    except (UsageError, ConfigurationError, OSError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
