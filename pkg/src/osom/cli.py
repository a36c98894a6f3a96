"""Command-line entry point and result files.

Example::

    python -m osom --model complex --policies ucb,oful,osom --out results/complex

Options may also come from a ``--config`` file of ``key=value`` lines using
the long flag names (``runs=20``); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .core import AlgoConfig, ContextKind, ModelKind, OsomError, PolicyKind, RadiusMode, RoundLog
from .harness import AggregateCurve, ExperimentResult, ExperimentSpec, cumulative_regret, run_experiment

log = logging.getLogger(__name__)

CURVES_HEADER = ["policy", "t", "mean_cum_regret", "stderr"]
RUNS_HEADER = ["policy", "seed", "t", "arm", "reward", "mode", "inst_regret", "cum_regret"]


class UsageError(OsomError):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class UnknownFlag(UsageError):
    def __init__(self, message):
        super().__init__("UnknownFlag", message)


class InvalidValue(UsageError):
    def __init__(self, message):
        super().__init__("InvalidValue", message)


class MissingRequired(UsageError):
    def __init__(self, message):
        super().__init__("MissingRequired", message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if "unrecognized arguments" in message:
            raise UnknownFlag(message)
        if "expected one argument" in message or "required" in message:
            raise MissingRequired(message)
        raise InvalidValue(message)


def _policy_list(text: str) -> Tuple[PolicyKind, ...]:
    names = [s.strip().lower() for s in text.split(",") if s.strip()]
    if not names:
        raise argparse.ArgumentTypeError("needs at least one policy")
    try:
        return tuple(PolicyKind(name) for name in names)
    except ValueError:
        raise argparse.ArgumentTypeError(f"policies must be among ucb,oful,osom: {text!r}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _unit_interval(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1): {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="osom", description="Regret simulations for UCB, OFUL and OSOM.")
    parser.add_argument("--config", type=Path, help="file of key=value lines; flags override it")
    parser.add_argument("--model", choices=["simple", "complex"], default="simple")
    parser.add_argument("--K", type=_positive_int, default=5, help="number of arms")
    parser.add_argument("--d", type=_positive_int, default=50, help="context dimension")
    parser.add_argument("--n", type=_positive_int, default=300, help="horizon")
    parser.add_argument("--runs", type=_positive_int, default=50)
    parser.add_argument("--seed", type=int, default=0, help="base seed; run r uses seed + r")
    parser.add_argument("--sigma", type=_positive_float, default=1.0, help="noise standard deviation")
    parser.add_argument("--delta", type=_unit_interval, default=0.05, help="global failure probability")
    parser.add_argument("--mode", choices=["theoretical", "empirical"], default="empirical")
    parser.add_argument("--policies", type=_policy_list, default=(PolicyKind.UCB, PolicyKind.OFUL, PolicyKind.OSOM))
    parser.add_argument("--coupling", choices=["coupled", "independent"], default="coupled")
    parser.add_argument("--contexts", choices=["sphere", "hypercube"], default="sphere")
    parser.add_argument("--rho-min", type=_positive_float, default=None, help="defaults to 1/d")
    parser.add_argument("--rho-max", type=_positive_float, default=None, help="defaults to 1/d")
    parser.add_argument("--workers", type=_positive_int, default=1)
    parser.add_argument("--out", default="osom", help="output path prefix")
    return parser


def _config_tokens(path: Path) -> List[str]:
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InvalidValue(f"--config: cannot read {path}: {exc}")
    tokens = []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidValue(f"--config {path}:{lineno}: expected key=value, got {line!r}")
        tokens += [f"--{key.strip().replace('_', '-')}", value.strip()]
    return tokens


def parse_args(argv: Sequence[str] | None = None) -> Tuple[ExperimentSpec, argparse.Namespace]:
    """Build a validated experiment from command-line flags."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is not None:
        file_args = parser.parse_args(_config_tokens(known.config))
        parser.set_defaults(**{k: v for k, v in vars(file_args).items() if k != "config"})
    args = parser.parse_args(argv)

    try:
        cfg = AlgoConfig(args.delta, args.n, RadiusMode(args.mode))
        spec = ExperimentSpec(
            model_kind=ModelKind(args.model),
            K=args.K,
            d=args.d,
            sigma=args.sigma,
            policies=args.policies,
            runs=args.runs,
            base_seed=args.seed,
            algo_config=cfg,
            context_kind=ContextKind(args.contexts),
            rho_min=args.rho_min,
            rho_max=args.rho_max,
            coupled=args.coupling == "coupled",
        )
    except OsomError as exc:
        raise InvalidValue(str(exc))
    return spec, args


def _policy_order(kinds) -> List[PolicyKind]:
    return sorted(kinds, key=lambda k: k.value)


def write_results(
    curves: Sequence[AggregateCurve],
    runs: Dict[PolicyKind, List[Tuple[int, List[RoundLog]]]],
    out_prefix: str | Path,
) -> List[Path]:
    """Write ``<prefix>_curves.csv``, ``<prefix>_runs.csv`` and ``<prefix>_summary.txt``.

    Floats are written with ``repr`` so they parse back exactly. Rows are
    ordered by policy name, then seed, then round.
    """
    prefix = str(out_prefix)
    paths = [Path(prefix + "_curves.csv"), Path(prefix + "_runs.csv"), Path(prefix + "_summary.txt")]
    paths[0].parent.mkdir(parents=True, exist_ok=True)
    by_policy = {c.policy: c for c in curves}

    with paths[0].open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVES_HEADER)
        for kind in _policy_order(by_policy):
            c = by_policy[kind]
            for t, m, s in zip(c.t_grid, c.mean_regret, c.stderr):
                writer.writerow([kind.value, int(t), repr(float(m)), repr(float(s))])

    with paths[1].open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RUNS_HEADER)
        for kind in _policy_order(runs):
            for seed, logs in sorted(runs[kind], key=lambda item: item[0]):
                cum = cumulative_regret(logs)
                for entry, total in zip(logs, cum):
                    writer.writerow(
                        [
                            kind.value,
                            seed,
                            entry.round,
                            entry.arm,
                            repr(float(entry.reward)),
                            entry.mode.value,
                            repr(float(entry.inst_regret)),
                            repr(float(total)),
                        ]
                    )

    paths[2].write_text(summary_text(curves))
    return paths


def summary_text(curves: Sequence[AggregateCurve]) -> str:
    lines = ["final cumulative regret", f"{'policy':<8}{'runs':>6}{'mean':>14}{'stderr':>12}"]
    by_policy = {c.policy: c for c in curves}
    for kind in _policy_order(by_policy):
        c = by_policy[kind]
        lines.append(f"{kind.value:<8}{c.runs:>6}{c.final_mean:>14.6f}{c.final_stderr:>12.6f}")
    osom = by_policy.get(PolicyKind.OSOM)
    if osom is not None:
        lines += ["", "osom switches"]
        lines.append(f"runs switched: {len(osom.switch_rounds)} of {osom.runs}")
        if osom.switch_rounds:
            rounds = np.asarray(osom.switch_rounds)
            lines.append(f"switch round min/median/max: {rounds.min()}/{np.median(rounds):g}/{rounds.max()}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        spec, args = parse_args(argv)
    except UsageError as exc:
        print(f"osom: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    result: ExperimentResult = run_experiment(spec, workers=args.workers)
    log.info("ran %d runs x %d policies in %.1fs", spec.runs, len(spec.policies), time.perf_counter() - start)
    try:
        paths = write_results(result.curves, result.runs, args.out)
    except OSError as exc:
        print(f"osom: IoError: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(summary_text(result.curves))
    for path in paths:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
