"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
Angles are radians; ``pi`` expressions such as ``pi/2`` are accepted.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

import numpy as np

from . import verification
from ._checks import DomainError
from .adversary import (
    AdversaryConfig,
    additional_leakage,
    attack_sweep,
    bias_threshold_exact,
    bias_threshold_paper,
    bias_threshold_partial,
    leakage_fraction,
    leakage_gain,
)
from .bounds import (
    DEFAULT_EPS_CHSH,
    DEFAULT_EPS_QPQ,
    chernoff_sample_size,
    chsh_deviation_delta,
    qpq_deviation_nu,
    sample_size_sweep,
)
from .chsh import optimal_angles, p_max, pmax_curve
from .protocol import ProtocolParams, monte_carlo_summary, repetitions_needed, run_protocol
from .report import csv_text, dumps, rows_as_records

_PI_EXPR = re.compile(r"^\s*(?:(\d*\.?\d+)\s*\*?\s*)?pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def angle(text: str) -> float:
    match = _PI_EXPR.match(text)
    if match:
        coef = float(match.group(1) or 1.0)
        div = float(match.group(2) or 1.0)
        return coef * math.pi / div
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def sweep_range(text: str) -> tuple[float, float, int]:
    """Parse ``lo:hi:steps``."""
    try:
        lo, hi, steps = text.split(":")
        return float(lo), float(hi), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:steps, got {text!r}") from None


class Emitter:
    def __init__(self, args):
        self.fmt = args.output
        self.path = args.output_path

    def _write(self, text: str):
        if self.path:
            with open(self.path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    def report(self, payload: dict):
        self._write(dumps(payload) + "\n")

    def table(self, header, rows):
        if self.fmt == "json":
            self._write(dumps(rows_as_records(header, rows)) + "\n")
        else:
            self._write(csv_text(header, rows))


def cmd_angles(args, out: Emitter):
    angles = optimal_angles(args.theta)
    out.report({"phi": angles.phi, "psi1": angles.psi1, "psi2": angles.psi2, "p_max": p_max(args.theta)})


def cmd_pmax_curve(args, out: Emitter):
    rows = pmax_curve(args.min, args.max, args.steps, full_range=args.full_range)
    out.table(("theta", "p_max"), rows)


def cmd_sample_size(args, out: Emitter):
    if args.sweep:
        lo, hi, steps = args.range
        fixed = p_max(args.theta) if args.sweep == "epsilon" else args.epsilon
        out.table(("axis_value", "m_opt"), sample_size_sweep(args.sweep, lo, hi, steps, args.gamma, fixed))
        return
    p = p_max(args.theta)
    m = chernoff_sample_size(args.epsilon, args.gamma, p)
    payload = {"theta": args.theta, "p_max": p, "epsilon": args.epsilon, "gamma": args.gamma, "m_opt": m, "n": 2 * m}
    if args.database_size is not None:
        if m == 0:
            raise DomainError("m_opt is 0; no key positions per repetition")
        payload["repetitions"] = repetitions_needed(args.database_size, ProtocolParams.create(args.theta, args.epsilon, args.gamma))
    out.report(payload)


def cmd_bounds(args, out: Emitter):
    out.report({
        "m": args.m,
        "n": args.n,
        "eps_chsh": args.eps_chsh,
        "eps_qpq": args.eps_qpq,
        "delta": chsh_deviation_delta(args.m, args.eps_chsh),
        "nu": qpq_deviation_nu(args.m, args.n, args.eps_qpq),
    })


def cmd_attack(args, out: Emitter):
    if args.sweep_eps_a:
        lo, hi, steps = args.sweep_eps_a
        grid = [lo] if steps == 1 else np.linspace(lo, hi, steps)
        rows = attack_sweep(args.theta, args.epsilon, grid, r=args.r, n=args.n if args.r else None)
        out.table(("epsilon_a", "success_prob", "accepted", "leakage_fraction"), rows)
        return
    paper = bias_threshold_paper(args.theta, args.epsilon)
    payload = {
        "theta": args.theta,
        "epsilon": args.epsilon,
        "p_max": p_max(args.theta),
        "psi1": optimal_angles(args.theta).psi1,
        "threshold_paper": paper,
        "threshold_exact": bias_threshold_exact(args.theta, args.epsilon),
        "additional_leakage_at_threshold": additional_leakage(args.theta, paper),
        "leakage_gain_at_threshold": leakage_gain(args.theta, paper),
        "leakage_fraction_at_threshold": leakage_fraction(args.theta, paper),
    }
    if args.r is not None:
        if args.n is None:
            raise DomainError("--r requires --n")
        payload["r"] = args.r
        payload["n"] = args.n
        payload["threshold_partial"] = bias_threshold_partial(args.theta, args.epsilon, args.r, args.n)
    out.report(payload)


def _adversary(args):
    if args.adv_eps_a is None:
        if args.adv_r is not None or args.adv_basis_bias is not None:
            raise DomainError("--adv-r and --adv-basis-bias require --adv-eps-a")
        return None
    return AdversaryConfig(args.adv_eps_a, args.adv_r, args.adv_basis_bias)


def cmd_run(args, out: Emitter):
    params = ProtocolParams.create(
        args.theta, args.epsilon, args.gamma, args.eps_chsh, args.eps_qpq, m=args.m, n=args.n
    )
    adversary = _adversary(args)
    if args.trials is None:
        transcript = run_protocol(params, adversary, args.seed)
        out.report(transcript.to_dict(include_rounds=args.include_rounds))
        return
    summary = monte_carlo_summary(params, adversary, args.trials, args.seed, args.threads)
    out.report({
        "params": params.to_dict(),
        "adversary": None if adversary is None else adversary.to_dict(),
        "seed": args.seed,
        **summary.to_dict(),
    })


def cmd_verify(args, out: Emitter):
    checks = verification.run_suite(args.suite, args.trials, args.seed, args.threads)
    passed = all(c.passed for c in checks)
    out.report({"suite": args.suite, "passed": passed, "checks": [c.to_dict() for c in checks]})
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    common.add_argument("--output", choices=("json", "csv"), default=None,
                        help="payload format; reports default to json, sweeps to csv")
    common.add_argument("--output-path", default=None, help="write payload here instead of stdout")
    common.add_argument("--threads", type=int, default=None,
                        help="cap on parallel trials; never changes results")

    parser = argparse.ArgumentParser(prog="diqpq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("angles", parents=[common], help="optimal CHSH angles and p_max")
    p.add_argument("--theta", type=angle, required=True)
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("pmax-curve", parents=[common], help="p_max as a function of theta (CSV)")
    p.add_argument("--min", type=angle, required=True)
    p.add_argument("--max", type=angle, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--full-range", action="store_true", help="allow theta up to pi")
    p.set_defaults(func=cmd_pmax_curve)

    p = sub.add_parser("sample-size", parents=[common], help="optimal test-set size m_opt")
    p.add_argument("--theta", type=angle, default=math.pi / 2)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--sweep", choices=("epsilon", "p_max"), default=None)
    p.add_argument("--range", type=sweep_range, default=None, help="lo:hi:steps for --sweep")
    p.add_argument("--database-size", type=int, default=None,
                   help="report repetitions needed to cover this many positions")
    p.set_defaults(func=cmd_sample_size)

    p = sub.add_parser("bounds", parents=[common], help="deviation radii delta and nu")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps-chsh", type=float, default=DEFAULT_EPS_CHSH)
    p.add_argument("--eps-qpq", type=float, default=DEFAULT_EPS_QPQ)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("attack", parents=[common], help="undetectable bias thresholds and leakage")
    p.add_argument("--theta", type=angle, default=math.pi / 2)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--r", type=int, default=None, help="number of biased pairs")
    p.add_argument("--n", type=int, default=None, help="pool size for --r")
    p.add_argument("--sweep-eps-a", type=sweep_range, default=None, help="lo:hi:steps")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("run", parents=[common], help="simulate the protocol")
    p.add_argument("--theta", type=angle, default=math.pi / 2)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--eps-chsh", type=float, default=DEFAULT_EPS_CHSH)
    p.add_argument("--eps-qpq", type=float, default=DEFAULT_EPS_QPQ)
    p.add_argument("--m", type=int, default=None, help="test-set size (default m_opt)")
    p.add_argument("--n", type=int, default=None, help="pool size (default 2m)")
    p.add_argument("--adv-eps-a", type=float, default=None)
    p.add_argument("--adv-r", type=int, default=None)
    p.add_argument("--adv-basis-bias", type=float, default=None)
    p.add_argument("--trials", type=int, default=None, help="Monte Carlo summary over this many runs")
    p.add_argument("--include-rounds", action="store_true", help="embed per-round records")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", parents=[common], help="run a self-check suite")
    p.add_argument("--suite", choices=verification.SUITES, required=True)
    p.add_argument("--trials", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    if getattr(args, "sweep", None) and args.range is None:
        parser.error("--sweep requires --range lo:hi:steps")
    try:
        status = args.func(args, Emitter(args))
    except DomainError as exc:
        print(f"diqpq: error: {exc}", file=sys.stderr)
        return 2
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
