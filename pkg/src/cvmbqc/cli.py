"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from .correction import db_to_epsilon, db_to_r, r_to_db
from .programfile import ProgramParseError, load_program
from .scenarios import example1, example2, figure3_rows
from .temporal import MODES, ProgramError, run_program
from .verify import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 0
DEFAULT_TRIALS = 100_000


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _matrix_lines(name: str, m) -> list[str]:
    # round-off dust (e.g. cos(pi/2)) is shown as 0 in reports
    m = np.array(np.atleast_2d(m), dtype=float)
    m[np.abs(m) < 1e-14 * max(1.0, np.abs(m).max())] = 0.0
    return [f"{name}:"] + ["  [" + ", ".join(fmt(v) for v in row) + "]" for row in m]


def _eps_text(eps: float) -> str:
    return f"epsilon={fmt(eps)} ({fmt(-10 * np.log10(eps))} dB)"


def _verdict(name: str, residual: float, tol: float, ok: bool | None = None) -> str:
    ok = residual <= tol if ok is None else ok
    return f"check {name}: residual={residual:.3e} tol={tol:.3e} {'PASS' if ok else 'FAIL'}"


def _epsilon(args, default_db: float | None = None) -> float:
    if args.epsilon is not None:
        return args.epsilon
    if args.cluster_db is not None:
        return db_to_epsilon(args.cluster_db)
    if default_db is None:
        raise ValueError("one of --epsilon or --cluster-db is required")
    return db_to_epsilon(default_db)


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _nonneg(text: str) -> float:
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text}")
    return v


def _epsilon_arg(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"epsilon must be in (0, 1), got {text}")
    return v


def _add_squeezing(p: argparse.ArgumentParser, many: bool = False, required: bool = False) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    nargs = "+" if many else None
    g.add_argument("--epsilon", type=_epsilon_arg, nargs=nargs, help="cluster squeezing parameter in (0, 1)")
    g.add_argument("--cluster-db", type=_positive, nargs=nargs, help="cluster squeezing in dB")


def _add_mc(p: argparse.ArgumentParser, trials: int = DEFAULT_TRIALS) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=trials)


def cmd_example1(args) -> int:
    eps = _epsilon(args, default_db=10.0)
    rep = example1(args.s, eps, trials=args.trials, seed=args.seed)
    out = [f"example1 s={fmt(args.s)} {_eps_text(eps)} seed={args.seed} trials={args.trials}"]
    out += _matrix_lines("sigma_in", rep.sigma_in)
    out += _matrix_lines("sigma_t", rep.sigma_t)
    out += _matrix_lines("deviation", rep.deviation)
    out += _matrix_lines("sigma_actual", rep.actual_cov)
    out += _matrix_lines("U_ec", rep.u_ec)
    out.append(_verdict("closed_forms", rep.closed_form_residual, 1e-10))
    if rep.mc_cov is not None:
        out += _matrix_lines("monte_carlo_corrected_cov", rep.mc_cov)
        out.append(_verdict("monte_carlo_vs_target", rep.mc_residual, rep.mc_tolerance))
    out.append(f"result: {'PASS' if rep.passed else 'FAIL'}")
    print("\n".join(out))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_example2(args) -> int:
    eps = _epsilon(args, default_db=10.0)
    r = args.r if args.r is not None else db_to_r(args.input_db)
    rep = example2(r, eps, trials=args.trials, seed=args.seed)
    out = [f"example2 r={fmt(r)} ({fmt(r_to_db(r))} dB) {_eps_text(eps)} seed={args.seed} trials={args.trials}"]
    out.append(f"J: {fmt(rep.J)}")
    out.append(f"K: {fmt(rep.K)}")
    out.append(f"alpha: {fmt(rep.alpha)} ({fmt(rep.alpha_db)} dB)")
    out += _matrix_lines("sigma_t", rep.sigma_t)
    out += _matrix_lines("sigma_2", rep.actual_cov)
    out.append(_verdict("J^2-K^2=1", rep.identity_residual, 1e-10))
    out.append(_verdict("deviation_display", rep.deviation_residual, 1e-10))
    out.append(_verdict("recovery", rep.recovery_residual, 1e-9))
    out.append(_verdict("ec_unitary_is_two_mode_squeezer", rep.unitary_residual, 1e-9))
    if rep.mc_cov is not None:
        out += _matrix_lines("monte_carlo_corrected_cov", rep.mc_cov)
        out.append(_verdict("monte_carlo_vs_target", rep.mc_residual, rep.mc_tolerance))
    out.append(f"result: {'PASS' if rep.passed else 'FAIL'}")
    print("\n".join(out))
    return EXIT_OK if rep.passed else EXIT_FAIL


def figure3_csv(cluster_db: Sequence[float], r_max: float = 2.5, samples: int = 51, epsilons: Sequence[float] | None = None) -> str:
    """CSV text of correction squeezing (dB) against input squeezing (dB).

    Args:
        cluster_db: Cluster squeezing levels, one column each.
        r_max: Largest input squeezing parameter of the grid.
        samples: Number of grid points, including ``r = 0``.
        epsilons: Give the cluster levels as epsilon values instead.
    """
    if epsilons is not None:
        levels = [-10 * np.log10(e) for e in epsilons]
        names = [f"alpha_db_eps_{e:g}" for e in epsilons]
    else:
        levels = list(cluster_db)
        names = [f"alpha_db_{d:g}" for d in levels]
    rows = figure3_rows(levels, r_max, samples)
    lines = [",".join(["input_squeezing_db"] + names)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_figure3(args) -> int:
    text = figure3_csv(args.cluster_db or [4.0, 6.0, 10.0], args.r_max, args.samples, epsilons=args.epsilon)
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.seed, args.trials)
    lines = [f"verify seed={args.seed} trials={args.trials}"]
    for suite, r in results:
        extra = f" ({r.detail})" if r.detail else ""
        lines.append(
            f"{'PASS' if r.passed else 'FAIL'} [{suite}] {r.name}: residual={r.residual:.3e} tol={r.tolerance:.3e}{extra}"
        )
    failed = sum(not r.passed for _, r in results)
    lines.append(f"result: {len(results) - failed}/{len(results)} passed")
    print("\n".join(lines))
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_run(args) -> int:
    pf = load_program(args.program)
    mode = args.mode or pf.mode
    eps = pf.epsilon
    if args.epsilon is not None or args.cluster_db is not None:
        eps = _epsilon(args)
    seed = pf.seed if args.seed is None else args.seed
    trials = pf.trials if args.trials is None else args.trials
    res = run_program(pf.program, eps, mode, trials=trials, seed=seed, exact=args.exact)
    head = f"run {args.program} mode={mode} modes={pf.program.num_modes} steps={len(pf.program.steps)}"
    if mode != "ideal":
        head += f" {_eps_text(eps)}"
        head += " averaging=exact" if args.exact else f" seed={seed} trials={trials}"
    out = [head]
    out += _matrix_lines("mean", res.state.mean)
    out += _matrix_lines("cov", res.state.cov)
    if mode != "ideal":
        out += _matrix_lines("target_cov", res.target.cov)
        out.append(f"max_abs_cov_deviation: {fmt(np.abs(res.state.cov - res.target.cov).max())}")
        if not args.exact:
            out.append(f"statistical_scale_4_over_sqrt_n: {fmt(4 / np.sqrt(trials))}")
    led = res.ledger
    out.append("ledger:")
    out.append("  step,kind,modes,gadget_steps,measurements,updated_entries,touched_entries")
    for e in led.entries:
        modes = " ".join(str(m) for m in e.modes)
        out.append(f"  {e.step},{e.kind},{modes},{e.gadget_steps},{e.measurements},{e.updated_entries},{e.touched_entries}")
    out.append(f"  total_updated={led.total_updated} total_touched={led.total_touched}")
    out.append(f"  memory_proxy_(2M)^2={led.memory_proxy} real_entries={led.real_entries}")
    print("\n".join(out))
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(",".join(fmt(v) for v in row) for row in res.state.cov) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvmbqc", description="Finite-squeezing correction simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example1", help="single-mode squeezed input under a quarter turn")
    p.add_argument("--s", type=_positive, default=0.5, help="input variance parameter s")
    _add_squeezing(p)
    _add_mc(p)
    p.set_defaults(func=cmd_example1)

    p = sub.add_parser("example2", help="two-mode squeezed target and its squeezer correction")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--r", type=_nonneg, help="two-mode squeezing parameter r")
    g.add_argument("--input-db", type=_nonneg, help="input squeezing in dB")
    _add_squeezing(p)
    _add_mc(p)
    p.set_defaults(func=cmd_example2, r=None)

    p = sub.add_parser("figure3", help="CSV of correction squeezing versus input squeezing")
    _add_squeezing(p, many=True)
    p.add_argument("--r-max", type=_positive, default=2.5)
    p.add_argument("--samples", type=int, default=51)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_figure3)

    p = sub.add_parser("verify", help="run the invariant suite")
    _add_mc(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="execute a program file")
    p.add_argument("program")
    p.add_argument("--mode", choices=MODES)
    _add_squeezing(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--exact", action="store_true", help="average over outcomes in closed form")
    p.add_argument("--out", help="write the final covariance as CSV")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", None) is not None and args.trials < 0:
        parser.error("--trials must be nonnegative")
    if args.command == "example2" and args.r is None:
        args.r = None if args.input_db is not None else 1.0
    try:
        return args.func(args)
    except ProgramParseError as err:
        print(f"error: {args.program}: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ProgramError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
