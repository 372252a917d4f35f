"""Command-line front end writing CSV tables.

Exit status is 0 on success, 2 for an invalid configuration and 1 for any
other failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
from typing import Iterable, Sequence

from cardguess.analytics import (
    UnsupportedDeckError,
    approx_best,
    approx_best_beta_form,
    approx_best_leading,
    approx_worst,
)
from cardguess.birthday import lambda_of, survival_approx, t_for_lambda
from cardguess.deck import DeckSpec
from cardguess.montecarlo import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    estimate_joint_survival,
    estimate_survival,
    run_score_trials,
)
from cardguess import oracle

TABLE1_M = (3, 4)
TABLE1_N = (10_000, 50_000, 100_000)


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return f"{x:.10g}"
    return str(x)


def write_csv(rows: Iterable[Sequence], header: Sequence[str], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
        out.flush()


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def spec_from(args) -> DeckSpec:
    if args.mults is not None:
        if args.m is not None or args.n is not None:
            raise ConfigError("give either --mults or --m/--n, not both")
        return DeckSpec(tuple(args.mults))
    if args.m is None or args.n is None:
        raise ConfigError("give --m and --n, or --mults")
    if args.m < 1 or args.n < 1:
        raise ConfigError("--m and --n must be positive")
    return DeckSpec.even(args.m, args.n)


def relative_error(mean: float, approx: float | None) -> float | None:
    if approx is None or mean == 0:
        return None
    return (mean - approx) / mean


def approx_value(spec: DeckSpec, mode: str, all_terms: bool = False) -> float | None:
    if mode == "best":
        return approx_best(spec).value
    if not spec.is_even:
        return None
    return approx_worst(spec, all_terms).value


# -- commands ---------------------------------------------------------------


def cmd_approx(args, out) -> None:
    spec = spec_from(args)
    if args.mode == "best":
        rep = approx_best(spec)
    else:
        rep = approx_worst(spec, args.all_terms)
    terms = ";".join(f"{j}:{v:.10g}" for j, v in rep.terms)
    write_csv([(args.mode, spec.label(), spec.n, spec.m_star, rep.value, terms)],
              ["mode", "deck", "n", "m_star", "approx", "terms"], out)


def cmd_simulate(args, out) -> None:
    spec = spec_from(args)
    s = run_score_trials(spec, args.mode, args.trials, args.seed, args.threads)
    approx = approx_value(spec, args.mode, args.all_terms)
    m = spec.m_star if spec.is_even else spec.label()
    write_csv(
        [(spec.n, m, args.mode, s.trials, s.seed, s.mean, s.stderr, approx, relative_error(s.mean, approx))],
        ["n", "m", "mode", "trials", "seed", "mean", "stderr", "approx", "relative_error"],
        out,
    )


def cmd_table1(args, out) -> None:
    def rows():
        for m in TABLE1_M:
            for n in args.n_values or TABLE1_N:
                spec = DeckSpec.even(m, n)
                approx = approx_worst(spec).value
                s = run_score_trials(spec, "worst", args.trials, args.seed, args.threads)
                rel = relative_error(s.mean, approx)
                yield m, n, approx, s.mean, s.stderr, s.trials, rel, None if rel is None else 100 * rel

    header = ["m", "n", "approximation", "empirical_mean", "stderr", "trials", "relative_error",
              "relative_error_pct"]
    write_csv(rows(), header, out)


def _default_grid(spec: DeckSpec, j: int) -> list[int]:
    hi = t_for_lambda(spec, j, 4.0)
    return sorted({min(spec.N, int(round(hi * k / 20))) for k in range(21)})


def cmd_birthday(args, out) -> None:
    spec = spec_from(args)
    if not 1 <= args.j <= spec.m_star - 1:
        raise ConfigError(f"--j must lie in [1, {spec.m_star - 1}] for this deck")
    if args.times:
        grid = sorted(set(args.times))
    elif args.lambdas:
        grid = sorted({int(round(t_for_lambda(spec, args.j, lam))) for lam in args.lambdas})
    else:
        grid = _default_grid(spec, args.j)
    if grid and (grid[0] < 0 or grid[-1] > spec.N):
        raise ConfigError(f"times must lie in [0, {spec.N}]")
    curve = estimate_survival(spec, args.j, grid, args.trials, args.seed, args.orientation, args.threads)
    exact = oracle.exact_survival_curve(spec, args.j, grid) if args.exact else None
    rows = []
    for k, (t, p, se) in enumerate(zip(curve.times, curve.survival, curve.stderr())):
        approx, scale = survival_approx(spec, args.j, t)
        row = [t, lambda_of(spec, args.j, t), p, se, approx, abs(p - approx), scale]
        if exact is not None:
            row.append(exact.survival[k])
        rows.append(row)
    header = ["t", "lambda", "empirical_survival", "stderr", "exp_minus_lambda", "abs_diff", "t_over_n"]
    if exact is not None:
        header.append("exact_survival")
    write_csv(rows, header, out)


def cmd_joint(args, out) -> None:
    spec = spec_from(args)
    if args.times:
        times = args.times
    elif args.lambdas:
        times = [int(round(t_for_lambda(spec, j, lam))) for j, lam in enumerate(args.lambdas, start=1)]
    else:
        raise ConfigError("give --times or --lambdas")
    res = estimate_joint_survival(spec, times, args.trials, args.seed, args.threads)
    write_csv(
        [(spec.label(), ";".join(map(str, times)), res.trials, args.seed, res.joint, res.stderr,
          res.product_of_exponentials, abs(res.joint - res.product_of_exponentials))],
        ["deck", "times", "trials", "seed", "joint_survival", "stderr", "product_exp_minus_lambda", "abs_diff"],
        out,
    )


def cmd_oracle(args, out) -> None:
    spec = spec_from(args)
    what = args.what
    if what == "score":
        rows = []
        for mode in ("best", "worst"):
            v = oracle.exact_score_dp(spec, mode)
            rows.append((mode, float(v), str(v)))
        write_csv(rows, ["mode", "expected_score", "fraction"], out)
    elif what == "survival":
        j = args.j
        grid = args.times or list(range(spec.N + 1))
        curve = oracle.exact_survival_curve(spec, j, grid)
        rows = []
        for t, p in zip(curve.times, curve.survival):
            approx = survival_approx(spec, j, t)[0] if j >= 1 else None
            rows.append((t, p, approx))
        write_csv(rows, ["t", "exact_survival", "exp_minus_lambda"], out)
    elif what == "wpmf":
        pmf = oracle.exact_W_pmf(spec, args.j, args.t)
        lam = lambda_of(spec, args.j, args.t)
        pois = oracle.poisson_pmf(lam, max(pmf.support) + 1).as_dict()
        write_csv([(w, float(p), pois.get(w, 0.0)) for w, p in zip(pmf.support, pmf.probs)],
                  ["w", "probability", "poisson_probability"], out)
    elif what == "tv":
        pmf = oracle.exact_W_pmf(spec, args.j, args.t)
        lam = lambda_of(spec, args.j, args.t)
        tv = oracle.tv_distance(pmf, oracle.poisson_pmf(lam, max(60, 4 * (max(pmf.support) + 1))))
        write_csv([(spec.label(), args.j, args.t, lam, float(tv), args.t / spec.n)],
                  ["deck", "j", "t", "lambda", "tv_distance", "t_over_n"], out)
    elif what == "coupling-check":
        size = args.size
        if size > spec.m_star:
            raise ConfigError(f"no type has {size} cards")
        rows = []
        for s in itertools.combinations(range(1, spec.N + 1), size):
            coupled, conditional = oracle.exact_coupling_law(spec, s)
            rows.append((";".join(map(str, s)), float(oracle.law_tv(coupled, conditional))))
        write_csv(rows, ["positions", "tv_distance"], out)


# -- figures ------------------------------------------------------------------


def _figure_configs(fig: int, m_values, n_values):
    if fig in (1, 2):
        ms = m_values or ((2, 3, 4, 5, 6) if fig == 1 else (4, 5, 6))
        ns = n_values or range(2, 101)
        return [DeckSpec.even(m, n) for m in ms for n in ns]
    if fig == 3:
        ms = m_values or (6, 8, 10, 12)
        ns = n_values or range(2, 101, 2)
        pairs = [(a, b) for a in ms for b in ms if a < b]
        return [DeckSpec((a,) * (n // 2) + (b,) * (n // 2)) for a, b in pairs for n in ns if n % 2 == 0]
    if fig in (4, 5):
        ms = m_values or ((2, 3, 4, 5, 6) if fig == 4 else (4, 5, 6))
        ns = n_values or range(10, 1001, 10)
        return [DeckSpec.even(m, n) for m in ms for n in ns]
    raise ConfigError("--id must be one of 1..5")


def cmd_figure(args, out) -> None:
    fig = args.id
    configs = _figure_configs(fig, args.m_values, args.n_values)
    mode = "best" if fig <= 3 else "worst"
    header = ["figure", "deck", "m", "n", "mode", "trials", "seed", "mean", "stderr", "approx", "relative_error"]
    if fig == 2:
        header += ["approx_beta_form", "approx_leading"]
    if fig == 5:
        header += ["approx_all_terms", "relative_error_all_terms"]

    def rows():
        for spec in configs:
            s = run_score_trials(spec, mode, args.trials, args.seed, args.threads)
            approx = approx_value(spec, mode)
            row = [fig, spec.label(), spec.m_star, spec.n, mode, s.trials, s.seed, s.mean, s.stderr, approx,
                   relative_error(s.mean, approx)]
            if fig == 2:
                row += [approx_best_beta_form(spec), approx_best_leading(spec)]
            if fig == 5:
                full = approx_worst(spec, all_terms=True).value
                row += [full, relative_error(s.mean, full)]
            yield row

    write_csv(rows(), header, out)


# -- parser -------------------------------------------------------------------


def _deck_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="number of card types")
    p.add_argument("--m", type=int, help="cards per type (even deck)")
    p.add_argument("--mults", type=int_list, help="comma-separated multiplicities")


def _sim_args(p: argparse.ArgumentParser, trials: int = DEFAULT_TRIALS) -> None:
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=1, help="worker processes, 0 = one per CPU")


def _out_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cardguess", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="closed-form approximation of the expected score")
    p.add_argument("--mode", choices=("best", "worst"), default="best")
    p.add_argument("--all-terms", action="store_true", help="worst: sum from j = 1")
    _deck_args(p)
    _out_arg(p)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("simulate", help="Monte Carlo mean score next to the approximation")
    p.add_argument("--mode", choices=("best", "worst"), default="best")
    p.add_argument("--all-terms", action="store_true")
    _deck_args(p)
    _sim_args(p)
    _out_arg(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table1", help="worst-strategy approximation against simulation, m = 3, 4")
    p.add_argument("--n-values", type=int_list, help="override the n column")
    _sim_args(p)
    _out_arg(p)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("birthday", help="empirical P(T_j >= t) against exp(-lambda)")
    _deck_args(p)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--times", type=int_list)
    p.add_argument("--lambdas", type=float_list, help="grid given by lambda values, t rounded")
    p.add_argument("--orientation", choices=("bottom-up", "top-down"), default="bottom-up")
    p.add_argument("--exact", action="store_true", help="add the exact survival column")
    _sim_args(p)
    _out_arg(p)
    p.set_defaults(func=cmd_birthday)

    p = sub.add_parser("joint", help="joint survival of T_1..T_k against a product of exponentials")
    _deck_args(p)
    p.add_argument("--times", type=int_list)
    p.add_argument("--lambdas", type=float_list)
    _sim_args(p)
    _out_arg(p)
    p.set_defaults(func=cmd_joint)

    p = sub.add_parser("oracle", help="exact small-deck computations")
    p.add_argument("what", choices=("score", "survival", "wpmf", "tv", "coupling-check"))
    _deck_args(p)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--times", type=int_list)
    p.add_argument("--size", type=int, default=2, help="coupling-check: number of positions")
    _out_arg(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("figure", help="data behind one of the score figures")
    p.add_argument("--id", type=int, required=True, choices=(1, 2, 3, 4, 5))
    p.add_argument("--m-values", type=int_list)
    p.add_argument("--n-values", type=int_list)
    _sim_args(p)
    _out_arg(p)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be at least 1")
    try:
        if args.out:
            with open(args.out, "w", newline="") as fh:
                args.func(args, fh)
        else:
            args.func(args, sys.stdout)
    except (ConfigError, UnsupportedDeckError, oracle.CapacityError) as exc:
        print(f"cardguess: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"cardguess: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"cardguess: internal error: {exc!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
