"""Command-line interface.

Subcommands: exact, asymptotic, compare, simulate, coeffs, identities,
returns.  Exit codes: 0 success, 1 validation error, 2 resource limit,
3 failed internal cross-check.  Diagnostics go to stderr; data goes to
--out or stdout and is byte-identical across runs for identical inputs.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import exact_engine, harness, io_text
from .asymptotics import asymptotic_prediction
from .errors import CrossCheckError, NoConvergence, ResourceLimit, ValidationError
from .spectral import edgeworth_coeffs
from .special_fn import identity_suite
from .specfile import load_walk_spec


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_n_list(s: str):
    try:
        return [int(tok) for tok in s.replace(",", " ").split()]
    except ValueError:
        raise ValidationError(f"bad n list {s!r}") from None


def _add_common(sub, spec_required=True):
    sub.add_argument("--spec", required=spec_required, help="walk config file")
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--format", choices=("csv", "json", "tsv"), default="csv")
    sub.add_argument("--mem-limit-mb", type=int, default=2048,
                     help="memory cap for exact engines (MiB)")
    sub.add_argument("--order", type=int, default=None, help="expansion order L")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lltwalk",
        description="Exact and asymptotic laws of lattice walks with a perturbed exit law at the origin.",
    )
    sp = ap.add_subparsers(dest="cmd", required=True)

    p_exact = sp.add_parser("exact", help="compute and export an exact n-step law")
    _add_common(p_exact)
    p_exact.add_argument("--n", type=int, required=True)
    p_exact.add_argument("--route", choices=exact_engine.ROUTES + ("all",), default="fourier")
    p_exact.add_argument("--law", choices=("perturbed", "unperturbed"), default="perturbed")
    p_exact.add_argument("--check-tol", type=float, default=1e-12,
                         help="max pairwise route deviation allowed with --route all")

    p_asym = sp.add_parser("asymptotic", help="export asymptotic predictions over the window")
    _add_common(p_asym)
    p_asym.add_argument("--n", type=int, required=True)
    p_asym.add_argument("--window", type=float, default=None,
                        help="euclidean radius (default 4*sqrt(lambda_max(B)*n))")

    p_cmp = sp.add_parser("compare", help="exact vs asymptotic over several n, with decay slopes")
    _add_common(p_cmp)
    p_cmp.add_argument("--n-list", required=True, help="comma separated, ascending")
    p_cmp.add_argument("--route", choices=exact_engine.ROUTES, default="fourier")
    p_cmp.add_argument("--window", type=float, default=None)
    p_cmp.add_argument("--no-crosscheck", action="store_true")

    p_sim = sp.add_parser("simulate", help="seeded Monte Carlo empirical law")
    _add_common(p_sim)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--trials", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)

    p_coef = sp.add_parser("coeffs", help="print the expansion coefficient table")
    _add_common(p_coef)

    p_id = sp.add_parser("identities", help="run the special-function identity suite")
    _add_common(p_id, spec_required=False)
    p_id.add_argument("--x", type=float, default=1.0)
    p_id.add_argument("--eps", type=float, default=0.01)
    p_id.add_argument("--tol", type=float, default=1e-3)

    p_ret = sp.add_parser("returns", help="first-return probabilities, perturbed vs unperturbed")
    _add_common(p_ret)
    p_ret.add_argument("--n-max", type=int, default=50)
    p_ret.add_argument("--check-tol", type=float, default=1e-12)

    return ap


def _cmd_exact(args) -> int:
    spec = load_walk_spec(args.spec, L=args.order or 4)
    mem = args.mem_limit_mb << 20
    if args.law == "unperturbed":
        pmf = exact_engine.convolve_power(spec.p, args.n, mem_limit=mem)
        dist = exact_engine.ExactDistribution(n=args.n, pmf=pmf, route="fourier")
        _emit(io_text.distribution_text(dist, args.format), args.out)
        return 0
    if args.route == "all":
        t0 = time.perf_counter()
        dists, worst = exact_engine.cross_check(
            spec, args.n, tol=args.check_tol, mem_limit=mem
        )
        dt = time.perf_counter() - t0
        print(
            f"routes {list(dists)}: max pairwise deviation {worst:.3e} "
            f"(tol {args.check_tol:.1e}, {dt:.2f}s)",
            file=sys.stderr,
        )
        _emit(io_text.distribution_text(dists["fourier"], args.format), args.out)
        return 0
    dist = exact_engine.perturbed_distribution(spec, args.n, route=args.route, mem_limit=mem)
    _emit(io_text.distribution_text(dist, args.format), args.out)
    return 0


def _cmd_asymptotic(args) -> int:
    spec = load_walk_spec(args.spec, L=args.order or 4)
    coeffs = edgeworth_coeffs(spec.p, args.order or spec.L) if spec.unperturbed else None
    rad = args.window if args.window is not None else harness.default_window(spec, args.n)
    lo = [-int(rad) for _ in range(spec.nu)]
    hi = [int(rad) for _ in range(spec.nu)]
    preds = []
    from itertools import product as iproduct

    for pt in iproduct(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        if sum(c * c for c in pt) > rad * rad:
            continue
        if spec.nu == 2 and not any(pt) and not spec.unperturbed:
            continue  # correction singular at the origin
        preds.append(asymptotic_prediction(spec, args.n, pt, coeffs=coeffs))
    _emit(io_text.predictions_text(preds, spec.nu, args.format), args.out)
    return 0


def _cmd_compare(args) -> int:
    spec = load_walk_spec(args.spec, L=args.order or 4)
    rep = harness.compare(
        spec,
        _parse_n_list(args.n_list),
        window=args.window,
        route=args.route,
        crosscheck=not args.no_crosscheck,
        order=args.order,
        mem_limit=args.mem_limit_mb << 20,
    )
    text = rep.to_json() if args.format == "json" else rep.to_csv()
    _emit(text, args.out)
    summary = rep.summary()
    print(f"slopes: {summary['slopes']}", file=sys.stderr)
    if rep.route_deviation:
        worst = max(rep.route_deviation.values())
        print(f"route cross-check worst deviation: {worst:.3e}", file=sys.stderr)
        if worst > 1e-12:
            raise CrossCheckError(f"route deviation {worst:.3e} exceeds 1e-12")
    return 0


def _cmd_simulate(args) -> int:
    spec = load_walk_spec(args.spec)
    emp = harness.simulate(spec, args.n, args.trials, args.seed)
    _emit(io_text.empirical_text(emp, args.format), args.out)
    return 0


def _cmd_coeffs(args) -> int:
    spec = load_walk_spec(args.spec, L=args.order or 4)
    coeffs = edgeworth_coeffs(spec.p, args.order or spec.L)
    _emit(io_text.coeffs_text(coeffs, args.format), args.out)
    return 0


def _cmd_identities(args) -> int:
    rep = identity_suite(x=args.x, eps=args.eps, tol=args.tol)
    _emit(rep.render(), args.out)
    if not rep.all_ok:
        raise CrossCheckError("identity suite has failing checks")
    return 0


def _cmd_returns(args) -> int:
    spec = load_walk_spec(args.spec)
    f, fp = exact_engine.first_return_probs(spec, args.n_max, mem_limit=args.mem_limit_mb << 20)
    _emit(io_text.returns_text(f, fp, args.format), args.out)
    worst = float(np.abs(f - fp).max())
    print(f"max |f_n - f'_n| = {worst:.3e}", file=sys.stderr)
    if worst > args.check_tol:
        raise CrossCheckError(f"first-return identity violated by {worst:.3e}")
    return 0


_COMMANDS = {
    "exact": _cmd_exact,
    "asymptotic": _cmd_asymptotic,
    "compare": _cmd_compare,
    "simulate": _cmd_simulate,
    "coeffs": _cmd_coeffs,
    "identities": _cmd_identities,
    "returns": _cmd_returns,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.cmd](args)
    except (ValidationError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except (CrossCheckError, NoConvergence) as exc:
        print(f"cross-check failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
