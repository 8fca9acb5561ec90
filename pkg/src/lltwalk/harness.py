"""Monte Carlo simulator and the exact-vs-asymptotic comparison pipeline.

Randomness comes from numpy's Philox generator (counter based, keyed,
splittable): a fixed seed fixes the entire draw stream, and trials are
consumed in fixed chunks of 2^17, so outputs depend on (seed, n, trials)
only and never on how work might be partitioned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2 as chi2_dist

from . import exact_engine
from ._kernels import using_numba
from .asymptotics import (
    edgeworth_factor_many,
    gaussian_leading_many,
    perturbation_correction_many,
)
from .spectral import EdgeworthCoeffs, edgeworth_coeffs
from .walk_model import LatticePMF, WalkSpec

SIM_CHUNK = 1 << 17  # trials per chunk; fixed so results are partition independent

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class EmpiricalPMF:
    """Seeded empirical law of the walk at time n."""

    n: int
    trials: int
    seed: int
    offset: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        self.offset.flags.writeable = False
        self.counts.flags.writeable = False
        if int(self.counts.sum()) != self.trials:
            raise ValueError("counts must sum to trials")

    def points(self):
        for idx in np.argwhere(self.counts):
            pt = tuple(int(i + o) for i, o in zip(idx, self.offset))
            yield pt, int(self.counts[tuple(idx)])

    def to_pmf(self) -> LatticePMF:
        return LatticePMF(
            dim=self.counts.ndim,
            offset=self.offset.copy(),
            weights=self.counts / self.trials,
        )


def _law_tables(pmf: LatticePMF):
    pts = list(pmf.points())
    sup = np.array([pt for pt, _ in pts], dtype=np.int64)
    cdf = np.cumsum(np.array([w for _, w in pts]))
    cdf[-1] = 1.0  # guard the top edge against float-sum shortfall
    return sup, cdf


def simulate(spec: WalkSpec, n: int, trials: int, seed: int) -> EmpiricalPMF:
    """Sample ``trials`` independent trajectories of n steps from the origin.

    Identical (seed, n, trials) give bitwise-identical counts.  Steps taken
    while sitting at the origin use the exit law q, all others the step law
    p; one uniform draw is consumed per (trial, step) in chunk order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    nu = spec.nu
    rad = max(n, 1) * spec.radius
    shape = (2 * rad + 1,) * nu
    counts = np.zeros(shape, dtype=np.int64)
    p_sup, p_cdf = _law_tables(spec.p)
    q_sup, q_cdf = _law_tables(spec.q)

    rng = np.random.Generator(np.random.Philox(key=seed))
    done = 0
    while done < trials:
        csize = min(SIM_CHUNK, trials - done)
        pos = np.zeros((csize, nu), dtype=np.int64)
        for _ in range(n):
            u = rng.random(csize)
            at0 = ~pos.any(axis=1)
            idx_p = np.searchsorted(p_cdf, u, side="right")
            idx_q = np.searchsorted(q_cdf, u, side="right")
            pos += np.where(at0[:, None], q_sup[idx_q], p_sup[idx_p])
        flat = np.ravel_multi_index((pos + rad).T, shape)
        counts += np.bincount(flat, minlength=counts.size).reshape(shape)
        done += csize
    return EmpiricalPMF(
        n=n,
        trials=trials,
        seed=seed,
        offset=np.full(nu, -rad, dtype=np.int64),
        counts=counts,
    )


def chi_squared_check(
    emp: EmpiricalPMF,
    exact: exact_engine.ExactDistribution,
    quantile: float = 0.999,
    min_expected: float = 5.0,
):
    """Pearson statistic of the empirical law against the exact one.

    Cells with expected count below ``min_expected`` are pooled into one
    bin.  Returns dict(stat, dof, threshold, ok).
    """
    exp_w = exact.pmf
    cells = []
    pooled_exp = 0.0
    pooled_obs = 0
    obs_map = {pt: c for pt, c in emp.points()}
    seen = set()
    for pt, w in exp_w.points():
        e = w * emp.trials
        o = obs_map.get(pt, 0)
        seen.add(pt)
        if e >= min_expected:
            cells.append((o, e))
        else:
            pooled_exp += e
            pooled_obs += o
    for pt, o in obs_map.items():
        if pt not in seen:  # observed where exact mass is (numerically) zero
            pooled_obs += o
            pooled_exp += exp_w.value_at(pt) * emp.trials
    if pooled_exp > 0:
        cells.append((pooled_obs, pooled_exp))
    stat = math.fsum((o - e) ** 2 / e for o, e in cells)
    dof = max(1, len(cells) - 1)
    threshold = float(chi2_dist.ppf(quantile, dof))
    return {"stat": stat, "dof": dof, "threshold": threshold, "ok": stat < threshold}


# ---------------------------------------------------------------------------
# comparison pipeline
# ---------------------------------------------------------------------------

def default_window(spec: WalkSpec, n: int) -> float:
    """Euclidean radius 4 * sqrt(lambda_max(B) * n) of the comparison window."""
    lam = float(np.linalg.eigvalsh(spec.B).max())
    return 4.0 * math.sqrt(lam * n)


def _window_points(dist: exact_engine.ExactDistribution, radius: float) -> np.ndarray:
    box = dist.pmf.box
    axes = [np.arange(lo, hi + 1) for lo, hi in box]
    grids = np.meshgrid(*axes, indexing="ij")
    X = np.stack([g.ravel() for g in grids], axis=1)
    keep = (X.astype(float) ** 2).sum(axis=1) <= radius**2
    return X[keep]


@dataclass
class ConvergenceReport:
    """Exact-vs-prediction error table with fitted decay slopes.

    rows: one dict per (n, x) with exact value, per-flavor predictions,
    absolute errors, and scaled errors n^{nu/2} * abs_err.  slopes: least
    squares slope of log(max_x scaled_err) against log n per flavor
    (meaningful from 4 values of n up).
    """

    spec_summary: str
    nu: int
    n_list: list
    flavors: list
    rows: list = field(default_factory=list)
    max_scaled_err: dict = field(default_factory=dict)
    slopes: dict = field(default_factory=dict)
    route_deviation: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        cols = ["n"] + [f"x{i+1}" for i in range(self.nu)] + ["exact"]
        for f in self.flavors:
            cols += [f, f"{f}_abs_err", f"{f}_scaled_err"]
        lines = [",".join(cols)]
        for row in self.rows:
            vals = [str(row["n"])] + [str(c) for c in row["x"]]
            vals.append(f"{row['exact']:.17g}")
            for f in self.flavors:
                vals += [
                    f"{row[f]:.17g}",
                    f"{row[f + '_abs_err']:.17g}",
                    f"{row[f + '_scaled_err']:.17g}",
                ]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "spec": self.spec_summary,
            "nu": self.nu,
            "n_list": list(self.n_list),
            "flavors": list(self.flavors),
            "max_scaled_err": {f: {str(n): v for n, v in d.items()} for f, d in self.max_scaled_err.items()},
            "slopes": self.slopes,
            "route_deviation": {str(n): v for n, v in self.route_deviation.items()},
            "meta": self.meta,
        }

    def to_json(self) -> str:
        payload = self.summary()
        payload["rows"] = self.rows
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _fit_slope(ns, errs):
    ns = np.asarray(ns, dtype=float)
    errs = np.asarray(errs, dtype=float)
    good = errs > 0
    if good.sum() < 2:
        return None
    return float(np.polyfit(np.log(ns[good]), np.log(errs[good]), 1)[0])


def compare(
    spec: WalkSpec,
    n_list,
    window: float | None = None,
    route: str = "fourier",
    crosscheck: bool = True,
    crosscheck_max_n: int = 512,
    order: int | None = None,
    mem_limit: int = exact_engine.DEFAULT_MEM_LIMIT,
) -> ConvergenceReport:
    """Exact laws vs asymptotic predictions over a list of n values.

    Flavors compared: plain Gaussian, Gaussian plus perturbation correction
    (for perturbed specs), Hermite-refined expansion (for unperturbed
    specs, at expansion order ``order`` or spec.L).  The scaled error column
    is n^{nu/2} * abs_err, whose decay in n is the measurable content of
    the limit theorems.
    """
    n_list = [int(n) for n in n_list]
    if sorted(n_list) != n_list:
        raise ValueError("n_list must be ascending")

    L = order or spec.L
    coeffs: EdgeworthCoeffs | None = None
    flavors = ["gaussian"]
    if spec.unperturbed:
        coeffs = edgeworth_coeffs(spec.p, L)
        flavors.append("edgeworth")
    else:
        flavors.append("corrected")

    rep = ConvergenceReport(
        spec_summary=f"nu={spec.nu} d={spec.d.tolist()} unperturbed={spec.unperturbed}",
        nu=spec.nu,
        n_list=n_list,
        flavors=flavors,
        meta={
            "engine": "numba" if using_numba() else "numpy",
            "route": route,
            "order": L if spec.unperturbed else None,
            "window_rule": "4*sqrt(lambda_max(B)*n)" if window is None else window,
        },
    )

    for n in n_list:
        dist = exact_engine.perturbed_distribution(spec, n, route=route, mem_limit=mem_limit)
        if crosscheck and n <= crosscheck_max_n:
            other = "dp" if route != "dp" else "fourier"
            alt = exact_engine.perturbed_distribution(spec, n, route=other, mem_limit=mem_limit)
            rep.route_deviation[n] = exact_engine.max_abs_difference(dist.pmf, alt.pmf)
        rad = window if window is not None else default_window(spec, n)
        X = _window_points(dist, rad)
        exact_vals = np.array([dist.pmf.value_at(tuple(pt)) for pt in X])
        Xf = X.astype(float)

        preds = {"gaussian": gaussian_leading_many(spec.B, n, Xf)}
        if "corrected" in flavors:
            nonzero = Xf.any(axis=1) if spec.nu == 2 else np.ones(len(Xf), dtype=bool)
            corr = np.zeros(len(Xf))
            if nonzero.any():
                corr[nonzero] = perturbation_correction_many(spec, n, Xf[nonzero])
            preds["corrected"] = preds["gaussian"] + corr
        if "edgeworth" in flavors:
            preds["edgeworth"] = preds["gaussian"] * edgeworth_factor_many(coeffs, n, Xf)

        scale = float(n) ** (spec.nu / 2.0)
        for i, pt in enumerate(X):
            row = {"n": n, "x": [int(c) for c in pt], "exact": float(exact_vals[i])}
            for f in flavors:
                err = abs(float(exact_vals[i]) - float(preds[f][i]))
                row[f] = float(preds[f][i])
                row[f + "_abs_err"] = err
                row[f + "_scaled_err"] = scale * err
            rep.rows.append(row)
        for f in flavors:
            errs = np.abs(exact_vals - preds[f])
            rep.max_scaled_err.setdefault(f, {})[n] = scale * float(errs.max())

    for f in flavors:
        table = rep.max_scaled_err[f]
        rep.slopes[f] = _fit_slope(list(table), list(table.values()))
    return rep
