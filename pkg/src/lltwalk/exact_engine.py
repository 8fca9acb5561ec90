"""Exact finite-n laws of the walk by three independent routes.

Routes:

* ``dp``      forward recursion on the transition rule (mass at the origin
              steps by the exit law, everything else by the step law);
* ``repr``    the closed-form decomposition of the perturbed law into the
              unperturbed convolution power plus an origin-return-weighted
              correction sum, evaluated with spatial convolutions;
* ``fourier`` the same decomposition assembled on a torus grid from powers
              of the characteristic function and inverted exactly.

All three must agree to ~1e-12 pointwise; ``cross_check`` enforces that.
Convolution powers use pointwise powers of characteristic-function samples
on a grid wide enough that the result is recovered exactly (the sampled
transform is a trigonometric polynomial below the grid bandwidth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import dp_step, origin_returns, pow_binary, weighted_power_sum
from .errors import CrossCheckError, ResourceLimit
from .spectral import TorusGrid, charfn_grid, invert_charfn, lambda_axis, odd_smooth_size
from .walk_model import LatticeFn, LatticePMF, WalkSpec

DEFAULT_MEM_LIMIT = 2 << 30  # bytes; generous but finite
NEGATIVE_CLAMP = 1e-14       # frequency-route roundoff threshold

ROUTES = ("dp", "repr", "fourier")


@dataclass(frozen=True)
class ExactDistribution:
    """Law of the walk after n steps, with the route that produced it."""

    n: int
    pmf: LatticePMF
    route: str

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")
        tot = self.pmf.total()
        if abs(tot - 1.0) > 1e-10:
            raise CrossCheckError(f"distribution mass {tot!r} is off by more than 1e-10")

    def value_at(self, x) -> float:
        return self.pmf.value_at(x)


# ---------------------------------------------------------------------------
# boxes and memory guards
# ---------------------------------------------------------------------------

def _hull_box(*fns: LatticeFn):
    dim = fns[0].dim
    lo = [min(f.box[ax][0] for f in fns) for ax in range(dim)]
    hi = [max(f.box[ax][1] for f in fns) for ax in range(dim)]
    return lo, hi


def _scaled_box(lo, hi, n: int):
    return [n * l for l in lo], [n * h for h in hi]


def _guard_cells(shape, itemsize: int, mem_limit: int):
    cells = math.prod(shape)
    if cells * itemsize > mem_limit:
        raise ResourceLimit(
            f"needs {cells * itemsize / 2**20:.0f} MiB for shape {tuple(shape)}, "
            f"cap is {mem_limit / 2**20:.0f} MiB"
        )


def _clamp_tiny_negatives(w: np.ndarray) -> np.ndarray:
    """Zero out roundoff negatives from the frequency route; reject real ones."""
    worst = w.min()
    if worst < -NEGATIVE_CLAMP:
        raise CrossCheckError(f"inverted mass has negative weight {worst!r}")
    return np.where(w < 0, 0.0, w)


def _kernel_arrays(f: LatticeFn):
    pts = list(f.points())
    offs = np.array([pt for pt, _ in pts], dtype=np.int64).reshape(len(pts), f.dim)
    ws = np.array([w for _, w in pts])
    return offs, ws


# ---------------------------------------------------------------------------
# convolution powers
# ---------------------------------------------------------------------------

def convolve_power(
    p: LatticePMF,
    n: int,
    method: str = "fft",
    mem_limit: int = DEFAULT_MEM_LIMIT,
) -> LatticePMF:
    """n-fold self-convolution of a pmf.

    ``method="fft"`` takes a pointwise n-th power of charfn samples on a
    sufficiently fine grid (exact; O(M^nu log n) via binary exponentiation);
    ``method="direct"`` iterates spatial convolution.  The two agree to
    machine precision and the test suite holds them to that.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return LatticePMF.from_points(p.dim, {(0,) * p.dim: 1})
    if n == 1:
        return p

    lo, hi = _hull_box(p)
    out_lo, out_hi = _scaled_box(lo, hi, n)
    shape = tuple(h - l + 1 for l, h in zip(out_lo, out_hi))

    if method == "direct":
        _guard_cells(shape, 8, mem_limit)
        offs, ws = _kernel_arrays(p)
        cur = np.zeros(shape)
        cur[tuple(-l for l in out_lo)] = 1.0
        out = np.empty_like(cur)
        for _ in range(n):
            cur, out = dp_step(cur, out, offs, ws), cur
        return LatticePMF(dim=p.dim, offset=np.array(out_lo, dtype=np.int64), weights=cur)

    if method != "fft":
        raise ValueError(f"unknown method {method!r}")
    m = odd_smooth_size(max(shape))
    _guard_cells((m,) * p.dim, 16 * 3, mem_limit)  # grid + powers + inversion
    grid = charfn_grid(p, m)
    powered = pow_binary(grid.values, n)
    spatial = invert_charfn(
        TorusGrid(dim=p.dim, m=m, values=powered), offset=out_lo, shape=shape
    )
    w = _clamp_tiny_negatives(spatial.weights.copy())
    return LatticePMF(dim=p.dim, offset=np.array(out_lo, dtype=np.int64), weights=w)


# ---------------------------------------------------------------------------
# perturbed chain, three routes
# ---------------------------------------------------------------------------

def perturbed_forward(
    spec: WalkSpec, n: int, mem_limit: int = DEFAULT_MEM_LIMIT
) -> ExactDistribution:
    """Forward recursion: origin mass exits by q, the rest steps by p."""
    lo, hi = _hull_box(spec.p, spec.q)
    out_lo, out_hi = _scaled_box(lo, hi, max(n, 1))
    shape = tuple(h - l + 1 for l, h in zip(out_lo, out_hi))
    _guard_cells(shape, 8, mem_limit)

    p_offs, p_ws = _kernel_arrays(spec.p)
    a_pts = list(spec.a.points())
    org = tuple(-l for l in out_lo)

    cur = np.zeros(shape)
    cur[org] = 1.0
    out = np.empty_like(cur)
    for _ in range(n):
        m0 = cur[org]
        cur, out = dp_step(cur, out, p_offs, p_ws), cur
        # transition from the origin differs from p by exactly a = q - p
        if m0 != 0.0:
            for pt, w in a_pts:
                idx = tuple(o + c for o, c in zip(org, pt))
                cur[idx] += m0 * w
    return ExactDistribution(
        n=n,
        pmf=LatticePMF(dim=spec.nu, offset=np.array(out_lo, dtype=np.int64), weights=cur),
        route="dp",
    )


def perturbed_via_representation(
    spec: WalkSpec, n: int, mem_limit: int = DEFAULT_MEM_LIMIT
) -> ExactDistribution:
    """Unperturbed power plus origin-return-weighted correction, in space.

    Two passes of spatial convolutions: the first collects the origin
    returns r_k of the unperturbed walk (and its n-th power), the second
    accumulates W = sum_k r_k * p^{*(n-1-k)} with compensated addition;
    the result is p^{*n} + a * W.  Requires the antisymmetry of a (which
    WalkSpec guarantees): paths revisiting the origin then contribute
    nothing to the correction.
    """
    lo, hi = _hull_box(spec.p, spec.q)
    out_lo, out_hi = _scaled_box(lo, hi, max(n, 1))
    shape = tuple(h - l + 1 for l, h in zip(out_lo, out_hi))
    _guard_cells(shape, 8 * 4, mem_limit)

    p_offs, p_ws = _kernel_arrays(spec.p)
    a_offs, a_ws = _kernel_arrays(spec.a) if spec.a.as_dict() else (None, None)
    org = tuple(-l for l in out_lo)

    # pass 1: r_k = p^{*k}(0) for k < n, and u = p^{*n}
    r = np.empty(n)
    cur = np.zeros(shape)
    cur[org] = 1.0
    out = np.empty_like(cur)
    for k in range(n):
        r[k] = cur[org]
        cur, out = dp_step(cur, out, p_offs, p_ws), cur
    pn = cur

    result = pn.copy()
    if a_offs is not None:
        # pass 2: W = sum_{j=0}^{n-1} r_{n-1-j} p^{*j}, Kahan compensated
        w_acc = np.zeros(shape)
        comp = np.zeros(shape)
        cur = np.zeros(shape)
        cur[org] = 1.0
        out = np.empty_like(cur)
        for j in range(n):
            term = r[n - 1 - j] * cur
            y = term - comp
            t = w_acc + y
            comp = (t - w_acc) - y
            w_acc = t
            if j != n - 1:
                cur, out = dp_step(cur, out, p_offs, p_ws), cur
        corr = np.empty_like(w_acc)
        dp_step(w_acc, corr, a_offs, a_ws)
        result += corr
        result = _clamp_tiny_negatives(result)

    return ExactDistribution(
        n=n,
        pmf=LatticePMF(dim=spec.nu, offset=np.array(out_lo, dtype=np.int64), weights=result),
        route="repr",
    )


def perturbed_fourier(
    spec: WalkSpec, n: int, mem_limit: int = DEFAULT_MEM_LIMIT
) -> ExactDistribution:
    """Frequency-domain assembly of the same decomposition, inverted exactly."""
    lo, hi = _hull_box(spec.p, spec.q)
    out_lo, out_hi = _scaled_box(lo, hi, max(n, 1))
    shape = tuple(h - l + 1 for l, h in zip(out_lo, out_hi))
    m = odd_smooth_size(max(shape))
    _guard_cells((m,) * spec.nu, 16 * 5, mem_limit)  # phat/ahat/powers/sum/result

    phat = charfn_grid(spec.p, m)
    z = phat.values
    pn_hat = pow_binary(z, n)
    if n > 0 and spec.a.as_dict():
        ahat = charfn_grid(spec.a, m).values
        r = origin_returns(z, n)
        drift = float(np.abs(r.imag).max())
        if drift > 1e-9:
            raise CrossCheckError(f"origin returns acquired imaginary mass {drift!r}")
        s = weighted_power_sum(z, r.real.astype(np.complex128))
        total = pn_hat + ahat * s
    else:
        total = pn_hat
    spatial = invert_charfn(TorusGrid(dim=spec.nu, m=m, values=total),
                            offset=out_lo, shape=shape)
    w = _clamp_tiny_negatives(spatial.weights.copy())
    return ExactDistribution(
        n=n,
        pmf=LatticePMF(dim=spec.nu, offset=np.array(out_lo, dtype=np.int64), weights=w),
        route="fourier",
    )


_ROUTE_FNS = {
    "dp": perturbed_forward,
    "repr": perturbed_via_representation,
    "fourier": perturbed_fourier,
}


def perturbed_distribution(
    spec: WalkSpec, n: int, route: str = "fourier", mem_limit: int = DEFAULT_MEM_LIMIT
) -> ExactDistribution:
    try:
        fn = _ROUTE_FNS[route]
    except KeyError:
        raise ValueError(f"unknown route {route!r}; use one of {ROUTES}") from None
    return fn(spec, n, mem_limit=mem_limit)


# ---------------------------------------------------------------------------
# comparisons and cross-checks
# ---------------------------------------------------------------------------

def max_abs_difference(f: LatticeFn, g: LatticeFn) -> float:
    """Max pointwise |f - g| over the union of the two boxes."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    lo = [min(f.box[ax][0], g.box[ax][0]) for ax in range(f.dim)]
    hi = [max(f.box[ax][1], g.box[ax][1]) for ax in range(f.dim)]
    shape = tuple(h - l + 1 for l, h in zip(lo, hi))
    diff = np.zeros(shape)
    sl_f = tuple(
        slice(f.box[ax][0] - lo[ax], f.box[ax][0] - lo[ax] + f.weights.shape[ax])
        for ax in range(f.dim)
    )
    sl_g = tuple(
        slice(g.box[ax][0] - lo[ax], g.box[ax][0] - lo[ax] + g.weights.shape[ax])
        for ax in range(g.dim)
    )
    diff[sl_f] += f.weights
    diff[sl_g] -= g.weights
    return float(np.abs(diff).max())


def cross_check(
    spec: WalkSpec,
    n: int,
    routes=ROUTES,
    tol: float = 1e-12,
    mem_limit: int = DEFAULT_MEM_LIMIT,
):
    """Run several routes and compare pointwise.

    Returns (dists, max_pairwise_deviation); raises CrossCheckError when the
    deviation exceeds tol.
    """
    dists = {r: perturbed_distribution(spec, n, route=r, mem_limit=mem_limit) for r in routes}
    worst = 0.0
    names = list(dists)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            worst = max(worst, max_abs_difference(dists[names[i]].pmf, dists[names[j]].pmf))
    if worst > tol:
        raise CrossCheckError(
            f"routes {names} disagree by {worst:.3e} (tolerance {tol:.1e}) at n={n}"
        )
    return dists, worst


def first_return_probs(
    spec: WalkSpec, n_max: int, mem_limit: int = DEFAULT_MEM_LIMIT
):
    """First-return laws f_n(0) (perturbed) and f'_n(0) (unperturbed), n <= n_max.

    Taboo recursion: mass reaching the origin is recorded and removed, so
    what survives never revisited it.  The two sequences agree exactly in
    theory (the antisymmetric part of the exit law integrates to zero
    against symmetric return paths); the suite checks 1e-12.
    """
    lo, hi = _hull_box(spec.p, spec.q)
    out_lo, out_hi = _scaled_box(lo, hi, max(n_max, 1))
    shape = tuple(h - l + 1 for l, h in zip(out_lo, out_hi))
    _guard_cells(shape, 8 * 2, mem_limit)

    p_offs, p_ws = _kernel_arrays(spec.p)
    org = tuple(-l for l in out_lo)

    def taboo(first_step: LatticeFn) -> np.ndarray:
        f = np.empty(n_max)
        cur = np.zeros(shape)
        for pt, w in first_step.points():
            cur[tuple(o + c for o, c in zip(org, pt))] = w
        f[0] = cur[org]
        cur[org] = 0.0
        out = np.empty_like(cur)
        for m in range(1, n_max):
            cur, out = dp_step(cur, out, p_offs, p_ws), cur
            f[m] = cur[org]
            cur[org] = 0.0
        return f

    return taboo(spec.q), taboo(spec.p)


def unperturbed_charfn_samples(spec: WalkSpec, n: int):
    """(lambda axis, phat samples) used by diagnostics; grid sized for p^{*n}."""
    lo, hi = _hull_box(spec.p)
    shape = tuple(n * (h - l) + 1 for l, h in zip(lo, hi))
    m = odd_smooth_size(max(shape))
    return lambda_axis(m), charfn_grid(spec.p, m)
