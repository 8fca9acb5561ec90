"""Characteristic functions on the torus, exact inversion, and expansion
coefficients built from moments.

Transforms are UNNORMALIZED throughout: charfn(f) samples
``sum_x f(x) exp(i lambda . x)`` on a uniform odd-sized grid of
``[-pi, pi)^nu``.  With an odd grid of M points per axis and spatial support
of width <= M, the samples determine the function exactly (a trigonometric
polynomial is recovered by uniform-grid quadrature with no error), so the
round trip invert(charfn(f)) == f holds to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import GridTooSmall, NotSymmetric, OrderTooHigh
from .walk_model import LatticeFn, LatticePMF, SignedLatticeFn, is_symmetric

# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def odd_smooth_size(m: int) -> int:
    """Smallest odd {3,5,7}-smooth integer >= m (fast FFT sizes, odd for a
    symmetric frequency grid containing lambda = 0)."""
    m = max(1, int(m))
    best = None
    p7 = 1
    while p7 < 8 * m:
        p57 = p7
        while p57 < 8 * m:
            p357 = p57
            while p357 < m:
                p357 *= 3
            if best is None or p357 < best:
                best = p357
            p57 *= 5
        p7 *= 7
    return best


def lambda_axis(m: int) -> np.ndarray:
    """Grid frequencies 2*pi*j/m for j = -(m-1)/2 .. (m-1)/2 (ascending)."""
    h = (m - 1) // 2
    return 2.0 * np.pi * (np.arange(m) - h) / m


@dataclass(frozen=True)
class TorusGrid:
    """Samples of a lattice transform on the uniform torus grid.

    ``values[j1, ..., jnu]`` is the sample at ``lambda_i = 2 pi (j_i - h)/m``
    with ``h = (m-1)//2``, so the center entry is the value at lambda = 0.
    """

    dim: int
    m: int
    values: np.ndarray

    def __post_init__(self):
        if self.m % 2 == 0:
            raise GridTooSmall("grid size must be odd")
        if self.values.shape != (self.m,) * self.dim:
            raise GridTooSmall(
                f"values shape {self.values.shape} != {(self.m,) * self.dim}"
            )
        self.values.flags.writeable = False

    @property
    def center(self) -> tuple[int, ...]:
        return ((self.m - 1) // 2,) * self.dim

    def value_at_zero(self) -> complex:
        return complex(self.values[self.center])

    def axis(self) -> np.ndarray:
        return lambda_axis(self.m)

    def export_text(self) -> str:
        """Columnar debug dump: lambda coordinates, real part, imag part."""
        ax = self.axis()
        lines = ["\t".join([f"lambda{i+1}" for i in range(self.dim)] + ["re", "im"])]
        for idx in product(range(self.m), repeat=self.dim):
            v = self.values[idx]
            coords = "\t".join(f"{ax[i]:.17g}" for i in idx)
            lines.append(f"{coords}\t{v.real:.17g}\t{v.imag:.17g}")
        return "\n".join(lines) + "\n"


def charfn_grid(f: LatticeFn, m: int) -> TorusGrid:
    """Sample sum_x f(x) e^{i lambda.x} on the m^nu grid (m odd).

    m must be at least the support box width on every axis, otherwise the
    spatial function cannot be recovered and GridTooSmall is raised.
    """
    if m % 2 == 0:
        raise GridTooSmall("m must be odd")
    widths = f.weights.shape
    if any(m < w for w in widths):
        raise GridTooSmall(f"m = {m} smaller than support width {max(widths)}")
    padded = np.zeros((m,) * f.dim)
    # place f(x) at index x mod m per axis
    idx = np.ix_(*[ (np.arange(w) + int(o)) % m for w, o in zip(widths, f.offset)])
    padded[idx] = f.weights
    vals = np.fft.ifftn(padded) * (m ** f.dim)  # sum_x f(x) e^{+2 pi i j.x / m}
    vals = np.fft.fftshift(vals)
    return TorusGrid(dim=f.dim, m=m, values=vals)


def invert_charfn(g: TorusGrid, offset=None, shape=None) -> SignedLatticeFn:
    """Exact inverse transform.

    By default the result is placed on the centered box ``[-h, h]^nu``; pass
    ``offset``/``shape`` when the true support box is known (it only relabels
    which representative of x mod m each cell means).
    """
    m = g.m
    h = (m - 1) // 2
    vals = np.fft.ifftshift(g.values)
    spatial = np.fft.fftn(vals).real / (m ** g.dim)  # (1/m^nu) sum_j v_j e^{-2 pi i j.x/m}
    if offset is None:
        spatial = np.fft.fftshift(spatial)
        off = np.full(g.dim, -h, dtype=np.int64)
        out = spatial
    else:
        off = np.asarray(offset, dtype=np.int64)
        shp = tuple(shape)
        idx = np.ix_(*[(np.arange(s) + int(o)) % m for s, o in zip(shp, off)])
        out = spatial[idx]
    return SignedLatticeFn(dim=g.dim, offset=off, weights=np.ascontiguousarray(out))


def subgaussian_fit(grid: TorusGrid) -> dict:
    """Fit A in (0,1), b > 0 with |phat(lambda)| <= A exp(-b |lambda|^2).

    Returns the fitted pair plus the largest off-zero modulus.  Existence of
    such an envelope (not its particular values) is the asserted property of
    any validated step law.
    """
    ax = grid.axis()
    lam2 = np.zeros(grid.values.shape)
    for axis_idx in range(grid.dim):
        shape = [1] * grid.dim
        shape[axis_idx] = grid.m
        lam2 = lam2 + (ax.reshape(shape)) ** 2
    mod = np.abs(grid.values)
    center = grid.center
    mask = np.ones(mod.shape, dtype=bool)
    mask[center] = False
    max_offzero = float(mod[mask].max())
    # curvature near 0 sets the admissible decay rate; take half of the
    # smallest observed -log|phat| / |lambda|^2 as b, then make A sharp
    with np.errstate(divide="ignore"):
        ratio = -np.log(np.maximum(mod[mask], 1e-300)) / lam2[mask]
    b = 0.5 * float(ratio.min())
    if b <= 0:
        return {"ok": False, "A": 1.0, "b": 0.0, "max_offzero_abs": max_offzero}
    A = float(np.max(mod[mask] * np.exp(b * lam2[mask])))
    return {
        "ok": 0 < A < 1 and b > 0 and max_offzero < 1,
        "A": A,
        "b": b,
        "max_offzero_abs": max_offzero,
    }


# ---------------------------------------------------------------------------
# truncated multivariate series (exact rational or float coefficients)
# ---------------------------------------------------------------------------

MultiIndex = tuple[int, ...]
Series = dict  # MultiIndex -> Fraction | float


def _series_mul(a: Series, b: Series, cap: int) -> Series:
    out: Series = {}
    for ka, va in a.items():
        da = sum(ka)
        for kb, vb in b.items():
            if da + sum(kb) > cap:
                continue
            key = tuple(x + y for x, y in zip(ka, kb))
            out[key] = out.get(key, 0) + va * vb
    return {k: v for k, v in out.items() if v != 0}


def _series_log1p(t: Series, cap: int) -> Series:
    """log(1 + t) for a series t with no constant term, truncated at cap."""
    if not t:
        return {}
    out: Series = {}
    mindeg = min(sum(key) for key in t)
    power = dict(t)
    k = 1
    while power and k * mindeg <= cap:
        sign = 1 if k % 2 == 1 else -1
        for key, v in power.items():
            out[key] = out.get(key, 0) + sign * v / k
        k += 1
        power = _series_mul(power, t, cap)
    return {key: v for key, v in out.items() if v != 0}


def _series_expm1(g: Series, cap: int) -> Series:
    """exp(g) - 1 for a series g with no constant term, truncated at cap."""
    out: Series = {}
    term = dict(g)
    k = 1
    while term and k <= cap:
        for key, v in term.items():
            out[key] = out.get(key, 0) + v
        k += 1
        term = {key: v / k for key, v in _series_mul(term, g, cap).items()}
    return {key: v for key, v in out.items() if v != 0}


@dataclass(frozen=True)
class EdgeworthCoeffs:
    """Correction coefficients m_alpha (3 <= |alpha| <= L) plus covariance.

    ``m`` holds the coefficients of lambda^alpha in the re-exponentiated
    non-Gaussian factor of the characteristic function; ``log_m`` holds the
    underlying log-series coefficients (they coincide for L <= 7, where no
    coefficient products fit under the truncation).  For a symmetric law all
    odd-|alpha| entries vanish and everything is real.
    """

    L: int
    m: dict
    B: np.ndarray
    log_m: dict = field(repr=False, default_factory=dict)
    exact: bool = False

    def __post_init__(self):
        self.B.flags.writeable = False

    def m_at(self, alpha: MultiIndex) -> float:
        return float(self.m.get(tuple(alpha), 0))


_MAX_ORDER = 12


def edgeworth_coeffs(p: LatticePMF, L: int = 4) -> EdgeworthCoeffs:
    """Expansion coefficients from the first L moments of a symmetric law.

    The characteristic function is Taylor-expanded about 0 through exact
    moment sums, composed with the log series, and the non-Gaussian part is
    re-exponentiated; coefficients of lambda^alpha are collected.  Rational
    weights give exact rational coefficients.
    """
    if L < 3:
        raise OrderTooHigh("expansion order must be at least 3")
    if L > _MAX_ORDER:
        raise OrderTooHigh(f"expansion order {L} beyond supported {_MAX_ORDER}")
    if not is_symmetric(p):
        raise NotSymmetric("expansion coefficients require a symmetric law")
    nu = p.dim
    exact = bool(p.exact)

    # Taylor series of charfn(lambda) - 1: sum over even 2 <= |alpha| <= L of
    # (-1)^(|alpha|/2) mu_alpha / alpha! * lambda^alpha  (odd moments vanish)
    t: Series = {}
    support = list(p.exact.items()) if exact else list(p.points())
    for alpha in _multi_indices(nu, 2, L):
        if sum(alpha) % 2 == 1:
            continue
        if exact:
            mu = sum((w * _ipow(pt, alpha) for pt, w in support), Fraction(0))
        else:
            mu = math.fsum(w * _ipow(pt, alpha) for pt, w in support)
        if mu == 0:
            continue
        fact = math.prod(math.factorial(a) for a in alpha)
        sgn = -1 if (sum(alpha) // 2) % 2 == 1 else 1
        coef = Fraction(sgn, fact) * mu if exact else sgn * mu / fact
        t[alpha] = coef

    logs = _series_log1p(t, L)

    B = np.empty((nu, nu))
    for i in range(nu):
        for j in range(nu):
            alpha = [0] * nu
            alpha[i] += 1
            alpha[j] += 1
            c = logs.get(tuple(alpha), 0)
            B[i, j] = -float(c) * (2.0 if i == j else 1.0)

    log_m = {k: v for k, v in logs.items() if sum(k) >= 3}
    m = {k: v for k, v in _series_expm1(log_m, L).items() if sum(k) >= 3}
    return EdgeworthCoeffs(L=L, m=m, B=B, log_m=log_m, exact=exact)


def _multi_indices(nu: int, lo: int, hi: int):
    for total in range(lo, hi + 1):
        yield from _compositions(total, nu)


def _compositions(total: int, nu: int):
    if nu == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, nu - 1):
            yield (first,) + rest


def _ipow(pt, alpha) -> int:
    return math.prod(c ** a for c, a in zip(pt, alpha))


def unit_frame_terms(coeffs: EdgeworthCoeffs):
    """Log-series coefficients rewritten for the unit-covariance variable.

    Returns (O, sigmas, terms) where x' = diag(1/sigmas) @ O.T @ x maps the
    walk to identity covariance and ``terms[alpha]`` is the coefficient of
    mu^alpha in the transformed log series (quadratic part excluded).
    """
    B = coeffs.B
    nu = B.shape[0]
    offdiag = B - np.diag(np.diag(B))
    if np.all(offdiag == 0):
        O = np.eye(nu)
        sig = np.sqrt(np.diag(B))
        terms = {
            a: float(v) * float(np.prod(sig ** (-np.array(a))))
            for a, v in coeffs.log_m.items()
        }
        return O, sig, terms
    evals, O = np.linalg.eigh(B)
    sig = np.sqrt(evals)
    # substitute lambda = O diag(1/sig) mu into each monomial
    rows = O / sig[np.newaxis, :]  # lambda_i = sum_j rows[i, j] mu_j
    terms: dict = {}
    for alpha, v in coeffs.log_m.items():
        expanded = {(0,) * nu: float(v)}
        for i, a in enumerate(alpha):
            lin = {}
            for j in range(nu):
                if rows[i, j] != 0.0:
                    key = tuple(1 if k == j else 0 for k in range(nu))
                    lin[key] = rows[i, j]
            for _ in range(a):
                expanded = _series_mul(expanded, lin, 10**9)
        for key, val in expanded.items():
            terms[key] = terms.get(key, 0.0) + val
    return O, sig, {k: v for k, v in terms.items() if v != 0.0}
