"""Closed-form asymptotic predictions for the walk laws.

The leading term is the lattice Gaussian
``(2 pi n)^{-nu/2} det(B)^{-1/2} exp(-(x, B^{-1} x) / 2n)``.
For the perturbed chain the relative correction depends on the dimension:

* nu = 1:   (d / sigma^2) * sign(x)            (sign(0) := 0)
* nu = 2:   (1/pi) * det(B)^{-1/2} * (d, B^{-1} x) / (x, B^{-1} x)
* nu >= 3:  none at this order

The one-dimensional constant is the classical one; the two-dimensional
constant and sign were frozen against the exact engine (extrapolation over
n up to 4096 on a unit-covariance test walk), because printed versions of
this correction disagree with each other about the normalization.  With
B = I the relative correction reads (d.x) / (pi |x|^2).

For the unperturbed walk the Gaussian is refined by Hermite correction
terms built from the moment coefficients; orders are collected completely
in powers of n^{-1/2} (coefficient products included), which is what makes
the L = 4 truncation accurate to O(n^{-2}) relative for symmetric laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoeffOrderMismatch, DimensionMismatch, OriginUndefined, SingularCovariance
from .spectral import EdgeworthCoeffs, unit_frame_terms
from .special_fn import hermite_table
from .walk_model import LatticePMF, WalkSpec, exact_moment


@dataclass(frozen=True)
class AsymptoticPrediction:
    """One evaluated prediction; total = gaussian + corrections."""

    n: int
    x: tuple
    gaussian_leading: float
    perturbation_correction: float
    edgeworth_terms: float
    total: float
    within_horizon: bool


def _as_matrix(B) -> np.ndarray:
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape[0] != B.shape[1]:
        raise SingularCovariance(f"covariance must be square, got {B.shape}")
    return B


def gaussian_leading_many(B, n: int, X: np.ndarray) -> np.ndarray:
    """Vectorized lattice Gaussian over rows of X."""
    B = _as_matrix(B)
    nu = B.shape[0]
    det = float(np.linalg.det(B))
    if det <= 0 or np.linalg.eigvalsh(B).min() <= 0:
        raise SingularCovariance("covariance must be positive definite")
    Binv = np.linalg.inv(B)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    quad = np.einsum("ij,jk,ik->i", X, Binv, X)
    return (2.0 * math.pi * n) ** (-nu / 2.0) / math.sqrt(det) * np.exp(-quad / (2.0 * n))


def llt_gaussian_leading(B, n: int, x) -> float:
    """Gaussian local-limit leading term at a single lattice point."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(gaussian_leading_many(B, n, x[np.newaxis, :])[0])


def perturbation_correction_many(spec: WalkSpec, n: int, X: np.ndarray) -> np.ndarray:
    """Vectorized additive correction for the perturbed chain."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    gauss = gaussian_leading_many(spec.B, n, X)
    if spec.nu == 1:
        rel = (spec.d[0] / spec.sigma2) * np.sign(X[:, 0])
        return gauss * rel
    if spec.nu == 2:
        Binv = np.linalg.inv(spec.B)
        det = float(np.linalg.det(spec.B))
        num = X @ (Binv @ spec.d)
        den = np.einsum("ij,jk,ik->i", X, Binv, X)
        if np.any(den == 0):
            raise OriginUndefined("correction is singular at x = 0 in two dimensions")
        rel = (1.0 / math.pi) / math.sqrt(det) * num / den
        return gauss * rel
    return np.zeros(X.shape[0])


def perturbation_correction(spec: WalkSpec, n: int, x) -> float:
    """Additive dimension-dependent correction at one lattice point.

    sign(0) is 0, so the origin receives no correction in one dimension
    (consistent with the exact origin identity); x = 0 raises
    OriginUndefined in two dimensions.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape[0] != spec.nu:
        raise DimensionMismatch(f"x has dim {x.shape[0]}, walk has {spec.nu}")
    return float(perturbation_correction_many(spec, n, x[np.newaxis, :])[0])


# ---------------------------------------------------------------------------
# Hermite-corrected expansion for the unperturbed walk
# ---------------------------------------------------------------------------

def _order_collected_terms(coeffs: EdgeworthCoeffs):
    """exp of the non-Gaussian log part, collected by half-integer n-order.

    Returns {(alpha, j): c}: the relative correction is
    sum c * (-1)^{|alpha|/2} H_alpha(x'/sqrt(n)) / n^{j/2} with j <= L - 2.
    A term built from log coefficients alpha_1..alpha_r carries
    j = sum (|alpha_i| - 2), so products enter at their true order instead
    of being misfiled under |alpha| - 2.
    """
    jcap = coeffs.L - 2
    _, _, unit_terms = unit_frame_terms(coeffs)
    base = {}
    for alpha, v in unit_terms.items():
        j = sum(alpha) - 2
        if 1 <= j <= jcap:
            base[(alpha, j)] = float(v)

    def mul(a, b):
        out = {}
        for (ka, ja), va in a.items():
            for (kb, jb), vb in b.items():
                if ja + jb > jcap:
                    continue
                key = (tuple(x + y for x, y in zip(ka, kb)), ja + jb)
                out[key] = out.get(key, 0.0) + va * vb
        return out

    total = {}
    term = dict(base)
    k = 1
    while term:
        for key, v in term.items():
            total[key] = total.get(key, 0.0) + v
        k += 1
        term = {key: v / k for key, v in mul(term, base).items()}
        if k > jcap + 1:
            break
    return total


def edgeworth_factor_many(coeffs: EdgeworthCoeffs, n: int, X: np.ndarray) -> np.ndarray:
    """Relative factor (1 + corrections) of the refined expansion, vectorized."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    nu = coeffs.B.shape[0]
    if X.shape[1] != nu:
        raise DimensionMismatch(f"x has dim {X.shape[1]}, coefficients have {nu}")
    O, sig, _ = unit_frame_terms(coeffs)
    U = (X @ O) / sig / math.sqrt(n)
    collected = _order_collected_terms(coeffs)
    if not collected:
        return np.ones(X.shape[0])
    max_deg = max(max(alpha) for (alpha, _) in collected)
    tables = [hermite_table(max_deg, U[:, i]) for i in range(nu)]
    factor = np.ones(X.shape[0])
    for (alpha, j), c in sorted(collected.items()):
        herm = np.ones(X.shape[0])
        for i, a in enumerate(alpha):
            if a:
                herm = herm * tables[i][a]
        sign = -1.0 if (sum(alpha) // 2) % 2 == 1 else 1.0
        factor += c * sign * herm / float(n) ** (j / 2.0)
    return factor


def llt_edgeworth(p: LatticePMF, coeffs: EdgeworthCoeffs, n: int, x) -> float:
    """Hermite-refined local value for the unperturbed walk at one point.

    ``p`` must be the law the coefficients came from (the covariance is
    compared as a guard).  Remainder terms beyond the truncation order are
    dropped; outside |x| <= n^{1 - 1/L} the expansion stops being
    informative, use :func:`within_horizon` to flag that.
    """
    nu = p.dim
    B = np.empty((nu, nu))
    for i in range(nu):
        for j in range(nu):
            alpha = [0] * nu
            alpha[i] += 1
            alpha[j] += 1
            B[i, j] = float(exact_moment(p, alpha)) if p.exact else 0.0
    if p.exact and float(np.abs(B - coeffs.B).max()) > 1e-12:
        raise CoeffOrderMismatch("coefficients were computed for a different law")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    gauss = llt_gaussian_leading(coeffs.B, n, x)
    factor = float(edgeworth_factor_many(coeffs, n, x[np.newaxis, :])[0])
    return gauss * factor


def within_horizon(n: int, x, L: int) -> bool:
    """Is |x| within the informative range n^(1 - 1/L) of the expansion?"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return bool(np.linalg.norm(x) <= float(n) ** (1.0 - 1.0 / L))


def asymptotic_prediction(
    spec: WalkSpec,
    n: int,
    x,
    coeffs: EdgeworthCoeffs | None = None,
) -> AsymptoticPrediction:
    """Assembled prediction at one point.

    total = gaussian + perturbation correction (+ Hermite refinement terms
    when coefficients are supplied; for an unperturbed spec that makes the
    total the refined expansion value).
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    gauss = llt_gaussian_leading(spec.B, n, x_arr)
    # an unperturbed spec has d = 0: every correction vanishes identically,
    # including at the two-dimensional origin where the formula is singular
    pert = 0.0 if spec.unperturbed else perturbation_correction(spec, n, x_arr)
    edge = 0.0
    if coeffs is not None:
        edge = gauss * (float(edgeworth_factor_many(coeffs, n, x_arr[np.newaxis, :])[0]) - 1.0)
    L = coeffs.L if coeffs is not None else spec.L
    return AsymptoticPrediction(
        n=n,
        x=tuple(int(c) for c in x_arr),
        gaussian_leading=gauss,
        perturbation_correction=pert,
        edgeworth_terms=edge,
        total=gauss + pert + edge,
        within_horizon=within_horizon(n, x_arr, L),
    )
