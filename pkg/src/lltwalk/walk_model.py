"""Lattice distributions and validated walk specifications.

A walk is described by two finitely supported laws on Z^nu: the step law
``p`` used away from the origin and the exit law ``q`` used from the origin.
Both are stored dense over an integer bounding box (``offset`` is the lower
corner), because the exact engines downstream want contiguous arrays.

Weights are kept twice: as float64 for numerics and as exact ``Fraction``
values for the structural checks.  Numeric literals are interpreted as exact
decimals (``0.3`` means 3/10), so symmetry and antisymmetry can be verified
with no tolerance at all, which is what the model hypotheses demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    MissingUnperturbedFlag,
    NotAntisymmetric,
    NotNormalized,
    NotSymmetric,
    Periodic,
    Reducible,
    SingularCovariance,
)

NORMALIZATION_TOL = 1e-12

Point = tuple[int, ...]
WeightLike = Union[int, float, str, Fraction]


def _to_fraction(v: WeightLike) -> Fraction:
    """Exact-decimal coercion: float 0.3 becomes 3/10, not its binary value."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (float, np.floating)):
        return Fraction(repr(float(v)))
    raise TypeError(f"cannot interpret weight of type {type(v)!r}")


def _as_point(x, dim: int) -> Point:
    if isinstance(x, (int, np.integer)):
        pt = (int(x),)
    else:
        pt = tuple(int(c) for c in x)
    if len(pt) != dim:
        raise DimensionMismatch(f"point {pt} does not have dimension {dim}")
    return pt


@dataclass(frozen=True)
class LatticeFn:
    """Dense real-valued function on an integer box (base for pmfs)."""

    dim: int
    offset: np.ndarray          # int64, shape (dim,): lower corner of the box
    weights: np.ndarray         # float64, shape = box shape
    exact: dict[Point, Fraction] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatch("dimension must be >= 1")
        off = np.asarray(self.offset, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        if off.shape != (self.dim,) or w.ndim != self.dim or w.size == 0:
            raise DimensionMismatch("offset/weights shape inconsistent with dim")
        off.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "weights", w)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_points(cls, dim: int, points: Mapping, **kw) -> "LatticeFn":
        """Build from a {point: weight} mapping; weights read as exact decimals."""
        exact = {}
        for x, v in points.items():
            pt = _as_point(x, dim)
            exact[pt] = exact.get(pt, Fraction(0)) + _to_fraction(v)
        exact = {pt: v for pt, v in exact.items() if v != 0}
        if not exact:
            exact = {(0,) * dim: Fraction(0)}
        lo = [min(pt[i] for pt in exact) for i in range(dim)]
        hi = [max(pt[i] for pt in exact) for i in range(dim)]
        shape = tuple(h - l + 1 for l, h in zip(lo, hi))
        w = np.zeros(shape)
        for pt, v in exact.items():
            w[tuple(c - l for c, l in zip(pt, lo))] = float(v)
        return cls(dim=dim, offset=np.array(lo, dtype=np.int64), weights=w, exact=exact, **kw)

    # -- access ------------------------------------------------------------

    def points(self) -> Iterator[tuple[Point, float]]:
        """Iterate (point, weight) over nonzero entries, lexicographic order."""
        for idx in product(*(range(s) for s in self.weights.shape)):
            v = self.weights[idx]
            if v != 0.0:
                yield tuple(int(i + o) for i, o in zip(idx, self.offset)), float(v)

    def value_at(self, x) -> float:
        pt = _as_point(x, self.dim)
        idx = tuple(c - int(o) for c, o in zip(pt, self.offset))
        if any(i < 0 or i >= s for i, s in zip(idx, self.weights.shape)):
            return 0.0
        return float(self.weights[idx])

    def exact_at(self, x) -> Fraction:
        return self.exact.get(_as_point(x, self.dim), Fraction(0))

    def as_dict(self) -> dict[Point, float]:
        return dict(self.points())

    @property
    def box(self) -> tuple[tuple[int, int], ...]:
        """Per-axis (lo, hi) inclusive bounds."""
        return tuple(
            (int(o), int(o) + s - 1) for o, s in zip(self.offset, self.weights.shape)
        )

    @property
    def radius(self) -> int:
        """Max sup-norm of any support point (jump radius)."""
        r = 0
        for pt, _ in self.points():
            r = max(r, max(abs(c) for c in pt))
        return r

    def total(self) -> float:
        return float(self.weights.sum())

    def exact_total(self) -> Fraction:
        return sum(self.exact.values(), Fraction(0))


@dataclass(frozen=True)
class LatticePMF(LatticeFn):
    """Finitely supported probability mass function on Z^dim.

    All weights nonnegative and summing to 1.  Inputs whose float sum is
    within 1e-12 of 1 are renormalized exactly; anything further off is
    rejected rather than silently fixed.
    """

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.weights < 0):
            raise NotNormalized("probability weights must be nonnegative")
        tot = self.exact_total() if self.exact else Fraction(repr(self.total()))
        if tot <= 0:
            raise NotNormalized("probability weights sum to zero")
        if abs(float(tot) - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(
                f"weights sum to {float(tot)!r}, more than {NORMALIZATION_TOL} from 1"
            )
        if tot != 1:
            if self.exact:
                exact = {pt: v / tot for pt, v in self.exact.items()}
                w = self.weights.copy()
                for pt, v in exact.items():
                    idx = tuple(c - int(o) for c, o in zip(pt, self.offset))
                    w[idx] = float(v)
            else:
                exact = {}
                w = self.weights / float(tot)
            w.flags.writeable = False
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "exact", exact)


@dataclass(frozen=True)
class SignedLatticeFn(LatticeFn):
    """Like LatticePMF but weights may be negative (houses q - p)."""

    def is_balanced(self) -> bool:
        """True when the total signed mass is exactly zero."""
        return self.exact_total() == 0


def is_symmetric(f: LatticeFn) -> bool:
    """f(x) == f(-x) for every x, checked exactly on the support."""
    return all(f.exact_at(tuple(-c for c in pt)) == v for pt, v in f.exact.items())


def is_antisymmetric(f: LatticeFn) -> bool:
    """f(x) == -f(-x) for every x, checked exactly on the support."""
    return all(f.exact_at(tuple(-c for c in pt)) == -v for pt, v in f.exact.items())


def moments(f: LatticeFn, alpha) -> float:
    """Mixed moment sum_x x^alpha f(x) for a multi-index alpha (finite sum)."""
    alpha = (alpha,) if isinstance(alpha, (int, np.integer)) else tuple(int(a) for a in alpha)
    if len(alpha) != f.dim:
        raise DimensionMismatch(f"multi-index {alpha} does not match dim {f.dim}")
    return math.fsum(
        v * math.prod(c ** a for c, a in zip(pt, alpha)) for pt, v in f.points()
    )


def exact_moment(f: LatticeFn, alpha: Sequence[int]) -> Fraction:
    alpha = tuple(int(a) for a in alpha)
    return sum(
        (v * math.prod(c ** a for c, a in zip(pt, alpha)) for pt, v in f.exact.items()),
        Fraction(0),
    )


def perturbation(p: LatticePMF, q: LatticePMF) -> SignedLatticeFn:
    """q - p as a signed lattice function (exact arithmetic)."""
    if p.dim != q.dim:
        raise DimensionMismatch("p and q must share a dimension")
    diff: dict[Point, Fraction] = dict(q.exact)
    for pt, v in p.exact.items():
        diff[pt] = diff.get(pt, Fraction(0)) - v
    diff = {pt: v for pt, v in diff.items() if v != 0}
    return SignedLatticeFn.from_points(p.dim, diff)


# -- structural checks on the step law --------------------------------------


def _generates_full_lattice(support: Iterable[Point], dim: int) -> bool:
    """Does the (symmetric) support additively generate all of Z^dim?

    The subgroup generated by the support equals Z^dim iff the integer row
    lattice of the support vectors has index 1; for a symmetric support the
    reachable semigroup is that subgroup, so no separate closure walk is
    needed.  Index is read off a Hermite-style integer elimination.
    """
    rows = [list(pt) for pt in support if any(pt)]
    if not rows:
        return False
    mat = [row[:] for row in rows]
    ncols = dim
    pivot_rows = []
    col = 0
    while col < ncols and mat:
        nonzero = [r for r in mat if r[col] != 0]
        if not nonzero:
            return False  # no support component along this axis: rank deficient
        while True:
            nonzero.sort(key=lambda r: abs(r[col]))
            piv = nonzero[0]
            done = True
            for r in nonzero[1:]:
                f = r[col] // piv[col]
                for j in range(ncols):
                    r[j] -= f * piv[j]
                if r[col] != 0:
                    done = False
            nonzero = [piv] + [r for r in nonzero[1:] if r[col] != 0]
            if done and len(nonzero) == 1:
                break
        pivot_rows.append(piv)
        mat = [r for r in mat if r is not piv and any(r[col:])]
        col += 1
    if len(pivot_rows) < ncols:
        return False
    index = 1
    for i, row in enumerate(pivot_rows):
        index *= abs(row[i])
    return index == 1


def _return_time_gcd(p: LatticePMF, nu: int) -> int:
    """gcd of {n <= 2*nu + 2 : n-step return to 0 has positive probability}."""
    support = [pt for pt, _ in p.points()]
    reach = {(0,) * nu: True}
    g = 0
    cur = {(0,) * nu}
    for n in range(1, 2 * nu + 3):
        nxt = set()
        for x in cur:
            for s in support:
                nxt.add(tuple(a + b for a, b in zip(x, s)))
        cur = nxt
        if (0,) * nu in cur:
            g = math.gcd(g, n)
            if g == 1:
                return 1
    return g if g else 0


@dataclass(frozen=True)
class WalkSpec:
    """Validated pair (p, q) with derived quantities.

    Invariants established by :func:`validate_walk_spec`: p symmetric, a = q-p
    antisymmetric, p aperiodic and irreducible, B symmetric positive definite,
    and d = 0 only when the ``unperturbed`` flag was given.
    """

    nu: int
    p: LatticePMF
    q: LatticePMF
    a: SignedLatticeFn
    B: np.ndarray               # nu x nu second-moment matrix of p
    d: np.ndarray               # mean of the exit law q (= first moment of a)
    L: int = 4
    unperturbed: bool = False

    def __post_init__(self):
        for arr in (self.B, self.d):
            arr.flags.writeable = False

    @property
    def sigma2(self) -> float:
        """Variance of the step law; one-dimensional walks only."""
        if self.nu != 1:
            raise DimensionMismatch("sigma2 is defined for nu = 1 only")
        return float(self.B[0, 0])

    @property
    def radius(self) -> int:
        """Max jump radius over both laws; bounds the support growth per step."""
        return max(self.p.radius, self.q.radius)


def validate_walk_spec(
    p: LatticePMF,
    q: LatticePMF,
    unperturbed: bool = False,
    L: int = 4,
) -> WalkSpec:
    """Check the model hypotheses and assemble a WalkSpec.

    Raises NotSymmetric / NotAntisymmetric / Periodic / Reducible /
    DimensionMismatch / MissingUnperturbedFlag on violations.  All structural
    comparisons are exact (rational arithmetic), not tolerance-based.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"p has dim {p.dim}, q has dim {q.dim}")
    nu = p.dim

    if not is_symmetric(p):
        raise NotSymmetric("step law p must satisfy p(x) = p(-x) exactly")

    a = perturbation(p, q)
    if not is_antisymmetric(a):
        # equivalently q(x) + q(-x) != 2 p(x) somewhere
        raise NotAntisymmetric(
            "q - p must be antisymmetric: q(x) + q(-x) = 2 p(x) fails"
        )

    if not _generates_full_lattice((pt for pt, _ in p.points()), nu):
        raise Reducible("support of p does not additively generate Z^nu")

    g = _return_time_gcd(p, nu)
    if g != 1:
        raise Periodic(f"return times to the origin share the factor {g}")

    B = np.empty((nu, nu))
    for i in range(nu):
        for j in range(nu):
            alpha = [0] * nu
            alpha[i] += 1
            alpha[j] += 1
            B[i, j] = float(exact_moment(p, alpha))
    eig = np.linalg.eigvalsh(B)
    if eig.min() <= 0:
        raise SingularCovariance(f"step covariance not positive definite: eigenvalues {eig}")

    d_exact = [exact_moment(a, [1 if k == i else 0 for k in range(nu)]) for i in range(nu)]
    d = np.array([float(v) for v in d_exact])
    if all(v == 0 for v in d_exact) and not unperturbed:
        raise MissingUnperturbedFlag(
            "exit law has zero mean d; pass unperturbed=True to accept"
        )

    return WalkSpec(nu=nu, p=p, q=q, a=a, B=B, d=d, L=L, unperturbed=unperturbed)
