import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import digamma

from lltwalk import hermite, hermite_at_zero, identity_suite, laguerre, sign_expansion_partial
from lltwalk.errors import DegreeTooLarge, NoConvergence
from lltwalk.special_fn import (
    abel_richardson,
    abel_sum,
    exp_integral_quadrature,
    exp_integral_series,
    hermite_table,
    hermite_univariate,
    laguerre_table,
)


def test_hermite_basic_values():
    assert hermite((0,), (3.7,)) == 1.0
    assert hermite((3,), (2.0,)) == pytest.approx(2.0, abs=1e-12)  # x^3 - 3x at 2
    assert hermite((4,), (0.0,)) == pytest.approx(3.0, abs=1e-12)
    assert hermite((2, 1), (1.0, 2.0)) == pytest.approx((1 - 1) * 2.0, abs=1e-12)


def test_hermite_zero_formula():
    for n in range(0, 9):
        val = hermite_univariate(2 * n, 0.0)
        expect = (-1) ** n * math.factorial(2 * n) / (2**n * math.factorial(n))
        assert val == pytest.approx(expect, rel=1e-13)
        assert hermite_at_zero(2 * n) == int(expect)
        assert hermite_at_zero(2 * n + 1) == 0


@given(st.floats(min_value=-8, max_value=8), st.integers(min_value=0, max_value=25))
@settings(max_examples=150, deadline=None)
def test_hermite_parity(x, n):
    left = hermite_univariate(n, -x)
    right = (-1) ** n * hermite_univariate(n, x)
    assert left == pytest.approx(right, rel=1e-12, abs=1e-12)


def test_hermite_orthogonality():
    # Gauss-type quadrature against the standard Gaussian weight; tolerance
    # scales with sqrt(n! m!) since that is the size of the summed terms
    nodes, weights = np.polynomial.hermite_e.hermegauss(16)
    table = hermite_table(12, nodes)
    norm = math.sqrt(2 * math.pi)
    for n in range(13):
        for m in range(13):
            val = float(np.sum(weights * table[n] * table[m])) / norm
            expect = math.factorial(n) if n == m else 0.0
            scale = max(1.0, math.sqrt(math.factorial(n) * math.factorial(m)))
            assert val == pytest.approx(expect, abs=1e-8 * scale)


def test_degree_guards():
    with pytest.raises(DegreeTooLarge):
        hermite_univariate(201, 0.5)
    with pytest.raises(DegreeTooLarge):
        laguerre(10**6 + 1, 0.0, 0.5)
    with pytest.raises(DegreeTooLarge):
        hermite((150, 100), (0.1, 0.2))


def test_laguerre_basic_values():
    assert laguerre(0, 0.3, 5.0) == 1.0
    assert laguerre(1, 1.0, 0.5) == pytest.approx(1.5, abs=1e-15)  # 1 + a - x
    # closed form at degree 2: L_2^1(x) = (x^2 - 6x + 6)/2
    assert laguerre(2, 1.0, 0.7) == pytest.approx((0.49 - 4.2 + 6) / 2, abs=1e-13)


def test_bridge_identity_example():
    x = 1.3
    lhs = -2.0 * math.factorial(1) * laguerre(1, -0.5, x * x / 2)
    assert lhs == pytest.approx(x * x - 1, abs=1e-13)
    assert lhs == pytest.approx(hermite_univariate(2, x), abs=1e-13)
    assert lhs == pytest.approx(0.69, abs=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2, 5, 11, 20])
def test_bridge_identities_to_degree_20(m):
    for x in np.linspace(-5, 5, 21):
        even_lhs = hermite_univariate(2 * m, x)
        even_rhs = (-2.0) ** m * math.factorial(m) * laguerre(m, -0.5, x * x / 2)
        scale = max(1.0, abs(even_rhs))
        assert abs(even_lhs - even_rhs) < 1e-10 * scale
        odd_lhs = hermite_univariate(2 * m + 1, x)
        odd_rhs = (-2.0) ** m * math.factorial(m) * x * laguerre(m, 0.5, x * x / 2)
        scale = max(1.0, abs(odd_rhs))
        assert abs(odd_lhs - odd_rhs) < 1e-10 * scale


@pytest.mark.parametrize("l", [1, 3, 10, 30])
def test_laguerre_product_identity_from_zero(l):
    x, y = 1.0, 1.0
    lhs = math.fsum(
        laguerre(p, -0.5, x * x / 2) * laguerre(l - p, 0.5, y * y / 2)
        for p in range(0, l + 1)
    )
    rhs = laguerre(l, 1.0, (x * x + y * y) / 2)
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(rhs))


def test_product_identity_needs_p_zero_start():
    # dropping the p = 0 term breaks the identity by exactly that term
    l, x, y = 3, 1.0, 1.0
    full = math.fsum(
        laguerre(p, -0.5, x * x / 2) * laguerre(l - p, 0.5, y * y / 2)
        for p in range(0, l + 1)
    )
    from_one = full - laguerre(0, -0.5, x * x / 2) * laguerre(l, 0.5, y * y / 2)
    rhs = laguerre(l, 1.0, (x * x + y * y) / 2)
    assert abs(full - rhs) < 1e-12
    assert abs(from_one - rhs) > 0.1


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_abel_summed_inverse_series(x):
    nterms = 12000
    table = laguerre_table(nterms, 1.0, x)
    coefs = table / (np.arange(nterms + 1) + 1.0)
    limit, _ = abel_richardson(coefs, (0.02, 0.01, 0.005), tol=1e-3)
    assert limit == pytest.approx(1.0 / x, abs=1e-3)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_abel_summed_log_series(x):
    nterms = 12000
    table = laguerre_table(nterms, 1.0, x)
    ell = np.arange(nterms + 1)
    coefs = np.zeros(nterms + 1)
    coefs[1:] = table[1:] / (ell[1:] * (ell[1:] + 1.0))
    limit, _ = abel_richardson(coefs, (0.02, 0.01, 0.005), tol=1e-3)
    expect = float(digamma(2.0)) - math.log(x)
    assert limit == pytest.approx(expect, abs=1e-3)
    # the halved version circulating in print fails by a factor of two
    assert abs(limit - expect / 2) > 0.1 * abs(expect)


def test_abel_no_convergence():
    rng = np.random.default_rng(3)
    coefs = rng.standard_normal(4000) * np.arange(4000) ** 1.5
    with pytest.raises(NoConvergence):
        abel_richardson(coefs, (0.02, 0.01, 0.005), tol=1e-6)


def test_abel_sum_geometric():
    coefs = np.ones(50000)
    assert abel_sum(coefs, 0.01) == pytest.approx(100.0, rel=1e-6)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5])
def test_half_line_integral(n):
    val, _ = quad(
        lambda t: hermite_univariate(2 * n + 1, t) * math.exp(-t * t / 2), 0, np.inf, limit=200
    )
    expect = hermite_at_zero(2 * n)
    assert abs(val - expect) < 1e-8 * max(1.0, abs(expect))


def test_half_line_integral_n1_value():
    val, _ = quad(lambda t: hermite_univariate(3, t) * math.exp(-t * t / 2), 0, np.inf)
    assert val == pytest.approx(-1.0, abs=1e-10)
    assert hermite_at_zero(2) == -1


@pytest.mark.parametrize("y", [1.0, 1.5, -1.0, -1.5])
def test_sign_expansion_partial_sums(y):
    val = sign_expansion_partial(y, 200)
    assert abs(val - math.copysign(1.0, y)) < 2e-2


def test_sign_expansion_oddness():
    for y in (0.7, 1.9):
        assert sign_expansion_partial(-y, 120) == pytest.approx(
            -sign_expansion_partial(y, 120), abs=1e-12
        )


@pytest.mark.parametrize("z,n", [(0.5, 9), (1.0, 9), (1.5, 6), (2.0, 7), (3.0, 7)])
def test_exp_integral_expansion(z, n):
    w = 0.4
    series = exp_integral_series(z, w, n)
    integral = exp_integral_quadrature(z, w, n)
    assert series == pytest.approx(integral, rel=1e-10)


def test_exp_integral_log_term_needs_gamma_factor():
    # at integer z >= 3 the log coefficient is 1/(z-1)!, not 1
    z, w, n = 3.0, 0.4, 7
    correct = exp_integral_series(z, w, n)
    wrong = correct + w ** (z - 1) * math.log(n - 1) * (1 - 1 / math.gamma(z))
    integral = exp_integral_quadrature(z, w, n)
    assert correct == pytest.approx(integral, rel=1e-10)
    assert abs(wrong - integral) > 1e-3


def test_identity_suite_passes():
    rep = identity_suite(x=1.0, eps=0.01, tol=1e-3)
    assert rep.all_ok
    text = rep.render()
    assert "PASS" in text and "FAIL" not in text


def test_identity_suite_rejects_bad_x():
    with pytest.raises(ValueError):
        identity_suite(x=-1.0)
