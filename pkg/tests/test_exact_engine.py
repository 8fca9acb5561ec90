import numpy as np
import pytest

from lltwalk import (
    convolve_power,
    cross_check,
    first_return_probs,
    max_abs_difference,
    perturbed_forward,
    perturbed_fourier,
    perturbed_via_representation,
)
from lltwalk import exact_engine
from lltwalk.errors import ResourceLimit
from lltwalk.io_text import distribution_text


def test_convolve_power_lazy_n2(lazy_p):
    sq = convolve_power(lazy_p, 2)
    expect = {(-2,): 1 / 16, (-1,): 1 / 4, (0,): 3 / 8, (1,): 1 / 4, (2,): 1 / 16}
    for pt, w in expect.items():
        assert sq.value_at(pt) == pytest.approx(w, abs=1e-15)


def test_convolve_power_trivial_cases(lazy_p):
    delta = convolve_power(lazy_p, 0)
    assert delta.as_dict() == {(0,): 1.0}
    assert convolve_power(lazy_p, 1) is lazy_p


def test_convolve_power_offcenter_point_mass():
    from lltwalk import LatticePMF

    d2 = LatticePMF.from_points(1, {2: 1})
    assert convolve_power(d2, 3).as_dict() == {(6,): 1.0}


def test_zero_steps_all_routes(lazy_pert):
    for route in ("dp", "repr", "fourier"):
        d0 = exact_engine.perturbed_distribution(lazy_pert, 0, route=route)
        assert d0.pmf.as_dict() == {(0,): 1.0}


def test_first_returns_single_step(lazy_pert):
    f, fp = first_return_probs(lazy_pert, 1)
    assert f[0] == pytest.approx(0.5) and fp[0] == pytest.approx(0.5)


@pytest.mark.parametrize("n", [2, 5, 16, 37])
def test_convolve_power_methods_agree_1d(lazy_p, n):
    a = convolve_power(lazy_p, n, method="fft")
    b = convolve_power(lazy_p, n, method="direct")
    assert max_abs_difference(a, b) < 1e-14


def test_convolve_power_methods_agree_2d(unit_cov_2d):
    a = convolve_power(unit_cov_2d.p, 9, method="fft")
    b = convolve_power(unit_cov_2d.p, 9, method="direct")
    assert max_abs_difference(a, b) < 1e-14


def test_forward_one_step_is_exit_law(lazy_pert):
    d = perturbed_forward(lazy_pert, 1)
    for pt, w in lazy_pert.q.points():
        assert d.value_at(pt) == pytest.approx(w, abs=1e-15)


def test_forward_two_steps_hand_values(lazy_pert):
    d = perturbed_forward(lazy_pert, 2)
    assert d.value_at([0]) == pytest.approx(0.375, abs=1e-15)
    assert d.value_at([1]) == pytest.approx(0.30, abs=1e-15)


def test_representation_two_steps_hand_values(lazy_pert):
    d = perturbed_via_representation(lazy_pert, 2)
    assert d.value_at([1]) == pytest.approx(0.30, abs=1e-14)
    # antisymmetric correction vanishes at the origin
    pn = convolve_power(lazy_pert.p, 2)
    assert d.value_at([0]) == pytest.approx(pn.value_at([0]), abs=1e-15)


def test_representation_reduces_to_power_when_unperturbed(lazy_sym):
    for n in (1, 3, 8):
        d = perturbed_via_representation(lazy_sym, n)
        pn = convolve_power(lazy_sym.p, n)
        assert max_abs_difference(d.pmf, pn) < 1e-14


@pytest.mark.parametrize("n", [1, 5, 17, 64])
def test_route_equivalence_1d(lazy_pert, n):
    _, worst = cross_check(lazy_pert, n, tol=1e-13)
    assert worst < 1e-13


@pytest.mark.parametrize("n", [2, 9, 24, 60])
def test_route_equivalence_2d(unit_cov_2d, n):
    _, worst = cross_check(unit_cov_2d, n, tol=1e-12)
    assert worst < 1e-12


def test_route_equivalence_3d(spec3d):
    _, worst = cross_check(spec3d, 6, tol=1e-12)
    assert worst < 1e-12


def test_origin_identity(lazy_pert):
    # mass at the origin is never affected by the antisymmetric perturbation
    for n in (1, 7, 20, 50):
        d = perturbed_fourier(lazy_pert, n)
        pn = convolve_power(lazy_pert.p, n)
        assert d.value_at([0]) == pytest.approx(pn.value_at([0]), abs=1e-12)


def test_mass_conservation_and_support(lazy_pert):
    n = 30
    d = perturbed_forward(lazy_pert, n)
    assert d.pmf.total() == pytest.approx(1.0, abs=1e-10)
    lo, hi = d.pmf.box[0]
    assert lo >= -n * lazy_pert.radius and hi <= n * lazy_pert.radius
    assert np.all(d.pmf.weights >= 0)


def test_positive_drift_tilts_mass(lazy_pert):
    d = perturbed_forward(lazy_pert, 16)
    for x in range(1, 17):
        assert d.value_at([x]) >= d.value_at([-x])


def test_first_returns_hand_values(lazy_pert, lazy_sym):
    f, fp = first_return_probs(lazy_pert, 2)
    assert fp[0] == pytest.approx(0.5, abs=1e-15)    # stay put
    assert fp[1] == pytest.approx(1 / 8, abs=1e-15)  # out and back
    assert f[1] == pytest.approx(1 / 8, abs=1e-15)   # 0.3*0.25 + 0.2*0.25


def test_first_return_identity(lazy_pert, unit_cov_2d):
    f, fp = first_return_probs(lazy_pert, 50)
    assert np.abs(f - fp).max() < 1e-12
    f2, fp2 = first_return_probs(unit_cov_2d, 20)
    assert np.abs(f2 - fp2).max() < 1e-12


def test_resource_limit(lazy_pert):
    with pytest.raises(ResourceLimit):
        perturbed_forward(lazy_pert, 10**7, mem_limit=1 << 20)
    with pytest.raises(ResourceLimit):
        convolve_power(lazy_pert.p, 10**7, mem_limit=1 << 20)


def test_fourier_weights_clamped_nonnegative(lazy_pert):
    d = perturbed_fourier(lazy_pert, 64)
    assert d.pmf.weights.min() >= 0.0


def test_export_format(lazy_pert):
    d = perturbed_forward(lazy_pert, 3)
    text = distribution_text(d, fmt="csv")
    lines = text.strip().split("\n")
    assert lines[0] == "# n=3 nu=1 route=dp"
    assert lines[1] == "x1,mass"
    xs = [int(line.split(",")[0]) for line in lines[2:]]
    assert xs == sorted(xs)
    total = sum(float(line.split(",")[1]) for line in lines[2:])
    assert total == pytest.approx(1.0, abs=1e-12)


def test_export_json_schema(lazy_pert):
    import json

    d = perturbed_forward(lazy_pert, 3)
    payload = json.loads(distribution_text(d, fmt="json"))
    assert payload["schema_version"] == 1
    assert payload["route"] == "dp"
    assert payload["n"] == 3
