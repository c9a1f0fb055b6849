import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cauchy_leray.boundary import Chart, Side, make_boxes
from cauchy_leray.geometry import DomainError, DomainSpec, Family
from cauchy_leray.measures import (
    LERAY_LEVI,
    SIGMA,
    MeasureError,
    MeasureKind,
    box_measure,
    check_integrable,
    density,
    leray_levi_density,
    mu,
    mu_a_density,
    sigma_density,
    transported_ll,
    transported_mu,
)

FOUR_PI2 = 4 * np.pi**2
QUAD = Chart(DomainSpec(Family.MODEL_QUAD))
POWER = Chart(DomainSpec(Family.MODEL_POWER, m=1.5))
BQ_LOWER = Chart(DomainSpec(Family.BOUNDED_QUAD), Side.LOWER)


def test_sigma_examples():
    assert sigma_density(QUAD, [0, 0.3, 0.2]) == 1
    assert sigma_density(QUAD, [1, 0, 0]) == pytest.approx(1.4142136, abs=1e-7)
    assert sigma_density(BQ_LOWER, [0, 0, 0]) == 1


def test_leray_levi_examples():
    assert leray_levi_density(QUAD, [0.7, -1, 3]) == pytest.approx(0.0253303, abs=1e-7)
    assert leray_levi_density(POWER, [0.01, 0, 0]) == pytest.approx(0.0949886096646916607, rel=1e-12)
    assert leray_levi_density(BQ_LOWER, [0, 0, 0]) == pytest.approx(1 / FOUR_PI2, rel=1e-14)
    with pytest.raises(DomainError):
        leray_levi_density(POWER, [0.0, 0.1, 0])


@settings(max_examples=100, deadline=None)
@given(t=st.tuples(*[st.floats(-3, 3)] * 3))
def test_quad_model_density_is_constant(t):
    assert abs(leray_levi_density(QUAD, t) - 1 / FOUR_PI2) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(t1=st.floats(1e-4, 2), t2=st.floats(-2, 2), t3=st.floats(-2, 2), m=st.floats(1.05, 1.95))
def test_power_density_closed_form(t1, t2, t3, m):
    chart = Chart(DomainSpec(Family.MODEL_POWER, m=m))
    for s in (t1, -t1):
        expect = m * (m - 1) * abs(s) ** (m - 2) / (8 * np.pi**2)
        assert leray_levi_density(chart, [s, t2, t3]) == pytest.approx(expect, rel=1e-12)


def test_bounded_density_positive():
    rng = np.random.default_rng(0)
    for spec in (DomainSpec(Family.BOUNDED_QUAD), DomainSpec(Family.BOUNDED_POWER, m=1.5)):
        for side in (Side.LOWER, Side.UPPER):
            t = rng.uniform(-0.45, 0.45, size=(10_000, 3))
            t[:, 0] = np.where(t[:, 0] < 0, -1, 1) * np.maximum(np.abs(t[:, 0]), 1e-3)
            assert np.all(leray_levi_density(Chart(spec, side), t) > 0)


def test_mu_a_examples():
    t = np.array([[0.3, 0.1, -0.2], [1.2, 0.4, 0.1]])
    np.testing.assert_array_equal(mu_a_density(QUAD, t, 0), sigma_density(QUAD, t))
    np.testing.assert_allclose(mu_a_density(QUAD, t, 1), FOUR_PI2 * leray_levi_density(QUAD, t), rtol=1e-14)
    # mpmath oracle for (4 pi^2 lambda / sigma)^(1/3) sigma
    assert mu_a_density(POWER, [0.01, 0, 0], 1 / 3) == pytest.approx(1.5565238385239156, rel=1e-12)
    ratio = mu_a_density(POWER, [0.01, 0, 0], 1 / 3) / mu_a_density(POWER, [0.04, 0, 0], 1 / 3)
    assert ratio == pytest.approx(4 ** (1 / 6), rel=0.01)


def test_measure_kind_validation():
    with pytest.raises(MeasureError):
        MeasureKind("volume")
    with pytest.raises(MeasureError):
        MeasureKind("mu")
    with pytest.raises(MeasureError):
        transported_ll(0.0)
    assert str(mu(1 / 3)) == "MuA(0.333333)"
    assert str(transported_mu(1.0, 0.5)) == "TransportedMuA(1)(eps=0.5)"


def test_transported_examples():
    scaled = Chart(DomainSpec(Family.SCALED_QUAD, eps=1e-9))
    assert density(scaled, [0.5, 0.1, 0.3], transported_ll(1e-9)) == pytest.approx(1 / FOUR_PI2, rel=1e-12)
    scaled = Chart(DomainSpec(Family.SCALED_QUAD, eps=0.2))
    lhs = density(scaled, [0.5, 0.1, 0.3], transported_ll(0.2))
    assert lhs == pytest.approx(leray_levi_density(BQ_LOWER, [0.1, 0.02, 0.012]), rel=1e-14)
    with pytest.raises(MeasureError):
        density(scaled, [0.5, 0.1, 0.3], transported_ll(0.3))
    with pytest.raises(MeasureError):
        density(QUAD, [0.5, 0.1, 0.3], transported_ll(0.3))


def test_box_measure_examples():
    s, sp = make_boxes("quad", 0.1, 1 / 12)
    assert box_measure(s, QUAD, LERAY_LEVI) == pytest.approx(7.0361933084956786e-08, rel=1e-12)
    # closed form 2 * int_delta^{2 delta} sqrt(1 + t^2) dt * 2 a delta^2 (mpmath oracle)
    assert box_measure(sp, QUAD, SIGMA) == pytest.approx(3.3719675963756056e-4, rel=1e-12)
    # the slab volume itself is the rounded 3.3333e-4
    assert sp.volume() == pytest.approx(3.3333e-4, rel=1e-3)


def test_power_box_asymptotics():
    vals = []
    for d in (0.2, 0.1, 0.05, 0.025):
        s, _ = make_boxes("power", d, 1 / 12, 1.5)
        vals.append(box_measure(s, POWER, LERAY_LEVI) / d**3)
    assert max(vals) / min(vals) - 1 <= 0.1


def test_non_integrable_mu_a():
    s, _ = make_boxes("power", 0.1, 1 / 12, 1.5)
    with pytest.raises(MeasureError):
        box_measure(s, POWER, mu(2.0))
    assert check_integrable(POWER.spec, mu(1.0)) == pytest.approx(-0.5)
    assert check_integrable(QUAD.spec, mu(5.0)) == 0


def test_graded_rule_matches_analytic_power_mass():
    # int |t1|^{m-2} over [-c, c] x box, against the closed form
    s, _ = make_boxes("power", 0.1, 1 / 12, 1.5)
    c, h2, h3 = s.h1, s.h2, s.h3
    exact = 1.5 * 0.5 / (8 * np.pi**2) * (2 * c**0.5 / 0.5) * (2 * h2) * (2 * h3)
    assert box_measure(s, POWER, LERAY_LEVI) == pytest.approx(exact, rel=1e-10)
