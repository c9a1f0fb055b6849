import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cauchy_leray import experiments as ex

DELTAS = [0.2, 0.1, 0.05, 0.025]


def test_fit_power_law_examples():
    slope, _, res = ex.fit_power_law([(0.1, 10**0.5), (0.01, 10)])
    assert slope == pytest.approx(-0.5, abs=1e-14)
    assert res == pytest.approx(0, abs=1e-14)
    slope, _, _ = ex.fit_power_law([(d, 3.0) for d in DELTAS])
    assert slope == pytest.approx(0, abs=1e-14)
    with pytest.raises(ex.ExperimentError):
        ex.fit_power_law([(0.1, 1.0), (0.2, -1.0)])
    with pytest.raises(ex.ExperimentError):
        ex.fit_power_law([(0.1, 1.0)])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), c=st.floats(0.01, 100))
def test_fit_power_law_noisy_synthetic(seed, c):
    rng = np.random.default_rng(seed)
    d = np.geomspace(0.2, 0.0125, 8)
    y = c * d**-0.5 * (1 + 0.01 * rng.uniform(-1, 1, size=d.size))
    slope, _, _ = ex.fit_power_law(np.column_stack([d, y]))
    assert slope == pytest.approx(-0.5, abs=0.02)


def test_blowup_target():
    assert ex.blowup_target("quad", 1, 0, None) == -1
    assert ex.blowup_target("power", 2, 1, 1.5) == pytest.approx(-0.25)
    assert ex.blowup_target("power", 2, 1 / 3, 1.5) == pytest.approx(-5 / 12)


def test_blowup_sweep_quad_p2():
    rep = ex.blowup_sweep("quad", 2, 0.0, DELTAS)
    assert rep.passed
    assert rep.fit["slope"] == pytest.approx(-0.5, abs=0.1)
    assert [r["delta"] for r in rep.rows] == sorted(DELTAS, reverse=True)
    assert all(isinstance(c["tolerance"], float) for c in rep.checks)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family="quad", p=2, a_measure=0, deltas=[0.1, 0.2, 0.05]),
        dict(family="quad", p=2, a_measure=0, deltas=[0.2, 0.1]),
        dict(family="quad", p=0.5, a_measure=0, deltas=DELTAS),
        dict(family="power", p=2, a_measure=0, deltas=DELTAS, m=2.5),
        dict(family="power", p=2, a_measure=2.0, deltas=DELTAS, m=1.5),
        dict(family="quad", p=2, a_measure=0, deltas=DELTAS, mode="sideways"),
    ],
)
def test_blowup_sweep_guards(kwargs):
    with pytest.raises(ex.ExperimentError):
        ex.blowup_sweep(**kwargs)


def test_convexity_examples():
    w = np.array([0.3 + 0.1j, 0.2 + 0.4j])
    slack, lhs = ex.convexity_slack(w, w)
    assert slack == 0 and lhs == 0
    slack, lhs = ex.convexity_slack([1, 1j], [0, 1j])
    assert (slack, lhs) == (1.0, 2.0)


def test_printed_quartic_inequality_counterexample():
    # on boundary pairs the slack reduces to 2 v1 (v1 + y1) (v1 - y1)^2, negative when v1 (v1 + y1) < 0
    v1, y1 = 0.5, -0.8
    w = np.array([1j * v1, 1j * (1 - np.sqrt(1 - v1**4))])
    z = np.array([1j * y1, 1j * (1 - np.sqrt(1 - y1**4))])
    slack, _ = ex.convexity_slack(w, z)
    assert slack == pytest.approx(2 * v1 * (v1 + y1) * (v1 - y1) ** 2, rel=1e-12)
    assert slack < 0
    sharp, _ = ex.convexity_slack(w, z, ex.E6_CORRECTED)
    assert sharp >= 0


def test_convexity_report_small_sample():
    rep = ex.convexity_report("quad", 20_000, seed=1)
    checks = {c["name"]: c["pass"] for c in rep.checks}
    assert checks["slack_sharp_constant"]
    assert checks["re_delta_positive_off_diagonal"]
    rep = ex.convexity_report("power", 20_000, seed=1)
    assert rep.passed


def test_clinear_demo():
    rep = ex.clinear_failure_demo([0.3, 1e-3])
    rows = {r["t"]: r for r in rep.rows}
    assert rows[0.3]["ratio"] == 0 and rows[0.3]["abs_w"] == pytest.approx(0.3)
    assert rows[1e-3]["ratio"] == 0
    assert rows[0.3]["siegel_ratio"] > 0
    assert rep.passed
    with pytest.raises(ex.ExperimentError):
        ex.clinear_failure_demo([0.0])


def test_bound_check_thresholds():
    rep = ex.bound_check("quad", [0.1], n=10_000)
    row = rep.rows[0]
    assert 0.1**2 / 4 == pytest.approx(0.0025)
    assert 3 * (1 / 12) * 0.1**2 == pytest.approx(0.0025)
    assert row["min_re"] >= 0.0025 and row["max_abs_im"] <= 0.0025
    rep = ex.bound_check("power", [0.1], m=1.5, n=10_000)
    assert rep.rows[0]["min_re_scaled"] >= 0.4


def test_bound_check_power_needs_small_constant():
    # with the quadratic-family constant the sign of Re(Delta^-2) is lost at some samples
    rep = ex.bound_check("power", DELTAS, a=1 / 12, m=1.5, n=100_000)
    assert any(r["n_nonpositive_re_inv2"] > 0 for r in rep.rows)


@pytest.mark.parametrize("selector", ["DeltaScaling", "ClosedFormAgreement", "Invariance", "Isometry",
                                      "DensityTransport"])
def test_identity_suite_fast(selector):
    rep = ex.identity_suite(selector)
    assert rep.passed
    assert all({"id", "lhs", "rhs", "abs_err", "pass"} <= set(r) for r in rep.rows)


def test_identity_suite_unknown():
    with pytest.raises(ex.ExperimentError):
        ex.identity_suite("Nonsense")


def test_reproducing_check_margin_and_example():
    with pytest.raises(ex.ExperimentError):
        ex.reproducing_check(points=[(0j, 0.02j)])
    rep = ex.reproducing_check(points=[(0j, 1j)], basis=("1", "z1"), nodes=(24, 24, 32))
    assert rep.passed
    vals = {r["basis"]: r["value"] for r in rep.rows}
    assert vals["1"][0] == pytest.approx(1, abs=1e-2)
    assert abs(complex(*vals["z1"])) < 1e-2


def test_reports_deterministic():
    a = ex.blowup_sweep("quad", 1, 0.0, DELTAS).to_dict()
    b = ex.blowup_sweep("quad", 1, 0.0, DELTAS).to_dict()
    assert a == b
    assert a["provenance"]["config_hash"] == b["provenance"]["config_hash"]
    assert {"slope", "target", "tolerance", "rows"} <= set(a)


def test_scaling_limit_guard_and_shape():
    with pytest.raises(ex.ExperimentError):
        ex.scaling_limit("quad", 0.1, [0.05, 0.1])
    rep = ex.scaling_limit("quad", 0.1, [0.2, 0.1, 0.05], n_samples=4)
    ratios = [r["contraction"] for r in rep.rows[1:]]
    assert all(abs(q / 4 - 1) <= 0.5 for q in ratios)
    errs = [r["rel_err"] for r in rep.rows]
    assert errs == sorted(errs, reverse=True)
