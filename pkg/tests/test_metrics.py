import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qndsim import metrics
from qndsim.metrics import (
    DistinguishabilityPair,
    JointDist,
    MetricsError,
    c2_from_fqsp,
    classical_fidelity,
    correlation_c2,
    distinguishability,
    fm_from_tm,
    fqnd_from_ts,
    measurement_fidelity,
    qnd_fidelity,
    qsp_fidelity,
)

dists = st.lists(st.floats(1e-6, 1.0), min_size=2, max_size=6)


def test_fidelity_identical():
    assert classical_fidelity([0.3, 0.7], [0.3, 0.7]) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_uncorrelated():
    assert classical_fidelity([1, 0], [0.5, 0.5]) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_anticorrelated():
    assert classical_fidelity([1, 0], [0, 1]) == 0.0


def test_fidelity_accepts_counts():
    # raw counts are normalized internally
    expected = (math.sqrt(0.9 * 0.88) + math.sqrt(0.1 * 0.12)) ** 2
    assert classical_fidelity([90, 10], [88, 12]) == pytest.approx(expected, abs=1e-12)


def test_fidelity_length_mismatch():
    with pytest.raises(MetricsError):
        classical_fidelity([1, 0], [1, 0, 0])


def test_measurement_fidelity_examples():
    assert measurement_fidelity([1, 0], [0.5, 0.5]) == pytest.approx(0.5)
    assert measurement_fidelity([0.5, 0.5], [0.5, 0.5]) == pytest.approx(1.0)
    a2, b2 = 0.36, 0.64
    assert measurement_fidelity([a2, b2], [0.5, 0.5]) == pytest.approx(
        0.5 + math.sqrt(a2 * b2), abs=1e-12
    )


def test_qnd_fidelity_examples():
    assert qnd_fidelity([0.2, 0.8], [0.2, 0.8]) == pytest.approx(1.0)
    assert qnd_fidelity([1, 0], [0, 1]) == 0.0


def test_qsp_fidelity_examples():
    assert qsp_fidelity([0.3, 0.7], [1.0, 1.0]) == pytest.approx(1.0)
    assert qsp_fidelity([0.5, 0.5], [0.5, 0.5]) == pytest.approx(0.5)
    with pytest.raises(MetricsError):
        qsp_fidelity([0.5, 0.5], [1.0])


def test_distinguishability_projective():
    pair = distinguishability(1.0, 0.5)
    assert pair.k == pytest.approx(1.0)
    assert pair.k_bar == pytest.approx(0.0)
    assert pair.englert_lhs == pytest.approx(1.0)
    assert pair.saturated


def test_distinguishability_intermediate():
    g = 0.8
    gb = math.sqrt(1 - g * g)
    pair = distinguishability(g * g, g * gb + 0.5)
    assert pair.k == pytest.approx(0.28, abs=1e-12)
    assert pair.k_bar == pytest.approx(0.96, abs=1e-12)
    assert pair.englert_lhs == pytest.approx(1.0, abs=1e-12)


def test_distinguishability_off():
    pair = distinguishability(0.5, 0.5)
    assert pair.k == pytest.approx(0.0)
    assert pair.k_bar == pytest.approx(0.0)
    assert pair.englert_lhs == pytest.approx(0.0)
    assert not pair.saturated


def test_distinguishability_rejects_out_of_range():
    with pytest.raises(MetricsError):
        distinguishability(1.2, 0.5)
    with pytest.raises(MetricsError):
        distinguishability(0.5, -0.1)


def test_correlation_perfect():
    j = JointDist(np.diag([0.5, 0.5]), [1, -1], [1, -1])
    assert correlation_c2(j) == pytest.approx(1.0, abs=1e-12)


def test_correlation_independent_uniform():
    j = JointDist(np.full((2, 2), 0.25), [1, -1], [1, -1])
    assert correlation_c2(j) == pytest.approx(0.0, abs=1e-12)


def test_correlation_gate_joint():
    # brute-force oracle over the four joint outcomes of the strength-gamma gate
    g = 0.87
    gb2 = 1 - g * g
    q = np.array([[g * g, gb2], [gb2, g * g]]) / 2
    ez = np.array([1.0, -1.0])
    corr = float(ez @ q @ ez)
    expected = corr**2  # unit second moments
    assert expected == pytest.approx((2 * g * g - 1) ** 2, abs=1e-12)
    assert correlation_c2(JointDist(q, ez, ez)) == pytest.approx(expected, abs=1e-12)


def test_correlation_degenerate_observable():
    j = JointDist(np.diag([0.5, 0.5]), [0, 0], [1, -1])
    with pytest.raises(MetricsError):
        correlation_c2(j)


def test_correlation_mean_subtracted_variant():
    # biased marginals: raw and centered conventions differ
    q = np.array([[0.7, 0.1], [0.1, 0.1]])
    j = JointDist(q, [1, -1], [1, -1])
    raw = correlation_c2(j)
    centered = correlation_c2(j, subtract_mean=True)
    assert raw != pytest.approx(centered)


def test_c2_shortcut():
    assert c2_from_fqsp(1.0) == pytest.approx(1.0)
    assert c2_from_fqsp(0.5) == pytest.approx(0.0)
    assert c2_from_fqsp(0.64) == pytest.approx(0.28, abs=1e-12)


def test_cv_bridges():
    assert fm_from_tm(1.0) == pytest.approx(1.0)
    assert fm_from_tm(0.0) == 0.0
    assert fm_from_tm(1 / 3) == pytest.approx(math.sqrt(0.5), abs=1e-10)
    assert fqnd_from_ts(1 / 3) == pytest.approx(0.7071067812, abs=1e-9)
    with pytest.raises(MetricsError):
        fm_from_tm(-0.1)
    with pytest.raises(MetricsError):
        fqnd_from_ts(-1.0)


def test_cv_bridge_dataclass():
    b = metrics.CVBridge(t_m=1.0, t_s=1 / 3, c2=0.5)
    assert b.f_m == pytest.approx(1.0)
    assert b.f_qnd == pytest.approx(math.sqrt(0.5))
    assert b.to_json()["c2"] == 0.5


# ------------------------------------------------------------------ properties


@settings(max_examples=150, deadline=None)
@given(dists, dists)
def test_fidelity_symmetric_and_bounded(p, q):
    if len(p) != len(q):
        q = (q * len(p))[: len(p)]
    f = classical_fidelity(p, q)
    assert f == classical_fidelity(q, p)
    assert -1e-12 <= f <= 1 + 1e-12


@settings(max_examples=150, deadline=None)
@given(dists)
def test_fidelity_one_iff_equal(p):
    assert classical_fidelity(p, p) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=150, deadline=None)
@given(dists, dists)
def test_fidelity_one_implies_equal(p, q):
    if len(p) != len(q):
        q = (q * len(p))[: len(p)]
    pa = np.asarray(p) / np.sum(p)
    qa = np.asarray(q) / np.sum(q)
    if classical_fidelity(p, q) > 1 - 1e-12:
        np.testing.assert_allclose(pa, qa, atol=1e-5)


@settings(max_examples=150, deadline=None)
@given(st.floats(0, 50), st.floats(0, 50))
def test_fm_from_tm_monotone(t1, t2):
    if t1 == t2:
        return
    lo, hi = sorted((t1, t2))
    assert fm_from_tm(lo) < fm_from_tm(hi)


def test_englert_bound_for_simulated_cnot_family():
    from qndsim import cnot_qnd

    for g in np.linspace(cnot_qnd.GAMMA_MIN, 1.0, 25):
        _, pair, _ = cnot_qnd.characterize(cnot_qnd.MeterPrep(float(g)))
        assert pair.englert_lhs <= 1 + 1e-9
        assert pair.englert_lhs == pytest.approx(1.0, abs=1e-9)
