import math

import numpy as np
import pytest

from fabry.errors import HypothesisError, TruncationError, ValidationError
from fabry.fourier_core import CoeffSeq
from fabry.goodness import quotient_phase_drift
from fabry.probe import (
    ConcentrationReport,
    ProbeReport,
    concentration_sweep,
    damped_slice,
    derivative_series,
    geometric_family,
    harmonic_family,
    probe,
    probe_family,
    random_quarter_family,
    rescale_to_unit,
    subdisc_family,
)

TAUS = (0.3, 0.1, 0.03)


def test_rescale_examples(rng):
    r = rng.standard_normal(20) + 2.0
    s = CoeffSeq(r)
    assert rescale_to_unit(s, 1.0).allclose(s, rtol=0)
    alt = CoeffSeq([(-1.0) ** n for n in range(50)])
    np.testing.assert_array_equal(rescale_to_unit(alt, -1.0).coeffs, np.ones(50))
    z = complex(math.cos(1.1), math.sin(1.1))
    a = CoeffSeq(z ** -np.arange(20.0) * np.abs(r))
    b = rescale_to_unit(a, z)
    np.testing.assert_allclose(b.coeffs, np.abs(r), rtol=1e-12)
    drift = quotient_phase_drift(b)
    np.testing.assert_allclose(drift.ratio_phase, 0.0, atol=1e-12)


def test_damped_slice_ones():
    tau, tol = 0.01, 1e-10
    big = CoeffSeq(np.ones(20_000))
    sl = damped_slice(big, tau, tol)
    K = len(sl)
    # geometric tail: sum_{n>=K} q^n / sum_{n>=0} q^n = q^K, q = e^{-2 tau}
    q = math.exp(-2 * tau)
    assert q ** K <= tol * (1 + 1e-6)
    assert q ** (K - 1) > tol * (1 - 1e-3)
    assert K == pytest.approx(math.log(1 / tol) / (2 * tau), rel=0.01)


def test_damped_slice_large_tau_keeps_head():
    sl = damped_slice(CoeffSeq([2.0, 1.0, 1.0, 1.0]), 50.0)
    np.testing.assert_array_equal(sl.coeffs, [2.0])


def test_damped_slice_short_range_errors():
    with pytest.raises(TruncationError) as exc:
        damped_slice(CoeffSeq(np.ones(100)), 0.001)
    assert exc.value.min_tau > 0.001
    # the suggested tau is indeed sufficient
    damped_slice(CoeffSeq(np.ones(100)), exc.value.min_tau * 1.01)
    with pytest.raises(ValidationError):
        damped_slice(CoeffSeq([1.0]), 0.0)


def test_derivative_series():
    s = CoeffSeq([0.0, 1.0, 2.0])
    assert derivative_series(s, 0) is s
    np.testing.assert_allclose(derivative_series(CoeffSeq([0.0, 1.0]), 1).coeffs, [0, 1j])
    np.testing.assert_allclose(derivative_series(s, 2).coeffs, [0, -1.0, -8.0])


def test_geometric_probe_positive():
    rep = probe_family(geometric_family(1.0), 8, TAUS)
    c = rep.concentration
    closed = [1 / (1 - math.exp(-t)) for t in TAUS]
    np.testing.assert_allclose(c.arc_sup, closed, rtol=1e-6)
    assert all(r >= c.lower_bound for r in c.mass_ratio)
    assert c.evidence and c.verdict_kind == "heuristic"
    assert rep.singularity_evidence_at == [1.0, 0.0]


def test_harmonic_probe_grows():
    rep = probe_family(harmonic_family(2, 1.0), 8, (0.3, 0.03, 0.003))
    assert rep.concentration.growth_ratio[0] > 1


def test_subdisc_growth_settles():
    rep = probe_family(subdisc_family(0.5), 8, TAUS)
    g = np.array(rep.concentration.derivative_growth)
    # l = 1: sup over the arc sits at theta = 0 where it equals sum n q^n
    q = 0.5 * np.exp(-np.array(TAUS))
    np.testing.assert_allclose(g[:, 0], q / (1 - q) ** 2, rtol=1e-7)  # truncation at energy 1e-10
    assert np.all(np.diff(g, axis=0) > 0)
    assert rep.singularity_evidence_at is None


def test_flipped_geometric_locates_minus_one():
    rep = probe_family(geometric_family(-1.0), 8, TAUS)
    assert rep.singularity_evidence_at == [-1.0, 0.0]
    ref = probe_family(geometric_family(1.0), 8, TAUS)
    assert rep.concentration == ref.concentration


def test_random_family_is_probeable():
    rep = probe_family(random_quarter_family(8, 3), 8, (0.3, 0.1))
    assert all(r >= rep.concentration.lower_bound for r in rep.concentration.mass_ratio)


def test_probe_refuses_bad_input():
    alt = CoeffSeq([(-1.0) ** n for n in range(4000)])
    with pytest.raises(HypothesisError):
        probe(alt, 2, 1.0, TAUS)
    with pytest.raises(ValidationError):
        concentration_sweep(CoeffSeq(np.ones(4000)), 8, (0.1, 0.3))


def test_report_round_trip_and_csv():
    rep = probe_family(geometric_family(1.0), 8, (0.3, 0.1), L=2)
    back = ProbeReport.from_dict(rep.to_dict())
    assert back == rep
    lines = rep.concentration.to_csv().splitlines()
    assert lines[0] == "tau,rho,growth_l1,growth_l2"
    assert len(lines) == 3
    assert float(lines[1].split(",")[0]) == 0.3
    assert isinstance(back.concentration, ConcentrationReport)
