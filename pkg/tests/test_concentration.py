import math

import numpy as np
import pytest

from fabry.concentration import (
    ConstantEstimate,
    arc_gram,
    constant_growth,
    constructed_constant,
    poincare_check,
    quadratic_form,
    random_good_series,
    random_zero_mean_poly,
    ratio_of,
    sharp_constant_lower_bound,
    verify_corollary,
)
from fabry.errors import HypothesisError, ValidationError
from fabry.fourier_core import TWO_PI, CoeffSeq, TrigPoly, arc_integral_exact, evaluate, l2_norm_sq, quadrature
from fabry.goodness import is_n_good
from fabry.kernels import claim_poly


def test_quadratic_form_examples():
    cos = TrigPoly.cosine()
    assert quadratic_form(CoeffSeq([1.0]), cos).coefficient_sum == pytest.approx(0.0, abs=1e-15)
    q = quadratic_form(CoeffSeq([1.0, 1.0]), cos)
    assert q.coefficient_sum == pytest.approx(TWO_PI)
    assert q.integral == pytest.approx(TWO_PI, rel=1e-12)


def test_quadratic_form_on_random_three_good(rng):
    s = random_good_series(rng, 3, 50)
    q = quadratic_form(s, claim_poly(3))
    assert q.coefficient_sum >= 0
    # independent dense quadrature of P |F|^2
    f = lambda t: claim_poly(3)(t).real * np.abs(evaluate(s, t)) ** 2
    ref = quadrature(f, -math.pi, math.pi, 4001)
    assert q.coefficient_sum == pytest.approx(ref, rel=1e-9)
    assert q.relative_gap <= 1e-9


def test_random_good_series_is_good(rng):
    for N in (2, 5, 16):
        s = random_good_series(rng, N, 40)
        assert is_n_good(s, N).verdict


def test_constructed_constant_values():
    assert constructed_constant(4).value == 1.0
    assert constructed_constant(2).value == 1.0
    C5 = constructed_constant(5).value
    # P = cos: 1 + 1 / min_{[4pi/5, pi]} (-cos) = 1 + 1/cos(pi/5), up to the certified slack
    assert C5 == pytest.approx(1 + 1 / math.cos(math.pi / 5), rel=2e-2)
    assert C5 >= 1 + 1 / math.cos(math.pi / 5)
    est = constructed_constant(8)
    assert est.kind == "constructed" and est.value > 1
    assert ConstantEstimate.from_dict(est.to_dict()) == est


def test_constructed_constant_validated_on_random_series(rng):
    C = constructed_constant(8).value
    for _ in range(200):
        s = random_good_series(rng, 8, 30)
        assert verify_corollary(s, 8, C).holds


def test_corollary_examples():
    chk = verify_corollary(CoeffSeq(np.ones(501)), 8, tau=0.01)
    assert chk.holds and chk.lhs <= chk.rhs
    with pytest.raises(HypothesisError) as exc:
        verify_corollary(CoeffSeq([(-1.0) ** n for n in range(40)]), 2)
    assert exc.value.precondition == "N-good"


def test_negative_control_puts_mass_near_pi():
    s = CoeffSeq([(-1.0) ** n for n in range(40)])
    ratio = arc_integral_exact(s, math.pi / 2, 0.05) / l2_norm_sq(s, 0.05)
    assert ratio < 0.02


def test_growth_slope():
    fit = constant_growth([8, 16, 32, 64])
    assert 1.0 <= fit.slope <= 2.5
    assert fit.constants == sorted(fit.constants)


def test_arc_gram_matches_quadrature():
    beta = 0.7
    M = arc_gram(4, beta)
    for j in range(4):
        for k in range(4):
            ref = quadrature(lambda t: np.cos((j - k) * t), -beta, beta, 20001)
            assert M[j, k] == pytest.approx(ref, rel=1e-7, abs=1e-10)


def test_sharp_single_coefficient():
    for N in (8, 16, 40):
        est = sharp_constant_lower_bound(N, 1)
        assert est.value == pytest.approx(N / 4, rel=1e-12)


def test_sharp_lower_bound_is_achieved():
    est = sharp_constant_lower_bound(8, 8, starts=5)
    assert est.value >= 2.0
    assert ratio_of(est.details["vector"], 8) == pytest.approx(est.value, rel=1e-9)
    assert all(x >= 0 for x in est.details["vector"])
    assert est.value <= constructed_constant(8).value


def test_sharp_validation():
    with pytest.raises(ValidationError):
        sharp_constant_lower_bound(8, 0)
    with pytest.raises(ValidationError):
        sharp_constant_lower_bound(1, 4)


def test_poincare_unit_circle():
    rep = poincare_check(TrigPoly([0.0, 0.0, 1.0]))
    assert rep.max_abs == pytest.approx(1.0, abs=1e-12)
    assert rep.arc_length_bound == pytest.approx(math.pi, abs=1e-12)
    assert rep.l2_bound == pytest.approx(math.pi, abs=1e-12)
    assert rep.holds


def test_poincare_random(rng):
    for _ in range(30):
        rep = poincare_check(random_zero_mean_poly(rng, int(rng.integers(1, 21))))
        assert rep.holds


def test_poincare_requires_zero_mean():
    with pytest.raises(ValidationError) as exc:
        poincare_check(TrigPoly([0.0, 1.0, 1.0]))
    assert exc.value.precondition == "zero-mean"
