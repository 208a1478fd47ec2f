"""Arc concentration of N-good series.

For an N-good series F and a symmetric polynomial P with nonnegative
coefficients of degree below N, ``int |F|^2 P >= 0``.  Splitting that
integral over the arc ``|theta| <= 4pi/N`` and its complement, where P is
certified negative, gives ``int |F|^2 <= C(N) int_arc |F|^2`` with
``C(N) = 1 + max_arc P / min_complement(-P)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CertificationError, HypothesisError, ValidationError
from .fourier_core import (
    TWO_PI,
    Arc,
    CoeffSeq,
    TrigPoly,
    arc_integral_exact,
    arc_kernel,
    evaluate,
    l2_norm_sq,
    quadrature,
)
from .goodness import QUARTER, is_n_good
from .kernels import certify_negativity, claim_poly

CONSTRUCTED = "constructed"
SHARP_LOWER_BOUND = "sharp_lower_bound"


@dataclass
class ConstantEstimate:
    N: int
    value: float
    kind: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ConstantEstimate":
        return cls(int(d["N"]), float(d["value"]), d["kind"], dict(d["details"]))


# -- quadratic form -----------------------------------------------------------

@dataclass
class QuadraticForm:
    integral: float
    coefficient_sum: float
    real_form: float
    scale: float

    @property
    def relative_gap(self) -> float:
        denom = max(abs(self.coefficient_sum), self.scale, np.finfo(float).tiny)
        return abs(self.integral - self.coefficient_sum) / denom


def _lag_products(a: np.ndarray, k: int) -> complex:
    """``sum_n a_n conj(a_{n+k})`` over stored indices."""
    K = a.size
    if abs(k) >= K:
        return 0j
    if k >= 0:
        return complex(np.vdot(a[k:], a[:K - k]))
    return complex(np.vdot(a[:K + k], a[-k:]))


def quadratic_form(series: CoeffSeq, P: TrigPoly, points: Optional[int] = None) -> QuadraticForm:
    """Both sides of ``int |F|^2 P = 2pi sum_n sum_k a_n conj(a_{n+k}) c_k``.

    ``real_form`` is ``2pi c_0 sum|a_n|^2 + 4pi sum_{k>=1} c_k Re(a_n conj(a_{n+k}))``,
    equal to the coefficient sum when P is real and symmetric.  ``scale`` is
    ``2pi sum r_n^2 sum |c_k|``, the natural size for tolerance statements.
    """
    a = series.coeffs
    M = P.degree
    coeff = 0j
    for k in range(-M, M + 1):
        coeff += _lag_products(a, k) * P.coefficient(k)
    coeff *= TWO_PI
    energy = float(np.sum(np.abs(a) ** 2))
    real = TWO_PI * P.coefficient(0).real * energy
    for k in range(1, M + 1):
        real += 2 * TWO_PI * P.coefficient(k).real * _lag_products(a, k).real

    if points is None:
        points = 4 * (len(series) + M + 1)

    def integrand(t):
        return np.abs(evaluate(series, t)) ** 2 * evaluate(P, t).real

    integral = quadrature(integrand, -math.pi, math.pi, points)
    scale = TWO_PI * energy * P.abs_coeff_sum()
    return QuadraticForm(integral, float(coeff.real), float(real), scale)


# -- the concentration constant ----------------------------------------------

def constructed_constant(N: int, grid_points: Optional[int] = None) -> ConstantEstimate:
    """``C(N) = 1 + max_arc P / min_complement(-P)`` from a negativity certificate.

    ``max_arc P = P(0) = sum c_k`` because the coefficients are nonnegative;
    the complement minimum is the certified lower bound, so C is valid, not
    merely an estimate.
    """
    cert = certify_negativity(N, grid_points)
    if not cert.certified:
        raise CertificationError(f"negativity of P could not be certified for N={N}")
    if cert.vacuous:
        return ConstantEstimate(N, 1.0, CONSTRUCTED, {"vacuous": True, "certificate": cert.to_dict()})
    P = claim_poly(N)
    top = float(np.sum(P.coeffs.real))
    value = 1.0 + top / cert.certified_lower_bound
    details = {
        "vacuous": False,
        "max_P_arc": top,
        "min_neg_P_complement": cert.certified_lower_bound,
        "grid_min_neg_P": cert.margin,
        "certificate": cert.to_dict(),
    }
    return ConstantEstimate(N, value, CONSTRUCTED, details)


@dataclass
class GrowthFit:
    Ns: list
    constants: list
    slope: float
    intercept: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "GrowthFit":
        return cls(**d)


def constant_growth(Ns: Sequence[int]) -> GrowthFit:
    """Least-squares fit of ``log C(N)`` against ``log N``."""
    Ns = [int(n) for n in Ns]
    Cs = [constructed_constant(n).value for n in Ns]
    slope, intercept = np.polyfit(np.log(Ns), np.log(Cs), 1)
    return GrowthFit(Ns, Cs, float(slope), float(intercept))


@dataclass
class CorollaryCheck:
    N: int
    C: float
    tau: float
    lhs: float
    arc_mass: float
    rhs: float
    holds: bool

    @property
    def relative_slack(self) -> float:
        return (self.rhs - self.lhs) / max(self.lhs, np.finfo(float).tiny)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CorollaryCheck":
        return cls(**d)


def padded_for_windows(series: CoeffSeq, N: int) -> CoeffSeq:
    """Append zeros so at least one full window exists; stored zeros are unconstrained."""
    if len(series) >= N:
        return series
    return CoeffSeq(np.pad(series.coeffs, (0, N - len(series))), series.offset)


def require_good(series: CoeffSeq, N: int, alpha: float = QUARTER):
    report = is_n_good(padded_for_windows(series, N), N, alpha)
    if not report.verdict:
        raise HypothesisError(
            f"series is not {N}-good: window starting at n={report.first_failure} "
            f"does not fit an arc of length {alpha:.6g}",
            "N-good",
        )
    return report


def verify_corollary(series: CoeffSeq, N: int, C: Optional[float] = None, tau: float = 0.0) -> CorollaryCheck:
    """Check ``int |F_tau|^2 <= C int_{|theta| <= 4pi/N} |F_tau|^2``.

    Refuses with :class:`HypothesisError` unless the series is N-good.
    """
    if tau < 0:
        raise ValidationError("damping must be nonnegative", "tau >= 0")
    require_good(series, N)
    if C is None:
        C = constructed_constant(N).value
    lhs = l2_norm_sq(series, tau)
    mass = arc_integral_exact(series, Arc.for_goodness(N), tau)
    rhs = C * mass
    return CorollaryCheck(int(N), float(C), float(tau), lhs, mass, float(rhs), bool(lhs <= rhs * (1 + 1e-9)))


# -- random N-good series ------------------------------------------------------

def random_good_series(rng: np.random.Generator, N: int, length: int, alpha: float = QUARTER,
                       offset: int = 0) -> CoeffSeq:
    """Random N-good series with ``|standard normal|`` moduli.

    Phases are drawn sequentially on the real line: each new phase is uniform
    over the interval keeping the current window within an arc of length
    ``alpha``, which reaches every N-good phase pattern.  The result is checked
    with :func:`is_n_good` before it is returned.
    """
    if N < 2:
        raise ValidationError("N must be at least 2", "N >= 2")
    for _ in range(100):
        phi = np.empty(length)
        phi[0] = rng.uniform(-math.pi, math.pi)
        for n in range(1, length):
            prev = phi[max(0, n - N + 1):n]
            lo, hi = prev.max() - alpha, prev.min() + alpha
            phi[n] = rng.uniform(lo, hi)
        r = np.abs(rng.standard_normal(length))
        series = CoeffSeq(r * np.exp(1j * phi), offset)
        if is_n_good(padded_for_windows(series, N), N, alpha).verdict:
            return series
    raise RuntimeError("random N-good generator failed verification")  # pragma: no cover


# -- sharp constant -------------------------------------------------------------

def arc_gram(T: int, half_width: float) -> np.ndarray:
    """Matrix of the arc integral on length-T coefficient vectors (Toeplitz)."""
    d = np.arange(T)[:, None] - np.arange(T)[None, :]
    return arc_kernel(d, half_width)


def _projected_descent(M, a, iterations, tol):
    """Minimise ``q(a) = a.Ma / a.a`` over ``a >= 0`` by projected gradient steps
    with Armijo backtracking.  Returns ``(a, q, iterations_used, converged)``."""
    a = a / np.linalg.norm(a)
    q = a @ M @ a
    eta = 1.0
    for it in range(1, iterations + 1):
        g = 2.0 * (M @ a - q * a)
        while True:
            trial = np.maximum(a - eta * g, 0.0)
            if trial.any():
                d = trial - a
                t = trial / np.linalg.norm(trial)
                qt = t @ M @ t
                if qt <= q + 1e-4 * (g @ d) or eta < 1e-14:
                    break
            eta *= 0.5
        step = np.linalg.norm(trial - a) / eta
        stalled = q - qt <= 4 * np.finfo(float).eps * q
        if qt < q:
            a, q = t, qt
        # q is only accurate to ~eps, so the gradient mapping floors near sqrt(eps)
        if step < tol or (stalled and step < math.sqrt(tol)):
            return a, q, it, True
        eta = min(eta * 2.0, 1e6)
    return a, q, iterations, False


def sharp_constant_lower_bound(N: int, T: int, iterations: int = 2000, seed: int = 0,
                               starts: int = 20, tol: float = 1e-7) -> ConstantEstimate:
    """Best ratio ``int |F|^2 / int_arc |F|^2`` over nonnegative coefficient vectors of length T.

    Nonnegative real coefficients have all phases 0, hence are N-good for
    every N, so every ratio found is a valid lower bound for the sharp
    constant.  The first start is a single spike (ratio ``N/4`` when the arc is
    shorter than the circle); the rest are random nonnegative vectors.
    """
    if int(N) != N or N < 2:
        raise ValidationError("N must be an integer >= 2", "N >= 2")
    if int(T) != T or T < 1:
        raise ValidationError("T must be a positive integer", "T >= 1")
    N, T = int(N), int(T)
    arc = Arc.for_goodness(N)
    M = arc_gram(T, arc.half_width)
    rng = np.random.default_rng(seed)
    best_q, best_a, runs = math.inf, None, []
    for s in range(max(1, starts)):
        if s == 0:
            a0 = np.zeros(T)
            a0[0] = 1.0
        else:
            a0 = np.abs(rng.standard_normal(T))
            keep = rng.random(T) < rng.uniform(0.2, 1.0)
            if keep.any():
                a0 = a0 * keep
        a, q, used, conv = _projected_descent(M, a0, iterations, tol)
        runs.append({"start": s, "iterations": int(used), "converged": bool(conv), "ratio": float(TWO_PI / q)})
        if q < best_q:
            best_q, best_a = q, a
    best_run = min(runs, key=lambda r: -r["ratio"])
    details = {
        "T": T,
        "iterations": iterations,
        "starts": len(runs),
        "seed": seed,
        "achieved_ratio": float(TWO_PI / best_q),
        "converged": bool(best_run["converged"]),
        "all_converged": all(r["converged"] for r in runs),
        "vector": [float(x) for x in best_a],
        "runs": runs,
    }
    return ConstantEstimate(N, float(TWO_PI / best_q), SHARP_LOWER_BOUND, details)


def ratio_of(coeffs, N: int) -> float:
    """``int |F|^2 / int_arc |F|^2`` for a coefficient vector starting at index 0."""
    s = CoeffSeq(coeffs)
    return l2_norm_sq(s) / arc_integral_exact(s, Arc.for_goodness(N))


# -- Poincare-type bound ---------------------------------------------------------

@dataclass
class PoincareReport:
    max_abs: float
    arc_length_bound: float
    l2_bound: float
    holds: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PoincareReport":
        return cls(**d)


def poincare_check(v: TrigPoly, grid: int = 4096, slack: float = 1e-9) -> PoincareReport:
    """Check ``max|v| <= (1/2) int |v'| <= sqrt(pi/2 int |v'|^2)`` for zero-mean v."""
    scale = max(1.0, v.abs_coeff_sum())
    if abs(v.coefficient(0)) > 1e-14 * scale:
        raise ValidationError("v must have zero mean (c_0 = 0)", "zero-mean")
    theta = -math.pi + TWO_PI * np.arange(grid) / grid
    max_abs = float(np.max(np.abs(evaluate(v, theta))))
    dv = v.derivative()
    arc_bound = 0.5 * quadrature(lambda t: np.abs(evaluate(dv, t)), -math.pi, math.pi, grid + 1)
    k = v.frequencies.astype(float)
    l2 = math.sqrt(math.pi / 2 * TWO_PI * float(np.sum(k ** 2 * np.abs(v.coeffs) ** 2)))
    holds = max_abs <= arc_bound + slack * scale and arc_bound <= l2 + slack * scale
    return PoincareReport(max_abs, arc_bound, l2, bool(holds))


def random_zero_mean_poly(rng: np.random.Generator, degree: int) -> TrigPoly:
    """Random complex trigonometric polynomial of the given degree with ``c_0 = 0``."""
    if degree < 1:
        raise ValidationError("degree must be at least 1", "degree >= 1")
    c = rng.standard_normal(2 * degree + 1) + 1j * rng.standard_normal(2 * degree + 1)
    c[degree] = 0.0
    return TrigPoly(c)
