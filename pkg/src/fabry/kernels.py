"""Fejer kernels, the shifted sum G_N and the sign-certified polynomial P.

``P = G_N - G_{floor(N/4)}`` (or ``cos`` for ``N <= 7``) has symmetric
nonnegative coefficients, degree at most ``N - 1`` and is strictly negative
for ``4 pi / N <= |theta| <= pi``.  :func:`certify_negativity` proves the sign
claim for a given N from finitely many evaluations.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .fourier_core import TrigPoly, evaluate

#: Distance from a removable singularity below which closed forms defer to
#: the coefficient sum.
SINGULAR_GUARD = 1e-6


def _check_N(N, least):
    if int(N) != N or N < least:
        raise ValidationError(f"N must be an integer >= {least}, got {N}", f"N >= {least}")
    return int(N)


def _near_multiple_of_pi(x):
    """Distance from ``x`` to the nearest multiple of pi."""
    return np.abs(x - math.pi * np.round(x / math.pi))


def fejer(N: int) -> TrigPoly:
    """Fejer kernel with coefficients ``1 - |k|/N``, ``|k| < N``."""
    N = _check_N(N, 1)
    k = np.arange(N)
    return TrigPoly.from_symmetric(1.0 - k / N)


def fejer_closed(N: int, theta) -> np.ndarray:
    """``(1/N) (sin(N theta/2) / sin(theta/2))^2``, with the limit ``N`` at theta in 2 pi Z."""
    N = _check_N(N, 1)
    theta = np.asarray(theta, dtype=float)
    half = theta / 2
    near = _near_multiple_of_pi(half) < SINGULAR_GUARD / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (np.sin(N * half) / np.sin(half)) ** 2 / N
    if np.any(near):
        exact = evaluate(fejer(N), np.atleast_1d(theta)).real.reshape(theta.shape)
        val = np.where(near, exact, val)
    return val


def g_kernel(N: int) -> TrigPoly:
    """``G_N(theta) = F_N(theta + pi/2N) + F_N(theta - pi/2N)``.

    Coefficients ``(2 - 2|k|/N) cos(k pi / 2N)``.
    """
    N = _check_N(N, 1)
    k = np.arange(N)
    return TrigPoly.from_symmetric((2.0 - 2.0 * k / N) * np.cos(k * math.pi / (2 * N)))


def g_closed(N: int, theta) -> np.ndarray:
    """Closed form of :func:`g_kernel` as a sum of two squared sine quotients."""
    N = _check_N(N, 1)
    theta = np.asarray(theta, dtype=float)
    shift = math.pi / (4 * N)
    lo = theta / 2 - shift
    hi = theta / 2 + shift
    near = (_near_multiple_of_pi(lo) < SINGULAR_GUARD) | (_near_multiple_of_pi(hi) < SINGULAR_GUARD)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (
            (np.sin(N * theta / 2 - math.pi / 4) / np.sin(lo)) ** 2
            + (np.sin(N * theta / 2 + math.pi / 4) / np.sin(hi)) ** 2
        ) / N
    if np.any(near):
        exact = evaluate(g_kernel(N), np.atleast_1d(theta)).real.reshape(theta.shape)
        val = np.where(near, exact, val)
    return val


def g_sandwich(N: int, theta):
    """Lower and upper envelopes ``(A_N, B_N)`` of ``G_N``.

    ``A_N = 1 / (N max(|sin(theta/2 -+ pi/4N)|)^2)`` and ``B_N`` the same with min.
    """
    N = _check_N(N, 1)
    theta = np.asarray(theta, dtype=float)
    shift = math.pi / (4 * N)
    s1 = np.abs(np.sin(theta / 2 - shift))
    s2 = np.abs(np.sin(theta / 2 + shift))
    with np.errstate(divide="ignore"):
        return 1.0 / (N * np.maximum(s1, s2) ** 2), 1.0 / (N * np.minimum(s1, s2) ** 2)


def claim_poly(N: int) -> TrigPoly:
    """The polynomial P: ``cos theta`` for ``2 <= N <= 7``, else ``G_N - G_{floor(N/4)}``."""
    N = _check_N(N, 2)
    if N <= 7:
        return TrigPoly.cosine()
    return g_kernel(N) - g_kernel(N // 4)


def claim_poly_closed(N: int, theta) -> np.ndarray:
    N = _check_N(N, 2)
    theta = np.asarray(theta, dtype=float)
    if N <= 7:
        return np.cos(theta)
    return g_closed(N, theta) - g_closed(N // 4, theta)


@dataclass
class NegativityCertificate:
    """Proof data for ``P < 0`` on ``4 pi/N <= |theta| <= pi``.

    The first-order test bounds ``|P'|`` by ``deg P * sup|P|`` (Bernstein) and
    asks ``margin > (h/2) * bernstein_bound`` on the uniform grid.  The
    second-order test bounds ``|P''| <= sum k^2 |c_k|`` and uses
    ``P <= max(P(a), P(b)) + curvature_bound (b - a)^2 / 8`` on each cell,
    bisecting cells that fail.  Either passing certifies the claim; the
    region ``[-pi, -4pi/N]`` follows from ``P(-theta) = P(theta)``.
    """

    N: int
    grid_points: int
    grid_step: float
    region: Optional[list]
    vacuous: bool
    margin: Optional[float]
    sup_bound: float
    bernstein_bound: float
    curvature_bound: float
    first_order_certified: bool
    second_order_certified: bool
    refined_points: int
    certified_lower_bound: Optional[float]
    certified: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NegativityCertificate":
        return cls(**d)


def _refine(f, a, b, fa, fb, curvature, tightness, max_depth):
    """Bisect cells until every cell upper bound is below ``-(1 - tightness)`` times
    the smaller endpoint magnitude.  Returns ``(ok, lower_bound_of_-P, evaluations, min_-P)``."""
    extra = 0
    min_neg = float(np.min(-np.concatenate([fa, fb])))
    lower = math.inf
    for _ in range(max_depth + 1):
        h = b - a
        slack = curvature * h * h / 8.0
        top = np.maximum(fa, fb)
        ok = (top < 0) & (slack <= tightness * (-top))
        if np.any(ok):
            lower = min(lower, float(np.min(-(top[ok] + slack[ok]))))
        if np.all(ok):
            return True, lower, extra, min_neg
        a, b, fa, fb = a[~ok], b[~ok], fa[~ok], fb[~ok]
        if np.any(np.maximum(fa, fb) >= 0):
            return False, None, extra, min(min_neg, float(np.min(-np.maximum(fa, fb))))
        m = (a + b) / 2
        fm = f(m)
        extra += m.size
        min_neg = min(min_neg, float(np.min(-fm)))
        a, b, fa, fb = np.concatenate([a, m]), np.concatenate([m, b]), np.concatenate([fa, fm]), np.concatenate([fm, fb])
    return False, None, extra, min_neg


def certify_negativity(N: int, grid_points: Optional[int] = None, *, tightness: float = 0.01,
                       max_depth: int = 30) -> NegativityCertificate:
    """Certify ``P(theta) < 0`` for ``4 pi / N <= |theta| <= pi``.

    ``grid_points`` defaults to ``64 N`` and must be at least ``16 N``.  The
    returned certificate has ``certified = False`` when neither test passes.
    """
    N = _check_N(N, 2)
    if grid_points is None:
        grid_points = 64 * N
    if grid_points < 16 * N:
        raise ValidationError(f"grid_points must be >= 16 N = {16 * N}", "grid_points >= 16 N")
    P = claim_poly(N)
    deg = P.effective_degree
    sup = P.abs_coeff_sum()  # |P| <= sum |c_k|, attained at 0 when c_k >= 0
    bern = deg * sup
    curv = float(np.sum(P.frequencies.astype(float) ** 2 * np.abs(P.coeffs)))
    beta = 4.0 * math.pi / N
    if beta >= math.pi:
        return NegativityCertificate(N, grid_points, 0.0, None, True, None, sup, bern, curv,
                                     True, True, 0, None, True)

    def f(t):
        return claim_poly_closed(N, t)

    theta = np.linspace(beta, math.pi, grid_points)
    h = float(theta[1] - theta[0])
    vals = f(theta)
    margin = float(np.min(-vals))
    first = margin - 0.5 * h * bern > 0
    second, lower, extra, min_neg = _refine(f, theta[:-1], theta[1:], vals[:-1], vals[1:],
                                            curv, tightness, max_depth)
    if first:
        lower = max(lower or -math.inf, margin - 0.5 * h * bern)
    return NegativityCertificate(
        N=N,
        grid_points=grid_points,
        grid_step=h,
        region=[beta, math.pi],
        vacuous=False,
        margin=min(margin, min_neg),
        sup_bound=sup,
        bernstein_bound=bern,
        curvature_bound=curv,
        first_order_certified=bool(first),
        second_order_certified=bool(second),
        refined_points=int(extra),
        certified_lower_bound=lower if (first or second) else None,
        certified=bool(first or second),
    )


@dataclass
class DenominatorCheck:
    """Grid replay of ``C_N(theta) > D_N(theta)`` on ``[4 pi/N, pi]``."""

    N: int
    grid_points: int
    holds: bool
    min_slack: float
    argmin_theta: float
    chain_holds: bool
    chain_min_slack: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DenominatorCheck":
        return cls(**d)


def denominator_inequality_check(N: int, grid_points: int = 10_000) -> DenominatorCheck:
    """Check ``2 min(sin(theta/2 -+ pi/4N)) > max(sin(theta/2 -+ pi/4M))``, ``M = floor(N/4)``.

    On ``[4 pi/N, pi/2]`` it also replays the chain
    ``2 sin(x) >= 2 sin(x) cos(x) = sin(theta - pi/2N) > sin(theta/2 + pi/4M)``
    with ``x = theta/2 - pi/4N``.
    """
    N = _check_N(N, 8)
    M = N // 4
    theta = np.linspace(4.0 * math.pi / N, math.pi, int(grid_points))
    a = math.pi / (4 * N)
    b = math.pi / (4 * M)
    C = 2.0 * np.minimum(np.sin(theta / 2 - a), np.sin(theta / 2 + a))
    D = np.maximum(np.sin(theta / 2 - b), np.sin(theta / 2 + b))
    slack = C - D
    j = int(np.argmin(slack))

    low = theta <= math.pi / 2
    x = theta[low] / 2 - a
    double_angle = 2 * np.sin(x) * np.cos(x)
    chain = np.concatenate([
        2 * np.sin(x) - double_angle,          # cos(x) <= 1
        np.sin(theta[low] - 2 * a) - np.sin(theta[low] / 2 + b),
    ])
    identity_err = float(np.max(np.abs(double_angle - np.sin(theta[low] - 2 * a)), initial=0.0))
    chain_slack = float(np.min(chain, initial=math.inf))
    chain_ok = bool(np.all(chain[: x.size] >= -1e-15) and np.all(chain[x.size:] > 0) and identity_err < 1e-12)
    return DenominatorCheck(N, int(grid_points), bool(slack[j] > 0), float(slack[j]), float(theta[j]),
                            chain_ok, chain_slack)
