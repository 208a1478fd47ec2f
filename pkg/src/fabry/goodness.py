"""N-goodness of coefficient sequences.

A sequence is N-good (for an arc length ``alpha``, by default pi/2) when the
phases of every N consecutive coefficients fit in some closed arc
``[Phi_n, Phi_n + alpha]`` modulo 2 pi.  Zero coefficients impose no
constraint.  A window fits exactly when the largest circular gap between its
sorted phases is at least ``2 pi - alpha``; the witness ``Phi_n`` is the phase
just after that gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import InsufficientDataError, ValidationError
from .fourier_core import TWO_PI, CoeffSeq

QUARTER = math.pi / 2
#: Phases this close to an arc end count as inside (closed arcs).
ENDPOINT_TOL = 1e-12

_ROW_BUDGET = 1 << 21


def _check_alpha(alpha, upper=TWO_PI):
    if not (0.0 < alpha < upper):
        raise ValidationError(f"alpha must lie in (0, {upper:.6g}), got {alpha}", "0 < alpha")


def _fit_rows(windows: np.ndarray, alpha: float):
    """Gap criterion applied to each row of ``windows`` (NaN = unconstrained).

    Returns ``(fits, phi)``; ``phi`` is the witness start for fitting rows and
    NaN for the others.
    """
    p = np.sort(np.mod(windows, TWO_PI), axis=1)  # NaN sorts last
    count = np.sum(~np.isnan(p), axis=1)
    rows = np.arange(p.shape[0])
    first = p[:, 0]
    last = p[rows, np.maximum(count - 1, 0)]
    wrap = TWO_PI - (last - first)
    if p.shape[1] > 1:
        inner = np.diff(p, axis=1)
        inner = np.where(np.isnan(inner), -np.inf, inner)
        j = np.argmax(inner, axis=1)
        inner_max = inner[rows, j]
        after_inner = p[rows, j + 1]
    else:
        inner_max = np.full(p.shape[0], -np.inf)
        after_inner = first
    use_wrap = wrap >= inner_max
    gap = np.where(use_wrap, wrap, inner_max)
    phi = np.where(use_wrap, first, after_inner)
    fits = gap >= TWO_PI - alpha - ENDPOINT_TOL
    empty = count == 0
    fits = fits | empty
    phi = np.where(empty, 0.0, np.where(fits, phi, np.nan))
    return fits, phi


def window_fits(phases, alpha: float = QUARTER) -> Optional[float]:
    """Witness ``Phi`` with every phase in ``[Phi, Phi + alpha]`` mod 2 pi, or None.

    NaN entries are treated as unconstrained and ignored.
    """
    _check_alpha(alpha)
    row = np.asarray(phases, dtype=float).reshape(1, -1)
    if row.size == 0:
        return 0.0
    fits, phi = _fit_rows(row, alpha)
    return float(phi[0]) if fits[0] else None


def phase_in_arc(phase: float, start: float, alpha: float, tol: float = ENDPOINT_TOL) -> bool:
    """Whether ``phase`` lies in ``[start, start + alpha]`` modulo 2 pi."""
    offset = math.fmod(phase - start, TWO_PI)
    if offset < 0:
        offset += TWO_PI
    return offset <= alpha + tol or offset >= TWO_PI - tol


def _sliding_fits(phases: np.ndarray, N: int, alpha: float):
    windows = np.lib.stride_tricks.sliding_window_view(phases, N)
    count = windows.shape[0]
    fits = np.empty(count, dtype=bool)
    phi = np.empty(count)
    step = max(1, _ROW_BUDGET // N)
    for lo in range(0, count, step):
        fits[lo:lo + step], phi[lo:lo + step] = _fit_rows(windows[lo:lo + step], alpha)
    return fits, phi


@dataclass
class GoodnessReport:
    """Outcome of an (N, alpha)-goodness check over a stored index range.

    ``witnesses`` lists ``(n, Phi_n)`` for every checked window when the verdict
    is true.  On failure ``first_failure`` is the first offending window start
    and ``failure_phases`` its constrained phases.
    """

    N: int
    alpha: float
    verdict: bool
    checked_range: Tuple[int, int]
    witnesses: List[Tuple[int, float]] = field(default_factory=list)
    first_failure: Optional[int] = None
    failure_phases: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "alpha": self.alpha,
            "verdict": self.verdict,
            "checked_range": list(self.checked_range),
            "witnesses": [[int(n), float(p)] for n, p in self.witnesses],
            "first_failure": self.first_failure,
            "failure_phases": [float(p) for p in self.failure_phases],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GoodnessReport":
        return cls(
            N=int(d["N"]),
            alpha=float(d["alpha"]),
            verdict=bool(d["verdict"]),
            checked_range=tuple(d["checked_range"]),
            witnesses=[(int(n), float(p)) for n, p in d["witnesses"]],
            first_failure=d["first_failure"],
            failure_phases=[float(p) for p in d["failure_phases"]],
        )


def _validate(series: CoeffSeq, N: int, alpha: float, from_index: Optional[int]):
    if N < 2:
        raise ValidationError(f"N must be at least 2, got {N}", "N >= 2")
    _check_alpha(alpha, math.pi)
    start = series.offset if from_index is None else int(from_index)
    if start < series.offset:
        raise ValidationError("from_index precedes the stored range", "from_index >= offset")
    if series.last_index - start + 1 < N:
        raise InsufficientDataError(
            f"insufficient data: need {N} coefficients from index {start}, "
            f"have {max(0, series.last_index - start + 1)}"
        )
    return start


def window_verdicts(series: CoeffSeq, N: int, alpha: float = QUARTER, from_index=None):
    """Per-window ``(starts, fits, phi)`` for all fully stored windows from ``from_index``."""
    start = _validate(series, N, alpha, from_index)
    phases = series.phases[start - series.offset:]
    fits, phi = _sliding_fits(phases, N, alpha)
    return start + np.arange(fits.size), fits, phi


def is_n_good(series: CoeffSeq, N: int, alpha: float = QUARTER, from_index=None) -> GoodnessReport:
    """Check every length-N window of stored indices starting at ``from_index``."""
    starts, fits, phi = window_verdicts(series, N, alpha, from_index)
    checked = (int(starts[0]), int(starts[-1]) + N - 1)
    if fits.all():
        witnesses = list(zip(starts.tolist(), phi.tolist()))
        return GoodnessReport(N, alpha, True, checked, witnesses)
    bad = int(starts[np.argmin(fits)])
    window = series.phases[bad - series.offset: bad - series.offset + N]
    constrained = [float(p) for p in window if not math.isnan(p)]
    return GoodnessReport(N, alpha, False, checked, [], bad, constrained)


def tail_good_index(series: CoeffSeq, N: int, alpha: float = QUARTER) -> Optional[int]:
    """Smallest ``m`` whose tail ``sum_{n >= m} a_n z^n`` is N-good on the stored data."""
    starts, fits, _ = window_verdicts(series, N, alpha)
    failed = np.nonzero(~fits)[0]
    if failed.size == 0:
        return int(starts[0])
    last_bad = int(failed[-1])
    if last_bad == fits.size - 1:
        return None
    return int(starts[last_bad + 1])


@dataclass
class QuotientDrift:
    """Consecutive quotients ``a_n / a_{n+1}`` and the best tail goodness order."""

    indices: List[int]
    ratio_modulus: List[float]
    ratio_phase: List[float]
    skipped: List[int]
    max_good_N: Optional[int]
    max_good_tail_index: Optional[int]
    alpha: float = QUARTER

    @property
    def last_ratio(self) -> Optional[complex]:
        if not self.indices:
            return None
        return self.ratio_modulus[-1] * complex(math.cos(self.ratio_phase[-1]), math.sin(self.ratio_phase[-1]))

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "ratio_modulus": list(self.ratio_modulus),
            "ratio_phase": list(self.ratio_phase),
            "skipped": list(self.skipped),
            "max_good_N": self.max_good_N,
            "max_good_tail_index": self.max_good_tail_index,
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuotientDrift":
        return cls(**d)


def quotient_phase_drift(series: CoeffSeq, alpha: float = QUARTER) -> QuotientDrift:
    """Report ``arg`` and modulus of ``a_n / a_{n+1}``, plus the largest N for
    which some stored tail is N-good (bisection; goodness is monotone in N)."""
    a = series.coeffs
    idx, mods, phs, skipped = [], [], [], []
    for j in range(len(a) - 1):
        n = series.offset + j
        if a[j] == 0 or a[j + 1] == 0:
            skipped.append(n)
            continue
        q = a[j] / a[j + 1]
        idx.append(n)
        mods.append(float(abs(q)))
        phs.append(float(np.angle(q)))

    best_N, best_m = None, None
    if len(series) >= 2:
        lo, hi = 1, len(series)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid >= 2 and tail_good_index(series, mid, alpha) is not None:
                lo = mid
            else:
                hi = mid - 1
        if lo >= 2:
            best_N, best_m = lo, tail_good_index(series, lo, alpha)
    return QuotientDrift(idx, mods, phs, skipped, best_N, best_m, alpha)
