"""Singularity probe for power series on the unit circle.

Pipeline: rescale so the candidate singular point sits at z = 1, drop the
head of the series until the tail is N-good, then for a decreasing sweep of
dampings tau look at ``F_tau(theta) = f(e^{-tau + i theta})``:

* the share of its L2 mass on the arc ``|theta| <= 4pi/N`` (bounded below by
  ``1/C(N)`` for N-good input), and
* the growth of ``sup_arc |F_tau^{(l)}|^{1/l} / l``.  Bounded growth as
  tau -> 0 would make f analytic through the arc; unbounded growth is
  evidence of a singularity there.  The verdict is a heuristic.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .concentration import constructed_constant, padded_for_windows, random_good_series, require_good
from .errors import HypothesisError, TruncationError, ValidationError
from .fourier_core import Arc, CoeffSeq, arc_integral_exact, l2_norm_sq, trig_sum
from .goodness import QUARTER, tail_good_index

DEFAULT_TAUS = (0.3, 0.1, 0.03, 0.01, 0.003)
DEFAULT_ENERGY_TOL = 1e-10
DEFAULT_ORDERS = 4
ARC_GRID = 4096
#: Growth factor across the sweep that counts as singularity evidence.
EVIDENCE_FACTOR = 10.0
MAX_TERMS = 1 << 18

_TAIL_WINDOW = 16


# -- coefficient transforms -------------------------------------------------------

def _unit_powers(s: complex, n: np.ndarray) -> np.ndarray:
    """``s^n`` for ``|s| = 1`` from the argument; exact signs for ``s = +-1``."""
    if s == 1:
        return np.ones(n.size, dtype=complex)
    if s == -1:
        return np.where(n % 2 == 0, 1.0, -1.0).astype(complex)
    return np.exp(1j * math.atan2(s.imag, s.real) * n)


def rescale_to_unit(series: CoeffSeq, s: complex) -> CoeffSeq:
    """``b_n = a_n s^n``: moves a candidate singular point ``s`` to ``z = 1``."""
    s = complex(s)
    if s == 0:
        raise ValidationError("rescaling point s must be nonzero", "s != 0")
    if s == 1:
        return series
    n = series.indices
    if abs(abs(s) - 1.0) < 1e-15:
        powers = _unit_powers(s, n)
    else:
        powers = s ** n.astype(float)
    return CoeffSeq(series.coeffs * powers, series.offset)


def derivative_series(series: CoeffSeq, order: int) -> CoeffSeq:
    """Coefficients of the ``order``-th theta-derivative: ``(i n)^order a_n``."""
    if order < 0:
        raise ValidationError("derivative order must be nonnegative", "l >= 0")
    if order == 0:
        return series
    n = series.indices.astype(float)
    return CoeffSeq((1j ** order) * n ** order * series.coeffs, series.offset)


def _unstored_tail_ratio(weights: np.ndarray, indices: np.ndarray, tau: float) -> float:
    """Estimated energy beyond the stored range relative to the stored energy.

    The moduli past the end are taken flat at the largest of the last few
    stored moduli; damping then makes the tail geometric.
    """
    total = float(np.sum(weights))
    if total == 0:
        return 0.0
    q = math.exp(-2.0 * tau)
    recent = float(np.max(weights[-_TAIL_WINDOW:]))
    return recent * q / (1.0 - q) / total if q < 1 else math.inf


def damped_slice(series: CoeffSeq, tau: float, energy_tol: float = DEFAULT_ENERGY_TOL) -> CoeffSeq:
    """``a_n e^{-n tau}`` truncated where the discarded L2 tail drops below ``energy_tol``.

    The discarded tail counts the stored coefficients past the cut plus an
    estimate of the unstored ones.  Raises :class:`TruncationError`, carrying
    the smallest damping the stored range supports, when even the full range
    leaves too much energy behind.
    """
    if not tau > 0:
        raise ValidationError("damping must be positive", "tau > 0")
    if not energy_tol > 0:
        raise ValidationError("energy_tol must be positive", "energy_tol > 0")
    damped = series.damped(tau)
    w = np.abs(damped) ** 2
    total = float(np.sum(w))
    if total == 0:
        return CoeffSeq(damped[:1], series.offset)
    unstored = _unstored_tail_ratio(w, series.indices, tau)
    if unstored > energy_tol:
        raise TruncationError(
            f"stored range (last index {series.last_index}) cannot reach energy tolerance "
            f"{energy_tol:g} at tau={tau:g}",
            min_tau=_min_tau(series, energy_tol, tau),
        )
    # tail[j] = energy of coefficients j.. ; keep the shortest prefix leaving <= tol
    tail = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
    budget = (energy_tol - unstored) * total
    keep = int(np.argmax(tail <= budget))
    keep = max(keep, 1)
    return CoeffSeq(damped[:keep], series.offset)


def _min_tau(series: CoeffSeq, energy_tol: float, tau: float) -> float:
    lo, hi = tau, max(2 * tau, 1.0)
    idx = series.indices
    ratio = lambda t: _unstored_tail_ratio(np.abs(series.damped(t)) ** 2, idx, t)
    while ratio(hi) > energy_tol and hi < 1e6:
        hi *= 2
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if ratio(mid) > energy_tol:
            lo = mid
        else:
            hi = mid
    return hi


# -- builtin families ---------------------------------------------------------------

@dataclass
class SeriesFamily:
    """Named coefficient generator ``K -> a_0..a_K`` with known ground truth."""

    name: str
    generator: Callable[[int], np.ndarray]
    known_singularity: Optional[complex] = None
    default_s: complex = 1.0
    params: dict = field(default_factory=dict)

    def series(self, K: int) -> CoeffSeq:
        coeffs = np.asarray(self.generator(K), dtype=complex)
        if not np.all(np.isfinite(coeffs)):
            raise ValidationError(f"family {self.name} produced non-finite coefficients")
        return CoeffSeq(coeffs, 0)


def geometric_family(s: complex = 1.0) -> SeriesFamily:
    """``a_n = s^{-n}``: a simple pole at ``s`` on the unit circle."""
    s = complex(s)
    if abs(abs(s) - 1) > 1e-12:
        raise ValidationError("geometric family needs |s| = 1", "|s| = 1")
    return SeriesFamily("geometric", lambda K: _unit_powers(s.conjugate(), np.arange(K + 1)), s, s, {"s": [s.real, s.imag]})


def harmonic_family(p: float = 1.0, s: complex = 1.0) -> SeriesFamily:
    """``a_n = s^{-n} / (n+1)^p``: logarithmic-type singularity at ``s``."""
    s = complex(s)
    if p not in (1, 2, 1.0, 2.0):
        raise ValidationError("harmonic family uses p in {1, 2}", "p in {1, 2}")
    gen = lambda K: _unit_powers(s.conjugate(), np.arange(K + 1)) / (np.arange(K + 1) + 1.0) ** p
    return SeriesFamily("harmonic", gen, s, s, {"p": float(p), "s": [s.real, s.imag]})


def subdisc_family(rho0: float = 0.5) -> SeriesFamily:
    """``a_n = rho0^n``: analytic on a disc of radius ``1/rho0 > 1`` (negative control)."""
    if not 0 < rho0 < 1:
        raise ValidationError("subdisc family needs 0 < rho0 < 1", "0 < rho0 < 1")
    return SeriesFamily("subdisc", lambda K: rho0 ** np.arange(K + 1, dtype=float), None, 1.0, {"rho0": rho0})


def random_quarter_family(N: int = 8, seed: int = 0) -> SeriesFamily:
    """Random N-good coefficients with ``|normal|`` moduli."""
    gen = lambda K: random_good_series(np.random.default_rng(seed), N, K + 1).coeffs
    return SeriesFamily("random", gen, None, 1.0, {"N": N, "seed": seed})


FAMILIES = {
    "geometric": geometric_family,
    "harmonic": harmonic_family,
    "subdisc": subdisc_family,
    "random": random_quarter_family,
}


# -- reports ---------------------------------------------------------------------

@dataclass
class ConcentrationReport:
    """Per-tau arc mass ratio and derivative growth of ``F_tau``.

    ``derivative_growth[i][l-1]`` is ``(sup_arc |F_tau^{(l)}|)^{1/l} / l`` at
    ``taus[i]``; ``growth_ratio[l-1]`` compares the last tau to the first.
    """

    N: int
    taus: List[float]
    mass_ratio: List[float]
    C_used: float
    lower_bound: float
    arc_sup: List[float]
    derivative_growth: List[List[float]]
    growth_ratio: List[float]
    slice_lengths: List[int]
    evidence: bool
    verdict_kind: str = "heuristic"
    evidence_factor: float = EVIDENCE_FACTOR

    @property
    def orders(self) -> int:
        return len(self.growth_ratio)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ConcentrationReport":
        return cls(**d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "rho"] + [f"growth_l{l}" for l in range(1, self.orders + 1)])
        for tau, rho, g in zip(self.taus, self.mass_ratio, self.derivative_growth):
            w.writerow([repr(tau), repr(rho)] + [repr(x) for x in g])
        return buf.getvalue()


def _check_taus(taus):
    taus = [float(t) for t in taus]
    if not taus:
        raise ValidationError("at least one tau is required", "taus nonempty")
    if any(t <= 0 for t in taus):
        raise ValidationError("taus must be positive", "tau > 0")
    if any(b >= a for a, b in zip(taus, taus[1:])):
        raise ValidationError("taus must be strictly descending", "taus descending")
    return taus


def _log_sups(indices, columns, theta) -> np.ndarray:
    """``log sup_theta |sum_n c_n e^{i n theta}|`` for each column of ``columns``.

    Columns are normalised by their largest modulus first, so high derivative
    orders never overflow.
    """
    scale = np.max(np.abs(columns), axis=0)
    safe = np.where(scale > 0, scale, 1.0)
    vals = trig_sum(indices, columns / safe, theta)
    with np.errstate(divide="ignore"):
        return np.where(scale > 0, np.log(safe) + np.log(np.max(np.abs(vals), axis=0)), -np.inf)


def arc_grid(N: int, intervals: int = ARC_GRID) -> np.ndarray:
    """Uniform grid of ``[-4pi/N, 4pi/N]`` with ``intervals`` cells (includes 0)."""
    beta = Arc.for_goodness(N).half_width
    return np.linspace(-beta, beta, intervals + 1)


def concentration_sweep(series: CoeffSeq, N: int, taus: Sequence[float] = DEFAULT_TAUS,
                        L: int = DEFAULT_ORDERS, energy_tol: float = DEFAULT_ENERGY_TOL,
                        grid: int = ARC_GRID) -> ConcentrationReport:
    """Mass ratio and derivative growth of ``F_tau`` on the arc, for each tau.

    The series must already be N-good (refused otherwise).  Each slice is
    truncated by the energy of the order-``L`` derivative, the most demanding
    series in the sweep.
    """
    taus = _check_taus(taus)
    if L < 1:
        raise ValidationError("at least one derivative order is required", "L >= 1")
    require_good(series, N)
    C = constructed_constant(N).value
    arc = Arc.for_goodness(N)
    theta = arc_grid(N, grid)
    top = derivative_series(series, L)
    rho, sups, growth, lengths = [], [], [], []
    for tau in taus:
        K = len(damped_slice(top, tau, energy_tol))
        base = damped_slice(series, tau, energy_tol)
        K = max(K, len(base))
        sl = CoeffSeq(series.damped(tau)[:K], series.offset)
        total = l2_norm_sq(sl)
        rho.append(arc_integral_exact(sl, arc) / total if total > 0 else 0.0)
        n = sl.indices.astype(float)
        cols = np.stack([(1j ** l) * n ** l * sl.coeffs for l in range(L + 1)], axis=1)
        logs = _log_sups(sl.indices, cols, theta)
        sups.append(float(math.exp(logs[0])))
        row = [float(math.exp(logs[l] / l) / l) if logs[l] > -math.inf else 0.0 for l in range(1, L + 1)]
        growth.append(row)
        lengths.append(K)
    first, last = growth[0], growth[-1]
    ratio = [(b / a) if a > 0 else (math.inf if b > 0 else 1.0) for a, b in zip(first, last)]
    evidence = any(r >= EVIDENCE_FACTOR for r in ratio)
    return ConcentrationReport(N, taus, rho, C, 1.0 / C, sups, growth, ratio, lengths, bool(evidence))


@dataclass
class ProbeReport:
    """Full probe outcome in the original coordinates."""

    source: str
    s: List[float]
    tail_index: int
    stored_terms: int
    concentration: ConcentrationReport
    singularity_evidence_at: Optional[List[float]]
    known_singularity: Optional[List[float]] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["concentration"] = self.concentration.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProbeReport":
        d = dict(d)
        d["concentration"] = ConcentrationReport.from_dict(d["concentration"])
        return cls(**d)


def _pair(z) -> Optional[List[float]]:
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


def probe(series: CoeffSeq, N: int, s: complex = 1.0, taus: Sequence[float] = DEFAULT_TAUS,
          L: int = DEFAULT_ORDERS, energy_tol: float = DEFAULT_ENERGY_TOL,
          source: str = "input", known_singularity=None) -> ProbeReport:
    """Rescale by ``s``, trim to the N-good tail and run :func:`concentration_sweep`."""
    unit = rescale_to_unit(series, s)
    m = tail_good_index(padded_for_windows(unit, N), N, QUARTER)
    if m is None:
        raise HypothesisError(f"no N-good tail for N={N} within the stored range", "N-good tail")
    rep = concentration_sweep(unit.tail(m), N, taus, L, energy_tol)
    return ProbeReport(source, _pair(s), m, len(series), rep,
                       _pair(s) if rep.evidence else None, _pair(known_singularity))


def family_series(family: SeriesFamily, taus: Sequence[float] = DEFAULT_TAUS, L: int = DEFAULT_ORDERS,
                  energy_tol: float = DEFAULT_ENERGY_TOL, start: int = 1024) -> CoeffSeq:
    """Generate enough terms of ``family`` for the smallest tau of the sweep."""
    tau = min(_check_taus(taus))
    K = start
    while True:
        series = family.series(K)
        unit = rescale_to_unit(series, family.default_s)
        try:
            damped_slice(derivative_series(unit, L), tau, energy_tol)
            return series
        except TruncationError:
            if K >= MAX_TERMS:
                raise
            K *= 2


def probe_family(family: SeriesFamily, N: int, taus: Sequence[float] = DEFAULT_TAUS,
                 L: int = DEFAULT_ORDERS, energy_tol: float = DEFAULT_ENERGY_TOL,
                 s: Optional[complex] = None) -> ProbeReport:
    s = family.default_s if s is None else s
    series = family_series(family, taus, L, energy_tol)
    return probe(series, N, s, taus, L, energy_tol, source=f"family:{family.name}",
                 known_singularity=family.known_singularity)
