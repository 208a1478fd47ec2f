"""Coefficient sequences, trigonometric polynomials and integrals on the circle.

Everything here works on finite truncations: coefficients that are not
stored are exactly zero, so Parseval-type formulas are exact rather than
approximate.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi

#: Phase marker for a zero coefficient, whose phase may be chosen freely.
UNCONSTRAINED = float("nan")

# Upper bound on the number of complex entries built at once in grid sums.
_CHUNK_ENTRIES = 1 << 22


def _canonical_phase(z):
    phi = np.angle(z)
    # np.angle(-1-0j) is -pi; keep phases in (-pi, pi].
    return np.where(phi <= -math.pi, math.pi, phi)


@dataclass(frozen=True, eq=False)
class CoeffSeq:
    """Finite truncation of a Fourier or Taylor series.

    ``coeffs[j]`` is the coefficient of index ``offset + j``.
    """

    coeffs: np.ndarray
    offset: int = 0

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValidationError("coefficients must be finite", "finite-coefficients")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "offset", int(self.offset))

    def __len__(self):
        return self.coeffs.size

    def __repr__(self):
        return f"CoeffSeq(offset={self.offset}, len={len(self)})"

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self))

    @property
    def last_index(self) -> int:
        return self.offset + len(self) - 1

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.coeffs)

    @property
    def phases(self) -> np.ndarray:
        """Phases in (-pi, pi]; ``UNCONSTRAINED`` (NaN) where the coefficient is 0."""
        phi = _canonical_phase(self.coeffs)
        return np.where(self.coeffs == 0, UNCONSTRAINED, phi)

    def coefficient(self, n: int) -> complex:
        j = n - self.offset
        if 0 <= j < len(self):
            return complex(self.coeffs[j])
        return 0j

    def tail(self, m: int) -> "CoeffSeq":
        """The series with every coefficient of index below ``m`` dropped."""
        j = max(0, m - self.offset)
        return CoeffSeq(self.coeffs[j:], self.offset + j)

    def truncate(self, count: int) -> "CoeffSeq":
        return CoeffSeq(self.coeffs[:count], self.offset)

    def damped(self, tau: float) -> np.ndarray:
        """Coefficients ``a_n exp(-n tau)``."""
        if tau == 0:
            return self.coeffs.copy()
        return self.coeffs * np.exp(-tau * self.indices.astype(float))

    def allclose(self, other: "CoeffSeq", rtol=1e-12, atol=0.0) -> bool:
        return (
            self.offset == other.offset
            and len(self) == len(other)
            and bool(np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol))
        )


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Trigonometric polynomial ``sum_{k=-M}^{M} c_k e^{ik theta}``.

    ``coeffs`` has length ``2M+1`` with ``coeffs[M]`` the constant term.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex).ravel()
        if arr.size % 2 != 1:
            raise ValidationError("TrigPoly needs an odd number of coefficients")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_symmetric(cls, half) -> "TrigPoly":
        """Build from ``c_0, c_1, ..., c_M`` with ``c_{-k} = c_k``."""
        half = np.asarray(half, dtype=complex).ravel()
        return cls(np.concatenate([half[:0:-1], half]))

    @classmethod
    def cosine(cls) -> "TrigPoly":
        return cls.from_symmetric([0.0, 0.5])

    @property
    def degree(self) -> int:
        """Storage degree M."""
        return (self.coeffs.size - 1) // 2

    @property
    def effective_degree(self) -> int:
        nz = np.nonzero(self.coeffs)[0]
        if nz.size == 0:
            return 0
        return int(np.max(np.abs(nz - self.degree)))

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0j
        return complex(self.coeffs[k + self.degree])

    def half(self) -> np.ndarray:
        """Coefficients ``c_0..c_M``."""
        return self.coeffs[self.degree:].copy()

    def padded(self, degree: int) -> "TrigPoly":
        if degree < self.degree:
            raise ValidationError("cannot pad to a smaller degree")
        extra = degree - self.degree
        return TrigPoly(np.pad(self.coeffs, extra))

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        m = max(self.degree, other.degree)
        return TrigPoly(self.padded(m).coeffs + other.padded(m).coeffs)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        m = max(self.degree, other.degree)
        return TrigPoly(self.padded(m).coeffs - other.padded(m).coeffs)

    def __mul__(self, scalar) -> "TrigPoly":
        return TrigPoly(self.coeffs * scalar)

    __rmul__ = __mul__

    def derivative(self) -> "TrigPoly":
        return TrigPoly(1j * self.frequencies * self.coeffs)

    def is_real_valued(self, tol=1e-14) -> bool:
        c = self.coeffs
        return bool(np.all(np.abs(c - np.conj(c[::-1])) <= tol))

    def is_symmetric_nonnegative(self, tol=1e-14) -> bool:
        """``c_k = c_{-k} >= 0`` with imaginary parts below ``tol``."""
        c = self.coeffs
        return bool(
            np.all(np.abs(c.imag) <= tol)
            and np.all(c.real >= -tol)
            and np.all(np.abs(c - c[::-1]) <= tol)
        )

    def abs_coeff_sum(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def __call__(self, theta):
        return evaluate(self, theta)


@dataclass(frozen=True)
class Arc:
    """The closed arc ``{theta : |theta| <= half_width}``."""

    half_width: float

    def __post_init__(self):
        if not (0.0 < self.half_width <= math.pi):
            raise ValidationError(
                f"arc half-width must lie in (0, pi], got {self.half_width}", "0 < beta <= pi"
            )

    @classmethod
    def for_goodness(cls, N: int) -> "Arc":
        """The arc of half-width ``4 pi / N``, clipped to the full circle."""
        return cls(min(4.0 * math.pi / N, math.pi))


Series = Union[CoeffSeq, TrigPoly]


def trig_sum(indices, weights, theta) -> np.ndarray:
    """``sum_n weights[n] e^{i n theta}`` at every ``theta``.

    ``weights`` may be 2-D, one column per coefficient vector; the result then
    has shape ``(len(theta), ncols)``.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    indices = np.asarray(indices, dtype=float)
    w = np.asarray(weights, dtype=complex)
    flat = w.ndim == 1
    if flat:
        w = w[:, None]
    out = np.empty((theta.size, w.shape[1]), dtype=complex)
    step = max(1, _CHUNK_ENTRIES // max(1, indices.size))
    for lo in range(0, theta.size, step):
        block = np.exp(1j * np.outer(theta[lo:lo + step], indices))
        out[lo:lo + step] = block @ w
    return out[:, 0] if flat else out


def evaluate(series: Series, theta, tau: float = 0.0):
    """Evaluate ``sum a_n e^{-n tau} e^{i n theta}``; ``tau`` is ignored for TrigPoly."""
    scalar = np.ndim(theta) == 0
    if isinstance(series, TrigPoly):
        vals = trig_sum(series.frequencies, series.coeffs, theta)
    else:
        if tau < 0:
            raise ValidationError("damping must be nonnegative", "tau >= 0")
        vals = trig_sum(series.indices, series.damped(tau), theta)
    return complex(vals[0]) if scalar else vals


def l2_norm_sq(series: Series, tau: float = 0.0) -> float:
    """``int_{-pi}^{pi} |F_tau|^2`` by Parseval."""
    if isinstance(series, TrigPoly):
        c = series.coeffs
    else:
        if tau < 0:
            raise ValidationError("damping must be nonnegative", "tau >= 0")
        c = series.damped(tau)
    return TWO_PI * float(np.sum(np.abs(c) ** 2))


def arc_kernel(lags, half_width: float) -> np.ndarray:
    """``int_{-beta}^{beta} e^{i d theta} d theta`` for integer lags ``d``."""
    d = np.asarray(lags, dtype=float)
    out = np.full(d.shape, 2.0 * half_width)
    nz = d != 0
    out[nz] = 2.0 * np.sin(d[nz] * half_width) / d[nz]
    return out


def arc_integral_exact(series: Series, arc: Union[Arc, float], tau: float = 0.0) -> float:
    """``int_{-beta}^{beta} |F_tau|^2`` from the coefficient double sum.

    The double sum is collapsed onto lags: with ``R(d) = sum_n b_{n+d} conj(b_n)``
    the integral is ``sum_d R(d) w(d)`` for the even weight ``w = arc_kernel``.
    """
    beta = arc.half_width if isinstance(arc, Arc) else Arc(float(arc)).half_width
    if isinstance(series, TrigPoly):
        b = series.coeffs
    else:
        if tau < 0:
            raise ValidationError("damping must be nonnegative", "tau >= 0")
        b = series.damped(tau)
    if b.size == 0:
        return 0.0
    if beta == math.pi:
        # integer lags integrate to zero over the full circle
        return TWO_PI * float(np.sum(np.abs(b) ** 2))
    K = b.size
    r = np.correlate(b, b, mode="full")[K - 1:]  # r[d] = R(d), d >= 0
    w = arc_kernel(np.arange(K), beta)
    return float(w[0] * r[0].real + 2.0 * np.dot(w[1:], r[1:].real))


def quadrature(integrand: Callable, lo: float, hi: float, points: int) -> float:
    """Composite trapezoid rule on ``points`` equispaced nodes including both ends.

    Exact to roundoff for trigonometric polynomials of degree below
    ``points - 1`` integrated over a full period.
    """
    if not hi > lo:
        raise ValidationError("quadrature needs hi > lo", "hi > lo")
    if points < 2:
        raise ValidationError("quadrature needs at least 2 points", "points >= 2")
    x = np.linspace(lo, hi, int(points))
    y = np.asarray(integrand(x))
    if not np.all(np.isfinite(y)):
        raise ValidationError("integrand produced non-finite samples", "finite-samples")
    return float(np.trapezoid(y, x))


# -- coefficient files ------------------------------------------------------

def _assemble(entries, source) -> CoeffSeq:
    seen = {}
    for n, value in entries:
        if n < 0:
            raise ValidationError(f"{source}: negative index n={n}", "n >= 0")
        if n in seen:
            raise ValidationError(f"{source}: duplicate index n={n}", "unique-n")
        seen[n] = value
    if not seen:
        raise ValidationError(f"{source}: no coefficients", "nonempty")
    coeffs = np.zeros(max(seen) + 1, dtype=complex)
    for n, value in seen.items():
        coeffs[n] = value
    return CoeffSeq(coeffs, 0)


def read_coefficients(path) -> CoeffSeq:
    """Read a coefficient file: JSON lines ``{"n", "re", "im"}`` or CSV ``n,re,im``.

    Indices that do not appear are zero; a repeated index is an error.
    """
    path = Path(path)
    text = path.read_text()
    entries = []
    if path.suffix.lower() == ".csv" or text.lstrip().startswith("n,"):
        reader = csv.DictReader(text.splitlines())
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["n", "re", "im"]:
            raise ValidationError(f"{path}: CSV header must be n,re,im", "csv-header")
        for row in reader:
            entries.append((int(row["n"]), complex(float(row["re"]), float(row["im"]))))
    else:
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                entries.append((int(obj["n"]), complex(float(obj["re"]), float(obj["im"]))))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad coefficient record ({exc})", "jsonl-record")
    return _assemble(entries, str(path))


def write_coefficients(series: CoeffSeq, path, fmt: str = "jsonl") -> None:
    path = Path(path)
    rows = [(int(n), float(a.real), float(a.imag)) for n, a in zip(series.indices, series.coeffs)]
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "re", "im"])
            w.writerows(rows)
    else:
        with path.open("w") as fh:
            for n, re, im in rows:
                fh.write(json.dumps({"n": n, "re": re, "im": im}) + "\n")
