"""Command-line front end.

Usage examples::

    fabry certify --N 8
    fabry constant --N 8 --sweep 8,16,32,64
    fabry goodness --family harmonic --p 2 --N 6
    fabry probe --family geometric --s -1 --N 8 --format csv
    fabry selftest --seed 0

Reports are JSON envelopes ``{"schema", "type", "paper_claim", "config",
"report"}``; :func:`load_report` turns one back into its report object.
Exit status: 0 success, 1 validation error or refused hypothesis, 2 failed
certification or inequality.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import acceptance
from .concentration import (
    ConstantEstimate,
    GrowthFit,
    PoincareReport,
    constant_growth,
    constructed_constant,
    poincare_check,
    random_zero_mean_poly,
    sharp_constant_lower_bound,
)
from .errors import CertificationError, FabryError, TruncationError, ValidationError
from .fourier_core import TrigPoly, read_coefficients
from .goodness import QUARTER, GoodnessReport, QuotientDrift, is_n_good, quotient_phase_drift, tail_good_index
from .kernels import DenominatorCheck, NegativityCertificate, certify_negativity, claim_poly, denominator_inequality_check, fejer, g_kernel
from .probe import DEFAULT_ENERGY_TOL, DEFAULT_ORDERS, DEFAULT_TAUS, FAMILIES, ProbeReport, family_series, probe

SCHEMA = "fabry-report/1"

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2

COMMANDS = ("kernel", "certify", "goodness", "constant", "sharp", "poincare", "probe", "selftest")

CLAIMS = {
    "kernel": "fejer-kernel construction",
    "certify": "negativity of the fejer-difference polynomial off the arc",
    "goodness": "N-good phase windows",
    "constant": "arc concentration inequality constant",
    "sharp": "sharp arc concentration constant (lower bound)",
    "poincare": "zero-mean sup bound by derivative energy",
    "probe": "singular point on the arc from consecutive quotients",
    "selftest": "acceptance criteria",
}


# -- composite reports ----------------------------------------------------------

@dataclass
class KernelReport:
    N: int
    fejer: List[float]
    g_kernel: List[float]
    claim_poly: Optional[List[float]]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class CertifyReport:
    certificate: NegativityCertificate
    denominator: Optional[DenominatorCheck]

    def to_dict(self):
        return {"certificate": self.certificate.to_dict(),
                "denominator": self.denominator.to_dict() if self.denominator else None}

    @classmethod
    def from_dict(cls, d):
        den = d["denominator"]
        return cls(NegativityCertificate.from_dict(d["certificate"]),
                   DenominatorCheck.from_dict(den) if den else None)


@dataclass
class GoodnessSummary:
    goodness: GoodnessReport
    tail_index: Optional[int]
    drift: QuotientDrift

    def to_dict(self):
        return {"goodness": self.goodness.to_dict(), "tail_index": self.tail_index,
                "drift": self.drift.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(GoodnessReport.from_dict(d["goodness"]), d["tail_index"], QuotientDrift.from_dict(d["drift"]))


@dataclass
class ConstantReport:
    estimate: ConstantEstimate
    growth: Optional[GrowthFit] = None

    def to_dict(self):
        return {"estimate": self.estimate.to_dict(), "growth": self.growth.to_dict() if self.growth else None}

    @classmethod
    def from_dict(cls, d):
        g = d["growth"]
        return cls(ConstantEstimate.from_dict(d["estimate"]), GrowthFit.from_dict(g) if g else None)


@dataclass
class SelftestReport:
    schema: str
    seed: int
    criteria: list
    passed: bool

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


REPORT_TYPES = {cls.__name__: cls for cls in (
    KernelReport, CertifyReport, GoodnessSummary, ConstantReport, ConstantEstimate,
    PoincareReport, ProbeReport, SelftestReport,
)}


def load_report(text: str):
    """Parse a JSON envelope back into ``(report_object, envelope)``."""
    env = json.loads(text)
    if env.get("schema") != SCHEMA:
        raise ValidationError(f"unknown report schema {env.get('schema')!r}", "schema")
    return REPORT_TYPES[env["type"]].from_dict(env["report"]), env


# -- configuration -----------------------------------------------------------------

@dataclass
class RunConfig:
    subcommand: str
    N: Optional[int] = None
    alpha: float = QUARTER
    taus: List[float] = field(default_factory=lambda: list(DEFAULT_TAUS))
    K: Optional[int] = None
    grid: Optional[int] = None
    seed: int = 0
    input: Optional[str] = None
    family: Optional[str] = None
    s: Optional[List[float]] = None
    p: float = 1.0
    rho0: float = 0.5
    L: int = DEFAULT_ORDERS
    energy_tol: float = DEFAULT_ENERGY_TOL
    T: Optional[int] = None
    iterations: int = 2000
    starts: int = 20
    sweep: Optional[List[int]] = None
    from_index: Optional[int] = None
    degree: int = 8
    poly: Optional[str] = None
    format: str = "json"
    output: Optional[str] = None

    def validate(self):
        def need(cond, msg, pre):
            if not cond:
                raise ValidationError(msg, pre)

        need(self.subcommand in COMMANDS, f"unknown subcommand {self.subcommand!r}", "subcommand")
        need(self.format in ("json", "csv"), "format must be json or csv", "format")
        if self.subcommand in ("kernel", "certify", "goodness", "constant", "sharp", "probe"):
            need(self.N is not None, f"{self.subcommand} requires --N", "N given")
        if self.N is not None:
            least = 1 if self.subcommand == "kernel" else 2
            need(self.N >= least, f"N must be >= {least}", f"N >= {least}")
        if self.subcommand == "certify" and self.grid is not None:
            need(self.grid >= 16 * self.N, "grid must be >= 16 N", "grid_points >= 16 N")
        need(0 < self.alpha < math.pi, "alpha must lie in (0, pi)", "0 < alpha < pi")
        need(all(t > 0 for t in self.taus), "taus must be positive", "tau > 0")
        need(all(b < a for a, b in zip(self.taus, self.taus[1:])), "taus must be strictly descending",
             "taus descending")
        need(self.L >= 1, "L must be >= 1", "L >= 1")
        need(self.energy_tol > 0, "energy tolerance must be positive", "energy_tol > 0")
        if self.subcommand == "sharp":
            need(self.T is None or self.T >= 1, "T must be >= 1", "T >= 1")
            need(self.iterations >= 1 and self.starts >= 1, "iterations and starts must be >= 1",
                 "iterations >= 1")
        if self.subcommand in ("goodness", "probe"):
            need((self.input is None) != (self.family is None), "give exactly one of --input or --family",
                 "input xor family")
            if self.family is not None:
                need(self.family in FAMILIES, f"unknown family {self.family!r}", "family")
        if self.K is not None:
            need(self.K >= 1, "K must be >= 1", "K >= 1")
        if self.s is not None:
            need(complex(*self.s) != 0, "s must be nonzero", "s != 0")
        if self.subcommand == "poincare" and self.poly is None:
            need(self.degree >= 1, "degree must be >= 1", "degree >= 1")
        return self


def _parse_complex(text: str) -> List[float]:
    text = text.strip()
    if "," in text:
        re, im = text.split(",", 1)
        z = complex(float(re), float(im))
    else:
        z = complex(text.replace("i", "j"))
    return [z.real, z.imag]


def _float_list(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message, "usage")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--input", help="coefficient file (JSON lines n/re/im or CSV n,re,im)")
    source.add_argument("--family", choices=sorted(FAMILIES))
    source.add_argument("--s", type=_parse_complex, help="singular point candidate, e.g. -1 or 0.5,0.866")
    source.add_argument("--p", type=float, default=1.0, help="harmonic family exponent")
    source.add_argument("--rho0", type=float, default=0.5, help="subdisc family ratio")
    source.add_argument("--K", type=int, help="number of family terms to generate")

    parser = _Parser(prog="fabry", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    sub.add_parser("kernel", parents=[common], help="fejer, G_N and claim polynomial coefficients")

    p = sub.add_parser("certify", parents=[common], help="negativity certificate and denominator check")
    p.add_argument("--grid", type=int)

    p = sub.add_parser("goodness", parents=[common, source], help="N/alpha goodness, tail index, quotients")
    p.add_argument("--alpha", type=float, default=QUARTER)
    p.add_argument("--from-index", type=int, dest="from_index")

    p = sub.add_parser("constant", parents=[common], help="constructed concentration constant")
    p.add_argument("--sweep", type=_int_list, help="comma-separated N values for a log-log fit")
    p.add_argument("--grid", type=int)

    p = sub.add_parser("sharp", parents=[common], help="sharp-constant lower bound")
    p.add_argument("--T", type=int)
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--starts", type=int, default=20)

    p = sub.add_parser("poincare", parents=[common], help="zero-mean sup bound check")
    p.add_argument("--poly", help="JSON list of coefficients c_{-M}..c_M (numbers or [re, im])")
    p.add_argument("--degree", type=int, default=8, help="degree of the random polynomial")

    p = sub.add_parser("probe", parents=[common, source], help="concentration sweep singularity probe")
    p.add_argument("--taus", type=_float_list, default=list(DEFAULT_TAUS))
    p.add_argument("--L", type=int, default=DEFAULT_ORDERS)
    p.add_argument("--energy-tol", type=float, dest="energy_tol", default=DEFAULT_ENERGY_TOL)

    sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    known = {f for f in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in known})
    return cfg.validate()


# -- dispatch -------------------------------------------------------------------

def _family(cfg: RunConfig):
    s = complex(*cfg.s) if cfg.s else 1.0
    if cfg.family == "geometric":
        return FAMILIES["geometric"](s)
    if cfg.family == "harmonic":
        return FAMILIES["harmonic"](cfg.p, s)
    if cfg.family == "subdisc":
        return FAMILIES["subdisc"](cfg.rho0)
    return FAMILIES["random"](cfg.N or 8, cfg.seed)


def _source_series(cfg: RunConfig, for_probe: bool):
    """``(series, s, label, known_singularity)`` from --input or --family."""
    if cfg.input is not None:
        series = read_coefficients(cfg.input)
        s = complex(*cfg.s) if cfg.s else 1.0
        return series, s, f"file:{Path(cfg.input).name}", None
    fam = _family(cfg)
    if cfg.K is not None:
        series = fam.series(cfg.K)
    elif for_probe:
        series = family_series(fam, cfg.taus, cfg.L, cfg.energy_tol)
    else:
        series = fam.series(256)
    return series, fam.default_s, f"family:{fam.name}", fam.known_singularity


def _parse_poly(text: str) -> TrigPoly:
    raw = json.loads(text)
    coeffs = [complex(*c) if isinstance(c, list) else complex(c) for c in raw]
    return TrigPoly(coeffs)


def _run(cfg: RunConfig):
    """Return ``(report, status)``."""
    cmd = cfg.subcommand
    if cmd == "kernel":
        cp = claim_poly(cfg.N).half().real.tolist() if cfg.N >= 2 else None
        return KernelReport(cfg.N, fejer(cfg.N).half().real.tolist(), g_kernel(cfg.N).half().real.tolist(), cp), EXIT_OK
    if cmd == "certify":
        cert = certify_negativity(cfg.N, cfg.grid)
        den = denominator_inequality_check(cfg.N) if cfg.N >= 8 else None
        ok = cert.certified and (den is None or (den.holds and den.chain_holds))
        return CertifyReport(cert, den), EXIT_OK if ok else EXIT_FAILED
    if cmd == "goodness":
        series, s, _, _ = _source_series(cfg, False)
        rep = is_n_good(series, cfg.N, cfg.alpha, cfg.from_index)
        return GoodnessSummary(rep, tail_good_index(series, cfg.N, cfg.alpha),
                               quotient_phase_drift(series, cfg.alpha)), EXIT_OK
    if cmd == "constant":
        est = constructed_constant(cfg.N, cfg.grid)
        growth = constant_growth(cfg.sweep) if cfg.sweep else None
        return ConstantReport(est, growth), EXIT_OK
    if cmd == "sharp":
        T = cfg.T if cfg.T is not None else cfg.N
        est = sharp_constant_lower_bound(cfg.N, T, cfg.iterations, cfg.seed, cfg.starts)
        return est, EXIT_OK
    if cmd == "poincare":
        v = _parse_poly(cfg.poly) if cfg.poly else random_zero_mean_poly(np.random.default_rng(cfg.seed), cfg.degree)
        rep = poincare_check(v)
        return rep, EXIT_OK if rep.holds else EXIT_FAILED
    if cmd == "probe":
        series, s, label, known = _source_series(cfg, True)
        rep = probe(series, cfg.N, s, cfg.taus, cfg.L, cfg.energy_tol, source=label, known_singularity=known)
        return rep, EXIT_OK
    if cmd == "selftest":
        res = acceptance.run_all(cfg.seed)
        return SelftestReport(**res), EXIT_OK if res["passed"] else EXIT_FAILED
    raise ValidationError(f"unknown subcommand {cmd!r}", "subcommand")  # pragma: no cover


def render(cfg: RunConfig, report) -> str:
    if cfg.format == "csv":
        if isinstance(report, ProbeReport):
            return report.concentration.to_csv()
        raise ValidationError(f"csv output is only available for probe, not {cfg.subcommand}", "format")
    env = {
        "schema": SCHEMA,
        "type": type(report).__name__,
        "paper_claim": CLAIMS[cfg.subcommand],
        "config": asdict(cfg),
        "report": report.to_dict(),
    }
    return json.dumps(env, indent=2, sort_keys=True, allow_nan=False) + "\n"


def dispatch(cfg: RunConfig):
    """Run a validated config; returns ``(status, text)``."""
    report, status = _run(cfg)
    return status, render(cfg, report)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        status, text = dispatch(cfg)
    except CertificationError as exc:
        print(f"error: {exc} [precondition: {exc.precondition}]", file=sys.stderr)
        return EXIT_FAILED
    except TruncationError as exc:
        hint = f"; smallest supported tau ~ {exc.min_tau:.4g}" if exc.min_tau else ""
        print(f"error: {exc}{hint} [precondition: {exc.precondition}]", file=sys.stderr)
        return EXIT_INVALID
    except FabryError as exc:
        print(f"error: {exc} [precondition: {exc.precondition}]", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
