"""One test per acceptance criterion, each with its runtime budget.

Every test appends a ``PASS``/``FAIL`` line that is printed in the terminal
summary, whether or not the assertion holds.
"""

import time

import pytest

from fabry import acceptance
from fabry.cli import dispatch, parse_config

SEED = 0


@pytest.fixture(scope="module")
def corpus():
    t0 = time.perf_counter()
    data = acceptance.observation_corpus(SEED)
    return data, time.perf_counter() - t0


def check(log, result, elapsed, budget, summary):
    ok = bool(result["passed"]) and elapsed < budget
    log.append(f"{'PASS' if ok else 'FAIL'}  {result['id']:>2}. {result['name']}: {summary} "
               f"[{elapsed:.2f} s, budget {budget:g} s]")
    assert result["passed"], result
    assert elapsed < budget


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def test_01_kernel_identity(acceptance_log):
    r, dt = timed(acceptance.criterion_kernel_identity, SEED)
    check(acceptance_log, r, dt, 1, f"max sup-relative error {r['max_error']:.2e} (tol 1e-10)")


def test_02_claim_certification(acceptance_log):
    r, dt = timed(acceptance.criterion_claim_certification, SEED)
    check(acceptance_log, r, dt, 30, f"N = 2..256 certified, failures {r['failures']}")


def test_03_denominator(acceptance_log):
    r, dt = timed(acceptance.criterion_denominator, SEED)
    slack = min(row["min_slack"] for row in r["rows"])
    check(acceptance_log, r, dt, 5, f"min slack {slack:.4g} over N in {{8, 16, 64, 256}}")


def test_04_observation(acceptance_log, corpus):
    data, build = corpus
    r, dt = timed(acceptance.criterion_observation, SEED, data)
    check(acceptance_log, r, dt + build, 60,
          f"{r['series']} series, max gap {r['max_relative_gap']:.2e} (tol 1e-9), "
          f"min value/scale {r['min_value_over_scale']:.3g}")


def test_05_corollary(acceptance_log, corpus):
    data, build = corpus
    r, dt = timed(acceptance.criterion_corollary, SEED, data)
    check(acceptance_log, r, dt + build, 60,
          f"min relative slack {r['min_relative_slack']:.3g}, "
          f"negative control refused: {r['negative_control_refused']}")


def test_06_growth(acceptance_log):
    r, dt = timed(acceptance.criterion_growth, SEED)
    check(acceptance_log, r, dt, 10, f"log-log slope {r['slope']:.4f} (target [1.0, 2.3])")


def test_07_sharp(acceptance_log):
    r, dt = timed(acceptance.criterion_sharp, SEED)
    check(acceptance_log, r, dt, 120,
          f"bound {r['lower_bound']:.6f} in [2, {r['constructed']:.3f}], oracle {r['oracle']:.6f}, "
          f"disagreement {r['relative_disagreement']:.2%} (tol 2%)")


def test_08_poincare(acceptance_log):
    r, dt = timed(acceptance.criterion_poincare, SEED)
    got = ", ".join(f"{x:.12g}" for x in r["unit_circle"])
    check(acceptance_log, r, dt, 10, f"random failures {r['random_failures']}/200, e^(i theta) -> ({got})")


def test_09_probe_positive(acceptance_log):
    r, dt = timed(acceptance.criterion_probe_positive, SEED)
    check(acceptance_log, r, dt, 30,
          f"min rho {min(r['mass_ratio']):.4f} >= {r['lower_bound']:.4f}, "
          f"sup error {r['max_sup_relative_error']:.2e} (tol 1e-6), evidence {r['evidence']}")


def test_10_probe_negative(acceptance_log):
    r, dt = timed(acceptance.criterion_probe_negative, SEED)
    spread = ", ".join(f"{x:.3f}" for x in r["growth_spread"])
    check(acceptance_log, r, dt, 30, f"growth spread per l = ({spread}) (target < 2), evidence {r['evidence']}")


def test_11_rescaling(acceptance_log):
    r, dt = timed(acceptance.criterion_rescaling, SEED)
    check(acceptance_log, r, dt, 30, f"max difference {r['max_difference']:.2e} (tol 1e-12)")


def test_12_determinism(acceptance_log):
    cfg = parse_config(["selftest", "--seed", str(SEED)])
    t0 = time.perf_counter()
    first = dispatch(cfg)[1]
    single = time.perf_counter() - t0
    second = dispatch(cfg)[1]
    same = first == second
    r = {"id": 12, "name": "selftest determinism", "passed": same}
    check(acceptance_log, r, single, 300, f"two runs byte-identical: {same} ({len(first)} bytes)")
