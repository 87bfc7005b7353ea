"""Acceptance criteria AC1-AC7, one reported line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from ncmsreach import (  # noqa: E402
    Certificate,
    ClassKFunction,
    FiniteTS,
    LabelSpace,
    NCMSInstance,
    OracleConfig,
    TimeGrid,
    Trajectory,
    TrajectorySet,
    certify_underapprox,
    check_complete,
    check_cpr,
    check_f_backward_extensible,
    check_markovian,
    check_ncms,
    closure,
    reach_set,
    restrict_states,
    run_oracle,
    ts_to_ncms,
)
from ncmsreach.core import GridInterval  # noqa: E402
from ncmsreach.systems import (  # noqa: E402
    GeneratorConfig,
    VectorFieldSpec,
    eval_expr,
    generate_trajset,
    parse_expr,
    parse_predicate,
    to_text,
)
from oracles import cpr_holds, markov_holds  # noqa: E402
from strategies import finite_ts  # noqa: E402

RESULTS: dict[str, str] = {}


def report(key: str, ok: bool, detail: str) -> None:
    RESULTS[key] = f"{key}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(RESULTS[key])


# -- AC1 -----------------------------------------------------------------------

AC1_CONFIG = OracleConfig(max_states=5, density=0.3, runs=200, seed=7, max_horizon=4)


@pytest.fixture(scope="module")
def ac1_campaign():
    start = time.perf_counter()
    campaign = run_oracle(AC1_CONFIG)
    return campaign, time.perf_counter() - start


def test_ac1_literal(ac1_campaign):
    """Every A inside the full BFS reach set, time-0 states included, is certified."""
    campaign, elapsed = ac1_campaign
    literal = sum(len(r.report.literal_failures) for r in campaign.runs)
    sound = sum(len(r.report.soundness_violations) for r in campaign.runs)
    ok = literal == 0 and sound == 0 and elapsed < 60
    report(
        "AC1 (as stated)", ok,
        f"{literal} subsets of the BFS reach set not certified, {sound} soundness violations, {elapsed:.1f}s",
    )
    assert ok


def test_ac1_time_zero_separated(ac1_campaign):
    """Same campaign, states attained only at time 0 reported apart from completeness."""
    campaign, elapsed = ac1_campaign
    zero_cert = sum(len(r.report.time_zero_certified) for r in campaign.runs)
    ok = campaign.ok and not campaign.violations and zero_cert == 0 and elapsed < 60
    zero = sum(len(r.report.time_zero_states) for r in campaign.runs)
    report(
        "AC1 (time-zero states separated)", ok,
        f"{len(campaign.violations)} violations over {len(campaign.runs)} instances,"
        f" {zero} time-zero-only states, none certified by any S, {elapsed:.1f}s",
    )
    assert ok


# -- AC2 -----------------------------------------------------------------------


def _random_set(rng: np.random.Generator) -> TrajectorySet:
    horizon = int(rng.integers(1, 6))
    grid = TimeGrid(1, horizon)
    space = LabelSpace(frozenset("ab"))
    runs = []
    for _ in range(int(rng.integers(1, 4))):
        lo = int(rng.integers(0, horizon))
        hi = int(rng.integers(lo + 1, horizon + 1))
        lo_open, hi_open = bool(rng.random() < 0.3), bool(rng.random() < 0.3)
        if lo_open and hi_open and hi - lo < 2:
            hi_open = False
        dom = GridInterval(lo, hi, lo_open, hi_open)
        runs.append(Trajectory(dom, tuple(rng.choice(["a", "b"], size=len(dom)))))
    members = list(closure(TrajectorySet(grid, space, runs)))
    mode = rng.integers(3)
    if mode == 1 and len(members) > 1:
        members.pop(int(rng.integers(len(members))))
    elif mode == 2:
        members = runs
    if len(members) > 30:
        keep = rng.choice(len(members), size=30, replace=False)
        members = [members[i] for i in sorted(keep)]
    return TrajectorySet(grid, space, members)


def test_ac2_axiom_checkers():
    start = time.perf_counter()
    disagree = 0
    valid = complete_fail = 0
    verdicts = {"cpr": set(), "markov": set()}
    for i in range(100):
        ts = _random_set(np.random.default_rng((2, i)))
        assert len(ts) <= 30
        h, horizon = ts.grid.step, ts.grid.horizon
        want_cpr, want_markov = cpr_holds(list(ts), h, horizon), markov_holds(list(ts), h)
        got_cpr, got_markov = bool(check_cpr(ts)), bool(check_markovian(ts))
        verdicts["cpr"].add(got_cpr)
        verdicts["markov"].add(got_markov)
        disagree += (want_cpr != got_cpr) + (want_markov != got_markov)
        if want_cpr and want_markov:
            valid += 1
            complete_fail += not check_complete(ts)
    elapsed = time.perf_counter() - start
    ok = disagree == 0 and complete_fail == 0 and elapsed < 30
    report(
        "AC2", ok,
        f"{disagree} disagreements on 100 sets (both verdicts seen: cpr {sorted(verdicts['cpr'])},"
        f" markovian {sorted(verdicts['markov'])}), completeness failed on {complete_fail} of {valid} valid sets,"
        f" {elapsed:.1f}s",
    )
    assert ok


# -- AC3 -----------------------------------------------------------------------

FLOW_GRID = TimeGrid("1/8", 8)
POSITIVE = parse_predicate("x1 > 0", 1)


def _flow_system() -> NCMSInstance:
    cfg = GeneratorConfig(seeds=[(0,)], start_indices=(0,), constraint=POSITIVE, left_open=True)
    return NCMSInstance.from_set(generate_trajset(VectorFieldSpec.parse(["1"]), cfg, FLOW_GRID))


def test_ac3_clause_c_certifies():
    start = time.perf_counter()
    sigma = _flow_system()
    result = certify_underapprox(sigma, [(1.0,)], Certificate(POSITIVE, ClassKFunction.linear("0.5"), 1))
    escapes = result.extensibility.escapes
    exact = all(d.tau >= d.required - 1e-12 for d in escapes)
    elapsed = time.perf_counter() - start
    ok = bool(result) and len(escapes) > 0 and exact and elapsed < 10
    blocked = ", ".join(s.render(sigma.space) for s in result.extensibility.violations)
    report(
        "AC3 (clause (c) certification, alpha=0.5)", ok,
        f"certified={bool(result)}, {len(escapes)} escape discharges, undischarged: {blocked or 'none'}, {elapsed:.2f}s",
    )
    assert ok


def test_ac3_mutation():
    start = time.perf_counter()
    sub = restrict_states(_flow_system(), POSITIVE)
    strict = check_f_backward_extensible(sub, ClassKFunction.linear(2))
    elapsed = time.perf_counter() - start
    ok = not strict and not strict.escapes and elapsed < 10
    report(
        "AC3 (mutation alpha=2 fails extensibility)", ok,
        f"extensible={bool(strict)}, {len(strict.violations)} undischarged, {len(strict.escapes)} escapes, {elapsed:.2f}s",
    )
    assert ok


# -- AC4 -----------------------------------------------------------------------

CHAIN_SINK = FiniteTS(("a", "b", "c", "d"), frozenset({("a", "b"), ("b", "c"), ("d", "d")}), frozenset({"a"}))


def _subsets(items):
    items = sorted(items)
    return [frozenset(q for j, q in enumerate(items) if mask >> j & 1) for mask in range(1 << len(items))]


def test_ac4_positive():
    start = time.perf_counter()
    sigma = ts_to_ncms(CHAIN_SINK, TimeGrid(1, 2))
    result = certify_underapprox(sigma, {"c"}, Certificate({"a", "b", "c"}, ClassKFunction.linear(1), 2))
    elapsed = time.perf_counter() - start
    ok = bool(result) and elapsed < 5
    detail = "certified" if result else (
        f"failed clause {result.failed_clause}: "
        + ", ".join(s.render(sigma.space) for s in result.extensibility.violations)
    )
    report("AC4 (A={c} with S={a,b,c} certifies)", ok, f"{detail}, {elapsed:.2f}s")
    assert ok


def test_ac4_negative():
    start = time.perf_counter()
    sigma = ts_to_ncms(CHAIN_SINK, TimeGrid(1, 2))
    passed = [S for S in _subsets("abcd") if certify_underapprox(sigma, {"d"}, Certificate(S, ClassKFunction.linear(1), 2))]
    elapsed = time.perf_counter() - start
    ok = not passed and elapsed < 5
    report("AC4 (A={d} fails for all 16 S)", ok, f"{len(passed)} of 16 subsets certify d, {elapsed:.2f}s")
    assert ok


# -- AC5 -----------------------------------------------------------------------


def test_ac5_oscillator():
    start = time.perf_counter()
    grid = TimeGrid("0.05", 20)
    spec = VectorFieldSpec.parse(["x2", "-x1"])
    ts = generate_trajset(spec, GeneratorConfig(seeds=[(1.0, 0.0)], start_indices=(0,)), grid)
    top = next(s for s in ts if s.dom == GridInterval(0, 20))
    err = max(
        max(abs(v[0] - math.cos(float(grid.time(k)))), abs(v[1] + math.sin(float(grid.time(k)))))
        for k, v in top.samples()
    )
    ncms = check_ncms(ts)
    ring = parse_predicate("0.9 <= sqrt(x1^2 + x2^2) <= 1.1", 2)
    result = certify_underapprox(NCMSInstance.from_set(ts), [top.last_value], Certificate(ring, ClassKFunction.linear(1), 1))
    elapsed = time.perf_counter() - start
    ok = err <= 1e-6 and bool(ncms) and bool(result) and elapsed < 20
    report(
        "AC5", ok,
        f"max sample error {err:.2e}, check_ncms {'pass' if ncms else 'FAIL'},"
        f" endpoint certified={bool(result)}, {elapsed:.2f}s",
    )
    assert ok


# -- AC6 -----------------------------------------------------------------------


def test_ac6_parser():
    start = time.perf_counter()
    corpus = [l.strip() for l in (Path(__file__).parent / "expr_corpus.txt").read_text().splitlines() if l.strip()]
    unstable = []
    for text in corpus:
        tree = parse_expr(text)
        printed = to_text(tree)
        if parse_expr(printed) != tree or to_text(parse_expr(printed)) != printed:
            unstable.append(text)
    spots = [
        eval_expr(parse_expr("x1^2 + sin(x2)"), (2.0, 0.0)) == 4.0,
        eval_expr(parse_expr("x1 + 2*x2"), (1.0, 3.0)) == 7.0,
        eval_expr(parse_expr("-x1"), (2.0,)) == -2.0,
        eval_expr(parse_expr("5"), (0.0,)) == 5.0,
    ]
    elapsed = time.perf_counter() - start
    ok = len(corpus) == 50 and not unstable and all(spots) and elapsed < 1
    report(
        "AC6", ok,
        f"{len(corpus) - len(unstable)}/{len(corpus)} round-trip fixed points, {sum(spots)}/{len(spots)} spot checks, {elapsed:.3f}s",
    )
    assert ok


# -- AC7 -----------------------------------------------------------------------

AC7_SETTINGS = settings(max_examples=500, derandomize=True, deadline=None, database=None,
                        suppress_health_check=list(HealthCheck))


def test_ac7_monotonicity():
    counts = {"reach": 0, "restrict": 0}
    failures = []

    @AC7_SETTINGS
    @given(finite_ts(max_states=4), st.integers(1, 4), st.data())
    def reach_monotone(ts, horizon, data):
        sigma = ts_to_ncms(ts, TimeGrid(1, horizon))
        t0 = Fraction(data.draw(st.integers(1, 4 * horizon)), 4)
        t1 = t0 + Fraction(data.draw(st.integers(0, int(4 * (horizon - t0)))), 4)
        counts["reach"] += 1
        if not reach_set(sigma, t0) <= reach_set(sigma, t1):
            failures.append(("reach", ts, t0, t1))

    @AC7_SETTINGS
    @given(finite_ts(max_states=4), st.integers(1, 3), st.data())
    def restrict_monotone(ts, horizon, data):
        sigma = ts_to_ncms(ts, TimeGrid(1, horizon))
        S = data.draw(st.sets(st.sampled_from(ts.states)))
        S2 = S | data.draw(st.sets(st.sampled_from(ts.states)))
        counts["restrict"] += 1
        small, big = restrict_states(sigma, S), restrict_states(sigma, S2)
        if not all(s in big.trajectories for s in small):
            failures.append(("restrict", ts, S, S2))

    start = time.perf_counter()
    reach_monotone()
    restrict_monotone()
    elapsed = time.perf_counter() - start
    total = counts["reach"] + counts["restrict"]
    ok = total >= 1000 and not failures and elapsed < 30
    report(
        "AC7", ok,
        f"{total} cases ({counts['reach']} reach-in-t0, {counts['restrict']} restriction-in-S), {len(failures)} failures, {elapsed:.1f}s",
    )
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
