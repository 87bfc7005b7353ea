from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ncmsreach import (
    GridInterval,
    Certificate,
    LabelSpace,
    NCMSInstance,
    TimeGrid,
    Trajectory,
    TrajectorySet,
    bfs_reach,
    certify_underapprox,
    check_f_backward_extensible,
    check_ncms,
    closure,
    concat,
    is_backward_escape,
    is_subtrajectory,
    reach_set,
    restrict,
    restrict_states,
    right_range_set,
    ts_to_ncms,
    witness_from_initials,
)
from ncmsreach.systems import GeneratorConfig, VectorFieldSpec, generate_trajset, parse_expr, quantize, to_text
from strategies import classk, expr_tree, finite_ts, rationals, trajectory

SPACE = LabelSpace(frozenset("abc"))


# -- trajectories ---------------------------------------------------------------


@given(trajectory())
def test_restrictions_are_subtrajectories(s):
    for w in s.dom.windows():
        assert is_subtrajectory(restrict(s, w), s)


@given(st.data())
def test_concat_associative_and_restricts_back(data):
    cuts = sorted(data.draw(st.sets(st.integers(0, 5), min_size=4, max_size=4)))
    a, b, c, d = cuts
    lo_open, hi_open = data.draw(st.booleans()), data.draw(st.booleans())
    doms = [GridInterval(a, b, lo_open, False), GridInterval(b, c), GridInterval(c, d, False, hi_open)]
    s1, s2, s3 = (data.draw(trajectory(dom=dom)) for dom in doms)
    assume(s1.last_value == s2.values[0] and s2.last_value == s3.values[0])
    assert concat(concat(s1, s2), s3) == concat(s1, concat(s2, s3))
    assert restrict(concat(s1, s2), s1.dom) == s1


@settings(max_examples=60)
@given(st.lists(trajectory(horizon=4), max_size=5))
def test_closure_is_ncms(runs):
    ts = closure(TrajectorySet(TimeGrid(1, 4), SPACE, runs))
    assert check_ncms(ts)
    assert all(s in ts for s in runs)


# -- class-K functions ----------------------------------------------------------


@given(classk(), rationals, rationals)
def test_classk_strictly_increasing(f, x, y):
    assume(x != y)
    lo, hi = min(x, y), max(x, y)
    assert f(lo) < f(hi) and f(0) == 0


@given(classk(), rationals, rationals)
def test_fminus_bounds(f, a, b):
    a, b = max(a, b), min(a, b)
    assert f.fminus(a, b) <= a
    assert (f.fminus(a, b) == a) == (a == b)


@given(classk(), rationals, rationals, rationals)
def test_escape_threshold_equivalence(f, a, gap, length):
    # d > c >= a >= 0
    assume(length > 0)
    c = a + gap
    d = c + length
    assert ((d - c) >= f(d - a)) == (c <= f.fminus(d, a))


@given(classk(), st.integers(1, 6), st.integers(0, 5), st.integers(1, 6))
def test_escape_fminus_duality(f, j, lo_off, c_idx):
    # clause (c) with an escape [c, d] holds iff c <= fminus(d, inf dom)
    grid = TimeGrid("1/4", 12)
    inf = lo_off
    d = inf + j
    assume(c_idx < d)
    s1 = Trajectory(f"({inf},{d + 1}]", tuple("a" for _ in range(j + 1)))
    s2 = Trajectory(f"[{c_idx},{d}]", tuple("a" for _ in range(d - c_idx + 1)))
    tau = is_backward_escape(s1, s2, grid.time(d), grid, SPACE)
    clause = tau >= f(grid.time(d) - grid.time(inf))
    assume(c_idx >= inf)
    assert clause == (grid.time(c_idx) <= f.fminus(grid.time(d), grid.time(inf)))


# -- reach and sub-systems ------------------------------------------------------


def lift(ts, horizon):
    return ts_to_ncms(ts, TimeGrid(1, horizon))


@settings(max_examples=80)
@given(finite_ts(), st.integers(1, 3), st.data())
def test_state_restrictions_are_ncms_and_idempotent(ts, horizon, data):
    sigma = lift(ts, horizon)
    S = data.draw(st.sets(st.sampled_from(ts.states)))
    sub = restrict_states(sigma, S)
    assert check_ncms(sub.trajectories)
    assert restrict_states(sub, S).trajectories == sub.trajectories
    assert restrict_states(sigma, ts.states).trajectories == sigma.trajectories


@settings(max_examples=80)
@given(finite_ts(), st.integers(1, 4), st.data())
def test_right_range_captures_positive_time_reach(ts, horizon, data):
    sigma = lift(ts, horizon)
    t0 = data.draw(st.integers(1, horizon))
    rr = right_range_set(sigma, t0)
    for s in sigma:
        if s.is_initial:
            assert all(v in rr for k, v in s.samples() if 0 < k <= t0)


@settings(max_examples=80)
@given(finite_ts(), st.integers(1, 3), st.data())
def test_theorem_soundness_on_state_restrictions(ts, horizon, data):
    sigma = lift(ts, horizon)
    t0 = data.draw(st.integers(1, horizon))
    f = data.draw(classk())
    S = data.draw(st.sets(st.sampled_from(ts.states)))
    A = data.draw(st.sets(st.sampled_from(ts.states)))
    if certify_underapprox(sigma, A, Certificate(S, f, t0)):
        assert A <= bfs_reach(ts, t0)
        assert A <= reach_set(sigma, t0)


@settings(max_examples=80)
@given(finite_ts(), st.integers(1, 3), st.data())
def test_theorem_completeness_via_witness(ts, horizon, data):
    sigma = lift(ts, horizon)
    t0 = data.draw(st.integers(1, horizon))
    f = data.draw(classk())
    w = witness_from_initials(sigma, t0)
    assert check_f_backward_extensible(w, f)
    A = data.draw(st.sets(st.sampled_from(sorted(bfs_reach(ts, t0, min_steps=1))))) if bfs_reach(ts, t0, min_steps=1) else set()
    assert certify_underapprox(sigma, A, Certificate(w, f, t0))


@settings(max_examples=80)
@given(finite_ts(), st.integers(1, 4), st.data())
def test_reach_monotone_in_t0(ts, horizon, data):
    sigma = lift(ts, horizon)
    t0 = Fraction(data.draw(st.integers(1, 8 * horizon)), 8)
    t1 = t0 + Fraction(data.draw(st.integers(0, int(8 * (horizon - t0)))), 8)
    assert reach_set(sigma, t0) <= reach_set(sigma, t1)


@settings(max_examples=80)
@given(finite_ts(), st.integers(1, 3), st.data())
def test_restriction_monotone_in_s(ts, horizon, data):
    sigma = lift(ts, horizon)
    S = data.draw(st.sets(st.sampled_from(ts.states)))
    S2 = S | data.draw(st.sets(st.sampled_from(ts.states)))
    small, big = restrict_states(sigma, S), restrict_states(sigma, S2)
    assert all(s in big.trajectories for s in small)


# -- numerics and parser --------------------------------------------------------


@given(st.floats(-1e6, 1e6), st.sampled_from([0.25, 0.1, 1e-3, 1e-9]))
def test_quantize_idempotent_and_odd(x, res):
    q = quantize([x], res)
    assert quantize(q, res)[0] == q[0]
    assert quantize([-x], res)[0] == -q[0] or q[0] == 0


@settings(max_examples=40)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-4, 4), st.integers(1, 4))
def test_generated_linear_flows_are_ncms(a, b, x0, horizon):
    field = VectorFieldSpec.parse([f"{a}*x1 + {b}"])
    cfg = GeneratorConfig(seeds=[(x0 / 4,)], resolution=1e-6)
    ts = generate_trajset(field, cfg, TimeGrid("1/4", horizon))
    assert check_ncms(ts)
    NCMSInstance.from_set(ts)


@settings(max_examples=300)
@given(expr_tree())
def test_printer_round_trip(tree):
    text = to_text(tree)
    assert parse_expr(text) == tree
    assert to_text(parse_expr(text)) == text
