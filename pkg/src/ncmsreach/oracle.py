"""Exact finite-instance checks of the underapproximation theorem.

A finite transition system is lifted to an NCMS on a time grid: its
trajectories are the runs on closed grid intervals ``[i, j]`` (``i < j``)
whose consecutive samples are arcs, where a run defined at index 0 must start
in an initial state. On such instances everything is finite, so both
directions of the theorem can be checked by enumeration against a plain BFS.

Reach at time 0 is the one place where the two sides cannot meet. A state
attained by initial trajectories *only* at time 0 (an initial state never
revisited within ``t0``, or an initial state without successors) is never the
right end of a trajectory, since a domain needs more than one point. Those
states are reported separately as ``time_zero_states`` instead of being
counted as completeness violations; :func:`verify_theorem` also confirms that
no state-restriction certificate reaches them.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .classk import ClassKFunction
from .core import (
    DEFAULT_CAP,
    GridInterval,
    LabelSpace,
    TimeGrid,
    Trajectory,
    as_fraction,
    restrict,
)
from .errors import ResourceCapError
from .reach import (
    Certificate,
    NCMSInstance,
    certify_underapprox,
    check_f_backward_extensible,
    initial_trajectories,
    reach_set,
    restrict_states,
    right_range_set,
)

# 2**12 state subsets per instance at most
MAX_SUBSET_STATES = 12


@dataclass(frozen=True)
class FiniteTS:
    states: tuple
    arcs: frozenset
    initials: frozenset

    def __post_init__(self):
        states = tuple(sorted(set(self.states)))
        arcs = frozenset((a, b) for a, b in self.arcs)
        initials = frozenset(self.initials)
        if not initials:
            raise ValueError("a transition system needs at least one initial state")
        if not initials <= set(states):
            raise ValueError(f"initial states {sorted(initials - set(states))} are not states")
        bad = [(a, b) for a, b in arcs if a not in states or b not in states]
        if bad:
            raise ValueError(f"arcs {sorted(bad)} mention unknown states")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "initials", initials)

    def successors(self, q) -> list:
        return sorted(b for a, b in self.arcs if a == q)


def ts_to_ncms(ts: FiniteTS, grid: TimeGrid, cap: int = DEFAULT_CAP) -> NCMSInstance:
    """All arc-respecting runs on closed grid intervals, initial at index 0."""
    succ = {q: ts.successors(q) for q in ts.states}
    runs: list[Trajectory] = []
    for i in range(grid.horizon):
        starts = sorted(ts.initials) if i == 0 else ts.states
        stack = [(q,) for q in reversed(starts)]
        while stack:
            path = stack.pop()
            if len(path) > 1:
                runs.append(Trajectory(GridInterval(i, i + len(path) - 1), path))
                if len(runs) > cap:
                    raise ResourceCapError("transition-system lift", cap)
            if i + len(path) - 1 < grid.horizon:
                stack.extend(path + (b,) for b in reversed(succ[path[-1]]))
    return NCMSInstance(grid, LabelSpace(frozenset(ts.states)), runs)


def bfs_reach(ts: FiniteTS, k: int, *, min_steps: int = 0) -> frozenset:
    """States reachable from the initial states in ``j`` arc steps, ``min_steps <= j <= k``."""
    if k < 0:
        raise ValueError("step count must be >= 0")
    succ = {q: ts.successors(q) for q in ts.states}
    seen = {(q, 0) for q in ts.initials}
    queue = deque(seen)
    found = set()
    while queue:
        q, depth = queue.popleft()
        if depth >= min_steps:
            found.add(q)
        if depth == k:
            continue
        for b in succ[q]:
            if (b, depth + 1) not in seen:
                seen.add((b, depth + 1))
                queue.append((b, depth + 1))
    return frozenset(found)


def witness_from_initials(sigma: NCMSInstance, t0: Any, cap: int = DEFAULT_CAP) -> NCMSInstance:
    """All grid-representable restrictions of the initial trajectories of ``sigma``."""
    if as_fraction(t0) <= 0:
        raise ValueError(f"time bound must be positive, got {t0}")
    kept: list[Trajectory] = []
    for s in initial_trajectories(sigma):
        kept.extend(restrict(s, w) for w in s.dom.windows())
        if len(kept) > cap:
            raise ResourceCapError("witness construction", cap)
    return NCMSInstance(sigma.grid, sigma.space, kept)


def _subsets(items: Iterable) -> Iterable[frozenset]:
    items = sorted(items)
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


@dataclass
class TheoremReport:
    t0: Fraction
    f: ClassKFunction
    bfs_reach: frozenset
    positive_reach: frozenset
    ncms_reach: frozenset
    time_zero_states: frozenset
    soundness_violations: list = field(default_factory=list)
    completeness_violations: list = field(default_factory=list)
    literal_failures: list = field(default_factory=list)
    restriction_certified: frozenset = frozenset()
    time_zero_certified: frozenset = frozenset()
    extensible_restrictions: int = 0
    subsets_checked: int = 0
    witness_f_independent: bool = True

    @property
    def violations(self) -> list:
        return [("soundness", v) for v in self.soundness_violations] + [
            ("completeness", v) for v in self.completeness_violations
        ]

    @property
    def ok(self) -> bool:
        return not self.violations and self.witness_f_independent


def verify_theorem(
    ts: FiniteTS,
    grid: TimeGrid,
    t0: Any,
    f: ClassKFunction,
    *,
    max_states: int = MAX_SUBSET_STATES,
    cap: int = DEFAULT_CAP,
) -> TheoremReport:
    """Check both directions of the theorem exhaustively on one finite instance.

    Completeness: every ``A`` inside the positive-time reach set is certified by
    the witness built from restrictions of initial trajectories. Subsets of the
    full BFS reach set that fail are kept in ``literal_failures``.
    Soundness: for every ``S ⊆ Q`` whose state restriction is f-backward
    extensible, its right range set lies inside the BFS reach set.
    """
    if len(ts.states) > max_states:
        raise ResourceCapError(f"state-subset enumeration over {len(ts.states)} states", max_states)
    t0 = as_fraction(t0)
    sigma = ts_to_ncms(ts, grid, cap)
    k = grid.last_index_within(t0)
    full = bfs_reach(ts, k)
    positive = bfs_reach(ts, k, min_steps=1)
    report = TheoremReport(
        t0=t0,
        f=f,
        bfs_reach=full,
        positive_reach=positive,
        ncms_reach=reach_set(sigma, t0),
        time_zero_states=full - positive,
    )

    witness = witness_from_initials(sigma, t0, cap)
    verdicts = {
        bool(check_f_backward_extensible(witness, g))
        for g in (f, ClassKFunction.linear(Fraction(1, 2)), ClassKFunction.linear(2))
    }
    report.witness_f_independent = verdicts == {True}
    cert = Certificate(witness, f, t0)
    for A in _subsets(full):
        report.subsets_checked += 1
        if not certify_underapprox(sigma, A, cert):
            report.literal_failures.append(A)
            if A <= positive:
                report.completeness_violations.append(A)

    certified: set = set()
    for S in _subsets(ts.states):
        sub = restrict_states(sigma, S)
        if not check_f_backward_extensible(sub, f):
            continue
        report.extensible_restrictions += 1
        rr = right_range_set(sub, t0)
        certified |= rr
        if not rr <= full:
            report.soundness_violations.append((S, rr - full))
    report.restriction_certified = frozenset(certified)
    report.time_zero_certified = report.time_zero_states & report.restriction_certified
    return report


# -- random campaigns --------------------------------------------------------


def random_ts(rng: np.random.Generator, n_states: int, density: float) -> FiniteTS:
    """Each ordered pair (self-loops included) becomes an arc with probability ``density``."""
    states = tuple(f"q{i}" for i in range(n_states))
    arcs = {(a, b) for a in states for b in states if rng.random() < density}
    chosen = [q for q in states if rng.random() < 0.5]
    initials = chosen or [states[int(rng.integers(n_states))]]
    return FiniteTS(states, frozenset(arcs), frozenset(initials))


@dataclass(frozen=True)
class OracleConfig:
    max_states: int = 5
    density: float = 0.3
    runs: int = 200
    seed: int = 7
    max_horizon: int = 4
    alphas: tuple = (Fraction(1, 2), Fraction(1), Fraction(2))
    t0: Fraction | None = None
    f: ClassKFunction | None = None
    step: Fraction = Fraction(1)


@dataclass
class OracleRun:
    instance_seed: tuple
    ts: FiniteTS
    grid: TimeGrid
    report: TheoremReport


@dataclass
class CampaignReport:
    config: OracleConfig
    runs: list

    @property
    def violations(self) -> list:
        return [(run.instance_seed, v) for run in self.runs for v in run.report.violations]

    @property
    def ok(self) -> bool:
        return all(run.report.ok for run in self.runs)

    def lines(self) -> list[str]:
        c = self.config
        out = [
            f"oracle campaign: runs={c.runs} max_states={c.max_states} density={c.density}"
            f" seed={c.seed} max_horizon={c.max_horizon}",
        ]
        for run in self.runs:
            r = run.report
            out.append(
                f"instance seed={list(run.instance_seed)} |Q|={len(run.ts.states)}"
                f" arcs={len(run.ts.arcs)} horizon={run.grid.horizon} t0={_num(r.t0)} f=({r.f})"
                f" reach={len(r.bfs_reach)} time-zero={len(r.time_zero_states)}"
                f" extensible-S={r.extensible_restrictions} violations={len(r.violations)}"
            )
            for kind, v in r.violations:
                out.append(f"  VIOLATION {kind}: {_render(v)}")
        zero = sum(len(run.report.time_zero_states) for run in self.runs)
        literal = sum(len(run.report.literal_failures) for run in self.runs)
        out.append(f"time-zero-only states (excluded from completeness): {zero}")
        out.append(f"subsets of the BFS reach set failing only because of them: {literal}")
        out.append(f"{len(self.violations)} violations")
        return out


def _num(q: Fraction) -> str:
    return format(float(q), ".12g")


def _render(v) -> str:
    if isinstance(v, tuple):
        S, extra = v
        return f"S={{{', '.join(sorted(S))}}} right range leaves reach by {{{', '.join(sorted(extra))}}}"
    return f"A={{{', '.join(sorted(v))}}} not certified"


def run_oracle(config: OracleConfig, cap: int = DEFAULT_CAP) -> CampaignReport:
    """Run :func:`verify_theorem` on ``config.runs`` random instances.

    Instance ``i`` draws everything from ``numpy.random.default_rng((seed, i))``
    so any single instance can be replayed.
    """
    if config.max_states > MAX_SUBSET_STATES:
        raise ResourceCapError(f"state-subset enumeration over {config.max_states} states", MAX_SUBSET_STATES)
    runs = []
    for i in range(config.runs):
        instance_seed = (config.seed, i)
        rng = np.random.default_rng(instance_seed)
        n = int(rng.integers(1, config.max_states + 1))
        ts = random_ts(rng, n, config.density)
        horizon = int(rng.integers(1, config.max_horizon + 1))
        if config.t0 is not None:
            horizon = max(horizon, -(-config.t0 // config.step))
            t0 = config.t0
        else:
            t0 = int(rng.integers(1, horizon + 1)) * config.step
        f = config.f or ClassKFunction.linear(config.alphas[int(rng.integers(len(config.alphas)))])
        grid = TimeGrid(config.step, int(horizon))
        runs.append(OracleRun(instance_seed, ts, grid, verify_theorem(ts, grid, t0, f, cap=cap)))
    return CampaignReport(config, runs)
