"""Time grid, trajectories and the NCMS axioms on finite trajectory sets.

Time is quantized to a grid of step ``h`` (an exact :class:`~fractions.Fraction`)
and horizon ``N``; grid times are ``k*h`` for ``k = 0..N``. A trajectory domain
is a :class:`GridInterval`: a real interval with grid endpoints and independent
openness flags, so domains without a minimum such as ``(a, b]`` are first-class.
A :class:`Trajectory` stores one state per grid index included in its domain,
and every comparison of times reduces to integer index arithmetic.

A restriction of ``s`` is *grid-representable* when its domain is
``dom(s) ∩ [a*h, b*h]`` for grid indices ``a < b``. Openness is therefore never
introduced by restricting, only inherited from ``dom(s)``; closure under proper
restrictions (CPR) quantifies over exactly these windows.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Hashable, Iterable, Iterator, Sequence

from .errors import DomainError, GridMismatchError, ResourceCapError

DEFAULT_EPS = 1e-9
DEFAULT_CAP = 10**6

State = Hashable


def as_fraction(x: Any) -> Fraction:
    """Exact rational from an int, Fraction, decimal/fraction string or float.

    Floats go through their shortest repr so ``0.1`` becomes ``1/10``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a time value")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


@dataclass(frozen=True)
class TimeGrid:
    """Grid times ``k*step`` for ``k = 0..horizon``."""

    step: Fraction
    horizon: int

    def __post_init__(self):
        object.__setattr__(self, "step", as_fraction(self.step))
        if self.step <= 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ValueError(f"grid horizon must be an integer >= 1, got {self.horizon!r}")

    @property
    def step_numerator(self) -> int:
        return self.step.numerator

    @property
    def step_denominator(self) -> int:
        return self.step.denominator

    @property
    def end_time(self) -> Fraction:
        return self.horizon * self.step

    def time(self, k: int) -> Fraction:
        return k * self.step

    def last_index_within(self, t: Any) -> int:
        """Largest grid index ``k <= horizon`` with ``k*h <= t`` (``-1`` if none)."""
        t = as_fraction(t)
        if t < 0:
            return -1
        return min(self.horizon, int(t // self.step))

    def is_grid_time(self, t: Any) -> bool:
        q = as_fraction(t) / self.step
        return q.denominator == 1 and 0 <= q <= self.horizon


_INTERVAL_RE = re.compile(r"^\s*([\[(])\s*(\d+)\s*,\s*(\d+)\s*([\])])\s*$")


@dataclass(frozen=True, order=True)
class GridInterval:
    """Real interval between grid indices ``lo < hi`` with openness flags."""

    lo: int
    hi: int
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if self.lo < 0:
            raise DomainError(f"interval starts before time 0: {self}")
        if self.hi <= self.lo:
            raise DomainError(f"interval must have hi > lo, got {self}")
        if self.first > self.last:
            raise DomainError(f"interval {self} contains no grid sample")

    @classmethod
    def parse(cls, text: str) -> GridInterval:
        """Parse ``"[0,2]"``, ``"(0,1]"`` and friends (grid indices)."""
        m = _INTERVAL_RE.match(text)
        if not m:
            raise DomainError(f"malformed grid interval {text!r}")
        left, lo, hi, right = m.groups()
        return cls(int(lo), int(hi), left == "(", right == ")")

    @property
    def first(self) -> int:
        return self.lo + 1 if self.lo_open else self.lo

    @property
    def last(self) -> int:
        return self.hi - 1 if self.hi_open else self.hi

    @property
    def indices(self) -> range:
        return range(self.first, self.last + 1)

    @property
    def has_min(self) -> bool:
        return not self.lo_open

    @property
    def has_max(self) -> bool:
        return not self.hi_open

    def __len__(self) -> int:
        return self.last - self.first + 1

    def __str__(self) -> str:
        return f"{'(' if self.lo_open else '['}{self.lo},{self.hi}{')' if self.hi_open else ']'}"

    def contains(self, other: GridInterval) -> bool:
        """Real-interval inclusion ``other ⊆ self``."""
        lower_ok = self.lo < other.lo or (
            self.lo == other.lo and (other.lo_open or not self.lo_open)
        )
        upper_ok = other.hi < self.hi or (
            self.hi == other.hi and (other.hi_open or not self.hi_open)
        )
        return lower_ok and upper_ok

    def window(self, a: int, b: int) -> GridInterval:
        """``self ∩ [a, b]`` for grid indices ``lo <= a < b <= hi``."""
        if not (self.lo <= a < b <= self.hi):
            raise DomainError(f"window [{a},{b}] not inside {self}")
        return GridInterval(a, b, self.lo_open and a == self.lo, self.hi_open and b == self.hi)

    def windows(self) -> Iterator[GridInterval]:
        """All grid-representable sub-domains, ``self`` included."""
        for a in range(self.lo, self.hi):
            for b in range(a + 1, self.hi + 1):
                yield self.window(a, b)


def included_indices(dom: GridInterval) -> list[int]:
    return list(dom.indices)


# -- state spaces -----------------------------------------------------------


@dataclass(frozen=True)
class LabelSpace:
    """Finite alphabet of symbolic states; equality is exact."""

    labels: frozenset

    def __post_init__(self):
        object.__setattr__(self, "labels", frozenset(self.labels))

    exact = True

    def equal(self, p: State, q: State) -> bool:
        return p == q

    def __contains__(self, q: State) -> bool:
        return q in self.labels

    def issubset(self, other) -> bool:
        return isinstance(other, LabelSpace) and self.labels <= other.labels

    def format_state(self, q: State) -> str:
        return str(q)


@dataclass(frozen=True)
class VectorSpace:
    """Real vectors of fixed dimension compared coordinatewise within ``eps``.

    ``region`` optionally narrows the space to a subset, as produced by
    restricting states with a predicate.
    """

    dim: int
    eps: float = DEFAULT_EPS
    region: Callable[[tuple], bool] | None = field(default=None, compare=False)
    region_text: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("vector dimension must be >= 1")
        if self.eps < 0:
            raise ValueError("eps must be >= 0")

    @property
    def exact(self) -> bool:
        return self.eps == 0

    def equal(self, p: State, q: State) -> bool:
        return len(p) == len(q) and all(abs(a - b) <= self.eps for a, b in zip(p, q))

    def __contains__(self, q: State) -> bool:
        if not isinstance(q, tuple) or len(q) != self.dim:
            return False
        return self.region is None or bool(self.region(q))

    def issubset(self, other) -> bool:
        # Predicates are opaque; inclusion of regions is witnessed by Tr' ⊆ Tr.
        return isinstance(other, VectorSpace) and other.dim == self.dim

    def format_state(self, q: State) -> str:
        return ";".join(format(float(c), ".12g") for c in q)


StateSpace = LabelSpace | VectorSpace


def _equal(space: StateSpace | None, p: State, q: State) -> bool:
    return p == q if space is None else space.equal(p, q)


# -- trajectories -------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """States sampled at the grid indices included in ``dom``."""

    dom: GridInterval
    values: tuple

    def __post_init__(self):
        if isinstance(self.dom, str):
            object.__setattr__(self, "dom", GridInterval.parse(self.dom))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != len(self.dom):
            raise DomainError(
                f"domain {self.dom} has {len(self.dom)} samples but {len(self.values)} values were given"
            )

    def __getitem__(self, k: int) -> State:
        """State at grid index ``k``."""
        if k not in self.dom.indices:
            raise KeyError(k)
        return self.values[k - self.dom.first]

    def samples(self) -> Iterator[tuple[int, State]]:
        return zip(self.dom.indices, self.values)

    @property
    def is_initial(self) -> bool:
        return self.dom.first == 0

    @property
    def last_value(self) -> State:
        return self.values[-1]

    def sort_key(self):
        return (self.dom, self.values)

    def render(self, space: StateSpace | None = None) -> str:
        fmt = space.format_state if space is not None else str
        return f"{self.dom}: " + " ".join(
            f"({fmt(v)})" if isinstance(v, tuple) else fmt(v) for v in self.values
        )

    def __str__(self) -> str:
        return self.render()


def restrict(s: Trajectory, dom2: GridInterval) -> Trajectory:
    """``s`` restricted to ``dom2``, which must lie inside ``dom(s)``."""
    if not s.dom.contains(dom2):
        raise DomainError(f"cannot restrict a trajectory on {s.dom} to {dom2}")
    off = dom2.first - s.dom.first
    return Trajectory(dom2, s.values[off : off + len(dom2)])


def is_subtrajectory(s1: Trajectory, s2: Trajectory, space: StateSpace | None = None) -> bool:
    """Graph inclusion ``s1 ⊑ s2``."""
    if not s2.dom.contains(s1.dom):
        return False
    return all(_equal(space, v, s2[k]) for k, v in s1.samples())


def concat(s1: Trajectory, s2: Trajectory, space: StateSpace | None = None) -> Trajectory:
    """Glue ``s1`` and ``s2`` at their shared endpoint ``sup dom(s1) = inf dom(s2)``."""
    if s1.dom.hi != s2.dom.lo:
        raise DomainError(f"domains {s1.dom} and {s2.dom} do not meet")
    if s1.dom.hi_open or s2.dom.lo_open:
        raise DomainError(f"junction {s1.dom.hi} is not included in both {s1.dom} and {s2.dom}")
    if not _equal(space, s1.last_value, s2.values[0]):
        raise DomainError(
            f"junction values differ at index {s1.dom.hi}: {s1.last_value!r} vs {s2.values[0]!r}"
        )
    dom = GridInterval(s1.dom.lo, s2.dom.hi, s1.dom.lo_open, s2.dom.hi_open)
    return Trajectory(dom, s1.values + s2.values[1:])


def can_concat(s1: Trajectory, s2: Trajectory, space: StateSpace | None = None) -> bool:
    return (
        s1.dom.hi == s2.dom.lo
        and not s1.dom.hi_open
        and not s2.dom.lo_open
        and _equal(space, s1.last_value, s2.values[0])
    )


# -- trajectory sets ----------------------------------------------------------


class _Index:
    """Set of trajectories keyed by domain, with tolerance-aware membership."""

    def __init__(self, space: StateSpace):
        self.space = space
        self.by_dom: dict[GridInterval, list[Trajectory]] = {}
        self.exact: dict[tuple, Trajectory] | None = {} if space.exact else None
        self.count = 0

    def find(self, s: Trajectory) -> Trajectory | None:
        if self.exact is not None:
            return self.exact.get((s.dom, s.values))
        for r in self.by_dom.get(s.dom, ()):
            if all(self.space.equal(a, b) for a, b in zip(r.values, s.values)):
                return r
        return None

    def add(self, s: Trajectory) -> bool:
        if self.find(s) is not None:
            return False
        self.by_dom.setdefault(s.dom, []).append(s)
        if self.exact is not None:
            self.exact[(s.dom, s.values)] = s
        self.count += 1
        return True

    def __iter__(self):
        for bucket in self.by_dom.values():
            yield from bucket


class TrajectorySet:
    """Finite set of trajectories over one grid and one state space.

    Members are deduplicated (within the space's tolerance) and iterated in
    the deterministic order ``(lo, hi, lo_open, hi_open, values)``.
    """

    def __init__(self, grid: TimeGrid, space: StateSpace, trajectories: Iterable[Trajectory] = ()):
        self.grid = grid
        self.space = space
        self._index = _Index(space)
        for s in trajectories:
            if s.dom.hi > grid.horizon:
                raise DomainError(f"trajectory on {s.dom} exceeds grid horizon {grid.horizon}")
            for v in s.values:
                if v not in space:
                    raise DomainError(f"state {v!r} is not in the state space")
            self._index.add(s)
        self._items = tuple(sorted(self._index, key=Trajectory.sort_key))

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, s: Trajectory) -> bool:
        return self._index.find(s) is not None

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrajectorySet):
            return NotImplemented
        return (
            self.grid == other.grid
            and len(self) == len(other)
            and all(s in other for s in self)
        )

    def __repr__(self) -> str:
        return f"TrajectorySet({len(self)} trajectories, horizon={self.grid.horizon})"

    def find(self, s: Trajectory) -> Trajectory | None:
        return self._index.find(s)

    def by_domain(self, dom: GridInterval) -> list[Trajectory]:
        return self._index.by_dom.get(dom, [])

    def domains(self) -> list[GridInterval]:
        return sorted(self._index.by_dom)

    @cached_property
    def _right_closed_at(self) -> dict[int, list[Trajectory]]:
        out: dict[int, list[Trajectory]] = {}
        for s in self._items:
            if not s.dom.hi_open:
                out.setdefault(s.dom.hi, []).append(s)
        return out

    @cached_property
    def _left_closed_at(self) -> dict[int, list[Trajectory]]:
        out: dict[int, list[Trajectory]] = {}
        for s in self._items:
            if not s.dom.lo_open:
                out.setdefault(s.dom.lo, []).append(s)
        return out

    def ending_at(self, k: int) -> list[Trajectory]:
        """Members whose domain has maximum ``k``."""
        return self._right_closed_at.get(k, [])

    def starting_at(self, k: int) -> list[Trajectory]:
        """Members whose domain has minimum ``k``."""
        return self._left_closed_at.get(k, [])

    def filter(self, keep: Callable[[Trajectory], bool], space: StateSpace | None = None) -> TrajectorySet:
        return TrajectorySet(self.grid, space or self.space, (s for s in self._items if keep(s)))

    def states(self) -> set:
        return {v for s in self._items for v in s.values}

    def check_same_grid(self, other: TrajectorySet) -> None:
        if self.grid != other.grid:
            raise GridMismatchError(f"grids differ: {self.grid} vs {other.grid}")


# -- axiom checks -------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    """Verdict of one axiom check; ``witness`` holds the first counterexample."""

    name: str
    passed: bool
    witness: tuple = ()
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def check_cpr(ts: TrajectorySet) -> CheckResult:
    """Every grid-representable proper restriction of a member is a member."""
    for s in ts:
        for w in s.dom.windows():
            if w == s.dom:
                continue
            r = restrict(s, w)
            if r not in ts:
                return CheckResult(
                    "cpr", False, (s, r),
                    f"restriction of {s.render(ts.space)} to {w} is missing",
                )
    return CheckResult("cpr", True)


def check_markovian(ts: TrajectorySet) -> CheckResult:
    """Members meeting at a shared included endpoint with equal states glue to a member."""
    for s1 in ts:
        for s2 in ts.starting_at(s1.dom.hi):
            if s1.dom.hi_open or not ts.space.equal(s1.last_value, s2.values[0]):
                continue
            glued = concat(s1, s2, ts.space)
            if glued not in ts:
                return CheckResult(
                    "markovian", False, (s1, s2),
                    f"concatenation of {s1.render(ts.space)} and {s2.render(ts.space)} is missing",
                )
    return CheckResult("markovian", True)


def check_complete(ts: TrajectorySet) -> CheckResult:
    """Every non-empty ⊑-chain has a supremum in the set.

    A finite chain contains its maximum, so it suffices that for each member
    ``s`` the union of the graphs of all members below ``s`` is the graph of
    ``s`` itself; that union is the supremum of every chain topped by ``s``.
    The loop computes those unions explicitly rather than assuming them.
    """
    space = ts.space
    doms = ts.domains()
    for s in ts:
        graph: dict[int, State] = {}
        lo, hi = None, None
        for d in doms:
            if not s.dom.contains(d):
                continue
            for r in ts.by_domain(d):
                if not is_subtrajectory(r, s, space):
                    continue
                graph.update(r.samples())
                lo = d if lo is None or (d.lo, d.lo_open) < (lo.lo, lo.lo_open) else lo
                hi = d if hi is None or (d.hi, not d.hi_open) > (hi.hi, not hi.hi_open) else hi
        union_dom = GridInterval(lo.lo, hi.hi, lo.lo_open, hi.hi_open)
        if union_dom != s.dom or sorted(graph) != list(s.dom.indices) or any(
            not space.equal(graph[k], v) for k, v in s.samples()
        ):
            return CheckResult(
                "complete", False, (s,),
                f"chains below {s.render(space)} have no supremum in the set",
            )
    return CheckResult("complete", True)


@dataclass(frozen=True)
class NCMSReport:
    cpr: CheckResult
    markovian: CheckResult
    complete: CheckResult

    @property
    def overall(self) -> bool:
        return bool(self.cpr and self.markovian and self.complete)

    def __bool__(self) -> bool:
        return self.overall

    def checks(self) -> tuple[CheckResult, CheckResult, CheckResult]:
        return (self.cpr, self.markovian, self.complete)

    def summary(self) -> str:
        return ", ".join(
            f"{c.name} {'pass' if c else 'FAIL'}" + ("" if c else f" ({c.detail})")
            for c in self.checks()
        )


def check_ncms(ts: TrajectorySet) -> NCMSReport:
    return NCMSReport(check_cpr(ts), check_markovian(ts), check_complete(ts))


def closure(ts: TrajectorySet, cap: int = DEFAULT_CAP) -> TrajectorySet:
    """Smallest superset of ``ts`` closed under restrictions and concatenation."""
    space = ts.space
    store = _Index(space)
    right: dict[int, list[Trajectory]] = {}
    left: dict[int, list[Trajectory]] = {}
    queue = list(reversed(list(ts)))
    while queue:
        s = queue.pop()
        if not store.add(s):
            continue
        if store.count > cap:
            raise ResourceCapError("trajectory closure", cap)
        if not s.dom.hi_open:
            right.setdefault(s.dom.hi, []).append(s)
        if not s.dom.lo_open:
            left.setdefault(s.dom.lo, []).append(s)
        for w in s.dom.windows():
            if w != s.dom:
                queue.append(restrict(s, w))
        if not s.dom.lo_open:
            for u in right.get(s.dom.lo, ()):
                if space.equal(u.last_value, s.values[0]):
                    queue.append(concat(u, s, space))
        if not s.dom.hi_open:
            for u in left.get(s.dom.hi, ()):
                if space.equal(s.last_value, u.values[0]):
                    queue.append(concat(s, u, space))
    return TrajectorySet(ts.grid, space, store)


def label_trajectories(runs: Sequence[tuple[str, Sequence[State]]]) -> list[Trajectory]:
    """Build trajectories from ``(interval_text, values)`` pairs."""
    return [Trajectory(GridInterval.parse(d), tuple(v)) for d, v in runs]
