"""Reach sets, sub-NCMS constructions and underapproximation certificates.

A certificate for ``A ⊆ reach(Σ, t0)`` is a sub-NCMS ``Σ'`` (given explicitly,
or obtained by keeping only the trajectories that stay inside a state set
``S``) together with a class-K function ``f``. It is accepted when ``Σ'`` is
*f-backward extensible*, meaning every trajectory of ``Σ'``

a) is initial (defined at time 0), or
b) has a backward extension in ``Σ'`` (a strict supertrajectory whose new
   points all lie to the left), or
c) has a domain without minimum and admits, at some non-maximal sample time
   ``t``, an escape ``s' : [c, t] -> Q`` in ``Σ'`` ending in ``s(t)`` whose
   length ``t - c`` is at least ``f(t - inf dom(s))``,

and every state of ``A`` is the value at the right end of some trajectory of
``Σ'`` lying inside ``[0, t0]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable

from .classk import ClassKFunction
from .core import (
    LabelSpace,
    State,
    StateSpace,
    TimeGrid,
    Trajectory,
    TrajectorySet,
    VectorSpace,
    as_fraction,
    check_ncms,
)
from .errors import CertificateError, DomainError, GridMismatchError, NotNCMSError

# Absolute slack in favour of acceptance when comparing an escape length with f(.).
ESCAPE_SLACK = 1e-12


class NCMSInstance:
    """A trajectory set validated against the three NCMS axioms on construction."""

    def __init__(
        self,
        grid: TimeGrid,
        space: StateSpace,
        trajectories: Iterable[Trajectory] | TrajectorySet,
    ):
        if isinstance(trajectories, TrajectorySet) and trajectories.space == space:
            if trajectories.grid != grid:
                raise GridMismatchError("trajectory set and instance use different grids")
            ts = trajectories
        else:
            ts = TrajectorySet(grid, space, trajectories)
        report = check_ncms(ts)
        if not report:
            raise NotNCMSError(report)
        self.grid = grid
        self.space = space
        self.trajectories = ts
        self.report = report

    @classmethod
    def from_set(cls, ts: TrajectorySet) -> NCMSInstance:
        return cls(ts.grid, ts.space, ts)

    def __iter__(self):
        return iter(self.trajectories)

    def __len__(self) -> int:
        return len(self.trajectories)

    def __repr__(self) -> str:
        return f"NCMSInstance({len(self)} trajectories, h={self.grid.step}, horizon={self.grid.horizon})"


def _positive_time(t0: Any) -> Fraction:
    t0 = as_fraction(t0)
    if t0 <= 0:
        raise DomainError(f"time bound must be positive, got {t0}")
    return t0


def initial_trajectories(sigma: NCMSInstance) -> TrajectorySet:
    return sigma.trajectories.filter(lambda s: s.is_initial)


def reach_set(sigma: NCMSInstance, t0: Any) -> frozenset:
    """States attained at some sample time in ``[0, t0]`` by an initial trajectory."""
    kmax = sigma.grid.last_index_within(_positive_time(t0))
    return frozenset(
        v for s in sigma.trajectories if s.is_initial for k, v in s.samples() if k <= kmax
    )


def right_range_set(sigma: NCMSInstance, t0: Any) -> frozenset:
    """States at ``max dom(s)`` over trajectories ``s`` with ``dom(s) ⊆ [0, t0]``."""
    kmax = sigma.grid.last_index_within(_positive_time(t0))
    return frozenset(
        s.last_value for s in sigma.trajectories if s.dom.has_max and s.dom.hi <= kmax
    )


def _membership(space: StateSpace, S) -> Callable[[State], bool]:
    if callable(S):
        return lambda q: bool(S(q))
    members = list(S)
    if space.exact:
        frozen = frozenset(members)
        return frozen.__contains__
    return lambda q: any(space.equal(q, m) for m in members)


def restrict_states(sigma: NCMSInstance, S) -> NCMSInstance:
    """``Σ_S``: the ``S``-valued trajectories of ``Σ`` over the state space ``Q ∩ S``.

    ``S`` is a collection of states or a predicate on states.
    """
    inside = _membership(sigma.space, S)
    if isinstance(sigma.space, LabelSpace):
        space: StateSpace = LabelSpace(frozenset(q for q in sigma.space.labels if inside(q)))
    else:
        outer = sigma.space.region
        region = inside if outer is None else (lambda q: outer(q) and inside(q))
        text = getattr(S, "text", "") if callable(S) else "explicit state set"
        space = VectorSpace(sigma.space.dim, sigma.space.eps, region, text)
    kept = sigma.trajectories.filter(lambda s: all(inside(v) for v in s.values), space)
    return NCMSInstance(sigma.grid, space, kept)


def is_sub_ncms(sub: NCMSInstance, sigma: NCMSInstance) -> bool:
    """``Q' ⊆ Q`` and ``Tr' ⊆ Tr``."""
    if sub.grid != sigma.grid:
        raise GridMismatchError(f"grids differ: {sub.grid} vs {sigma.grid}")
    return sub.space.issubset(sigma.space) and all(s in sigma.trajectories for s in sub)


def is_backward_extension(s1: Trajectory, s2: Trajectory, space: StateSpace | None = None) -> bool:
    """``s1 ⊏ s2`` with every new point of ``dom(s2)`` to the left of ``dom(s1)``."""
    d1, d2 = s1.dom, s2.dom
    if d1.hi != d2.hi or d1.hi_open != d2.hi_open:
        return False
    starts_earlier = d2.lo < d1.lo or (d2.lo == d1.lo and d1.lo_open and not d2.lo_open)
    if not starts_earlier:
        return False
    eq = space.equal if space is not None else (lambda p, q: p == q)
    return all(eq(v, s2[k]) for k, v in s1.samples())


def is_backward_escape(
    s1: Trajectory,
    s2: Trajectory,
    d: Any,
    grid: TimeGrid,
    space: StateSpace | None = None,
) -> Fraction | None:
    """Length ``tau = d - c`` if ``s2`` is a backward escape from ``s1`` at time ``d``.

    ``s2`` must live on a closed grid interval ``[c, d]`` with ``s2(d) = s1(d)``.
    """
    d = as_fraction(d)
    k = d / grid.step
    if k.denominator != 1 or int(k) not in s1.dom.indices:
        raise DomainError(f"time {d} is not a sample of {s1.dom}")
    k = int(k)
    if s1.dom.has_max and k == s1.dom.last:
        raise DomainError(f"time {d} is the maximum of {s1.dom}")
    dom = s2.dom
    if dom.lo_open or dom.hi_open or dom.hi != k:
        return None
    eq = space.equal if space is not None else (lambda p, q: p == q)
    if not eq(s2.last_value, s1[k]):
        return None
    return (k - dom.lo) * grid.step


@dataclass(frozen=True)
class Discharge:
    """How one trajectory satisfies f-backward extensibility."""

    trajectory: Trajectory
    clause: str
    witness: Trajectory | None = None
    at: int | None = None
    tau: Fraction | None = None
    required: float | None = None


@dataclass(frozen=True)
class ExtensibilityReport:
    passed: bool
    discharges: tuple[Discharge, ...]
    violations: tuple[Trajectory, ...]

    def __bool__(self) -> bool:
        return self.passed

    def count(self, clause: str) -> int:
        return sum(1 for d in self.discharges if d.clause == clause)

    @property
    def escapes(self) -> list[Discharge]:
        return [d for d in self.discharges if d.clause == "escape"]


class _ExtensionIndex:
    """Lookup tables for backward extensions and closed escape intervals."""

    def __init__(self, ts: TrajectorySet):
        self.space = ts.space
        self.exact = ts.space.exact
        self.by_end: dict[tuple, list[Trajectory]] = {}
        for s in ts:
            self.by_end.setdefault(self._end_key(s), []).append(s)
        # closed-domain members by end index, candidates for escapes
        self.closed_ending: dict[int, list[Trajectory]] = {}
        for s in ts:
            if not s.dom.lo_open and not s.dom.hi_open:
                self.closed_ending.setdefault(s.dom.hi, []).append(s)

    def _end_key(self, s: Trajectory) -> tuple:
        if self.exact:
            return (s.dom.hi, s.dom.hi_open, s.last_value)
        return (s.dom.hi, s.dom.hi_open)

    def backward_extension(self, s: Trajectory) -> Trajectory | None:
        for cand in self.by_end.get(self._end_key(s), ()):
            if is_backward_extension(s, cand, self.space):
                return cand
        return None

    def longest_escape(self, k: int, value: State) -> Trajectory | None:
        best = None
        for cand in self.closed_ending.get(k, ()):
            if self.space.equal(cand.last_value, value) and (best is None or cand.dom.lo < best.dom.lo):
                best = cand
        return best


def check_f_backward_extensible(sub: NCMSInstance, f: ClassKFunction) -> ExtensibilityReport:
    """Check clauses (a), (b), (c) in that order for every trajectory of ``sub``."""
    h = sub.grid.step
    index = _ExtensionIndex(sub.trajectories)
    discharges: list[Discharge] = []
    violations: list[Trajectory] = []
    for s in sub.trajectories:
        if s.is_initial:
            discharges.append(Discharge(s, "initial"))
            continue
        ext = index.backward_extension(s)
        if ext is not None:
            discharges.append(Discharge(s, "backward-extension", ext))
            continue
        found = None
        if s.dom.lo_open:
            non_max = s.dom.indices if s.dom.hi_open else s.dom.indices[:-1]
            for k in non_max:
                esc = index.longest_escape(k, s[k])
                if esc is None:
                    continue
                tau = (k - esc.dom.lo) * h
                required = float(f((k - s.dom.lo) * h))
                if float(tau) >= required - ESCAPE_SLACK:
                    found = Discharge(s, "escape", esc, k, tau, required)
                    break
        if found is not None:
            discharges.append(found)
        else:
            violations.append(s)
    return ExtensibilityReport(not violations, tuple(discharges), tuple(violations))


@dataclass(frozen=True)
class Certificate:
    """Sub-NCMS (explicit, or a state set / predicate ``S``), class-K ``f`` and horizon ``t0``."""

    restriction: Any
    f: ClassKFunction
    t0: Fraction

    def __post_init__(self):
        try:
            t0 = as_fraction(self.t0)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise CertificateError(f"bad certificate horizon {self.t0!r}") from exc
        if t0 <= 0:
            raise CertificateError(f"certificate horizon must be positive, got {t0}")
        if not isinstance(self.f, ClassKFunction):
            raise CertificateError("certificate needs a ClassKFunction")
        object.__setattr__(self, "t0", t0)

    @property
    def explicit(self) -> bool:
        return isinstance(self.restriction, NCMSInstance)


@dataclass(frozen=True)
class CertificationResult:
    passed: bool
    sub: NCMSInstance
    extensibility: ExtensibilityReport
    right_range: frozenset
    missing: tuple = ()
    failed_clause: str | None = None
    facts: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def certify_underapprox(sigma: NCMSInstance, A: Iterable[State], cert: Certificate) -> CertificationResult:
    """Accept iff the certificate's sub-NCMS is f-backward extensible and ``A`` lies in its
    ``t0``-right range set; acceptance implies ``A ⊆ reach_set(sigma, t0)``."""
    if cert.t0 > sigma.grid.end_time:
        raise CertificateError(
            f"certificate horizon {cert.t0} exceeds the grid end time {sigma.grid.end_time}"
        )
    if cert.explicit:
        sub = cert.restriction
        if not is_sub_ncms(sub, sigma):
            raise CertificateError("certificate trajectory set is not a sub-NCMS of the system")
    else:
        sub = restrict_states(sigma, cert.restriction)
    ext = check_f_backward_extensible(sub, cert.f)
    rr = right_range_set(sub, cert.t0)
    space = sigma.space
    missing = tuple(q for q in A if not any(space.equal(q, r) for r in rr))
    facts = [
        f"sub-NCMS has {len(sub)} trajectories",
        f"f-backward extensible ({cert.f}): {'yes' if ext else 'no'}"
        f" [initial {ext.count('initial')}, backward-extension {ext.count('backward-extension')},"
        f" escape {ext.count('escape')}, violating {len(ext.violations)}]",
        f"A within the {cert.t0}-right range set: {'yes' if not missing else 'no'}",
    ]
    failed = None
    if not ext:
        failed = "extensibility"
    elif missing:
        failed = "right-range"
    return CertificationResult(failed is None, sub, ext, rr, missing, failed, facts)
