"""Sectioned ``key = value`` model files read by the command-line tool.

Example::

    [grid]
    h = 1/4
    horizon = 4

    [transition-system]
    states = a b c d
    initial = a
    arcs = a->b b->c d->d

    [certificate]
    A = c
    S = a b c
    f = linear 0.5
    t0 = 2

Exactly one system section is allowed: ``[transition-system]``, ``[ode]``,
``[switched]`` or the debug section ``[trajectories]`` (repeated
``run = [0,2] a b c`` lines). ``#`` starts a comment line. Every error carries
the line and column it was found at.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .classk import ClassKFunction
from .core import DEFAULT_CAP, DEFAULT_EPS, LabelSpace, TimeGrid, Trajectory, TrajectorySet, VectorSpace, as_fraction
from .errors import ParseError
from .oracle import FiniteTS, ts_to_ncms
from .reach import NCMSInstance
from .systems.dynamics import SwitchedSpec, VectorFieldSpec
from .systems.expr import Predicate, parse_expr, parse_predicate
from .systems.generate import GeneratorConfig, generate_trajset

SYSTEM_SECTIONS = ("transition-system", "ode", "switched", "trajectories")
KEYS = {
    "grid": {"h", "horizon"},
    "transition-system": {"states", "initial", "arcs"},
    "ode": {"dim", "field", "seeds", "quantize", "starts", "left-open"},
    "switched": {"dim", "modes", "seeds", "quantize", "starts", "left-open"},
    "constraint": {"predicate"},
    "certificate": {"A", "S", "f", "t0"},
    "trajectories": {"states", "dim", "run"},
}
REQUIRED = {
    "grid": ("h", "horizon"),
    "transition-system": ("states", "initial", "arcs"),
    "ode": ("dim", "field", "seeds"),
    "switched": ("dim", "modes", "seeds"),
    "constraint": ("predicate",),
    "certificate": ("A", "S", "f", "t0"),
    "trajectories": (),
}
_VECTOR_RE = re.compile(r"\(([^()]*)\)")
_LABEL_RE = re.compile(r"[A-Za-z0-9_.']+")


@dataclass(frozen=True)
class Entry:
    key: str
    value: str
    line: int
    col: int  # 0-based column of the value

    def error(self, message: str, offset: int = 0) -> ParseError:
        return ParseError(message, self.col + offset, self.line)


@dataclass
class Section:
    name: str
    line: int
    entries: list[Entry] = field(default_factory=list)

    def get(self, key: str) -> Entry | None:
        for e in self.entries:
            if e.key == key:
                return e
        return None

    def all(self, key: str) -> list[Entry]:
        return [e for e in self.entries if e.key == key]


@dataclass(frozen=True)
class CertificateSpec:
    A: tuple
    S: Any  # tuple of states or a Predicate
    f: ClassKFunction
    t0: Fraction


@dataclass
class Model:
    grid: TimeGrid
    kind: str
    system: Any = None
    generator: GeneratorConfig | None = None
    runs: tuple = ()
    space: Any = None
    constraint: Predicate | None = None
    certificate: CertificateSpec | None = None

    @property
    def is_vector(self) -> bool:
        return self.kind in ("ode", "switched") or isinstance(self.space, VectorSpace)

    def trajectory_set(self, cap: int = DEFAULT_CAP) -> TrajectorySet:
        """The system's trajectory set, not yet checked against the axioms."""
        if self.kind == "transition-system":
            return ts_to_ncms(self.system, self.grid, cap).trajectories
        if self.kind == "trajectories":
            return TrajectorySet(self.grid, self.space, self.runs)
        return generate_trajset(self.system, self.generator, self.grid, cap)

    def instance(self, cap: int = DEFAULT_CAP) -> NCMSInstance:
        return NCMSInstance.from_set(self.trajectory_set(cap))


# -- low-level reading --------------------------------------------------------


def read_sections(text: str) -> list[Section]:
    sections: list[Section] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip())
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("section header must end with ']'", indent + len(stripped) - 1, lineno)
            name = stripped[1:-1].strip()
            if name not in KEYS:
                raise ParseError(f"unknown section [{name}]", indent, lineno)
            if any(s.name == name for s in sections):
                raise ParseError(f"duplicate section [{name}]", indent, lineno)
            sections.append(Section(name, lineno))
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value' or a [section] header", indent, lineno)
        if not sections:
            raise ParseError("entry outside of any section", indent, lineno)
        key_part, _, value_part = raw.partition("=")
        key = key_part.strip()
        value = value_part.strip()
        col = len(key_part) + 1 + (len(value_part) - len(value_part.lstrip()))
        sec = sections[-1]
        allowed = KEYS[sec.name]
        if key not in allowed and not (sec.name == "switched" and key.startswith("field.")):
            raise ParseError(f"unknown key {key!r} in [{sec.name}]", indent, lineno)
        if key != "run" and sec.get(key) is not None:
            raise ParseError(f"duplicate key {key!r} in [{sec.name}]", indent, lineno)
        if not value:
            raise ParseError(f"empty value for {key!r}", col, lineno)
        sec.entries.append(Entry(key, value, lineno, col))
    return sections


def _require(sec: Section, key: str) -> Entry:
    e = sec.get(key)
    if e is None:
        raise ParseError(f"[{sec.name}] requires '{key}'", 0, sec.line)
    return e


def _int(e: Entry, minimum: int) -> int:
    try:
        n = int(e.value)
    except ValueError:
        raise e.error(f"{e.key} must be an integer, got {e.value!r}") from None
    if n < minimum:
        raise e.error(f"{e.key} must be >= {minimum}")
    return n


def _rational(e: Entry, positive: bool = True) -> Fraction:
    try:
        q = as_fraction(e.value)
    except (ValueError, ZeroDivisionError):
        raise e.error(f"{e.key} must be a decimal or a fraction like 1/4, got {e.value!r}") from None
    if positive and q <= 0:
        raise e.error(f"{e.key} must be positive")
    return q


def _quoted(e: Entry) -> list[tuple[str, int]]:
    """Comma-separated double-quoted strings with their column offsets."""
    try:
        items = next(csv.reader([e.value], skipinitialspace=True))
    except csv.Error as exc:
        raise e.error(f"bad quoted list: {exc}") from None
    out = []
    cursor = 0
    for item in items:
        item = item.strip()
        off = e.value.find(item, cursor)
        cursor = max(cursor, off + len(item))
        out.append((item, max(off, 0)))
    if not any(item for item, _ in out):
        raise e.error(f"{e.key} is empty")
    return out


def _expr_error(e: Entry, exc: ParseError, offset: int) -> ParseError:
    return e.error(exc.message, offset + (exc.pos or 0))


def _labels(e: Entry) -> list[str]:
    labels = e.value.split()
    for tok in labels:
        if not _LABEL_RE.fullmatch(tok):
            raise e.error(f"bad state label {tok!r}", e.value.find(tok))
    return labels


def _vectors(e: Entry, dim: int | None) -> list[tuple]:
    out = []
    pos = 0
    text = e.value
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _VECTOR_RE.match(text, pos)
        if not m:
            raise e.error("expected a vector literal like (1, 0)", pos)
        try:
            vec = tuple(float(c) for c in m.group(1).split(","))
        except ValueError:
            raise e.error(f"bad vector literal {m.group()!r}", pos) from None
        if dim is not None and len(vec) != dim:
            raise e.error(f"vector {m.group()} has {len(vec)} coordinates, expected {dim}", pos)
        out.append(vec)
        pos = m.end()
    if not out:
        raise e.error("expected at least one vector literal")
    return out


def _flag(e: Entry | None) -> bool:
    if e is None:
        return False
    v = e.value.lower()
    if v in ("yes", "true", "1", "on"):
        return True
    if v in ("no", "false", "0", "off"):
        return False
    raise e.error(f"{e.key} must be yes or no")


# -- sections ---------------------------------------------------------------


def _grid(sec: Section, h: Any) -> TimeGrid:
    step = as_fraction(h) if h is not None else _rational(_require(sec, "h"))
    if step <= 0:
        raise ParseError(f"grid step must be positive, got {step}")
    return TimeGrid(step, _int(_require(sec, "horizon"), 1))


def _transition_system(sec: Section) -> FiniteTS:
    states_e = _require(sec, "states")
    states = _labels(states_e)
    if len(set(states)) != len(states):
        raise states_e.error("duplicate state label")
    initial_e = _require(sec, "initial")
    initials = _labels(initial_e)
    for q in initials:
        if q not in states:
            raise initial_e.error(f"initial state {q!r} is not declared", initial_e.value.find(q))
    arcs_e = _require(sec, "arcs")
    arcs = []
    if arcs_e.value != "none":
        cursor = 0
        for tok in arcs_e.value.split():
            off = arcs_e.value.find(tok, cursor)
            cursor = off + len(tok)
            a, sep, b = tok.partition("->")
            if not sep or not a or not b:
                raise arcs_e.error(f"arc {tok!r} must look like a->b", off)
            for q in (a, b):
                if q not in states:
                    raise arcs_e.error(f"arc {tok!r} mentions undeclared state {q!r}", off)
            arcs.append((a, b))
    return FiniteTS(tuple(states), frozenset(arcs), frozenset(initials))


def _field(e: Entry, dim: int) -> VectorFieldSpec:
    items = _quoted(e)
    if len(items) != dim:
        raise e.error(f"field has {len(items)} components, expected dim = {dim}")
    comps = []
    for text, off in items:
        try:
            comps.append(parse_expr(text, dim))
        except ParseError as exc:
            raise _expr_error(e, exc, off) from None
    return VectorFieldSpec(tuple(comps))


def _predicate(e: Entry, dim: int | None) -> Predicate:
    items = _quoted(e)
    if len(items) != 1:
        raise e.error("expected one quoted predicate")
    text, off = items[0]
    try:
        return parse_predicate(text, dim)
    except ParseError as exc:
        raise _expr_error(e, exc, off) from None


def _generator(sec: Section, dim: int, eps: float, constraint: Predicate | None, grid: TimeGrid) -> GeneratorConfig:
    seeds = _vectors(_require(sec, "seeds"), dim)
    q = sec.get("quantize")
    resolution = 1e-9
    if q is not None:
        parts = q.value.split()
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise q.error("quantize must be one or more positive decimals") from None
        if len(values) not in (1, dim) or any(v <= 0 for v in values):
            raise q.error(f"quantize needs 1 or {dim} positive resolutions")
        resolution = values[0] if len(values) == 1 else tuple(values)
    starts = None
    s = sec.get("starts")
    if s is not None and s.value != "all":
        try:
            starts = tuple(int(p) for p in s.value.split())
        except ValueError:
            raise s.error("starts must be 'all' or grid indices") from None
        if any(not 0 <= i < grid.horizon for i in starts):
            raise s.error(f"start indices must lie in 0..{grid.horizon - 1}")
    return GeneratorConfig(
        seeds=tuple(seeds),
        resolution=resolution,
        eps=eps,
        constraint=constraint,
        left_open=_flag(sec.get("left-open")),
        start_indices=starts,
    )


def _switched(sec: Section, dim: int) -> SwitchedSpec:
    names_e = _require(sec, "modes")
    names = _labels(names_e)
    modes = []
    for name in names:
        e = sec.get(f"field.{name}")
        if e is None:
            raise names_e.error(f"mode {name!r} has no 'field.{name}' line")
        modes.append((name, _field(e, dim)))
    for e in sec.entries:
        if e.key.startswith("field.") and e.key[6:] not in names:
            raise ParseError(f"{e.key} names an undeclared mode", 0, e.line)
    return SwitchedSpec(tuple(modes))


def _trajectories(sec: Section, grid: TimeGrid, eps: float):
    dim_e = sec.get("dim")
    dim = _int(dim_e, 1) if dim_e else None
    runs = []
    labels: set = set()
    for e in sec.all("run"):
        m = re.match(r"\s*([\[(][^\])]*[\])])", e.value)
        if not m:
            raise e.error("run must start with a domain like [0,2] or (0,3]")
        dom_text, rest = m.group(1), e.value[m.end():]
        offset = m.end() + (len(rest) - len(rest.lstrip()))
        body = Entry(e.key, rest.strip(), e.line, e.col + offset)
        if not body.value:
            raise e.error("run has no states")
        if dim is not None or body.value.startswith("("):
            values = _vectors(body, dim)
            dim = dim or len(values[0])
        else:
            values = _labels(body)
            labels.update(values)
        try:
            runs.append(Trajectory(dom_text, values))
        except ValueError as exc:
            raise e.error(str(exc)) from None
    if dim is not None and labels:
        raise ParseError("[trajectories] mixes labels and vectors", 0, sec.line)
    if dim is not None:
        space = VectorSpace(dim, eps)
    else:
        states_e = sec.get("states")
        declared = set(_labels(states_e)) if states_e else set()
        if states_e and not labels <= declared:
            raise states_e.error(f"runs use undeclared states {sorted(labels - declared)}")
        space = LabelSpace(frozenset(labels | declared))
    for r in runs:
        if r.dom.hi > grid.horizon:
            raise ParseError(f"run on {r.dom} goes past the grid horizon {grid.horizon}", 0, sec.line)
    return tuple(runs), space


def _certificate(sec: Section, dim: int | None, t0: Any, f: Any) -> CertificateSpec:
    a_e = _require(sec, "A")
    A = tuple(_vectors(a_e, dim)) if dim is not None else tuple(_labels(a_e))
    s_e = _require(sec, "S")
    if s_e.value.startswith('"'):
        S = _predicate(s_e, dim)
    elif dim is not None:
        S = tuple(_vectors(s_e, dim))
    else:
        S = tuple(_labels(s_e))
    if f is None:
        f_e = _require(sec, "f")
        try:
            f = ClassKFunction.parse(f_e.value)
        except ValueError as exc:
            raise f_e.error(str(exc)) from None
    if t0 is None:
        t0 = _rational(_require(sec, "t0"))
    return CertificateSpec(A, S, f, as_fraction(t0))


# -- entry points -------------------------------------------------------------


def parse_model(
    text: str,
    *,
    h: Any = None,
    eps: float | None = None,
    f: ClassKFunction | None = None,
    t0: Any = None,
) -> Model:
    """Parse model text; ``h``, ``eps``, ``f`` and ``t0`` override the file."""
    sections = {s.name: s for s in read_sections(text)}
    if "grid" not in sections:
        raise ParseError("missing [grid] section", 0, 1)
    systems = [n for n in SYSTEM_SECTIONS if n in sections]
    if len(systems) != 1:
        found = ", ".join(f"[{n}]" for n in systems) or "none"
        raise ParseError(f"exactly one system section is required, found {found}", 0, 1)
    for name, keys in REQUIRED.items():
        if name in sections:
            for key in keys:
                if (name, key) == ("grid", "h") and h is not None:
                    continue
                _require(sections[name], key)
    eps = DEFAULT_EPS if eps is None else eps
    grid = _grid(sections["grid"], h)
    kind = systems[0]
    sec = sections[kind]
    model = Model(grid=grid, kind=kind)
    dim = None
    if kind in ("ode", "switched"):
        dim = _int(_require(sec, "dim"), 1)
    if "constraint" in sections:
        if dim is None:
            raise ParseError("[constraint] applies to [ode] and [switched] models only", 0, sections["constraint"].line)
        model.constraint = _predicate(_require(sections["constraint"], "predicate"), dim)
    if kind == "transition-system":
        model.system = _transition_system(sec)
    elif kind == "ode":
        model.system = _field(_require(sec, "field"), dim)
        model.generator = _generator(sec, dim, eps, model.constraint, grid)
    elif kind == "switched":
        model.system = _switched(sec, dim)
        model.generator = _generator(sec, dim, eps, model.constraint, grid)
    else:
        model.runs, model.space = _trajectories(sec, grid, eps)
        if isinstance(model.space, VectorSpace):
            dim = model.space.dim
    if "certificate" in sections:
        model.certificate = _certificate(sections["certificate"], dim, t0, f)
    return model


def load_model(path: str | Path, **overrides) -> Model:
    return parse_model(Path(path).read_text(encoding="utf-8"), **overrides)
