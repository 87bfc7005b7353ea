# coding: utf-8

# # Trajectory sets and the three axioms
#
# A trajectory here is a finite run of states sampled on a time grid, with a
# domain that may be open or closed at either end. A set of them behaves like
# a system once it is closed under restriction (CPR) and under gluing at equal
# states (Markov). Completeness, the third axiom, always holds for finite sets
# but is still checked.

# In[1]:

from pathlib import Path

from ncmsreach import (
    GridInterval,
    LabelSpace,
    TimeGrid,
    Trajectory,
    TrajectorySet,
    check_ncms,
    closure,
    restrict,
)
from ncmsreach.modelfile import load_model

MODELS = Path(__file__).parent / "models"


# Domains are written in interval notation over grid indices.

# In[2]:

d = GridInterval.parse("(0,3]")
print(d, "samples at", list(d.indices), "has min:", d.has_min)
print("window [1,2]:", d.window(1, 2), " window [0,2]:", d.window(0, 2))


# Restricting keeps the openness the domain already had.

# In[3]:

s = Trajectory(GridInterval.parse("[0,2]"), ("a", "b", "c"))
print(restrict(s, GridInterval.parse("[1,2]")))


# ## A set that is missing a restriction
#
# The model below lists `[0,2] a b c` and `[0,1] a b` but forgets `[1,2] b c`.

# In[4]:

broken = load_model(MODELS / "missing_restriction.model").trajectory_set()
report = check_ncms(broken)
for c in report.checks():
    print(f"{c.name:10s} {'pass' if c else 'FAIL'}  {c.detail or ''}")


# `closure` adds exactly what is missing.

# In[5]:

fixed = closure(broken)
for t in sorted(fixed, key=lambda t: t.sort_key()):
    print(" ", t)
print("NCMS:", bool(check_ncms(fixed)))


# ## Gluing
#
# Two runs meeting at index 1 in the same state glue into one, so the closure
# of these two pieces contains the full run `[0,2] x y z`.

# In[6]:

grid = TimeGrid(1, 2)
pieces = TrajectorySet(grid, LabelSpace(frozenset("xyz")), [
    Trajectory(GridInterval.parse("[0,1]"), ("x", "y")),
    Trajectory(GridInterval.parse("[1,2]"), ("y", "z")),
])
print(sorted(str(t) for t in closure(pieces)))
