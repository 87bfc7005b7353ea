# coding: utf-8

# # Reach sets of a lifted transition system
#
# A finite transition system becomes a trajectory set by taking every
# arc-respecting run on a closed grid interval. Runs touching time 0 must start
# in an initial state; later runs need not.

# In[1]:

from pathlib import Path

from ncmsreach import FiniteTS, TimeGrid, bfs_reach, reach_set, right_range_set, ts_to_ncms
from ncmsreach.modelfile import load_model

MODELS = Path(__file__).parent / "models"


# In[2]:

chain = FiniteTS(("a", "b", "c"), {("a", "b"), ("b", "c")}, {"a"})
sigma = ts_to_ncms(chain, TimeGrid(1, 2))
for t in sorted(sigma, key=lambda t: t.sort_key()):
    print(" ", t)


# Four runs. Note `[1,2] a b`: it lives inside the system but does not come
# from an initial state.
#
# The reach set at `t0` collects every state visited by an initial trajectory
# up to `t0`. The right range set keeps only states at a right end.

# In[3]:

for t0 in (1, 2):
    print(f"t0={t0}  reach={sorted(reach_set(sigma, t0))}"
          f"  right range={sorted(right_range_set(sigma, t0))}"
          f"  BFS={sorted(bfs_reach(chain, t0))}")


# State `a` is reached only at time 0. BFS counts it, but no trajectory ends
# there, because a domain needs at least two samples.
#
# The same system as a model file:

# In[4]:

model = load_model(MODELS / "chain.model")
inst = model.instance()
print(model.kind, len(inst), "trajectories; reach at 2:", sorted(reach_set(inst, 2)))


# The `reach` command prints the same sets as CSV:
#
#     ncmsreach reach demos/models/chain.model --t0 2
