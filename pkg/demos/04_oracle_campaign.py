# coding: utf-8

# # Checking the theorem by enumeration
#
# On small random transition systems everything is finite. `verify_theorem`
# compares the certificate side against a plain BFS in both directions.

# In[1]:

from fractions import Fraction

from ncmsreach import ClassKFunction, FiniteTS, OracleConfig, TimeGrid, run_oracle, verify_theorem


# One instance by hand. `a` is initial and never revisited, so it is reached
# only at time 0.

# In[2]:

ts = FiniteTS(("a", "b", "c"), {("a", "b"), ("b", "c"), ("c", "b")}, {"a"})
r = verify_theorem(ts, TimeGrid(1, 3), 3, ClassKFunction.linear(Fraction(1, 2)))
print("BFS reach:          ", sorted(r.bfs_reach))
print("positive-time reach:", sorted(r.positive_reach))
print("time-zero only:     ", sorted(r.time_zero_states))
print("violations:", r.violations, " ok:", r.ok)
print("subsets failing only because of time zero:", len(r.literal_failures))


# ## A campaign
#
# Each instance draws from `default_rng((seed, i))` and can be replayed alone.

# In[3]:

report = run_oracle(OracleConfig(max_states=4, runs=40, seed=7))
for line in report.lines()[-3:]:
    print(line)


# In[4]:

import numpy as np

sizes = np.array([len(run.ts.states) for run in report.runs])
reach = np.array([len(run.report.bfs_reach) for run in report.runs])
print("mean |Q| %.2f, mean |reach| %.2f" % (sizes.mean(), reach.mean()))


# The same campaign from the shell:
#
#     ncmsreach oracle --states 4 --runs 200 --seed 7
