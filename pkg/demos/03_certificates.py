# coding: utf-8

# # Underapproximation certificates
#
# A certificate is a sub-system, a class-K function `f` and a time bound `t0`.
# If the sub-system is f-backward extensible, every state in its right range
# set up to `t0` is genuinely reachable.

# In[1]:

from ncmsreach import (
    Certificate,
    ClassKFunction,
    FiniteTS,
    TimeGrid,
    certify_underapprox,
    check_f_backward_extensible,
    restrict_states,
    ts_to_ncms,
    witness_from_initials,
)

f = ClassKFunction.linear(1)
ts = FiniteTS(("a", "b", "c", "d"), {("a", "b"), ("b", "c"), ("d", "d")}, {"a"})
sigma = ts_to_ncms(ts, TimeGrid(1, 2))


# ## Restricting to a state set
#
# The natural guess is to keep the trajectories that stay inside `{a, b, c}`.

# In[2]:

sub = restrict_states(sigma, {"a", "b", "c"})
ext = check_f_backward_extensible(sub, f)
print("extensible:", bool(ext))
for bad in ext.violations:
    print("  cannot extend backward:", bad)


# `[1,2] a b` sits in the set but nothing leads into `a`, so it has no past.
# No state set containing both `a` and `b` can fix that.

# In[3]:

res = certify_underapprox(sigma, {"c"}, Certificate({"a", "b", "c"}, f, 2))
print(bool(res), res.failed_clause)


# ## The witness built from initial trajectories
#
# Keeping only restrictions of initial trajectories gives a sub-system where
# every run has a past by construction.

# In[4]:

w = witness_from_initials(sigma, 2)
for t in sorted(w, key=lambda t: t.sort_key()):
    print(" ", t)
res = certify_underapprox(sigma, {"c"}, Certificate(w, f, 2))
print("certified:", bool(res))
for fact in res.facts:
    print("  ", fact)


# The sink `d` is never certified, whatever the state set.

# In[5]:

import itertools

hits = 0
for r in range(5):
    for S in itertools.combinations("abcd", r):
        hits += bool(certify_underapprox(sigma, {"d"}, Certificate(set(S), f, 2)))
print("subsets certifying d:", hits)
