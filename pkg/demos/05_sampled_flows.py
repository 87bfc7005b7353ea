# coding: utf-8

# # Continuous models on a grid
#
# ODEs and switched systems are sampled with RK4, quantized and closed into
# trajectory sets. Then the same certificate machinery applies.

# In[1]:

from pathlib import Path

import numpy as np

from ncmsreach import Certificate, certify_underapprox, check_ncms
from ncmsreach.modelfile import load_model
from ncmsreach.systems import parse_expr, rk4_step, VectorFieldSpec

MODELS = Path(__file__).parent / "models"


# ## RK4 accuracy on x' = x

# In[2]:

spec = VectorFieldSpec((parse_expr("x1"),))
x, h = np.array([1.0]), 0.1
for k in range(10):
    x = rk4_step(spec, x, k * h, h)
print("x(1) = %.9f   error %.2e" % (x[0], abs(x[0] - np.e)))


# ## A harmonic oscillator
#
# Starting at `(1, 0)` with `x' = (x2, -x1)`, the model certifies the point
# reached at `t = 1` inside a thin ring around the unit circle.

# In[3]:

osc = load_model(MODELS / "oscillator.model")
sigma = osc.instance()
c = osc.certificate
res = certify_underapprox(sigma, c.A, Certificate(c.S, c.f, c.t0))
print(len(sigma), "trajectories; certified:", bool(res))
for fact in res.facts:
    print("  ", fact)


# ## Constant drift kept away from zero
#
# `x' = 1` from 0 with the constraint `x > 0` only yields left-open runs
# `(0, j]`. The shortest one, `(0,1]`, has no earlier sample to escape from.
# That makes this certificate fail for every step size.

# In[4]:

flow = load_model(MODELS / "flow.model")
sigma = flow.instance()
c = flow.certificate
res = certify_underapprox(sigma, c.A, Certificate(c.S, c.f, c.t0))
print("certified:", bool(res), "failed clause:", res.failed_clause)
print("undischarged:", [t.render(sigma.space) for t in res.extensibility.violations])
print("escapes found:", len(res.extensibility.escapes))


# ## Switching between two modes

# In[5]:

sw = load_model(MODELS / "switched.model").trajectory_set()
print(len(sw), "trajectories, NCMS:", bool(check_ncms(sw)))
print(sorted({t.last_value for t in sw}))
