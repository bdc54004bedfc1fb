# %% [markdown]
# # Lorenz: normalized connection, invariants, Chern-Simons
#
# Everything here is also in the conformance report; this walks through it
# step by step.

# %%
import random

from riemext.chern_simons import lorenz_cs_check
from riemext.connection import connection_lorenz_normalized, trace_conditions
from riemext.extension import curvature, numeric_invariants, riemann_extension, sample_points
from riemext.sysfile import load_fixture

vf = load_fixture("lorenz").vector_field()
conn = connection_lorenz_normalized(vf)
print([str(t) for t in trace_conditions(conn)])

# %% [markdown]
# Numeric scalar invariants of the 6D extension, parameters bound.

# %%
bound = load_fixture("lorenz").vector_field(bind=True)
m = riemann_extension(connection_lorenz_normalized(bound))
b = curvature(m)
pts = sample_points([e for row in m.g for e in row] + list(b.riemann.values()), m.symbols, 20, random.Random(0))
print(numeric_invariants(b, m, pts))

# %%
rep = lorenz_cs_check(n_draws=10)
print("x=y reduction symbolic:", rep["diagonal_symbolic"], " max rel", rep["diagonal_max_rel"])
for st in rep["stationary"][:3]:
    print(st)
