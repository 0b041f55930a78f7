# %%
# Heavy paths in conditioned Galton-Watson trees.
#
# Sample a uniform binary tree, decompose it by subtree ranks and look at
# the heavy path, the 2-heavy tree and the distances to it.
import math

import numpy as np

from gwheavy import heavy, limits
from gwheavy.offspring import make_named
from gwheavy.sampler import make_rng, sample_conditional
from gwheavy.tree import contour_process, height

dist = make_named("full_binary")
tree = sample_conditional(dist, 100_001, make_rng(1))
d = heavy.compute(tree)
rep = heavy.report(tree, k=2, decomp=d)
print({key: rep[key] for key in ("n", "L", "H", "B", "maxdist", "patterns")})

# %%
# The heavy path length is of order sqrt(n), like the height, but smaller.
prof = heavy.heavy_path(tree, d)
print("L / sqrt(n) =", prof.length / math.sqrt(tree.n), " H / sqrt(n) =", height(tree) / math.sqrt(tree.n))
print("limit of E[L_n]/sqrt(n):", 2 / limits.phi(0.5))

# %%
# Following the longest superlevel component of the contour reproduces
# the heavy path exactly.
trace = limits.heavy_fragmentation(contour_process(tree), 1)
print(trace.t_infinity == prof.length, trace.measures[:6])

# %%
# A quick look at the mean of L_n / sqrt(n) over a few sizes.
for n in (1001, 10001, 100001):
    xs = [heavy.heavy_path(sample_conditional(dist, n, make_rng(7, n, r))).length for r in range(200)]
    print(n, np.mean(xs) / math.sqrt(n))
