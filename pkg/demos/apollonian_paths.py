# %%
# Long simple paths in random Apollonian networks.
#
# A network with m subdivisions is dual to a ternary tree with 3m + 1
# nodes.  Walking the 2-heavy part of that tree gives a simple path.
from gwheavy import apollonian
from gwheavy.sampler import make_rng

for m in (10, 1_000, 100_000):
    net = apollonian.sample_uniform(m, make_rng(3, m))
    path = apollonian.heavy_simple_path(net)
    print(m, len(path), len(path) / max(m, 1), apollonian.verify_simple_path(net, path))

# %%
# The path visits 2 + (number of subdivided 2-heavy triangles) vertices.
print(len(path) == 2 + path.selected_internal)
