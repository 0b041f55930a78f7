# %%
# Running a catalog experiment from Python at reduced scale.
#
# The same runs are available as `gwheavy experiment <name> --seed S`.
from gwheavy import montecarlo as mc

cfg = mc.ExperimentConfig("nk_root_tail", sizes=[20_000], replications=5_000, seed=11,
                          params={"t_min": 30, "t_max": 3_000})
summary = mc.run(cfg)
print(summary.fits["Nk_root_tail_n20000"])
print(summary.verdicts)

# %%
# Same seed, different worker count, same bytes.
a = mc.run(mc.ExperimentConfig("height_theta", sizes=[10_001], replications=400, seed=5, workers=1)).to_json()
b = mc.run(mc.ExperimentConfig("height_theta", sizes=[10_001], replications=400, seed=5, workers=2)).to_json()
print(a == b)
