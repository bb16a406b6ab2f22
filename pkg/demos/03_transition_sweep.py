# %% [markdown]
# # Locating the self-trapping transition
#
# Sweep g and compute the time-averaged return probability over [T/2, T].
# The defaults here are small enough to run in a couple of minutes on one
# core; set NLQWALK_JOBS to use more processes, or raise T and M for a
# sharper curve.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from nlqwalk import AverageConfig, SweepSpec, estimate_transition, make_cycle, make_path, sweep_g
from nlqwalk.analysis import default_jobs

avg = AverageConfig(total_time=100, samples=150)
g_values = tuple(np.arange(0, 8.01, 0.5))
scenarios = {
    "P_31, middle": (make_path(31), 15),
    "P_31, end": (make_path(31), 0),
    "C_31": (make_cycle(31), 0),
}

# %%
results = {}
for name, (lat, r) in scenarios.items():
    pts = sweep_g(SweepSpec(g_values, lat, r, avg), jobs=default_jobs())
    results[name] = pts
    print(f"{name}: transition near g = {estimate_transition(pts)}")

# %%
fig, ax = plt.subplots(figsize=(6, 4))
for name, pts in results.items():
    ax.plot([q.g for q in pts], [q.p_bar for q in pts], "o-", ms=3, label=name)
ax.axhline(0.5, color="gray", ls=":")
ax.set_xlabel("g")
ax.set_ylabel("time-averaged p_r")
ax.legend()
fig.savefig("transition_sweep.png", dpi=120)
