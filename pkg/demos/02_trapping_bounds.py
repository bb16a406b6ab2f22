# %% [markdown]
# # Analytic trapping bounds
#
# The bound function f(p) = 2 sqrt(deg)/sqrt(p(1-p)) + 2/p controls how much
# probability a vertex of degree deg can lose. For |g| above min f the
# probability is confined above the larger root p_plus of f(p) = |g|.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from nlqwalk import eval_f, minimize_f, required_g, trap_roots

p = np.linspace(0.02, 0.995, 500)
fig, ax = plt.subplots(figsize=(6, 4))
for deg in (1, 2):
    p_star, f_min = minimize_f(deg)
    ax.plot(p, eval_f(deg, p), label=f"deg {deg}: min {f_min:.3f} at {p_star:.4f}")
ax.axhline(20, color="gray", ls=":")
ax.set_ylim(0, 60)
ax.set_xlabel("p")
ax.set_ylabel("f(p)")
ax.legend()
fig.savefig("bound_function.png", dpi=120)

# %% [markdown]
# Worked numbers: the trapping threshold per degree and the forward and
# inverse maps between |g| and p_plus.

# %%
for deg in (1, 2):
    print(deg, minimize_f(deg))
print("p_plus(deg 1, g=20) =", trap_roots(1, 20).p_plus)
print("p_plus(deg 1, g=40) =", trap_roots(1, 40).p_plus)
print("g needed for p >= 0.95 at deg 2:", required_g(2, 0.95))

# %% [markdown]
# How the guaranteed floor grows with |g|.

# %%
gs = np.linspace(9.5, 100, 200)
fig, ax = plt.subplots(figsize=(6, 4))
for deg in (1, 2):
    ax.plot(gs, [trap_roots(deg, g).p_plus for g in gs], label=f"deg {deg}")
ax.set_xlabel("|g|")
ax.set_ylabel("p_plus")
ax.legend()
fig.savefig("p_plus_vs_g.png", dpi=120)
