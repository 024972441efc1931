# %% [markdown]
# # Solving dbar f - b d f = g
#
# h = (Id - bB)^(-1) g by the Neumann series, then f = C h.  On the torus
# C only reaches mean-zero data, so the solution carries mean(h) conj(z).

# %%
import numpy as np

from beurling_morrey import (BeltramiProblem, MorreyParams, apriori_ratio, default_morrey_family, gaussian,
                             make_grid, norm_growth_probe, power_weight, random_bandlimited, smooth_bump,
                             solve_beltrami)

spec = make_grid(256, 4.0)
w = power_weight(spec, 0.5)
P = MorreyParams(2.0, 0.5)
family = default_morrey_family(spec)
g = random_bandlimited(spec, np.random.default_rng(0), kmax=6) * gaussian(spec, 0, 1.0)
g = g - g.mean()

# %%
for amp in (0.3, 0.6, 0.9):
    b = smooth_bump(spec, 1.5, amplitude=amp)
    rep = solve_beltrami(BeltramiProblem(b, g, P, w), tol=1e-8, N_max=400)
    print(f"max|b| = {amp}: N = {rep.N_used:3d}  residual {rep.residual:.1e}  "
          f"||Df|| / ||g|| = {apriori_ratio(rep, w, P, family):.4f}")

# %%
b = smooth_bump(spec, 1.5, amplitude=0.5)
T = norm_growth_probe(b, range(1, 9), [g], w, P, family)
for N, r, e in zip(T.N, T.ratios[:, 0], T.envelope()):
    print(f"N = {int(N)}   ||b^N B^N g|| / ||g|| = {r:.4f}   envelope {e:.4f}")
