# %% [markdown]
# # Mean oscillation, medians and the CMO trends
#
# log|z| is the classical BMO function that is not in CMO: its oscillation
# on tiny squares around the origin does not fade.  A smooth bump's does.

# %%
import numpy as np

from beurling_morrey import (Square, bmo_norm, cmo_probe, lattice_family, make_grid, mean_oscillation,
                             median_oscillation, median_value, random_bandlimited, smooth_bump, truncated_log)

spec = make_grid(256, 4.0)
rng = np.random.default_rng(3)
f = random_bandlimited(spec, rng, kmax=6, real=True)
Q = Square(0.2, 0.6)

# %%
a = median_value(f, Q)
v = f.values.real[spec.mask(Q)]
print("median", a, " #{f > a} =", (v > a).sum(), " #{f < a} =", (v < a).sum(), " of", v.size)
print("median osc", median_oscillation(f, Q), "<= mean osc", mean_oscillation(f, Q),
      "<= 2 x median osc", 2 * median_oscillation(f, Q))

# %%
log = truncated_log(spec)
for K in (4, 6, 8):
    fam = [Square(0, spec.L / 2 ** k) for k in range(1, K)]
    print(f"log|z|, {K - 1} centered squares: BMO proxy {bmo_norm(log, fam):.4f}")

# %%
small = [lattice_family(spec.L / 2 ** k, 1.0) for k in (3, 4, 5, 6)]
large = [[Square(0, R)] for R in (spec.L / 8, spec.L / 4, spec.L / 2, spec.L)]
far = [[Square(d, spec.L / 16)] for d in (0.0, 1.0, 2.0, 3.0)]
for name, field in (("bump", smooth_bump(spec, 1.0)), ("log", log)):
    rep = cmo_probe(field, small, large, far)
    print(name, {k: round(v, 2) for k, v in rep.decay_ratios().items()})
