# %% [markdown]
# # Muckenhoupt weights and weighted Morrey norms
#
# Suprema over all squares are replaced by finite declared families.

# %%
import numpy as np

from beurling_morrey import (MorreyParams, Square, ap_constant, centered_family, constant_weight,
                             default_morrey_family, doubling_check, gaussian, make_grid, morrey_norm,
                             power_weight, weighted_measure)

spec = make_grid(256, 4.0)

# %%
# |z| on Q(0, 1): exact value (4/3)(sqrt 2 + asinh 1)
w1 = power_weight(spec, 1.0)
exact = 4 / 3 * (np.sqrt(2) + np.arcsinh(1))
print("w(Q(0,1)) grid sum", weighted_measure(w1, Square(0, 1.0)), "exact", exact)

# %%
fam = centered_family([spec.L / 8, spec.L / 4, spec.L / 2])
for alpha in (0.0, 0.5, 1.0, 1.9):
    print(f"alpha = {alpha:3.1f}   [w]_A2 over family = {ap_constant(power_weight(spec, alpha), fam).constant:.4f}")
# outside the A_2 range the estimate keeps growing as the grid resolves the origin
for n in (128, 256, 512):
    s = make_grid(n, 4.0)
    print(f"|z|^2.5, n = {n}:", round(ap_constant(power_weight(s, 2.5), centered_family([0.5, 1, 2])).constant, 2))

# %%
for alpha in (-1.0, 0.5, 1.5):
    d, ok = doubling_check(power_weight(spec, alpha), Square(0, spec.L / 16), [2, 4, 8])
    print(f"doubling exponent of |z|^{alpha}: {d:.4f} (expected {2 + alpha})")

# %%
P = MorreyParams(p=2.0, kappa=0.5)
family = default_morrey_family(spec)
w = power_weight(spec, 0.5)
f = gaussian(spec, 0.5, 0.4)
print("family size", len(family))
print("||f|| =", morrey_norm(f, w, P, family), "  ||3f|| =", morrey_norm(3 * f, w, P, family))
print("constant weight:", morrey_norm(f, constant_weight(spec), P, family))
