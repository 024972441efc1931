# %% [markdown]
# # The Beurling transform on a periodic grid
#
# Fields live on an n x n grid over [-L, L)^2.  The transform is the
# Fourier multiplier conj(xi)/xi, so plane waves are eigenfunctions and
# mean-zero fields keep their L2 norm.

# %%
import numpy as np

from beurling_morrey import (beurling, beurling_power, beurling_quadrature, cauchy, gaussian, grid_mode,
                             make_grid, random_bandlimited, smooth_bump, wirtinger)

spec = make_grid(256, 4.0)
print("grid spacing h =", spec.h)

# %%
# the (1, 1) mode has multiplier (1 - i)/(1 + i) = -i
f = grid_mode(spec, 1, 1)
print("B e_(1,1) / e_(1,1) =", np.round((beurling(f).values / f.values).mean(), 12))

# %%
rng = np.random.default_rng(0)
f = random_bandlimited(spec, rng, kmax=16)
print("||Bf|| / ||f|| - 1 =", beurling(f).l2_norm() / f.l2_norm() - 1)
g = f
for _ in range(4):
    g = beurling(g)
print("B^4 by power vs composition:", (beurling_power(f, 4) - g).l2_norm() / g.l2_norm())

# %% [markdown]
# The Cauchy transform inverts dbar (up to the mean) and d C = B.

# %%
g = gaussian(spec, 0.3 - 0.2j, 0.8)
Cg = cauchy(g)
print("dbar C g - (g - <g>):", (wirtinger(Cg, "dbar") - (g - g.mean())).l2_norm() / g.l2_norm())
g0 = g - g.mean()
print("d C g - B g:        ", (wirtinger(cauchy(g0), "d") - beurling(g0)).l2_norm() / g.l2_norm())

# %% [markdown]
# Truncated quadrature: summing the kernel -1/(pi d^2) outside a smooth
# cutoff at scale eta.  For smooth compactly supported input it approaches
# the multiplier as eta shrinks to two grid cells.

# %%
f = smooth_bump(spec, 1.2) - 1.3 * smooth_bump(spec, 0.9, 0.5j)
B = beurling(f - f.mean())
for k in (16, 8, 4, 2):
    Bq = beurling_quadrature(f, k * spec.h)
    print(f"eta = {k:2d}h   relative L2 gap {(Bq - B).l2_norm() / B.l2_norm():.4f}")
