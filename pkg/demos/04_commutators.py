# %% [markdown]
# # Commutators with BMO symbols
#
# Product sets split a square by the median of b on a shifted copy; the
# test functions f_j are signed level-set indicators with zero integral.
# The commutator images of translated test functions stay apart for log|z|
# and nearly coincide for a compactly supported smooth symbol.

# %%
import numpy as np

from beurling_morrey import (MorreyParams, Square, bmo_norm, build_test_family, default_morrey_family,
                             family_invariants, gaussian, make_grid, oscillation_vs_commutator,
                             power_weight, product_set_invariants, product_sets, random_bandlimited,
                             separation_experiment, smooth_bump, truncated_log)
from beurling_morrey.experiments import separation_family, separation_squares

spec = make_grid(256, 4.0)
w = power_weight(spec, 0.5)
P = MorreyParams(2.0, 0.5)
family = default_morrey_family(spec)

# %%
b = random_bandlimited(spec, np.random.default_rng(1), kmax=4, real=True) * gaussian(spec, 0, 1.5)
ps = product_sets(b, Square(-0.4 - 0.4j, 8 * spec.h))
print("product-set invariants:", product_set_invariants(ps, b))

# %%
rep = oscillation_vs_commutator(b, Square(0, 8 * spec.h), w, P, family)
print("O(b;Q) =", rep.terms[0], " commutator middle term =", rep.terms[6], " ratio =", rep.chain_constant)

# %%
blog = truncated_log(spec)
squares = separation_squares(spec)
tf = build_test_family(blog, squares, w, P)
print("test-family invariants:", family_invariants(tf, blog))

# both symbols scaled to the same BMO size before comparing
probe = [Square(0, spec.L / 2 ** k) for k in range(1, 6)]
bump = smooth_bump(spec, 0.6)
for name, sym in (("log|z|", blog), ("bump", bump)):
    sym = sym * (1.0 / bmo_norm(sym, probe))
    rep = separation_experiment(tf, sym, w, separation_family(squares))
    print(f"{name:7s} pairwise separations", np.round(rep.separations, 5))
