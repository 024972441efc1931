import numpy as np
import pytest
from hypothesis import given, strategies as st

from beurling_morrey.fields import gaussian, random_bandlimited
from beurling_morrey.grid import GridError, Square, make_grid, sample
from beurling_morrey.morrey import (MorreyParams, default_morrey_family, fk_diagnostics, morrey_norm,
                                    morrey_terms, weighted_lp_over_square)
from beurling_morrey.weights import constant_weight, power_weight, weighted_measure, weighted_measure_of_mask


@pytest.mark.parametrize("p,kappa", [(1.0, 0.5), (2.0, 0.0), (2.0, 1.0), (np.inf, 0.5), (0.5, 0.5)])
def test_params_ranges(p, kappa):
    with pytest.raises(ValueError):
        MorreyParams(p, kappa)


def test_lp_over_square_basic(g64):
    s = g64
    Q = Square(0.2, 0.75)
    one = constant_weight(s)
    assert weighted_lp_over_square(np.zeros((64, 64)), one, Q, 2.0) == 0
    area = s.mask(Q).sum() * s.cell_area
    assert weighted_lp_over_square(np.ones((64, 64)), one, Q, 3.0) == pytest.approx(area ** (1 / 3), rel=1e-14)
    w = power_weight(s, 0.5)
    E = s.mask(Square(0.5, 0.25))
    chi = E.astype(float)
    assert weighted_lp_over_square(chi, w, Q, 2.0) == pytest.approx(
        weighted_measure_of_mask(w, E & s.mask(Q)) ** 0.5, rel=1e-14)
    with pytest.raises(GridError):
        weighted_lp_over_square(chi, w, Square(50, 0.1), 2.0)


def test_single_square_indicator(g64):
    s = g64
    w = power_weight(s, 1.0)
    pr = MorreyParams(2.0, 0.3)
    Q0 = Square(-0.5 + 0.5j, 0.5)
    chi = s.mask(Q0).astype(float)
    assert morrey_norm(chi, w, pr, [Q0]) == pytest.approx(weighted_measure(w, Q0) ** ((1 - pr.kappa) / pr.p),
                                                           rel=1e-12)
    assert morrey_norm(np.zeros((64, 64)), w, pr, [Q0]) == 0


def test_indicator_bound_over_family(g128):
    s = g128
    w = power_weight(s, 0.5)
    pr = MorreyParams(2.0, 0.5)
    F = s.mask(Square(0.3 - 0.2j, 0.4))
    wF = weighted_measure_of_mask(w, F)
    fam = default_morrey_family(s)
    # per-square oracle: (w(Q cap F))^(1/p) / w(Q)^(kappa/p)
    direct = max(weighted_measure_of_mask(w, F & s.mask(Q)) ** 0.5 / weighted_measure(w, Q) ** 0.25
                 for Q in fam)
    got = morrey_norm(F.astype(float), w, pr, fam)
    assert got == pytest.approx(direct, rel=1e-12)
    assert got <= wF ** ((1 - pr.kappa) / pr.p) * (1 + 1e-12)


@given(st.floats(1e-6, 1e3), st.floats(0, 2 * np.pi), st.integers(0, 1000))
def test_homogeneity(mag, arg, seed):
    c = mag * np.exp(1j * arg)
    s = make_grid(32, 2.0)
    f = random_bandlimited(s, np.random.default_rng(seed), kmax=4)
    w = power_weight(s, 0.5)
    pr = MorreyParams(2.5, 0.4)
    fam = default_morrey_family(s, levels=2, lattice=2)
    assert morrey_norm(c * f, w, pr, fam) == pytest.approx(abs(c) * morrey_norm(f, w, pr, fam), rel=1e-12)


@given(st.integers(0, 1000), st.integers(1, 8))
def test_monotone_in_family(seed, k):
    s = make_grid(32, 2.0)
    f = random_bandlimited(s, np.random.default_rng(seed), kmax=4)
    w = power_weight(s, 1.0)
    pr = MorreyParams(2.0, 0.5)
    fam = default_morrey_family(s, levels=3, lattice=2)
    assert morrey_norm(f, w, pr, fam[:k]) <= morrey_norm(f, w, pr, fam)


def test_kappa_regimes():
    s = make_grid(64, 4.0)
    f = gaussian(s, 0, 1.0)
    w = constant_weight(s)
    big, small = Square(0, 2.0), Square(0, 0.25)
    assert weighted_measure(w, big) > 1 and weighted_measure(w, small) < 1
    ks = [0.2, 0.5, 0.8]
    vb = [morrey_norm(f, w, MorreyParams(2, k), [big]) for k in ks]
    vs = [morrey_norm(f, w, MorreyParams(2, k), [small]) for k in ks]
    assert vb[0] > vb[1] > vb[2]
    assert vs[0] < vs[1] < vs[2]


def test_terms_and_empty_family(g64):
    w = constant_weight(g64)
    pr = MorreyParams(2, 0.5)
    with pytest.raises(ValueError):
        morrey_norm(np.ones((64, 64)), w, pr, [])
    fam = default_morrey_family(g64)
    assert len(fam) == 3 * 81
    assert morrey_terms(np.ones((64, 64)), w, pr, fam).shape == (len(fam),)


def test_fk_diagnostics(g64):
    s = g64
    w = power_weight(s, 0.5)
    pr = MorreyParams(2, 0.5)
    fam = default_morrey_family(s, levels=2, lattice=2)
    zero = sample(s, lambda z: 0.0)
    rep = fk_diagnostics([zero], w, pr, fam, 1.0, [s.h, 2j * s.h])
    assert rep.bounded[0] == rep.tail[0] == rep.equicontinuity[0] == 0
    f = sample(s, lambda z: Square(0, 1.0).contains_points(z) * np.cos(z.real))
    rep = fk_diagnostics([f], w, pr, fam, 4.0 / np.sqrt(2) + 0.1, [0j])
    assert rep.tail[0] == 0 and rep.equicontinuity[0] == 0 and rep.bounded[0] > 0
    rep = fk_diagnostics([f], w, pr, fam, 1.5, [s.h, -3 * s.h])
    assert rep.equicontinuity[0] > 0 and len(list(rep.rows())) == 1
    with pytest.raises(GridError):
        fk_diagnostics([f], w, pr, fam, 1.0, [0.3 * s.h])
