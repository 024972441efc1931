import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beurling_morrey.beltrami import (BeltramiError, BeltramiProblem, apriori_ratio, neumann_invert,
                                      norm_growth_probe, solve_beltrami)
from beurling_morrey.fields import gaussian, random_bandlimited, smooth_bump
from beurling_morrey.grid import ComplexField, make_grid, sample
from beurling_morrey.morrey import MorreyParams, default_morrey_family, morrey_norm
from beurling_morrey.transforms import beurling, cauchy, wirtinger
from beurling_morrey.weights import power_weight

PR = MorreyParams(2.0, 0.5)


def _rhs(spec, seed):
    f = random_bandlimited(spec, np.random.default_rng(seed), kmax=6) * gaussian(spec, 0, 1.0)
    return f - f.mean()


@pytest.fixture(scope="module")
def setup():
    s = make_grid(256, 4.0)
    return s, smooth_bump(s, 1.5, amplitude=0.5), power_weight(s, 0.5), default_morrey_family(s)


def test_problem_validation(setup):
    s, b, w, _ = setup
    g = _rhs(s, 0)
    with pytest.raises(BeltramiError):
        BeltramiProblem(b * 2.0, g, PR, w)
    with pytest.raises(BeltramiError):
        BeltramiProblem(gaussian(s, 0, 1.5) * 0.5, g, PR, w)
    with pytest.raises(BeltramiError):
        BeltramiProblem(b, _rhs(make_grid(128, 4.0), 0), PR, w)
    assert BeltramiProblem(b, g, PR, w).b_sup == pytest.approx(0.5)


def test_neumann_trivial_cases(setup):
    s, b, _, _ = setup
    g = _rhs(s, 1)
    r = neumann_invert(b * 0.0, g)
    assert r.N_used == 0 and np.array_equal(r.h.values, g.values)
    r = neumann_invert(b, g * 0.0)
    assert r.N_used == 0 and np.all(r.h.values == 0)
    with pytest.raises(ValueError):
        neumann_invert(b, g, tol=0)
    with pytest.raises(ValueError):
        neumann_invert(b, g, grouping="middle")


@settings(max_examples=8)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 0.9), st.sampled_from(["right", "left"]))
def test_neumann_geometric_envelope_and_inverse(seed, amp, grouping):
    s = make_grid(64, 4.0)
    b = smooth_bump(s, 1.5, amplitude=amp)
    g = _rhs(s, seed)
    r = neumann_invert(b, g, tol=1e-10, N_max=400, grouping=grouping)
    N = np.arange(r.increments.size)
    assert np.all(r.increments <= amp ** N * g.l2_norm() * (1 + 1e-9))
    # (Id - bB) h = g up to the dropped tail
    res = (r.h - b * beurling(r.h) - g).l2_norm()
    assert res <= 1e-10 / (1 - amp) * g.l2_norm() * 1.01


def test_neumann_warns_when_exhausted(setup):
    s, b, _, _ = setup
    with pytest.warns(RuntimeWarning):
        r = neumann_invert(b, _rhs(s, 2), tol=1e-14, N_max=3)
    assert not r.converged and r.N_used == 3


def test_zero_symbol_reduces_to_cauchy(setup):
    s, b, w, fam = setup
    g = _rhs(s, 3)
    rep = solve_beltrami(BeltramiProblem(b * 0.0, g, PR, w))
    assert np.allclose(rep.f_periodic.values, cauchy(g).values, atol=1e-14)
    assert (rep.dbar_f - g).l2_norm() <= 1e-9 * g.l2_norm()
    # |Df| = |g| + |Bg|, so the ratio sits between 1 and 2
    a = apriori_ratio(rep, w, PR, fam)
    assert 1 <= a <= 2 + 1e-9


def test_zero_rhs(setup):
    s, b, w, fam = setup
    rep = solve_beltrami(BeltramiProblem(b, sample(s, lambda z: 0j), PR, w))
    assert np.all(rep.f().values == 0) and rep.residual == 0
    assert np.isnan(apriori_ratio(rep, w, PR, fam))


@pytest.mark.parametrize("seed", range(3))
def test_solution_verified_independently(setup, seed):
    s, b, w, _ = setup
    g = _rhs(s, seed)
    tol = 1e-8
    rep = solve_beltrami(BeltramiProblem(b, g, PR, w), tol=tol)
    assert rep.converged and rep.N_used <= 40
    assert rep.residual <= 1e-6 and rep.projected_residual <= 10 * tol
    # the full solution includes mean(h) conj(z); its derivatives on the
    # periodic part plus the affine term satisfy the equation
    df = wirtinger(rep.f_periodic, "d")
    dbar = wirtinger(rep.f_periodic, "dbar") + rep.mean_h
    assert ((dbar - b * df) - g).l2_norm() <= 10 * tol * g.l2_norm()
    assert rep.tail_estimate < 1


def test_groupings_agree(setup):
    s, b, w, _ = setup
    g = _rhs(s, 4)
    prob = BeltramiProblem(b, g, PR, w)
    f1 = solve_beltrami(prob, tol=1e-9).f()
    f2 = solve_beltrami(prob, tol=1e-9, grouping="left").f()
    assert (f1 - f2).l2_norm() <= 10 * 1e-9 * g.l2_norm()


def test_mean_carrying_rhs_warns(setup):
    s, b, w, _ = setup
    g = _rhs(s, 5) + 0.3
    with pytest.warns(RuntimeWarning):
        rep = solve_beltrami(BeltramiProblem(b, g, PR, w))
    # the conj(z) term carries the mean, so both residuals are small
    assert rep.residual <= 1e-6 and rep.projected_residual <= 1e-6
    assert abs(rep.mean_h - 0.3) < 0.01


def test_apriori_ratio_stable_across_rhs(setup):
    s, b, w, fam = setup
    vals = []
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for seed in range(5):
            vals.append(apriori_ratio(solve_beltrami(BeltramiProblem(b, _rhs(s, seed), PR, w)), w, PR, fam))
    vals = np.array(vals)
    assert np.all(np.isfinite(vals)) and vals.max() / vals.min() <= 2


def test_growth_probe_constant_symbol_factorizes(setup):
    s, _, w, fam = setup
    f = _rhs(s, 6)
    c = ComplexField(s, np.full((s.n, s.n), 0.4 + 0j))
    T = norm_growth_probe(c, [1], [f], w, PR, fam)
    expect = 0.4 * morrey_norm(beurling(f), w, PR, fam) / morrey_norm(f, w, PR, fam)
    assert T.ratios[0, 0] == pytest.approx(expect, rel=1e-12)


def test_growth_probe_envelope(setup):
    s, b, w, fam = setup
    T = norm_growth_probe(b, range(1, 9), [_rhs(s, 7), _rhs(s, 8)], w, PR, fam)
    assert np.all(T.within_envelope())
    assert T.b_sup == pytest.approx(0.5)
    with pytest.raises(ValueError):
        norm_growth_probe(b, [0, 1], [_rhs(s, 7)], w, PR, fam)


def test_envelope_shape_for_half():
    N = np.arange(1, 30)
    env = N ** 2 * 0.5 ** N
    d = np.diff(env)
    assert np.all(d[6:] < 0)       # decreasing from N = 7 on
    assert np.all(d[2:] < 0)       # in fact already from N = 3
    assert d[1] > 0
