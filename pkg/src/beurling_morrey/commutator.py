"""Commutators ``[b, B]`` and the test-function machinery built on them.

Two evaluation routes are available:

* grid routes (:func:`commutator_apply`): FFT multiplier on the torus or the
  truncated quadrature at scale ``eta``;
* :func:`commutator_off_support`, a direct kernel sum from a compactly
  supported input to arbitrary target points outside its support.  No
  principal value is needed there, the result is the plane operator and
  targets may lie far outside the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .grid import ComplexField, Square, square_mask
from .morrey import MorreyParams, morrey_norm
from .oscillation import lower_median, mean_oscillation
from .transforms import beurling, kernel_b, truncated_commutator
from .weights import Weight, quadrature_points, weighted_measure, weighted_measure_of_mask, \
    weighted_measure_quadrature


class CommutatorError(ValueError):
    pass


def commutator_apply(b: ComplexField, f: ComplexField, eta: float | None = None) -> ComplexField:
    """``b B f - B(b f)``; FFT multiplier when ``eta`` is None, else ``B_eta``."""
    if eta is None:
        return b * beurling(f) - beurling(b * f)
    return truncated_commutator(b, f, eta)


def commutator_off_support(b_src: np.ndarray, f_src: np.ndarray, src: np.ndarray, cell_area: float,
                           targets: np.ndarray, b_targets: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """``sum_u (b(z) - b(u)) K_B(z - u) f(u) h^2`` for targets off the support.

    ``src``/``b_src``/``f_src`` are flat arrays over the support samples.
    """
    src = np.asarray(src).ravel()
    b_src = np.asarray(b_src).ravel()
    f_src = np.asarray(f_src).ravel()
    tz = np.asarray(targets).ravel()
    bt = np.asarray(b_targets).ravel()
    out = np.empty(tz.size, dtype=complex)
    for s in range(0, tz.size, chunk):
        d = tz[s:s + chunk, None] - src[None, :]
        if np.any(d == 0):
            raise CommutatorError("target coincides with a source sample")
        K = kernel_b(d)
        out[s:s + chunk] = cell_area * ((bt[s:s + chunk, None] - b_src[None, :]) * K) @ f_src
    return out


# --------------------------------------------------------------------------
# product sets

@dataclass
class ProductSets:
    Q: Square
    Q_tilde: Square
    alpha: float
    E1: np.ndarray
    E2: np.ndarray
    F1: np.ndarray
    F2: np.ndarray
    mask_Q: np.ndarray = field(repr=False)
    mask_Qt: np.ndarray = field(repr=False)

    def pairs(self, j: int):
        return (self.E1, self.F1) if j == 1 else (self.E2, self.F2)


def shifted_square(Q: Square) -> Square:
    """``Q + (4r + 4ri)``."""
    return Q.translate(4 * Q.r * (1 + 1j))


def product_sets(b: ComplexField, Q: Square, guard: bool = True) -> ProductSets:
    if not b.is_real():
        raise CommutatorError("product sets need a real-valued symbol")
    spec = b.spec
    Qt = shifted_square(Q)
    if guard and not (spec.inside_central_half(Q) and spec.inside_central_half(Qt)):
        raise CommutatorError(f"shifted square {Qt} leaves the central half-window")
    mQ = square_mask(spec, Q)
    mQt = square_mask(spec, Qt)
    if not mQ.any() or not mQt.any():
        raise CommutatorError("square without samples")
    bv = b.values.real
    alpha = lower_median(bv[mQt])
    return ProductSets(Q, Qt, alpha,
                       mQ & (bv >= alpha), mQ & (bv <= alpha),
                       mQt & (bv <= alpha), mQt & (bv >= alpha), mQ, mQt)


def product_set_invariants(ps: ProductSets, b: ComplexField, max_side: int = 32,
                           rng: np.random.Generator | None = None) -> dict:
    """Check the four discrete product-set properties.

    Pairwise properties are checked on every pair of a subsample of at most
    ``max_side**2`` points from each of ``E_j`` and ``F_j``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    z = b.spec.z
    bv = b.values.real
    n_t = int(ps.mask_Qt.sum())
    out = {
        "cover": bool(np.array_equal(ps.E1 | ps.E2, ps.mask_Q) and np.array_equal(ps.F1 | ps.F2, ps.mask_Qt)),
        "half": bool(ps.F1.sum() >= n_t // 2 and ps.F2.sum() >= n_t // 2),
    }
    dom = True
    sign = True
    for j in (1, 2):
        E, F = ps.pairs(j)
        ie, iff = np.flatnonzero(E), np.flatnonzero(F)
        cap = max_side * max_side
        if ie.size > cap:
            ie = np.sort(rng.choice(ie, cap, replace=False))
        if iff.size > cap:
            iff = np.sort(rng.choice(iff, cap, replace=False))
        if ie.size == 0 or iff.size == 0:
            continue
        bz, bu = bv.ravel()[ie], bv.ravel()[iff]
        diff = bz[:, None] - bu[None, :]
        dom &= bool(np.all(np.abs(bz - ps.alpha)[:, None] <= np.abs(diff)))
        zz, uu = z.ravel()[ie], z.ravel()[iff]
        geo = (zz.real[:, None] - uu.real[None, :]) * (zz.imag[:, None] - uu.imag[None, :])
        sign &= bool(np.all(geo > 0) or np.all(geo < 0))
        sign &= bool(np.all(diff >= 0) or np.all(diff <= 0))
    out["domination"] = dom
    out["single_sign"] = sign
    return out


# --------------------------------------------------------------------------
# test family f_j

@dataclass
class TestFamily:
    __test__ = False  # not a pytest class

    squares: list
    fields: list
    a: np.ndarray
    delta: float
    K0: int
    Q1: list
    Q2: list
    scales: np.ndarray
    medians: np.ndarray
    oscillations: np.ndarray
    params: MorreyParams
    counts: np.ndarray

    def support_samples(self, j: int):
        """Grid indices, coordinates and values of ``f_j`` inside ``Q_j``."""
        f = self.fields[j]
        m = square_mask(f.spec, self.squares[j])
        return m, f.spec.z[m], f.values[m]


def build_test_family(b: ComplexField, squares: Sequence[Square], w: Weight,
                      params: MorreyParams, K0: int = 2, delta: float | None = None,
                      guard: bool = True) -> TestFamily:
    """Mean-zero test functions adapted to the level sets of ``b``.

    ``f_j = w(Q_j)^((kappa-1)/p) (chi_{b > a_j} - chi_{b < a_j} - a_j chi_{Q_j})``
    with the median taken on ``Q_j`` and ``a_j`` fixed by a vanishing sample sum.
    ``delta=None`` takes 0.9 times the smallest oscillation.
    """
    if not b.is_real():
        raise CommutatorError("test family needs a real-valued symbol")
    spec = b.spec
    squares = list(squares)
    if not squares:
        raise CommutatorError("no squares given")
    osc = np.array([mean_oscillation(b, Q) for Q in squares])
    # oscillation at rounding level counts as none
    flat = [j for j, o in enumerate(osc) if o <= 1e-12 * max(1.0, float(np.max(np.abs(b.values))))]
    if flat:
        raise CommutatorError(f"b has no oscillation on Q_j for j in {flat}")
    if delta is None:
        delta = 0.9 * float(osc.min())
    if not delta > 0:
        raise CommutatorError("oscillation threshold must be positive")
    bad = [j for j, o in enumerate(osc) if not o > delta]
    if bad:
        raise CommutatorError(f"O(b; Q_j) <= delta for j in {bad}")
    if guard:
        for Q in squares:
            if not spec.inside_central_half(Q):
                raise CommutatorError(f"{Q} leaves the central half-window")
    bv = b.values.real
    fields, a, Q1s, Q2s, scales, meds, counts = [], [], [], [], [], [], []
    for Q in squares:
        m = square_mask(spec, Q)
        alpha = lower_median(bv[m])
        q1 = m & (bv > alpha)
        q2 = m & (bv < alpha)
        cnt = int(m.sum())
        aj = (int(q1.sum()) - int(q2.sum())) / cnt
        s = weighted_measure(w, Q) ** ((params.kappa - 1) / params.p)
        vals = s * (q1.astype(float) - q2.astype(float) - aj * m)
        fields.append(ComplexField(spec, vals))
        a.append(aj)
        Q1s.append(q1)
        Q2s.append(q2)
        scales.append(s)
        meds.append(alpha)
        counts.append(cnt)
    return TestFamily(squares, fields, np.array(a), float(delta), int(K0), Q1s, Q2s,
                      np.array(scales), np.array(meds), osc, params, np.array(counts))


def family_invariants(tf: TestFamily, b: ComplexField) -> dict:
    bv = b.values.real
    out = {"mean_zero": True, "a_bound": True, "support": True, "sign": True, "two_sided": True}
    for j, Q in enumerate(tf.squares):
        f = tf.fields[j].values.real
        m = square_mask(b.spec, Q)
        s = tf.scales[j]
        out["mean_zero"] &= bool(abs(f.sum()) <= 1e-12 * max(1.0, np.abs(f).sum()))
        out["a_bound"] &= bool(abs(tf.a[j]) <= 0.5 + 1.0 / tf.counts[j])
        out["support"] &= bool(np.all(f[~m] == 0))
        out["sign"] &= bool(np.all(f[m] * (bv[m] - tf.medians[j]) >= 0))
        lv = tf.Q1[j] | tf.Q2[j]
        af = np.abs(f[lv])
        out["two_sided"] &= bool(np.all(af >= s / 2) and np.all(af <= 1.5 * s))
    return out


# --------------------------------------------------------------------------
# test-function bounds on shifted dilates

def shifted_dilate(Q: Square, k: int) -> Square:
    """``3^(k-1) Q + 3^k r e_x``."""
    return Square(Q.center + 3 ** k * Q.r, 3 ** (k - 1) * Q.r)


def inclusions_hold(Q: Square, k: int) -> bool:
    """``3^(k-1) Q  in  4 Q_k  in  3^(k+1) Q`` on exact coordinates."""
    Qk = shifted_dilate(Q, k)
    return Qk.scaled(4).contains_square(Q.scaled(3 ** (k - 1))) and \
        Q.scaled(3 ** (k + 1)).contains_square(Qk.scaled(4))


def annulus_points(Q: Square, k: int, m: int):
    """Midpoints of ``3^(k+1) Q \\ 3^k Q`` on a ``3m x 3m`` grid; returns points and cell area."""
    outer = Q.scaled(3 ** (k + 1))
    pts = quadrature_points(outer, 3 * m)
    keep = np.ones((3 * m, 3 * m), dtype=bool)
    keep[m:2 * m, m:2 * m] = False
    cell = (2 * outer.r / (3 * m)) ** 2
    return pts[keep], cell


def _b_eval(b_func, pts):
    return np.asarray(b_func(pts), dtype=float)


@dataclass
class BoundsRow:
    j: int
    k: int
    lower_lhs: float
    lower_ref: float
    upper_lhs: float
    upper_ref: float
    w_Qk: float
    w_3kQ: float

    @property
    def C1(self) -> float:
        return self.lower_lhs / self.lower_ref

    @property
    def C2(self) -> float:
        return self.upper_lhs / self.upper_ref

    def as_dict(self) -> dict:
        return {"j": self.j, "k": self.k, "lower_lhs": self.lower_lhs, "lower_ref": self.lower_ref,
                "C1": self.C1, "upper_lhs": self.upper_lhs, "upper_ref": self.upper_ref, "C2": self.C2,
                "w_Qk_over_w_3kQ": self.w_Qk / self.w_3kQ}


def lower_upper_bounds(tf: TestFamily, b: ComplexField, b_func: Callable, w: Weight,
                       k_range: Sequence[int], m: int = 48) -> list[BoundsRow]:
    """Integrals of ``|[b, B] f_j|^p w`` over ``Q_j^k`` and the annuli.

    Both regions are disjoint from ``Q_j = supp f_j`` so the commutator is the
    direct kernel sum from the grid samples of ``f_j``.  Target integrals use
    ``m x m`` midpoint nodes (``3m x 3m`` minus the core for the annulus), with
    ``b_func`` and ``w.func`` evaluated exactly there.
    """
    if w.func is None:
        raise CommutatorError("weight needs a formula for off-grid targets")
    p, kappa = tf.params.p, tf.params.kappa
    rows = []
    bv = b.values.real
    h2 = b.spec.cell_area
    for j, Q in enumerate(tf.squares):
        msk, src, fvals = tf.support_samples(j)
        bsrc = bv[msk]
        wQ = weighted_measure(w, Q)
        for k in k_range:
            if k < 1:
                raise CommutatorError("k must be at least 1")
            Qk = shifted_dilate(Q, k)
            pts = quadrature_points(Qk, m).ravel()
            G = commutator_off_support(bsrc, fvals, src, h2, pts, _b_eval(b_func, pts))
            wt = w.func(pts)
            cell = (2 * Qk.r / m) ** 2
            lower = float(np.sum(np.abs(G) ** p * wt) * cell)
            apts, acell = annulus_points(Q, k, m // 2 if m >= 32 else m)
            Ga = commutator_off_support(bsrc, fvals, src, h2, apts, _b_eval(b_func, apts))
            upper = float(np.sum(np.abs(Ga) ** p * w.func(apts)) * acell)
            w3k = weighted_measure_quadrature(w, Q.scaled(3 ** k), m=2 * m)
            wQk = float(np.sum(wt) * cell)
            common = wQ ** (kappa - 1) * w3k / 3 ** (2 * k * p)
            rows.append(BoundsRow(j, k, lower, tf.delta ** p * common, upper, common, wQk, w3k))
    return rows


# --------------------------------------------------------------------------
# separation of commutator images

def dilates_disjoint(squares: Sequence[Square], factor: float) -> bool:
    return all(not A.scaled(factor).intersects(B.scaled(factor)) for A, B in combinations(squares, 2))


def radii_admissible(squares: Sequence[Square], cmin: float | None = None,
                     cmax: float | None = None) -> bool:
    r = np.array([Q.r for Q in squares])
    if r.size < 2:
        return True
    d = np.diff(r)
    if np.all(d <= 0) or np.all(d >= 0):
        return True
    return cmin is not None and cmax is not None and bool(np.all((r >= cmin) & (r <= cmax)))


@dataclass
class SeparationReport:
    pairs: list
    separations: np.ndarray

    @property
    def minimum(self) -> float | None:
        return float(self.separations.min()) if self.separations.size else None


def separation_experiment(tf: TestFamily, b: ComplexField, w: Weight, family: Sequence[Square],
                          C1: float = 3.0, cmin: float | None = None,
                          cmax: float | None = None, eta: float | None = None,
                          fft: bool = False) -> SeparationReport:
    """Pairwise Morrey distances ``||[b,B] f_j - [b,B] f_m||``.

    The commutators use the truncated quadrature at ``eta`` (default ``2h``),
    a linear sum with the exact kernel away from the diagonal; ``fft=True``
    switches to the torus multiplier, whose lattice kernel is inaccurate far
    from indicator-type inputs.
    """
    if not dilates_disjoint(tf.squares, 3 * C1):
        raise CommutatorError(f"dilates 3*C1*Q_j (C1 = {C1}) are not pairwise disjoint")
    if not radii_admissible(tf.squares, cmin, cmax):
        raise CommutatorError("radii are neither monotone nor pinched")
    if not fft and eta is None:
        eta = 2 * b.spec.h
    G = [commutator_apply(b, f, None if fft else eta).values for f in tf.fields]
    pairs, seps = [], []
    for i, j in combinations(range(len(G)), 2):
        pairs.append((i, j))
        seps.append(morrey_norm(G[i] - G[j], w, tf.params, family))
    return SeparationReport(pairs, np.array(seps))


# --------------------------------------------------------------------------
# oscillation versus commutator chain

CHAIN_LABELS = (
    "O(b;Q)",
    "mean|b-alpha|",
    "sum int_E int_F |b(z)-alpha|/|z-u|^2",
    "sum int_E int_F |b(z)-b(u)| |xy|/|z-u|^4",
    "sum int_E |int_F (b(z)-b(u)) Im K|",
    "sum int_E |[b,B] chi_F|",
    "sum int_Q |[b,B] chi_F|",
    "sum ||[b,B] chi_F|| w(Q)^((k-1)/p)",
    "sum ||[b,B]|| ||chi_F|| w(Q)^((k-1)/p)",
    "sum ||[b,B]|| w(F)^((1-k)/p) w(Q)^((k-1)/p)",
    "2 ||[b,B]|| w(Qt)^((1-k)/p) w(Q)^((k-1)/p)",
    "||[b,B]||",
)


@dataclass
class ChainReport:
    terms: np.ndarray
    kernel_inequality: bool
    operator_norm: float
    probe_ratios: np.ndarray
    sets: ProductSets = field(repr=False)

    @property
    def step_ratios(self) -> np.ndarray:
        t = self.terms
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t[1:] > 0, t[:-1] / t[1:], np.where(t[:-1] > 0, np.inf, 0.0))

    @property
    def chain_constant(self) -> float:
        """``O(b;Q) / sum_j (1/|Q|) int_Q |[b,B] chi_{F_j}|``."""
        return float(self.terms[0] / self.terms[6]) if self.terms[6] > 0 else (
            0.0 if self.terms[0] == 0 else np.inf)


def operator_norm_proxy(b: ComplexField, probes: Sequence[ComplexField], w: Weight,
                        params: MorreyParams, family: Sequence[Square]) -> tuple[float, np.ndarray]:
    ratios = []
    for g in probes:
        den = morrey_norm(g, w, params, family)
        if den == 0:
            continue
        ratios.append(morrey_norm(commutator_apply(b, g), w, params, family) / den)
    ratios = np.array(ratios)
    return (float(ratios.max()) if ratios.size else 0.0), ratios


def oscillation_vs_commutator(b: ComplexField, Q: Square, w: Weight, params: MorreyParams,
                              family: Sequence[Square], extra_probes: Sequence[ComplexField] = (),
                              guard: bool = True) -> ChainReport:
    """Evaluate every quantity of the BMO lower-bound chain for one square."""
    spec = b.spec
    ps = product_sets(b, Q, guard=guard)
    p, kappa = params.p, params.kappa
    z = spec.z
    bv = b.values.real
    h2 = spec.cell_area
    areaQ = h2 * ps.mask_Q.sum()
    wQ = weighted_measure(w, Q)
    wQt = weighted_measure(w, ps.Q_tilde)

    t0 = mean_oscillation(b, Q)
    t1 = float(np.mean(np.abs(bv[ps.mask_Q] - ps.alpha)))
    t2 = t3 = t4 = t5 = t6 = t7 = 0.0
    kernel_ok = True
    chis = []
    fnorms = []
    wF = []
    for j in (1, 2):
        E, F = ps.pairs(j)
        chi = ComplexField(spec, F.astype(float))
        chis.append(chi)
        zE, zF, zQ = z[E], z[F], z[ps.mask_Q]
        bE, bF, bQ = bv[E], bv[F], bv[ps.mask_Q]
        d = zE[:, None] - zF[None, :]
        r2 = np.abs(d) ** 2
        xy = np.abs(d.real * d.imag)
        diff = bE[:, None] - bF[None, :]
        # |z-u|^-2 <= 18 |(x-zeta)(y-eta)| / |z-u|^4 for z in Q, u in Q~
        kernel_ok &= bool(np.all(r2 <= 18 * xy + 1e-12 * r2))
        t2 += h2 * h2 * np.sum(np.abs(bE - ps.alpha)[:, None] / r2) / areaQ
        t3 += h2 * h2 * np.sum(np.abs(diff) * xy / r2 ** 2) / areaQ
        imK = (kernel_b(d)).imag
        t4 += h2 * np.sum(np.abs(h2 * np.sum(diff * imK, axis=1))) / areaQ
        GE = commutator_off_support(bF, np.ones(zF.size), zF, h2, zE, bE)
        t5 += h2 * np.sum(np.abs(GE)) / areaQ
        GQ = commutator_off_support(bF, np.ones(zF.size), zF, h2, zQ, bQ)
        t6 += h2 * np.sum(np.abs(GQ)) / areaQ
        t7 += morrey_norm(commutator_apply(b, chi), w, params, family) * wQ ** ((kappa - 1) / p)
        fnorms.append(morrey_norm(chi, w, params, family))
        wF.append(weighted_measure_of_mask(w, F))
    opn, ratios = operator_norm_proxy(b, list(chis) + list(extra_probes), w, params, family)
    s = wQ ** ((kappa - 1) / p)
    t8 = sum(opn * fn * s for fn in fnorms)
    t9 = sum(opn * wf ** ((1 - kappa) / p) * s for wf in wF)
    t10 = 2 * opn * wQt ** ((1 - kappa) / p) * s
    t11 = opn
    terms = np.array([t0, t1, t2, t3, t4, t5, t6, t7, t8, t9, t10, t11], dtype=float)
    return ChainReport(terms, kernel_ok, opn, ratios, ps)
