"""Muckenhoupt weights on the grid: measures, A_p constants, doubling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import ComplexField, GridError, GridSpec, Square, square_mask


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class Weight:
    """Positive weight sampled on a grid, with an optional exact formula.

    ``func`` (complex coordinates -> positive reals) is used whenever a
    measure is needed off the grid, e.g. for squares larger than the window.
    """

    spec: GridSpec
    values: np.ndarray = field(repr=False)
    p: float = 2.0
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).reshape(self.spec.n, self.spec.n)
        if not np.all(np.isfinite(v)) or not np.all(v > 0):
            raise WeightError("weight must be finite and strictly positive at every sample")
        if not self.p > 1:
            raise WeightError(f"exponent p must exceed 1, got {self.p}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def p_dual(self) -> float:
        return self.p / (self.p - 1.0)

    def scaled(self, c: float) -> "Weight":
        fn = None if self.func is None else (lambda z, _f=self.func: c * _f(z))
        return Weight(self.spec, c * self.values, self.p, self.kind, dict(self.params), fn)

    def field(self) -> ComplexField:
        return ComplexField(self.spec, self.values)

    def declared_ap(self) -> bool | None:
        """Membership claim of the built-in class, or None when unknown."""
        if self.kind == "constant":
            return True
        if self.kind == "power":
            a = self.params["alpha"]
            return -2 < a < 2 * (self.p - 1)
        if self.kind == "product":
            return all(-2 < a < 2 * (self.p - 1) for a in self.params["alphas"])
        return None


def _cell_average(func, z0: np.ndarray, h: float, refine: int = 16) -> np.ndarray:
    """Average of ``func`` over the cells centered at ``z0`` (midpoint rule)."""
    t = (np.arange(refine) + 0.5) / refine - 0.5
    sub = (t[:, None] + 1j * t[None, :]).ravel() * h
    return np.array([np.mean(func(z + sub)) for z in np.atleast_1d(z0)])


def _power(z, center, alpha):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.abs(z - center) ** alpha


def constant_weight(spec: GridSpec, c: float = 1.0, p: float = 2.0) -> Weight:
    return Weight(spec, np.full((spec.n, spec.n), float(c)), p, "constant", {"c": float(c)},
                  lambda z, _c=float(c): np.full(np.shape(z), _c))


def _sampled_with_singular_cells(spec: GridSpec, func, centers: Sequence[complex]) -> np.ndarray:
    z = spec.z
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vals = np.asarray(func(z), dtype=float)
    bad = ~np.isfinite(vals) | (vals <= 0)
    for c in centers:
        bad |= np.abs(z - c) < 1e-12 * spec.h
    if bad.any():
        vals = vals.copy()
        vals[bad] = _cell_average(func, z[bad], spec.h)
    return vals


def power_weight(spec: GridSpec, alpha: float, p: float = 2.0, center: complex = 0j) -> Weight:
    """``|z - center|^alpha``; the sample at the center gets its cell average."""
    center = complex(center)
    fn = lambda z, _c=center, _a=float(alpha): _power(z, _c, _a)
    vals = _sampled_with_singular_cells(spec, fn, [center])
    return Weight(spec, vals, p, "power", {"alpha": float(alpha), "center": center}, fn)


def product_power_weight(spec: GridSpec, alphas: Sequence[float], centers: Sequence[complex],
                         p: float = 2.0) -> Weight:
    alphas = [float(a) for a in alphas]
    centers = [complex(c) for c in centers]
    if len(alphas) != 2 or len(centers) != 2:
        raise WeightError("product weight takes exactly two exponents and two centers")

    def fn(z, _a=tuple(alphas), _c=tuple(centers)):
        return _power(z, _c[0], _a[0]) * _power(z, _c[1], _a[1])

    vals = _sampled_with_singular_cells(spec, fn, centers)
    return Weight(spec, vals, p, "product", {"alphas": alphas, "centers": centers}, fn)


def weight_from_values(spec: GridSpec, values, p: float = 2.0, func=None) -> Weight:
    return Weight(spec, np.asarray(values, dtype=float), p, "custom", {}, func)


# --------------------------------------------------------------------------
# measures

def weighted_measure(w: Weight, Q: Square) -> float:
    """``w(Q)`` as the grid Riemann sum over the samples in ``Q``."""
    m = square_mask(w.spec, Q)
    if not m.any():
        raise GridError(f"square {Q} contains no samples")
    return float(w.values[m].sum() * w.spec.cell_area)


def weighted_measure_of_mask(w: Weight, mask: np.ndarray) -> float:
    return float(w.values[mask].sum() * w.spec.cell_area)


def weighted_measure_quadrature(w: Weight, Q: Square, m: int = 128) -> float:
    """``w(Q)`` by an ``m x m`` midpoint rule on the exact formula.

    Works for squares that leave the window.  Power weights whose singular
    point is a midpoint are not an issue for even ``m`` and centered squares.
    """
    if w.func is None:
        raise WeightError("weight carries no formula; off-grid quadrature unavailable")
    pts = quadrature_points(Q, m)
    with np.errstate(divide="ignore"):
        vals = np.asarray(w.func(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise WeightError(f"weight formula is singular on the quadrature nodes of {Q}")
    return float(vals.mean() * Q.area)


def quadrature_points(Q: Square, m: int) -> np.ndarray:
    t = -Q.r + (np.arange(m) + 0.5) * (2 * Q.r / m)
    return Q.center + t[:, None] + 1j * t[None, :]


# --------------------------------------------------------------------------
# A_p constant

@dataclass
class ApReport:
    constant: float
    p: float
    squares: list
    terms: np.ndarray
    sigma: float | None = None
    sigma_C: float | None = None
    doubling_exponent: float | None = None

    @property
    def argmax(self) -> Square:
        return self.squares[int(np.argmax(self.terms))]


def ap_term(w: Weight, Q: Square) -> float:
    """``<w>_Q <w^(1-p')>_Q^(p-1)`` on the samples of ``Q``."""
    m = square_mask(w.spec, Q)
    if not m.any():
        raise GridError(f"square {Q} contains no samples")
    vals = w.values[m]
    with np.errstate(over="raise"):
        try:
            mean_w = vals.mean()
            dual = np.mean(vals ** (1.0 - w.p_dual))
            out = mean_w * dual ** (w.p - 1.0)
        except FloatingPointError as exc:
            raise WeightError(f"overflow evaluating the A_p product on {Q}") from exc
    if not np.isfinite(out):
        raise WeightError(f"A_p product is not finite on {Q}")
    return float(out)


def ap_constant(w: Weight, family: Sequence[Square]) -> ApReport:
    family = list(family)
    if not family:
        raise ValueError("square family is empty")
    terms = np.array([ap_term(w, Q) for Q in family])
    return ApReport(float(terms.max()), w.p, family, terms)


def sigma_estimate(w: Weight, Q: Square, subsets: Sequence[Square]) -> tuple[float, float]:
    """Least-squares fit of ``w(E)/w(Q) = C (|E|/|Q|)^sigma``.

    Areas are sample counts times ``h^2`` so that ``w = 1`` gives exactly
    ``sigma = 1, C = 1``.  Subsets equal to ``Q`` are dropped.
    """
    mQ = square_mask(w.spec, Q)
    wQ = w.values[mQ].sum()
    nQ = mQ.sum()
    xs, ys = [], []
    for E in subsets:
        mE = square_mask(w.spec, E)
        if np.any(mE & ~mQ):
            raise WeightError(f"subset {E} is not contained in {Q}")
        nE = mE.sum()
        if nE == 0 or nE == nQ:
            continue
        xs.append(np.log(nE / nQ))
        ys.append(np.log(w.values[mE].sum() / wQ))
    if len(xs) < 2:
        raise WeightError("need at least two proper subsets to fit sigma")
    slope, intercept = np.polyfit(np.array(xs), np.array(ys), 1)
    return float(slope), float(np.exp(intercept))


def doubling_check(w: Weight, Q: Square, factors: Sequence[float]) -> tuple[float, bool]:
    """Fitted exponent ``d`` of ``w(tQ) ~ t^d`` and the test ``d <= 2p + 0.2``."""
    factors = [float(t) for t in factors]
    if any(t <= 1 for t in factors):
        raise WeightError("dilation factors must exceed 1")
    spec = w.spec
    for t in factors:
        tQ = Q.scaled(t)
        c, r = tQ.center, tQ.r
        if c.real - r < -spec.L or c.real + r > spec.L or c.imag - r < -spec.L or c.imag + r > spec.L:
            raise WeightError(f"dilated square {tQ} leaves the window")
    ts = np.array([1.0] + factors)
    ms = np.array([weighted_measure(w, Q.scaled(t)) for t in ts])
    d = float(np.polyfit(np.log(ts), np.log(ms), 1)[0])
    return d, d <= 2 * w.p + 0.2


# --------------------------------------------------------------------------
# square families

def dyadic_family(spec: GridSpec, radii: Sequence[float] | None = None,
                  spacing_factor: float = 1.0, extent: float | None = None) -> list[Square]:
    """Squares ``Q(c, r)`` with ``c`` on a lattice of spacing ``spacing_factor * r``.

    Centers range over ``[-extent, extent]^2`` (default ``L/2``) and only
    squares lying inside the window are kept.  ``radii`` defaults to
    ``L/8, L/4, L/2``.
    """
    L = spec.L
    radii = [L / 8, L / 4, L / 2] if radii is None else list(radii)
    extent = L / 2 if extent is None else extent
    out = []
    for r in radii:
        step = spacing_factor * r
        k = int(np.floor(extent / step + 1e-9))
        cs = step * np.arange(-k, k + 1)
        for cx in cs:
            for cy in cs:
                Q = Square(complex(cx, cy), r)
                if abs(cx) + r <= L + 1e-12 and abs(cy) + r <= L + 1e-12:
                    out.append(Q)
    return out


def centered_family(radii: Sequence[float], center: complex = 0j) -> list[Square]:
    return [Square(center, r) for r in radii]
