"""Beltrami equation ``dbar f - b d f = g`` by Neumann iteration.

With ``h = (Id - bB)^{-1} g`` and ``f = C h``, the derivatives are
``dbar f = h`` and ``d f = B h``.  On the torus ``C`` only reaches mean-zero
``h``, and ``mean(h) = mean(g) + mean(b B h)`` is in general not zero even
for mean-zero ``g``.  The solution therefore carries the affine term
``mean(h) * conj(z)``: ``f = C h + mean(h) conj(z)``, whose ``dbar`` is the
constant ``mean(h)`` and whose ``d`` vanishes.  The periodic part is kept
separately so that derivatives can be checked spectrally.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import ComplexField, Square
from .morrey import MorreyParams, morrey_norm
from .transforms import beurling, beurling_power, cauchy, wirtinger
from .weights import Weight


class BeltramiError(ValueError):
    pass


def _sup(b: ComplexField) -> float:
    return float(np.max(np.abs(b.values)))


def _check_b(b: ComplexField):
    s = _sup(b)
    if not s < 1:
        raise BeltramiError(f"coefficient must satisfy max|b| < 1, got {s:.6g}")
    return s


@dataclass(frozen=True)
class BeltramiProblem:
    b: ComplexField
    g: ComplexField
    params: MorreyParams
    w: Weight
    check_support: bool = True

    def __post_init__(self):
        _check_b(self.b)
        if self.b.spec != self.g.spec or self.b.spec != self.w.spec:
            raise BeltramiError("b, g and w must share one grid")
        if self.check_support:
            spec = self.b.spec
            z = spec.z
            outside = (np.abs(z.real) > spec.L / 2) | (np.abs(z.imag) > spec.L / 2)
            if np.any(np.abs(self.b.values[outside]) > 1e-12):
                raise BeltramiError("b must be supported in the central half-window")

    @property
    def b_sup(self) -> float:
        return _sup(self.b)


@dataclass
class NeumannResult:
    h: ComplexField
    N_used: int
    increments: np.ndarray  # ||(bB)^N g||_2 for N = 0 .. N_used
    converged: bool


def neumann_invert(b: ComplexField, g: ComplexField, tol: float = 1e-10, N_max: int = 200,
                   grouping: str = "right") -> NeumannResult:
    """Approximate ``(Id - bB)^{-1} g`` by partial sums of the Neumann series.

    ``grouping='right'`` is the Horner update ``h <- g + b B h``;
    ``grouping='left'`` accumulates the terms ``(bB)^N g`` one at a time.
    Stops once ``||(bB)^N g||_2 <= tol ||g||_2``.
    """
    _check_b(b)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if grouping not in ("right", "left"):
        raise ValueError(f"unknown grouping {grouping!r}; use 'right' or 'left'")
    gn = g.l2_norm()
    if gn == 0:
        return NeumannResult(g, 0, np.array([0.0]), True)
    incs = [gn]
    h = g
    term = g
    N = 0
    converged = b.sup_norm() == 0
    while not converged and N < N_max:
        N += 1
        if grouping == "right":
            new = g + b * beurling(h)
            term = new - h
            h = new
        else:
            term = b * beurling(term)
            h = h + term
        incs.append(term.l2_norm())
        converged = incs[-1] <= tol * gn
    if not converged:
        warnings.warn(f"Neumann iteration stopped at N_max = {N_max} with relative increment "
                      f"{incs[-1] / gn:.3e} > tol = {tol:.1e}", RuntimeWarning, stacklevel=2)
    return NeumannResult(h, N, np.array(incs), converged)


@dataclass
class SolveReport:
    f_periodic: ComplexField
    mean_h: complex
    df: ComplexField
    dbar_f: ComplexField
    N_used: int
    increments: np.ndarray
    converged: bool
    residual: float            # ||dbar f - b d f - g||_2 / ||g||_2, spectral check
    projected_residual: float  # same on the mean-free parts of both sides
    tail_estimate: float       # ||b||^(N+1) / (1 - ||b||) envelope of the dropped terms
    g: ComplexField = field(repr=False)
    b: ComplexField = field(repr=False)

    def f(self) -> ComplexField:
        """Full solution including the affine ``mean(h) conj(z)`` term."""
        return self.f_periodic + ComplexField(self.f_periodic.spec, self.mean_h * self.f_periodic.spec.z.conj())

    def Df(self) -> np.ndarray:
        return np.abs(self.df.values) + np.abs(self.dbar_f.values)

    @property
    def relative_increments(self) -> np.ndarray:
        g = self.increments[0]
        return self.increments / g if g > 0 else self.increments


def solve_beltrami(prob: BeltramiProblem, tol: float = 1e-10, N_max: int = 200,
                   grouping: str = "right") -> SolveReport:
    b, g = prob.b, prob.g
    mg = g.mean()
    if abs(mg) > 1e-12 * max(g.l2_norm(), 1e-300):
        warnings.warn(f"right-hand side has mean {mg:.3e}; the residual is reported for g "
                      "and for its mean-zero projection", RuntimeWarning, stacklevel=2)
    res = neumann_invert(b, g, tol, N_max, grouping)
    h = res.h
    mh = h.mean()
    fp = cauchy(h)
    # independent spectral differentiation of the periodic part
    dbar_f = wirtinger(fp, "dbar") + mh
    df = wirtinger(fp, "d")
    lhs = dbar_f - b * df
    gn = g.l2_norm()
    if gn == 0:
        r = pr = 0.0
    else:
        r = (lhs - g).l2_norm() / gn
        pr = ((lhs - lhs.mean()) - (g - mg)).l2_norm() / gn
    s = prob.b_sup
    tail = s ** (res.N_used + 1) / (1 - s)
    return SolveReport(fp, complex(mh), df, dbar_f, res.N_used, res.increments, res.converged,
                       float(r), float(pr), float(tail), g, b)


def apriori_ratio(report: SolveReport, w: Weight, params: MorreyParams,
                  family: Sequence[Square]) -> float:
    """``||Df||`` over ``||g||`` in the weighted Morrey norm; NaN when ``g = 0``."""
    den = morrey_norm(report.g, w, params, family)
    if den == 0:
        return float("nan")
    return morrey_norm(report.Df(), w, params, family) / den


@dataclass
class GrowthTable:
    N: np.ndarray
    ratios: np.ndarray     # (len(N), n_probes)
    b_sup: float
    C_fit: float
    fit_N: np.ndarray

    def envelope(self, N=None) -> np.ndarray:
        N = self.N if N is None else np.asarray(N, dtype=float)
        return self.C_fit * N ** 2 * self.b_sup ** N

    def within_envelope(self, slack: float = 1e-9) -> np.ndarray:
        return self.ratios.max(axis=1) <= self.envelope() * (1 + slack)


def norm_growth_probe(b: ComplexField, N_list: Sequence[int], probe_inputs: Sequence[ComplexField],
                      w: Weight, params: MorreyParams, family: Sequence[Square],
                      fit_N: Sequence[int] | None = None) -> GrowthTable:
    """Morrey ratios ``||b^N B^N f|| / ||f||`` and a fitted ``C N^2 ||b||^N`` envelope.

    ``C`` is the smallest constant covering the ratios at ``fit_N`` (default:
    the first two entries of ``N_list``); the remaining ``N`` are checks.
    """
    s = _check_b(b)
    N_list = [int(N) for N in N_list]
    if not N_list or min(N_list) < 1:
        raise ValueError("N_list must hold positive integers")
    fit_N = N_list[:2] if fit_N is None else [int(N) for N in fit_N]
    family = list(family)
    ratios = np.empty((len(N_list), len(probe_inputs)))
    for j, f in enumerate(probe_inputs):
        fn = morrey_norm(f, w, params, family)
        for i, N in enumerate(N_list):
            bN = ComplexField(b.spec, b.values ** N)
            ratios[i, j] = morrey_norm(bN * beurling_power(f, N), w, params, family) / fn
    Ns = np.array(N_list, dtype=float)
    if s == 0:
        C = 0.0
    else:
        sel = np.isin(N_list, fit_N)
        C = float(np.max(ratios[sel].max(axis=1) / (Ns[sel] ** 2 * s ** Ns[sel])))
    return GrowthTable(Ns, ratios, s, C, np.array(fit_N))
