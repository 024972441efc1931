"""Weighted Morrey norms over finite square families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import ComplexField, GridError, GridSpec, Square, square_mask
from .weights import Weight


@dataclass(frozen=True)
class MorreyParams:
    p: float
    kappa: float

    def __post_init__(self):
        if not (1 < self.p < np.inf):
            raise ValueError(f"p must lie in (1, inf), got {self.p}")
        if not (0 < self.kappa < 1):
            raise ValueError(f"kappa must lie in (0, 1), got {self.kappa}")


def _abs_values(f) -> np.ndarray:
    if isinstance(f, ComplexField):
        return np.abs(f.values)
    return np.abs(np.asarray(f))


def weighted_lp_over_square(f, w: Weight, Q: Square, p: float) -> float:
    """``(h^2 sum_{u in Q} |f(u)|^p w(u))^(1/p)``."""
    m = square_mask(w.spec, Q)
    if not m.any():
        raise GridError(f"square {Q} contains no samples")
    a = _abs_values(f)[m]
    return float((np.sum(a ** p * w.values[m]) * w.spec.cell_area) ** (1.0 / p))


def _box_sums(spec: GridSpec, arrays, family):
    for Q in family:
        sx, sy = spec.index_box(Q)
        yield Q, [a[sx, sy].sum() for a in arrays]


def morrey_terms(f, w: Weight, params: MorreyParams, family: Sequence[Square]) -> np.ndarray:
    """Per-square values ``(int_Q |f|^p w)^(1/p) / w(Q)^(kappa/p)``."""
    family = list(family)
    if not family:
        raise ValueError("square family is empty")
    p, kappa = params.p, params.kappa
    fw = _abs_values(f) ** p * w.values
    out = np.empty(len(family))
    h2 = w.spec.cell_area
    for i, (Q, (num, den)) in enumerate(_box_sums(w.spec, (fw, w.values), family)):
        if den <= 0:
            raise GridError(f"square {Q} contains no samples")
        out[i] = (num * h2) ** (1.0 / p) / (den * h2) ** (kappa / p)
    return out


def morrey_norm(f, w: Weight, params: MorreyParams, family: Sequence[Square]) -> float:
    return float(morrey_terms(f, w, params, family).max())


def default_morrey_family(spec: GridSpec, levels: int = 3, lattice: int = 4) -> list[Square]:
    """Dyadic radii ``L/2 ... L/2^levels`` (default ``L/8``) times a coarse center lattice.

    Each radius uses ``(2 lattice + 1)^2`` centers on ``[-L/2, L/2]^2``;
    squares are clipped to the window by the sampling rule.
    """
    L = spec.L
    cs = np.linspace(-L / 2, L / 2, 2 * lattice + 1)
    out = []
    for k in range(1, levels + 1):
        r = L / 2 ** k
        out.extend(Square(complex(x, y), r) for x in cs for y in cs)
    return out


@dataclass
class FKReport:
    """Frechet-Kolmogorov diagnostics, one row per input field."""

    bounded: np.ndarray
    tail: np.ndarray
    equicontinuity: np.ndarray
    tail_radius: float
    shifts: list = field(default_factory=list)

    def rows(self):
        for i in range(len(self.bounded)):
            yield {"field": i, "norm": self.bounded[i], "tail": self.tail[i],
                   "equicontinuity": self.equicontinuity[i]}


def _shift_to_samples(spec: GridSpec, xi: complex) -> tuple[int, int]:
    a, b = xi.real / spec.h, xi.imag / spec.h
    ia, ib = int(round(a)), int(round(b))
    if abs(a - ia) > 1e-9 or abs(b - ib) > 1e-9:
        raise GridError(f"shift {xi} is not an integer multiple of h = {spec.h}")
    return ia, ib


def fk_diagnostics(fs: Sequence[ComplexField], w: Weight, params: MorreyParams,
                   family: Sequence[Square], tail_radius: float,
                   shifts: Sequence[complex]) -> FKReport:
    spec = w.spec
    shifts = [complex(s) for s in shifts]
    steps = [_shift_to_samples(spec, s) for s in shifts]
    outside = np.abs(spec.z) > tail_radius
    bounded, tail, equi = [], [], []
    for f in fs:
        bounded.append(morrey_norm(f, w, params, family))
        tail.append(morrey_norm(np.where(outside, f.values, 0), w, params, family))
        e = 0.0
        for st in steps:
            if st == (0, 0):
                continue
            e = max(e, morrey_norm(f.roll(st).values - f.values, w, params, family))
        equi.append(e)
    return FKReport(np.array(bounded), np.array(tail), np.array(equi), float(tail_radius), shifts)
