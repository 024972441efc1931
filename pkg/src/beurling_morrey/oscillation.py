"""Mean oscillation, median values and the BMO / CMO probes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import ComplexField, GridError, Square, square_mask


def _samples(f: ComplexField, Q: Square) -> np.ndarray:
    m = square_mask(f.spec, Q)
    if not m.any():
        raise GridError(f"square {Q} contains no samples")
    return f.values[m]


def _real_samples(f: ComplexField, Q: Square) -> np.ndarray:
    v = _samples(f, Q)
    if np.any(v.imag != 0):
        raise ValueError("median value needs a real-valued field")
    return v.real


def lower_median(values) -> float:
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        raise ValueError("no samples")
    return float(v[(v.size - 1) // 2])


def median_value(f: ComplexField, Q: Square) -> float:
    """Lower median of the samples of ``f`` in ``Q``.

    It minimizes ``c -> mean |f - c|`` and both strict level sets
    ``{f > alpha}``, ``{f < alpha}`` hold at most half of the samples.
    """
    return lower_median(_real_samples(f, Q))


def mean_oscillation(f: ComplexField, Q: Square) -> float:
    v = _samples(f, Q)
    return float(np.mean(np.abs(v - v.mean())))


def median_oscillation(f: ComplexField, Q: Square) -> float:
    v = _real_samples(f, Q)
    return float(np.mean(np.abs(v - lower_median(v))))


@dataclass
class OscillationReport:
    squares: list
    means: np.ndarray
    medians: np.ndarray
    oscillations: np.ndarray
    median_oscillations: np.ndarray

    @property
    def bmo(self) -> float:
        return float(self.oscillations.max())


def oscillation_report(f: ComplexField, family: Sequence[Square]) -> OscillationReport:
    family = list(family)
    real = f.is_real()
    means, meds, osc, mosc = [], [], [], []
    for Q in family:
        v = _samples(f, Q)
        mu = v.mean()
        means.append(mu)
        osc.append(np.mean(np.abs(v - mu)))
        if real:
            a = lower_median(v.real)
            meds.append(a)
            mosc.append(np.mean(np.abs(v.real - a)))
        else:
            meds.append(np.nan)
            mosc.append(np.nan)
    return OscillationReport(family, np.array(means), np.array(meds), np.array(osc), np.array(mosc))


def bmo_norm(f: ComplexField, family: Sequence[Square]) -> float:
    family = list(family)
    if not family:
        raise ValueError("square family is empty")
    return max(mean_oscillation(f, Q) for Q in family)


@dataclass
class CMOProbe:
    """Family maxima of the mean oscillation along the three limits."""

    small: np.ndarray
    large: np.ndarray
    translated: np.ndarray

    def decay_ratios(self) -> dict:
        def ratio(a):
            return float(a[0] / a[-1]) if a[-1] > 0 else np.inf
        return {"small": ratio(self.small), "large": ratio(self.large),
                "translated": ratio(self.translated)}


def _family_max(f, fam):
    fam = list(fam)
    if not fam:
        raise ValueError("empty family in CMO probe")
    return bmo_norm(f, fam)


def cmo_probe(f: ComplexField, small_area_families, large_area_families,
              translated_families) -> CMOProbe:
    """Maxima of ``O(f; .)`` over each family of three nested sequences.

    Each argument is a sequence of families ordered toward its limit
    (shrinking squares, growing squares, far translates).
    """
    return CMOProbe(np.array([_family_max(f, F) for F in small_area_families]),
                    np.array([_family_max(f, F) for F in large_area_families]),
                    np.array([_family_max(f, F) for F in translated_families]))


def lattice_family(r: float, extent: float, center: complex = 0j) -> list[Square]:
    """Squares of half side ``r`` centered on the ``r``-lattice in a box."""
    k = int(np.floor(extent / r + 1e-9))
    cs = r * np.arange(-k, k + 1)
    return [Square(center + complex(x, y), r) for x in cs for y in cs]
