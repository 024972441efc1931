"""Periodic sampling of a square window of the complex plane.

The window ``[-L, L)^2`` is sampled at ``z[j, k] = (-L + j h) + i(-L + k h)``
with ``h = 2L / n``.  Axis 0 runs along x, axis 1 along y.  Squares use a
half-open membership rule: a sample at ``x + iy`` belongs to ``Q(z0, r)``
iff ``x0 - r <= x < x0 + r`` and ``y0 - r <= y < y0 + r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    n: int
    L: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 8 or self.n & (self.n - 1):
            raise GridError(f"n must be a power of two >= 8, got {self.n!r}")
        if not self.L > 0:
            raise GridError(f"half-width L must be positive, got {self.L!r}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @cached_property
    def coords(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.n)

    @cached_property
    def z(self) -> np.ndarray:
        x = self.coords[:, None]
        y = self.coords[None, :]
        out = x + 1j * y
        out.setflags(write=False)
        return out

    def mask(self, Q: "Square") -> np.ndarray:
        """Boolean sample mask of ``Q`` (half-open rule)."""
        mx = self._axis(Q.center.real, Q.r)
        my = self._axis(Q.center.imag, Q.r)
        return mx[:, None] & my[None, :]

    def _axis(self, c: float, r: float) -> np.ndarray:
        # edges are shifted down by a tiny fraction of h so that a sample
        # sitting on an edge up to rounding is assigned consistently
        eps = 1e-9 * self.h
        xs = self.coords
        return (xs >= c - r - eps) & (xs < c + r - eps)

    def index_box(self, Q: "Square") -> tuple[slice, slice]:
        """Row/column slices covering the samples of ``Q``."""
        ix = np.flatnonzero(self._axis(Q.center.real, Q.r))
        iy = np.flatnonzero(self._axis(Q.center.imag, Q.r))
        if ix.size == 0 or iy.size == 0:
            return slice(0, 0), slice(0, 0)
        return slice(ix[0], ix[-1] + 1), slice(iy[0], iy[-1] + 1)

    def overlaps(self, Q: "Square") -> bool:
        lo, hi = -self.L, self.L
        x0, y0, r = Q.center.real, Q.center.imag, Q.r
        return x0 + r > lo and x0 - r < hi and y0 + r > lo and y0 - r < hi

    def inside_central_half(self, Q: "Square") -> bool:
        """True iff ``Q`` lies in ``[-L/2, L/2]^2``."""
        half = self.L / 2
        x0, y0, r = Q.center.real, Q.center.imag, Q.r
        return (x0 - r >= -half - 1e-12 and x0 + r <= half + 1e-12
                and y0 - r >= -half - 1e-12 and y0 + r <= half + 1e-12)


def make_grid(n: int, L: float) -> GridSpec:
    return GridSpec(int(n) if isinstance(n, (int, np.integer)) else n, float(L))


@dataclass(frozen=True)
class Square:
    """Axis-parallel square with center ``center`` and side ``2 r``."""

    center: complex
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise GridError(f"half side must be positive, got {self.r!r}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "r", float(self.r))

    @property
    def area(self) -> float:
        return 4.0 * self.r * self.r

    def scaled(self, t: float) -> "Square":
        return Square(self.center, t * self.r)

    def translate(self, z: complex) -> "Square":
        return Square(self.center + z, self.r)

    def contains_square(self, other: "Square", tol: float = 1e-12) -> bool:
        d = other.center - self.center
        return (abs(d.real) + other.r <= self.r + tol
                and abs(d.imag) + other.r <= self.r + tol)

    def intersects(self, other: "Square") -> bool:
        d = other.center - self.center
        s = self.r + other.r
        return abs(d.real) < s and abs(d.imag) < s

    def contains_points(self, z: np.ndarray) -> np.ndarray:
        x0, y0 = self.center.real, self.center.imag
        return ((z.real >= x0 - self.r) & (z.real < x0 + self.r)
                & (z.imag >= y0 - self.r) & (z.imag < y0 + self.r))


@dataclass(frozen=True)
class ComplexField:
    """Samples of a complex function on a :class:`GridSpec`."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        n = self.spec.n
        if v.shape != (n, n):
            if v.size != n * n:
                raise GridError(f"expected {n * n} samples, got {v.size}")
            v = v.reshape(n, n)
        if not np.all(np.isfinite(v)):
            raise GridError("field contains non-finite samples")
        v = v.copy() if v is self.values else v
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    # arithmetic helpers; all return new fields on the same grid
    def _other(self, other):
        if isinstance(other, ComplexField):
            if other.spec != self.spec:
                raise GridError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return ComplexField(self.spec, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ComplexField(self.spec, self.values - self._other(other))

    def __rsub__(self, other):
        return ComplexField(self.spec, self._other(other) - self.values)

    def __mul__(self, other):
        return ComplexField(self.spec, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ComplexField(self.spec, -self.values)

    def __abs__(self):
        return ComplexField(self.spec, np.abs(self.values))

    def conj(self) -> "ComplexField":
        return ComplexField(self.spec, self.values.conj())

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= tol))

    def mean(self) -> complex:
        return complex(self.values.mean())

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.spec.cell_area))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def roll(self, shift: tuple[int, int]) -> "ComplexField":
        """Periodic shift by whole samples: ``out(z) = f(z + shift*h)``."""
        return ComplexField(self.spec, np.roll(self.values, (-shift[0], -shift[1]), axis=(0, 1)))


def sample(spec: GridSpec, formula: Callable[[np.ndarray], np.ndarray]) -> ComplexField:
    """Evaluate ``formula`` on every sample point.

    ``formula`` receives the full complex coordinate array and must return an
    array of the same shape (or a scalar).
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vals = np.broadcast_to(np.asarray(formula(spec.z), dtype=np.complex128), (spec.n, spec.n))
    if not np.all(np.isfinite(vals)):
        raise GridError("formula produced non-finite samples on the grid")
    return ComplexField(spec, np.array(vals))


def field_from_array(spec: GridSpec, values) -> ComplexField:
    return ComplexField(spec, np.asarray(values))


def _values(f) -> np.ndarray:
    return f.values if isinstance(f, ComplexField) else np.asarray(f)


def square_mask(spec: GridSpec, Q: Square) -> np.ndarray:
    if not spec.overlaps(Q):
        raise GridError(f"square {Q} lies outside the window")
    return spec.mask(Q)


def sample_count(spec: GridSpec, Q: Square) -> int:
    return int(square_mask(spec, Q).sum())


def integrate_over_square(f, Q: Square, spec: GridSpec | None = None) -> complex:
    """Riemann sum ``h^2 * sum f`` over the samples lying in ``Q``."""
    spec = spec or f.spec
    m = square_mask(spec, Q)
    return complex(np.sum(_values(f)[m]) * spec.cell_area)


def mean_over_square(f, Q: Square, spec: GridSpec | None = None) -> complex:
    spec = spec or f.spec
    m = square_mask(spec, Q)
    cnt = int(m.sum())
    if cnt == 0:
        raise GridError(f"square {Q} contains no samples")
    return complex(np.sum(_values(f)[m]) / cnt)


def restrict(f, Q: Square, spec: GridSpec | None = None) -> np.ndarray:
    """Sample values of ``f`` inside ``Q`` (flattened, row-major order)."""
    spec = spec or f.spec
    m = square_mask(spec, Q)
    if not m.any():
        raise GridError(f"square {Q} contains no samples")
    return _values(f)[m]
