"""Polyvariograms and the quantities built from them.

A polyvariogram measures the volume (or lattice count) of a set intersected
with translated copies of itself and of its complement:

    vol( (A+x1) cap ... cap (A+xq) cap (A+y1)^c cap ... cap (A+ym)^c ).

Two corner volumes of this kind, taken at the axis shifts of size eps and
divided by eps^2, estimate the Euler characteristic; single-shift variograms
divided by eps estimate directional perimeters.  The continuum versions are
computed by midpoint counting on a fine sub-lattice with a row-sweep that
shares predicate evaluations across every requested shift combination, so
asking for several variograms of the same set costs one sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec, NonLatticeShift, NotAdmissible
from .lattice import BitGrid, IndicatorSet
from .topology import config_counts

__all__ = [
    "ShiftSpec",
    "PerimeterEstimate",
    "discrete_polyvariogram",
    "continuous_polyvariogram",
    "chi_bicovariogram",
    "chi_bicovariogram_discrete",
    "estimate_perimeter",
    "perimeter_axis_sum",
    "perimeter_variational",
]

_REL_TOL = 1e-9


def _as_shift_tuple(shifts) -> tuple[tuple[float, float], ...]:
    out = []
    for s in shifts:
        x, y = float(s[0]), float(s[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InvalidSpec(f"shift {s!r} is not finite")
        out.append((x, y))
    return tuple(out)


@dataclass(frozen=True)
class ShiftSpec:
    """Shifts defining one polyvariogram: intersected and complemented copies."""

    plus_shifts: tuple[tuple[float, float], ...] = ((0.0, 0.0),)
    minus_shifts: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "plus_shifts", _as_shift_tuple(self.plus_shifts))
        object.__setattr__(self, "minus_shifts", _as_shift_tuple(self.minus_shifts))

    @property
    def all_shifts(self) -> tuple[tuple[float, float], ...]:
        return self.plus_shifts + self.minus_shifts


@dataclass(frozen=True)
class PerimeterEstimate:
    """Directional perimeter from a sequence of shrinking shift sizes."""

    direction: tuple[float, float]
    epsilons: tuple[float, ...]
    values: tuple[float, ...]
    extrapolated: float

    def __post_init__(self):
        if len(self.epsilons) != len(self.values) or len(self.epsilons) < 2:
            raise InvalidSpec("epsilons and values must have equal length >= 2")
        if self.extrapolated < 0:
            raise InvalidSpec("extrapolated perimeter must be nonnegative")

    def rows(self) -> list[tuple[float, float]]:
        """(epsilon, value) pairs, ready for a CSV convergence table."""
        return list(zip(self.epsilons, self.values))


def _integer_shift(arr: np.ndarray, kx: int, ky: int) -> np.ndarray:
    # translate a boolean raster by whole cells, filling with background
    if kx == 0 and ky == 0:
        return arr
    h, w = arr.shape
    out = np.zeros_like(arr)
    ys = slice(max(ky, 0), h + min(ky, 0))
    xs = slice(max(kx, 0), w + min(kx, 0))
    ys_src = slice(max(-ky, 0), h + min(-ky, 0))
    xs_src = slice(max(-kx, 0), w + min(-kx, 0))
    out[ys, xs] = arr[ys_src, xs_src]
    return out


def _lattice_steps(shift: tuple[float, float], epsilon: float) -> tuple[int, int]:
    steps = []
    for s in shift:
        q = s / epsilon
        k = round(q)
        if abs(q - k) > _REL_TOL * max(1.0, abs(q)):
            raise NonLatticeShift(f"shift {shift} is not a multiple of epsilon={epsilon}")
        steps.append(int(k))
    return steps[0], steps[1]


def discrete_polyvariogram(grid: BitGrid, shifts: ShiftSpec) -> int:
    """Count lattice points in the shifted intersection, exactly.

    The grid's set bits are the entire set; the computation pads enough
    background that every translate fits, so the count never depends on
    how much empty margin the caller happened to leave.
    """
    if not shifts.plus_shifts:
        raise InvalidSpec("at least one intersected copy is required; "
                          "a pure-complement count is infinite")
    eps = grid.lattice.epsilon
    steps = [_lattice_steps(s, eps) for s in shifts.all_shifts]
    pad_x = max(abs(k) for k, _ in steps)
    pad_y = max(abs(k) for _, k in steps)
    ny, nx = grid.bits.shape
    canvas = np.zeros((ny + 2 * pad_y, nx + 2 * pad_x), dtype=bool)
    canvas[pad_y:pad_y + ny, pad_x:pad_x + nx] = grid.bits

    n_plus = len(shifts.plus_shifts)
    acc = None
    for idx, (kx, ky) in enumerate(steps):
        shifted = _integer_shift(canvas, kx, ky)
        term = shifted if idx < n_plus else ~shifted
        acc = term.copy() if acc is None else acc & term
    return int(acc.sum())


class _RowSweep:
    """Shared row evaluation for several shift specs over one fine grid.

    Predicate rows are cached bit-packed and keyed by row index; shifts that
    are whole multiples of the mesh reuse cached rows through slicing, all
    others are evaluated directly at the shifted coordinates.
    """

    def __init__(self, indicator: IndicatorSet, domain: tuple[float, float, float, float],
                 h: float):
        x0, x1, y0, y1 = domain
        if not (x1 > x0 and y1 > y0):
            raise InvalidSpec(f"degenerate sweep domain {domain}")
        if h <= 0:
            raise InvalidSpec("quad_mesh must be positive")
        self.contains = indicator.contains
        self.h = h
        self.nx = int(round((x1 - x0) / h))
        self.ny = int(round((y1 - y0) / h))
        self.xs = x0 + (np.arange(self.nx) + 0.5) * h
        self.y0 = y0
        self._cache: dict[int, tuple[np.ndarray, int]] = {}
        self._zero = np.zeros(self.nx, dtype=bool)

    def _master_row(self, r: int) -> np.ndarray:
        if r < 0 or r >= self.ny:
            return self._zero
        entry = self._cache.get(r)
        if entry is None:
            y = self.y0 + (r + 0.5) * self.h
            row = np.asarray(self.contains(self.xs, np.full(self.nx, y)), dtype=bool)
            entry = (np.packbits(row), int(row.sum()))
            self._cache[r] = entry
        packed, n = entry
        if n == 0:
            return self._zero
        return np.unpackbits(packed, count=self.nx).view(bool)

    def _shifted_row(self, row: np.ndarray, dx: int) -> np.ndarray:
        if dx == 0:
            return row
        out = np.zeros(self.nx, dtype=bool)
        if dx > 0:
            out[dx:] = row[:self.nx - dx]
        else:
            out[:self.nx + dx] = row[-dx:]
        return out

    def run(self, specs: list[ShiftSpec]) -> list[int]:
        for spec in specs:
            if not spec.plus_shifts:
                raise InvalidSpec("at least one intersected copy is required; "
                                  "a pure-complement volume is infinite")
        # classify every distinct shift once
        aligned: dict[tuple[float, float], tuple[int, int]] = {}
        for spec in specs:
            for s in spec.all_shifts:
                if s in aligned:
                    continue
                qx, qy = s[0] / self.h, s[1] / self.h
                kx, ky = round(qx), round(qy)
                if (abs(qx - kx) <= _REL_TOL * max(1.0, abs(qx))
                        and abs(qy - ky) <= _REL_TOL * max(1.0, abs(qy))):
                    aligned[s] = (int(kx), int(ky))
        max_dy = max((dy for _, dy in aligned.values()), default=0)
        counts = [0] * len(specs)
        for j in range(self.ny):
            if self._cache:
                # rows below j - max_dy can never be requested again
                floor = j - max(max_dy, 0)
                for r in [r for r in self._cache if r < floor]:
                    del self._cache[r]
            row_at: dict[tuple[float, float], np.ndarray] = {}

            def get_row(s: tuple[float, float]) -> np.ndarray:
                got = row_at.get(s)
                if got is None:
                    if s in aligned:
                        dx, dy = aligned[s]
                        got = self._shifted_row(self._master_row(j - dy), dx)
                    else:
                        y = self.y0 + (j + 0.5) * self.h - s[1]
                        got = np.asarray(
                            self.contains(self.xs - s[0], np.full(self.nx, y)), dtype=bool)
                    row_at[s] = got
                return got

            for k, spec in enumerate(specs):
                acc = None
                empty = False
                for s in spec.plus_shifts:
                    r = get_row(s)
                    if not r.any():
                        empty = True
                        break
                    acc = r.copy() if acc is None else acc & r
                    if not acc.any():
                        empty = True
                        break
                if empty:
                    continue
                for s in spec.minus_shifts:
                    acc &= ~get_row(s)
                counts[k] += int(np.count_nonzero(acc))
        return counts


def _sweep_domain(indicator: IndicatorSet, specs: list[ShiftSpec]) -> tuple[float, float, float, float]:
    # domain = bounding box grown by the largest shift magnitude, so that
    # every row the sweep might read outside it is genuinely empty
    x0, x1, y0, y1 = indicator.bounding_box
    m = 0.0
    for spec in specs:
        for sx, sy in spec.all_shifts:
            m = max(m, abs(sx), abs(sy))
    return (x0 - m, x1 + m, y0 - m, y1 + m)


def continuous_polyvariogram(indicator: IndicatorSet, shifts: ShiftSpec,
                             quad_mesh: float,
                             domain: tuple[float, float, float, float] | None = None) -> float:
    """Midpoint-rule volume of the shifted intersection; error O(h * perimeter)."""
    if domain is None:
        domain = _sweep_domain(indicator, [shifts])
    sweep = _RowSweep(indicator, domain, quad_mesh)
    (count,) = sweep.run([shifts])
    return count * quad_mesh * quad_mesh


def chi_bicovariogram(indicator: IndicatorSet, epsilon: float, quad_mesh: float) -> float:
    """Euler characteristic from two corner volumes at axis shifts of size epsilon.

    The difference of the outward-corner and inward-corner variogram volumes,
    divided by epsilon^2, is exactly chi for sets whose regularity radius
    exceeds the shift size; quadrature contributes O(quad_mesh/epsilon^2).
    """
    if epsilon <= 0:
        raise InvalidSpec("epsilon must be positive")
    e = float(epsilon)
    out_spec = ShiftSpec(plus_shifts=[(0.0, 0.0)], minus_shifts=[(-e, 0.0), (0.0, -e)])
    in_spec = ShiftSpec(plus_shifts=[(e, 0.0), (0.0, e)], minus_shifts=[(0.0, 0.0)])
    domain = _sweep_domain(indicator, [out_spec, in_spec])
    sweep = _RowSweep(indicator, domain, quad_mesh)
    n_out, n_in = sweep.run([out_spec, in_spec])
    return (n_out - n_in) * quad_mesh * quad_mesh / (e * e)


def chi_bicovariogram_discrete(grid: BitGrid) -> int:
    """chi of an admissible grid computed purely through lattice variograms."""
    counts = config_counts(grid)
    if not counts.admissible:
        raise NotAdmissible(counts.phi_x_set, counts.phi_x_complement)
    e = grid.lattice.epsilon
    out = discrete_polyvariogram(
        grid, ShiftSpec(plus_shifts=[(0.0, 0.0)], minus_shifts=[(-e, 0.0), (0.0, -e)]))
    inn = discrete_polyvariogram(
        grid, ShiftSpec(plus_shifts=[(e, 0.0), (0.0, e)], minus_shifts=[(0.0, 0.0)]))
    return out - inn


def _unit(direction) -> tuple[float, float]:
    ux, uy = float(direction[0]), float(direction[1])
    n = math.hypot(ux, uy)
    if n == 0 or not math.isfinite(n):
        raise InvalidSpec(f"direction {direction!r} has no length")
    return (ux / n, uy / n)


def _richardson(epsilons, values) -> float:
    # the single-shift variogram is eps*Per_u/2 + O(eps^2); a linear fit
    # through the last two points cancels the leading bias
    e1, e2 = epsilons[-2], epsilons[-1]
    v1, v2 = values[-2], values[-1]
    return max(0.0, (e1 * v2 - e2 * v1) / (e1 - e2))


def _validate_epsilons(epsilons) -> tuple[float, ...]:
    eps = tuple(float(e) for e in epsilons)
    if len(eps) < 3:
        raise InvalidSpec("need at least 3 shift sizes")
    if any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise InvalidSpec("shift sizes must be positive and strictly decreasing")
    return eps


def _directional_values(indicator: IndicatorSet, directions, epsilons, quad_mesh):
    # one sweep for every (direction, epsilon) pair
    specs = []
    for u in directions:
        for e in epsilons:
            specs.append(ShiftSpec(plus_shifts=[(0.0, 0.0)],
                                   minus_shifts=[(e * u[0], e * u[1])]))
    domain = _sweep_domain(indicator, specs)
    sweep = _RowSweep(indicator, domain, quad_mesh)
    counts = sweep.run(specs)
    h2 = quad_mesh * quad_mesh
    per_dir = []
    k = 0
    for _ in directions:
        vals = tuple(2.0 * counts[k + i] * h2 / epsilons[i] for i in range(len(epsilons)))
        per_dir.append(vals)
        k += len(epsilons)
    return per_dir


def estimate_perimeter(indicator: IndicatorSet, direction, epsilons,
                       quad_mesh: float) -> PerimeterEstimate:
    """Directional perimeter 2*eps^-1*vol(A minus A shifted by eps*u), extrapolated to 0."""
    u = _unit(direction)
    eps = _validate_epsilons(epsilons)
    (values,) = _directional_values(indicator, [u], eps, quad_mesh)
    return PerimeterEstimate(direction=u, epsilons=eps, values=values,
                             extrapolated=_richardson(eps, values))


def perimeter_axis_sum(indicator: IndicatorSet, epsilons, quad_mesh: float) -> float:
    """Sum of the two axis-direction perimeters (the lattice-relevant total)."""
    eps = _validate_epsilons(epsilons)
    per_dir = _directional_values(indicator, [(1.0, 0.0), (0.0, 1.0)], eps, quad_mesh)
    return sum(_richardson(eps, vals) for vals in per_dir)


def perimeter_variational(indicator: IndicatorSet, epsilons, quad_mesh: float,
                          n_directions: int = 64) -> float:
    """Euclidean perimeter as a quarter of the angular average of Per_u."""
    if n_directions < 4:
        raise InvalidSpec("need at least 4 directions")
    eps = _validate_epsilons(epsilons)
    thetas = 2.0 * math.pi * np.arange(n_directions) / n_directions
    directions = [(math.cos(t), math.sin(t)) for t in thetas]
    per_dir = _directional_values(indicator, directions, eps, quad_mesh)
    total = math.fsum(_richardson(eps, vals) for vals in per_dir)
    return 0.25 * (2.0 * math.pi / n_directions) * total
