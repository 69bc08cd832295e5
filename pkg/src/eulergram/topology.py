"""Discrete Euler characteristic of bit grids.

Three independent routes to chi of a bounded lattice set M:

* local 2x2 configuration counting (corner bookkeeping),
* the V - E + F identity on the pixel complex,
* connected-component labeling (set components minus bounded holes).

On admissible grids (no X-configurations) all three agree; the window
counters also expose the X-configuration counts so callers can detect a
digitization that is too coarse for its target set.

Window convention: a window anchored at grid point z reads the four cells
a = z, b = z + e*u1 (east), c = z + e*u2 (north), d = z + e*(u1+u2).
Outward corners are (a=1, b=0, c=0), inward corners are (b=1, c=1, d=0),
X-configurations are (1,0,0,1) on the set and (0,1,1,0) on the complement.
Cells outside the grid read as background, which is only sound when no set
bit touches the grid border; every operation that relies on it enforces
that margin rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import MarginViolation, NotAdmissible
from .lattice import BitGrid

__all__ = [
    "ConfigCounts",
    "ComponentLabeling",
    "config_counts",
    "chi_local",
    "chi_vef",
    "label_components",
]

# 4-connectivity stencil shared by set and complement labeling.
_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class ConfigCounts:
    """Tally of 2x2 corner configurations over a whole grid."""

    phi_out: int
    phi_in: int
    phi_x_set: int
    phi_x_complement: int

    @property
    def admissible(self) -> bool:
        return self.phi_x_set == 0 and self.phi_x_complement == 0


@dataclass(frozen=True)
class ComponentLabeling:
    """4-connected component labels for one side of a grid.

    ``labels`` is 0 on cells outside the requested side; components are
    numbered 1..k in first-seen row-major order.  Both summary counts are
    always populated regardless of which side was labeled; the bounded
    complement count excludes the single component reachable from the
    grid border.
    """

    labels: np.ndarray
    num_set_components: int
    num_complement_bounded_components: int


def _require_margin(bits: np.ndarray) -> None:
    if bits[0, :].any() or bits[-1, :].any() or bits[:, 0].any() or bits[:, -1].any():
        raise MarginViolation(
            "set bits touch the grid border; embed the set with an empty one-cell margin"
        )


def _windows(bits: np.ndarray):
    # Pad one background cell on every side so windows anchored at border
    # points (and one row/column outside) see off-grid cells as empty.
    p = np.pad(bits, 1, constant_values=False)
    a = p[:-1, :-1]
    b = p[:-1, 1:]
    c = p[1:, :-1]
    d = p[1:, 1:]
    return a, b, c, d


def config_counts(grid: BitGrid) -> ConfigCounts:
    """Count outward, inward and X configurations over all 2x2 windows."""
    bits = grid.bits
    _require_margin(bits)
    a, b, c, d = _windows(bits)
    out = a & ~b & ~c
    inn = b & c & ~d
    return ConfigCounts(
        phi_out=int(out.sum()),
        phi_in=int(inn.sum()),
        phi_x_set=int((out & d).sum()),
        phi_x_complement=int((inn & ~a).sum()),
    )


def chi_local(grid: BitGrid) -> int:
    """Euler characteristic as the excess of outward over inward corners.

    Only valid on admissible grids; an X-configuration means two diagonal
    cells meet at a point and component counting becomes ambiguous, so the
    grid is rejected instead of guessed at.
    """
    counts = config_counts(grid)
    if not counts.admissible:
        raise NotAdmissible(counts.phi_x_set, counts.phi_x_complement)
    return counts.phi_out - counts.phi_in


def chi_vef(grid: BitGrid) -> int:
    """Euler characteristic of the pixel complex: vertices - edges + faces.

    V counts set bits, E counts 4-adjacent set-bit pairs, F counts fully
    set 2x2 blocks.  Total on any grid, no margin or admissibility needed;
    on admissible grids it agrees with chi_local.
    """
    bits = grid.bits
    v = int(bits.sum())
    e = int((bits[:, 1:] & bits[:, :-1]).sum()) + int((bits[1:, :] & bits[:-1, :]).sum())
    f = int((bits[1:, 1:] & bits[1:, :-1] & bits[:-1, 1:] & bits[:-1, :-1]).sum())
    return v - e + f


def _first_seen_relabel(raw: np.ndarray, count: int) -> np.ndarray:
    # Renumber nonzero labels 1..count by order of first appearance in a
    # row-major scan, so identical grids always get identical labelings.
    if count == 0:
        return raw
    flat = raw.ravel()
    first = np.full(count + 1, flat.size, dtype=np.int64)
    idx = np.flatnonzero(flat)
    # reversed assignment leaves the smallest index in place
    first[flat[idx[::-1]]] = idx[::-1]
    order = np.argsort(first[1:], kind="stable")
    remap = np.zeros(count + 1, dtype=raw.dtype)
    remap[1 + order] = np.arange(1, count + 1)
    return remap[raw]


def label_components(grid: BitGrid, which: str = "set") -> ComponentLabeling:
    """Label 4-connected components of the set or of its complement.

    The complement's unbounded component is the one reachable from the
    grid border; it is excluded from the bounded count and labeled 0 in a
    complement labeling, so labels > 0 mark holes.  A complement labeling
    demands the empty one-cell margin (the border flood must represent
    off-grid space); a set labeling has no such requirement.
    """
    if which not in ("set", "complement"):
        raise ValueError(f"which must be 'set' or 'complement', got {which!r}")
    bits = grid.bits
    if which == "complement":
        _require_margin(bits)

    set_raw, n_set = ndimage.label(bits, structure=_CROSS)
    # complement labeled with a one-cell True frame so everything touching
    # the border collapses into a single unbounded component
    framed = np.pad(~bits, 1, constant_values=True)
    comp_raw, n_comp = ndimage.label(framed, structure=_CROSS)
    unbounded = comp_raw[0, 0]
    n_bounded = n_comp - 1

    if which == "set":
        labels = _first_seen_relabel(set_raw, n_set)
    else:
        inner = comp_raw[1:-1, 1:-1].copy()
        inner[inner == unbounded] = 0
        # compact to 1..n_bounded before ordering
        kept = np.unique(inner[inner > 0])
        remap = np.zeros(n_comp + 1, dtype=inner.dtype)
        remap[kept] = np.arange(1, len(kept) + 1)
        labels = _first_seen_relabel(remap[inner], n_bounded)

    return ComponentLabeling(
        labels=labels,
        num_set_components=int(n_set),
        num_complement_bounded_components=int(n_bounded),
    )
