"""Square lattices, bit grids and Gauss digitization.

Design notes
------------
A :class:`Lattice` is the finite window ``{origin + epsilon*(i, j)}`` for
``0 <= i < nx``, ``0 <= j < ny``.  A :class:`BitGrid` stores one bit per
lattice point in a read-only numpy bool array of shape ``(ny, nx)``; row
``j`` holds the points with the j-th smallest y coordinate.  Vectorized
boolean algebra on these arrays plays the role of word-wise bit fiddling.

Digitization samples the indicator predicate at every lattice point, so
whether boundary points belong to the set is decided by the predicate
itself (closed sets answer True on their boundary).  Shifted sampling
re-evaluates the predicate at the shifted points; nothing is ever padded
or interpolated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Lattice",
    "IndicatorSet",
    "BitGrid",
    "digitize",
    "grid_volume",
    "lattice_covering",
    "write_pgm",
    "read_pgm",
]


@dataclass(frozen=True)
class Lattice:
    """Finite square lattice with spacing ``epsilon`` anchored at ``origin``."""

    epsilon: float
    origin: tuple[float, float]
    nx: int
    ny: int

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid must hold at least one point per axis")

    def point(self, i: int, j: int) -> tuple[float, float]:
        return (self.origin[0] + self.epsilon * i, self.origin[1] + self.epsilon * j)

    def xs(self) -> np.ndarray:
        return self.origin[0] + self.epsilon * np.arange(self.nx)

    def ys(self) -> np.ndarray:
        return self.origin[1] + self.epsilon * np.arange(self.ny)


@dataclass(frozen=True)
class IndicatorSet:
    """A measurable planar set given by its indicator predicate.

    ``contains`` must accept broadcastable numpy arrays ``(x, y)`` and
    return a bool array of the broadcast shape.  ``bounding_box`` is
    ``(x0, x1, y0, y1)`` with the set contained in the closed box.
    ``regularity_radius`` is the rolling-ball radius when known,
    ``normal`` maps boundary-adjacent points to outward unit normals and
    ``signed_distance`` (negative inside) is exposed by constructors that
    can provide it; all three default to unavailable.
    """

    contains: Callable[[np.ndarray, np.ndarray], np.ndarray]
    bounding_box: tuple[float, float, float, float]
    regularity_radius: Optional[float] = None
    normal: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    signed_distance: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def contains_point(self, x: float, y: float) -> bool:
        return bool(np.asarray(self.contains(np.asarray(x), np.asarray(y))))


@dataclass(frozen=True, eq=False)
class BitGrid:
    """Bits of a digitized set on a lattice.  Immutable."""

    lattice: Lattice
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (self.lattice.ny, self.lattice.nx):
            raise ValueError(
                "bits shape %s does not match lattice (ny=%d, nx=%d)"
                % (bits.shape, self.lattice.ny, self.lattice.nx)
            )
        bits = bits.copy()
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def complement(self) -> "BitGrid":
        return BitGrid(self.lattice, ~self.bits)

    def __invert__(self) -> "BitGrid":
        return self.complement()

    def _check_same_lattice(self, other: "BitGrid") -> None:
        if self.lattice != other.lattice:
            raise ValueError("bit grids live on different lattices")

    def __and__(self, other: "BitGrid") -> "BitGrid":
        self._check_same_lattice(other)
        return BitGrid(self.lattice, self.bits & other.bits)

    def __or__(self, other: "BitGrid") -> "BitGrid":
        self._check_same_lattice(other)
        return BitGrid(self.lattice, self.bits | other.bits)

    def __xor__(self, other: "BitGrid") -> "BitGrid":
        self._check_same_lattice(other)
        return BitGrid(self.lattice, self.bits ^ other.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitGrid):
            return NotImplemented
        return self.lattice == other.lattice and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.lattice, self.bits.tobytes()))


def digitize(
    indicator: IndicatorSet,
    lattice: Lattice,
    offset: tuple[float, float] = (0.0, 0.0),
) -> BitGrid:
    """Sample ``indicator`` on ``lattice`` shifted by ``offset``.

    Bit ``(i, j)`` is set iff the predicate holds at
    ``origin + epsilon*(i, j) + offset``.  Points of the set falling
    outside the lattice window are silently truncated; size the lattice
    with :func:`lattice_covering` to avoid that.
    """
    xs = lattice.xs() + offset[0]
    ys = lattice.ys() + offset[1]
    gx, gy = np.broadcast_arrays(xs[None, :], ys[:, None])
    mask = np.asarray(indicator.contains(gx, gy), dtype=bool)
    return BitGrid(lattice, mask)


def grid_volume(grid: BitGrid) -> float:
    """Counting-measure volume: epsilon^2 per set bit."""
    return grid.lattice.epsilon ** 2 * grid.count


def lattice_covering(
    bounding_box: tuple[float, float, float, float],
    epsilon: float,
    margin: int = 1,
) -> Lattice:
    """Smallest lattice of spacing ``epsilon``, anchored on ``epsilon * Z^2``,
    covering the box with ``margin`` extra empty cells on every side."""
    x0, x1, y0, y1 = bounding_box
    if not (x1 >= x0 and y1 >= y0):
        raise ValueError("malformed bounding box")
    i0 = int(np.floor(x0 / epsilon)) - margin
    i1 = int(np.ceil(x1 / epsilon)) + margin
    j0 = int(np.floor(y0 / epsilon)) - margin
    j1 = int(np.ceil(y1 / epsilon)) + margin
    return Lattice(
        epsilon=epsilon,
        origin=(i0 * epsilon, j0 * epsilon),
        nx=i1 - i0 + 1,
        ny=j1 - j0 + 1,
    )


# ---------------------------------------------------------------------------
# binary bitmap I/O (P4) with a JSON sidecar for lattice metadata


def write_pgm(grid: BitGrid, path) -> None:
    """Write the bits as a binary P4 bitmap plus a ``.json`` sidecar.

    Width is nx, height is ny, rows are packed most-significant-bit
    first, and file row 0 is the row with the smallest y coordinate.
    """
    path = Path(path)
    header = b"P4\n%d %d\n" % (grid.lattice.nx, grid.lattice.ny)
    packed = np.packbits(grid.bits, axis=1)
    path.write_bytes(header + packed.tobytes())
    sidecar = {
        "epsilon": grid.lattice.epsilon,
        "origin": [grid.lattice.origin[0], grid.lattice.origin[1]],
        "nx": grid.lattice.nx,
        "ny": grid.lattice.ny,
    }
    path.with_suffix(".json").write_text(json.dumps(sidecar, sort_keys=True))


def read_pgm(path) -> BitGrid:
    """Read a bitmap written by :func:`write_pgm` (sidecar required)."""
    path = Path(path)
    raw = path.read_bytes()
    magic, pos = _next_token(raw, 0)
    if magic != b"P4":
        raise ValueError("not a P4 bitmap: %r" % magic)
    wtok, pos = _next_token(raw, pos)
    htok, pos = _next_token(raw, pos)
    nx, ny = int(wtok), int(htok)
    # exactly one whitespace byte separates the header from the raster
    data = raw[pos + 1 :]
    row_bytes = (nx + 7) // 8
    packed = np.frombuffer(data[: ny * row_bytes], dtype=np.uint8).reshape(ny, row_bytes)
    bits = np.unpackbits(packed, axis=1)[:, :nx].astype(bool)
    meta = json.loads(path.with_suffix(".json").read_text())
    lattice = Lattice(
        epsilon=float(meta["epsilon"]),
        origin=(float(meta["origin"][0]), float(meta["origin"][1])),
        nx=int(meta["nx"]),
        ny=int(meta["ny"]),
    )
    if (lattice.nx, lattice.ny) != (nx, ny):
        raise ValueError("sidecar dimensions disagree with bitmap header")
    return BitGrid(lattice, bits)


def _next_token(raw: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comment lines, per the netpbm header grammar
    n = len(raw)
    while pos < n:
        c = raw[pos : pos + 1]
        if c == b"#":
            while pos < n and raw[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not raw[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise ValueError("truncated bitmap header")
    return raw[start:pos], pos
