"""Test sets: polyrectangle windows, smooth shapes, ball morphology.

Polyrectangles (finite unions of axis-aligned rectangles, no two member
rectangles sharing a corner) get exact geometry from a coordinate-sweep
arrangement: collect every rectangle edge coordinate, mark occupied cells,
classify each arrangement vertex by its four quadrant cells.  The same
2x2 pattern logic that drives the lattice Euler characteristic then yields
chi, the directional perimeters and the corner census in closed form.

Smooth shapes (disc, annulus, unions, implicit sets) are exposed as
predicates with bounding box, regularity radius and boundary normals, the
metadata the digitization experiments and the transversality screen need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import ndimage

from .errors import CornerClash, InvalidSpec, NoNormalAvailable, RadiusTooSmall
from .lattice import BitGrid, IndicatorSet

__all__ = [
    "PolyRectangle",
    "MorphologyResult",
    "TransversalityReport",
    "polyrect_features",
    "corner_points",
    "make_shape",
    "morph",
    "check_transversality",
]


@dataclass(frozen=True)
class PolyRectangle:
    """Union of closed axis-aligned rectangles (x0, x1, y0, y1)."""

    rects: tuple[tuple[float, float, float, float], ...]

    def __post_init__(self):
        norm = []
        for r in self.rects:
            x0, x1, y0, y1 = (float(v) for v in r)
            if not (x1 > x0 and y1 > y0):
                raise InvalidSpec(f"degenerate rectangle {r!r}")
            norm.append((x0, x1, y0, y1))
        if not norm:
            raise InvalidSpec("a polyrectangle needs at least one rectangle")
        object.__setattr__(self, "rects", tuple(norm))
        seen: dict[tuple[float, float], int] = {}
        for i, (x0, x1, y0, y1) in enumerate(self.rects):
            for c in ((x0, y0), (x0, y1), (x1, y0), (x1, y1)):
                j = seen.setdefault(c, i)
                if j != i:
                    raise CornerClash(f"rectangles {j} and {i} share corner {c}")

    @property
    def bounding_box(self) -> tuple[float, float, float, float]:
        x0 = min(r[0] for r in self.rects)
        x1 = max(r[1] for r in self.rects)
        y0 = min(r[2] for r in self.rects)
        y1 = max(r[3] for r in self.rects)
        return (x0, x1, y0, y1)

    def contains(self, x, y):
        """Closed-union membership, vectorized over broadcast arrays."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        for x0, x1, y0, y1 in self.rects:
            out |= (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)
        return out

    @cached_property
    def _arrangement(self):
        xs = np.unique([v for r in self.rects for v in (r[0], r[1])])
        ys = np.unique([v for r in self.rects for v in (r[2], r[3])])
        occ = np.zeros((len(ys) - 1, len(xs) - 1), dtype=bool)
        for x0, x1, y0, y1 in self.rects:
            i0, i1 = np.searchsorted(xs, (x0, x1))
            j0, j1 = np.searchsorted(ys, (y0, y1))
            occ[j0:j1, i0:i1] = True
        return xs, ys, occ

    @cached_property
    def features(self) -> dict:
        return polyrect_features(self)


def _vertex_quadrants(w: PolyRectangle):
    xs, ys, occ = w._arrangement
    p = np.pad(occ, 1, constant_values=False)
    sw = p[:-1, :-1]
    se = p[:-1, 1:]
    nw = p[1:, :-1]
    ne = p[1:, 1:]
    return xs, ys, sw, se, nw, ne


def polyrect_features(w: PolyRectangle) -> dict:
    """Exact chi, directional perimeters, area and corner counts.

    chi counts arrangement vertices whose only occupied quadrant is the
    south-west one, minus those whose only empty quadrant is the
    north-east one; per1 sums boundary edges whose normal is horizontal,
    per2 those with vertical normal.
    """
    xs, ys, sw, se, nw, ne = _vertex_quadrants(w)
    out = sw & ~se & ~nw & ~ne
    inn = sw & se & nw & ~ne
    _, _, occ = w._arrangement
    dx = np.diff(xs)
    dy = np.diff(ys)
    p = np.pad(occ, 1, constant_values=False)
    vb = p[1:-1, 1:] ^ p[1:-1, :-1]
    hb = p[1:, 1:-1] ^ p[:-1, 1:-1]
    return {
        "chi": int(out.sum()) - int(inn.sum()),
        "per1": float((dy[:, None] * vb).sum()),
        "per2": float((hb * dx[None, :]).sum()),
        "vol": float((dy[:, None] * occ * dx[None, :]).sum()),
        "out_corners": int(out.sum()),
        "in_corners": int(inn.sum()),
    }


def corner_points(w: PolyRectangle) -> list[tuple[float, float]]:
    """All boundary corners: vertices with an odd number of occupied quadrants."""
    xs, ys, sw, se, nw, ne = _vertex_quadrants(w)
    s = sw.astype(np.int8) + se + nw + ne
    jj, ii = np.nonzero((s == 1) | (s == 3))
    return [(float(xs[i]), float(ys[j])) for j, i in zip(jj, ii)]


def _boundary_segments(w: PolyRectangle):
    """Yield (p0, p1, normal) over the arrangement's boundary edges."""
    xs, ys, occ = w._arrangement
    p = np.pad(occ, 1, constant_values=False)
    vb = p[1:-1, 1:] ^ p[1:-1, :-1]
    hb = p[1:, 1:-1] ^ p[:-1, 1:-1]
    for j, i in zip(*np.nonzero(vb)):
        yield (xs[i], ys[j]), (xs[i], ys[j + 1]), (1.0, 0.0)
    for j, i in zip(*np.nonzero(hb)):
        yield (xs[i], ys[j]), (xs[i + 1], ys[j]), (0.0, 1.0)


def make_shape(spec: dict) -> IndicatorSet:
    """Build a membership predicate with geometry metadata from a plain dict.

    Supported kinds: {"type": "disc", "center": [x, y], "r": r},
    {"type": "annulus", "center": [x, y], "r_in": a, "r_out": b},
    {"type": "union", "members": [spec, ...]} and
    {"type": "implicit", "g": callable, "grad": callable,
     "bounding_box": [x0, x1, y0, y1], "rho": optional}.  The set is
    {g <= 0} for implicit specs; g must accept numpy arrays.
    """
    kind = spec.get("type")
    if kind == "disc":
        cx, cy = (float(v) for v in spec["center"])
        r = float(spec["r"])
        if r <= 0:
            raise InvalidSpec(f"disc radius must be positive, got {r}")

        def contains(x, y, cx=cx, cy=cy, r=r):
            return (np.asarray(x) - cx) ** 2 + (np.asarray(y) - cy) ** 2 <= r * r

        def normal(x, y, cx=cx, cy=cy):
            d = math.hypot(x - cx, y - cy)
            if d == 0:
                return (1.0, 0.0)
            return ((x - cx) / d, (y - cy) / d)

        return IndicatorSet(
            contains=contains,
            bounding_box=(cx - r, cx + r, cy - r, cy + r),
            regularity_radius=r,
            normal=normal,
            signed_distance=lambda x, y: math.hypot(x - cx, y - cy) - r,
        )

    if kind == "annulus":
        cx, cy = (float(v) for v in spec["center"])
        r_in = float(spec["r_in"])
        r_out = float(spec["r_out"])
        if r_in <= 0 or r_out <= 0:
            raise InvalidSpec("annulus radii must be positive")
        if r_in >= r_out:
            raise InvalidSpec(f"need r_in < r_out, got {r_in} >= {r_out}")

        def contains(x, y, cx=cx, cy=cy, a=r_in, b=r_out):
            d2 = (np.asarray(x) - cx) ** 2 + (np.asarray(y) - cy) ** 2
            return (d2 >= a * a) & (d2 <= b * b)

        def normal(x, y, cx=cx, cy=cy, a=r_in, b=r_out):
            d = math.hypot(x - cx, y - cy)
            if d == 0:
                return (1.0, 0.0)
            u = ((x - cx) / d, (y - cy) / d)
            # outward normal of the set: radial on the outer circle,
            # anti-radial on the inner one; split at the midline
            if d >= 0.5 * (a + b):
                return u
            return (-u[0], -u[1])

        return IndicatorSet(
            contains=contains,
            bounding_box=(cx - r_out, cx + r_out, cy - r_out, cy + r_out),
            regularity_radius=min(r_in, r_out - r_in),
            normal=normal,
            signed_distance=lambda x, y: max(
                r_in - math.hypot(x - cx, y - cy), math.hypot(x - cx, y - cy) - r_out),
        )

    if kind == "union":
        members = [make_shape(m) for m in spec["members"]]
        if not members:
            raise InvalidSpec("union needs at least one member")

        def contains(x, y, members=members):
            out = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)
            for m in members:
                out |= m.contains(x, y)
            return out

        boxes = [m.bounding_box for m in members]
        bbox = (min(b[0] for b in boxes), max(b[1] for b in boxes),
                min(b[2] for b in boxes), max(b[3] for b in boxes))
        rhos = [m.regularity_radius for m in members]
        rho = None if any(r is None for r in rhos) else min(rhos)

        sd_members = [m.signed_distance for m in members]
        signed_distance = None
        normal = None
        if all(sd is not None for sd in sd_members):
            def signed_distance(x, y, sd_members=sd_members):
                return min(sd(x, y) for sd in sd_members)
        if all(m.normal is not None and m.signed_distance is not None for m in members):
            def normal(x, y, members=members):
                # boundary of a gapped union: delegate to the nearest member
                best = min(members, key=lambda m: abs(m.signed_distance(x, y)))
                return best.normal(x, y)

        return IndicatorSet(contains=contains, bounding_box=bbox,
                            regularity_radius=rho, normal=normal,
                            signed_distance=signed_distance)

    if kind == "implicit":
        g = spec.get("g")
        grad = spec.get("grad")
        bbox = spec.get("bounding_box")
        if g is None or bbox is None:
            raise InvalidSpec("implicit shape needs 'g' and 'bounding_box'")

        def contains(x, y, g=g):
            return np.asarray(g(x, y)) <= 0

        normal = None
        if grad is not None:
            def normal(x, y, grad=grad):
                gx, gy = grad(x, y)
                n = math.hypot(gx, gy)
                if n == 0:
                    return (1.0, 0.0)
                return (gx / n, gy / n)

        rho = spec.get("rho")
        return IndicatorSet(contains=contains,
                            bounding_box=tuple(float(v) for v in bbox),
                            regularity_radius=None if rho is None else float(rho),
                            normal=normal, signed_distance=None)

    raise InvalidSpec(f"unknown shape type {kind!r}")


@dataclass(frozen=True)
class MorphologyResult:
    grid: BitGrid
    radius: float
    op: str


def _ball_mask(dist: np.ndarray, r_cells: float) -> np.ndarray:
    # closed-ball threshold on squared distances; the slack absorbs the
    # float round trip through the square root without ever admitting the
    # next integer radius
    d2 = dist * dist
    return d2 <= r_cells * r_cells * (1.0 + 1e-12) + 1e-9


def morph(grid: BitGrid, radius: float, op: str) -> MorphologyResult:
    """Dilate or erode by a closed Euclidean ball, exactly on the lattice.

    Erosion is the complement of dilating the complement; the complement
    is padded out far enough that everything beyond the grid counts as
    background, which keeps the duality bit-exact.
    """
    eps = grid.lattice.epsilon
    if radius < eps:
        raise RadiusTooSmall(f"radius {radius} is below the mesh {eps}")
    if op not in ("dilate", "erode"):
        raise InvalidSpec(f"op must be 'dilate' or 'erode', got {op!r}")
    r_cells = radius / eps

    if op == "dilate":
        dist = ndimage.distance_transform_edt(~grid.bits)
        bits = _ball_mask(dist, r_cells)
    else:
        pad = int(math.ceil(r_cells)) + 1
        comp = np.pad(~grid.bits, pad, constant_values=True)
        dist = ndimage.distance_transform_edt(~comp)
        grown = _ball_mask(dist, r_cells)
        bits = ~grown[pad:-pad, pad:-pad]

    return MorphologyResult(grid=BitGrid(lattice=grid.lattice, bits=bits),
                            radius=float(radius), op=op)


@dataclass(frozen=True)
class TransversalityReport:
    passed: bool
    min_angle: float | None
    crossings: tuple[tuple[float, float, float], ...]  # (x, y, angle to nearest +-n_W)
    corner_hits: tuple[tuple[float, float], ...]


def _bisect_crossing(contains, p0, p1, t0, t1, iters=60):
    v0 = bool(contains(np.array(p0[0] + t0 * (p1[0] - p0[0])),
                       np.array(p0[1] + t0 * (p1[1] - p0[1]))))
    for _ in range(iters):
        tm = 0.5 * (t0 + t1)
        vm = bool(contains(np.array(p0[0] + tm * (p1[0] - p0[0])),
                           np.array(p0[1] + tm * (p1[1] - p0[1]))))
        if vm == v0:
            t0 = tm
        else:
            t1 = tm
    tm = 0.5 * (t0 + t1)
    return (p0[0] + tm * (p1[0] - p0[0]), p0[1] + tm * (p1[1] - p0[1]))


def check_transversality(indicator: IndicatorSet, w: PolyRectangle,
                         angle_tol: float = 1e-3,
                         n_samples: int = 256) -> TransversalityReport:
    """Screen the set boundary's crossings of the window boundary.

    Samples each window edge, bisects every sign change of the membership
    predicate to a crossing point, and measures the angle between the set
    normal there and the edge normal (folded to [0, pi/2]).  Passes iff
    every crossing angle exceeds angle_tol and no window corner sits on
    the set boundary.  A numerical screen for degenerate fixtures, not a
    proof: tangencies that never flip the predicate between samples are
    invisible to it.
    """
    if indicator.normal is None:
        raise NoNormalAvailable("shape provides no boundary normal")

    segments = list(_boundary_segments(w))
    total_len = sum(math.hypot(p1[0] - p0[0], p1[1] - p0[1]) for p0, p1, _ in segments)
    crossings = []
    for p0, p1, n_w in segments:
        seg_len = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
        m = max(2, int(round(n_samples * seg_len / total_len)))
        ts = (np.arange(m) + 0.5) / m
        px = p0[0] + ts * (p1[0] - p0[0])
        py = p0[1] + ts * (p1[1] - p0[1])
        vals = np.asarray(indicator.contains(px, py), dtype=bool)
        for k in np.flatnonzero(vals[1:] != vals[:-1]):
            cx, cy = _bisect_crossing(indicator.contains, p0, p1, ts[k], ts[k + 1])
            nf = indicator.normal(cx, cy)
            dot = abs(nf[0] * n_w[0] + nf[1] * n_w[1])
            angle = math.acos(min(1.0, dot))
            crossings.append((float(cx), float(cy), float(angle)))

    # corner-on-boundary screen at the sampling resolution
    tol = total_len / max(n_samples, 1)
    corner_hits = []
    for cx, cy in corner_points(w):
        if indicator.signed_distance is not None:
            on_boundary = abs(indicator.signed_distance(cx, cy)) < tol
        else:
            angles = np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False)
            ring = np.asarray(indicator.contains(cx + tol * np.cos(angles),
                                                 cy + tol * np.sin(angles)), dtype=bool)
            on_boundary = ring.any() and not ring.all()
        if on_boundary:
            corner_hits.append((cx, cy))

    min_angle = min((a for _, _, a in crossings), default=None)
    passed = (min_angle is None or min_angle > angle_tol) and not corner_hits
    return TransversalityReport(passed=passed, min_angle=min_angle,
                                crossings=tuple(crossings),
                                corner_hits=tuple(corner_hits))
