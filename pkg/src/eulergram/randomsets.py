"""Shot-noise fields with polyrectangular grains and their mean geometry.

The random field is f(y) = sum of m * 1{y in x + W} over a Poisson process
of germs x with i.i.d. grains W and marks m; the object of study is the
level set F = {f >= lambda}, which for unit marks and lambda in (0,1) is
the boolean model.  Everything here is exact per realization: F restricted
to a polyrectangular window is itself a polyrectangle living on the cell
arrangement spanned by the germ rectangle edges, so chi, perimeters and
areas come from integer/float cell bookkeeping rather than digitization.

The closed-form mean of chi(F intersect V) is evaluated from the grain
moments and the law of f(0), which for atomic marks is a compound Poisson
sum computed by truncated convolution.  The Monte Carlo estimator next to
it simulates honestly and is the measuring stick the closed form is
compared against.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateArrangement,
    InvalidSpec,
    NotBooleanRegime,
    UnboundedGrain,
    UnsupportedMarkLaw,
)
from .shapes import PolyRectangle, polyrect_features

__all__ = [
    "AtomicMarks",
    "ExponentialMarks",
    "UniformMarks",
    "GrainMixture",
    "RectFamily",
    "ShotNoiseModel",
    "Realization",
    "StationaryDensities",
    "sample_realization",
    "level_set_chi_exact",
    "level_set_features_exact",
    "mean_chi_closed_form",
    "boolean_mean_chi",
    "mc_mean_chi",
    "estimate_stationary_densities",
]

_TAIL_TOL = 1e-12


# ---------------------------------------------------------------- mark laws

@dataclass(frozen=True)
class AtomicMarks:
    """Finite mixture of strictly positive mark values."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        ps = tuple(float(p) for p in self.probs)
        if len(vals) != len(ps) or not vals:
            raise InvalidSpec("mark atoms and probabilities must pair up")
        if any(v <= 0 for v in vals):
            raise InvalidSpec("mark atoms must be strictly positive")
        if any(p < 0 for p in ps) or abs(sum(ps) - 1.0) > 1e-12:
            raise InvalidSpec("mark probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "probs", ps)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if len(self.values) == 1:
            return np.full(n, self.values[0])
        return rng.choice(np.array(self.values), size=n, p=np.array(self.probs))

    @property
    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.values, self.probs))


@dataclass(frozen=True)
class ExponentialMarks:
    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise InvalidSpec("exponential mark scale must be positive")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.maximum(rng.exponential(self.scale, size=n), 1e-300)

    @property
    def mean(self) -> float:
        return self.scale


@dataclass(frozen=True)
class UniformMarks:
    low: float
    high: float

    def __post_init__(self):
        if not (0 <= self.low < self.high):
            raise InvalidSpec("uniform marks need 0 <= low < high")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=n)

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)


# ------------------------------------------------------- grain distributions

@dataclass(frozen=True)
class GrainMixture:
    """Finite mixture of fixed polyrectangles with probabilities."""

    components: tuple[PolyRectangle, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        ps = tuple(float(p) for p in self.probs)
        if len(comps) != len(ps) or not comps:
            raise InvalidSpec("grain components and probabilities must pair up")
        if any(p < 0 for p in ps) or abs(sum(ps) - 1.0) > 1e-12:
            raise InvalidSpec("grain probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "probs", ps)

    def moments(self) -> dict:
        out = {"chi": 0.0, "per1": 0.0, "per2": 0.0, "vol": 0.0}
        for w, p in zip(self.components, self.probs):
            f = polyrect_features(w)
            for k in out:
                out[k] += p * f[k]
        return out

    def extent(self) -> tuple[float, float, float, float]:
        boxes = [w.bounding_box for w in self.components]
        return (min(b[0] for b in boxes), max(b[1] for b in boxes),
                min(b[2] for b in boxes), max(b[3] for b in boxes))

    def min_edge(self) -> float:
        return min(min(x1 - x0, y1 - y0)
                   for w in self.components for x0, x1, y0, y1 in w.rects)

    def sample(self, rng: np.random.Generator, n: int) -> list[PolyRectangle]:
        if len(self.components) == 1:
            return [self.components[0]] * n
        idx = rng.choice(len(self.components), size=n, p=np.array(self.probs))
        return [self.components[i] for i in idx]


def _scalar_law(cfg: dict):
    dist = cfg.get("dist")
    if dist == "uniform":
        lo, hi = float(cfg["low"]), float(cfg["high"])
        if not (0 < lo < hi):
            raise InvalidSpec("uniform edge law needs 0 < low < high")
        return ("uniform", lo, hi)
    if dist == "exponential":
        scale = float(cfg["scale"])
        if scale <= 0:
            raise InvalidSpec("exponential edge law needs positive scale")
        q = cfg.get("truncate_q")
        return ("exponential", scale, None if q is None else float(q))
    raise InvalidSpec(f"unknown edge law {dist!r}")


@dataclass(frozen=True)
class RectFamily:
    """Random rectangles [0,A] x [0,B] with independent edge laws.

    Each law is ('uniform', low, high) or ('exponential', scale, truncate_q);
    an exponential law has no almost-sure bound, so sampling demands a
    truncation quantile to derive the germ-domain padding (recorded on the
    realization), while the moment formulas stay exact.
    """

    a_law: tuple
    b_law: tuple

    def moments(self) -> dict:
        ea, eb = self._mean(self.a_law), self._mean(self.b_law)
        return {"chi": 1.0, "per1": 2.0 * eb, "per2": 2.0 * ea, "vol": ea * eb}

    @staticmethod
    def _mean(law) -> float:
        if law[0] == "uniform":
            return 0.5 * (law[1] + law[2])
        return law[1]

    @staticmethod
    def _bound(law) -> float | None:
        if law[0] == "uniform":
            return law[2]
        if law[2] is not None:
            return -law[1] * math.log1p(-law[2])
        return None

    def extent(self) -> tuple[float, float, float, float]:
        ba, bb = self._bound(self.a_law), self._bound(self.b_law)
        if ba is None or bb is None:
            raise UnboundedGrain(
                "edge law has unbounded support; set truncate_q to pad the germ domain")
        return (0.0, ba, 0.0, bb)

    def min_edge(self) -> float:
        return min(self._mean(self.a_law), self._mean(self.b_law))

    def truncation_note(self) -> str | None:
        notes = []
        for name, law in (("A", self.a_law), ("B", self.b_law)):
            if law[0] == "exponential" and law[2] is not None:
                notes.append(f"{name} truncated at quantile {law[2]}")
        return "; ".join(notes) or None

    def sample(self, rng: np.random.Generator, n: int) -> list[PolyRectangle]:
        def draw(law):
            if law[0] == "uniform":
                return rng.uniform(law[1], law[2], size=n)
            vals = rng.exponential(law[1], size=n)
            bound = self._bound(law)
            if bound is not None:
                vals = np.minimum(vals, bound)
            return np.maximum(vals, 1e-300)

        aa, bb = draw(self.a_law), draw(self.b_law)
        return [PolyRectangle(rects=((0.0, a, 0.0, b),)) for a, b in zip(aa, bb)]


# ------------------------------------------------------------------- model

@dataclass(frozen=True)
class ShotNoiseModel:
    intensity: float
    grain_dist: GrainMixture | RectFamily
    mark_dist: AtomicMarks | ExponentialMarks | UniformMarks
    level: float

    def __post_init__(self):
        if self.intensity < 0 or not math.isfinite(self.intensity):
            raise InvalidSpec("intensity must be a finite nonnegative real")
        # integrability: E[mark] * E[grain volume] finite by construction
        vol = self.grain_dist.moments()["vol"]
        if not math.isfinite(vol * self.mark_dist.mean):
            raise InvalidSpec("expected mark x grain volume must be finite")

    @classmethod
    def from_config(cls, cfg: dict) -> "ShotNoiseModel":
        """Build a model from the JSON experiment layout.

        {"intensity": 1.0, "grains": [{"rects": [[0,1,0,1]], "p": 1.0}],
         "marks": [{"value": 1.0, "p": 1.0}], "lambda": 1.5}; 'grains' may
        instead be {"type": "rect_family", "a": {...}, "b": {...}} and
        'marks' may be {"type": "exponential"|"uniform", ...}.
        """
        grains = cfg["grains"]
        if isinstance(grains, dict):
            if grains.get("type") != "rect_family":
                raise InvalidSpec(f"unknown grain family {grains.get('type')!r}")
            grain_dist = RectFamily(a_law=_scalar_law(grains["a"]),
                                    b_law=_scalar_law(grains["b"]))
        else:
            grain_dist = GrainMixture(
                components=tuple(PolyRectangle(rects=tuple(tuple(r) for r in g["rects"]))
                                 for g in grains),
                probs=tuple(g["p"] for g in grains))
        marks = cfg["marks"]
        if isinstance(marks, dict):
            kind = marks.get("type")
            if kind == "exponential":
                mark_dist = ExponentialMarks(scale=float(marks["scale"]))
            elif kind == "uniform":
                mark_dist = UniformMarks(low=float(marks["low"]), high=float(marks["high"]))
            else:
                raise InvalidSpec(f"unknown mark law {kind!r}")
        else:
            mark_dist = AtomicMarks(values=tuple(m["value"] for m in marks),
                                    probs=tuple(m["p"] for m in marks))
        return cls(intensity=float(cfg["intensity"]), grain_dist=grain_dist,
                   mark_dist=mark_dist, level=float(cfg["lambda"]))


@dataclass(frozen=True)
class Realization:
    """Germs drawn on a padded domain, with the draw's bookkeeping."""

    germs: tuple[tuple[tuple[float, float], PolyRectangle, float], ...]
    domain: tuple[float, float, float, float]
    padded_domain: tuple[float, float, float, float]
    expected_count: float
    truncation: str | None = None

    @property
    def count(self) -> int:
        return len(self.germs)


def sample_realization(model: ShotNoiseModel, domain, seed: int) -> Realization:
    """Draw one Poisson field of germs whose grains can reach the domain.

    The germ region is the domain padded on every side by the maximal
    grain extent of that axis (largest coordinate magnitude over the
    family), a superset of the germs whose grains can touch the domain,
    so the field restricted to the domain has exactly the law of the
    infinite-plane process.  Deterministic given the seed: germ count,
    then locations, then grains, then marks are drawn in that fixed order.
    """
    x0, x1, y0, y1 = (float(v) for v in domain)
    ex0, ex1, ey0, ey1 = model.grain_dist.extent()
    pad_x, pad_y = max(abs(ex0), abs(ex1)), max(abs(ey0), abs(ey1))
    px0, px1 = x0 - pad_x, x1 + pad_x
    py0, py1 = y0 - pad_y, y1 + pad_y
    mean = model.intensity * (px1 - px0) * (py1 - py0)

    rng = np.random.default_rng(seed)
    n = int(rng.poisson(mean)) if mean > 0 else 0
    xs = rng.uniform(px0, px1, size=n)
    ys = rng.uniform(py0, py1, size=n)
    grains = model.grain_dist.sample(rng, n)
    marks = model.mark_dist.sample(rng, n)

    trunc = None
    if isinstance(model.grain_dist, RectFamily):
        trunc = model.grain_dist.truncation_note()
    germs = tuple(((float(xs[i]), float(ys[i])), grains[i], float(marks[i]))
                  for i in range(n))
    return Realization(germs=germs, domain=(x0, x1, y0, y1),
                       padded_domain=(px0, px1, py0, py1),
                       expected_count=mean, truncation=trunc)


# ------------------------------------------------- exact level-set geometry

def _arrangement_axis(raw: np.ndarray, lo: float, hi: float) -> np.ndarray:
    coords = np.unique(np.clip(raw, lo, hi))
    if coords.size < 2:
        raise DegenerateArrangement("window collapsed to a line")
    gaps = np.diff(coords)
    if (gaps < 1e-12).any():
        raise DegenerateArrangement(
            "two distinct arrangement coordinates closer than 1e-12; "
            "resample or nudge germ locations by less than 1e-9")
    return coords


def _stamped_field(xs, ys, rect_lists, weights):
    """Sum of weights over cells covered by each germ's rectangles."""
    lo_x, hi_x = xs[0], xs[-1]
    lo_y, hi_y = ys[0], ys[-1]
    diff = np.zeros((len(ys), len(xs)))
    for rects, wgt in zip(rect_lists, weights):
        for rx0, rx1, ry0, ry1 in rects:
            cx0, cx1 = max(rx0, lo_x), min(rx1, hi_x)
            cy0, cy1 = max(ry0, lo_y), min(ry1, hi_y)
            if cx1 <= cx0 or cy1 <= cy0:
                continue
            i0, i1 = np.searchsorted(xs, (cx0, cx1))
            j0, j1 = np.searchsorted(ys, (cy0, cy1))
            diff[j0, i0] += wgt
            diff[j0, i1] -= wgt
            diff[j1, i0] -= wgt
            diff[j1, i1] += wgt
    return diff.cumsum(axis=0).cumsum(axis=1)[:len(ys) - 1, :len(xs) - 1]


def _complex_chi(occ: np.ndarray) -> int:
    # V - E + F on the closed cell complex spanned by the occupied cells
    po = np.pad(occ, 1, constant_values=False)
    v = (po[1:, 1:] | po[1:, :-1] | po[:-1, 1:] | po[:-1, :-1]).sum()
    e = (po[1:-1, 1:] | po[1:-1, :-1]).sum() + (po[1:, 1:-1] | po[:-1, 1:-1]).sum()
    return int(v) - int(e) + int(occ.sum())


def _germ_rects(real: Realization):
    rect_lists = []
    for (gx, gy), grain, _ in real.germs:
        rect_lists.append([(x0 + gx, x1 + gx, y0 + gy, y1 + gy)
                           for x0, x1, y0, y1 in grain.rects])
    return rect_lists


def level_set_features_exact(real: Realization, level: float,
                             window: PolyRectangle) -> dict:
    """Exact chi, directional perimeters and area of {f >= level} in the window.

    The field is constant on each open cell of the arrangement spanned by
    the germ and window edges; the level set is the union of the closed
    occupied cells (boundary values only ever exceed the neighbouring cell
    values, so closure adds nothing in generic position).
    """
    bx0, bx1, by0, by1 = window.bounding_box
    rect_lists = _germ_rects(real)
    raw_x = [bx0, bx1] + [v for r in window.rects for v in (r[0], r[1])]
    raw_y = [by0, by1] + [v for r in window.rects for v in (r[2], r[3])]
    for rects in rect_lists:
        for x0, x1, y0, y1 in rects:
            raw_x += (x0, x1)
            raw_y += (y0, y1)
    xs = _arrangement_axis(np.array(raw_x), bx0, bx1)
    ys = _arrangement_axis(np.array(raw_y), by0, by1)

    marks = [m for _, _, m in real.germs]
    f = _stamped_field(xs, ys, rect_lists, marks)
    w_occ = _stamped_field(xs, ys, [window.rects], [1.0]) >= 0.5

    scale = max(1.0, abs(level))
    if np.any(np.abs(f - level) <= 1e-12 * scale):
        warnings.warn("field value ties the level on some cell; the closed-set "
                      "convention decides membership", stacklevel=2)
    occ = (f >= level) & w_occ

    dx = np.diff(xs)
    dy = np.diff(ys)
    po = np.pad(occ, 1, constant_values=False)
    vb = po[1:-1, 1:] ^ po[1:-1, :-1]
    hb = po[1:, 1:-1] ^ po[:-1, 1:-1]
    return {
        "chi": _complex_chi(occ),
        "per1": float((dy[:, None] * vb).sum()),
        "per2": float((hb * dx[None, :]).sum()),
        "vol": float((dy[:, None] * occ * dx[None, :]).sum()),
    }


def level_set_chi_exact(real: Realization, level: float, window: PolyRectangle) -> int:
    """Exact integer chi of the level set clipped to the window."""
    return level_set_features_exact(real, level, window)["chi"]


# ------------------------------------------------------------- closed forms

def _coverage_distribution(model: ShotNoiseModel) -> tuple[np.ndarray, np.ndarray]:
    """Law of f(0) for atomic marks: independent Poisson counts per atom.

    Truncated when the neglected tail mass falls below 1e-12 overall.
    """
    if not isinstance(model.mark_dist, AtomicMarks):
        raise UnsupportedMarkLaw(
            "closed-form probabilities are implemented for atomic marks only")
    vol = model.grain_dist.moments()["vol"]
    dist = {0.0: 1.0}
    atoms = list(zip(model.mark_dist.values, model.mark_dist.probs))
    tol = _TAIL_TOL / max(len(atoms), 1)
    for value, p_atom in atoms:
        rate = model.intensity * vol * p_atom
        pk = math.exp(-rate)
        terms = [(0, pk)]
        cum = pk
        k = 0
        while cum < 1.0 - tol:
            k += 1
            pk *= rate / k
            terms.append((k, pk))
            cum += pk
        new: dict[float, float] = {}
        for v, p in dist.items():
            for k, q in terms:
                key = v + k * value
                new[key] = new.get(key, 0.0) + p * q
        dist = new
    values = np.array(sorted(dist))
    probs = np.array([dist[v] for v in values])
    return values, probs


def _interval_prob(values: np.ndarray, probs: np.ndarray, a: float, b: float) -> float:
    """P(a <= f(0) < b) with a hair of tolerance on the half-open ends."""
    tol = 1e-9 * max(1.0, abs(a) if math.isfinite(a) else 0.0,
                     abs(b) if math.isfinite(b) else 0.0)
    lo = 0 if a == -math.inf else int(np.searchsorted(values, a - tol, side="left"))
    hi = len(values) if b == math.inf else int(np.searchsorted(values, b - tol, side="left"))
    return float(probs[lo:hi].sum())


def _level_probabilities(model: ShotNoiseModel) -> dict:
    values, probs = _coverage_distribution(model)
    lam = model.level
    if np.any(np.abs(values - lam) <= 1e-9 * max(1.0, abs(lam))):
        warnings.warn("level coincides with an achievable mark sum; "
                      "closed-form interval probabilities use the closed-set side",
                      stacklevel=2)
    marks = list(zip(model.mark_dist.values, model.mark_dist.probs))
    p1 = math.fsum(p * _interval_prob(values, probs, lam - m, lam) for m, p in marks)
    p2 = 0.0
    p2p = 0.0
    for m1, q1 in marks:
        for m2, q2 in marks:
            p2 += q1 * q2 * _interval_prob(values, probs, lam - m1 - m2, lam - max(m1, m2))
            p2p += q1 * q2 * _interval_prob(values, probs, lam - max(m1, m2), lam)
    # complement of the below-level mass: exact even when the convolution
    # truncates the far upper tail (all truncated mass sits above the level)
    tail = 1.0 - _interval_prob(values, probs, -math.inf, lam)
    return {"p1": p1, "p2": p2, "p2_prime": p2p, "tail": tail}


def stationary_density_closed_form(model: ShotNoiseModel) -> dict:
    """The volumic coefficients of the mean-chi formula, as densities."""
    g = model.grain_dist.moments()
    p = _level_probabilities(model)
    chi_bar = p["p1"] * g["chi"] + 0.5 * (p["p2"] - p["p2_prime"]) * g["per1"] * g["per2"]
    return {
        "chi_bar": chi_bar,
        "per_bar_u1": p["p1"] * g["per1"],
        "per_bar_u2": p["p1"] * g["per2"],
        "vol_bar": p["tail"],
    }


def mean_chi_closed_form(model: ShotNoiseModel, window: PolyRectangle) -> float:
    """Closed-form E chi(F intersect V) for atomic marks.

    Volume term times the chi density, plus the window's own chi weighted
    by the occupation probability, plus the cross perimeter terms.
    """
    d = stationary_density_closed_form(model)
    v = polyrect_features(window)
    p1 = _level_probabilities(model)["p1"]
    g = model.grain_dist.moments()
    return (v["vol"] * d["chi_bar"]
            + v["chi"] * d["vol_bar"]
            + 0.25 * p1 * (v["per1"] * g["per2"] + v["per2"] * g["per1"]))


def boolean_mean_chi(model: ShotNoiseModel, window: PolyRectangle) -> float:
    """Mean chi in the boolean regime: unit marks, level strictly inside (0,1).

    Here F is the union of the grains, f(0) counts covering grains, and
    the mean-chi coefficients collapse to p1 = p2' = P(f(0)=0) =
    exp(-intensity * E Vol) with p2 = 0, so the general closed form is
    evaluated directly and the reduction is exact, not approximate.
    """
    if not (0.0 < model.level < 1.0):
        raise NotBooleanRegime(f"level {model.level} is not in (0,1)")
    md = model.mark_dist
    if not (isinstance(md, AtomicMarks) and md.values == (1.0,)):
        raise NotBooleanRegime("marks must be identically 1")
    return mean_chi_closed_form(model, window)


# ------------------------------------------------------------- Monte Carlo

def mc_mean_chi(model: ShotNoiseModel, window: PolyRectangle,
                replicates: int, seed: int) -> dict:
    """Average exact per-realization chi over independent replicates."""
    if replicates < 2:
        raise InvalidSpec("need at least 2 replicates")
    vals = []
    for i in range(replicates):
        real = sample_realization(model, window.bounding_box, seed + i)
        vals.append(level_set_chi_exact(real, model.level, window))
    mean = math.fsum(vals) / replicates
    var = math.fsum((v - mean) ** 2 for v in vals) / (replicates - 1)
    return {"mean": mean, "stderr": math.sqrt(var / replicates)}


@dataclass(frozen=True)
class StationaryDensities:
    chi_bar: float
    per_bar_u1: float
    per_bar_u2: float
    vol_bar: float
    epsilon_used: float
    chi_stderr: float
    per_u1_stderr: float
    per_u2_stderr: float
    vol_stderr: float


def estimate_stationary_densities(model: ShotNoiseModel, epsilon: float, window,
                                  replicates: int, seed: int) -> StationaryDensities:
    """Finite-difference densities of chi, perimeter and volume per unit area.

    Per realization, the probability of each membership pattern (point in F
    with its epsilon-translates out, and the reverse) is computed as an exact
    area fraction of the window via the shifted-copy cell arrangement; the
    Monte Carlo average over replicates then estimates the densities
    chi = (P1 - P2)/eps^2, Per_ui = 2 P(in, +eps u_i out)/eps, Vol = P(in).
    """
    if replicates < 2:
        raise InvalidSpec("need at least 2 replicates")
    if epsilon <= 0:
        raise InvalidSpec("epsilon must be positive")
    min_edge = model.grain_dist.min_edge()
    if epsilon > 0.25 * min_edge:
        warnings.warn(f"epsilon {epsilon} is not small against the grain edge "
                      f"scale {min_edge}; densities will carry finite-mesh bias",
                      stacklevel=2)

    wx0, wx1, wy0, wy1 = (float(v) for v in window)
    w_area = (wx1 - wx0) * (wy1 - wy0)
    lam = model.level
    e = float(epsilon)
    offsets = ((0.0, 0.0), (-e, 0.0), (0.0, -e), (e, 0.0), (0.0, e))

    samples = np.empty((replicates, 4))
    for i in range(replicates):
        # shifted membership looks up to epsilon beyond the window
        real = sample_realization(model, (wx0 - e, wx1 + e, wy0 - e, wy1 + e), seed + i)
        rect_lists = _germ_rects(real)
        marks = [m for _, _, m in real.germs]

        raw_x = [wx0, wx1]
        raw_y = [wy0, wy1]
        for rects in rect_lists:
            for x0, x1, y0, y1 in rects:
                raw_x += (x0, x1, x0 - e, x1 - e, x0 + e, x1 + e)
                raw_y += (y0, y1, y0 - e, y1 - e, y0 + e, y1 + e)
        xs = _arrangement_axis(np.array(raw_x), wx0, wx1)
        ys = _arrangement_axis(np.array(raw_y), wy0, wy1)

        occ = []
        for ox, oy in offsets:
            shifted = [[(x0 + ox, x1 + ox, y0 + oy, y1 + oy)
                        for x0, x1, y0, y1 in rects] for rects in rect_lists]
            occ.append(_stamped_field(xs, ys, shifted, marks) >= lam)
        inside, east_in, north_in, east_rev, north_rev = occ

        area = np.diff(ys)[:, None] * np.diff(xs)[None, :]

        def frac(mask: np.ndarray) -> float:
            return float(area[mask].sum()) / w_area

        p_out = frac(inside & ~east_in & ~north_in)
        p_in = frac(~inside & east_rev & north_rev)
        samples[i, 0] = (p_out - p_in) / (e * e)
        samples[i, 1] = 2.0 * frac(inside & ~east_in) / e
        samples[i, 2] = 2.0 * frac(inside & ~north_in) / e
        samples[i, 3] = frac(inside)

    means = samples.mean(axis=0)
    errs = samples.std(axis=0, ddof=1) / math.sqrt(replicates)
    return StationaryDensities(
        chi_bar=float(means[0]), per_bar_u1=float(means[1]),
        per_bar_u2=float(means[2]), vol_bar=float(means[3]),
        epsilon_used=e,
        chi_stderr=float(errs[0]), per_u1_stderr=float(errs[1]),
        per_u2_stderr=float(errs[2]), vol_stderr=float(errs[3]))
