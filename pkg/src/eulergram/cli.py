"""Experiment runner: one JSON config in, reproducible report files out.

Every subcommand reads a single JSON config, runs one experiment, and
writes ``report.json`` plus CSV tables (and optional PGM grid dumps) into
the output directory.  The report header embeds the fully resolved config
and the seed, so a report is reproducible from itself alone; with
``--no-timestamp`` two runs of the same config+seed are byte-identical.

Replicate loops run serially with derived seeds (seed + index) and
order-independent reductions, so a parallel runner would produce the same
report content.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
import sys
from pathlib import Path

from .entanglement import verify_bounds
from .errors import (
    ConfigInvalid,
    EulergramError,
    NotBooleanRegime,
    UnsupportedMarkLaw,
)
from .lattice import IndicatorSet, digitize, lattice_covering, write_pgm
from .randomsets import (
    ShotNoiseModel,
    boolean_mean_chi,
    estimate_stationary_densities,
    level_set_features_exact,
    mean_chi_closed_form,
    sample_realization,
    stationary_density_closed_form,
)
from .shapes import PolyRectangle, make_shape
from .topology import chi_local, chi_vef, config_counts, label_components
from .variogram import (
    chi_bicovariogram,
    estimate_perimeter,
    perimeter_variational,
)

__all__ = ["main"]

_USAGE = "usage: eulergram <subcommand> --config path.json --out dir/ [--no-timestamp]"


# ------------------------------------------------------------ config access

def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigInvalid(f"config is missing required key {key!r}")
    return cfg[key]


def _shape(cfg: dict, key: str = "shape") -> IndicatorSet:
    spec = _need(cfg, key)
    if not isinstance(spec, dict):
        raise ConfigInvalid(f"{key!r} must be a shape object")
    try:
        return make_shape(spec)
    except KeyError as exc:
        raise ConfigInvalid(f"shape spec is missing key {exc}") from exc


def _polyrect(spec: dict) -> PolyRectangle:
    if not isinstance(spec, dict) or "rects" not in spec:
        raise ConfigInvalid("window must be {'rects': [[x0,x1,y0,y1], ...]}")
    return PolyRectangle(rects=tuple(tuple(float(v) for v in r) for r in spec["rects"]))


def _clip_to_window(ind: IndicatorSet, w: PolyRectangle) -> IndicatorSet:
    bx0, bx1, by0, by1 = ind.bounding_box
    wx0, wx1, wy0, wy1 = w.bounding_box
    box = (max(bx0, wx0), min(bx1, wx1), max(by0, wy0), min(by1, wy1))

    def contains(x, y):
        return ind.contains(x, y) & w.contains(x, y)

    return IndicatorSet(contains=contains, bounding_box=box)


def _digitize_at(ind: IndicatorSet, epsilon: float, margin: int = 2):
    return digitize(ind, lattice_covering(ind.bounding_box, epsilon, margin=margin))


# ---------------------------------------------------------------- reporting

def _write_report(out_dir: Path, subcommand: str, resolved: dict, seed,
                  timestamp: bool, results: dict, tables: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    report = {"subcommand": subcommand, "config": resolved, "seed": seed,
              "results": results}
    if timestamp:
        report["timestamp"] = datetime.datetime.now(
            datetime.timezone.utc).isoformat(timespec="seconds")
    text = json.dumps(report, indent=2, sort_keys=True)
    (out_dir / "report.json").write_text(text + "\n")
    for name, (header, rows) in tables.items():
        with open(out_dir / name, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(header)
            wr.writerows(rows)


# -------------------------------------------------------------- subcommands

def _run_chi(cfg: dict, out_dir: Path, timestamp: bool) -> None:
    resolved = {"margin": 2, "dump_grid": False, **cfg}
    epsilon = float(_need(resolved, "epsilon"))
    grid = _digitize_at(_shape(resolved), epsilon, margin=int(resolved["margin"]))
    counts = config_counts(grid)
    comp = label_components(grid)
    chi_comp = comp.num_set_components - comp.num_complement_bounded_components
    results = {
        "epsilon": epsilon,
        "admissible": counts.admissible,
        "phi_out": counts.phi_out,
        "phi_in": counts.phi_in,
        "chi_local": chi_local(grid) if counts.admissible else None,
        "chi_vef": chi_vef(grid),
        "num_components": comp.num_set_components,
        "num_bounded_holes": comp.num_complement_bounded_components,
        "chi_components": chi_comp,
    }
    _write_report(out_dir, "chi", resolved, resolved.get("seed"), timestamp,
                  results, {})
    if resolved["dump_grid"]:
        write_pgm(grid, out_dir / "grid.pgm")


def _run_sweep(cfg: dict, out_dir: Path, timestamp: bool) -> None:
    resolved = {"margin": 2, **cfg}
    ind = _shape(resolved)
    if "window" in resolved:
        ind = _clip_to_window(ind, _polyrect(resolved["window"]))
    epsilons = [float(e) for e in _need(resolved, "epsilons")]
    if not epsilons:
        raise ConfigInvalid("epsilons must be a nonempty list")
    rows = []
    for eps in epsilons:
        grid = _digitize_at(ind, eps, margin=int(resolved["margin"]))
        comp = label_components(grid)
        rows.append((eps, comp.num_set_components
                     - comp.num_complement_bounded_components))
    chis = [chi for _, chi in rows]
    stabilized = len(chis) >= 3 and len(set(chis[-3:])) == 1
    results = {
        "epsilons": epsilons,
        "chi_values": chis,
        "stabilized": stabilized,
        "plateau": chis[-1] if stabilized else None,
    }
    if "quad_mesh" in resolved:
        cont_eps = float(resolved.get("continuum_epsilon", min(epsilons)))
        resolved.setdefault("continuum_epsilon", cont_eps)
        results["chi_continuum"] = chi_bicovariogram(
            ind, cont_eps, float(resolved["quad_mesh"]))
        results["continuum_epsilon"] = cont_eps
    _write_report(out_dir, "sweep", resolved, resolved.get("seed"), timestamp,
                  results, {"sweep.csv": (("epsilon", "chi"), rows)})


def _run_perimeter(cfg: dict, out_dir: Path, timestamp: bool) -> None:
    resolved = {"directions": 64, **cfg}
    ind = _shape(resolved)
    epsilons = [float(e) for e in _need(resolved, "epsilons")]
    quad_mesh = float(_need(resolved, "quad_mesh"))
    n_dir = int(resolved["directions"])
    est1 = estimate_perimeter(ind, (1.0, 0.0), epsilons, quad_mesh)
    est2 = estimate_perimeter(ind, (0.0, 1.0), epsilons, quad_mesh)
    per_inf = est1.extrapolated + est2.extrapolated
    per = perimeter_variational(ind, epsilons, quad_mesh, n_directions=n_dir)
    # Per <= Per_inf <= sqrt(2) Per, with quadrature slack
    tol = 1e-6 + 0.01 * max(per, per_inf)
    results = {
        "per_u1": est1.extrapolated,
        "per_u2": est2.extrapolated,
        "per_inf": per_inf,
        "per": per,
        "directions": n_dir,
        "sandwich_ok": (per <= per_inf + tol) and (per_inf <= math.sqrt(2) * per + tol),
    }
    tables = {
        "per_u1.csv": (("epsilon", "value"), est1.rows()),
        "per_u2.csv": (("epsilon", "value"), est2.rows()),
    }
    _write_report(out_dir, "perimeter", resolved, resolved.get("seed"),
                  timestamp, results, tables)


def _run_bounds(cfg: dict, out_dir: Path, timestamp: bool) -> None:
    resolved = {"margin": 4, **cfg}
    ind = _shape(resolved, "truth")
    h = float(_need(resolved, "h"))
    grid = _digitize_at(ind, h, margin=int(resolved["margin"]))
    window = _polyrect(resolved["window"]) if "window" in resolved else None
    header = ("epsilon", "n_interior", "n_boundary", "corners",
              "components_digitized", "components_truth", "bound_rhs", "holds",
              "chi_abs", "chi_bound_rhs", "chi_holds")
    rows = []
    all_hold = True
    for eps in _need(resolved, "epsilons"):
        rep = verify_bounds(grid, float(eps), window)
        all_hold &= rep.holds and rep.chi_holds
        rows.append((float(eps), rep.n_interior, rep.n_boundary, rep.corners,
                     rep.num_components_digitized, rep.num_components_truth,
                     rep.bound_rhs, rep.holds, rep.chi_abs, rep.chi_bound_rhs,
                     rep.chi_holds))
    results = {"h": h, "all_bounds_hold": bool(all_hold), "trials": len(rows)}
    _write_report(out_dir, "bounds", resolved, resolved.get("seed"), timestamp,
                  results, {"bounds.csv": (header, rows)})


def _run_shotnoise(cfg: dict, out_dir: Path, timestamp: bool) -> None:
    resolved = dict(cfg)
    model = ShotNoiseModel.from_config(_need(resolved, "model"))
    window = _polyrect(_need(resolved, "window"))
    replicates = int(_need(resolved, "replicates"))
    seed = int(_need(resolved, "seed"))

    rows = []
    chis = []
    for i in range(replicates):
        real = sample_realization(model, window.bounding_box, seed + i)
        feats = level_set_features_exact(real, model.level, window)
        rows.append((seed + i, feats["chi"], feats["per1"] + feats["per2"],
                     feats["vol"]))
        chis.append(feats["chi"])
    mean = math.fsum(chis) / replicates
    var = math.fsum((c - mean) ** 2 for c in chis) / max(replicates - 1, 1)
    stderr = math.sqrt(var / replicates)

    try:
        closed = mean_chi_closed_form(model, window)
    except UnsupportedMarkLaw:
        closed = None
    try:
        boolean = boolean_mean_chi(model, window)
    except NotBooleanRegime:
        boolean = None

    results = {
        "closed_form": closed,
        "boolean_closed_form": boolean,
        "mc_mean": mean,
        "mc_stderr": stderr,
        "replicates": replicates,
        "abs_diff": None if closed is None else abs(mean - closed),
        "within_3_stderr": None if closed is None
        else bool(abs(mean - closed) <= 3.0 * stderr),
    }
    _write_report(out_dir, "shotnoise", resolved, seed, timestamp, results,
                  {"replicates.csv": (("seed", "chi", "per_inf", "vol"), rows)})


def _run_densities(cfg: dict, out_dir: Path, timestamp: bool) -> None:
    resolved = dict(cfg)
    model = ShotNoiseModel.from_config(_need(resolved, "model"))
    window = tuple(float(v) for v in _need(resolved, "window"))
    if len(window) != 4:
        raise ConfigInvalid("window must be [x0, x1, y0, y1]")
    epsilon = float(_need(resolved, "epsilon"))
    replicates = int(_need(resolved, "replicates"))
    seed = int(_need(resolved, "seed"))
    d = estimate_stationary_densities(model, epsilon, window, replicates, seed)
    try:
        reference = stationary_density_closed_form(model)
    except UnsupportedMarkLaw:
        reference = None
    results = {
        "epsilon": d.epsilon_used,
        "chi_bar": d.chi_bar, "chi_stderr": d.chi_stderr,
        "per_bar_u1": d.per_bar_u1, "per_u1_stderr": d.per_u1_stderr,
        "per_bar_u2": d.per_bar_u2, "per_u2_stderr": d.per_u2_stderr,
        "vol_bar": d.vol_bar, "vol_stderr": d.vol_stderr,
        "closed_form_reference": reference,
    }
    rows = [
        ("chi_bar", d.chi_bar, d.chi_stderr),
        ("per_bar_u1", d.per_bar_u1, d.per_u1_stderr),
        ("per_bar_u2", d.per_bar_u2, d.per_u2_stderr),
        ("vol_bar", d.vol_bar, d.vol_stderr),
    ]
    _write_report(out_dir, "densities", resolved, seed, timestamp, results,
                  {"densities.csv": (("quantity", "estimate", "stderr"), rows)})


_RUNNERS = {
    "chi": _run_chi,
    "sweep": _run_sweep,
    "perimeter": _run_perimeter,
    "bounds": _run_bounds,
    "shotnoise": _run_shotnoise,
    "densities": _run_densities,
}


# --------------------------------------------------------------- entrypoint

def _parse_args(argv: list[str]):
    if not argv:
        raise ConfigInvalid(_USAGE)
    subcommand, config_path, out_dir, timestamp = argv[0], None, None, True
    i = 1
    while i < len(argv):
        flag = argv[i]
        if flag == "--no-timestamp":
            timestamp = False
            i += 1
            continue
        if flag in ("--config", "--out"):
            if i + 1 >= len(argv):
                raise ConfigInvalid(f"{flag} needs a value; {_USAGE}")
            if flag == "--config":
                config_path = argv[i + 1]
            else:
                out_dir = argv[i + 1]
            i += 2
            continue
        raise ConfigInvalid(f"unknown flag {flag!r}; {_USAGE}")
    if subcommand not in _RUNNERS:
        raise ConfigInvalid(
            f"unknown subcommand {subcommand!r}; choose from {sorted(_RUNNERS)}")
    if config_path is None or out_dir is None:
        raise ConfigInvalid(_USAGE)
    return subcommand, Path(config_path), Path(out_dir), timestamp


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    subcommand = argv[0] if argv else None
    try:
        subcommand, config_path, out_dir, timestamp = _parse_args(argv)
        try:
            cfg = json.loads(config_path.read_text())
        except OSError as exc:
            raise ConfigInvalid(f"cannot read config {config_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config {config_path} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigInvalid("config root must be a JSON object")
        _RUNNERS[subcommand](cfg, out_dir, timestamp)
        return 0
    except EulergramError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc),
                   "context": {"subcommand": subcommand}}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return 1
    except Exception as exc:  # anything else still reports machine-readably
        payload = {"error": type(exc).__name__, "message": str(exc),
                   "context": {"subcommand": subcommand}}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
