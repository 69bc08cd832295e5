import json
import math

import numpy as np
import pytest

from eulergram import (
    BitGrid,
    Lattice,
    digitize,
    grid_volume,
    lattice_covering,
    make_shape,
    read_pgm,
    write_pgm,
)


def test_lattice_points_and_axes():
    lat = Lattice(epsilon=0.5, origin=(1.0, -2.0), nx=4, ny=3)
    assert lat.point(0, 0) == (1.0, -2.0)
    assert lat.point(3, 2) == (2.5, -1.0)
    assert np.allclose(lat.xs(), [1.0, 1.5, 2.0, 2.5])
    assert np.allclose(lat.ys(), [-2.0, -1.5, -1.0])


def test_lattice_covering_margin_and_anchor():
    lat = lattice_covering((-1.0, 1.0, -1.0, 1.0), 0.25, margin=2)
    assert lat.origin == (-1.5, -1.5)
    # anchored on epsilon * Z^2
    assert lat.origin[0] / 0.25 == round(lat.origin[0] / 0.25)
    assert lat.xs()[0] <= -1.0 - 0.25 and lat.xs()[-1] >= 1.0 + 0.25


def test_digitize_empty_and_single_bit_volume():
    empty = make_shape({"type": "disc", "center": [100.0, 100.0], "r": 0.01})
    lat = lattice_covering((0, 1, 0, 1), 0.25, margin=1)
    assert grid_volume(digitize(empty, lat)) == 0.0

    dot = make_shape({"type": "disc", "center": [0.5, 0.5], "r": 0.05})
    grid = digitize(dot, lattice_covering((0, 1, 0, 1), 0.25, margin=1))
    assert grid.count == 1
    assert grid_volume(grid) == pytest.approx(0.0625)


def test_digitized_disc_area_converges():
    disc = make_shape({"type": "disc", "center": [0.0, 0.0], "r": 1.0})
    grid = digitize(disc, lattice_covering(disc.bounding_box, 1e-3, margin=1))
    assert grid_volume(grid) == pytest.approx(math.pi, rel=0.01)


def test_digitize_commutes_with_set_algebra():
    a = make_shape({"type": "disc", "center": [0.0, 0.0], "r": 1.0})
    b = make_shape({"type": "disc", "center": [0.8, 0.0], "r": 0.7})
    lat = lattice_covering((-2, 2, -2, 2), 0.05, margin=1)
    ga, gb = digitize(a, lat), digitize(b, lat)

    union = make_shape({"type": "union", "members": [
        {"type": "disc", "center": [0.0, 0.0], "r": 1.0},
        {"type": "disc", "center": [0.8, 0.0], "r": 0.7}]})
    assert digitize(union, lat) == (ga | gb)
    assert (~ga).bits.tolist() == (~ga.bits).tolist()
    assert ((ga & gb).bits == (ga.bits & gb.bits)).all()


def test_bitgrid_rejects_shape_mismatch():
    lat = Lattice(epsilon=1.0, origin=(0, 0), nx=3, ny=2)
    with pytest.raises(ValueError):
        BitGrid(lattice=lat, bits=np.zeros((3, 3), dtype=bool))


def test_bitgrid_immutable():
    lat = Lattice(epsilon=1.0, origin=(0, 0), nx=2, ny=2)
    g = BitGrid(lattice=lat, bits=np.zeros((2, 2), dtype=bool))
    with pytest.raises(ValueError):
        g.bits[0, 0] = True


def test_pgm_roundtrip(tmp_path):
    rng = np.random.default_rng(11)
    lat = Lattice(epsilon=0.125, origin=(-1.0, 2.0), nx=37, ny=21)
    grid = BitGrid(lattice=lat, bits=rng.random((21, 37)) < 0.4)
    path = tmp_path / "grid.pgm"
    write_pgm(grid, path)

    raw = path.read_bytes()
    assert raw.startswith(b"P4")
    meta = json.loads((tmp_path / "grid.json").read_text())
    assert meta == {"epsilon": 0.125, "origin": [-1.0, 2.0], "nx": 37, "ny": 21}

    back = read_pgm(path)
    assert back == grid
