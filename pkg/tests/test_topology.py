import numpy as np
import pytest

from eulergram import (
    BitGrid,
    Lattice,
    MarginViolation,
    NotAdmissible,
    chi_local,
    chi_vef,
    config_counts,
    label_components,
)

from gridgen import admissible_random_bits
from oracles import (
    bfs_component_count,
    bounded_hole_count,
    chi_by_components,
    scan_chi_vef,
    scan_config_counts,
)


def grid_of(rows, epsilon=1.0):
    bits = np.array([[ch == "#" for ch in row] for row in rows])
    lat = Lattice(epsilon=epsilon, origin=(0.0, 0.0),
                  nx=bits.shape[1], ny=bits.shape[0])
    return BitGrid(lattice=lat, bits=bits)


RING = grid_of([
    ".....",
    ".###.",
    ".#.#.",
    ".###.",
    ".....",
])


def test_single_bit_counts():
    g = grid_of(["...", ".#.", "..."])
    c = config_counts(g)
    assert (c.phi_out, c.phi_in, c.phi_x_set, c.phi_x_complement) == (1, 0, 0, 0)
    assert chi_local(g) == 1
    assert chi_vef(g) == 1


def test_diagonal_pair_is_x_configuration():
    g = grid_of(["....", ".#..", "..#.", "...."])
    c = config_counts(g)
    assert c.phi_x_set == 1
    assert not c.admissible
    with pytest.raises(NotAdmissible) as err:
        chi_local(g)
    assert err.value.phi_x_set == 1
    assert err.value.phi_x_complement == 0


def test_ring_counts_and_chi():
    c = config_counts(RING)
    assert (c.phi_out, c.phi_in) == (1, 1)
    assert (c.phi_x_set, c.phi_x_complement) == (0, 0)
    assert chi_local(RING) == 0
    assert chi_vef(RING) == 0  # 8 - 8 + 0


def test_two_blocks_chi_two():
    g = grid_of([
        ".......",
        ".##.##.",
        ".##.##.",
        ".......",
    ])
    assert chi_local(g) == 2
    assert chi_vef(g) == 2


def test_full_block_vef():
    g = grid_of(["....", ".##.", ".##.", "...."])
    assert chi_vef(g) == 1  # 4 - 4 + 1


def test_margin_violation():
    g = grid_of(["#..", "...", "..."])
    with pytest.raises(MarginViolation):
        config_counts(g)
    with pytest.raises(MarginViolation):
        label_components(g, which="complement")
    # a set labeling has no margin requirement
    assert label_components(g, which="set").num_set_components == 1


def test_label_components_ring():
    lab = label_components(RING, which="set")
    assert lab.num_set_components == 1
    assert lab.num_complement_bounded_components == 1
    comp = label_components(RING, which="complement")
    assert comp.labels.max() == 1
    assert comp.labels[2, 2] == 1  # the enclosed center


def test_label_components_empty():
    g = grid_of(["...", "...", "..."])
    assert label_components(g, which="set").num_set_components == 0


def test_labels_first_seen_order():
    g = grid_of([
        ".......",
        "..##...",
        ".....#.",
        ".#.....",
        ".......",
    ])
    lab = label_components(g, which="set").labels
    # row-major first encounter fixes the numbering
    assert lab[1, 2] == 1 and lab[2, 5] == 2 and lab[3, 1] == 3


def test_invalid_which_rejected():
    with pytest.raises(ValueError):
        label_components(RING, which="holes")


def test_counts_match_oracle_on_random_grids():
    rng = np.random.default_rng(42)
    for _ in range(60):
        bits = np.zeros((9, 9), dtype=bool)
        bits[2:-2, 2:-2] = rng.random((5, 5)) < 0.5
        g = BitGrid(lattice=Lattice(1.0, (0, 0), 9, 9), bits=bits)
        c = config_counts(g)
        ref = scan_config_counts(bits)
        assert c.phi_out == ref["phi_out"]
        assert c.phi_in == ref["phi_in"]
        assert c.phi_x_set == ref["phi_x_set"]
        assert c.phi_x_complement == ref["phi_x_complement"]
        assert chi_vef(g) == scan_chi_vef(bits)
        lab = label_components(g)
        assert lab.num_set_components == bfs_component_count(bits, 4)
        assert lab.num_complement_bounded_components == bounded_hole_count(bits)


def test_three_routes_agree_on_admissible_random_grids():
    rng = np.random.default_rng(7)
    for _ in range(200):
        bits = admissible_random_bits(rng, 16, 16, margin=3, density=0.55)
        g = BitGrid(lattice=Lattice(1.0, (0, 0), 16, 16), bits=bits)
        assert config_counts(g).admissible
        assert chi_local(g) == chi_vef(g) == chi_by_components(bits)


def test_x_count_complement_duality():
    rng = np.random.default_rng(3)
    for _ in range(40):
        bits = np.zeros((10, 10), dtype=bool)
        bits[2:-2, 2:-2] = rng.random((6, 6)) < 0.5
        g = BitGrid(lattice=Lattice(1.0, (0, 0), 10, 10), bits=bits)
        c = config_counts(g)
        # complement read off the same windows: X on the set of one grid is
        # X on the complement of the other
        ref = scan_config_counts(~bits)
        assert c.phi_x_set == ref["phi_x_complement"]
        assert c.phi_x_complement == ref["phi_x_set"]


def test_phi_in_equals_complement_rescan():
    # an inward corner of M is an outward corner of the complement seen from
    # the opposite diagonal: rescan NOT M with the anchor role reversed
    rng = np.random.default_rng(5)
    for _ in range(40):
        bits = np.zeros((10, 10), dtype=bool)
        bits[2:-2, 2:-2] = rng.random((6, 6)) < 0.45
        g = BitGrid(lattice=Lattice(1.0, (0, 0), 10, 10), bits=bits)

        comp = ~bits
        ny, nx = comp.shape

        def at(j, i):
            return bool(comp[j, i]) if 0 <= j < ny and 0 <= i < nx else True

        rescan = 0
        for j in range(-1, ny + 1):
            for i in range(-1, nx + 1):
                # anchor at the diagonal cell, looking back along both axes
                if at(j, i) and not at(j, i - 1) and not at(j - 1, i):
                    rescan += 1
        assert config_counts(g).phi_in == rescan


def test_translation_invariance():
    inner = np.zeros((12, 12), dtype=bool)
    inner[3:6, 3:7] = True
    inner[7, 5] = True
    base = BitGrid(lattice=Lattice(1.0, (0, 0), 12, 12), bits=inner)
    shifted = BitGrid(lattice=Lattice(1.0, (0, 0), 12, 12),
                      bits=np.roll(np.roll(inner, 1, axis=0), 1, axis=1))
    ca, cb = config_counts(base), config_counts(shifted)
    assert (ca.phi_out, ca.phi_in) == (cb.phi_out, cb.phi_in)
    assert chi_vef(base) == chi_vef(shifted)
    la, lb = label_components(base), label_components(shifted)
    assert la.num_set_components == lb.num_set_components
    assert la.num_complement_bounded_components == lb.num_complement_bounded_components
