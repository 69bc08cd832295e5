"""The Euler characteristic as a difference of shifted-intersection volumes.

Counting pixels in M minus its diagonal shift, with the complement playing
the same game in the other direction, reproduces chi exactly on the grid.
The same functional evaluated by quadrature on a smooth set approaches chi
as the shift shrinks.
"""

import numpy as np

from eulergram import (BitGrid, Lattice, chi_bicovariogram, chi_bicovariogram_discrete,
                       chi_local, make_shape)

def make_admissible(bits):
    """Fill one corner of every diagonal pixel clash until none remain."""
    while True:
        a = bits[:-1, :-1]
        b = bits[:-1, 1:]
        c = bits[1:, :-1]
        d = bits[1:, 1:]
        diag = a & d & ~b & ~c
        anti = b & c & ~a & ~d
        if not diag.any() and not anti.any():
            return bits
        jj, ii = np.nonzero(diag)
        bits[jj, ii + 1] = True
        jj, ii = np.nonzero(anti)
        bits[jj + 1, ii + 1] = True


rng = np.random.default_rng(0)
lat = Lattice(epsilon=1.0, origin=(0.0, 0.0), nx=32, ny=32)

agree = 0
for _ in range(200):
    bits = np.zeros((32, 32), dtype=bool)
    bits[4:28, 4:28] = rng.random((24, 24)) < 0.4
    grid = BitGrid(lattice=lat, bits=make_admissible(bits))
    agree += chi_bicovariogram_discrete(grid) == chi_local(grid)
print("shifted-difference chi == configuration chi on %d/200 random grids" % agree)

disc = make_shape({"type": "disc", "center": [0, 0], "r": 1.0})
for eps in (0.4, 0.2, 0.1, 0.05):
    val = chi_bicovariogram(disc, eps, 1e-3)
    print("disc, shift %.2f: quadrature estimate %+.4f (true chi is 1)" % (eps, val))
