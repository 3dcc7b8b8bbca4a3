"""Dirichlet eigenvalues from the characteristic function, an eigenfunction
expansion and the Poisson problem.

Run with ``python3 demos/dirichlet_spectrum.py``.
"""

import math

import numpy as np

from impspps import (
    Grid,
    affine_impedance,
    dirichlet_eigenpairs,
    exponential_impedance,
    fourier_expand,
    solve_dirichlet_poisson,
    unit_impedance,
)
from impspps.oracle import dirichlet_poisson_oracle

grid = Grid.uniform_grid(0.0, 1.0, 2001)

# for a = 1 + x the eigenvalues are (n pi)^2, for a = e^x they are 1 + (n pi)^2
for a, exact in ((affine_impedance(), lambda n: (n * math.pi) ** 2),
                 (exponential_impedance(1.0), lambda n: 1 + (n * math.pi) ** 2)):
    print(a.label)
    for p in dirichlet_eigenpairs(a, grid, 5):
        print(f"  lambda_{p.index} = {p.lam:.12f}   rel. error {abs(p.lam / exact(p.index) - 1):.1e}")

# eigen-expansion of x (pi - x) for a = 1 on (0, pi)
gpi = Grid.uniform_grid(0.0, math.pi, 2001)
pairs = dirichlet_eigenpairs(unit_impedance(), gpi, 10)
res = fourier_expand(gpi.sample(lambda x: x * (math.pi - x)), pairs, unit_impedance())
print("sup error of the partial sums:")
for n in (1, 3, 5, 10):
    print(f"  {n:2d} terms: {res.sup_errors[n - 1]:.2e}")
# only odd modes contribute, with 8/(pi n^3); the tail after 10 terms is about 5e-3

# L_a u = 1 with zero boundary values, by the double integral R_a
a = affine_impedance()
u = solve_dirichlet_poisson(grid.constant(1.0), a)
ref = dirichlet_poisson_oracle(lambda t: 1.0, a, grid)
print(f"Poisson problem, a = 1 + x: max deviation from shooting {np.max(np.abs(u.values - ref.values)):.1e}")
