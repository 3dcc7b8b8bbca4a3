"""Formal powers of a = 1 + x and the power series solutions built from them.

Run with ``python3 demos/formal_powers_and_spps.py``.
"""

import math

import numpy as np

from impspps import (
    Grid,
    affine_impedance,
    build_formal_powers,
    closed_form,
    op_D,
    spps_darboux_derivative,
    spps_eval,
    wronskian,
)

a = affine_impedance()
grid = Grid.uniform_grid(0.0, 1.0, 2001)

# alternating weighted integrals of 1; both families are built together
table = build_formal_powers(a, grid, 40)
print("phi_a^(1)(1)     =", table.direct[1, -1], "(exact 1/2)")
print("phi_a^(2)(1)     =", table.direct[2, -1], "(exact 2/3)")
print("phi_{1/a}^(1)(1) =", table.reciprocal[1, -1], "(exact 7/3)")

# D_a phi_a^(k) = k phi_{1/a}^(k-1), checked with stencils
for k in (1, 4, 8):
    res = op_D(table.phi(k), a) - k * table.phi(k - 1, "reciprocal")
    print(f"derivative relation k={k}: {res.sup_norm():.1e}")

# C_a and S_a at rho = pi against the closed forms
rho = math.pi
C = spps_eval("C", rho, table)
S = spps_eval("S", rho, table)
for sol in (C, S):
    ref = closed_form(sol.kind, a, rho, grid).u
    print(f"{sol.kind}_a: {sol.N + 1} terms, error vs closed form {(sol.values - ref).sup_norm():.1e}")

# the Darboux image is summed termwise from the reciprocal family
dC = spps_darboux_derivative(C)
print("D_a C_a(pi, 1) =", dC.values.values[-1].real, "(exact -1)")
W = wronskian(C.values, S.values, a, dC.values, spps_darboux_derivative(S).values)
print(f"Wronskian W[C, S] spread: {np.ptp(W.values.real):.1e}")
