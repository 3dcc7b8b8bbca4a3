import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from impspps import Grid, affine_impedance, exponential_impedance, op_D, op_J, op_L, op_R


def test_J_affine_examples(unit_grid):
    a = affine_impedance()
    one = unit_grid.constant(1.0)
    d = op_J(one, a)
    r = op_J(one, a, "reciprocal")
    x = unit_grid.nodes
    assert np.max(np.abs(d.values - x / (1 + x))) <= 1e-13
    assert abs(d.values[-1] - 0.5) <= 1e-13
    assert abs(r.values[-1] - 7 / 3) <= 1e-13


def test_D_affine_example(unit_grid):
    a = affine_impedance()
    u = unit_grid.sample(lambda x: x / (1 + x))
    assert np.max(np.abs(op_D(u, a).values - 1.0)) <= 1e-9


def test_R_affine_example(unit_grid):
    r = op_R(unit_grid.constant(1.0), affine_impedance())
    assert abs(r.values[-1] - 1 / 3) <= 1e-13


def test_L_of_solution(unit_grid):
    # C_a(pi, x) for a = 1 + x solves L_a u = -pi^2 u
    x = unit_grid.nodes
    u = unit_grid.sample(lambda x: (np.cos(np.pi * x) + np.sin(np.pi * x) / np.pi) / (1 + x))
    res = op_L(u, affine_impedance()) + np.pi**2 * u
    assert res.sup_norm() <= 1e-6


@given(c=st.floats(-2, 2), k=st.integers(0, 4))
def test_D_inverts_J(c, k):
    g = Grid.uniform_grid(0.0, 1.0, 1001, x0=0.3)
    a = exponential_impedance(c)
    v = g.sample(lambda x: np.cos(x) + x**k)
    for side in ("direct", "reciprocal"):
        back = op_D(op_J(v, a, side), a, side)
        assert np.max(np.abs(back.values - v.values)) <= 1e-7 * max(1.0, np.exp(2 * abs(c)))
