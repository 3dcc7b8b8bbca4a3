import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from impspps import (
    ConfigurationError,
    Grid,
    affine_impedance,
    build_formal_powers,
    closed_form,
    estimate_check,
    exponential_impedance,
    spps_darboux_derivative,
    spps_eval,
    spps_solution,
    unit_impedance,
    wronskian,
)

PI = math.pi


@pytest.fixture(scope="module")
def affine_table():
    return build_formal_powers(affine_impedance(), Grid.uniform_grid(0.0, 1.0, 2001), 60)


def test_frozen_affine_values(affine_table):
    c = spps_eval("C", PI, affine_table)
    s = spps_eval("S", PI, affine_table)
    assert abs(c.values.values[-1] - (-0.5)) <= 1e-10
    assert abs(s.values.values[-1]) <= 1e-10
    # D_a C_a = -rho^2 S_{1/a}, and S_{1/a}(pi, 1) = 1/pi^2 for a = 1 + x
    dc = spps_darboux_derivative(c)
    assert abs(dc.values.values[-1] - (-1.0)) <= 1e-10
    assert dc.kind == "S" and dc.side == "reciprocal"


def test_e_is_C_plus_i_rho_S(affine_table):
    rho = 2.7
    e = spps_eval("e", rho, affine_table).values.values
    c = spps_eval("C", rho, affine_table).values.values
    s = spps_eval("S", rho, affine_table).values.values
    assert np.max(np.abs(e - (c + 1j * rho * s))) <= 1e-12


@pytest.mark.parametrize("kind", ["e", "C", "S"])
@pytest.mark.parametrize("rho", [1.0, PI, 10.0, 3 + 2j])
def test_against_closed_form(kind, rho, affine_table):
    sol = spps_eval(kind, rho, affine_table)
    ref = closed_form(kind, affine_impedance(), rho, affine_table.grid)
    assert (sol.values - ref.u).sup_norm() <= 1e-9
    d = spps_darboux_derivative(sol)
    assert (d.values - ref.du).sup_norm() <= 1e-8 * max(1.0, abs(rho) ** 2)


def test_exponential_closed_form():
    a = exponential_impedance(1.0)
    g = Grid.uniform_grid(0.0, 1.0, 2001)
    for kind in ("C", "S"):
        sol = spps_solution(kind, a, 2.0, g)
        assert (sol.values - closed_form(kind, a, 2.0, g).u).sup_norm() <= 1e-8


def test_wronskians(affine_table):
    a = affine_impedance()
    rho = 4.0
    c, s = spps_eval("C", rho, affine_table), spps_eval("S", rho, affine_table)
    w = wronskian(c.values, s.values, a, spps_darboux_derivative(c).values,
                  spps_darboux_derivative(s).values)
    assert np.max(np.abs(w.values - 1.0)) <= 1e-10
    ep, em = spps_eval("e", rho, affine_table), spps_eval("e", -rho, affine_table)
    w = wronskian(ep.values, em.values, a, spps_darboux_derivative(ep).values,
                  spps_darboux_derivative(em).values)
    assert np.max(np.abs(w.values - (-2j * rho))) <= 1e-9
    # the stencil route gives the same constant to stencil accuracy
    w = wronskian(c.values, s.values, a)
    assert np.max(np.abs(w.values - 1.0)) <= 1e-6


def test_tail_estimate_decreases(affine_table):
    tails = [spps_eval("C", 5.0, affine_table, N=n).tail_estimate for n in range(8, 20)]
    assert all(b < a for a, b in zip(tails, tails[1:]))
    full = spps_eval("C", 5.0, affine_table)
    assert full.tail_estimate <= 1e-12 * max(1.0, full.values.sup_norm())


def test_explicit_N_and_limits(affine_table):
    with pytest.raises(ConfigurationError):
        spps_eval("C", 1.0, affine_table, N=31)
    with pytest.raises(ConfigurationError):
        spps_eval("Z", 1.0, affine_table)
    small = build_formal_powers(affine_impedance(), affine_table.grid, 6)
    with pytest.raises(ConfigurationError):
        spps_eval("C", 30.0, small)
    sol = spps_eval("S", 1.0, affine_table, N=0)
    assert np.allclose(sol.values.values, affine_table.direct[1])


def test_unit_impedance_is_trigonometric():
    g = Grid.uniform_grid(-1.0, 2.0, 1501, x0=0.5)
    t = build_formal_powers(unit_impedance(), g, 60)
    s = g.nodes - 0.5
    assert np.max(np.abs(spps_eval("C", 3.0, t).values.values - np.cos(3 * s))) <= 1e-9
    assert np.max(np.abs(spps_eval("S", 3.0, t).values.values - np.sin(3 * s) / 3)) <= 1e-9


def test_estimate_check_unit_is_exact():
    rep = estimate_check(unit_impedance(), np.linspace(1, 100, 50), np.linspace(0.05, 1, 20))
    assert rep["Q1_max"] == 0.0
    assert rep["C"]["max_ratio"] <= 1e-12 and rep["S"]["max_ratio"] <= 1e-12


def test_estimate_check_affine_is_bounded():
    xs = np.linspace(0.05, 1, 20)
    r1 = estimate_check(affine_impedance(), np.linspace(1, 100, 100), xs)
    r2 = estimate_check(affine_impedance(), np.linspace(1, 100, 199), xs)
    assert abs(r1["Q1_max"] - 2 * math.log(2)) <= 1e-9
    for k in ("C", "S"):
        assert r1[k]["finite"] and 0 < r1[k]["max_ratio"] < 1
        assert abs(r2[k]["max_ratio"] / r1[k]["max_ratio"] - 1) < 0.1


def test_estimate_check_rejects_origin():
    with pytest.raises(ConfigurationError):
        estimate_check(affine_impedance(), [1.0], [0.0, 0.5])
    with pytest.raises(ConfigurationError):
        estimate_check(affine_impedance(), [0.0], [0.5])


@given(rho=st.floats(0.1, 12.0), c=st.floats(-1.5, 1.5))
def test_C_S_solve_the_equation(rho, c):
    g = Grid.uniform_grid(0.0, 1.0, 801)
    a = exponential_impedance(c)
    t = build_formal_powers(a, g, 60)
    for kind in ("C", "S"):
        u = spps_eval(kind, rho, t)
        ref = closed_form(kind, a, rho, g).u
        scale = max(1.0, ref.sup_norm())
        assert (u.values - ref).sup_norm() <= 1e-8 * scale
