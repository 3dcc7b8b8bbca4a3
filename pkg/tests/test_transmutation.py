import math

import numpy as np
import pytest

from impspps import (
    ConfigurationError,
    Grid,
    IterationLimitError,
    PreconditionError,
    affine_impedance,
    apply_T,
    apply_T_derivative,
    apply_T_inverse,
    build_formal_powers,
    build_kernel,
    build_kernel_pair,
    check_goursat,
    check_kernel_relations,
    check_mapping_property,
    check_transmutation_property,
    closed_form,
    exponential_impedance,
    function_impedance,
    kernel_l2_norm,
    march_kernels,
    unit_impedance,
)

PI = math.pi


def k_affine(x, t):
    return (x + t) / (2 * (1 + x))


def k_affine_reciprocal(x, t):
    return -(x + t) / 2 + (t**2 - x**2) / 4


@pytest.fixture(scope="module")
def affine_pair():
    return build_kernel_pair(affine_impedance())


@pytest.fixture(scope="module")
def affine_rect():
    return build_kernel_pair(affine_impedance(), 128, 101, "rectangle", 0.5)


def _fine(kernel, refine=5):
    n = int(np.sum(kernel.x > 0))
    return Grid.uniform_grid(-kernel.ell, kernel.ell, 2 * n * refine + 1, 0.0)


def test_affine_kernel_closed_form(affine_pair):
    k = affine_pair.direct
    t = k.x[:, None] * k.tau[None, :]
    assert np.max(np.abs(k.values - k_affine(k.x[:, None], t))) <= 1e-9
    s = int(np.argmin(np.abs(k.x - 1.0)))
    assert abs(k.evaluate(s, 0.5)[()] - 0.375) <= 1e-10


def test_affine_reciprocal_kernel_closed_form(affine_pair):
    k = affine_pair.reciprocal
    t = k.x[:, None] * k.tau[None, :]
    assert np.max(np.abs(k.values - k_affine_reciprocal(k.x[:, None], t))) <= 1e-9


def test_kernel_mean_is_the_zero_frequency(affine_pair):
    # int_{-x}^{x} K(x, t) dt = x^2 / (1 + x)
    k = affine_pair.direct
    integral = k.x * (k.values @ k.tau_weights)
    assert np.max(np.abs(integral - k.x**2 / (1 + k.x))) <= 1e-10


def test_unit_kernel_vanishes():
    k = build_kernel(unit_impedance())
    assert np.max(np.abs(k.values)) <= 1e-10


@pytest.mark.parametrize("a", [unit_impedance(), affine_impedance(), exponential_impedance(1.0)],
                         ids=["unit", "affine", "exp1"])
def test_goursat_and_mapping(a):
    k = build_kernel(a)
    g = check_goursat(k)
    assert g["diagonal"] <= 1e-10 and g["antidiagonal"] <= 1e-10
    assert np.max(check_mapping_property(k, 6)) <= 1e-8


def test_T_maps_plane_wave_to_e(affine_pair):
    k = affine_pair.direct
    fine = _fine(k)
    Tu = apply_T(k, fine.sample(lambda x: np.exp(1j * PI * x)))
    ref = closed_form("e", affine_impedance(), PI, Grid(k.x, 0)).u
    assert np.max(np.abs(Tu.values - ref.values)) <= 1e-8


def test_T_derivative(affine_pair):
    k = affine_pair.direct
    d = apply_T_derivative(k, _fine(k).sample(lambda x: x))
    assert np.max(np.abs(d.values - 1 / (1 + k.x) ** 2)) <= 1e-7


def test_T_preserves_data_at_zero():
    k = build_kernel(exponential_impedance(0.8), 64, 101)
    fine = _fine(k)
    u = fine.sample(lambda x: 2 + 3 * x + np.sin(5 * x))
    assert abs(apply_T(k, u).values[0] - 2.0) <= 1e-12
    assert abs(apply_T_derivative(k, u).values[0] - 8.0) <= 1e-7


@pytest.mark.parametrize("u", [lambda x: x**3 - x + 1, np.sin], ids=["cubic", "sin"])
def test_transmutation_identities(affine_pair, u):
    res = check_transmutation_property(affine_pair, u)
    for name, val in res.items():
        assert val <= 1e-4, name


def test_kernel_relations(affine_pair):
    rel = check_kernel_relations(affine_pair)
    assert max(rel.values()) <= 1e-6


@pytest.mark.parametrize("route", [1, 2, "darboux-representation", "volterra"])
def test_round_trip_and_inverse_of_powers(affine_rect, route):
    k = affine_rect.direct
    fine = _fine(k)
    v = apply_T(k, fine.sample(lambda x: x + x**3))
    back = apply_T_inverse(affine_rect, v, route=route)
    assert np.max(np.abs(back.values - (k.x + k.x**3))) <= 1e-6
    table = build_formal_powers(affine_impedance(), k.x_grid, 4)
    for n in range(5):
        back = apply_T_inverse(affine_rect, table.phi(n), route=route)
        assert np.max(np.abs(back.values - k.x**n)) <= 1e-6


def test_march_matches_closed_forms():
    a = affine_impedance()
    errs = []
    for n in (20, 40):
        mk = march_kernels(a, 0.5, n, richardson=False)
        i, j = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1), indexing="ij")
        live = ((i + j) % 2 == 0) & (np.abs(j) <= np.abs(i))
        x, t = i * mk.h, j * mk.h
        errs.append(np.nanmax(np.abs(np.where(live, mk.P - k_affine(x, t), 0.0))))
        qerr = np.nanmax(np.abs(np.where(live, mk.Q - k_affine_reciprocal(x, t), 0.0)))
        assert qerr <= 1e-2
    assert 3 < errs[0] / errs[1] < 5
    mk = march_kernels(a, 0.5, 40)
    i, j = np.meshgrid(np.arange(-40, 41), np.arange(-40, 41), indexing="ij")
    live = (i + j) % 2 == 0
    err = np.abs(mk.Q - k_affine_reciprocal(i * mk.h, j * mk.h))[live]
    assert np.max(err) <= 1e-6


def test_l2_norm_closed_form_and_stability():
    ref = math.sqrt(2 / 3 * (3 * math.log(2) - 2))
    norms = [kernel_l2_norm(build_kernel(affine_impedance(), J)) for J in (32, 64, 128)]
    assert abs(norms[-1] - ref) <= 1e-6
    assert max(norms) - min(norms) <= 1e-6
    e = [kernel_l2_norm(build_kernel(exponential_impedance(1.0), J)) for J in (64, 128)]
    assert abs(e[0] - e[1]) <= 1e-6


def test_kernel_errors(affine_pair, affine_rect):
    with pytest.raises(ConfigurationError):
        build_kernel(affine_impedance(), J=3)
    with pytest.raises(ConfigurationError):
        build_kernel(affine_impedance(), mode="square")
    with pytest.raises(PreconditionError):
        build_kernel(function_impedance(lambda x: 2 + x, lambda x: np.ones_like(x)))
    k = affine_rect.direct
    v = Grid(k.x, int(np.argmin(np.abs(k.x)))).sample(np.sin)
    with pytest.raises(ConfigurationError):
        apply_T_inverse(affine_rect, v, route=3)
    with pytest.raises(ConfigurationError):
        apply_T_inverse(affine_pair, v)
    with pytest.raises(IterationLimitError):
        apply_T_inverse(affine_rect, v, route=2, max_iter=1)
    with pytest.raises(ConfigurationError):
        apply_T(affine_pair.direct, Grid.uniform_grid(0.0, 1.0, 101).sample(np.sin))
