"""The fifteen acceptance criteria at their stated tolerances.

Every test records one line ``criterion k: PASS|FAIL ...`` which is echoed
to stdout and collected into the terminal summary.  Criterion 7 is known to
fail: the exact tail of the sine series of ``x (pi - x)`` after ten terms
exceeds the threshold (see the decisions ledger).
"""

import math
import warnings

import numpy as np
import pytest

from impspps import (
    Grid,
    IllConditionedWarning,
    affine_impedance,
    apply_T,
    apply_T_inverse,
    approximation_study,
    build_formal_powers,
    build_kernel,
    build_kernel_pair,
    check_goursat,
    check_kernel_relations,
    check_mapping_property,
    check_transmutation_property,
    closed_form,
    dirichlet_eigenpairs,
    estimate_check,
    exponential_impedance,
    fourier_expand,
    function_impedance,
    op_D,
    perturbation_convergence_check,
    reciprocal_impedance,
    solve_dirichlet_poisson,
    spps_darboux_derivative,
    spps_eval,
    target_function,
    unit_impedance,
)
from impspps.dirichlet import inner_product_a
from impspps.oracle import dirichlet_poisson_oracle
from impspps.spps import required_table_order

PI = math.pi
RESULTS = []

CATALOG = {
    "1": unit_impedance(),
    "1+x": affine_impedance(),
    "1/(1+x)": reciprocal_impedance(affine_impedance()),
    "e^x": exponential_impedance(1.0),
    "e^-x": exponential_impedance(-1.0),
}
TEST_FUNCTIONS = {
    "1": lambda x: np.ones_like(x),
    "x": lambda x: x,
    "x^2": lambda x: x**2,
    "x^3": lambda x: x**3,
    "sin x": np.sin,
}
G01 = Grid.uniform_grid(0.0, 1.0, 2001)


def record(k, ok, detail):
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def test_criterion_01_monomial_degeneration():
    g = Grid.uniform_grid(-1.0, 1.0, 2001, x0=0.0)
    t = build_formal_powers(unit_impedance(), g, 10)
    err = max(np.max(np.abs(t.direct[k] - g.nodes**k)) for k in range(11))
    assert record(1, err <= 1e-8, f"max_k |phi^(k) - x^k| = {err:.2e} (tol 1e-08)")


def test_criterion_02_affine_oracle():
    t = build_formal_powers(affine_impedance(), G01, 2)
    errs = [abs(t.direct[1, -1] - 0.5), abs(t.direct[2, -1] - 2 / 3), abs(t.reciprocal[1, -1] - 7 / 3)]
    assert record(2, max(errs) <= 1e-8, f"phi(1) values, max error {max(errs):.2e} (tol 1e-08)")


def test_criterion_03_derivative_relation():
    worst = 0.0
    for a in CATALOG.values():
        t = build_formal_powers(a, G01, 10)
        for k in range(1, 11):
            worst = max(worst, (op_D(t.phi(k), a) - k * t.phi(k - 1, "reciprocal")).sup_norm())
    assert record(3, worst <= 1e-6, f"|D_a phi^(k) - k phi_1/a^(k-1)| = {worst:.2e} (tol 1e-06)")


def test_criterion_04_spps_vs_closed_form():
    worst = 0.0
    for a, rho in ((affine_impedance(), PI), (exponential_impedance(1.0), 2.0)):
        t = build_formal_powers(a, G01, required_table_order(rho, G01))
        for kind in ("C", "S"):
            err = (spps_eval(kind, rho, t).values - closed_form(kind, a, rho, G01).u).sup_norm()
            worst = max(worst, err)
    x = G01.nodes
    t = build_formal_powers(affine_impedance(), G01, required_table_order(PI, G01))
    explicit = (np.cos(PI * x) + np.sin(PI * x) / PI) / (1 + x)
    worst = max(worst, float(np.max(np.abs(spps_eval("C", PI, t).values.values - explicit))))
    assert record(4, worst <= 1e-8, f"SPPS vs closed form = {worst:.2e} (tol 1e-08)")


def test_criterion_05_wronskian_constancy():
    worst = 0.0
    for a in CATALOG.values():
        t = build_formal_powers(a, G01, required_table_order(10.0, G01))
        for rho in (1.0, PI, 10.0):
            c, s = spps_eval("C", rho, t), spps_eval("S", rho, t)
            w = c.values * spps_darboux_derivative(s).values - s.values * spps_darboux_derivative(c).values
            worst = max(worst, float(np.ptp(w.values.real)), float(np.ptp(w.values.imag)))
    assert record(5, worst <= 1e-7, f"max - min of W[C, S] = {worst:.2e} (tol 1e-07)")


def test_criterion_06_eigenvalues():
    n = np.arange(1, 6)
    lam = np.array([p.lam for p in dirichlet_eigenpairs(affine_impedance(), G01, 5)])
    e1 = float(np.max(np.abs(lam - (n * PI) ** 2) / (n * PI) ** 2))
    n3 = np.arange(1, 4)
    lam = np.array([p.lam for p in dirichlet_eigenpairs(exponential_impedance(1.0), G01, 3)])
    e2 = float(np.max(np.abs(lam - (1 + (n3 * PI) ** 2)) / (1 + (n3 * PI) ** 2)))
    gpi = Grid.uniform_grid(0.0, PI, 2001)
    lam = np.array([p.lam for p in dirichlet_eigenpairs(unit_impedance(), gpi, 5)])
    e3 = float(np.max(np.abs(lam - n**2)))
    ok = e1 <= 1e-6 and e2 <= 1e-6 and e3 <= 1e-8
    assert record(6, ok, f"rel. errors 1+x {e1:.2e}, e^x {e2:.2e} (tol 1e-06); a=1 abs {e3:.2e} (tol 1e-08)")


def test_criterion_07_eigen_expansion():
    g = Grid.uniform_grid(0.0, PI, 2001)
    a = unit_impedance()
    pairs = dirichlet_eigenpairs(a, g, 10)
    gram = np.array([[inner_product_a(p.eigenfunction, q.eigenfunction, a) for q in pairs] for p in pairs])
    ortho = float(np.max(np.abs(gram - np.eye(10))))
    res = fourier_expand(g.sample(lambda x: x * (PI - x)), pairs, a)
    sup = float(res.sup_errors[-1])
    ok = ortho <= 1e-7 and sup < 1e-3
    assert record(
        7, ok, f"orthonormality {ortho:.2e} (tol 1e-07); 10-term sup error {sup:.2e} (tol 1e-03)"
    )


def test_criterion_08_dirichlet_poisson():
    u = solve_dirichlet_poisson(G01.constant(1.0), unit_impedance())
    e1 = abs(u.values[1000] - (-0.125))
    a = affine_impedance()
    v = solve_dirichlet_poisson(G01.constant(1.0), a)
    e2 = float(np.max(np.abs(v.values - dirichlet_poisson_oracle(lambda t: 1.0, a, G01).values)))
    ok = e1 <= 1e-9 and e2 <= 1e-8
    assert record(8, ok, f"u(0.5) error {e1:.2e} (tol 1e-09); shooting {e2:.2e} (tol 1e-08)")


def test_criterion_09_completeness_witness():
    worst, rise = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        for a in CATALOG.values():
            t = build_formal_powers(a, G01, 15)
            for name in ("exp", "C_pi", "smooth_abs"):
                e = np.array(approximation_study(target_function(name, a, G01), a, range(16), (2,), table=t)["l2a"])
                worst = max(worst, float(e[-1]))
                rise = max(rise, float(np.max(np.diff(e))))
    ok = worst <= 1e-3 and rise <= 1e-12
    assert record(9, ok, f"L2_a error at N=15 {worst:.2e} (tol 1e-03); largest increase {rise:.1e} (tol 1e-12)")


def test_criterion_10_kernel_closed_form():
    k = build_kernel(affine_impedance(), J=128)
    t = k.x[:, None] * k.tau[None, :]
    err = float(np.max(np.abs(k.values - (k.x[:, None] + t) / (2 * (1 + k.x[:, None])))))
    g = max(check_goursat(k).values())
    zero = float(np.max(np.abs(build_kernel(unit_impedance(), J=128).values)))
    ok = err <= 1e-5 and g <= 1e-5 and zero <= 1e-10
    assert record(10, ok, f"kernel {err:.2e}, Goursat {g:.2e} (tol 1e-05); K for a=1 {zero:.2e} (tol 1e-10)")


@pytest.fixture(scope="module")
def triangle_pairs():
    return {name: build_kernel_pair(a) for name, a in CATALOG.items()}


def test_criterion_11_mapping_property(triangle_pairs):
    worst = max(float(np.max(check_mapping_property(p.direct, 6))) for p in triangle_pairs.values())
    assert record(11, worst <= 1e-5, f"|T[x^k] - phi^(k)|, k<=6 = {worst:.2e} (tol 1e-05)")


def test_criterion_12_transmutation_identities(triangle_pairs):
    worst = 0.0
    for p in triangle_pairs.values():
        for u in TEST_FUNCTIONS.values():
            res = check_transmutation_property(p, u)
            worst = max(worst, *(v for name, v in res.items() if "stencil" not in name))
    assert record(12, worst <= 1e-4, f"identity residuals = {worst:.2e} (tol 1e-04)")


def test_criterion_13_inversion_and_kernel_relations():
    worst = {1: 0.0, 2: 0.0}
    for name, a in CATALOG.items():
        ell = 0.5 if "x" in name and "^" not in name else 1.0
        pair = build_kernel_pair(a, 128, 101, "rectangle", ell)
        k = pair.direct
        n = int(np.sum(k.x > 0))
        fine = Grid.uniform_grid(-ell, ell, 10 * n + 1, 0.0)
        for u in TEST_FUNCTIONS.values():
            v = apply_T(k, fine.sample(u))
            for route in (1, 2):
                back = apply_T_inverse(pair, v, route=route)
                worst[route] = max(worst[route], float(np.max(np.abs(back.values - u(k.x)))))
    pair = build_kernel_pair(affine_impedance())
    rel = check_kernel_relations(pair, lambda x, t: -(x + t) / 2 + (t**2 - x**2) / 4)
    kr = pair.reciprocal
    t = kr.x[:, None] * kr.tau[None, :]
    closed = float(np.max(np.abs(kr.values - (-(kr.x[:, None] + t) / 2 + (t**2 - kr.x[:, None] ** 2) / 4))))
    rmax = max(rel.values())
    ok = max(worst.values()) <= 1e-4 and rmax <= 1e-4 and closed <= 1e-4
    assert record(
        13, ok,
        f"round trips {worst[1]:.2e} / {worst[2]:.2e}; relations and path integral {rmax:.2e}; "
        f"K_1/a vs closed form {closed:.2e} (tol 1e-04)",
    )


def test_criterion_14_estimate_boundedness():
    xs = np.linspace(0.05, 1.0, 20)
    worst, finite, details = 0.0, True, []
    for a in (affine_impedance(), exponential_impedance(1.0)):
        r1 = estimate_check(a, np.linspace(1.0, 100.0, 100), xs)
        r2 = estimate_check(a, np.linspace(1.0, 100.0, 199), xs)
        for kind in ("C", "S"):
            finite &= r1[kind]["finite"] and r2[kind]["finite"]
            change = abs(r2[kind]["max_ratio"] / r1[kind]["max_ratio"] - 1)
            worst = max(worst, change)
            details.append(f"{r2[kind]['max_ratio']:.3f}")
    ok = finite and worst < 0.1
    assert record(14, ok, f"ratios {', '.join(details)}; change on doubling {worst:.2%} (tol 10%)")


def test_criterion_15_perturbation_convergence():
    seq = [
        function_impedance(lambda x, n=n: 1 + x + 1 / n, lambda x: np.ones_like(x), f"1+x+1/{n}")
        for n in (10, 100, 1000)
    ]
    rep = perturbation_convergence_check(seq, affine_impedance(), G01, 6)
    dev = rep["deviation"].max(axis=1)
    ok = bool(dev[0] > dev[1] > dev[2])
    assert record(15, ok, "max_k<=6 deviations " + ", ".join(f"{d:.2e}" for d in dev) + " (decreasing)")
