"""Dirichlet eigenvalues, eigenfunction expansions and the Poisson problem.

The eigenvalues of ``-(a^2 u')' = lambda a^2 u``, ``u(l1) = u(l2) = 0``
are the zeros of the characteristic function ``S_a(sqrt(lambda), l2)``
with the sine-type solution anchored at ``l1``.  As a power series in
``lambda`` it needs no square root.

When the formal power table is anchored elsewhere, typically at the
midpoint, the same function is obtained from the centred solutions
``C`` and ``S`` as

    C(l1) S(l2) - S(l1) C(l2),

which is the sine-type solution anchored at ``l1`` (its ``a``-Wronskian
with respect to the centred pair is 1).  Centring halves the radius of
the series and with it the cancellation, which grows like
``exp(|rho| * radius)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ConfigurationError, SpectralRangeError
from .formal_powers import FormalPowerTable, build_formal_powers, required_order
from .grid import Grid, SampledFunction, quadrature_weights
from .impedance import Impedance, validate_proper
from .operators import op_J, op_L, op_R, weight_on

__all__ = [
    "EigenPair",
    "CharacteristicFunction",
    "characteristic_function",
    "find_eigenvalues",
    "dirichlet_eigenpairs",
    "fourier_expand",
    "ExpansionResult",
    "solve_dirichlet_poisson",
    "inner_product_a",
    "norm_a",
]


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Dirichlet eigenpair with eigenfunction normalised in ``L^2_a``."""

    index: int
    lam: float
    eigenfunction: SampledFunction
    residual: float


def inner_product_a(u: SampledFunction, v: SampledFunction, a: Impedance) -> complex:
    """``int u conj(v) a^2``."""
    a_sq, _ = weight_on(a, u.grid)
    w = quadrature_weights(u.grid)
    return complex(np.sum(w * a_sq * u.values * np.conj(u._other(v))))


def norm_a(u: SampledFunction, a: Impedance) -> float:
    a_sq, _ = weight_on(a, u.grid)
    w = quadrature_weights(u.grid)
    return float(np.sqrt(np.sum(w * a_sq * np.abs(u.values) ** 2)))


def _even_odd_coefficients(rows: np.ndarray, idx: int):
    """Coefficients in ``lambda`` of the C- and S-series at node ``idx``."""
    K = rows.shape[0] - 1
    nc, ns = K // 2, (K - 1) // 2
    c = np.array([(-1) ** k * rows[2 * k, idx] / math.factorial(2 * k) for k in range(nc + 1)])
    s = np.array([(-1) ** k * rows[2 * k + 1, idx] / math.factorial(2 * k + 1) for k in range(ns + 1)])
    return c, s


class CharacteristicFunction:
    """``Delta(lambda)``, whose zeros are the Dirichlet eigenvalues."""

    def __init__(self, table: FormalPowerTable):
        if table.K < 3:
            raise ConfigurationError("characteristic function needs a table of order >= 3")
        self.table = table
        self.c1, self.s1 = _even_odd_coefficients(table.direct, 0)
        self.c2, self.s2 = _even_odd_coefficients(table.direct, -1)

    def _parts(self, lam):
        c1 = npoly.polyval(lam, self.c1)
        s1 = npoly.polyval(lam, self.s1)
        c2 = npoly.polyval(lam, self.c2)
        s2 = npoly.polyval(lam, self.s2)
        return c1, s1, c2, s2

    def __call__(self, lam):
        c1, s1, c2, s2 = self._parts(lam)
        return c1 * s2 - s1 * c2

    def derivative(self, lam):
        c1, s1, c2, s2 = self._parts(lam)
        d = [npoly.polyval(lam, npoly.polyder(p)) for p in (self.c1, self.s1, self.c2, self.s2)]
        return d[0] * s2 + c1 * d[3] - d[1] * c2 - s1 * d[2]

    def truncation_ratio(self, lam: float) -> float:
        """Largest ratio of a last term to the largest term at ``lam``."""
        worst = 0.0
        for p in (self.c1, self.s1, self.c2, self.s2):
            terms = np.abs(p * float(lam) ** np.arange(p.size))
            peak = max(float(np.max(terms)), 1e-300)
            if np.max(np.abs(p)) == 0:
                continue
            worst = max(worst, float(terms[-1]) / peak)
        return worst

    def check_range(self, lambda_max: float, tol: float = 1e-15):
        if self.truncation_ratio(lambda_max) > tol:
            raise SpectralRangeError(
                f"formal power order {self.table.K} is too small for lambda up to "
                f"{lambda_max:g}; raise K or lower lambda_max"
            )


def characteristic_function(lam, table: FormalPowerTable):
    """``S_a(sqrt(lam), l2)`` for the sine-type solution anchored at ``l1``.

    ``table`` may be anchored at ``l1`` or at any interior node.
    """
    return CharacteristicFunction(table)(lam)


def _bisect(f, lo, hi, flo, tol=1e-12, maxit=200):
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid, mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    return lo, hi


def _eigenfunction_values(table: FormalPowerTable, lam: float) -> np.ndarray:
    rows = table.direct
    K = table.K
    nc, ns = K // 2, (K - 1) // 2
    cc = np.array([(-lam) ** k / math.factorial(2 * k) for k in range(nc + 1)])
    cs = np.array([(-lam) ** k / math.factorial(2 * k + 1) for k in range(ns + 1)])
    C = cc @ rows[0 : 2 * nc + 1 : 2]
    S = cs @ rows[1 : 2 * ns + 2 : 2]
    return C[0] * S - S[0] * C


def find_eigenvalues(n_max: int, lambda_max: float, table: FormalPowerTable) -> list[EigenPair]:
    """First ``n_max`` Dirichlet eigenpairs from sign changes of ``Delta``.

    The scan step is a quarter of ``(pi / (l2 - l1))^2``; each bracket is
    bisected to relative width ``1e-12`` and refined by one Newton step.

    Raises
    ------
    SpectralRangeError
        If fewer than ``n_max`` eigenvalues lie below ``lambda_max`` or the
        table order cannot resolve ``Delta`` up to ``lambda_max``.
    """
    if n_max < 1:
        raise ConfigurationError("n_max must be at least 1")
    grid = table.grid
    a = table.impedance
    delta = CharacteristicFunction(table)
    delta.check_range(lambda_max)
    span = grid.l2 - grid.l1
    step = (math.pi / span) ** 2 / 4
    grid_lam = np.arange(0.0, lambda_max + step, step)
    grid_lam[-1] = min(grid_lam[-1], lambda_max)
    vals = delta(grid_lam)
    roots = []
    for i in range(grid_lam.size - 1):
        if len(roots) == n_max:
            break
        f0, f1 = vals[i], vals[i + 1]
        if f0 == 0:
            roots.append(grid_lam[i])
            continue
        if np.sign(f0) != np.sign(f1) and f1 != 0:
            lo, hi = _bisect(delta, grid_lam[i], grid_lam[i + 1], f0)
            lam = 0.5 * (lo + hi)
            d = delta.derivative(lam)
            if d != 0:
                cand = lam - delta(lam) / d
                if lo - (hi - lo) <= cand <= hi + (hi - lo):
                    lam = cand
            roots.append(float(lam))
    if len(roots) < n_max:
        raise SpectralRangeError(
            f"found {len(roots)} of {n_max} eigenvalues below lambda_max={lambda_max:g}; "
            "raise lambda_max (and K if needed)"
        )
    pairs = []
    for n, lam in enumerate(roots, start=1):
        u = SampledFunction(grid, _eigenfunction_values(table, lam))
        u = u / norm_a(u, a)
        res = op_L(u, a) + lam * u
        pairs.append(EigenPair(n, lam, u, norm_a(res, a)))
    return pairs


def dirichlet_eigenpairs(a: Impedance, grid: Grid, n_max: int, lambda_max: float | None = None,
                         K: int | None = None, center: str = "midpoint") -> list[EigenPair]:
    """Build a suitable table and return the first ``n_max`` eigenpairs.

    Parameters
    ----------
    center : {"midpoint", "left"}
        Anchor of the formal power table.  ``"midpoint"`` needs an odd
        number of nodes on a uniform grid.
    lambda_max : float, optional
        Upper end of the scan.  By default it starts at
        ``((n_max + 1) pi / (l2 - l1))^2`` plus a margin and is doubled (at
        most four times) while eigenvalues are missing.
    """
    validate_proper(a, grid)
    if center == "midpoint":
        g = grid.with_anchor(grid.nodes[grid.size // 2])
    elif center == "left":
        g = grid.with_anchor(grid.l1)
    else:
        raise ConfigurationError(f"unknown table centre {center!r}")
    span = grid.l2 - grid.l1
    auto = lambda_max is None
    if auto:
        lambda_max = 1.5 * ((n_max + 1) * math.pi / span) ** 2 + 10.0
    tries = 5 if auto else 1
    for attempt in range(tries):
        order = K if K is not None else min(required_order(math.sqrt(lambda_max) * g.radius) + 4, 160)
        table = build_formal_powers(a, g, order)
        try:
            return find_eigenvalues(n_max, lambda_max, table)
        except SpectralRangeError:
            if attempt == tries - 1:
                raise
            lambda_max *= 2
    raise AssertionError("unreachable")


@dataclass(frozen=True, eq=False)
class ExpansionResult:
    """Eigenfunction expansion of a function.

    ``partial_sums[j]`` uses the first ``j + 1`` eigenfunctions and
    ``sup_errors``/``l2_errors`` measure ``u`` minus that partial sum.
    """

    coefficients: np.ndarray
    partial_sums: np.ndarray
    sup_errors: np.ndarray
    l2_errors: np.ndarray


def fourier_expand(u: SampledFunction, pairs: list[EigenPair], a: Impedance) -> ExpansionResult:
    """Coefficients ``<u, phi_n>_a`` and the convergence of the partial sums."""
    a_sq, _ = weight_on(a, u.grid)
    w = quadrature_weights(u.grid) * a_sq
    phis = np.array([p.eigenfunction.values for p in pairs])
    coef = phis.conj() @ (w * u.values)
    partial = np.cumsum(coef[:, None] * phis, axis=0)
    err = u.values[None, :] - partial
    sup = np.max(np.abs(err), axis=1)
    l2 = np.sqrt(np.abs(err) ** 2 @ w)
    return ExpansionResult(coef, partial, sup, l2)


def solve_dirichlet_poisson(g: SampledFunction, a: Impedance) -> SampledFunction:
    """The solution of ``L_a u = g``, ``u(l1) = u(l2) = 0``, via ``R_a``.

    ``u = R_a g + c1 J_a[1] + c0`` with the constants fixed by the boundary
    values; the determinant of that 2x2 system is ``-int a^-2``.
    """
    grid = g.grid
    validate_proper(a, grid)
    r = op_R(g, a).values
    p = op_J(grid.constant(1.0), a).values
    m = np.array([[p[0], 1.0], [p[-1], 1.0]])
    c1, c0 = np.linalg.solve(m, -np.array([r[0], r[-1]]))
    u = r + c1 * p + c0
    u[0] = u[-1] = 0.0
    return SampledFunction(grid, u)
