"""Approximation by formal polynomials.

Formal polynomials ``sum_k c_k phi_a^(k)`` are dense in ``L^p_a`` and in
the Sobolev spaces ``W^{m,p}``.  This module computes best ``L^2_a``
approximations, measures errors in several norms and builds the
Sobolev approximants obtained by integrating back an approximation of the
generalized derivative ``D_a^(m) u``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, GridMismatchError, IllConditionedWarning
from .formal_powers import FormalPolynomial, FormalPowerTable, build_formal_powers
from .grid import Grid, SampledFunction, quadrature_weights, stencil_derivative
from .impedance import Impedance
from .operators import op_D, weight_on

__all__ = [
    "Projection",
    "project_L2a",
    "error_report",
    "sobolev_approximant",
    "approximation_study",
    "target_function",
    "COND_LIMIT",
]

#: Gram matrices with a larger 2-norm condition number are solved by QR
COND_LIMIT = 1e10


@dataclass(frozen=True, eq=False)
class Projection:
    """Best ``L^2_b`` approximation from ``span{phi_b^(0..N)}``.

    Attributes
    ----------
    coefficients : ndarray
    approximant : SampledFunction
    error : float
        ``L^2_b`` norm of the residual.
    cond : float
        Condition number of the Gram matrix.
    method : str
        ``"cholesky"`` or ``"qr"`` (fallback for ill conditioned Gram).
    """

    coefficients: np.ndarray
    approximant: SampledFunction
    error: float
    cond: float
    method: str
    polynomial: FormalPolynomial = field(repr=False, default=None)


def gram_matrix(table: FormalPowerTable, N: int, side: str = "direct") -> np.ndarray:
    """``G_jk = <phi^(j), phi^(k)>`` in ``L^2`` with weight ``b^2``."""
    rows = table.family(side)[: N + 1]
    b_sq, _ = weight_on(table.impedance, table.grid, side)
    w = quadrature_weights(table.grid) * b_sq
    return (rows * w) @ rows.T


def project_L2a(f: SampledFunction, N: int, table: FormalPowerTable, side: str = "direct",
                qr_factor=None, method: str = "auto") -> Projection:
    """Orthogonal projection of ``f`` onto ``span{phi^(0..N)}`` in ``L^2_b``.

    ``b = a`` for ``side="direct"`` and ``b = 1/a`` otherwise.  The normal
    equations are solved by Cholesky when the Gram condition number is at
    most :data:`COND_LIMIT`; beyond that an ``IllConditionedWarning`` is
    issued and a Householder QR least squares solve of the weighted
    collocation system is used instead.

    ``method="qr"`` skips the normal equations altogether (and the
    warning).  ``qr_factor`` may hold ``(q, r)`` of the weighted system for a
    larger order; its leading columns are then used, which makes projections
    of increasing order exactly nested.
    """
    if method not in ("auto", "qr"):
        raise ConfigurationError(f"method must be 'auto' or 'qr', got {method!r}")
    if N < 0:
        raise ConfigurationError("N must be non-negative")
    if N > table.K:
        raise ConfigurationError(f"N={N} exceeds the table order K={table.K}")
    if f.grid.nodes.shape != table.grid.nodes.shape or not np.array_equal(f.grid.nodes, table.grid.nodes):
        raise GridMismatchError("target and table live on different grids")
    rows = table.family(side)[: N + 1]
    b_sq, _ = weight_on(table.impedance, table.grid, side)
    w = quadrature_weights(table.grid) * b_sq
    G = (rows * w) @ rows.T
    cond = float(np.linalg.cond(G))
    rhs = (rows * w) @ f.values
    coef = None
    if method == "auto" and cond <= COND_LIMIT:
        try:
            coef = scipy.linalg.cho_solve(scipy.linalg.cho_factor(G), rhs)
        except np.linalg.LinAlgError:
            coef = None
    if coef is None and method == "auto":
        warnings.warn(
            f"Gram matrix of order {N} has condition number {cond:.2e}; using QR",
            IllConditionedWarning,
            stacklevel=2,
        )
    if coef is None:
        method = "qr"
        sw = np.sqrt(w)
        if qr_factor is None:
            q, r = np.linalg.qr((rows * sw).T)
        else:
            q, r = qr_factor[0][:, : N + 1], qr_factor[1][: N + 1, : N + 1]
        qb = q.T @ (sw * f.values)
        coef = scipy.linalg.solve_triangular(r, qb)
        # the approximant comes from Q, not from the ill conditioned coefficients
        approx = (q @ qb) / sw
    else:
        method = "cholesky"
        approx = coef @ rows
    err = float(np.sqrt(w @ np.abs(f.values - approx) ** 2))
    poly = FormalPolynomial(coef, table, side)
    return Projection(coef, SampledFunction(table.grid, approx), err, cond, method, poly)


def error_report(f: SampledFunction, approximant: SampledFunction, a: Impedance, ps=(1, 2, "inf")) -> dict:
    """Errors of an approximation in ``L^p_a``, ``W^{1,p}`` and the Hoelder bound.

    Returns
    -------
    dict
        ``"Lp"``: ``{p: ||f - g||_{L^p_a}}``;
        ``"W1p"``: ``{p: ||e||_p + ||e'||_p}`` with unweighted Lebesgue norms
        and the stencil derivative; ``"L1_bound"``: ``||a||_2 ||e||_{L^2_a}``,
        an upper bound for ``||e||_{L^1_a}``.
    """
    grid = f.grid
    e = f.values - f._other(approximant)
    de = stencil_derivative(e, grid)
    a_sq, _ = weight_on(a, grid)
    w = quadrature_weights(grid)
    lp, w1p = {}, {}
    for p in ps:
        key = str(p)
        if p in ("inf", np.inf, math.inf):
            lp[key] = float(np.max(np.abs(e)))
            w1p[key] = float(np.max(np.abs(e)) + np.max(np.abs(de)))
        else:
            p = float(p)
            lp[key] = float((w * a_sq) @ np.abs(e) ** p) ** (1 / p)
            w1p[key] = float(w @ np.abs(e) ** p) ** (1 / p) + float(w @ np.abs(de) ** p) ** (1 / p)
    l2a = float((w * a_sq) @ np.abs(e) ** 2) ** 0.5
    bound = math.sqrt(float(w @ a_sq)) * l2a
    return {"Lp": lp, "W1p": w1p, "L1_bound": bound}


def sobolev_approximant(u: SampledFunction, m: int, table: FormalPowerTable, N: int) -> FormalPolynomial:
    """Formal polynomial of degree ``m + N`` approximating ``u`` in ``W^{m,p}``.

    ``D_a^(m) u`` is projected onto the family ``phi_b^(0..N)``,
    ``b = a^((-1)^m)``, in ``L^2_b``; the projection is integrated back with
    ``J_a^(m) phi_b^(k) = k!/(m+k)! phi_a^(m+k)`` and the Taylor part
    ``sum_{k<m} D_a^(k) u(x0)/k! phi_a^(k)`` is added.
    """
    if m < 0 or N < 0:
        raise ConfigurationError("m and N must be non-negative")
    if m + N > table.K:
        raise ConfigurationError(f"degree m+N={m + N} exceeds the table order {table.K}")
    a = table.impedance
    coeffs = np.zeros(m + N + 1, dtype=u.values.dtype if u.is_complex else float)
    d = u
    for k in range(m):
        coeffs[k] = d.at_anchor() / math.factorial(k)
        d = op_D(d, a, "direct" if k % 2 == 0 else "reciprocal")
    side = "direct" if m % 2 == 0 else "reciprocal"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        proj = project_L2a(d, N, table, side)
    for k in range(N + 1):
        coeffs[m + k] = proj.coefficients[k] * math.factorial(k) / math.factorial(m + k)
    return FormalPolynomial(coeffs, table, "direct")


def target_function(name: str, a: Impedance, grid: Grid) -> SampledFunction:
    """Named targets for convergence studies.

    ``exp``         ``exp(x)``
    ``C_pi``        ``C_a(pi, x)``, a solution of the equation
    ``smooth_abs``  ``sqrt((x - m)^2 + d^2)``, ``m`` the midpoint and
                    ``d`` a tenth of the interval length
    """
    x = grid.nodes
    if name == "exp":
        return SampledFunction(grid, np.exp(x))
    if name == "C_pi":
        from .spps import spps_solution

        return spps_solution("C", a, math.pi, grid).values.real()
    if name == "smooth_abs":
        mid = 0.5 * (grid.l1 + grid.l2)
        d = 0.1 * (grid.l2 - grid.l1)
        return SampledFunction(grid, np.sqrt((x - mid) ** 2 + d**2))
    raise ConfigurationError(f"unknown target {name!r}")


def approximation_study(f: SampledFunction, a: Impedance, Ns, ps=(1, 2, "inf"),
                        table: FormalPowerTable | None = None, target: str = "") -> dict:
    """Errors and Gram conditioning of the ``L^2_a`` projections for several ``N``.

    All projections come from one Householder QR of the weighted basis of
    the largest order, so the approximation spaces are nested exactly and
    the errors are non-increasing in ``N`` up to rounding.  ``cond`` is the
    Gram condition number at each order.

    Returns a report ``{target, impedance, N, errors: {p: [...]}, cond,
    method, l2a}``.
    """
    Ns = [int(n) for n in Ns]
    if table is None:
        table = build_formal_powers(a, f.grid, max(Ns))
    if max(Ns) > table.K:
        raise ConfigurationError(f"N={max(Ns)} exceeds the table order {table.K}")
    errors = {str(p): [] for p in ps}
    conds, methods, l2a = [], [], []
    rows = table.direct[: max(Ns) + 1]
    b_sq, _ = weight_on(a, f.grid)
    sw = np.sqrt(quadrature_weights(f.grid) * b_sq)
    factor = np.linalg.qr((rows * sw).T)
    for n in Ns:
        proj = project_L2a(f, n, table, qr_factor=factor, method="qr")
        rep = error_report(f, proj.approximant, a, ps)
        for p in ps:
            errors[str(p)].append(rep["Lp"][str(p)])
        conds.append(proj.cond)
        methods.append(proj.method)
        l2a.append(proj.error)
    return {
        "target": target,
        "impedance": a.label,
        "N": Ns,
        "errors": errors,
        "cond": conds,
        "method": methods,
        "l2a": l2a,
    }
