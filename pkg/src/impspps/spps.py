"""Power series in the spectral parameter over formal powers.

For ``lambda = rho^2`` the functions

    e_a(rho, x) = sum_k (i rho)^k phi_a^(k) / k!
    C_a(rho, x) = sum_k (-1)^k rho^(2k) phi_a^(2k) / (2k)!
    S_a(rho, x) = sum_k (-1)^k rho^(2k) phi_a^(2k+1) / (2k+1)!

solve ``-(a^2 u')' = lambda a^2 u`` with Cauchy data ``(1, i rho)``,
``(1, 0)`` and ``(0, 1)`` at the anchor.  Their ``a``-derivatives follow
termwise from the reciprocal family:

    D_a e_a = i rho e_{1/a},   D_a C_a = -rho^2 S_{1/a},   D_a S_a = C_{1/a}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .formal_powers import FormalPowerTable, build_formal_powers, required_order
from .grid import Grid, SampledFunction, cumulative_integral
from .impedance import Impedance
from .operators import op_D
from .oracle import closed_form_points, ode_solve

__all__ = [
    "SppsSolution",
    "spps_eval",
    "spps_darboux_derivative",
    "spps_solution",
    "wronskian",
    "series_coefficients",
    "required_table_order",
    "estimate_check",
]

KINDS = ("e", "C", "S")
_DARBOUX_KIND = {"e": "e", "C": "S", "S": "C"}


@dataclass(frozen=True, eq=False)
class SppsSolution:
    """A truncated SPPS sum.

    Attributes
    ----------
    kind : str
        ``"e"``, ``"C"`` or ``"S"``.
    rho : complex
    N : int
        Number of the last retained term.
    values : SampledFunction
    tail_estimate : float
        Sup norm of the last retained term.
    table : FormalPowerTable
    side : str
        Family of the table the series runs over.
    scale : complex
        Constant factor in front of the series (1 except for Darboux images).
    """

    kind: str
    rho: complex
    N: int
    values: SampledFunction
    tail_estimate: float
    table: FormalPowerTable
    side: str = "direct"
    scale: complex = 1.0


def _first_index(kind: str) -> tuple[int, int]:
    """Offset and stride of the formal powers used by a series."""
    return {"e": (0, 1), "C": (0, 2), "S": (1, 2)}[kind]


def series_coefficients(kind: str, rho: complex, N: int) -> np.ndarray:
    """Scalar coefficients multiplying ``phi^(offset + stride k)`` for ``k <= N``."""
    rho = complex(rho)
    out = np.empty(N + 1, dtype=complex)
    if kind == "e":
        out[0] = 1.0
        for k in range(1, N + 1):
            out[k] = out[k - 1] * 1j * rho / k
    elif kind == "C":
        out[0] = 1.0
        for k in range(1, N + 1):
            out[k] = out[k - 1] * (-(rho**2)) / ((2 * k - 1) * (2 * k))
    elif kind == "S":
        out[0] = 1.0
        for k in range(1, N + 1):
            out[k] = out[k - 1] * (-(rho**2)) / ((2 * k) * (2 * k + 1))
    else:
        raise ConfigurationError(f"unknown solution family {kind!r}")
    return out


def _max_terms(kind: str, K: int) -> int:
    off, stride = _first_index(kind)
    return (K - off) // stride


def _sum_series(kind, rho, rows, N, tol):
    """Sum the series over ``rows``; choose ``N`` by the stopping rule if None."""
    off, stride = _first_index(kind)
    n_avail = _max_terms(kind, rows.shape[0] - 1)
    if N is not None:
        if N < 0:
            raise ConfigurationError("number of terms must be non-negative")
        if N > n_avail:
            need = off + stride * N
            raise ConfigurationError(
                f"{kind}-series with N={N} needs formal powers up to {need}, "
                f"table has {rows.shape[0] - 1}"
            )
        coef = series_coefficients(kind, rho, N)
        terms = coef[:, None] * rows[off : off + stride * N + 1 : stride]
        return terms.sum(axis=0), N, float(np.max(np.abs(terms[-1])))
    coef = series_coefficients(kind, rho, n_avail)
    radius = float(np.max(np.abs(rows[1]))) if rows.shape[0] > 1 else 0.0
    # terms can only be trusted to decrease once past the peak of |z|^k/k!
    k_min = int(np.ceil(abs(rho) * radius / stride))
    acc = np.zeros(rows.shape[1], dtype=complex)
    for k in range(n_avail + 1):
        term = coef[k] * rows[off + stride * k]
        acc += term
        tail = float(np.max(np.abs(term)))
        if k >= k_min and tail < tol * max(1.0, float(np.max(np.abs(acc)))):
            return acc, k, tail
    raise ConfigurationError(
        f"{kind}-series at rho={rho} has not converged with a table of order "
        f"{rows.shape[0] - 1}; raise K"
    )


def spps_eval(kind: str, rho: complex, table: FormalPowerTable, N: int | None = None,
              tol: float = 1e-12) -> SppsSolution:
    """Evaluate ``e_a``, ``C_a`` or ``S_a`` from a formal power table.

    Parameters
    ----------
    kind : {"e", "C", "S"}
    rho : complex
        Spectral parameter, ``lambda = rho^2``.
    table : FormalPowerTable
    N : int, optional
        Index of the last term.  By default the smallest ``N`` whose term has
        sup norm below ``tol * max(1, ||partial sum||)`` is used.
    """
    if kind not in KINDS:
        raise ConfigurationError(f"unknown solution family {kind!r}")
    vals, N, tail = _sum_series(kind, rho, table.direct, N, tol)
    return SppsSolution(kind, complex(rho), N, SampledFunction(table.grid, vals), tail, table)


def spps_darboux_derivative(sol: SppsSolution) -> SppsSolution:
    """``D_a`` of an SPPS solution, summed termwise over the reciprocal family.

    The result is an SPPS solution over ``1/a`` of kind ``e``, ``S`` or
    ``C`` multiplied by ``scale`` = ``i rho``, ``-rho^2`` or ``1``.
    """
    table, rho, N = sol.table, sol.rho, sol.N
    rec = table.reciprocal if sol.side == "direct" else table.direct
    new_side = "reciprocal" if sol.side == "direct" else "direct"
    if sol.kind == "e":
        # D_a e_a = sum_{k>=1} (i rho)^k phi_{1/a}^(k-1)/(k-1)!
        n = max(N - 1, 0)
        vals, _, tail = _sum_series("e", rho, rec, n, 0.0)
        scale = 1j * rho
        kind = "e"
    elif sol.kind == "C":
        # D_a C_a = -rho^2 sum_{k>=0} (-1)^k rho^(2k) phi_{1/a}^(2k+1)/(2k+1)!
        n = max(N - 1, 0)
        vals, _, tail = _sum_series("S", rho, rec, n, 0.0)
        scale = -(rho**2)
        kind = "S"
    else:
        vals, _, tail = _sum_series("C", rho, rec, N, 0.0)
        scale = 1.0
        kind = "C"
    if N == 0 and sol.kind in ("e", "C"):
        vals = np.zeros_like(vals)
    return SppsSolution(
        kind, rho, N, SampledFunction(table.grid, scale * vals), abs(scale) * tail,
        table, new_side, scale,
    )


def required_table_order(rho: complex, grid: Grid) -> int:
    """Formal power order sufficient for any of the three series at ``rho``."""
    return min(required_order(abs(rho) * grid.radius) + 3, 160)


def spps_solution(kind: str, a: Impedance, rho: complex, grid: Grid,
                  K: int | None = None, N: int | None = None) -> SppsSolution:
    """Build a table of sufficient order and evaluate one series."""
    if K is None:
        K = max(required_table_order(rho, grid), 12)
    return spps_eval(kind, rho, build_formal_powers(a, grid, K), N)


def wronskian(u: SampledFunction, v: SampledFunction, a: Impedance,
              du: SampledFunction | None = None, dv: SampledFunction | None = None) -> SampledFunction:
    """``W_a[u, v] = u D_a v - v D_a u``.

    ``du`` and ``dv`` may supply ``D_a u`` and ``D_a v``; stencils are used
    otherwise.
    """
    if du is None:
        du = op_D(u, a)
    if dv is None:
        dv = op_D(v, a)
    return u * dv - v * du


def _q1(a: Impedance, x: np.ndarray, nodes: int = 4001) -> np.ndarray:
    """``Q_1(x) = int_0^x |2 a'/a|`` at the points ``x >= 0``."""
    top = float(np.max(x))
    if top == 0:
        return np.zeros_like(x)
    g = Grid.uniform_grid(0.0, top, nodes)
    q = np.abs(2 * np.asarray(a.derivative(g.nodes), dtype=float) * a.a_inv(g.nodes))
    return np.interp(x, g.nodes, cumulative_integral(q, g))


def _cauchy_values(a: Impedance, lam: np.ndarray, u0: float, u1: float, x: np.ndarray) -> np.ndarray:
    """Solution with data ``(u0, u1)`` at 0, shape (len(lam), len(x))."""
    if a.has_closed_form:
        u, _ = closed_form_points(a, lam[:, None], u0, u1, x[None, :], 0.0)
        return np.asarray(u)
    nodes = np.unique(np.concatenate([[0.0], x]))
    g = Grid(nodes, 0) if nodes.size >= 3 else Grid.uniform_grid(0.0, float(nodes[-1]), 3)
    out = np.empty((lam.size, x.size), dtype=complex)
    for i, lm in enumerate(lam):
        sol = ode_solve(a, lm, u0, u1, g)
        out[i] = np.interp(x, g.nodes, sol.u.values.real) + 1j * np.interp(x, g.nodes, sol.u.values.imag)
    return out


def estimate_check(a: Impedance, rho_samples, x_samples) -> dict:
    """Empirical constants in the large parameter estimates of ``C_a`` and ``S_a``.

    For ``x > 0`` and ``rho != 0`` the ratios

        |C_a - cos(rho x)| (1 + |rho| x) / (|rho| x e^{|Im rho| x} e^{Q_1(x)}),
        |S_a - sin(rho x)/rho| (1 + |rho| x) / (x e^{|Im rho| x} e^{Q_1(x)})

    must stay bounded.  ``C_a`` and ``S_a`` have data at 0 and come from the
    closed forms when the impedance has one, otherwise from the reference
    integrator.

    Returns
    -------
    dict
        ``{"C": {...}, "S": {...}}`` where each entry holds ``max_ratio`` and
        the ``rho`` and ``x`` at which it is attained, plus ``Q1_max``.
    """
    rho = np.atleast_1d(np.asarray(rho_samples, dtype=complex))
    x = np.atleast_1d(np.asarray(x_samples, dtype=float))
    if np.any(x <= 0) or np.any(rho == 0):
        raise ConfigurationError("the estimates need x > 0 and rho != 0")
    q1 = _q1(a, x)
    lam = rho**2
    C = _cauchy_values(a, lam, 1.0, 0.0, x)
    S = _cauchy_values(a, lam, 0.0, 1.0, x)
    R, X = rho[:, None], x[None, :]
    env = np.exp(np.abs(R.imag) * X + q1[None, :]) / (1 + np.abs(R) * X)
    ratios = {
        "C": np.abs(C - np.cos(R * X)) / (np.abs(R) * X * env),
        "S": np.abs(S - np.sin(R * X) / R) / (X * env),
    }
    report = {"Q1_max": float(np.max(q1))}
    for kind, r in ratios.items():
        i, j = np.unravel_index(int(np.argmax(r)), r.shape)
        report[kind] = {
            "max_ratio": float(r[i, j]),
            "rho": [float(rho[i].real), float(rho[i].imag)],
            "x": float(x[j]),
            "finite": bool(np.all(np.isfinite(r))),
        }
    return report
