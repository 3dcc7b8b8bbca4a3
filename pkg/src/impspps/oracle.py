"""Reference solutions that do not use formal powers.

Two independent routes are offered:

* closed forms for the catalog impedances ``1``, ``1 + x``,
  ``1/(1 + x)`` and ``exp(c x)``;
* a high order Runge-Kutta integration (``scipy`` DOP853) of the first
  order system ``u' = v / a^2``, ``v' = a^2 (f - lambda u)`` where
  ``v = D_a u``.

Both return the solution and its ``a``-derivative on the nodes of a grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigurationError, PreconditionError, StiffnessError
from .grid import Grid, SampledFunction
from .impedance import Impedance

__all__ = [
    "OracleSolution",
    "closed_form",
    "closed_form_cauchy",
    "closed_form_points",
    "ode_solve",
    "family_initial_data",
    "dirichlet_poisson_oracle",
]

_FAMILY_DATA = {"e": None, "C": (1.0, 0.0), "S": (0.0, 1.0)}


@dataclass(frozen=True, eq=False)
class OracleSolution:
    """Reference solution ``u`` and ``D_a u`` on a grid."""

    u: SampledFunction
    du: SampledFunction
    lam: complex
    source: str


def family_initial_data(kind: str, rho: complex) -> tuple[complex, complex]:
    """Cauchy data ``(u(x0), D_a u(x0))`` of ``e_a``, ``C_a`` and ``S_a``."""
    if kind not in _FAMILY_DATA:
        raise ConfigurationError(f"unknown solution family {kind!r}")
    if kind == "e":
        return 1.0, 1j * rho
    return _FAMILY_DATA[kind]


def _cos_sinc(omega_sq, s):
    """``cos(w s)`` and ``sin(w s)/w`` for ``w^2 = omega_sq``; both even in ``w``.

    Arguments broadcast against each other.
    """
    omega_sq = np.asarray(omega_sq, dtype=complex)
    s = np.asarray(s, dtype=float)
    w = np.sqrt(omega_sq)
    ws = w * s
    c = np.cos(ws)
    small = np.abs(ws) < 1e-8
    safe_w = np.where(w == 0, 1.0, w)
    sn = np.where(small, s - omega_sq * s**3 / 6, np.sin(ws) / safe_w)
    return c, sn


def _sinc_defect(lam, s):
    """``(s cos(w s) - sin(w s)/w) / lam`` with ``w^2 = lam``, stable near 0."""
    lam, s = np.broadcast_arrays(np.asarray(lam, dtype=complex), np.asarray(s, dtype=float))
    small = np.abs(lam) * s**2 <= 1.0
    out = np.empty(s.shape, dtype=complex)
    if np.any(small):
        ss, ll = s[small], lam[small]
        term = -(ss**3) / 3.0 + 0j
        acc = term.copy()
        for k in range(2, 40):
            # ratio of consecutive terms of -sum_k (-lam)^(k-1) s^(2k+1) 2k/(2k+1)!
            term = term * (-ll) * ss**2 * k / ((k - 1) * (2 * k) * (2 * k + 1))
            acc += term
            if np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(acc), 1e-300)):
                break
        out[small] = acc
    if np.any(~small):
        sb, lb = s[~small], lam[~small]
        c, sn = _cos_sinc(lb, sb)
        out[~small] = (sb * c - sn) / lb
    return out


def closed_form_points(a: Impedance, lam, u0, u1, x, x0: float):
    """Closed form solution and ``D_a`` derivative at points ``x``.

    ``lam``, ``u0``, ``u1`` and ``x`` broadcast against each other; the
    Cauchy data ``(u, D_a u) = (u0, u1)`` are imposed at ``x0``.
    """
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=complex)
    u0 = np.asarray(u0, dtype=complex)
    u1 = np.asarray(u1, dtype=complex)
    s = x - x0
    if a.kind == "unit":
        c, sn = _cos_sinc(lam, s)
        return u0 * c + u1 * sn, -u0 * lam * sn + u1 * c
    if a.kind in ("affine", "affine_reciprocal") and (np.any(1 + x <= 0) or 1 + x0 <= 0):
        raise PreconditionError("1 + x must be positive")
    if a.kind == "affine":
        p = 1.0 + x0
        w0 = p * u0
        w1 = (u1 + w0) / p
        c, sn = _cos_sinc(lam, s)
        w = w0 * c + w1 * sn
        dw = -w0 * lam * sn + w1 * c
        return w / (1 + x), (1 + x) * dw - w
    if a.kind == "affine_reciprocal":
        p = 1.0 + x0
        c, sn = _cos_sinc(lam, s)
        # basis with data (1, 0) and (0, 1) at x0
        P = ((1 + x) * c - sn) / p
        dP = -lam * sn / ((1 + x) * p)
        Q = (1 + x) * p * sn - _sinc_defect(lam, s)
        dQ = (p * c + sn) / (1 + x)
        return u0 * P + u1 * Q, u0 * dP + u1 * dQ
    if a.kind == "exponential":
        cc = a.param
        A = u0
        B = u1 * np.exp(-2 * cc * x0) + cc * u0
        om2 = lam - cc**2
        c, sn = _cos_sinc(om2, s)
        env = np.exp(-cc * s)
        u = env * (A * c + B * sn)
        dudx = env * (-cc * (A * c + B * sn) + (-A * om2 * sn + B * c))
        return u, np.exp(2 * cc * x) * dudx
    raise PreconditionError(f"no closed form for impedance kind {a.kind!r}")


def closed_form_cauchy(a: Impedance, lam: complex, u0: complex, u1: complex, grid: Grid):
    """Closed form solution of ``-(a^2 u')' = lam a^2 u`` with Cauchy data at the anchor.

    Returns
    -------
    u, du : ndarray
        Solution and ``D_a u`` on the nodes.
    """
    return closed_form_points(a, lam, u0, u1, grid.nodes, grid.x0)


def closed_form(kind: str, a: Impedance, rho: complex, grid: Grid) -> OracleSolution:
    """Closed form ``e_a``, ``C_a`` or ``S_a`` at spectral parameter ``rho``."""
    u0, u1 = family_initial_data(kind, rho)
    lam = complex(rho) ** 2
    u, du = closed_form_cauchy(a, lam, u0, u1, grid)
    return OracleSolution(
        SampledFunction(grid, np.asarray(u, dtype=complex)),
        SampledFunction(grid, np.asarray(du, dtype=complex)),
        lam,
        "closed-form",
    )


def ode_solve(
    a: Impedance,
    lam: complex,
    u0: complex,
    u1: complex,
    grid: Grid,
    forcing: Optional[Callable] = None,
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> OracleSolution:
    """Integrate ``L_a u + lam u = f`` from the anchor to both ends.

    ``L_a u = a^-2 (a^2 u')'`` and ``(u, D_a u)(x0) = (u0, u1)``.  Complex
    data are handled by integrating real and imaginary parts together.

    Raises
    ------
    StiffnessError
        If the integrator fails to complete.
    """
    lam = complex(lam)
    x = grid.nodes
    j0 = grid.anchor_index

    def rhs(t, y):
        u = y[0] + 1j * y[1]
        v = y[2] + 1j * y[3]
        asq = float(a.a_sq(t))
        du = v / asq
        dv = -lam * asq * u
        if forcing is not None:
            dv = dv + asq * complex(forcing(t))
        return [du.real, du.imag, dv.real, dv.imag]

    y0 = np.array([complex(u0).real, complex(u0).imag, complex(u1).real, complex(u1).imag])
    u = np.empty(x.size, dtype=complex)
    v = np.empty(x.size, dtype=complex)
    u[j0], v[j0] = u0, u1
    scale = max(1.0, float(np.max(np.abs(y0))))
    for sel in (slice(j0, None), slice(j0, None, -1) if j0 > 0 else None):
        if sel is None:
            continue
        ts = x[sel]
        if ts.size < 2:
            continue
        sol = solve_ivp(
            rhs,
            (ts[0], ts[-1]),
            y0,
            method="DOP853",
            t_eval=ts,
            rtol=rtol,
            atol=atol * scale,
        )
        if sol.status != 0:
            raise StiffnessError(f"reference integrator failed: {sol.message}")
        u[sel] = sol.y[0] + 1j * sol.y[1]
        v[sel] = sol.y[2] + 1j * sol.y[3]
    u[j0], v[j0] = u0, u1
    return OracleSolution(SampledFunction(grid, u), SampledFunction(grid, v), lam, "ode")


def dirichlet_poisson_oracle(g: Callable, a: Impedance, grid: Grid) -> SampledFunction:
    """Shooting solution of ``L_a u = g`` with ``u(l1) = u(l2) = 0``."""
    gl = grid.with_anchor(grid.l1)
    part = ode_solve(a, 0.0, 0.0, 0.0, gl, forcing=g)
    hom = ode_solve(a, 0.0, 0.0, 1.0, gl)
    slope = -part.u.values[-1] / hom.u.values[-1]
    u = part.u.values + slope * hom.u.values
    return SampledFunction(grid, u.real)
