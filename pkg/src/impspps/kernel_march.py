"""Characteristic march for the pair of transmutation kernels.

The kernels ``P = K_a`` and ``Q = K_{1/a}`` satisfy the first order system

    dQ/dx = -a^2 dP/dt,     dP/dx = -a^-2 dQ/dt,

with Goursat data ``P(x, x) = 1 - 1/a(x)``, ``Q(x, x) = 1 - a(x)`` and
``P(x, -x) = Q(x, -x) = 0``.  In the variables ``U = a P + Q/a`` and
``V = a P - Q/a`` it diagonalises into two transport equations

    (d/dx + d/dt) U = g V,     (d/dx - d/dt) V = g U,     g = a'/a,

whose characteristics are the diagonals of the square.  The two Goursat
lines are themselves characteristics, so the system can be marched from
them into all four quadrants of ``|x|, |t| <= l`` with the implicit
trapezoid rule, a second order scheme on the diamond lattice
``(i h, j h)``, ``i + j`` even.

This supplies ``K_{1/a}(t, x)`` for ``|t| <= |x|``, i.e. the kernel outside
the triangle ``|t| <= |x|`` where it is built spectrally, which the
explicit inverse of the transmutation operator needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .impedance import Impedance, validate_proper
from .grid import Grid

__all__ = ["MarchedKernels", "march_kernels"]


@dataclass(frozen=True, eq=False)
class MarchedKernels:
    """Kernels on the diamond lattice of the square ``[-l, l]^2``.

    ``P[i + n, j + n]`` and ``Q[i + n, j + n]`` hold ``K_a`` and ``K_{1/a}``
    at ``(x, t) = (i h, j h)``; entries with ``i + j`` odd are NaN.
    """

    impedance: Impedance
    ell: float
    n: int
    P: np.ndarray
    Q: np.ndarray

    @property
    def h(self) -> float:
        return self.ell / self.n

    def value(self, which: str, i, j):
        """Lattice values by integer coordinates (``which`` is ``"P"`` or ``"Q"``)."""
        arr = self.P if which == "P" else self.Q
        return arr[np.asarray(i) + self.n, np.asarray(j) + self.n]


def march_kernels(a: Impedance, ell: float, n: int, richardson: bool = True) -> MarchedKernels:
    """March both kernels over ``[-ell, ell]^2`` with ``n`` steps per half axis.

    With ``richardson`` the march is repeated with ``2 n`` steps and the two
    second order results are extrapolated on the coarse lattice.
    """
    coarse = _march(a, ell, n)
    if not richardson:
        return coarse
    fine = _march(a, ell, 2 * n)
    P = (4 * fine.P[::2, ::2] - coarse.P) / 3
    Q = (4 * fine.Q[::2, ::2] - coarse.Q) / 3
    P.flags.writeable = False
    Q.flags.writeable = False
    return MarchedKernels(a, float(ell), int(n), P, Q)


def _march(a: Impedance, ell: float, n: int) -> MarchedKernels:
    if n < 2:
        raise ConfigurationError("the march needs at least 2 steps")
    xs = np.linspace(-ell, ell, 2 * n + 1)
    validate_proper(a, Grid(xs, n))
    av = np.asarray(a.a(xs), dtype=float) + 0.0 * xs
    if abs(av[n] - 1.0) > 1e-12:
        raise PreconditionError("the kernels need a(0) = 1")
    g = np.asarray(a.derivative(xs), dtype=float) / av
    h = ell / n
    U = np.full((2 * n + 1, 2 * n + 1), np.nan)
    V = np.full_like(U, np.nan)
    o = n
    ug = av + 1.0 / av - 2.0
    vg = av - 1.0 / av

    def set_goursat(i, j):
        # (x, t) = (i h, j h) on t = x
        U[i + o, j + o] = ug[i + o]
        V[i + o, j + o] = vg[i + o]

    def set_zero(i, j):
        U[i + o, j + o] = 0.0
        V[i + o, j + o] = 0.0

    set_goursat(0, 0)
    hh = 0.5 * h
    for k in range(1, n + 1):
        # right quadrant, column x = k h
        set_goursat(k, k)
        set_zero(k, -k)
        j = np.arange(-k + 2, k - 1, 2)
        if j.size:
            i = k
            A = U[i - 1 + o, j - 1 + o] + hh * g[i - 1 + o] * V[i - 1 + o, j - 1 + o]
            B = V[i - 1 + o, j + 1 + o] + hh * g[i - 1 + o] * U[i - 1 + o, j + 1 + o]
            beta = hh * g[i + o]
            u = (A + beta * B) / (1 - beta**2)
            U[i + o, j + o] = u
            V[i + o, j + o] = B + beta * u
        # left quadrant, column x = -k h
        set_goursat(-k, -k)
        set_zero(-k, k)
        if j.size:
            i = -k
            A = U[i + 1 + o, j + 1 + o] - hh * g[i + 1 + o] * V[i + 1 + o, j + 1 + o]
            B = V[i + 1 + o, j - 1 + o] - hh * g[i + 1 + o] * U[i + 1 + o, j - 1 + o]
            beta = hh * g[i + o]
            u = (A - beta * B) / (1 - beta**2)
            U[i + o, j + o] = u
            V[i + o, j + o] = B - beta * u
        # top quadrant, row t = k h
        i = np.arange(-k + 2, k - 1, 2)
        if i.size:
            jj = k
            A = U[i - 1 + o, jj - 1 + o] + hh * g[i - 1 + o] * V[i - 1 + o, jj - 1 + o]
            B = V[i + 1 + o, jj - 1 + o] - hh * g[i + 1 + o] * U[i + 1 + o, jj - 1 + o]
            beta = hh * g[i + o]
            u = (A + beta * B) / (1 + beta**2)
            U[i + o, jj + o] = u
            V[i + o, jj + o] = B - beta * u
        # bottom quadrant, row t = -k h
        if i.size:
            jj = -k
            A = U[i + 1 + o, jj + 1 + o] - hh * g[i + 1 + o] * V[i + 1 + o, jj + 1 + o]
            B = V[i - 1 + o, jj + 1 + o] + hh * g[i - 1 + o] * U[i - 1 + o, jj + 1 + o]
            beta = hh * g[i + o]
            u = (A - beta * B) / (1 + beta**2)
            U[i + o, jj + o] = u
            V[i + o, jj + o] = B + beta * u
    aa = av[:, None]
    P = (U + V) / (2 * aa)
    Q = aa * (U - V) / 2
    P.flags.writeable = False
    Q.flags.writeable = False
    return MarchedKernels(a, float(ell), int(n), P, Q)
