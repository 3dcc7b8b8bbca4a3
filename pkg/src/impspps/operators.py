"""The weighted integral and derivative operators built on an impedance.

``J_a v = int_{x0}^x v / a^2``, ``D_a u = a^2 u'`` and ``R_a = J_a J_{1/a}``.
The ``side`` argument selects ``a`` (``"direct"``) or ``1/a``
(``"reciprocal"``), so ``op_J(v, a, "reciprocal")`` is ``J_{1/a} v``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .grid import Grid, SampledFunction, cumulative_integral, stencil_derivative
from .impedance import Impedance

__all__ = ["op_J", "op_D", "op_R", "op_L", "weight_on"]


def _check_side(side: str) -> bool:
    if side not in ("direct", "reciprocal"):
        raise ConfigurationError(f"side must be 'direct' or 'reciprocal', got {side!r}")
    return side == "direct"


def weight_on(a: Impedance, grid: Grid, side: str = "direct") -> tuple[np.ndarray, np.ndarray]:
    """Return ``(b^2, b^-2)`` on the grid for ``b = a`` or ``b = 1/a``."""
    x = grid.nodes
    if _check_side(side):
        return a.a_sq(x) + 0.0 * x, a.a_inv_sq(x) + 0.0 * x
    return a.a_inv_sq(x) + 0.0 * x, a.a_sq(x) + 0.0 * x


def op_J(v: SampledFunction, a: Impedance, side: str = "direct") -> SampledFunction:
    """``J_b v(x) = int_{x0}^x v(t) / b(t)^2 dt`` with ``b`` chosen by ``side``."""
    _, b_inv_sq = weight_on(a, v.grid, side)
    return SampledFunction(v.grid, cumulative_integral(v.values * b_inv_sq, v.grid))


def op_D(u: SampledFunction, a: Impedance, side: str = "direct", derivative=None) -> SampledFunction:
    """``D_b u = b^2 u'``.

    ``derivative`` may supply exact nodal values of ``u'``; otherwise the
    fourth order stencil is used.
    """
    b_sq, _ = weight_on(a, u.grid, side)
    du = stencil_derivative(u.values, u.grid) if derivative is None else np.asarray(derivative)
    return SampledFunction(u.grid, b_sq * du)


def op_R(v: SampledFunction, a: Impedance) -> SampledFunction:
    """``R_a v = J_a J_{1/a} v``, a right inverse of ``L_a``."""
    return op_J(op_J(v, a, "reciprocal"), a, "direct")


def op_L(u: SampledFunction, a: Impedance) -> SampledFunction:
    """``L_a u = D_{1/a} D_a u = a^{-2} (a^2 u')'`` by nested stencils."""
    return op_D(op_D(u, a, "direct"), a, "reciprocal")
