"""Formal powers of an impedance and the generalized derivatives.

The two families are built together by the interleaved recursion

    phi_a^(0) = phi_{1/a}^(0) = 1,
    phi_a^(k) = k J_a[phi_{1/a}^(k-1)],   phi_{1/a}^(k) = k J_{1/a}[phi_a^(k-1)],

so that ``D_a phi_a^(k) = k phi_{1/a}^(k-1)`` and
``phi_a^(k) = k (k-1) R_a phi_a^(k-2)``.  For ``a = 1`` both families are
the monomials ``(x - x0)^k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grid import Grid, SampledFunction, cumulative_integral
from .impedance import Impedance, reciprocal_impedance, validate_proper
from .operators import op_D, op_J, weight_on

__all__ = [
    "FormalPowerTable",
    "FormalPolynomial",
    "build_formal_powers",
    "generalized_derivative",
    "generalized_integral",
    "taylor_expand",
    "required_order",
    "perturbation_convergence_check",
]

MAX_ORDER = 160


def _side(j: int) -> str:
    """Side of the ``j``-th factor (0-based) of an alternating product."""
    return "direct" if j % 2 == 0 else "reciprocal"


@dataclass(frozen=True, eq=False)
class FormalPowerTable:
    """Formal powers ``phi_a^(k)`` and ``phi_{1/a}^(k)`` for ``k <= K``.

    Attributes
    ----------
    impedance : Impedance
    grid : Grid
    direct, reciprocal : ndarray, shape (K + 1, n)
        Rows ``k`` hold ``phi_a^(k)`` and ``phi_{1/a}^(k)`` on the nodes.
    """

    impedance: Impedance
    grid: Grid
    direct: np.ndarray
    reciprocal: np.ndarray

    @property
    def K(self) -> int:
        return self.direct.shape[0] - 1

    def phi(self, k: int, side: str = "direct") -> SampledFunction:
        if not 0 <= k <= self.K:
            raise ConfigurationError(f"formal power {k} not in table of order {self.K}")
        rows = self.direct if side == "direct" else self.reciprocal
        return SampledFunction(self.grid, rows[k])

    def family(self, side: str) -> np.ndarray:
        """``direct`` for ``side='direct'``, ``reciprocal`` otherwise."""
        return self.direct if side == "direct" else self.reciprocal

    def swapped(self) -> "FormalPowerTable":
        """The table of ``1/a``, obtained by swapping the families."""
        return FormalPowerTable(
            reciprocal_impedance(self.impedance), self.grid, self.reciprocal, self.direct
        )


def build_formal_powers(a: Impedance, grid: Grid, K: int = 40) -> FormalPowerTable:
    """Build both families of formal powers up to order ``K``.

    Parameters
    ----------
    a : Impedance
    grid : Grid
        Its anchor is the base point ``x0`` of all integrals.
    K : int
        Highest order; ``0 <= K <= 160``.
    """
    K = int(K)
    if K < 0 or K > MAX_ORDER:
        raise ConfigurationError(f"order K={K} outside 0..{MAX_ORDER}")
    validate_proper(a, grid)
    a_sq, a_inv_sq = weight_on(a, grid)
    n = grid.size
    direct = np.empty((K + 1, n))
    recip = np.empty((K + 1, n))
    direct[0] = recip[0] = 1.0
    for k in range(1, K + 1):
        direct[k] = k * cumulative_integral(recip[k - 1] * a_inv_sq, grid)
        recip[k] = k * cumulative_integral(direct[k - 1] * a_sq, grid)
    direct.flags.writeable = False
    recip.flags.writeable = False
    return FormalPowerTable(a, grid, direct, recip)


def generalized_derivative(u: SampledFunction, m: int, a: Impedance) -> SampledFunction:
    """``D_a^(m) u``: apply ``D_a``, then ``D_{1/a}``, alternating, ``m`` times."""
    if m < 0:
        raise ConfigurationError("derivative order must be non-negative")
    for j in range(m):
        u = op_D(u, a, _side(j))
    return u


def generalized_integral(v: SampledFunction, m: int, a: Impedance) -> SampledFunction:
    """``J_a^(m) v``, the right inverse of ``D_a^(m)`` vanishing to order ``m`` at ``x0``.

    The innermost factor is ``J_{a^{(-1)^(m-1)}}`` and the outermost
    ``J_a``, so that ``D_a^(m) J_a^(m) = I`` and ``J_a^(m)[1] = phi_a^(m)/m!``.
    """
    if m < 0:
        raise ConfigurationError("integral order must be non-negative")
    for j in reversed(range(m)):
        v = op_J(v, a, _side(j))
    return v


def taylor_expand(u: SampledFunction, m: int, a: Impedance):
    """Generalized Taylor expansion of order ``m`` about the anchor.

    Returns
    -------
    coefficients : ndarray, shape (m,)
        ``c_k = D_a^(k) u(x0) / k!`` for ``k < m``.
    remainder : SampledFunction
        ``u - sum_k c_k phi_a^(k)``, which equals ``J_a^(m)[D_a^(m) u]``.
    """
    if m < 1:
        raise ConfigurationError("Taylor order must be at least 1")
    table = build_formal_powers(a, u.grid, m)
    coeffs = np.empty(m, dtype=u.values.dtype if u.is_complex else float)
    d = u
    for k in range(m):
        coeffs[k] = d.at_anchor() / math.factorial(k)
        d = op_D(d, a, _side(k))
    poly = coeffs @ table.direct[:m]
    return coeffs, u - poly


@dataclass(frozen=True, eq=False)
class FormalPolynomial:
    """``sum_k coefficients[k] * phi^(k)`` over one family of a table."""

    coefficients: np.ndarray
    table: FormalPowerTable
    side: str = "direct"

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self) -> SampledFunction:
        c = np.asarray(self.coefficients)
        rows = self.table.family(self.side)[: c.size]
        return SampledFunction(self.table.grid, c @ rows)


def required_order(z: float, tol: float = 1e-17) -> int:
    """Smallest ``k`` past the peak of ``z^k/k!`` where the term drops below
    ``tol`` times the peak term.

    This bounds the number of formal powers needed by a power series in
    ``rho`` when ``|rho| * radius = z``.
    """
    z = abs(float(z))
    if z == 0.0:
        return 2
    peak_k = int(math.floor(z))
    log_peak = peak_k * math.log(z) - math.lgamma(peak_k + 1) if peak_k > 0 else 0.0
    log_ref = max(0.0, log_peak)
    k = max(peak_k, 1)
    while k * math.log(z) - math.lgamma(k + 1) > log_ref + math.log(tol):
        k += 1
    return k


def perturbation_convergence_check(a_seq, a_limit: Impedance, grid: Grid, K: int = 6):
    """Formal powers of a sequence of impedances against those of the limit.

    Returns
    -------
    dict
        ``deviation[n][k]`` is ``max(|phi_{a_n}^(k) - phi_a^(k)|,
        |phi_{1/a_n}^(k) - phi_{1/a}^(k)|)`` in the sup norm;
        ``input_deviation[n]`` is ``max(||a_n^2 - a^2||_1, ||a_n^-2 - a^-2||_1)``
        and ``ratio[n][k]`` the quotient of the two.
    """
    from .grid import quadrature_weights

    ref = build_formal_powers(a_limit, grid, K)
    w = quadrature_weights(grid)
    a_sq, a_inv_sq = weight_on(a_limit, grid)
    deviation, input_dev, ratio = [], [], []
    for an in a_seq:
        t = build_formal_powers(an, grid, K)
        dev = np.maximum(
            np.max(np.abs(t.direct - ref.direct), axis=1),
            np.max(np.abs(t.reciprocal - ref.reciprocal), axis=1),
        )
        bn_sq, bn_inv_sq = weight_on(an, grid)
        din = max(float(w @ np.abs(bn_sq - a_sq)), float(w @ np.abs(bn_inv_sq - a_inv_sq)))
        deviation.append(dev)
        input_dev.append(din)
        ratio.append(dev / din if din > 0 else np.zeros_like(dev))
    return {
        "deviation": np.array(deviation),
        "input_deviation": np.array(input_dev),
        "ratio": np.array(ratio),
    }
