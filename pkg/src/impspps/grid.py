"""Grids, sampled functions and the low level quadrature and stencils.

Everything in the package is evaluated on a :class:`Grid`, an ordered set
of nodes on a closed interval with one distinguished node, the anchor
``x0``, from which all integral operators start.  Values live in
:class:`SampledFunction` objects which refuse to mix grids.

The cumulative integral uses a fourth order rule on uniform grids: every
cell ``[x_i, x_{i+1}]`` is integrated exactly for the cubic through the
four nearest nodes.  Non-uniform grids fall back to the trapezoid rule.
Derivatives use five point fourth order stencils (one sided near the
ends) on uniform grids and second order ``numpy.gradient`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, GridMismatchError

__all__ = [
    "Grid",
    "SampledFunction",
    "cumulative_integral",
    "quadrature_weights",
    "stencil_derivative",
]

_UNIFORM_RTOL = 1e-9


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Grid:
    """Ordered nodes on ``[l1, l2]`` with an anchor node ``x0``.

    Parameters
    ----------
    nodes : array_like
        Strictly increasing node coordinates.
    anchor_index : int
        Index of the node used as base point of all integrals.
    """

    nodes: np.ndarray
    anchor_index: int = 0
    uniform: bool = field(init=False)
    step: float = field(init=False)

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise ConfigurationError("a grid needs at least 3 nodes")
        if not np.all(np.isfinite(x)):
            raise ConfigurationError("grid nodes must be finite")
        dx = np.diff(x)
        if np.any(dx <= 0):
            raise ConfigurationError("grid nodes must be strictly increasing")
        if not 0 <= self.anchor_index < x.size:
            raise ConfigurationError("anchor index outside the grid")
        h = (x[-1] - x[0]) / (x.size - 1)
        uniform = bool(np.all(np.abs(dx - h) <= _UNIFORM_RTOL * h))
        object.__setattr__(self, "nodes", _frozen(x))
        object.__setattr__(self, "uniform", uniform)
        object.__setattr__(self, "step", float(h))

    @classmethod
    def uniform_grid(cls, l1: float, l2: float, n: int = 2001, x0: float | None = None) -> "Grid":
        """Uniform grid with ``n`` nodes; ``x0`` defaults to ``l1``.

        ``x0`` must fall on a node (up to ``1e-9`` of a step); the node is
        then set to exactly ``x0``.
        """
        if not (np.isfinite(l1) and np.isfinite(l2)) or l2 <= l1:
            raise ConfigurationError(f"invalid interval ({l1}, {l2})")
        n = int(n)
        if n < 3:
            raise ConfigurationError("a grid needs at least 3 nodes")
        x = np.linspace(l1, l2, n)
        if x0 is None:
            x0 = l1
        h = (l2 - l1) / (n - 1)
        j = int(round((x0 - l1) / h))
        if not 0 <= j < n or abs(x[j] - x0) > 1e-9 * h:
            raise ConfigurationError(f"x0={x0} is not a node of the grid")
        x[j] = x0
        return cls(x, j)

    @property
    def x0(self) -> float:
        return float(self.nodes[self.anchor_index])

    @property
    def l1(self) -> float:
        return float(self.nodes[0])

    @property
    def l2(self) -> float:
        return float(self.nodes[-1])

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def radius(self) -> float:
        """Largest distance from the anchor to an endpoint."""
        return max(self.x0 - self.l1, self.l2 - self.x0)

    def with_anchor(self, x0: float) -> "Grid":
        """Same nodes, anchored at the node closest to ``x0``."""
        j = int(np.argmin(np.abs(self.nodes - x0)))
        tol = 1e-9 * (self.l2 - self.l1) / (self.size - 1)
        if abs(self.nodes[j] - x0) > tol:
            raise ConfigurationError(f"x0={x0} is not a node of the grid")
        return Grid(self.nodes, j)

    def same_as(self, other: "Grid") -> bool:
        return self is other or (
            self.anchor_index == other.anchor_index
            and self.nodes.shape == other.nodes.shape
            and bool(np.array_equal(self.nodes, other.nodes))
        )

    def sample(self, f: Callable, dtype=None) -> "SampledFunction":
        """Evaluate a vectorised callable on the nodes."""
        vals = np.asarray(f(self.nodes))
        if vals.shape == ():
            vals = np.full(self.size, vals)
        if dtype is not None:
            vals = vals.astype(dtype)
        return SampledFunction(self, vals)

    def constant(self, c=1.0) -> "SampledFunction":
        return SampledFunction(self, np.full(self.size, c))

    def __repr__(self):
        kind = "uniform" if self.uniform else "non-uniform"
        return f"Grid([{self.l1:g}, {self.l2:g}], n={self.size}, x0={self.x0:g}, {kind})"


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values of a real or complex function on the nodes of a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.size,):
            raise ConfigurationError(
                f"expected {self.grid.size} values, got shape {v.shape}"
            )
        if not np.issubdtype(v.dtype, np.complexfloating):
            v = v.astype(float)
        object.__setattr__(self, "values", _frozen(v))

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def is_complex(self) -> bool:
        return np.issubdtype(self.values.dtype, np.complexfloating)

    def at_anchor(self):
        return self.values[self.grid.anchor_index]

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _other(self, other):
        if isinstance(other, SampledFunction):
            if not self.grid.same_as(other.grid):
                raise GridMismatchError("sampled functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return SampledFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return SampledFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return SampledFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return SampledFunction(self.grid, self.values / self._other(other))

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)

    def real(self) -> "SampledFunction":
        return SampledFunction(self.grid, self.values.real)

    def restrict(self, grid: Grid) -> "SampledFunction":
        """Values on a grid whose nodes are a subset of this grid's nodes."""
        x = self.grid.nodes
        idx = np.searchsorted(x, grid.nodes)
        idx = np.clip(idx, 0, x.size - 1)
        left = np.clip(idx - 1, 0, x.size - 1)
        pick = np.where(np.abs(x[left] - grid.nodes) < np.abs(x[idx] - grid.nodes), left, idx)
        tol = 1e-9 * (x[-1] - x[0]) / (x.size - 1)
        if np.any(np.abs(x[pick] - grid.nodes) > tol):
            raise GridMismatchError("target grid nodes are not nodes of the source grid")
        return SampledFunction(grid, self.values[pick])

    def __repr__(self):
        return f"SampledFunction({self.grid!r}, sup={self.sup_norm():.3e})"


def _cell_increments(f: np.ndarray, x: np.ndarray, uniform: bool) -> np.ndarray:
    """Integral of ``f`` over each cell ``[x_i, x_{i+1}]``."""
    n = f.shape[-1]
    if not uniform:
        return 0.5 * (f[..., 1:] + f[..., :-1]) * np.diff(x)
    h = (x[-1] - x[0]) / (n - 1)
    if n == 3:
        c0 = h / 12 * (5 * f[..., 0] + 8 * f[..., 1] - f[..., 2])
        c1 = h / 12 * (-f[..., 0] + 8 * f[..., 1] + 5 * f[..., 2])
        return np.stack([c0, c1], axis=-1)
    inc = np.empty(f.shape[:-1] + (n - 1,), dtype=np.result_type(f, float))
    inc[..., 0] = 9 * f[..., 0] + 19 * f[..., 1] - 5 * f[..., 2] + f[..., 3]
    inc[..., 1:-1] = 13 * (f[..., 1:-2] + f[..., 2:-1]) - (f[..., :-3] + f[..., 3:])
    inc[..., -1] = f[..., -4] - 5 * f[..., -3] + 19 * f[..., -2] + 9 * f[..., -1]
    return inc * (h / 24)


def cumulative_integral(f, grid: Grid) -> np.ndarray:
    """Signed integral ``int_{x0}^{x_i} f`` at every node.

    ``f`` may carry leading batch dimensions; the last axis runs over the
    nodes.
    """
    f = np.asarray(f)
    inc = _cell_increments(f, grid.nodes, grid.uniform)
    out = np.zeros(f.shape, dtype=inc.dtype)
    np.cumsum(inc, axis=-1, out=out[..., 1:])
    return out - out[..., grid.anchor_index : grid.anchor_index + 1]


def quadrature_weights(x) -> np.ndarray:
    """Weights ``w`` with ``sum(w * f) ~ int_{x[0]}^{x[-1]} f``.

    ``x`` is either a :class:`Grid` or an increasing array of nodes.  The
    weights sum the cell rule used by :func:`cumulative_integral`.
    """
    if isinstance(x, Grid):
        nodes, uniform = x.nodes, x.uniform
    else:
        nodes = np.asarray(x, dtype=float)
        h = (nodes[-1] - nodes[0]) / max(nodes.size - 1, 1)
        uniform = nodes.size > 2 and bool(
            np.all(np.abs(np.diff(nodes) - h) <= _UNIFORM_RTOL * abs(h))
        )
    n = nodes.size
    w = np.zeros(n)
    if n == 1:
        return w
    if not uniform or n == 2:
        dx = np.diff(nodes)
        w[:-1] += dx / 2
        w[1:] += dx / 2
        return w
    h = (nodes[-1] - nodes[0]) / (n - 1)
    if n == 3:
        return np.array([1.0, 4.0, 1.0]) * h / 3
    w[:4] += [9.0, 19.0, -5.0, 1.0]
    w[: n - 3] -= 1.0
    w[1 : n - 2] += 13.0
    w[2 : n - 1] += 13.0
    w[3:] -= 1.0
    w[n - 4 :] += [1.0, -5.0, 19.0, 9.0]
    return w * (h / 24)


_FWD = np.array(
    [[-25.0, 48.0, -36.0, 16.0, -3.0], [-3.0, -10.0, 18.0, -6.0, 1.0]]
)


def stencil_derivative(f, grid: Grid) -> np.ndarray:
    """First derivative of nodal values along the last axis."""
    f = np.asarray(f)
    n = f.shape[-1]
    if not grid.uniform or n < 5:
        return np.gradient(f, grid.nodes, axis=-1, edge_order=2)
    h = grid.step
    d = np.empty(f.shape, dtype=np.result_type(f, float))
    d[..., 2:-2] = (f[..., :-4] - 8 * f[..., 1:-3] + 8 * f[..., 3:-1] - f[..., 4:]) / (12 * h)
    head = f[..., :5]
    tail = f[..., -5:][..., ::-1]
    for row in range(2):
        d[..., row] = head @ _FWD[row] / (12 * h)
        d[..., n - 1 - row] = -(tail @ _FWD[row]) / (12 * h)
    return d
