"""Impedance functions and the catalog of named impedances.

An :class:`Impedance` stores callables for ``a`` and ``1/a`` side by side,
so that :func:`reciprocal_impedance` only swaps them.  Applying the swap
twice returns the original callables, which makes the formal powers of
``1/a`` exactly the reciprocal family of ``a``.

Catalog identifiers
-------------------
``unit``            a = 1
``affine``          a = 1 + x
``exp:<c>``         a = exp(c x)
``file:<path>``     two column CSV ``x, a``, shape preserving cubic interpolant
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigurationError, InvalidImpedanceError
from .grid import Grid, quadrature_weights

__all__ = [
    "Impedance",
    "ProperCertificate",
    "unit_impedance",
    "affine_impedance",
    "exponential_impedance",
    "sampled_impedance",
    "function_impedance",
    "impedance_from_id",
    "reciprocal_impedance",
    "validate_proper",
]

#: kinds for which the reference oracle knows closed form solutions
CLOSED_FORM_KINDS = ("unit", "affine", "affine_reciprocal", "exponential")

_RECIPROCAL_KIND = {
    "unit": "unit",
    "affine": "affine_reciprocal",
    "affine_reciprocal": "affine",
    "exponential": "exponential",
    "sampled": "sampled",
    "function": "function",
}


@dataclass(frozen=True, eq=False)
class Impedance:
    """A positive weight ``a`` together with its reciprocal.

    Attributes
    ----------
    kind : str
        One of ``unit``, ``affine``, ``affine_reciprocal``, ``exponential``,
        ``sampled`` or ``function``.
    a, a_inv : callable
        Vectorised evaluations of ``a`` and ``1/a``.
    da, da_inv : callable or None
        Analytic derivatives of ``a`` and ``1/a`` when known.
    param : float
        The rate ``c`` for ``exponential``; unused otherwise.
    label : str
        Human readable identifier, e.g. ``"exp:1"``.
    support : tuple or None
        Interval on which a sampled impedance is defined.
    """

    kind: str
    a: Callable
    a_inv: Callable
    da: Optional[Callable] = None
    da_inv: Optional[Callable] = None
    param: float = 0.0
    label: str = ""
    support: Optional[tuple] = None

    def a_sq(self, x):
        return np.asarray(self.a(x)) ** 2

    def a_inv_sq(self, x):
        return np.asarray(self.a_inv(x)) ** 2

    def derivative(self, x, grid: Grid | None = None):
        """``a'(x)``; uses the analytic derivative when present.

        Without one a centred difference is used.
        """
        x = np.asarray(x, dtype=float)
        if self.da is not None:
            return np.asarray(self.da(x)) + 0.0 * x
        eps = 1e-5 * np.maximum(1.0, np.abs(x))
        return (np.asarray(self.a(x + eps)) - np.asarray(self.a(x - eps))) / (2 * eps)

    @property
    def has_closed_form(self) -> bool:
        return self.kind in CLOSED_FORM_KINDS

    def reciprocal(self) -> "Impedance":
        return reciprocal_impedance(self)

    def __repr__(self):
        return f"Impedance({self.label or self.kind})"


@dataclass(frozen=True)
class ProperCertificate:
    """Squared ``L^2`` norms of ``a`` and ``1/a`` on a grid."""

    norm_a_sq: float
    norm_ainv_sq: float
    positive: bool

    @property
    def norm_a_L2(self) -> float:
        return float(np.sqrt(self.norm_a_sq))

    @property
    def norm_ainv_L2(self) -> float:
        return float(np.sqrt(self.norm_ainv_sq))


def _ones(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _zeros(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def unit_impedance() -> Impedance:
    return Impedance("unit", _ones, _ones, _zeros, _zeros, label="unit")


def affine_impedance() -> Impedance:
    """``a(x) = 1 + x``, positive for ``x > -1``."""
    return Impedance(
        "affine",
        lambda x: 1.0 + np.asarray(x, dtype=float),
        lambda x: 1.0 / (1.0 + np.asarray(x, dtype=float)),
        _ones,
        lambda x: -1.0 / (1.0 + np.asarray(x, dtype=float)) ** 2,
        label="affine",
    )


def exponential_impedance(c: float = 1.0) -> Impedance:
    """``a(x) = exp(c x)``."""
    c = float(c)
    return Impedance(
        "exponential",
        lambda x: np.exp(c * np.asarray(x, dtype=float)),
        lambda x: np.exp(-c * np.asarray(x, dtype=float)),
        lambda x: c * np.exp(c * np.asarray(x, dtype=float)),
        lambda x: -c * np.exp(-c * np.asarray(x, dtype=float)),
        param=c,
        label=f"exp:{c:g}",
    )


def sampled_impedance(xs, values, label: str = "sampled") -> Impedance:
    """Impedance interpolating ``(xs, values)``.

    The interpolant is the piecewise cubic Hermite (PCHIP) one: continuously
    differentiable, and on every cell it stays between the neighbouring
    samples, so positive data give a positive impedance.  Its derivative is
    exact.
    """
    xs = np.asarray(xs, dtype=float)
    vs = np.asarray(values, dtype=float)
    if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2:
        raise InvalidImpedanceError("sampled impedance needs matching 1-D arrays")
    order = np.argsort(xs)
    xs, vs = xs[order], vs[order]
    if np.any(np.diff(xs) <= 0):
        raise InvalidImpedanceError("sample abscissae must be distinct")
    if not np.all(np.isfinite(vs)) or np.any(vs <= 0):
        raise InvalidImpedanceError("impedance samples must be finite and positive")
    p = PchipInterpolator(xs, vs, extrapolate=False)
    dp = p.derivative()
    return Impedance(
        "sampled",
        p,
        lambda x: 1.0 / p(x),
        dp,
        lambda x: -dp(x) / p(x) ** 2,
        label=label,
        support=(float(xs[0]), float(xs[-1])),
    )


def function_impedance(a: Callable, da: Callable | None = None, label: str = "function") -> Impedance:
    """Impedance from a user supplied vectorised callable."""

    def a_inv(x):
        return 1.0 / np.asarray(a(x))

    da_inv = None
    if da is not None:
        def da_inv(x):
            return -np.asarray(da(x)) / np.asarray(a(x)) ** 2

    return Impedance("function", a, a_inv, da, da_inv, label=label)


def _load_csv(path: str) -> Impedance:
    p = Path(path)
    if not p.is_file():
        raise InvalidImpedanceError(f"impedance file not found: {path}")
    rows = []
    with p.open(newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except (ValueError, IndexError):
                if rows:
                    raise InvalidImpedanceError(f"malformed row in {path}: {rec}")
                # header line
    if len(rows) < 2:
        raise InvalidImpedanceError(f"{path} holds fewer than two samples")
    xs, vs = zip(*rows)
    return sampled_impedance(xs, vs, label=f"file:{path}")


def impedance_from_id(ident: str) -> Impedance:
    """Build an impedance from a catalog identifier."""
    if not isinstance(ident, str):
        raise InvalidImpedanceError(f"impedance id must be a string, got {ident!r}")
    ident = ident.strip()
    if ident == "unit":
        return unit_impedance()
    if ident == "affine":
        return affine_impedance()
    if ident.startswith("exp:"):
        try:
            c = float(ident[4:])
        except ValueError:
            raise InvalidImpedanceError(f"bad exponential rate in {ident!r}") from None
        if not np.isfinite(c):
            raise InvalidImpedanceError(f"bad exponential rate in {ident!r}")
        return exponential_impedance(c)
    if ident.startswith("file:"):
        return _load_csv(ident[5:])
    raise InvalidImpedanceError(f"unknown impedance id {ident!r}")


def reciprocal_impedance(a: Impedance) -> Impedance:
    """The impedance ``1/a``; an involution on the stored callables."""
    rec = Impedance(
        _RECIPROCAL_KIND[a.kind],
        a.a_inv,
        a.a,
        a.da_inv,
        a.da,
        param=-a.param if a.kind == "exponential" else a.param,
        label=_reciprocal_label(a.label),
        support=a.support,
    )
    return rec


def _reciprocal_label(label: str) -> str:
    if label.startswith("1/(") and label.endswith(")"):
        return label[3:-1]
    return f"1/({label})"


def validate_proper(a: Impedance, grid: Grid) -> ProperCertificate:
    """Check positivity and square integrability of ``a`` and ``1/a`` on a grid.

    Raises
    ------
    InvalidImpedanceError
        If ``a`` is non-positive or non-finite at a node, or the grid leaves
        the support of a sampled impedance.
    """
    x = grid.nodes
    if a.support is not None:
        lo, hi = a.support
        span = hi - lo
        if x[0] < lo - 1e-12 * span or x[-1] > hi + 1e-12 * span:
            raise InvalidImpedanceError(
                f"grid [{x[0]:g}, {x[-1]:g}] leaves the sampled support [{lo:g}, {hi:g}]"
            )
    with np.errstate(all="ignore"):
        av = np.asarray(a.a(x), dtype=float) + 0.0 * x
    if not np.all(np.isfinite(av)):
        raise InvalidImpedanceError(f"impedance {a.label} is not finite on the grid")
    if np.any(av <= 0):
        bad = x[np.argmax(av <= 0)]
        raise InvalidImpedanceError(f"impedance {a.label} is not positive at x={bad:g}")
    w = quadrature_weights(grid)
    return ProperCertificate(float(w @ av**2), float(w @ av**-2), True)
