"""The transmutation operator and its kernel.

For ``a(0) = 1`` the operator

    T_a u(x) = u(x) - int_{-x}^{x} K_a(x, t) u'(t) dt

maps ``x^k`` to ``phi_a^(k)`` (formal powers anchored at 0) and
``exp(i rho x)`` to ``e_a(rho, x)``.  The second relation gives the
kernel's Fourier transform in ``t`` on each slice ``x``:

    int_{-x}^{x} K(x, t) exp(i rho t) dt = (exp(i rho x) - e_a(rho, x)) / (i rho).

Kernel synthesis
----------------
On the slice ``|t| <= L = |x|`` the kernel is split into the ramp ``r``
joining its Goursat values ``K(x, -x) = 0`` and ``K(x, x) = 1 - 1/a(x)``,
plus a remainder vanishing at both ends.  The remainder is expanded in
the sine series ``sum_{n=1}^{2J} b_n sin(n pi (t + L) / (2 L))``, whose
coefficients are read off the transform at ``rho_n = n pi / (2 L)``:

    b_n = Im(i^n (F(rho_n) - r_hat(rho_n))) / L.

This samples the same band ``|rho| <= J pi / L`` as the exponential
series over ``rho_j = j pi / L``, but the odd periodic extension is
continuously differentiable, so the coefficients decay like ``n^-3`` and
the Goursat values hold exactly on every slice.

Integrating by parts twice shows the tail of the coefficients is led by
the curvature of the remainder at the slice ends,

    b_n ~ (g''(1) (-1)^n - g''(-1)) / theta_n^3,    theta_n = n pi / 2,

in the variable ``tau = t / L``.  Those two curvatures are fitted on the
upper half of the band and the cubic carrying them, whose sine
coefficients are exactly the displayed expression, is split off.  What
remains decays like ``n^-5``, which keeps ``d/dt`` accurate up to the
slice ends.

Every slice is sampled on the same grid ``t = L tau``, ``tau`` uniform in
``[-1, 1]``; ``d/dt`` is exact from the series and ``d/dx`` follows from
``d/dx K = d/dx kappa - sign(x) tau d/dt K`` with ``kappa(x, tau) = K(x, L tau)``
differentiated across slices by fourth order stencils.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import make_interp_spline

from .errors import (
    ConfigurationError,
    IterationLimitError,
    PreconditionError,
    StiffnessError,
)
from .formal_powers import build_formal_powers, generalized_derivative
from .grid import Grid, SampledFunction, quadrature_weights, stencil_derivative
from .impedance import Impedance, reciprocal_impedance, validate_proper
from .kernel_march import MarchedKernels, march_kernels
from .operators import op_D, op_J, op_L
from .oracle import closed_form_points

__all__ = [
    "TransmutationKernel",
    "KernelPair",
    "build_kernel",
    "build_kernel_pair",
    "apply_T",
    "apply_T_derivative",
    "apply_T_inverse",
    "check_goursat",
    "check_mapping_property",
    "check_transmutation_property",
    "check_kernel_relations",
    "kernel_l2_norm",
]


@dataclass(frozen=True, eq=False)
class TransmutationKernel:
    """Kernel ``K_a`` sampled slice by slice.

    Attributes
    ----------
    impedance : Impedance
    J : int
        Band parameter; ``2 J`` sine modes per slice.
    mode : str
        ``"triangle"`` (slices ``0 <= x <= l``) or ``"rectangle"``
        (``-l <= x <= l``).
    ell : float
    x : ndarray, shape (S,)
        Slice coordinates, uniform, containing 0.
    tau : ndarray, shape (M,)
        Normalised ``t`` grid in ``[-1, 1]``; slice ``s`` uses ``t = |x_s| tau``.
    coef : ndarray, shape (S, 2J)
        Sine coefficients of the remainder.
    left, right : ndarray, shape (S,)
        Ramp values ``K(x, -|x|)`` and ``K(x, |x|)``.
    cubic : ndarray, shape (S, 2)
        Coefficients ``(alpha, gamma)`` of the split off cubic
        ``alpha (tau^2 - 1) + gamma (tau^3 - tau)``.
    """

    impedance: Impedance
    J: int
    mode: str
    ell: float
    x: np.ndarray
    tau: np.ndarray
    coef: np.ndarray
    left: np.ndarray
    right: np.ndarray
    cubic: np.ndarray

    @property
    def half_width(self) -> np.ndarray:
        return np.abs(self.x)

    @property
    def orientation(self) -> np.ndarray:
        """``sign(x)``: ``int_{-x}^{x} = sign(x) int_{-|x|}^{|x|}``."""
        return np.sign(self.x)

    @cached_property
    def x_grid(self) -> Grid:
        """The slice coordinates as a grid anchored at 0."""
        return Grid(self.x, int(np.argmin(np.abs(self.x))))

    @cached_property
    def tau_weights(self) -> np.ndarray:
        return quadrature_weights(self.tau)

    @cached_property
    def _modes(self):
        n = np.arange(1, 2 * self.J + 1)
        phase = np.outer(self.tau + 1.0, n) * (np.pi / 2)
        return n, np.sin(phase), np.cos(phase)

    @cached_property
    def values(self) -> np.ndarray:
        """``K(x_s, |x_s| tau_m)``, shape (S, M)."""
        _, sin, _ = self._modes
        ramp = self.left[:, None] + np.outer(self.right - self.left, (self.tau + 1.0) / 2)
        return ramp + _cubic(self.cubic, self.tau) + self.coef @ sin.T

    @cached_property
    def dt_values(self) -> np.ndarray:
        """``dK/dt`` on the slice grid."""
        n, _, cos = self._modes
        L = self.half_width
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.where(L > 0, (self.right - self.left) / (2 * L), 0.0)
            rate = np.where(L[:, None] > 0, (np.pi / 2) * n[None, :] / L[:, None], 0.0)
            inv = np.where(L > 0, 1.0 / L, 0.0)
        d = slope[:, None] + (self.coef * rate) @ cos.T
        d += inv[:, None] * _cubic(self.cubic, self.tau, derivative=True)
        # the slice x = 0 is a single point; take the limit of its neighbours
        c = int(np.argmin(L))
        if L[c] == 0:
            ends = []
            if c + 3 < L.size:
                ends.append(3 * d[c + 1] - 3 * d[c + 2] + d[c + 3])
            if c >= 3:
                ends.append(3 * d[c - 1] - 3 * d[c - 2] + d[c - 3])
            if ends:
                d[c] = np.mean(ends, axis=0)
        return d

    @cached_property
    def dx_values(self) -> np.ndarray:
        """``dK/dx`` on the slice grid."""
        kappa = self.values
        dk = np.zeros_like(kappa)
        # kappa has a kink in x at 0, so each side is differentiated alone
        for side in (self.x <= 0, self.x >= 0):
            if np.count_nonzero(side) >= 3:
                dk[side] = stencil_derivative(kappa[side].T, Grid(self.x[side])).T
        # at x = 0 the last stencil written is the one from the right
        side = np.where(self.x >= 0, 1.0, -1.0)
        return dk - side[:, None] * self.tau[None, :] * self.dt_values

    def evaluate(self, s: int, t) -> np.ndarray:
        """``K(x_s, t)`` at arbitrary ``|t| <= |x_s|``."""
        L = self.half_width[s]
        t = np.asarray(t, dtype=float)
        if L == 0:
            return np.zeros_like(t)
        tau = t / L
        n = np.arange(1, 2 * self.J + 1)
        ramp = self.left[s] + (self.right[s] - self.left[s]) * (tau + 1) / 2
        ramp = ramp + _cubic(self.cubic[s : s + 1], np.atleast_1d(tau))[0].reshape(tau.shape)
        return ramp + np.sin(np.multiply.outer(tau + 1, n) * (np.pi / 2)) @ self.coef[s]


def _cubic(cubic: np.ndarray, tau: np.ndarray, derivative: bool = False) -> np.ndarray:
    """``alpha (tau^2 - 1) + gamma (tau^3 - tau)`` (or its ``tau`` derivative), shape (S, M)."""
    alpha, gamma = cubic[:, 0:1], cubic[:, 1:2]
    if derivative:
        return alpha * (2 * tau) + gamma * (3 * tau**2 - 1)
    return alpha * (tau**2 - 1) + gamma * (tau**3 - tau)


def _split_cubic(coef: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fit the endpoint curvatures to the coefficient tail and remove their cubic.

    Returns the reduced coefficients and ``(alpha, gamma)`` per slice.
    """
    n = np.arange(1, coef.shape[1] + 1)
    theta = n * np.pi / 2
    sgn = (-1.0) ** n
    tail = n > coef.shape[1] // 2
    basis = np.stack([sgn / theta**3, -1.0 / theta**3, sgn / theta**5, -1.0 / theta**5], axis=1)
    fit, *_ = np.linalg.lstsq(basis[tail], coef[:, tail].T, rcond=None)
    up, lo = fit[0], fit[1]
    beta = np.outer(up, basis[:, 0]) + np.outer(lo, basis[:, 1])
    cubic = np.stack([(up + lo) / 4, (up - lo) / 12], axis=1)
    return coef - beta, cubic


@dataclass(frozen=True, eq=False)
class KernelPair:
    """Kernels of ``a`` and ``1/a`` built with the same parameters."""

    direct: TransmutationKernel
    reciprocal: TransmutationKernel
    refine: int = 2

    @property
    def impedance(self) -> Impedance:
        return self.direct.impedance

    @cached_property
    def marched(self) -> MarchedKernels:
        """Both kernels on the full square by the characteristic march."""
        k = self.direct
        n_half = int(np.sum(k.x > 0))
        return march_kernels(k.impedance, k.ell, self.refine * n_half)


def _slice_coordinates(mode: str, ell: float, slices: int) -> np.ndarray:
    if mode == "triangle":
        return np.linspace(0.0, ell, slices)
    if mode == "rectangle":
        return np.linspace(-ell, ell, 2 * slices - 1)
    raise ConfigurationError(f"mode must be 'triangle' or 'rectangle', got {mode!r}")


def _exp_solution_values(a: Impedance, x: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """``e_a(rho[s, n], x[s])`` with data at 0."""
    if a.has_closed_form:
        u, _ = closed_form_points(a, rho**2, 1.0, 1j * rho, x[:, None], 0.0)
        return np.asarray(u)
    return _exp_solution_ode(a, x, rho)


def _exp_solution_ode(a: Impedance, x: np.ndarray, rho: np.ndarray, rtol: float = 1e-11,
                      band: int = 32) -> np.ndarray:
    """Batched reference integration in the scaled variable ``sigma = t / x``.

    In ``sigma`` the mode ``rho[s, n] x[s]`` oscillates at a rate that does
    not depend on the slice, so columns are integrated in bands of ``band``
    modes, each band with the step size its fastest mode needs.
    """
    out = np.ones(rho.shape, dtype=complex)
    live = x != 0
    for lo in range(0, rho.shape[1], band):
        cols = slice(lo, min(lo + band, rho.shape[1]))
        out[live, cols] = _exp_band(a, x[live], rho[live][:, cols], rtol)
    return out


def _exp_band(a: Impedance, x: np.ndarray, rho: np.ndarray, rtol: float) -> np.ndarray:
    xf = (x[:, None] * np.ones((1, rho.shape[1]))).ravel()
    lam = (rho**2).ravel()
    m = xf.size

    def rhs(sig, y):
        u = y[:m] + 1j * y[m : 2 * m]
        v = y[2 * m : 3 * m] + 1j * y[3 * m :]
        asq = np.asarray(a.a_sq(xf * sig), dtype=float)
        du = xf * v / asq
        dv = -xf * lam * asq * u
        return np.concatenate([du.real, du.imag, dv.real, dv.imag])

    u1 = 1j * rho.ravel()
    y0 = np.concatenate([np.ones(m), np.zeros(m), u1.real, u1.imag])
    # v = D_a u scales like rho
    vs = np.maximum(1.0, np.abs(rho.ravel()))
    atol = 1e-13 * np.concatenate([np.ones(2 * m), vs, vs])
    sol = solve_ivp(rhs, (0.0, 1.0), y0, method="DOP853", t_eval=[1.0], rtol=rtol, atol=atol)
    if sol.status != 0:
        raise StiffnessError(f"kernel integrator failed: {sol.message}")
    y = sol.y[:, -1]
    return (y[:m] + 1j * y[m : 2 * m]).reshape(rho.shape)


def _ramp_transform(left, right, L, rho):
    """Fourier transform over ``[-L, L]`` of the ramp from ``left`` to ``right``."""
    beta = (right - left) / (2 * L)
    e1 = np.exp(-1j * rho * L)
    e2 = np.exp(2j * rho * L)
    const = left * 2 * np.sin(rho * L) / rho
    lin = beta * e1 * (2 * L * e2 / (1j * rho) + (e2 - 1) / rho**2)
    return const + lin


def build_kernel(a: Impedance, J: int = 128, slices: int = 201, mode: str = "triangle",
                 ell: float = 1.0, tau_points: int | None = None) -> TransmutationKernel:
    """Build ``K_a`` on the triangle ``0 <= |t| <= x <= l`` or the full diamond.

    Parameters
    ----------
    a : Impedance
        Must satisfy ``a(0) = 1`` and be positive on ``[-ell, ell]``.
    J : int
        Band parameter, at least 4.
    slices : int
        Number of slices on ``[0, ell]``; rectangle mode mirrors them.
    mode : {"triangle", "rectangle"}
    tau_points : int, optional
        Points of the normalised ``t`` grid, ``8 J + 1`` by default.
    """
    J = int(J)
    if J < 4:
        raise ConfigurationError("J must be at least 4")
    if slices < 5:
        raise ConfigurationError("at least 5 slices are needed")
    if not ell > 0:
        raise ConfigurationError("ell must be positive")
    x = _slice_coordinates(mode, float(ell), int(slices))
    validate_proper(a, Grid(x))
    if abs(float(a.a(0.0)) - 1.0) > 1e-12:
        raise PreconditionError("the transmutation kernel needs a(0) = 1")
    M = int(tau_points) if tau_points else 8 * J + 1
    if M < 5 or M % 2 == 0:
        raise ConfigurationError("tau_points must be odd and at least 5")
    tau = np.linspace(-1.0, 1.0, M)
    L = np.abs(x)
    A = 1.0 - np.asarray(a.a_inv(x), dtype=float) * np.ones_like(x)
    left = np.where(x < 0, A, 0.0)
    right = np.where(x > 0, A, 0.0)
    n = np.arange(1, 2 * J + 1)
    coef = np.zeros((x.size, 2 * J))
    live = L > 0
    Ll = L[live][:, None]
    rho = n[None, :] * np.pi / (2 * Ll)
    e = _exp_solution_values(a, x[live], rho)
    sgn = np.sign(x[live])[:, None]
    F = sgn * (np.exp(1j * rho * x[live][:, None]) - e) / (1j * rho)
    ghat = F - _ramp_transform(left[live][:, None], right[live][:, None], Ll, rho)
    coef[live] = np.imag((1j) ** n[None, :] * ghat) / Ll
    coef, cubic = _split_cubic(coef)
    for arr in (x, tau, coef, left, right, cubic):
        arr.flags.writeable = False
    return TransmutationKernel(a, J, mode, float(ell), x, tau, coef, left, right, cubic)


def build_kernel_pair(a: Impedance, J: int = 128, slices: int = 201, mode: str = "triangle",
                      ell: float = 1.0, refine: int = 2) -> KernelPair:
    """Kernels of ``a`` and ``1/a`` on the same slices."""
    k1 = build_kernel(a, J, slices, mode, ell)
    k2 = build_kernel(reciprocal_impedance(a), J, slices, mode, ell)
    return KernelPair(k1, k2, refine)


def _spline(u: SampledFunction):
    x = u.grid.nodes
    if u.is_complex:
        re = make_interp_spline(x, u.values.real, k=5)
        im = make_interp_spline(x, u.values.imag, k=5)
        return lambda t, nu=0: re(t, nu) + 1j * im(t, nu)
    sp = make_interp_spline(x, u.values, k=5)
    return lambda t, nu=0: sp(t, nu)


def _check_cover(kernel: TransmutationKernel, u: SampledFunction):
    reach = float(np.max(kernel.half_width))
    tol = 1e-12 * max(1.0, reach)
    if u.grid.l1 > -reach + tol or u.grid.l2 < reach - tol:
        raise ConfigurationError(
            f"the function must be sampled on [-{reach:g}, {reach:g}] to apply the kernel"
        )


def apply_T(kernel: TransmutationKernel, u: SampledFunction, du=None) -> SampledFunction:
    """``T u`` on the slice coordinates.

    ``u`` is sampled on a grid covering ``[-l, l]``; ``u'`` is taken from its
    quintic spline unless ``du`` (a callable) is given.
    """
    _check_cover(kernel, u)
    sp = _spline(u)
    if du is None:
        du = lambda t: sp(t, 1)  # noqa: E731
    L = kernel.half_width
    t = L[:, None] * kernel.tau[None, :]
    integrand = kernel.values * du(t)
    integral = kernel.orientation * L * (integrand @ kernel.tau_weights)
    return SampledFunction(kernel.x_grid, sp(kernel.x) - integral)


def apply_T_derivative(kernel: TransmutationKernel, u: SampledFunction) -> SampledFunction:
    """``d/dx (T u) = u'(x)/a(x) - int_{-x}^{x} dK/dx(x, t) u'(t) dt``."""
    _check_cover(kernel, u)
    sp = _spline(u)
    L = kernel.half_width
    t = L[:, None] * kernel.tau[None, :]
    integral = kernel.orientation * L * ((kernel.dx_values * sp(t, 1)) @ kernel.tau_weights)
    a_inv = np.asarray(kernel.impedance.a_inv(kernel.x), dtype=float)
    return SampledFunction(kernel.x_grid, sp(kernel.x, 1) * a_inv - integral)


def kernel_l2_norm(kernel: TransmutationKernel) -> float:
    """``(int int K^2 dt dx)^(1/2)`` over the sampled region."""
    per_slice = kernel.half_width * (np.abs(kernel.values) ** 2 @ kernel.tau_weights)
    return float(np.sqrt(quadrature_weights(kernel.x) @ per_slice))


def check_goursat(kernel: TransmutationKernel) -> dict:
    """Deviation of the synthesised kernel from its Goursat data."""
    x = kernel.x
    target = 1.0 - np.asarray(kernel.impedance.a_inv(x), dtype=float)
    diag = np.array([kernel.evaluate(s, x[s])[()] if x[s] != 0 else 0.0 for s in range(x.size)])
    anti = np.array([kernel.evaluate(s, -x[s])[()] if x[s] != 0 else 0.0 for s in range(x.size)])
    target = np.where(x == 0, 0.0, target)
    return {
        "diagonal": float(np.max(np.abs(diag - target))),
        "antidiagonal": float(np.max(np.abs(anti))),
    }


def _fine_grid(kernel: TransmutationKernel, refine: int = 5) -> Grid:
    """Symmetric grid on ``[-l, l]`` anchored at 0 containing every slice."""
    n_half = int(np.sum(kernel.x > 0))
    return Grid.uniform_grid(-kernel.ell, kernel.ell, 2 * n_half * refine + 1, 0.0)


def check_mapping_property(kernel: TransmutationKernel, k_max: int = 6, refine: int = 5) -> np.ndarray:
    """Sup errors ``||T[x^k] - phi_a^(k)||`` on the slices for ``k <= k_max``."""
    fine = _fine_grid(kernel, refine)
    # the formal powers only need the impedance where the slices are
    lo = int(np.searchsorted(fine.nodes, kernel.x[0] - 1e-12))
    covered = fine.with_anchor(0.0) if lo == 0 else Grid(fine.nodes[lo:], fine.anchor_index - lo)
    table = build_formal_powers(kernel.impedance, covered, k_max)
    out = np.empty(k_max + 1)
    for k in range(k_max + 1):
        u = fine.sample(lambda x: x**k)
        Tu = apply_T(kernel, u)
        ref = table.phi(k).restrict(kernel.x_grid)
        out[k] = float(np.max(np.abs(Tu.values - ref.values)))
    return out


def check_transmutation_property(pair: KernelPair, u, refine: int = 5) -> dict:
    """Residuals of the intertwining identities for a test function.

    ``u`` is a vectorised callable.  Reported sup norms on the slices:

    ``D_a T_a u - T_{1/a} u'``,
    ``L_a T_a u - T_a u''``,
    ``J_a T_{1/a} u' + u(0) - T_a u``,
    ``D_a^(2) T_a u - T_a u''`` (through the generalized derivative), and
    ``d/dx T_a u`` from the kernel derivative against the stencil.
    """
    ka, kr = pair.direct, pair.reciprocal
    a = ka.impedance
    fine = _fine_grid(ka, refine)
    uf = fine.sample(u)
    sp = _spline(uf)
    d1 = SampledFunction(fine, sp(fine.nodes, 1))
    d2 = SampledFunction(fine, sp(fine.nodes, 2))
    Tu = apply_T(ka, uf)
    T1 = apply_T(kr, d1)
    T2 = apply_T(ka, d2)
    res = {
        "D_a T_a u - T_1/a u'": op_D(Tu, a) - T1,
        "L_a T_a u - T_a u''": op_L(Tu, a) - T2,
        "J_a T_1/a u' + u(0) - T_a u": op_J(T1, a) + float(np.real(sp(0.0))) - Tu,
        "D_a^(2) T_a u - T_a u''": generalized_derivative(Tu, 2, a) - T2,
        "dT/dx kernel vs stencil": apply_T_derivative(ka, uf)
        - SampledFunction(Tu.grid, stencil_derivative(Tu.values, Tu.grid)),
    }
    return {k: v.sup_norm() for k, v in res.items()}


def _lagrange_rows(pos: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Local cubic Lagrange weights at ``pos`` using nodes ``-m..m`` only."""
    p = min(4, 2 * m + 1)
    start = np.clip(np.floor(pos).astype(int) - 1, -m, m - p + 1)
    idx = start[:, None] + np.arange(p)[None, :]
    w = np.ones((pos.size, p))
    for j in range(p):
        for k in range(p):
            if k != j:
                w[:, j] *= (pos - idx[:, k]) / (idx[:, j] - idx[:, k])
    return idx, w


def _volterra_matrix(kernel: TransmutationKernel) -> np.ndarray:
    """``A`` with ``(A u)_s = a(x_s) int_{-x_s}^{x_s} dK/dt(x_s, t) u(t) dt``."""
    x = kernel.x
    S = x.size
    c = int(np.argmin(np.abs(x)))
    H = x[1] - x[0]
    a_vals = np.asarray(kernel.impedance.a(x), dtype=float) * np.ones_like(x)
    A = np.zeros((S, S))
    w = kernel.tau_weights
    for s in range(S):
        m = abs(s - c)
        if m == 0:
            continue
        L = abs(x[s])
        pos = L * kernel.tau / H
        idx, lw = _lagrange_rows(pos, m)
        contrib = (np.sign(x[s]) * a_vals[s] * L) * w * kernel.dt_values[s]
        np.add.at(A[s], (idx + c).ravel(), (contrib[:, None] * lw).ravel())
    return A


_ROUTES = {1: 1, 2: 2, "darboux-representation": 1, "volterra": 2}


def apply_T_inverse(pair: KernelPair, v: SampledFunction, route=1,
                    tol: float = 1e-10, max_iter: int = 60) -> SampledFunction:
    """``T_a^{-1} v`` on the slice coordinates of a rectangle-mode kernel pair.

    ``route`` is ``1`` or ``"darboux-representation"``, ``2`` or
    ``"volterra"``.  Route 1 evaluates ``v(x) - int_{-x}^{x} K_{1/a}(t, x) v'(t) dt`` with the
    reciprocal kernel taken from the characteristic march, since its
    arguments leave the triangle ``|t| <= |x|``.  Route 2 solves the Volterra
    equation ``u = a v - a int_{-x}^{x} dK_a/dt(x, t) u(t) dt`` by
    successive approximation.

    Raises
    ------
    IterationLimitError
        If route 2 does not converge within ``max_iter`` sweeps.
    """
    if route not in _ROUTES:
        raise ConfigurationError(f"unknown inversion route {route!r}")
    route = _ROUTES[route]
    k = pair.direct
    if k.mode != "rectangle":
        raise ConfigurationError("inversion needs a rectangle-mode kernel pair")
    if not v.grid.same_as(k.x_grid) and not np.array_equal(v.grid.nodes, k.x):
        raise ConfigurationError("v must be sampled on the slice coordinates")
    x = k.x
    if route == 1:
        mk = pair.marched
        r = pair.refine
        c = int(np.argmin(np.abs(x)))
        sp = _spline(v)
        out = np.array(v.values, dtype=complex if v.is_complex else float)
        for s in range(x.size):
            jj = r * (s - c)
            if jj == 0:
                continue
            i = np.arange(-abs(jj), abs(jj) + 1, 2)
            t = i * mk.h
            q = mk.value("Q", i, jj)
            w = quadrature_weights(t)
            out[s] -= np.sign(x[s]) * (w @ (q * sp(t, 1)))
        return SampledFunction(k.x_grid, out)
    if route == 2:
        A = _volterra_matrix(k)
        a_vals = np.asarray(k.impedance.a(x), dtype=float) * np.ones_like(x)
        f = a_vals * v.values
        u = f.copy()
        scale = max(1.0, float(np.max(np.abs(f))))
        for _ in range(max_iter):
            nxt = f - A @ u
            if float(np.max(np.abs(nxt - u))) <= tol * scale:
                return SampledFunction(k.x_grid, nxt)
            u = nxt
        radius = float(np.max(np.abs(np.linalg.eigvals(A))))
        raise IterationLimitError(
            f"successive approximation did not converge in {max_iter} sweeps", radius
        )


def check_kernel_relations(pair: KernelPair, reference=None) -> dict:
    """Residuals of the first order relations between ``K_a`` and ``K_{1/a}``.

    ``dK_{1/a}/dx + a^2 dK_a/dt`` and ``dK_a/dx + a^-2 dK_{1/a}/dt`` on the
    slice grid (slice ``x = 0`` excluded), and the path integral

        K_{1/a}(x, t) = -int_0^x a^2 dK_a/dt(xi, 0) dxi - int_0^t a^2(x) dK_a/dx(x, z) dz

    against the spectrally built ``K_{1/a}`` on ``x >= 0``, or against
    ``reference(x, t)`` (a vectorised callable) when one is given.
    """
    ka, kr = pair.direct, pair.reciprocal
    x = ka.x
    a_sq = np.asarray(ka.impedance.a_sq(x), dtype=float)[:, None] * np.ones((1, ka.tau.size))
    live = x != 0
    r1 = kr.dx_values + a_sq * ka.dt_values
    r2 = ka.dx_values + kr.dt_values / a_sq
    pos = x >= 0
    xp = x[pos]
    mid = ka.tau.size // 2
    gx = Grid(xp, 0)
    gt = Grid(ka.tau, mid)
    from .grid import cumulative_integral

    first = cumulative_integral(a_sq[pos, mid] * ka.dt_values[pos, mid], gx)
    second = np.abs(xp)[:, None] * cumulative_integral(a_sq[pos] * ka.dx_values[pos], gt)
    recon = -first[:, None] - second
    if reference is None:
        target = kr.values[pos]
    else:
        target = reference(xp[:, None], xp[:, None] * ka.tau[None, :])
    return {
        "dK_1/a/dx + a^2 dK_a/dt": float(np.max(np.abs(r1[live]))),
        "dK_a/dx + a^-2 dK_1/a/dt": float(np.max(np.abs(r2[live]))),
        "path integral": float(np.max(np.abs(recon - target))),
    }
