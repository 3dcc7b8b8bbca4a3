"""Command line front end ``impspps``.

Usage::

    impspps <command> [--config run.json] [--out DIR] [--impedance ID] [--grid-n N]

Commands are ``formal-powers``, ``solve``, ``eigen``, ``approx``, ``kernel``
and ``check``.  The configuration is one JSON object (see
:class:`RunConfig`); command line flags override its fields.

Exit codes: 0 success, 2 invalid impedance or configuration, 3 eigenvalue
shortfall or other spectral failure, 4 kernel, 5 approximation, 6 solve
(also used by ``formal-powers``).  ``check`` exits with the code of the
first module whose check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .approximation import approximation_study, target_function
from .dirichlet import dirichlet_eigenpairs, norm_a
from .errors import ConfigurationError, IllConditionedWarning, ImpSppsError, InvalidImpedanceError
from .formal_powers import build_formal_powers
from .grid import Grid, quadrature_weights
from .impedance import Impedance, impedance_from_id, validate_proper
from .operators import op_D, weight_on
from .oracle import closed_form, family_initial_data, ode_solve
from .reporting import write_csv, write_json
from .spps import required_table_order, spps_darboux_derivative, spps_eval, wronskian
from .transmutation import (
    apply_T,
    apply_T_inverse,
    build_kernel,
    build_kernel_pair,
    check_goursat,
    check_kernel_relations,
    check_mapping_property,
    check_transmutation_property,
    kernel_l2_norm,
)

__all__ = ["RunConfig", "main", "COMMANDS", "EXIT_CODES"]

EXIT_CODES = {"ok": 0, "config": 2, "eigen": 3, "kernel": 4, "approx": 5, "solve": 6}


@dataclass
class RunConfig:
    """Parameters of a run; every field may appear in the JSON config."""

    impedance: str = "affine"
    interval: list = field(default_factory=lambda: [0.0, 1.0])
    x0: float | None = None
    grid_n: int = 2001
    K: int | None = None
    rho: list = field(default_factory=lambda: [1.0, math.pi, 10.0])
    kinds: list = field(default_factory=lambda: ["C", "S"])
    n_max: int = 5
    lambda_max: float | None = None
    N: list = field(default_factory=lambda: list(range(16)))
    p: list = field(default_factory=lambda: [1, 2, "inf"])
    targets: list = field(default_factory=lambda: ["exp", "C_pi", "smooth_abs"])
    J: int = 128
    slices: int = 201
    ell: float = 1.0
    mode: str = "triangle"
    tau_stride: int = 8
    out: str = "impspps-out"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown configuration keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self):
        try:
            l1, l2 = (float(v) for v in self.interval)
        except (TypeError, ValueError):
            raise ConfigurationError("interval must be a pair of numbers") from None
        if not (math.isfinite(l1) and math.isfinite(l2)) or l2 <= l1:
            raise ConfigurationError(f"interval endpoints must be ordered, got {self.interval}")
        self.interval = [l1, l2]
        if self.x0 is not None and not l1 <= float(self.x0) <= l2:
            raise ConfigurationError(f"anchor x0={self.x0} lies outside [{l1}, {l2}]")
        for name in ("grid_n", "n_max", "J", "slices", "tau_stride"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigurationError(f"{name} must be a positive integer")
        if self.grid_n < 5:
            raise ConfigurationError("grid_n must be at least 5")
        if self.K is not None and (not isinstance(self.K, int) or self.K < 0):
            raise ConfigurationError("K must be a non-negative integer")
        if not self.N or any(not isinstance(n, int) or n < 0 for n in self.N):
            raise ConfigurationError("N must be a non-empty list of non-negative integers")
        if self.lambda_max is not None and not float(self.lambda_max) > 0:
            raise ConfigurationError("lambda_max must be positive")
        if any(k not in ("e", "C", "S") for k in self.kinds):
            raise ConfigurationError("kinds must be drawn from e, C, S")
        if not float(self.ell) > 0:
            raise ConfigurationError("ell must be positive")
        self.rho_values()

    def rho_values(self) -> list[complex]:
        out = []
        for r in self.rho:
            if isinstance(r, (list, tuple)) and len(r) == 2:
                out.append(complex(float(r[0]), float(r[1])))
            elif isinstance(r, (int, float)) and not isinstance(r, bool):
                out.append(complex(r))
            else:
                raise ConfigurationError(f"rho entries are numbers or [re, im] pairs, got {r!r}")
        return out

    def grid(self, anchor: float | None = None) -> Grid:
        l1, l2 = self.interval
        x0 = self.x0 if anchor is None else anchor
        g = Grid.uniform_grid(l1, l2, self.grid_n)
        return g if x0 is None else g.with_anchor(float(x0))


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _setup(cfg: RunConfig) -> tuple[Impedance, Grid]:
    a = impedance_from_id(cfg.impedance)
    grid = cfg.grid()
    validate_proper(a, grid)
    return a, grid


def _closed_form_eigenvalues(a: Impedance, l1: float, l2: float, n: int):
    base = (np.arange(1, n + 1) * math.pi / (l2 - l1)) ** 2
    if a.kind in ("unit", "affine", "affine_reciprocal"):
        return base
    if a.kind == "exponential":
        return base + a.param**2
    return None


def _oracle(kind: str, a: Impedance, rho: complex, grid: Grid):
    if a.has_closed_form:
        return closed_form(kind, a, rho, grid)
    u0, u1 = family_initial_data(kind, rho)
    return ode_solve(a, rho**2, u0, u1, grid)


# -- commands -----------------------------------------------------------------


def cmd_formal_powers(cfg: RunConfig, out: Path) -> dict:
    a, grid = _setup(cfg)
    K = 40 if cfg.K is None else cfg.K
    table = build_formal_powers(a, grid, K)
    header = ["x"] + [f"phi_a_{k}" for k in range(K + 1)] + [f"phi_inv_a_{k}" for k in range(K + 1)]
    cols = np.vstack([grid.nodes[None, :], table.direct, table.reciprocal]).T
    write_csv(out / "formal_powers.csv", header, cols)
    rel = {"direct": [0.0], "reciprocal": [0.0]}
    for k in range(1, K + 1):
        for side, other in (("direct", "reciprocal"), ("reciprocal", "direct")):
            d = op_D(table.phi(k, side), a, side) - k * table.phi(k - 1, other)
            rel[side].append(d.sup_norm())
    cert = validate_proper(a, grid)
    report = {
        "impedance": a.label,
        "K": K,
        "x0": grid.x0,
        "interval": [grid.l1, grid.l2],
        "derivative_relation": rel,
        "certificate": {"norm_a_L2": cert.norm_a_L2, "norm_inv_a_L2": cert.norm_ainv_L2},
        "file": "formal_powers.csv",
    }
    write_json(out / "formal_powers.json", report)
    return report


def cmd_solve(cfg: RunConfig, out: Path) -> dict:
    a, grid = _setup(cfg)
    rhos = cfg.rho_values()
    K = cfg.K if cfg.K is not None else max(max(required_table_order(r, grid) for r in rhos), 12)
    table = build_formal_powers(a, grid, K)
    sols, wr = [], []
    for i, rho in enumerate(rhos):
        got = {}
        for kind in cfg.kinds:
            sol = spps_eval(kind, rho, table)
            ref = _oracle(kind, a, rho, grid)
            dar = spps_darboux_derivative(sol)
            name = f"solve_{kind}_{i}.csv"
            v = sol.values.values
            write_csv(out / name, ["x", "re_u", "im_u"], zip(grid.nodes, v.real, v.imag))
            sols.append({
                "kind": kind,
                "rho": [rho.real, rho.imag],
                "N": sol.N,
                "tail_estimate": sol.tail_estimate,
                "oracle": ref.source,
                "oracle_error": (sol.values - ref.u).sup_norm(),
                "darboux_error": (dar.values - ref.du).sup_norm(),
                "file": name,
            })
            got[kind] = (sol, dar)
        if "C" in got and "S" in got:
            (c, dc), (s, ds) = got["C"], got["S"]
            w = wronskian(c.values, s.values, a, dc.values, ds.values).values
            wr.append({"rho": [rho.real, rho.imag], "spread": float(np.ptp(w.real) + np.ptp(w.imag)),
                       "mean": [float(np.mean(w.real)), float(np.mean(w.imag))]})
    report = {"impedance": a.label, "K": K, "x0": grid.x0, "solutions": sols, "wronskian": wr}
    write_json(out / "solve.json", report)
    return report


def cmd_eigen(cfg: RunConfig, out: Path) -> dict:
    a, grid = _setup(cfg)
    pairs = dirichlet_eigenpairs(a, grid, cfg.n_max, cfg.lambda_max, cfg.K)
    lams = np.array([p.lam for p in pairs])
    write_csv(out / "eigenvalues.csv", ["n", "lambda", "residual"],
              [(p.index, p.lam, p.residual) for p in pairs])
    phis = np.array([p.eigenfunction.values.real for p in pairs])
    write_csv(out / "eigenfunctions.csv", ["x"] + [f"u_{p.index}" for p in pairs],
              np.vstack([grid.nodes[None, :], phis]).T)
    a_sq, _ = weight_on(a, grid)
    w = quadrature_weights(grid) * a_sq
    gram = (phis * w) @ phis.T
    report = {
        "impedance": a.label,
        "interval": [grid.l1, grid.l2],
        "eigenvalues": lams,
        "residuals": [p.residual for p in pairs],
        "orthonormality": float(np.max(np.abs(gram - np.eye(len(pairs))))),
    }
    ref = _closed_form_eigenvalues(a, grid.l1, grid.l2, len(pairs))
    if ref is not None:
        report["closed_form"] = ref
        report["relative_error"] = np.abs(lams - ref) / ref
    write_json(out / "eigen.json", report)
    return report


def cmd_approx(cfg: RunConfig, out: Path) -> dict:
    a, grid = _setup(cfg)
    K = cfg.K if cfg.K is not None else max(cfg.N)
    if max(cfg.N) > K:
        raise ConfigurationError(f"N={max(cfg.N)} exceeds the table order K={K}")
    table = build_formal_powers(a, grid, K)
    reports = {}
    for name in cfg.targets:
        f = target_function(name, a, grid)
        rep = approximation_study(f, a, cfg.N, cfg.p, table=table, target=name)
        rep["hypothesis"] = "unchecked" if a.kind in ("sampled", "function") else "checked"
        write_json(out / f"approx_{name}.json", rep)
        keys = [str(p) for p in cfg.p]
        write_csv(out / f"approx_{name}.csv", ["N"] + [f"err_L{k}" for k in keys] + ["cond"],
                  [(n, *(rep["errors"][k][i] for k in keys), rep["cond"][i]) for i, n in enumerate(rep["N"])])
        reports[name] = rep
    return reports


def cmd_kernel(cfg: RunConfig, out: Path) -> dict:
    a = impedance_from_id(cfg.impedance)
    pair = build_kernel_pair(a, cfg.J, cfg.slices, cfg.mode, cfg.ell)
    k = pair.direct
    stride = max(1, cfg.tau_stride)
    rows = []
    for s in range(k.x.size):
        t = k.half_width[s] * k.tau[::stride]
        for tj, kv in zip(t, k.values[s, ::stride]):
            rows.append((k.x[s], tj, kv, 0.0))
    write_csv(out / "kernel.csv", ["x", "t", "re_K", "im_K"], rows)
    report = {
        "impedance": a.label,
        "J": k.J,
        "mode": k.mode,
        "ell": k.ell,
        "slices": int(k.x.size),
        "goursat": check_goursat(k),
        "goursat_reciprocal": check_goursat(pair.reciprocal),
        "mapping": check_mapping_property(k, 6),
        "l2_norm": kernel_l2_norm(k),
        "relations": check_kernel_relations(pair),
    }
    write_json(out / "kernel.json", report)
    return report


_TEST_FUNCTIONS = {
    "1": lambda x: np.ones_like(x),
    "x": lambda x: x,
    "x^2": lambda x: x**2,
    "x^3-2x": lambda x: x**3 - 2 * x,
    "sin": np.sin,
}


def cmd_check(cfg: RunConfig, out: Path) -> dict:
    """Run the property suite on one impedance and write a single verdict."""
    a, grid = _setup(cfg)
    checks, skipped = {}, []

    def record(name, module, value, tol, ok=None):
        value = float(value)
        passed = bool(value <= tol) if ok is None else bool(ok)
        checks[name] = {"module": module, "value": value, "tol": tol, "pass": passed}

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        # formal powers
        table = build_formal_powers(a, grid, 10)
        rel = max(
            (op_D(table.phi(k), a) - k * table.phi(k - 1, "reciprocal")).sup_norm() for k in range(1, 11)
        )
        record("derivative relation k<=10", "solve", rel, 1e-6)
        # SPPS against the oracle and the Wronskian
        rhos = [1.0, math.pi, 10.0]
        tab = build_formal_powers(a, grid, max(required_table_order(r, grid) for r in rhos))
        err, spread = 0.0, 0.0
        for rho in rhos:
            c, s = spps_eval("C", rho, tab), spps_eval("S", rho, tab)
            for sol in (c, s):
                err = max(err, (sol.values - _oracle(sol.kind, a, rho, grid).u).sup_norm())
            w = wronskian(c.values, s.values, a, spps_darboux_derivative(c).values,
                          spps_darboux_derivative(s).values).values
            spread = max(spread, float(np.ptp(w.real)))
        record("SPPS vs oracle", "solve", err, 1e-8)
        record("Wronskian spread", "solve", spread, 1e-7)
        # eigenpairs
        pairs = dirichlet_eigenpairs(a, grid, 5)
        phis = np.array([p.eigenfunction.values.real for p in pairs])
        a_sq, _ = weight_on(a, grid)
        gram = (phis * (quadrature_weights(grid) * a_sq)) @ phis.T
        record("eigenfunction orthonormality", "eigen", np.max(np.abs(gram - np.eye(5))), 1e-7)
        ref = _closed_form_eigenvalues(a, grid.l1, grid.l2, 5)
        if ref is not None:
            lams = np.array([p.lam for p in pairs])
            record("eigenvalues vs closed form", "eigen", np.max(np.abs(lams - ref) / ref), 1e-6)
        else:
            skipped.append({"name": "eigenvalues vs closed form", "reason": "no closed form"})
        # approximation
        ptab = build_formal_powers(a, grid, 15)
        for name in ("exp", "C_pi", "smooth_abs"):
            rep = approximation_study(target_function(name, a, grid), a, list(range(16)), (2,), table=ptab)
            e = np.array(rep["l2a"])
            record(f"projection {name} N=15", "approx", e[-1], 1e-3)
            rise = float(np.max(np.diff(e))) if e.size > 1 else 0.0
            record(f"projection {name} monotone", "approx", max(rise, 0.0), 1e-12)
        # transmutation kernels
        try:
            pair = build_kernel_pair(a, cfg.J, cfg.slices, "triangle", cfg.ell)
        except ImpSppsError as exc:
            skipped.append({"name": "transmutation", "reason": str(exc)})
            pair = None
        if pair is not None:
            g = check_goursat(pair.direct)
            record("Goursat traces", "kernel", max(g.values()), 1e-5)
            record("mapping property k<=6", "kernel", np.max(check_mapping_property(pair.direct, 6)), 1e-5)
            worst = 0.0
            for u in _TEST_FUNCTIONS.values():
                res = check_transmutation_property(pair, u)
                worst = max(worst, *(v for k, v in res.items() if "stencil" not in k))
            record("transmutation identities", "kernel", worst, 1e-4)
            rel = check_kernel_relations(pair)
            record("path integral for K_1/a", "kernel", rel["path integral"], 1e-4)
            _inversion_checks(a, cfg, record, skipped)
    failed = [c for c in checks.values() if not c["pass"]]
    report = {
        "impedance": a.label,
        "interval": [grid.l1, grid.l2],
        "verdict": "fail" if failed else "pass",
        "checks": checks,
        "skipped": skipped,
    }
    write_json(out / "check.json", report)
    return report


def _inversion_checks(a: Impedance, cfg: RunConfig, record, skipped):
    """Round trips through both inverse routes on a symmetric interval."""
    ell = float(cfg.ell)
    for trial in (ell, ell / 2):
        try:
            pair = build_kernel_pair(a, cfg.J, (cfg.slices + 1) // 2, "rectangle", trial)
            break
        except (InvalidImpedanceError, ConfigurationError):
            pair = None
    if pair is None:
        skipped.append({"name": "inverse round trip", "reason": "impedance not proper on [-l, l]"})
        return
    k = pair.direct
    n_half = int(np.sum(k.x > 0))
    fine = Grid.uniform_grid(-k.ell, k.ell, 2 * n_half * 5 + 1, 0.0)
    worst = {1: 0.0, 2: 0.0}
    for u in _TEST_FUNCTIONS.values():
        v = apply_T(k, fine.sample(u))
        exact = u(k.x)
        for route in (1, 2):
            back = apply_T_inverse(pair, v, route=route)
            worst[route] = max(worst[route], float(np.max(np.abs(back.values - exact))))
    record("inverse round trip (Darboux representation)", "kernel", worst[1], 1e-4)
    record("inverse round trip (Volterra)", "kernel", worst[2], 1e-4)


COMMANDS = {
    "formal-powers": (cmd_formal_powers, "solve"),
    "solve": (cmd_solve, "solve"),
    "eigen": (cmd_eigen, "eigen"),
    "approx": (cmd_approx, "approx"),
    "kernel": (cmd_kernel, "kernel"),
    "check": (cmd_check, "solve"),
}


def _summary(command: str, report) -> str:
    if command == "check":
        bad = [k for k, v in report["checks"].items() if not v["pass"]]
        return f"check: {report['verdict']}" + (f" ({', '.join(bad)})" if bad else "")
    if command == "eigen":
        return "eigen: " + ", ".join(f"{v:.12g}" for v in report["eigenvalues"])
    return f"{command}: done"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="impspps", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--out", help="output directory")
    p.add_argument("--impedance", help="impedance id: unit, affine, exp:<c>, file:<path>")
    p.add_argument("--grid-n", type=int, help="number of grid nodes")
    return p


def load_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("the config must be a JSON object")
    for key, val in (("out", args.out), ("impedance", args.impedance), ("grid_n", args.grid_n)):
        if val is not None:
            data[key] = val
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    func, module = COMMANDS[args.command]
    try:
        cfg = load_config(args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "config.json", asdict(cfg))
        if args.command != "kernel":
            _setup(cfg)
        else:
            impedance_from_id(cfg.impedance)
    except (ImpSppsError, ValueError, TypeError) as exc:
        print(f"impspps: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CODES["config"]
    try:
        report = func(cfg, out)
    except ImpSppsError as exc:
        print(f"impspps {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODES[module]
    print(_summary(args.command, report))
    if args.command == "check" and report["verdict"] == "fail":
        first = next(v for v in report["checks"].values() if not v["pass"])
        return EXIT_CODES[first["module"]]
    return EXIT_CODES["ok"]


if __name__ == "__main__":
    sys.exit(main())
