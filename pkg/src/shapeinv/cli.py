"""Command-line entry point: ``shapeinv <spectrum|verify|specialize|wavefunction>``.

Exit codes: 0 success, 1 configuration error, 2 requested level(s) absent,
3 a verification residual exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import sys
from typing import Any

import numpy as np

from . import algebra, families, spectrum, susy
from .families import FiveParamExp
from .numerics import Grid, build_grid

EXIT_OK, EXIT_CONFIG, EXIT_ABSENT, EXIT_FAILED = 0, 1, 2, 3

TOP_KEYS = {"family", "params", "mass", "grid", "solver", "output"}
GRID_KEYS = {"r_min", "r_max", "n_points"}
TOLERANCE_DEFAULTS = {
    "shape_tol": 1e-9,
    "factorization_tol": 1e-9,
    "second_difference_tol": 1e-10,
    "commutator_tol": 1e-3,
    "lowering_tol": 1e-4,
    "eigen_tol": 1e-3,
}
SOLVER_KEYS = {
    "e_bracket_lo", "e_bracket_hi", "e_tol", "scan_points", "max_levels", "eig_tol", "energy",
} | set(TOLERANCE_DEFAULTS)
CSV_HEADER = "n,method,E,epsilon,residual,iterations"


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"config error in '{field}': {message}")
        self.field = field


@dataclasses.dataclass
class RunConfig:
    family_tag: str | None
    family: Any
    mass: float | None
    grid: Grid | None
    solver: dict
    output: str
    params: dict


# --- config parsing -------------------------------------------------------------


def _number(value, field: str, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(field, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(field, f"expected an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(field, "must be finite")
    return int(value) if integer else float(value)


def _reject_unknown(obj: dict, allowed: set, field: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"{field}.{extra[0]}" if field else extra[0], "unknown key")


def parse_config(raw: Any, need_family: bool = True) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    _reject_unknown(raw, TOP_KEYS, "")

    output = raw.get("output", "csv")
    if output not in ("csv", "json"):
        raise ConfigError("output", f"must be 'csv' or 'json', got {output!r}")

    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params", "must be an object")

    mass = raw.get("mass")
    if mass is not None:
        mass = _number(mass, "mass")
        if not mass > 0:
            raise ConfigError("mass", "must be positive")

    grid = None
    if "grid" in raw:
        g = raw["grid"]
        if not isinstance(g, dict):
            raise ConfigError("grid", "must be an object")
        _reject_unknown(g, GRID_KEYS, "grid")
        for k in sorted(GRID_KEYS - set(g)):
            raise ConfigError(f"grid.{k}", "missing")
        try:
            grid = build_grid(
                _number(g["r_min"], "grid.r_min"),
                _number(g["r_max"], "grid.r_max"),
                _number(g["n_points"], "grid.n_points", integer=True),
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError("grid", str(exc)) from None

    solver = raw.get("solver", {})
    if not isinstance(solver, dict):
        raise ConfigError("solver", "must be an object")
    _reject_unknown(solver, SOLVER_KEYS, "solver")
    solver = {
        k: _number(v, f"solver.{k}", integer=k in ("scan_points", "max_levels"))
        for k, v in solver.items()
    }

    tag = raw.get("family")
    family = None
    if tag is None:
        if need_family:
            raise ConfigError("family", "missing")
    else:
        family = _build_family(tag, params, mass)
    return RunConfig(tag, family, mass, grid, solver, output, params)


def _build_family(tag: str, params: dict, mass: float | None):
    if tag not in families.FAMILY_TYPES:
        raise ConfigError("family", f"unknown family {tag!r}; choose from {sorted(families.FAMILY_TYPES)}")
    cls = families.FAMILY_TYPES[tag]
    names = [f.name for f in dataclasses.fields(cls)]
    _reject_unknown(params, set(names), "params")
    kwargs = {}
    for k, v in params.items():
        if k == "mode":
            kwargs[k] = v
        else:
            kwargs[k] = _number(v, f"params.{k}")
    if "M" in names:
        if "M" in kwargs and mass is not None and kwargs["M"] != mass:
            raise ConfigError("params.M", f"disagrees with mass = {mass}")
        if "M" not in kwargs:
            if mass is None:
                raise ConfigError("mass", f"required for family {tag}")
            kwargs["M"] = mass
    missing = [
        f.name for f in dataclasses.fields(cls)
        if f.name not in kwargs and f.default is dataclasses.MISSING
    ]
    if missing:
        raise ConfigError(f"params.{missing[0]}", "missing")
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError("params", str(exc)) from None


def solve_config(cfg: RunConfig) -> spectrum.SolveConfig:
    fam = cfg.family
    base = spectrum.default_config(fam, cfg.mass if isinstance(fam, FiveParamExp) else None)
    s = cfg.solver
    lo = s.get("e_bracket_lo", base.e_bracket[0])
    hi = s.get("e_bracket_hi", base.e_bracket[1])
    try:
        return spectrum.SolveConfig(
            grid=cfg.grid or base.grid,
            e_bracket=(lo, hi),
            e_tol=s.get("e_tol", base.e_tol),
            scan_points=s.get("scan_points", base.scan_points),
            max_levels=s.get("max_levels", base.max_levels),
            eig_tol=s.get("eig_tol", base.eig_tol),
        )
    except ValueError as exc:
        raise ConfigError("solver", str(exc)) from None


def _tol(cfg: RunConfig, key: str) -> float:
    return cfg.solver.get(key, TOLERANCE_DEFAULTS[key])


# --- serialization ----------------------------------------------------------------


def _fmt(x) -> str:
    return repr(float(x))


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _json_value(x.real), "im": _json_value(x.imag)}
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, dict):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def dump_json(obj) -> str:
    return json.dumps(_json_value(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def levels_csv(levels: list[spectrum.EnergyLevel]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for lv in levels:
        buf.write(
            f"{lv.n},{lv.method},{_fmt(lv.E)},{_fmt(lv.epsilon)},{_fmt(lv.residual)},{lv.iterations}\n"
        )
    return buf.getvalue()


def levels_json(levels: list[spectrum.EnergyLevel], family_tag: str, warnings: list[str]) -> str:
    rows = [dataclasses.asdict(lv) for lv in levels]
    return dump_json({"family": family_tag, "levels": rows, "warnings": warnings})


# --- commands -----------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig, method: str, out, err) -> int:
    scfg = solve_config(cfg)
    methods = ["analytic", "numeric"] if method == "both" else [method]
    results = {}
    for m in methods:
        if m == "analytic":
            try:
                results[m] = spectrum.analytic_spectrum(cfg.family, scfg, cfg.mass)
            except ValueError as exc:
                raise ConfigError("family", str(exc)) from None
        else:
            results[m] = spectrum.numeric_spectrum(cfg.family, scfg, cfg.mass)
    levels = sorted(
        (lv for r in results.values() for lv in r.levels), key=lambda lv: (lv.n, methods.index(lv.method))
    )
    warnings = [w for m in methods for w in results[m].warnings]
    for w in warnings:
        print(f"warning: {w}", file=err)
    if not levels:
        print(f"no levels in bracket {list(scfg.e_bracket)}", file=err)
        return EXIT_ABSENT
    if cfg.output == "json":
        out.write(levels_json(levels, cfg.family_tag, warnings))
    else:
        out.write(levels_csv(levels))
    return EXIT_OK


def _trial_energy(cfg: RunConfig, scfg: spectrum.SolveConfig) -> float:
    if "energy" in cfg.solver:
        return cfg.solver["energy"]
    if isinstance(cfg.family, FiveParamExp):
        return 0.0
    try:
        return spectrum.analytic_level(cfg.family, cfg.mass, 0, scfg).E
    except spectrum.LevelNotFound:
        return 0.5 * (scfg.e_bracket[0] + scfg.e_bracket[1])


def _smooth_probe(grid: Grid, depth: int) -> algebra.TowerState:
    c = 0.5 * (grid.r_min + grid.r_max)
    width = (grid.r_max - grid.r_min) / 12
    return algebra.TowerState.uniform(grid, np.exp(-(((grid.r - c) / width) ** 2)), depth)


def _verify(cfg: RunConfig, target: str) -> tuple[dict, bool]:
    fam = cfg.family
    scfg = solve_config(cfg)
    grid = scfg.grid
    E = _trial_energy(cfg, scfg)
    spec = families.superpotential_spec(fam, E)
    report: dict[str, Any] = {"family": cfg.family_tag, "target": target, "energy": E}
    checks: dict[str, tuple[float, float]] = {}

    if target == "shape_invariance":
        levels = max(1, min(scfg.max_levels, 5))
        res = max(susy.shape_invariance_residual(spec, n, grid) for n in range(1, levels + 1))
        checks["shape_invariance"] = (res, _tol(cfg, "shape_tol"))
    elif target == "factorization":
        u = families.effective_potential(fam, E, grid)
        offset, dev = susy.factorization_offset(spec, u)
        report["offset"] = offset
        report["expected_offset"] = spec.eps0
        checks["factorization"] = (dev, _tol(cfg, "factorization_tol"))
    elif target == "algebra":
        rep = algebra.algebra_report(spec, probe=_smooth_probe(grid, 6))
        report.update(
            classification=rep.classification, mu=rep.mu, nu=rep.nu, kappa=rep.kappa,
            generator_scale=rep.generator_scale,
        )
        checks["second_difference"] = (rep.max_second_difference, _tol(cfg, "second_difference_tol"))
        checks["commutator"] = (rep.commutator_residual, _tol(cfg, "commutator_tol"))
        if rep.classification != algebra.NOT_FINITE:
            for name, val in algebra.structure_residuals(spec, rep, _smooth_probe(grid, 6)).items():
                checks[f"structure {name}"] = (val, _tol(cfg, "commutator_tol"))
    elif target == "tower":
        lspec = spectrum.level_spec(fam, E)
        psi0 = susy.ground_state(lspec, 1, grid)
        low = susy.apply_lowering(lspec, 1, psi0)
        core = slice(algebra.NODE_MARGIN, -algebra.NODE_MARGIN)
        checks["lowering"] = (
            float(np.linalg.norm(low.values[core]) / np.linalg.norm(psi0.values[core])),
            _tol(cfg, "lowering_tol"),
        )
        an = spectrum.analytic_spectrum(fam, scfg, cfg.mass)
        nodes = {}
        for lv in an.levels:
            g = cfg.grid or families.default_grid(fam, lv.E)
            psi = spectrum.level_wavefunction(fam, lv, g)
            checks[f"eigen n={lv.n}"] = (
                spectrum.eigen_residual(fam, lv.E, lv.epsilon, psi), _tol(cfg, "eigen_tol")
            )
            nodes[str(lv.n)] = susy.node_count(psi.values)
        report["node_counts"] = nodes
    else:
        raise ConfigError("--target", f"unknown target {target!r}")

    report["residuals"] = {k: v for k, (v, _) in checks.items()}
    report["tolerances"] = {k: t for k, (_, t) in checks.items()}
    ok = all(v <= t for v, t in checks.values())
    report["passed"] = ok
    return report, ok


def cmd_verify(cfg: RunConfig, target: str, out, err) -> int:
    try:
        report, ok = _verify(cfg, target)
    except (susy.SingularNodeError, susy.NormalizabilityError) as exc:
        print(f"verification failed: {exc}", file=err)
        return EXIT_FAILED
    out.write(dump_json(report))
    if not ok:
        print("verification failed: residual above tolerance", file=err)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_specialize(case_id: str, params: dict, out, err) -> int:
    try:
        case = families.CaseSpec(case_id, {k: _number(v, f"params.{k}") for k, v in params.items()})
        rt = families.case_round_trip(case)
    except ConfigError:
        raise
    except families.CaseError as exc:
        raise ConfigError("params", str(exc)) from None
    p = rt.params
    report = {
        "case": case_id,
        "target_params": case.target_params,
        "params": {"alpha": p.alpha, "q": p.q, "g": p.g, "Q2": p.Q2, "Q3": p.Q3},
        "shift": rt.shift,
        "expected_shift": rt.expected_shift,
        "residual": rt.residual,
        "n_samples": int(rt.sample_points.size),
    }
    out.write(dump_json(report))
    return EXIT_OK if rt.residual < 1e-9 else EXIT_FAILED


def cmd_wavefunction(cfg: RunConfig, n: int, out, err) -> int:
    fam = cfg.family
    scfg = solve_config(cfg)
    try:
        if isinstance(fam, FiveParamExp):
            E = math.nan
            spec = spectrum.level_spec(fam, E)
            susy.check_level(spec, n)
            eps = spectrum.analytic_epsilon(spec, spec.eps0, n)
            level = spectrum.EnergyLevel(n, E, eps, spectrum.ANALYTIC, 0.0, 0)
        else:
            level = spectrum.analytic_level(fam, cfg.mass, n, scfg)
    except (spectrum.LevelNotFound, susy.NormalizabilityError) as exc:
        print(f"level {n} absent: {exc}", file=err)
        return EXIT_ABSENT
    grid = cfg.grid or families.default_grid(fam, None if math.isnan(level.E) else level.E)
    psi = spectrum.level_wavefunction(fam, level, grid)
    buf = io.StringIO()
    buf.write("r,psi\n")
    for r, v in zip(grid.r, psi.values):
        buf.write(f"{r:.17g},{v:.17g}\n")
    out.write(buf.getvalue())
    print(f"level {n}: E = {level.E!r}, epsilon = {level.epsilon!r}", file=err)
    return EXIT_OK


# --- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shapeinv", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=["spectrum", "verify", "specialize", "wavefunction"])
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--method", choices=["analytic", "numeric", "both"], default="both")
    p.add_argument(
        "--target", choices=["shape_invariance", "factorization", "algebra", "tower"],
        default="shape_invariance",
    )
    p.add_argument("--case", choices=sorted(families.CASE_PARAMS))
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--out", help="output path (default: standard output)")
    return p


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
        except json.JSONDecodeError as exc:
            raise ConfigError("--config", f"invalid JSON: {exc}") from None
        if args.command == "specialize":
            if args.case is None:
                raise ConfigError("--case", "required for specialize")
            cfg = parse_config(raw, need_family=False)
            code = cmd_specialize(args.case, cfg.params, buf, stderr)
        else:
            cfg = parse_config(raw)
            if args.command == "spectrum":
                code = cmd_spectrum(cfg, args.method, buf, stderr)
            elif args.command == "verify":
                code = cmd_verify(cfg, args.target, buf, stderr)
            else:
                if args.n < 0:
                    raise ConfigError("--n", "must be non-negative")
                code = cmd_wavefunction(cfg, args.n, buf, stderr)
    except ConfigError as exc:
        print(str(exc), file=stderr)
        return EXIT_CONFIG
    text = buf.getvalue()
    if text:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
