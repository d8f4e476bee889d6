"""Analytic and finite-difference bound-state spectra of the s-wave Klein-Gordon problem.

For harmonic and Morse the effective potential depends on the energy, so a
level n is a root of

    f_n(E) = eps_n(E) - (E^2 - M^2),

where eps_n(E) is either the shape-invariance sum or the n-th eigenvalue of
the discretized operator. Roots are found by scanning the bracket and then
refining each sign change. A root where f_n decreases is a particle state
(positive Klein-Gordon norm, since the norm is proportional to
2E - d eps_n/dE = -f_n'(E)); increasing crossings are antiparticle roots and
are reported as warnings only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .families import (
    Family,
    FiveParamExp,
    HarmonicKG,
    continuum_threshold,
    default_grid,
    effective_potential_values,
    family_tag,
    normalizable_form,
    superpotential_spec,
)
from .numerics import (
    Grid,
    GridFunction,
    NoSignChangeError,
    dirichlet_hamiltonian,
    eigenpair,
    eigenvalues_range,
    find_root_bracketed,
)
from .susy import NormalizabilityError, SuperpotentialSpec, check_level, tower_state

ANALYTIC = "analytic"
NUMERIC = "numeric"


class LevelNotFound(LookupError):
    """No level n was found in the energy bracket."""


@dataclass(frozen=True)
class SolveConfig:
    grid: Grid
    e_bracket: tuple[float, float]
    e_tol: float = 1e-10
    scan_points: int = 200
    max_levels: int = 6
    eig_tol: float = 1e-12

    def __post_init__(self):
        lo, hi = self.e_bracket
        if not lo < hi:
            raise ValueError(f"energy bracket must satisfy lo < hi, got {self.e_bracket}")
        if not (self.e_tol > 0 and self.eig_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.scan_points < 2:
            raise ValueError("scan_points must be >= 2")
        if self.max_levels < 0:
            raise ValueError("max_levels must be >= 0")


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    E: float
    epsilon: float
    method: str
    residual: float
    iterations: int


@dataclass
class SpectrumResult:
    family: Family
    mass: Optional[float]
    levels: list[EnergyLevel]
    config: SolveConfig
    warnings: list[str] = field(default_factory=list)

    def level(self, n: int) -> EnergyLevel | None:
        return next((lv for lv in self.levels if lv.n == n), None)


def resolve_mass(family: Family, M: Optional[float]) -> Optional[float]:
    own = getattr(family, "M", None)
    if own is None:
        return M
    if M is not None and not math.isclose(M, own, rel_tol=0, abs_tol=0):
        raise ValueError(f"mass {M} disagrees with the family's M = {own}")
    return own


def default_bracket(family: Family, M: Optional[float] = None) -> tuple[float, float]:
    M = resolve_mass(family, M)
    if isinstance(family, HarmonicKG):
        return (M + 1e-6, M + 50.0)
    m = 1.0 if M is None else M
    return (-m + 1e-6, m - 1e-6)


def default_config(family: Family, M: Optional[float] = None, **overrides) -> SolveConfig:
    kwargs = dict(grid=default_grid(family), e_bracket=default_bracket(family, M))
    kwargs.update(overrides)
    return SolveConfig(**kwargs)


# --- analytic side -------------------------------------------------------------


def analytic_epsilon(spec: SuperpotentialSpec, eps0: float, n: int) -> float:
    """eps_n = eps0 + R(a_1) + ... + R(a_n)."""
    if n < 0:
        raise ValueError("level index must be non-negative")
    if not spec.level_allowed(n):
        raise NormalizabilityError(f"level {n} exceeds the highest bound level {spec.max_levels}")
    return _epsilon_sum(spec, eps0, n)


def _epsilon_sum(spec: SuperpotentialSpec, eps0: float, n: int) -> float:
    return eps0 + sum(spec.remainder(k) for k in range(1, n + 1))


@dataclass
class _Root:
    E: float
    iterations: int
    particle: bool


def _scan_roots(f: Callable[[float], float], lo: float, hi: float, points: int, tol: float):
    """All sign changes of f on a uniform scan of [lo, hi], refined to roots.

    Around every interior extremum of the sampled values the two adjacent
    cells are split once more, to catch a pair of roots inside one cell.
    """
    Es = list(np.linspace(lo, hi, points))
    fs = [f(E) for E in Es]
    extra = []
    for i in range(1, points - 1):
        left, right = fs[i] - fs[i - 1], fs[i + 1] - fs[i]
        if left * right < 0 and np.sign(fs[i - 1]) == np.sign(fs[i]) == np.sign(fs[i + 1]):
            extra += [(Es[i - 1] + Es[i]) / 2, (Es[i] + Es[i + 1]) / 2]
    if extra:
        pts = sorted(zip(Es + extra, fs + [f(E) for E in extra]))
        Es, fs = [p[0] for p in pts], [p[1] for p in pts]
    roots = []
    for a, b, fa, fb in zip(Es[:-1], Es[1:], fs[:-1], fs[1:]):
        if not (np.isfinite(fa) and np.isfinite(fb)):
            continue
        if fa == 0.0 or np.sign(fa) != np.sign(fb):
            if fb == 0.0:
                continue  # picked up as the left end of the next cell
            try:
                root, its = find_root_bracketed(f, a, b, tol)
            except NoSignChangeError:
                continue
            roots.append(_Root(root, its, particle=fa > fb))
    return roots


def _analytic_f(family: Family, M: float, n: int):
    def f(E: float) -> float:
        spec = superpotential_spec(family, E)
        return _epsilon_sum(spec, spec.eps0, n) - (E * E - M * M)

    return f


def _solve_analytic(family: Family, M: Optional[float], n: int, cfg: SolveConfig):
    """Particle-branch analytic levels n and notes about discarded roots."""
    M = resolve_mass(family, M)
    notes: list[str] = []
    if isinstance(family, FiveParamExp):
        if family.g != 0:
            raise ValueError("analytic spectra of the five-parameter family need g = 0")
        spec = superpotential_spec(normalizable_form(family))
        check_level(spec, n)
        eps = analytic_epsilon(spec, spec.eps0, n)
        E = math.sqrt(eps + M * M) if M is not None and eps + M * M >= 0 else math.nan
        return [EnergyLevel(n, E, eps, ANALYTIC, 0.0, 0)], notes

    f = _analytic_f(family, M, n)
    tol = min(cfg.e_tol, 1e-12)
    levels = []
    for root in _scan_roots(f, *cfg.e_bracket, cfg.scan_points, tol):
        spec = superpotential_spec(family, root.E)
        try:
            check_level(spec, n)
        except NormalizabilityError as exc:
            notes.append(f"analytic n={n}: root E={root.E!r} discarded ({exc})")
            continue
        if not root.particle:
            notes.append(f"analytic n={n}: antiparticle-branch root E={root.E!r} not reported")
            continue
        eps = root.E**2 - M**2
        levels.append(EnergyLevel(n, root.E, eps, ANALYTIC, abs(f(root.E)), root.iterations))
    if len(levels) > 1:
        notes.append(
            f"analytic n={n}: {len(levels)} particle roots "
            f"{[lv.E for lv in levels]}; keeping the lowest"
        )
    return levels[:1], notes


def analytic_level(family: Family, M: Optional[float], n: int, cfg: SolveConfig) -> EnergyLevel:
    levels, notes = _solve_analytic(family, M, n, cfg)
    if not levels:
        raise LevelNotFound(f"no level {n} in bracket {cfg.e_bracket}; " + "; ".join(notes))
    return levels[0]


def analytic_spectrum(family: Family, cfg: SolveConfig, M: Optional[float] = None) -> SpectrumResult:
    M = resolve_mass(family, M)
    result = SpectrumResult(family, M, [], cfg)
    for n in range(cfg.max_levels + 1):
        try:
            levels, notes = _solve_analytic(family, M, n, cfg)
        except NormalizabilityError as exc:
            result.warnings.append(f"analytic n={n}: {exc}")
            break
        result.warnings.extend(notes)
        if not levels:
            result.warnings.append(f"analytic n={n}: no level in bracket {cfg.e_bracket}")
        result.levels.extend(levels)
    return result


# --- numeric side -------------------------------------------------------------


def _truncation_suspect(u: np.ndarray, k: int = 10, threshold: float = 1e-6) -> bool:
    mass = u * u / np.sum(u * u)
    return bool(mass[:k].sum() > threshold or mass[-k:].sum() > threshold)


def _numeric_f(family: Family, M: float, n: int, cfg: SolveConfig):
    r = cfg.grid.r

    def f(E: float) -> float:
        op = dirichlet_hamiltonian(cfg.grid, effective_potential_values(family, E, r))
        return float(eigenvalues_range(op, n, n, cfg.eig_tol)[0]) - (E * E - M * M)

    return f


def _numeric_level(family, M, n, E, cfg, method_iterations, notes):
    op = dirichlet_hamiltonian(cfg.grid, effective_potential_values(family, E, cfg.grid.r))
    eps_op, u = eigenpair(op, n, cfg.eig_tol)
    resid = float(np.linalg.norm(op.matvec(u) - eps_op * u) / np.linalg.norm(u))
    if _truncation_suspect(u):
        notes.append(f"numeric n={n}: truncation suspect (eigenfunction mass at the grid ends)")
    return resid


def _solve_numeric(family: Family, M: Optional[float], cfg: SolveConfig):
    M = resolve_mass(family, M)
    notes: list[str] = []
    levels: list[EnergyLevel] = []
    if isinstance(family, FiveParamExp):
        op = dirichlet_hamiltonian(cfg.grid, effective_potential_values(family, 0.0, cfg.grid.r))
        k = min(cfg.max_levels + 1, op.size)
        threshold = continuum_threshold(family)
        for n in range(k):
            eps, u = eigenpair(op, n, cfg.eig_tol)
            if not eps < threshold:
                break
            resid = float(np.linalg.norm(op.matvec(u) - eps * u))
            if _truncation_suspect(u):
                notes.append(f"numeric n={n}: truncation suspect (eigenfunction mass at the grid ends)")
            E = math.sqrt(eps + M * M) if M is not None and eps + M * M >= 0 else math.nan
            levels.append(EnergyLevel(n, E, eps, NUMERIC, resid, 0))
        return levels, notes

    tol = min(cfg.e_tol, 1e-12)
    for n in range(cfg.max_levels + 1):
        f = _numeric_f(family, M, n, cfg)
        roots = _scan_roots(f, *cfg.e_bracket, cfg.scan_points, tol)
        found = []
        for root in roots:
            if not root.particle:
                notes.append(f"numeric n={n}: antiparticle-branch root E={root.E!r} not reported")
                continue
            found.append(root)
        if not found:
            notes.append(f"numeric n={n}: no level in bracket {cfg.e_bracket}")
            continue
        if len(found) > 1:
            notes.append(
                f"numeric n={n}: {len(found)} particle roots {[r.E for r in found]}; keeping the lowest"
            )
        root = found[0]
        resid = _numeric_level(family, M, n, root.E, cfg, root.iterations, notes)
        levels.append(
            EnergyLevel(n, root.E, root.E**2 - M**2, NUMERIC, resid, root.iterations)
        )
    return levels, notes


def numeric_levels(family: Family, M: Optional[float], cfg: SolveConfig) -> list[EnergyLevel]:
    return _solve_numeric(family, M, cfg)[0]


def numeric_spectrum(family: Family, cfg: SolveConfig, M: Optional[float] = None) -> SpectrumResult:
    M = resolve_mass(family, M)
    levels, notes = _solve_numeric(family, M, cfg)
    return SpectrumResult(family, M, levels, cfg, notes)


# --- comparison and wavefunctions ------------------------------------------------


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    E_a: float
    E_b: float
    abs_diff: float
    rel_diff: float
    status: str  # ok | missing_in_a | missing_in_b


@dataclass(frozen=True)
class Comparison:
    rows: list[ComparisonRow]
    max_rel_diff: float


def compare_spectra(a: SpectrumResult, b: SpectrumResult) -> Comparison:
    if family_tag(a.family) != family_tag(b.family) or a.family != b.family:
        raise ValueError("cannot compare spectra of different families")
    if a.mass != b.mass:
        raise ValueError("cannot compare spectra at different masses")
    ns = sorted({lv.n for lv in a.levels} | {lv.n for lv in b.levels})
    rows = []
    worst = 0.0
    for n in ns:
        la, lb = a.level(n), b.level(n)
        if la is None or lb is None:
            status = "missing_in_a" if la is None else "missing_in_b"
            rows.append(
                ComparisonRow(n, la.E if la else math.nan, lb.E if lb else math.nan,
                              math.nan, math.nan, status)
            )
            continue
        if math.isfinite(la.E) and math.isfinite(lb.E):
            x, y = la.E, lb.E
        else:
            x, y = la.epsilon, lb.epsilon
        diff = abs(x - y)
        rel = diff / max(abs(x), abs(y)) if diff else 0.0
        worst = max(worst, rel)
        rows.append(ComparisonRow(n, la.E, lb.E, diff, rel, "ok"))
    return Comparison(rows, worst)


def level_spec(family: Family, E: float) -> SuperpotentialSpec:
    if isinstance(family, FiveParamExp):
        return superpotential_spec(normalizable_form(family))
    return superpotential_spec(family, E)


def level_wavefunction(family: Family, level: EnergyLevel, grid: Grid) -> GridFunction:
    """psi_n from the raising tower at the level's own energy."""
    return tower_state(level_spec(family, level.E), level.n, grid)


def eigen_residual(family: Family, E: float, epsilon: float, psi: GridFunction) -> float:
    """||H psi - eps psi||_2 / ||psi||_2 with H the Dirichlet finite-difference operator."""
    op = dirichlet_hamiltonian(psi.grid, effective_potential_values(family, E, psi.grid.r))
    u = psi.values[1:-1]
    return float(np.linalg.norm(op.matvec(u) - epsilon * u) / np.linalg.norm(u))
