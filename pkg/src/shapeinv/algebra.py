"""Ladder operators on a finite parameter tower and Lie-algebra classification.

A tower holds one grid function per parameter level; sheet ``k`` lives at
``spec.param_at(k + 1)``. The parameter-translation operator is an exact
index shift, so B+ = A^dagger T and B- = T^dagger A act sheet by sheet.
Shifts zero-fill the sheet that falls off the end, and every residual below
ignores the sheets that such truncation can reach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .numerics import Grid
from .susy import SuperpotentialSpec, ground_state

HEISENBERG_WEYL = "heisenberg_weyl"
SU_1_1 = "su_1_1"
SU_2 = "su_2"
NOT_FINITE = "not_finite"

NODE_MARGIN = 3


@dataclass(frozen=True, eq=False)
class TowerState:
    grid: Grid
    sheets: np.ndarray  # shape (depth, n_points)

    def __post_init__(self):
        sheets = np.array(self.sheets, dtype=float)
        if sheets.ndim != 2 or sheets.shape[1] != self.grid.n_points:
            raise ValueError(f"sheets must have shape (depth, {self.grid.n_points})")
        if sheets.shape[0] < 2:
            raise ValueError("a tower needs at least two sheets")
        sheets.setflags(write=False)
        object.__setattr__(self, "sheets", sheets)

    @property
    def depth(self) -> int:
        return self.sheets.shape[0]

    def with_sheets(self, sheets: np.ndarray) -> "TowerState":
        return replace(self, sheets=sheets)

    @classmethod
    def uniform(cls, grid: Grid, values: np.ndarray, depth: int) -> "TowerState":
        return cls(grid, np.tile(np.asarray(values, dtype=float), (depth, 1)))

    @classmethod
    def zeros(cls, grid: Grid, depth: int) -> "TowerState":
        return cls(grid, np.zeros((depth, grid.n_points)))


def ground_tower(spec: SuperpotentialSpec, grid: Grid, depth: int) -> TowerState:
    """Sheet k = psi_0(r; a_{1+k})."""
    return TowerState(grid, np.array([ground_state(spec, k + 1, grid).values for k in range(depth)]))


def shift_parameters(state: TowerState, direction: str) -> TowerState:
    out = np.zeros_like(state.sheets)
    if direction == "up":
        out[:-1] = state.sheets[1:]
    elif direction == "down":
        out[1:] = state.sheets[:-1]
    else:
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    return state.with_sheets(out)


def _w_table(spec: SuperpotentialSpec, grid: Grid, depth: int) -> np.ndarray:
    r = grid.r
    return np.array([spec.eval(r, k + 1) for k in range(depth)])


def apply_B_plus(spec: SuperpotentialSpec, state: TowerState) -> TowerState:
    """(B+ f)_k = A^dagger(a_{1+k}) f_{k+1}."""
    up = shift_parameters(state, "up").sheets
    w = _w_table(spec, state.grid, state.depth)
    return state.with_sheets(-np.gradient(up, state.grid.spacing, axis=1, edge_order=2) + w * up)


def apply_B_minus(spec: SuperpotentialSpec, state: TowerState) -> TowerState:
    """(B- f)_k = A(a_k) f_{k-1}."""
    f = state.sheets
    w = _w_table(spec, state.grid, state.depth)
    lowered = np.gradient(f, state.grid.spacing, axis=1, edge_order=2) + w * f
    return shift_parameters(state.with_sheets(lowered), "down")


def _remainders(spec: SuperpotentialSpec, depth: int, offset: int = 0) -> np.ndarray:
    # sheet k sits at a_{1+k}; "R(a_0)" relative to it is R at level k
    return np.array([spec.remainder(k + offset) for k in range(depth)])


def apply_R(spec: SuperpotentialSpec, state: TowerState, offset: int = 0) -> TowerState:
    """Multiply sheet k by R(a_{k + offset}); offset 0 is the R(a_0) operator."""
    return state.with_sheets(_remainders(spec, state.depth, offset)[:, None] * state.sheets)


def _block(sheets: np.ndarray, margin: int) -> np.ndarray:
    return sheets[margin : sheets.shape[0] - margin, NODE_MARGIN:-NODE_MARGIN]


def _rel(lhs: np.ndarray, rhs: np.ndarray, ref: np.ndarray, margin: int) -> float:
    diff = np.max(np.abs(_block(lhs - rhs, margin)))
    scale = np.max(np.abs(_block(ref, margin)))
    return float(diff / scale) if scale > 0 else float(diff)


def commutator_residual(spec: SuperpotentialSpec, probe: TowerState) -> float:
    """||([B-, B+] - R(a_0)) probe||_inf / ||probe||_inf on interior sheets and nodes."""
    if probe.depth < 3:
        raise ValueError("commutator residual needs a tower of depth >= 3")
    bm_bp = apply_B_minus(spec, apply_B_plus(spec, probe)).sheets
    bp_bm = apply_B_plus(spec, apply_B_minus(spec, probe)).sheets
    r_p = apply_R(spec, probe).sheets
    return _rel(bm_bp - bp_bm, r_p, probe.sheets, 1)


# --- remainder sequences and classification ----------------------------------


@dataclass(frozen=True)
class RSequence:
    values: np.ndarray  # R(a_1) .. R(a_N)
    start_param: float
    step: float
    eps0: Optional[float] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 3:
            raise ValueError("an R-sequence needs at least three values")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class AlgebraReport:
    mu: float
    nu: float
    kappa: float
    classification: str
    max_second_difference: float
    commutator_residual: float = math.nan
    generator_scale: float = math.nan


def r_sequence(spec: SuperpotentialSpec, count: int) -> RSequence:
    if count < 3:
        raise ValueError("count must be >= 3")
    values = np.array([spec.remainder(n) for n in range(1, count + 1)])
    return RSequence(values, spec.param_at(1), spec.step, spec.eps0)


def classify_algebra(
    seq: RSequence, tol: Optional[float] = None, tol_mu: Optional[float] = None
) -> AlgebraReport:
    """Fit R(a_n) = 2 mu n + nu - mu and name the algebra the ladder closes on.

    Constant first differences of R (vanishing second differences) give a
    finite algebra: mu = 0 is Heisenberg-Weyl, mu < 0 is su(1,1) and mu > 0
    is su(2). Anything else is reported as ``not_finite``.
    """
    R = seq.values
    scale = max(1.0, float(np.max(np.abs(R))))
    if tol is None:
        tol = 1e-9 * scale
    if tol_mu is None:
        tol_mu = 1e-8 * max(1.0, abs(R[0]))
    dR = np.diff(R)
    second = float(np.max(np.abs(np.diff(R, 2))))
    mu = float(np.mean(dR)) / 2
    n = np.arange(1, R.size + 1)
    nu = float(np.mean(R - 2 * mu * n)) + mu
    kappa = seq.eps0 if seq.eps0 is not None else math.nan
    if second > tol:
        tag = NOT_FINITE
    elif abs(mu) <= tol_mu:
        tag = HEISENBERG_WEYL
        mu = 0.0
    else:
        tag = SU_1_1 if mu < 0 else SU_2
    return AlgebraReport(
        mu=mu,
        nu=nu,
        kappa=kappa,
        classification=tag,
        max_second_difference=second,
        generator_scale=2 * mu,
    )


def algebra_report(
    spec: SuperpotentialSpec, count: int = 8, probe: Optional[TowerState] = None
) -> AlgebraReport:
    report = classify_algebra(r_sequence(spec, count))
    if probe is not None:
        report = replace(report, commutator_residual=commutator_residual(spec, probe))
    return report


def structure_residuals(
    spec: SuperpotentialSpec, report: AlgebraReport, probe: TowerState
) -> dict[str, float]:
    """Relative residual of each bracket relation of the classified algebra."""
    if report.classification == NOT_FINITE:
        raise ValueError("structure constants are undefined for a non-finite algebra")
    if probe.depth < 5:
        raise ValueError("structure-constant checks need a tower of depth >= 5")
    bp = lambda s: apply_B_plus(spec, s)  # noqa: E731
    bm = lambda s: apply_B_minus(spec, s)  # noqa: E731
    rop = lambda s: apply_R(spec, s)  # noqa: E731
    p = probe
    mu = report.mu
    out: dict[str, float] = {}

    # R shifted by one level along B+, by construction of the tower
    bp_p, bm_p = bp(p), bm(p)
    lhs = bp(rop(p)).sheets - rop(bp_p).sheets
    delta = apply_R(spec, bp_p, offset=1).sheets - rop(bp_p).sheets
    out["[B+,R] = (R(a1)-R(a0)) B+"] = _rel(lhs, delta, delta if np.any(delta) else bp_p.sheets, 1)
    out["[B+,R] = 2mu B+"] = _rel(lhs, 2 * mu * bp_p.sheets, bp_p.sheets, 1)
    lhs = bm(rop(p)).sheets - rop(bm_p).sheets
    out["[B-,R] = -2mu B-"] = _rel(lhs, -2 * mu * bm_p.sheets, bm_p.sheets, 1)

    if report.classification == HEISENBERG_WEYL:
        s = math.sqrt(spec.remainder(1))
        kp = lambda st: st.with_sheets(bp(st).sheets / s)  # noqa: E731
        km = lambda st: st.with_sheets(bm(st).sheets / s)  # noqa: E731
        k0 = lambda st: st.with_sheets(rop(st).sheets / spec.remainder(1))  # noqa: E731
        kp_p, km_p = kp(p), km(p)
        comm = km(kp_p).sheets - kp(km_p).sheets
        out["[K-,K+] = I"] = _rel(comm, p.sheets, p.sheets, 1)
        out["[K0,K+] = 0"] = _rel(k0(kp_p).sheets - kp(k0(p)).sheets, 0 * p.sheets, kp_p.sheets, 1)
        out["[K0,K-] = 0"] = _rel(k0(km_p).sheets - km(k0(p)).sheets, 0 * p.sheets, km_p.sheets, 1)
        kpkm = lambda st: kp(km(st))  # noqa: E731
        out["[K+,K+K-] = -K+"] = _rel(
            kp(kpkm(p)).sheets - kpkm(kp_p).sheets, -kp_p.sheets, kp_p.sheets, 2
        )
        out["[K-,K+K-] = K-"] = _rel(
            km(kpkm(p)).sheets - kpkm(km_p).sheets, km_p.sheets, km_p.sheets, 2
        )
        return out

    s = math.sqrt(abs(mu))
    sign = 1.0 if report.classification == SU_1_1 else -1.0
    kp = lambda st: st.with_sheets(bp(st).sheets / s)  # noqa: E731
    km = lambda st: st.with_sheets(bm(st).sheets / s)  # noqa: E731
    k0 = lambda st: st.with_sheets(sign * rop(st).sheets / (2 * abs(mu)))  # noqa: E731
    kp_p, km_p, k0_p = kp(p), km(p), k0(p)
    comm = kp(km_p).sheets - km(kp_p).sheets
    if report.classification == SU_1_1:
        out["[K+,K-] = -2K0"] = _rel(comm, -2 * k0_p.sheets, k0_p.sheets, 1)
    else:
        out["[K+,K-] = 2K0"] = _rel(comm, 2 * k0_p.sheets, k0_p.sheets, 1)
    out["[K0,K+] = K+"] = _rel(k0(kp_p).sheets - kp(k0_p).sheets, kp_p.sheets, kp_p.sheets, 1)
    out["[K0,K-] = -K-"] = _rel(k0(km_p).sheets - km(k0_p).sheets, -km_p.sheets, km_p.sheets, 1)
    return out


def verify_structure_constants(
    spec: SuperpotentialSpec, report: AlgebraReport, probe: TowerState
) -> float:
    return max(structure_residuals(spec, report, probe).values())
