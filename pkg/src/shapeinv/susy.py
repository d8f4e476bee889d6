"""Superpotentials, partner potentials, ground states and the raising-operator tower.

Parameter levels are 1-based: ``spec.param_at(1)`` is the parameter of the
physical Hamiltonian and ``spec.param_at(n + 1)`` is reached by ``n`` shifts.
Physical energy level ``m`` is built from the ground state at level ``m + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .numerics import (
    Grid,
    GridFunction,
    cumulative_values,
    derivative_values,
    integrate_values,
)

Superpotential = Callable[[np.ndarray, float], np.ndarray]


class SingularNodeError(ValueError):
    """Raised when an operation needs values at nodes where W is not finite."""

    def __init__(self, message: str, nodes: np.ndarray):
        super().__init__(f"{message}: {nodes.size} singular node(s), first at index {nodes[0]}")
        self.nodes = nodes


class NormalizabilityError(ValueError):
    """Raised when a requested level of the tower is not normalizable."""


@dataclass(frozen=True)
class SuperpotentialSpec:
    """W(r; a) with the translation a_{n+1} = a_n + step and remainder R(a).

    ``max_levels`` is the highest physical level index whose ground state at
    ``param_at(max_levels + 1)`` is normalizable; ``None`` means unbounded and
    ``-1`` means no bound level at all. ``eps0`` is the constant that turns
    W^2 - W' at the first level into the effective potential, when known in
    closed form.
    """

    superpotential: Superpotential
    first_param: float
    step: float
    remainder_of: Callable[[float], float]
    derivative_of: Optional[Superpotential] = None
    max_levels: Optional[int] = None
    eps0: Optional[float] = None
    name: str = ""

    def param_at(self, n: int) -> float:
        return self.first_param + (n - 1) * self.step

    def remainder(self, n: int) -> float:
        return float(self.remainder_of(self.param_at(n)))

    def eval(self, r, n: int) -> np.ndarray:
        return np.asarray(self.superpotential(np.asarray(r, dtype=float), self.param_at(n)))

    def level_allowed(self, m: int) -> bool:
        return self.max_levels is None or m <= self.max_levels


@dataclass(frozen=True, eq=False)
class PartnerPair:
    grid: Grid
    v_minus: np.ndarray
    v_plus: np.ndarray
    params_used: tuple[float, float]
    singular: np.ndarray  # node indices; both arrays hold NaN there


def _w_and_dw(spec: SuperpotentialSpec, n: int, grid: Grid):
    r = grid.r
    with np.errstate(all="ignore"):
        w = spec.eval(r, n)
        if spec.derivative_of is not None:
            dw = np.asarray(spec.derivative_of(r, spec.param_at(n)))
        else:
            dw = derivative_values(w, grid.spacing)
    bad = ~(np.isfinite(w) & np.isfinite(dw))
    if spec.derivative_of is None and bad.any():
        # stencils touching a singular node are contaminated too
        bad = np.convolve(bad, np.ones(3), mode="same") > 0
    return w, dw, np.flatnonzero(bad)


def partner_potentials(spec: SuperpotentialSpec, n: int, grid: Grid) -> PartnerPair:
    """V_- = W^2 - W' and V_+ = W^2 + W' at parameter level ``n``."""
    w, dw, singular = _w_and_dw(spec, n, grid)
    with np.errstate(all="ignore"):
        v_minus = w * w - dw
        v_plus = w * w + dw
    v_minus[singular] = np.nan
    v_plus[singular] = np.nan
    return PartnerPair(grid, v_minus, v_plus, (spec.param_at(n), spec.param_at(n + 1)), singular)


def shape_invariance_residual(spec: SuperpotentialSpec, n: int, grid: Grid) -> float:
    """max |V_+(r; a_n) - V_-(r; a_{n+1}) - R(a_n)| over non-singular nodes."""
    here = partner_potentials(spec, n, grid)
    there = partner_potentials(spec, n + 1, grid)
    diff = here.v_plus - there.v_minus - spec.remainder(n)
    ok = np.isfinite(diff)
    if not ok.any():
        raise SingularNodeError("no regular nodes", np.flatnonzero(~ok))
    return float(np.max(np.abs(diff[ok])))


def factorization_offset(
    spec: SuperpotentialSpec, u_eff: GridFunction, n: int = 1
) -> tuple[float, float]:
    """Constant eps0 with U_eff = W^2 - W' + eps0, and the worst deviation from it."""
    pair = partner_potentials(spec, n, u_eff.grid)
    diff = u_eff.values - pair.v_minus
    diff = diff[np.isfinite(diff)]
    offset = float(np.median(diff))
    return offset, float(np.max(np.abs(diff - offset)))


def _normalize(values: np.ndarray, h: float) -> np.ndarray:
    norm2 = integrate_values(values * values, h)
    if not norm2 > 0:
        raise NormalizabilityError("function vanishes on the grid")
    return values / np.sqrt(norm2)


def ground_state(spec: SuperpotentialSpec, n: int, grid: Grid) -> GridFunction:
    """exp(-int W) anchored at the grid midpoint, unit-normalized."""
    w, _, singular = _w_and_dw(spec, n, grid)
    if singular.size:
        raise SingularNodeError("superpotential is singular on the grid", singular)
    exponent = -cumulative_values(w, grid.spacing, grid.midpoint_index)
    psi = np.exp(exponent - exponent.max())
    return GridFunction(grid, _normalize(psi, grid.spacing))


def apply_raising(spec: SuperpotentialSpec, n: int, f: GridFunction) -> GridFunction:
    """A^dagger(a_n) f = -f' + W(r; a_n) f."""
    w = spec.eval(f.grid.r, n)
    return GridFunction(f.grid, -derivative_values(f.values, f.grid.spacing) + w * f.values)


def apply_lowering(spec: SuperpotentialSpec, n: int, f: GridFunction) -> GridFunction:
    """A(a_n) f = f' + W(r; a_n) f."""
    w = spec.eval(f.grid.r, n)
    return GridFunction(f.grid, derivative_values(f.values, f.grid.spacing) + w * f.values)


def check_level(spec: SuperpotentialSpec, m: int) -> None:
    """Raise NormalizabilityError unless physical level ``m`` is normalizable."""
    if m < 0:
        raise ValueError("level index must be non-negative")
    if not spec.level_allowed(m):
        raise NormalizabilityError(
            f"level {m} rejected: ground state at a_{m + 1} = {spec.param_at(m + 1):.6g} "
            f"is not normalizable (highest bound level is {spec.max_levels})"
        )
    total = 0.0
    for k in range(1, m + 1):
        total += spec.remainder(k)
        if not total > 0:
            raise NormalizabilityError(
                f"level {m} rejected: R(a_1) + ... + R(a_{k}) = {total:.6g} is not positive"
            )


def tower_state(spec: SuperpotentialSpec, m: int, grid: Grid) -> GridFunction:
    """Unit-normalized A^dagger(a_1) ... A^dagger(a_m) psi_0(a_{m+1})."""
    check_level(spec, m)
    f = ground_state(spec, m + 1, grid)
    for k in range(m, 0, -1):
        g = apply_raising(spec, k, f)
        f = GridFunction(grid, _normalize(g.values, grid.spacing))
    return f


def wavefunction_tower(spec: SuperpotentialSpec, n_max: int, grid: Grid) -> list[GridFunction]:
    """psi_0 .. psi_{n_max}, each built by the raising recursion and normalized."""
    check_level(spec, n_max)
    return [tower_state(spec, m, grid) for m in range(n_max + 1)]


def node_count(values: np.ndarray, rel_floor: float = 1e-6) -> int:
    """Sign changes among samples above ``rel_floor`` times the peak magnitude."""
    v = np.asarray(values)
    big = v[np.abs(v) > rel_floor * np.max(np.abs(v))]
    return int(np.count_nonzero(np.signbit(big[1:]) != np.signbit(big[:-1])))
