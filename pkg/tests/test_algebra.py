import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapeinv.algebra import (
    HEISENBERG_WEYL,
    NOT_FINITE,
    SU_1_1,
    SU_2,
    RSequence,
    TowerState,
    algebra_report,
    apply_B_minus,
    apply_B_plus,
    apply_R,
    classify_algebra,
    commutator_residual,
    ground_tower,
    r_sequence,
    shift_parameters,
    structure_residuals,
    verify_structure_constants,
)
from shapeinv.families import FiveParamExp, HarmonicKG, MorseKG, normalizable_form, superpotential_spec
from shapeinv.numerics import build_grid
from shapeinv.numerics import GridFunction
from shapeinv.susy import SuperpotentialSpec, apply_lowering, apply_raising, shape_invariance_residual

HARMONIC = superpotential_spec(HarmonicKG(V0=1.0, M=1.0), 1.618)
MORSE = superpotential_spec(MorseKG(S0=1.0, V0=0.5, alpha=1.0, M=1.0), 0.43)
FIVE = superpotential_spec(normalizable_form(FiveParamExp(alpha=1.0, q=1.0, Q2=3.0, Q3=0.5)))


def gaussian_probe(lo, hi, h, depth=6):
    g = build_grid(lo, hi, int(round((hi - lo) / h)) + 1)
    c = 0.5 * (lo + hi)
    return TowerState.uniform(g, np.exp(-((g.r - c) ** 2)), depth)


# --- tower plumbing -------------------------------------------------------------------


def test_tower_state_validation():
    g = build_grid(0, 1, 20)
    with pytest.raises(ValueError):
        TowerState(g, np.zeros((1, 20)))
    with pytest.raises(ValueError):
        TowerState(g, np.zeros((3, 19)))


def test_shift_parameters_is_exact_index_shift():
    g = build_grid(0, 1, 20)
    s = TowerState(g, np.arange(60.0).reshape(3, 20))
    up = shift_parameters(s, "up").sheets
    down = shift_parameters(s, "down").sheets
    np.testing.assert_array_equal(up[:2], s.sheets[1:])
    assert np.all(up[2] == 0)
    np.testing.assert_array_equal(down[1:], s.sheets[:2])
    with pytest.raises(ValueError):
        shift_parameters(s, "sideways")


def test_b_plus_is_raising_on_shifted_sheet():
    probe = gaussian_probe(-3, 12, 0.01, depth=4)
    out = apply_B_plus(MORSE, probe).sheets
    for k in range(3):
        want = apply_raising(MORSE, k + 1, GridFunction(probe.grid, probe.sheets[k + 1])).values
        np.testing.assert_allclose(out[k], want, atol=1e-12)


def test_b_minus_is_lowering_then_shift():
    probe = gaussian_probe(-3, 12, 0.01, depth=4)
    out = apply_B_minus(MORSE, probe).sheets
    assert np.all(out[0] == 0)
    for k in range(1, 4):
        want = apply_lowering(MORSE, k, GridFunction(probe.grid, probe.sheets[k - 1])).values
        np.testing.assert_allclose(out[k], want, atol=1e-12)


def test_apply_r_uses_level_of_each_sheet():
    probe = gaussian_probe(-3, 12, 0.05, depth=4)
    out = apply_R(MORSE, probe).sheets
    for k in range(4):
        np.testing.assert_allclose(out[k], MORSE.remainder(k) * probe.sheets[k])


def test_b_minus_annihilates_ground_tower():
    g = build_grid(-6, 6, 3001)
    tower = ground_tower(HARMONIC, g, 4)
    low = apply_B_minus(HARMONIC, tower).sheets
    # sheet k of the result is A(a_k) psi_0(a_k)
    for k in range(1, 4):
        assert np.max(np.abs(low[k])) / np.max(tower.sheets[k - 1]) < 1e-4


def test_b_minus_b_plus_on_ground_sheet():
    g = build_grid(-6, 6, 3001)
    tower = ground_tower(HARMONIC, g, 4)
    out = apply_B_minus(HARMONIC, apply_B_plus(HARMONIC, tower)).sheets
    # sheet j carries A(a_j) A^dagger(a_j) psi_0(a_{j+1}) = R(a_j) psi_0(a_{j+1})
    ref = HARMONIC.remainder(1) * tower.sheets[1]
    core = slice(5, -5)
    assert np.max(np.abs(out[1][core] - ref[core])) / np.max(np.abs(ref)) < 1e-4


# --- classification --------------------------------------------------------------------


def test_family_classifications():
    assert algebra_report(HARMONIC).classification == HEISENBERG_WEYL
    assert algebra_report(MORSE).classification == SU_1_1
    assert algebra_report(FIVE).classification == SU_1_1


def test_morse_fit_constants():
    rep = algebra_report(MORSE)
    assert rep.mu == pytest.approx(-1.0)
    a1 = MORSE.param_at(1)
    # R(a_n) = 2 mu n + nu - mu
    assert rep.nu - rep.mu + 2 * rep.mu == pytest.approx((2 * a1 - 1) * 1)
    assert rep.kappa == MORSE.eps0
    assert rep.max_second_difference <= 1e-10


def test_classify_synthetic_sequences():
    lin = lambda m, c: RSequence(np.array([2 * m * n + c for n in range(1, 8)]), 0.0, 1.0)  # noqa: E731
    assert classify_algebra(lin(0.0, 3.0)).classification == HEISENBERG_WEYL
    assert classify_algebra(lin(-0.5, 3.0)).classification == SU_1_1
    assert classify_algebra(lin(0.5, 3.0)).classification == SU_2
    quad = RSequence(np.array([n**2 for n in range(1, 8)], dtype=float), 0.0, 1.0)
    assert classify_algebra(quad).classification == NOT_FINITE


def test_r_sequence_needs_three_values():
    with pytest.raises(ValueError):
        RSequence(np.array([1.0, 2.0]), 0.0, 1.0)
    with pytest.raises(ValueError):
        r_sequence(MORSE, 2)


def test_non_shape_invariant_five_param_is_not_finite():
    spec = superpotential_spec(FiveParamExp(alpha=1.0, q=1.0, g=2.0, Q2=1.5, Q3=0.0))
    assert algebra_report(spec).classification == NOT_FINITE


@settings(max_examples=60, deadline=None)
@given(
    mu=st.floats(-5, 5).filter(lambda m: abs(m) > 1e-3 or m == 0),
    nu=st.floats(-10, 10),
    count=st.integers(3, 12),
)
def test_classification_recovers_mu_and_nu(mu, nu, count):
    n = np.arange(1, count + 1)
    rep = classify_algebra(RSequence(2 * mu * n + nu - mu, 0.0, 1.0))
    assert rep.mu == pytest.approx(mu, abs=1e-9 * (1 + abs(nu)))
    assert rep.nu == pytest.approx(nu, abs=1e-8 * (1 + abs(mu) + abs(nu)))
    want = HEISENBERG_WEYL if mu == 0 else (SU_1_1 if mu < 0 else SU_2)
    assert rep.classification == want


# --- commutators ----------------------------------------------------------------------


CASES = [(HARMONIC, -6, 6), (MORSE, -3, 12), (FIVE, -6, 6)]


@pytest.mark.parametrize("spec,lo,hi", CASES)
def test_commutator_residual_small(spec, lo, hi):
    assert commutator_residual(spec, gaussian_probe(lo, hi, 4e-3)) <= 1e-3


@pytest.mark.parametrize("spec,lo,hi", CASES)
def test_commutator_residual_is_second_order(spec, lo, hi):
    r1 = commutator_residual(spec, gaussian_probe(lo, hi, 8e-3))
    r2 = commutator_residual(spec, gaussian_probe(lo, hi, 4e-3))
    assert r1 / r2 >= 3


def test_commutator_needs_depth_three():
    with pytest.raises(ValueError):
        commutator_residual(MORSE, gaussian_probe(-3, 12, 0.05, depth=2))


@pytest.mark.parametrize("spec,lo,hi", CASES)
def test_structure_constants(spec, lo, hi):
    rep = algebra_report(spec)
    res = structure_residuals(spec, rep, gaussian_probe(lo, hi, 4e-3))
    assert max(res.values()) <= 1e-3
    assert verify_structure_constants(spec, rep, gaussian_probe(lo, hi, 4e-3)) == max(res.values())


def test_structure_constants_su2():
    # W = a tan r on (-pi/2, pi/2): a -> a + 1 and R(a) = 2a + 1 grows, so mu > 0
    spec = SuperpotentialSpec(
        superpotential=lambda r, a: a * np.tan(r),
        derivative_of=lambda r, a: a / np.cos(r) ** 2,
        first_param=2.0,
        step=1.0,
        remainder_of=lambda a: 2 * a + 1,
    )
    g = build_grid(-1.2, 1.2, 601)
    assert shape_invariance_residual(spec, 1, g) < 1e-10
    rep = algebra_report(spec)
    assert rep.classification == SU_2
    assert rep.mu == pytest.approx(1.0)
    lo, hi, h = -1.2, 1.2, 2e-3
    grid = build_grid(lo, hi, int(round((hi - lo) / h)) + 1)
    probe = TowerState.uniform(grid, np.exp(-((grid.r / 0.25) ** 2)), 6)
    assert max(structure_residuals(spec, rep, probe).values()) <= 1e-3


def test_structure_constants_reject_not_finite():
    spec = superpotential_spec(FiveParamExp(alpha=1.0, q=1.0, g=2.0, Q2=1.5, Q3=0.0))
    rep = algebra_report(spec)
    with pytest.raises(ValueError):
        structure_residuals(spec, rep, gaussian_probe(-6, 6, 0.05))


def test_report_with_probe_carries_residual():
    rep = algebra_report(MORSE, probe=gaussian_probe(-3, 12, 4e-3))
    assert 0 < rep.commutator_residual <= 1e-3
    assert math.isnan(algebra_report(MORSE).commutator_residual)
