import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from shapeinv.families import (
    FiveParamExp,
    HarmonicKG,
    MorseKG,
    default_grid,
    effective_potential,
    normalizable_form,
    superpotential_spec,
)
from shapeinv.numerics import GridFunction, build_grid, integrate
from shapeinv.susy import (
    NormalizabilityError,
    SingularNodeError,
    SuperpotentialSpec,
    apply_lowering,
    apply_raising,
    check_level,
    factorization_offset,
    ground_state,
    node_count,
    partner_potentials,
    shape_invariance_residual,
    tower_state,
    wavefunction_tower,
)


def linear_spec(a):
    return SuperpotentialSpec(
        superpotential=lambda r, a: a * r,
        derivative_of=lambda r, a: np.full_like(r, a),
        first_param=a,
        step=0.0,
        remainder_of=lambda a: 2 * a,
        eps0=a,
    )


def zero_spec():
    return SuperpotentialSpec(lambda r, a: 0 * r, 0.0, 0.0, lambda a: 0.0)


MORSE = MorseKG(S0=1.0, V0=0.5, alpha=1.0, M=1.0)


# --- partner potentials and shape invariance ----------------------------------------


def test_partner_potentials_linear():
    g = build_grid(-3, 3, 61)
    pair = partner_potentials(linear_spec(2.0), 1, g)
    np.testing.assert_allclose(pair.v_minus, 4 * g.r**2 - 2, atol=1e-13)
    np.testing.assert_allclose(pair.v_plus, 4 * g.r**2 + 2, atol=1e-13)
    assert pair.singular.size == 0


def test_partner_potentials_zero():
    pair = partner_potentials(zero_spec(), 1, build_grid(0, 1, 20))
    assert np.all(pair.v_minus == 0) and np.all(pair.v_plus == 0)


def test_partner_potentials_morse_difference():
    spec = superpotential_spec(MORSE, 0.43)
    g = build_grid(0, 20, 2001)
    pair = partner_potentials(spec, 1, g)
    np.testing.assert_allclose(pair.v_plus - pair.v_minus, 2 * math.sqrt(0.75) * np.exp(-g.r), atol=1e-12)


def test_finite_difference_fallback_matches_closed_form():
    spec = superpotential_spec(MORSE, 0.43)
    fd = SuperpotentialSpec(spec.superpotential, spec.first_param, spec.step, spec.remainder_of)
    g = build_grid(0, 10, 4001)
    a, b = partner_potentials(spec, 1, g), partner_potentials(fd, 1, g)
    assert np.max(np.abs(a.v_minus - b.v_minus)) < 1e-5


def test_singular_nodes_are_flagged():
    spec = superpotential_spec(FiveParamExp(alpha=1.0, q=-1.0, Q2=-3.0, Q3=0.5))
    g = build_grid(-1, 1, 21)  # r = 0 is a node and is singular for q = -1
    pair = partner_potentials(spec, 1, g)
    assert 10 in pair.singular
    assert np.isnan(pair.v_minus[10])
    with pytest.raises(SingularNodeError):
        ground_state(spec, 1, g)


def test_harmonic_shape_invariance():
    spec = superpotential_spec(HarmonicKG(V0=1.0, M=1.0), 1.6169)
    assert shape_invariance_residual(spec, 1, default_grid(HarmonicKG(1.0, 1.0))) < 1e-12


def test_morse_shape_invariance():
    spec = superpotential_spec(MORSE, 0.43)
    assert shape_invariance_residual(spec, 1, build_grid(0, 20, 2001)) < 1e-10


def test_five_param_shape_invariance():
    p = FiveParamExp(alpha=1.0, q=1.0, g=0.0, Q2=3.0, Q3=1.0)
    assert shape_invariance_residual(superpotential_spec(p), 1, default_grid(p)) < 1e-9


def test_five_param_shape_invariance_symbolic():
    r, al, q, a, Q3 = sp.symbols("r alpha q a Q3", real=True)
    D = sp.exp(2 * al * r) + q
    W = lambda a: -a / (2 * q) + (a + Q3 * sp.exp(al * r)) / D  # noqa: E731
    a2 = a + 2 * al * q
    lhs = W(a) ** 2 + sp.diff(W(a), r)
    rhs = W(a2) ** 2 - sp.diff(W(a2), r)
    R = (a / (2 * q)) ** 2 - (a2 / (2 * q)) ** 2
    assert sp.simplify(lhs - rhs - R) == 0


def test_morse_shape_invariance_symbolic():
    r, al, b, a = sp.symbols("r alpha b a", positive=True)
    W = lambda a: a - b * sp.exp(-al * r)  # noqa: E731
    lhs = W(a) ** 2 + sp.diff(W(a), r)
    rhs = W(a - al) ** 2 - sp.diff(W(a - al), r)
    assert sp.expand(lhs - rhs - (2 * a - al) * al) == 0


# --- factorization ------------------------------------------------------------------


@pytest.mark.parametrize("E", [-0.5, 0.0, 0.43, 0.9])
def test_morse_factorization_offset(E):
    spec = superpotential_spec(MORSE, E)
    g = default_grid(MORSE)
    offset, dev = factorization_offset(spec, effective_potential(MORSE, E, g))
    assert offset == pytest.approx(spec.eps0, abs=1e-10)
    assert dev < 1e-9


def test_harmonic_factorization_offset():
    fam = HarmonicKG(V0=1.0, M=1.0)
    spec = superpotential_spec(fam, 1.6169)
    offset, dev = factorization_offset(spec, effective_potential(fam, 1.6169, default_grid(fam)))
    assert offset == pytest.approx(math.sqrt(2.6169), rel=1e-12)
    assert dev < 1e-9


# --- ground state and tower ---------------------------------------------------------


def test_harmonic_ground_state_gaussian():
    g = build_grid(-8, 8, 1601)
    psi = ground_state(linear_spec(1.0), 1, g)
    exact = np.exp(-g.r**2 / 2) / math.pi**0.25
    assert np.max(np.abs(psi.values - exact)) < 1e-6
    assert integrate(GridFunction(g, psi.values**2)) == pytest.approx(1, abs=1e-12)


def test_morse_ground_state_is_annihilated():
    spec = superpotential_spec(MORSE, 0.43)
    g = default_grid(MORSE)
    psi = ground_state(spec, 1, g)
    low = apply_lowering(spec, 1, psi)
    assert np.max(np.abs(low.values)) / np.max(np.abs(psi.values)) < 1e-5


@pytest.mark.parametrize("n_points", [801, 1601, 3201])
def test_lowering_residual_is_second_order(n_points):
    g = build_grid(-3, 12, n_points)
    spec = superpotential_spec(MORSE, 0.43)
    psi = ground_state(spec, 1, g)
    ratio = np.max(np.abs(apply_lowering(spec, 1, psi).values)) / np.max(np.abs(psi.values))
    # measured C = 0.3532 for this family and window, independent of h
    assert ratio <= 0.36 * g.spacing**2


def test_raising_examples():
    g = build_grid(0, 1, 51)
    out = apply_raising(zero_spec(), 1, GridFunction.sample(g, lambda r: r))
    np.testing.assert_allclose(out.values, -1.0, atol=1e-12)
    z = apply_raising(linear_spec(1.0), 1, GridFunction(g, np.zeros(51)))
    assert np.all(z.values == 0)


def test_raising_ground_state_is_orthogonal_to_it():
    g = build_grid(-8, 8, 3201)
    spec = linear_spec(1.0)
    psi0 = ground_state(spec, 1, g)
    up = apply_raising(spec, 1, psi0)
    assert abs(integrate(GridFunction(g, up.values * psi0.values))) < 1e-4


def test_harmonic_tower_parity_and_nodes():
    g = build_grid(-8, 8, 3201)
    tower = wavefunction_tower(linear_spec(1.3), 2, g)
    assert [node_count(t.values) for t in tower] == [0, 1, 2]
    np.testing.assert_allclose(tower[1].values, -tower[1].values[::-1], atol=1e-10)
    np.testing.assert_allclose(tower[2].values, tower[2].values[::-1], atol=1e-10)
    for i in range(3):
        for j in range(i):
            assert abs(integrate(GridFunction(g, tower[i].values * tower[j].values))) < 5e-4


def test_tower_zero_is_ground_state():
    g = build_grid(-6, 6, 601)
    spec = linear_spec(1.0)
    np.testing.assert_array_equal(wavefunction_tower(spec, 0, g)[0].values, ground_state(spec, 1, g).values)


def test_morse_level_one_rejected_at_small_a1():
    spec = superpotential_spec(MORSE, 0.43)
    assert spec.param_at(1) == pytest.approx(0.9029, abs=1e-4)
    with pytest.raises(NormalizabilityError):
        wavefunction_tower(spec, 1, default_grid(MORSE))


def test_non_positive_remainder_sum_is_rejected():
    spec = SuperpotentialSpec(lambda r, a: a * r, 1.0, 0.0, lambda a: -1.0)
    with pytest.raises(NormalizabilityError, match="not positive"):
        check_level(spec, 1)
    check_level(spec, 0)


def test_five_param_tower_states_are_orthonormal():
    p = normalizable_form(FiveParamExp(alpha=1.0, q=1.0, Q2=-8.0, Q3=0.5))
    spec = superpotential_spec(p)
    assert spec.max_levels >= 2
    g = default_grid(p)
    states = [tower_state(spec, m, g) for m in range(3)]
    for i in range(3):
        assert node_count(states[i].values) == i
        for j in range(i):
            assert abs(integrate(GridFunction(g, states[i].values * states[j].values))) < 5e-4


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0.3, 4.0), n=st.integers(1, 4))
def test_linear_superpotential_invariance_property(a, n):
    g = build_grid(-5, 5, 201)
    assert shape_invariance_residual(linear_spec(a), n, g) < 1e-12
