"""Superoperator construction, tilting, and Perron extraction."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oqwalk import (
    apply_L,
    apply_M,
    build_superop,
    default_initial_state,
    deform,
    log_lambda,
    perron,
    spectral_radius,
)
from oqwalk.superop import deform_weighted, derivative_maps, weighted_superop
import reference
from model_zoo import diagonal_pair_model, random_isometry_model


def random_density(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def test_superop_matches_direct_kraus_application(std_model):
    rng = np.random.default_rng(0)
    s = build_superop(std_model)
    for _ in range(5):
        rho = random_density(rng, 2)
        np.testing.assert_allclose(s.apply(rho), apply_L(std_model, rho), atol=1e-14)


def test_build_superop_preserves_trace(all_builtins):
    rng = np.random.default_rng(1)
    for name, model in all_builtins.items():
        s = build_superop(model)
        rho = random_density(rng, model.internal_dim)
        assert abs(np.trace(s.apply(rho)) - 1.0) < 1e-12, name


@given(st.integers(min_value=0, max_value=10**6))
def test_random_models_preserve_trace(seed):
    model = random_isometry_model(seed, n=2)
    rho = random_density(np.random.default_rng(seed + 1), 2)
    assert abs(np.trace(apply_L(model, rho)) - 1.0) < 1e-12


def test_deform_at_zero_is_the_plain_map(std_model):
    np.testing.assert_allclose(
        deform(std_model, 0.0).matrix, build_superop(std_model).matrix, atol=0
    )


def test_deform_weights_each_step(periodic_model):
    u = 0.37
    weights = np.exp(np.asarray([s[0] for s in periodic_model.displacements]) * u)
    np.testing.assert_allclose(
        deform(periodic_model, u).matrix,
        weighted_superop(periodic_model, weights).matrix,
        atol=1e-15,
    )
    np.testing.assert_allclose(
        deform_weighted(periodic_model, np.array([1.0, -1.0]), u).matrix,
        deform(periodic_model, u).matrix,
        atol=1e-15,
    )


def test_derivative_maps_weight_by_step_powers(std_model):
    rng = np.random.default_rng(3)
    rho = random_density(rng, 2)
    d1, d2 = derivative_maps(std_model, np.array([1.0]))
    lp, lm = std_model.operators
    np.testing.assert_allclose(
        d1.apply(rho), lp @ rho @ lp.conj().T - lm @ rho @ lm.conj().T, atol=1e-14
    )
    np.testing.assert_allclose(
        d2.apply(rho), lp @ rho @ lp.conj().T + lm @ rho @ lm.conj().T, atol=1e-14
    )


def test_power_apply_iterates_the_map(std_model):
    rng = np.random.default_rng(4)
    rho = random_density(rng, 2)
    s = build_superop(std_model)
    out = rho
    for _ in range(5):
        out = s.apply(out)
    np.testing.assert_allclose(s.power_apply(rho, 5), out, atol=1e-13)


def test_apply_M_moves_mass_where_it_should(classical_model):
    state = default_initial_state(classical_model)
    moved = apply_M(classical_model, state)
    assert moved.positions == [(-1,), (1,)]
    np.testing.assert_allclose(moved.blocks[(1,)], [[0.5]], atol=1e-15)
    assert moved.total_trace() == pytest.approx(1.0)


def test_spectral_radius_is_one_untilted(all_builtins):
    for name, model in all_builtins.items():
        assert spectral_radius(build_superop(model)) == pytest.approx(1.0, abs=1e-12), name


def test_perron_on_the_standard_model(std_model):
    data = perron(build_superop(std_model))
    assert data.lambda_u == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(data.rho_u, np.eye(2) / 2, atol=1e-10)
    # adjoint fixed point of a trace-preserving map is the identity,
    # normalized so that Tr(m rho) = 1
    np.testing.assert_allclose(data.m_u, np.eye(2), atol=1e-10)
    assert not data.degenerate
    assert data.gap > 0.1
    assert data.residual < 1e-10


def test_perron_normalization_holds_when_tilted(periodic_model):
    data = perron(deform(periodic_model, 0.8))
    assert np.trace(data.m_u @ data.rho_u).real == pytest.approx(1.0, abs=1e-10)
    assert np.linalg.norm(data.m_u - data.m_u.conj().T) < 1e-10
    assert abs(np.trace(data.rho_u) - 1.0) < 1e-12


def test_perron_flags_true_degeneracy_but_not_phase_ties(periodic_model):
    # two invariant rays: eigenvalue 1 is genuinely repeated
    data = perron(build_superop(diagonal_pair_model(3)))
    assert data.degenerate
    # period two: -1 ties the modulus but sits at a different phase
    data = perron(build_superop(periodic_model))
    assert not data.degenerate
    assert data.lambda_u == pytest.approx(1.0, abs=1e-12)


def test_log_lambda_agrees_with_closed_forms(std_model, periodic_model):
    for u in (-2.0, -0.5, 0.0, 0.7, 2.0):
        assert log_lambda(std_model, u) == pytest.approx(
            float(np.log(reference.std_lambda(u))), abs=1e-11
        )
        assert log_lambda(periodic_model, u) == pytest.approx(
            float(reference.periodic_log_lambda(u)), abs=1e-11
        )


def test_log_lambda_survives_huge_tilts(std_model):
    # naive exponentiation of the weights would overflow long before u = 600
    for u, expected in ((600.0, 600.0 - np.log(3.0)), (-600.0, 600.0 - np.log(3.0))):
        assert np.isfinite(log_lambda(std_model, u))
        assert log_lambda(std_model, u) == pytest.approx(expected, abs=1e-9)


def test_log_lambda_matches_reference_at_moderate_tilts(std_model):
    for u in (-200.0, -50.0, 50.0, 200.0):
        expected = float(np.log(reference.std_lambda(u)))
        assert log_lambda(std_model, u) == pytest.approx(expected, rel=1e-12)
