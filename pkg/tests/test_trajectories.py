"""Trajectory engine: seeding, exact small-horizon oracles, standardization."""
import io

import numpy as np
import pytest

from oqwalk import (
    DegenerateStepError,
    KrausModel,
    LatticeState,
    PathBudgetError,
    StandardizationError,
    TraceDriftError,
    batch_statistics,
    builtin,
    exact_distribution,
    mgf_check,
    point_initial_state,
    sample_trajectory,
    write_batch_csv,
)
from oqwalk.rng import derive_seed, derive_seeds
import reference
from model_zoo import NN_STEPS, broken_scaled_model


E2 = np.array([[0.0, 0.0], [0.0, 1.0]])


# -- seeding and reproducibility ----------------------------------------------

def test_batches_are_reproducible_and_seed_sensitive(std_model):
    a = batch_statistics(std_model, 40, 64, seed=123)
    b = batch_statistics(std_model, 40, 64, seed=123)
    assert np.array_equal(a.finals, b.finals)
    assert np.array_equal(a.standardized, b.standardized)
    assert a.ks_distance == b.ks_distance
    c = batch_statistics(std_model, 40, 64, seed=124)
    assert not np.array_equal(a.finals, c.finals)


def test_batch_rows_replay_as_single_trajectories(std_model):
    root = 2024
    batch = batch_statistics(std_model, 30, 512, seed=root)
    assert np.array_equal(batch.stream_seeds, derive_seeds(root, 512))
    for i in (0, 7, 499):
        tr = sample_trajectory(std_model, 30, derive_seed(root, i))
        assert tr.stream_seed == int(derive_seed(root, i))
        assert np.array_equal(tr.positions[-1], batch.finals[i])
        assert np.array_equal(tr.positions[0], batch.initials[i])


def test_trajectory_record_is_internally_consistent(periodic_model):
    tr = sample_trajectory(periodic_model, 50, stream_seed=99)
    assert tr.positions.shape == (51, 1) and tr.positions.dtype == np.int64
    assert tr.states.shape == (51, 2, 2)
    assert tr.step_indices.shape == (50,)
    assert np.array_equal(tr.positions[0], [0])  # default start: origin
    steps = periodic_model.steps_array
    np.testing.assert_array_equal(np.diff(tr.positions, axis=0),
                                  steps[tr.step_indices])
    np.testing.assert_allclose(np.trace(tr.states, axis1=1, axis2=2),
                               1.0, atol=1e-10)
    # collapse rule: each state is the renormalized image of its predecessor
    for p in range(5):
        op = periodic_model.operators[tr.step_indices[p]]
        new = op @ tr.states[p] @ op.conj().T
        np.testing.assert_allclose(tr.states[p + 1], new / np.trace(new).real,
                                   atol=1e-12)


def test_initial_site_is_drawn_from_the_initial_state(std_model):
    blocks = {(0,): np.eye(2) / 4, (3,): np.eye(2) / 4}
    start = LatticeState(blocks)
    batch = batch_statistics(std_model, 5, 400, seed=7, initial_state=start)
    starts = set(int(v) for v in batch.initials[:, 0])
    assert starts == {0, 3}
    frac = float(np.mean(batch.initials[:, 0] == 0))
    assert 0.35 < frac < 0.65


# -- exact distribution oracle --------------------------------------------------

def test_classical_distribution_is_binomial():
    for q in (0.5, 0.7):
        model = builtin("classical_dilation", p=q)
        dist = exact_distribution(model, 7)
        assert dist.tv_gap <= 1e-10
        assert sum(dist.masses.values()) == pytest.approx(1.0, abs=1e-12)
        for j in range(8):
            pos = (2 * j - 7,)
            assert dist.masses[pos] == pytest.approx(
                reference.binomial_mass(7, j, q), abs=1e-13)


def test_exact_distribution_routes_agree_on_builtins(all_builtins):
    for name, model in all_builtins.items():
        dist = exact_distribution(model, 6)
        assert dist.tv_gap <= 1e-10, name
        assert sum(dist.masses.values()) == pytest.approx(1.0, abs=1e-10)
        assert set(dist.masses) == set(dist.masses_iterated)


def test_ballistic_corner_of_the_breakdown_model(breakdown_model):
    start = point_initial_state(breakdown_model, E2)
    lp = np.asarray(breakdown_model.operators[0])
    e2 = np.array([0.0, 1.0], dtype=complex)
    for n in range(1, 9):
        dist = exact_distribution(breakdown_model, n, initial_state=start)
        # only the all-plus word reaches position n
        expected = reference.breakdown_return_probability(n)
        assert dist.masses[(n,)] == pytest.approx(expected, abs=1e-12)
        power = np.linalg.matrix_power(lp, n) @ e2
        assert dist.masses[(n,)] == pytest.approx(
            float(np.vdot(power, power).real), abs=1e-12)


def test_path_budget_is_enforced(std_model):
    with pytest.raises(PathBudgetError):
        exact_distribution(std_model, 25)
    with pytest.raises(PathBudgetError):
        mgf_check(std_model, 0.5, 25)
    # a tighter explicit budget trips earlier
    with pytest.raises(PathBudgetError):
        exact_distribution(std_model, 5, max_paths=16)


# -- moment generating function oracle --------------------------------------------

def test_mgf_routes_agree(std_model, periodic_model, antidiag_model):
    for model, u, p in ((std_model, 0.5, 6), (periodic_model, -1.0, 5),
                        (antidiag_model, 1.0, 4)):
        report = mgf_check(model, u, p)
        assert report.relative_gap <= 1e-12
        assert report.path_value > 0


def test_classical_mgf_value_is_cosh_power(classical_model):
    u, p = 0.8, 5
    report = mgf_check(classical_model, u, p)
    assert report.path_value == pytest.approx(float(np.cosh(u) ** p), abs=1e-12)
    assert report.tilted_value == pytest.approx(float(np.cosh(u) ** p), abs=1e-12)


# -- sampled law vs exact law -------------------------------------------------------

def test_sampled_endpoints_match_the_exact_law(classical_model, std_model):
    for model, p_steps in ((classical_model, 6), (std_model, 5)):
        n_traj = 20000
        batch = batch_statistics(model, p_steps, n_traj, seed=31)
        dist = exact_distribution(model, p_steps)
        counts = {}
        for v in batch.finals[:, 0]:
            counts[int(v)] = counts.get(int(v), 0) + 1
        for pos, mass in dist.masses.items():
            freq = counts.get(pos[0], 0) / n_traj
            band = 4.0 * np.sqrt(mass * (1 - mass) / n_traj) + 1e-12
            assert abs(freq - mass) <= band, (pos, freq, mass)


# -- standardization and failure modes ----------------------------------------------

def test_deterministic_walk_standardizes_to_zero():
    model = builtin("classical_dilation", p=1.0)
    batch = batch_statistics(model, 20, 50, seed=5)
    assert np.all(batch.finals[:, 0] == 20)
    np.testing.assert_array_equal(batch.standardized, 0.0)
    np.testing.assert_array_equal(batch.variance_standardized, 0.0)


def test_fluctuations_outside_a_degenerate_covariance_are_rejected(std_model):
    with pytest.raises(StandardizationError):
        batch_statistics(std_model, 100, 16, seed=1,
                         mean=[0.0], covariance=[[0.0]])


def test_vanishing_step_probabilities_are_detected():
    ops = [np.array([[1.0, 0.0], [0.0, 0.0]]), np.zeros((2, 2))]
    model = KrausModel(1, 2, NN_STEPS, tuple(np.asarray(o, complex) for o in ops))
    start = point_initial_state(model, E2)
    with pytest.raises(DegenerateStepError):
        sample_trajectory(model, 3, stream_seed=0, initial_state=start)


def test_trace_drift_is_detected_immediately():
    with pytest.raises(TraceDriftError):
        sample_trajectory(broken_scaled_model(), 3, stream_seed=0)


def test_ks_distance_recomputes_from_the_standardized_sample(std_model):
    batch = batch_statistics(std_model, 200, 400, seed=11)
    zs = np.sort(batch.standardized[:, 0])
    n = len(zs)
    cdf = np.array([reference.normal_cdf(z) for z in zs])
    up = np.max(np.arange(1, n + 1) / n - cdf)
    down = np.max(cdf - np.arange(0, n) / n)
    assert batch.ks_distance == pytest.approx(float(max(up, down)), abs=1e-12)
    assert abs(batch.mean_standardized[0]) < 0.25
    assert batch.variance_standardized[0] == pytest.approx(1.0, abs=0.35)


# -- CSV output ------------------------------------------------------------------

def test_batch_csv_round_trips(periodic_model):
    batch = batch_statistics(periodic_model, 12, 8, seed=77)
    buf = io.StringIO()
    write_batch_csv(batch, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "index,seed,x_final_0,standardized_0"
    assert len(lines) == 9
    for i, line in enumerate(lines[1:]):
        idx, seed, xf, z = line.split(",")
        assert int(idx) == i
        assert int(seed) == int(batch.stream_seeds[i])
        assert int(xf) == int(batch.finals[i, 0])
        assert float(z) == float(batch.standardized[i, 0])
