import numpy as np
import pytest

import specpol as sp
from specpol.errors import DomainError, RankWarning, TooFewSamples

from conftest import MU_PAPER


def test_equispaced_fourth_roots():
    snaps = sp.make_snapshots(sp.blaschke1(0.0), 4, sp.SamplingScheme.EQUISPACED_CIRCLE)
    np.testing.assert_allclose(snaps.X[:, 0], [1, 1j, -1, -1j], atol=1e-15)
    np.testing.assert_allclose(snaps.weights, 0.25)


def test_snapshots_spot_check_against_map(b1_map):
    snaps = sp.make_snapshots(b1_map, 1000, sp.SamplingScheme.EQUISPACED_CIRCLE)
    idx = [0, 137, 999]
    np.testing.assert_allclose(snaps.Y[idx, 0], sp.eval_map(b1_map, snaps.X[idx, 0]),
                               atol=1e-14)


def test_trajectory_pairing_and_stride():
    traj = np.arange(3.0)
    snaps = sp.snapshots_from_trajectory(traj, stride=1)
    assert snaps.n_pairs == 2
    big = np.zeros((125_000, 2))
    assert sp.snapshots_from_trajectory(big, stride=50).n_pairs == 2499
    with pytest.raises(TooFewSamples):
        sp.snapshots_from_trajectory(traj, stride=3)


def test_constant_dictionary_all_ones(b1_map):
    snaps = sp.make_snapshots(b1_map, 16, sp.SamplingScheme.EQUISPACED_CIRCLE)
    dm = sp.assemble_data_matrices(sp.fourier_dictionary(1), snaps)
    np.testing.assert_allclose(dm.psi_x, 1.0)
    np.testing.assert_allclose(dm.psi_y, 1.0)


def test_quadrature_exactness_identity_gram(b1_setup):
    _, _, dm = b1_setup
    gram = dm.psi_x.conj().T @ dm.psi_x / dm.n_pairs
    assert np.abs(gram - np.eye(41)).max() < 1e-14


def test_doubling_map_column_identity():
    snaps = sp.make_snapshots(sp.blaschke1(0.0), 16, sp.SamplingScheme.EQUISPACED_CIRCLE)
    d = sp.fourier_dictionary(5)
    dm = sp.assemble_data_matrices(d, snaps)
    for col, n in enumerate(d.indices):
        if 2 * n in d.indices:
            np.testing.assert_allclose(dm.psi_y[:, col],
                                       dm.psi_x[:, d.indices.index(2 * n)], atol=1e-13)


def test_monte_carlo_gram_convergence_rate(b1_map):
    d = sp.fourier_dictionary(11)
    errs = []
    for m in (1000, 10_000):
        snaps = sp.make_snapshots(b1_map, m, sp.SamplingScheme.MONTE_CARLO, seed=0)
        dm = sp.assemble_data_matrices(d, snaps)
        gram = dm.psi_x.conj().T @ dm.psi_x / m
        errs.append(np.linalg.norm(gram - np.eye(11)))
    slope = np.log(errs[1] / errs[0]) / np.log(10.0)
    assert slope == pytest.approx(-0.5, abs=0.15)


def test_monte_carlo_seed_reproducible(b1_map):
    a = sp.make_snapshots(b1_map, 64, sp.SamplingScheme.MONTE_CARLO, seed=9)
    b = sp.make_snapshots(b1_map, 64, sp.SamplingScheme.MONTE_CARLO, seed=9)
    np.testing.assert_array_equal(a.X, b.X)


def test_index_ranges():
    assert sp.fourier_dictionary(41).indices == tuple(range(-20, 21))
    assert sp.fourier_dictionary(50).indices == tuple(range(-25, 25))
    with pytest.raises(DomainError):
        sp.fourier_dictionary(0)


def test_rank_warning_on_deficient_data():
    x = np.ones(8, dtype=complex)[:, None]  # eight copies of the same state
    snaps = sp.SnapshotSet(x, x, np.full(8, 1 / 8), sp.SamplingScheme.TRAJECTORY_PAIRS)
    with pytest.warns(RankWarning):
        sp.assemble_data_matrices(sp.fourier_dictionary(3), snaps)


def test_invalid_snapshot_count(b1_map):
    with pytest.raises(DomainError):
        sp.make_snapshots(b1_map, 0, sp.SamplingScheme.EQUISPACED_CIRCLE)


def test_pi_scaling_dictionary_evaluates_half_modes():
    d = sp.fourier_dictionary(3, pi_scaling=True)
    z = np.exp(0.4j)
    vals = sp.dictionaries.evaluate_dictionary(d, [z])[0]
    np.testing.assert_allclose(vals, np.exp(1j * np.pi * np.array([-1, 0, 1]) * 0.4),
                               atol=1e-14)
