import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import specpol as sp
from specpol.errors import DomainError, EmptySet

from conftest import MU_PAPER, two_well_trajectory

finite_complex = st.complex_numbers(max_magnitude=2.0, allow_nan=False,
                                    allow_infinity=False)


def test_classify_accepts_fixed_constant_eigenvalue(b1_hardy):
    ev = sp.ResdmdEvaluator(b1_hardy)
    report = sp.classify_eigenvalues([1.0 + 0j], ev.at, 1e-2)
    assert report.accepted[0]
    assert report.residuals[0] < 1e-10


def test_classify_empty_list(b1_hardy):
    ev = sp.ResdmdEvaluator(b1_hardy)
    report = sp.classify_eigenvalues([], ev.at, 1e-2)
    assert report.eigenvalues.size == 0 and report.accepted.size == 0


def test_classify_sorted_and_truth_distance(b1_hardy, b1_map):
    ev = sp.ResdmdEvaluator(b1_hardy)
    truth = sp.true_spectrum(b1_map)
    eigs = [0.1 + 0j, 1.0 + 0j, MU_PAPER]
    report = sp.classify_eigenvalues(eigs, ev.at, 1e-2, truth=truth)
    assert abs(report.eigenvalues[0]) >= abs(report.eigenvalues[-1])
    assert report.truth_match[0] < 1e-12  # the eigenvalue 1 heads the list


def test_classify_nan_residual_not_accepted():
    report = sp.classify_eigenvalues([0.5 + 0j], lambda z: np.nan, 1.0)
    assert not report.accepted[0]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=0, max_value=2, allow_nan=False), min_size=1,
                max_size=12),
       st.floats(min_value=0.01, max_value=1), st.floats(min_value=0.01, max_value=1))
def test_classify_monotone_in_epsilon(residuals, e1, e2):
    lo, hi = sorted([e1, e2])
    eigs = np.arange(1, len(residuals) + 1).astype(complex)
    table = dict(zip(eigs, residuals))
    small = sp.classify_eigenvalues(eigs, lambda z: table[z], lo)
    large = sp.classify_eigenvalues(eigs, lambda z: table[z], hi)
    assert set(small.eigenvalues[small.accepted]) <= set(large.eigenvalues[large.accepted])


def test_hausdorff_identical_and_floor():
    ts = sp.TrueSpectrum(base=1.0, n_max=0, points=(1.0 + 0j, 0j))
    assert sp.hausdorff_to_truth([1.0 + 0j, 0j], ts) == 0.0
    assert sp.hausdorff_to_truth([1.0 + 0j], ts, modulus_floor=0.5) == 0.0
    with pytest.raises(EmptySet):
        sp.hausdorff_to_truth([0.1 + 0j], ts, modulus_floor=0.5)


@settings(max_examples=30, deadline=None)
@given(st.lists(finite_complex, min_size=1, max_size=8),
       st.lists(finite_complex, min_size=1, max_size=8),
       st.lists(finite_complex, min_size=1, max_size=8))
def test_hausdorff_symmetric_triangle(a, b, c):
    def dist(p, q):
        tp = sp.TrueSpectrum(base=0j, n_max=0, points=tuple(q))
        tq = sp.TrueSpectrum(base=0j, n_max=0, points=tuple(p))
        d1 = sp.hausdorff_to_truth(p, tp)
        d2 = sp.hausdorff_to_truth(q, tq)
        assert d1 == pytest.approx(d2, abs=1e-12)  # symmetry
        return d1

    assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9


def test_two_well_partition_recovers_wells():
    traj, wells = two_well_trajectory(n_steps=3000, p_flip=0.01, noise=0.2, seed=1)
    snaps = sp.snapshots_from_trajectory(traj, stride=2)
    kernel = sp.gaussian_kernel(sp.auto_covariance_bandwidth(snaps.X))
    kg = sp.kernel_grams(kernel, snaps)
    result = sp.kedmd(kg, rank_r=30)
    near = sp.select_near_one(result.eigenvalues)
    assert near.size >= 2
    part = sp.metastable_partition(result.lifted[:, near[:2]],
                                   result.eigenvalues[near[:2]], 2)
    truth = wells[::2][:-1] > 0
    agree = max(np.mean((part.labels == 0) == truth), np.mean((part.labels == 1) == truth))
    assert agree >= 0.95
    assert set(np.unique(part.labels)) == {0, 1}


def test_three_well_partition_nonempty_clusters():
    rng = np.random.default_rng(5)
    centers = np.array([-2.0, 0.0, 2.0])
    idx = rng.integers(0, 3, size=600)
    emb = np.column_stack([centers[idx] + 0.1 * rng.standard_normal(600),
                           0.1 * rng.standard_normal(600)])
    part = sp.metastable_partition(emb, [1.0, 0.95], 3)
    assert np.bincount(part.labels, minlength=3).min() > 0


def test_partition_zero_variance_rejected():
    with pytest.raises(DomainError):
        sp.metastable_partition(np.ones((50, 1)), [1.0], 2)


def test_partition_invariant_to_eigenvector_scaling():
    rng = np.random.default_rng(9)
    base = np.column_stack([np.sign(rng.standard_normal(300)) + 0.05 * rng.standard_normal(300),
                            rng.standard_normal(300) * 0.05])
    scaled = base * np.array([[-2.7 + 1.1j, 0.4j]])
    a = sp.metastable_partition(base, [1.0, 0.9], 2)
    b = sp.metastable_partition(scaled, [1.0, 0.9], 2)
    same = np.mean(a.labels == b.labels)
    assert same == 1.0 or same == 0.0  # identical up to label swap


def test_select_near_one():
    eigs = np.array([1.0, 0.93, 0.5, 0.95 + 0.5j, -1.0])
    idx = sp.select_near_one(eigs)
    np.testing.assert_array_equal(idx, [0, 1])


def test_canonicalize_eigenvector():
    v = np.array([0.0, -2j, 1.0])
    out = sp.analysis.canonicalize_eigenvector(v)
    assert out[1].real > 0 and abs(out[1].imag) < 1e-15
    assert np.linalg.norm(out) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        sp.analysis.canonicalize_eigenvector(np.zeros(3))
