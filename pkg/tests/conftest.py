import numpy as np
import pytest

import specpol as sp

MU_PAPER = 0.75 * np.exp(1j * np.pi / 4)


@pytest.fixture(scope="session")
def b1_map():
    return sp.blaschke1(MU_PAPER)


@pytest.fixture(scope="session")
def b1_setup(b1_map):
    """Standard product-map discretization: N = 41 modes, M = 1000 nodes."""
    dictionary = sp.fourier_dictionary(41)
    snaps = sp.make_snapshots(b1_map, 1000, sp.SamplingScheme.EQUISPACED_CIRCLE)
    dm = sp.assemble_data_matrices(dictionary, snaps)
    return dictionary, snaps, dm


@pytest.fixture(scope="session")
def b1_l2(b1_setup):
    dictionary, _, dm = b1_setup
    return sp.assemble_gram_triple(dm, dictionary, sp.empirical_l2())


@pytest.fixture(scope="session")
def b1_hardy(b1_setup):
    dictionary, _, dm = b1_setup
    return sp.assemble_gram_triple(dm, dictionary, sp.hardy_dual(0.75))


def two_well_trajectory(n_steps=10_000, p_flip=0.0075, noise=0.2, seed=0):
    """Planar two-well chain: wells at (+-1, 0), rare flips, Gaussian jitter."""
    rng = np.random.default_rng(seed)
    hop = np.where(rng.random(n_steps - 1) < p_flip, -1.0, 1.0)
    wells = np.cumprod(np.concatenate([[1.0], hop]))
    pts = np.column_stack([wells, np.zeros(n_steps)])
    return pts + noise * rng.standard_normal((n_steps, 2)), wells
