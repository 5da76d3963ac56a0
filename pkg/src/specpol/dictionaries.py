"""Observable dictionaries, snapshot sets, and data matrices."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import CircleMap, eval_map
from .errors import DomainError, RankWarning, TooFewSamples

__all__ = [
    "DictionaryKind", "Dictionary", "fourier_dictionary",
    "SamplingScheme", "SnapshotSet", "make_snapshots", "snapshots_from_trajectory",
    "DataMatrices", "assemble_data_matrices",
]


class DictionaryKind(enum.Enum):
    FOURIER_ON_CIRCLE = "fourier"
    IMPLICIT_KERNEL_FEATURES = "kernel"


@dataclass(frozen=True)
class Dictionary:
    """A finite family of observables; Fourier modes carry integer indices.

    ``pi_scaling`` switches the mode functions from ``z**n`` to
    ``exp(i pi n arg z)`` (half-integer powers with the branch cut at
    ``arg z = pi``); it exists to reproduce a literal angular convention and
    is not used by any preset.
    """

    kind: DictionaryKind
    indices: tuple
    pi_scaling: bool = False

    @property
    def size(self) -> int:
        return len(self.indices)

    def max_index(self) -> int:
        return int(max(abs(n) for n in self.indices))


def fourier_dictionary(n_modes: int, pi_scaling: bool = False) -> Dictionary:
    """Fourier dictionary of ``n_modes`` modes centered on 0.

    Odd sizes give the symmetric range ``-(N-1)/2 .. (N-1)/2``; even sizes
    use the FFT-style asymmetric range ``-N/2 .. N/2 - 1``.
    """
    if n_modes < 1:
        raise DomainError(f"dictionary size must be positive, got {n_modes}")
    if n_modes % 2:
        idx = np.arange(-(n_modes - 1) // 2, (n_modes - 1) // 2 + 1)
    else:
        idx = np.arange(-n_modes // 2, n_modes // 2)
    return Dictionary(DictionaryKind.FOURIER_ON_CIRCLE, tuple(int(i) for i in idx),
                      pi_scaling=pi_scaling)


def evaluate_dictionary(dictionary: Dictionary, states) -> np.ndarray:
    """Evaluate every mode at every state; returns an (M, N) complex matrix.

    States are assumed to lie on the unit circle; evaluation goes through the
    angle, which renormalizes tiny radial drift from map evaluations.
    """
    if dictionary.kind is not DictionaryKind.FOURIER_ON_CIRCLE:
        raise DomainError("only Fourier dictionaries have explicit evaluations")
    z = np.asarray(states, dtype=complex).ravel()
    ang = np.angle(z)
    idx = np.asarray(dictionary.indices, dtype=float)
    scale = np.pi if dictionary.pi_scaling else 1.0
    return np.exp(1j * scale * np.outer(ang, idx))


class SamplingScheme(enum.Enum):
    EQUISPACED_CIRCLE = "equispaced"
    MONTE_CARLO = "monte-carlo"
    TRAJECTORY_PAIRS = "trajectory"


@dataclass(frozen=True)
class SnapshotSet:
    """Paired samples {x_i, S(x_i)} with quadrature weights summing to 1."""

    X: np.ndarray          # (M, d) complex
    Y: np.ndarray          # (M, d) complex
    weights: np.ndarray    # (M,) positive, sums to 1
    scheme: SamplingScheme

    def __post_init__(self):
        object.__setattr__(self, "X", np.asarray(self.X, dtype=complex))
        object.__setattr__(self, "Y", np.asarray(self.Y, dtype=complex))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.X.shape != self.Y.shape or self.X.ndim != 2:
            raise DomainError("X and Y must be matching (M, d) arrays")
        if len(self.weights) != self.X.shape[0]:
            raise DomainError("weights length must equal the number of pairs")

    @property
    def n_pairs(self) -> int:
        return self.X.shape[0]

    def circle_states(self) -> tuple[np.ndarray, np.ndarray]:
        """1-D complex views for circle dynamics (requires d = 1)."""
        if self.X.shape[1] != 1:
            raise DomainError("circle states require one complex coordinate")
        return self.X[:, 0], self.Y[:, 0]


def make_snapshots(cmap: CircleMap, n_pairs: int, scheme: SamplingScheme,
                   seed: int = 0) -> SnapshotSet:
    """Sample snapshot pairs of a circle map under the requested scheme."""
    if n_pairs < 1:
        raise DomainError(f"need at least one snapshot pair, got {n_pairs}")
    if scheme is SamplingScheme.EQUISPACED_CIRCLE:
        x = np.exp(2j * np.pi * np.arange(n_pairs) / n_pairs)
    elif scheme is SamplingScheme.MONTE_CARLO:
        rng = np.random.default_rng(seed)
        x = np.exp(2j * np.pi * rng.random(n_pairs))
    else:
        raise DomainError("trajectory pairs are built with snapshots_from_trajectory")
    y = eval_map(cmap, x)
    w = np.full(n_pairs, 1.0 / n_pairs)
    return SnapshotSet(x[:, None], np.asarray(y)[:, None], w, scheme)


def snapshots_from_trajectory(states, stride: int = 1) -> SnapshotSet:
    """Pair consecutive (strided) trajectory rows into a snapshot set."""
    arr = np.asarray(states)
    if arr.ndim == 1:
        arr = arr[:, None]
    if stride < 1:
        raise DomainError(f"stride must be >= 1, got {stride}")
    sub = arr[::stride]
    if sub.shape[0] < 2:
        raise TooFewSamples(
            f"{arr.shape[0]} rows at stride {stride} leave {sub.shape[0]} states; need >= 2")
    X = np.asarray(sub[:-1], dtype=complex)
    Y = np.asarray(sub[1:], dtype=complex)
    w = np.full(X.shape[0], 1.0 / X.shape[0])
    return SnapshotSet(X, Y, w, SamplingScheme.TRAJECTORY_PAIRS)


@dataclass(frozen=True)
class DataMatrices:
    """Dictionary evaluations Psi_X, Psi_Y plus the sampling metadata."""

    psi_x: np.ndarray
    psi_y: np.ndarray
    weights: np.ndarray
    scheme: SamplingScheme

    @property
    def n_pairs(self) -> int:
        return self.psi_x.shape[0]

    @property
    def n_modes(self) -> int:
        return self.psi_x.shape[1]


def assemble_data_matrices(dictionary: Dictionary, snaps: SnapshotSet) -> DataMatrices:
    """Evaluate the dictionary on a snapshot set.

    Warns with ``RankWarning`` when the numerical rank of Psi_X falls below
    ``min(M, N)`` at relative tolerance 1e-10.
    """
    x, y = snaps.circle_states()
    psi_x = evaluate_dictionary(dictionary, x)
    psi_y = evaluate_dictionary(dictionary, y)
    if not (np.isfinite(psi_x).all() and np.isfinite(psi_y).all()):
        raise DomainError("dictionary evaluation produced non-finite entries")
    sv = np.linalg.svd(psi_x, compute_uv=False)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    if rank < min(psi_x.shape):
        warnings.warn(
            f"Psi_X numerical rank {rank} < min(M, N) = {min(psi_x.shape)}",
            RankWarning, stacklevel=2)
    return DataMatrices(psi_x, psi_y, np.asarray(snaps.weights, dtype=float), snaps.scheme)
