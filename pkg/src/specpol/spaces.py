"""Inner-product spaces and assembly of the Gram triple (G, A, J).

Three space kinds are supported:

* empirical L2 -- quadrature Grams built directly from the data matrices;
* fractional Sobolev on the circle -- Fourier weights ``(1 + n^2)**s``;
* dual Hardy space of an annulus -- Fourier weights ``r**(2|n|)``.

For the weighted spaces the Fourier coefficients of the composed modes
``psi_j o S`` are obtained by discrete Fourier analysis of the Psi_Y columns,
which therefore must be sampled on the full equispaced circle grid.  The
triple optionally carries tall factors ``wx, wy`` with ``G = wx* wx`` etc.;
residual evaluators use them for numerically sharp small residuals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dictionaries import DataMatrices, Dictionary, DictionaryKind, SamplingScheme
from .errors import BandTooSmall, DomainError, NotPositiveDefinite

__all__ = [
    "SpaceKind", "InnerProductSpec", "fourier_weights", "orthonormalize",
    "GramTriple", "assemble_gram_triple", "default_coeff_band",
]


class SpaceKind(enum.Enum):
    EMPIRICAL_L2 = "l2"
    SOBOLEV_HS = "sobolev"
    HARDY_DUAL = "hardy-dual"


@dataclass(frozen=True)
class InnerProductSpec:
    kind: SpaceKind
    s: float = 0.0
    radius_r: float = 0.0

    def __post_init__(self):
        if self.kind is SpaceKind.HARDY_DUAL and not 0 < self.radius_r < 1:
            raise DomainError(f"hardy-dual radius must lie in (0, 1), got {self.radius_r}")

    def label(self) -> str:
        if self.kind is SpaceKind.SOBOLEV_HS:
            return f"sobolev(s={self.s:g})"
        if self.kind is SpaceKind.HARDY_DUAL:
            return f"hardy-dual(r={self.radius_r:g})"
        return "l2"


def empirical_l2() -> InnerProductSpec:
    return InnerProductSpec(SpaceKind.EMPIRICAL_L2)


def sobolev(s: float) -> InnerProductSpec:
    return InnerProductSpec(SpaceKind.SOBOLEV_HS, s=float(s))


def hardy_dual(radius_r: float) -> InnerProductSpec:
    return InnerProductSpec(SpaceKind.HARDY_DUAL, radius_r=float(radius_r))


def fourier_weights(space: InnerProductSpec, modes) -> np.ndarray:
    """Diagonal Fourier weights w(n) of a weighted space."""
    n = np.asarray(modes, dtype=float)
    if space.kind is SpaceKind.SOBOLEV_HS:
        return (1.0 + n ** 2) ** space.s
    if space.kind is SpaceKind.HARDY_DUAL:
        return space.radius_r ** (2 * np.abs(n))
    raise DomainError("empirical L2 has no Fourier weights")


def orthonormalize(dictionary: Dictionary, space: InnerProductSpec) -> np.ndarray:
    """Per-mode scalings 1/sqrt(w(n)) that make the Fourier modes unit norm."""
    if dictionary.kind is not DictionaryKind.FOURIER_ON_CIRCLE or dictionary.pi_scaling:
        raise DomainError("orthonormalization needs an integer-mode Fourier dictionary")
    w = fourier_weights(space, dictionary.indices)
    if np.any(w == 0):
        raise DomainError("zero Fourier weight; cannot orthonormalize")
    return 1.0 / np.sqrt(w)


@dataclass(frozen=True)
class GramTriple:
    """Mass, stiffness, and image-Gram matrices in a chosen space."""

    G: np.ndarray
    A: np.ndarray
    J: np.ndarray
    space: InnerProductSpec
    n_samples: int
    wx: np.ndarray | None = None   # tall factor: G = wx^H wx
    wy: np.ndarray | None = None   # tall factor: A = wx^H wy, J = wy^H wy
    coeff_band: int | None = None  # band actually used by weighted assembly

    @property
    def size(self) -> int:
        return self.G.shape[0]

    def has_factors(self) -> bool:
        return self.wx is not None and self.wy is not None


def _hermitize(B):
    return 0.5 * (B + B.conj().T)


def _checked_cholesky(G):
    """Cholesky with one shot of diagonal jitter to absorb roundoff."""
    try:
        return scipy.linalg.cholesky(G, lower=False), G
    except scipy.linalg.LinAlgError:
        jitter = 1e-14 * np.trace(G).real / G.shape[0]
        G2 = G + jitter * np.eye(G.shape[0])
        try:
            return scipy.linalg.cholesky(G2, lower=False), G2
        except scipy.linalg.LinAlgError as exc:
            raise NotPositiveDefinite("mass matrix is not positive definite") from exc


def default_coeff_band(dictionary: Dictionary) -> int:
    return dictionary.max_index() + 64


def assemble_gram_triple(dm: DataMatrices, dictionary: Dictionary,
                         space: InnerProductSpec, coeff_band: int | None = None,
                         enforce_tail: bool = True) -> GramTriple:
    """Assemble (G, A, J) for the requested inner-product space.

    Empirical L2 uses the weighted quadrature Grams of the data matrices.
    Weighted spaces require equispaced circle samples; the coefficients of
    ``psi_j o S`` are truncated to ``|n| <= coeff_band`` and a tail-energy
    check (relative 1e-10) guards the truncation.  When ``coeff_band`` is
    None the band starts at the default and doubles until the check passes;
    an explicit band is used as given.  ``enforce_tail=False`` skips the
    check entirely so a deliberately short band can be reproduced.
    """
    band_used = None
    if space.kind is SpaceKind.EMPIRICAL_L2:
        sw = np.sqrt(dm.weights)[:, None]
        wx = sw * dm.psi_x
        wy = sw * dm.psi_y
    elif coeff_band is not None:
        wx, wy = _weighted_factors(dm, dictionary, space, int(coeff_band), enforce_tail)
        band_used = int(coeff_band)
    else:
        band_used = default_coeff_band(dictionary)
        cap = (dm.n_pairs - 1) // 2
        while True:
            try:
                wx, wy = _weighted_factors(dm, dictionary, space, band_used, enforce_tail)
                break
            except BandTooSmall:
                if band_used >= cap:
                    raise
                band_used = min(2 * band_used, cap)

    G = _hermitize(wx.conj().T @ wx)
    A = wx.conj().T @ wy
    J = _hermitize(wy.conj().T @ wy)
    _, G = _checked_cholesky(G)
    return GramTriple(G=G, A=A, J=J, space=space, n_samples=dm.n_pairs,
                      wx=wx, wy=wy, coeff_band=band_used)


def _weighted_factors(dm, dictionary, space, band, enforce_tail):
    if dictionary.kind is not DictionaryKind.FOURIER_ON_CIRCLE or dictionary.pi_scaling:
        raise DomainError("weighted spaces need an integer-mode Fourier dictionary")
    if dm.scheme is not SamplingScheme.EQUISPACED_CIRCLE:
        raise DomainError("weighted-space assembly requires equispaced circle samples")
    m = dm.n_pairs
    if band < dictionary.max_index():
        raise BandTooSmall(
            f"band {band} cannot represent dictionary modes up to {dictionary.max_index()}")
    if 2 * band + 1 > m:
        raise BandTooSmall(f"band {band} needs more than the {m} available samples")

    # full DFT of the composed modes; row k holds c_k(psi_j o S), k mod m
    coeffs = np.fft.fft(dm.psi_y, axis=0) / m
    if enforce_tail:
        signed = ((np.arange(m) + m // 2) % m) - m // 2
        energy = fourier_weights(space, signed)[:, None] * np.abs(coeffs) ** 2
        tail = energy[np.abs(signed) > band].sum(axis=0)
        total = energy.sum(axis=0)
        bad = tail > 1e-10 * total
        if np.any(bad):
            worst = int(np.argmax(tail / total))
            raise BandTooSmall(
                f"coefficient tail beyond |n| = {band} holds {tail[worst]/total[worst]:.2e} "
                f"of the weighted energy for mode column {worst}; enlarge the band")

    ks = np.arange(-band, band + 1)
    c_y = coeffs[ks % m, :]
    c_x = np.zeros((2 * band + 1, dm.n_modes), dtype=complex)
    for col, n in enumerate(dictionary.indices):
        c_x[n + band, col] = 1.0
    sqrt_w = np.sqrt(fourier_weights(space, ks))[:, None]
    return sqrt_w * c_x, sqrt_w * c_y
