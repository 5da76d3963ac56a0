"""EDMD operators and residual-based pseudospectral estimates.

Fitting solves the Galerkin systems ``G K = A`` (composition operator) and
``G L = A*`` (transfer operator).  The residual of a candidate point z is

    res(z)^2 = min_{c* G c = 1} c* U(z) c,   U(z) = J - conj(z) A - z A* + |z|^2 G,

the smallest eigenvalue of the pencil (U(z), G).  Because U(z) is exactly the
Gram of the residual vectors, ``res`` can equivalently be computed as a
smallest singular value whenever the triple carries tall factors; that route
resolves residuals near machine precision instead of sqrt(eps) and is used
for point evaluations, while grids use the (cheaper) eigenvalue route.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dictionaries import Dictionary, SamplingScheme, assemble_data_matrices, make_snapshots
from .dynamics import CircleMap
from .errors import DomainError, SingularGram
from .spaces import (GramTriple, InnerProductSpec, SpaceKind, assemble_gram_triple,
                     default_coeff_band, orthonormalize)

__all__ = [
    "EdmdOperators", "fit_edmd", "operator_eigs", "ResidualField",
    "ResdmdEvaluator", "resdmd_grid", "residual_at", "residual_of_pair",
    "naive_transfer_residual", "deviation_from_normality", "make_grid", "build_u",
]

_CLAMP_REL = 1e-12


@dataclass(frozen=True)
class EdmdOperators:
    """Galerkin matrices for the composition (K) and transfer (L) operators."""

    K: np.ndarray
    L: np.ndarray
    space: InnerProductSpec


def fit_edmd(gt: GramTriple) -> EdmdOperators:
    """Solve the Galerkin systems; no explicit inverse of G is formed."""
    try:
        cho = scipy.linalg.cho_factor(gt.G)
        K = scipy.linalg.cho_solve(cho, gt.A)
        L = scipy.linalg.cho_solve(cho, gt.A.conj().T)
    except scipy.linalg.LinAlgError as exc:
        raise SingularGram("mass matrix solve failed") from exc
    return EdmdOperators(K=K, L=L, space=gt.space)


def operator_eigs(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dense nonsymmetric eigendecomposition, sorted by decreasing modulus."""
    vals, vecs = np.linalg.eig(matrix)
    order = np.argsort(-np.abs(vals))
    return vals[order], vecs[:, order]


def build_u(gt: GramTriple, z: complex) -> np.ndarray:
    U = gt.J - np.conj(z) * gt.A - z * gt.A.conj().T + abs(z) ** 2 * gt.G
    return 0.5 * (U + U.conj().T)


@dataclass(frozen=True)
class ResidualField:
    """Residual values over a grid of candidate spectral points."""

    grid: np.ndarray      # (T,) complex
    values: np.ndarray    # (T,) float, NaN where the eigensolve failed
    meta: dict


class ResdmdEvaluator:
    """Residual evaluation bound to one Gram triple.

    ``at`` uses the singular-value route when factors are available (sharp for
    residuals near zero); ``grid`` always uses the pencil route of the
    residual algorithm, clamping eigenvalues in [-1e-12, 0) relative to the
    spectral scale and recording NaN on solver failure.
    """

    def __init__(self, gt: GramTriple):
        self.gt = gt
        try:
            self._chol = scipy.linalg.cholesky(gt.G, lower=False)
        except scipy.linalg.LinAlgError as exc:
            raise SingularGram("mass matrix is not positive definite") from exc
        self._rx = None
        if gt.has_factors():
            self._rx = np.linalg.qr(gt.wx, mode="r")
        # cancellation-free magnitudes of the reduced pencil pieces, used as
        # the reference scale when clamping roundoff-negative eigenvalues
        self._norms = (np.linalg.norm(self._reduce(gt.J)),
                       np.linalg.norm(self._reduce(gt.A)),
                       np.sqrt(gt.size))

    def _reduce(self, B):
        R = self._chol
        T = scipy.linalg.solve_triangular(R, B, trans="C", lower=False)
        return scipy.linalg.solve_triangular(R, T.conj().T, trans="C", lower=False).conj().T

    def _pencil_value(self, z) -> float:
        if not np.isfinite(z):
            return np.nan
        U = build_u(self.gt, z)
        try:
            B = self._reduce(U)
            vals = np.linalg.eigvalsh(0.5 * (B + B.conj().T))
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError):
            return np.nan
        xi = vals[0]
        nj, na, ng = self._norms
        ref = nj + 2 * abs(z) * na + abs(z) ** 2 * ng
        if xi < -_CLAMP_REL * max(ref, np.finfo(float).tiny):
            return np.nan
        return float(np.sqrt(max(xi, 0.0)))

    def at(self, z) -> float:
        """Pointwise res(z) = min over the unit G-ball of the residual norm."""
        if self._rx is None:
            return self._pencil_value(z)
        D = self.gt.wy - z * self.gt.wx
        T = scipy.linalg.solve_triangular(self._rx, D.conj().T, trans="C", lower=False)
        return float(np.linalg.svd(T.conj().T, compute_uv=False)[-1])

    def grid(self, grid, meta: dict | None = None) -> ResidualField:
        grid = np.asarray(grid, dtype=complex).ravel()
        values = np.empty(grid.shape, dtype=float)
        n_workers = _thread_cap()
        if n_workers > 1 and grid.size > 256:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=n_workers) as pool:
                for i, v in enumerate(pool.map(self._pencil_value, grid, chunksize=64)):
                    values[i] = v
        else:
            for i, z in enumerate(grid):
                values[i] = self._pencil_value(z)
        info = {"M": self.gt.n_samples, "N": self.gt.size, "space": self.gt.space.label()}
        info.update(meta or {})
        return ResidualField(grid=grid, values=values, meta=info)

    def pair(self, z, c) -> float:
        """Residual of a fixed coefficient vector, normalized to unit G-norm."""
        c = np.asarray(c, dtype=complex).ravel()
        gnorm2 = np.real(c.conj() @ (self.gt.G @ c))
        if not gnorm2 > 0:
            raise DomainError("coefficient vector has zero mass norm")
        if self.gt.has_factors():
            num = np.linalg.norm((self.gt.wy - z * self.gt.wx) @ c)
            return float(num / np.sqrt(gnorm2))
        quad = np.real(c.conj() @ (build_u(self.gt, z) @ c)) / gnorm2
        scale = max(abs(quad), np.finfo(float).tiny)
        if quad < -_CLAMP_REL * scale:
            raise DomainError("residual quadratic form is significantly negative")
        return float(np.sqrt(max(quad, 0.0)))


def _thread_cap() -> int:
    raw = os.environ.get("SPECPOL_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def resdmd_grid(gt: GramTriple, grid, meta: dict | None = None) -> ResidualField:
    return ResdmdEvaluator(gt).grid(grid, meta)


def residual_at(gt: GramTriple, z) -> float:
    return ResdmdEvaluator(gt).at(z)


def residual_of_pair(gt: GramTriple, z, c) -> float:
    return ResdmdEvaluator(gt).pair(z, c)


def naive_transfer_residual(gt: GramTriple, z, c) -> float:
    """Projected transfer residual ||(A* - z G) c|| at unit G-norm.

    This is only a scaled version of ||(L - z) c|| (sandwiched by the extreme
    eigenvalues of G), so it is exposed as a diagnostic, not as a
    pseudospectral estimate.
    """
    c = np.asarray(c, dtype=complex).ravel()
    gnorm2 = np.real(c.conj() @ (gt.G @ c))
    if not gnorm2 > 0:
        raise DomainError("coefficient vector has zero mass norm")
    c = c / np.sqrt(gnorm2)
    return float(np.linalg.norm(gt.A.conj().T @ c - z * (gt.G @ c)))


def make_grid(extent: float = 1.5, resolution: int = 101) -> tuple[np.ndarray, dict]:
    """Rectangular lattice over [-extent, extent]^2, row-major in (im, re)."""
    if resolution < 2:
        raise DomainError("grid resolution must be at least 2")
    axis = np.linspace(-extent, extent, resolution)
    re, im = np.meshgrid(axis, axis)
    grid = (re + 1j * im).ravel()
    return grid, {"extent": float(extent), "resolution": int(resolution)}


def deviation_from_normality(cmap: CircleMap, dictionary: Dictionary,
                             n_samples: int, space: InnerProductSpec) -> float:
    """Spectral norm of the commutator L K - K L in the orthonormalized basis.

    The Fourier dictionary is first rescaled to unit norm in the weighted
    space, so the mass matrix is the identity and L is the conjugate
    transpose of K.  Samples are taken on an equispaced grid of at least
    ``max(n_samples, 4096, 8 * band)`` points.
    """
    if space.kind is SpaceKind.EMPIRICAL_L2:
        raise DomainError("normality metric needs a weighted (diagonal) space")
    band = default_coeff_band(dictionary)
    m_fft = max(int(n_samples), 4096, 8 * band)
    snaps = make_snapshots(cmap, m_fft, SamplingScheme.EQUISPACED_CIRCLE)
    dm = assemble_data_matrices(dictionary, snaps)
    gt = assemble_gram_triple(dm, dictionary, space)
    scal = orthonormalize(dictionary, space)
    K = scal[:, None] * gt.A * scal[None, :]
    comm = K.conj().T @ K - K @ K.conj().T
    return float(np.linalg.norm(comm, 2))
