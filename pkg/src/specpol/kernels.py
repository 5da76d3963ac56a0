"""Kernel EDMD and the kernelized residual algorithms.

All operators here are expressed through the M x M kernel Grams

    Ghat[i,l] = k(x_l, x_i)/M,  Ahat[i,l] = k(S(x_l), x_i)/M,
    Jhat[i,l] = k(S(x_l), S(x_i))/M,

compressed through the leading eigenpairs ``Ghat = Q Sigma^2 Q*``.  Two
residual grids are provided: the original kernelized residual (identity
normalization of the coefficient vector) and the modified residual, whose
compressed form

    U~(z) = J~ - z A~ - conj(z) A~* + |z|^2 Sigma~^2

carries the operator-level normalization and converges to transfer-operator
adjoint residuals.  Note the conjugation: small ``kres(z)`` certifies
``conj(z)`` against the transfer operator, equivalently ``z`` against the
composition operator; for the real-valued kernels used here the two
orientations give identical values.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg
from scipy.spatial.distance import cdist

from .dictionaries import SnapshotSet
from .edmd import ResidualField, operator_eigs
from .errors import DomainError, RankDeficiencyWarning

__all__ = [
    "KernelKind", "KernelSpec", "gaussian_kernel", "auto_covariance_bandwidth",
    "KernelGrams", "kernel_grams", "TruncatedSvd", "truncated_eig", "default_rank",
    "KedmdResult", "kedmd", "KresEvaluator", "kresdmd_modified_grid",
    "kresdmd_original_grid", "evaluate_compressed_observable",
]

_CLAMP_REL = 1e-12
_FULL_EIG_LIMIT = 4096


class KernelKind(enum.Enum):
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind
    c_sq: float
    mercer_top_bound: float | None = None

    def __post_init__(self):
        if self.c_sq <= 0:
            raise DomainError(f"kernel bandwidth c^2 must be positive, got {self.c_sq}")


def gaussian_kernel(c_sq: float, mercer_top_bound: float | None = None) -> KernelSpec:
    return KernelSpec(KernelKind.GAUSSIAN, float(c_sq), mercer_top_bound)


def _real_embedding(states: np.ndarray) -> np.ndarray:
    z = np.asarray(states, dtype=complex)
    if np.abs(z.imag).max(initial=0.0) == 0.0:
        return np.ascontiguousarray(z.real)
    return np.ascontiguousarray(np.concatenate([z.real, z.imag], axis=1))


def auto_covariance_bandwidth(states) -> float:
    """Bandwidth heuristic: c is the 2-norm of the empirical covariance."""
    emb = _real_embedding(np.asarray(states, dtype=complex))
    centered = emb - emb.mean(axis=0)
    cov = centered.T @ centered / emb.shape[0]
    c = float(np.linalg.norm(cov, 2))
    if c <= 0:
        raise DomainError("degenerate data: empirical covariance has zero norm")
    return c * c


def _kernel_matrix(kernel: KernelSpec, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Matrix of k(q_l, p_i) = exp(-||p_i - q_l||^2 / c^2), rows over P."""
    d2 = cdist(P, Q, metric="sqeuclidean")
    return np.exp(-d2 / kernel.c_sq)


@dataclass(frozen=True)
class KernelGrams:
    ghat: np.ndarray
    ahat: np.ndarray
    jhat: np.ndarray
    n_pairs: int
    kernel: KernelSpec | None  # None for synthetic or explicit-feature Grams


def kernel_grams(kernel: KernelSpec, snaps: SnapshotSet) -> KernelGrams:
    """Assemble the three kernel Grams from a snapshot set (O(d M^2))."""
    x = _real_embedding(snaps.X)
    y = _real_embedding(snaps.Y)
    m = snaps.n_pairs
    ghat = _kernel_matrix(kernel, x, x) / m
    ahat = _kernel_matrix(kernel, x, y) / m
    jhat = _kernel_matrix(kernel, y, y) / m
    ghat = 0.5 * (ghat + ghat.conj().T)
    jhat = 0.5 * (jhat + jhat.conj().T)
    return KernelGrams(ghat=ghat, ahat=ahat, jhat=jhat, n_pairs=m, kernel=kernel)


@dataclass(frozen=True)
class TruncatedSvd:
    """Leading eigenpairs of Ghat: orthonormal Qt and singular values sigma."""

    qt: np.ndarray      # (M, r) isometry
    sigma: np.ndarray   # (r,) positive, nonincreasing
    rank_r: int


def default_rank(ghat: np.ndarray) -> int:
    """Smallest rank capturing all but 1e-10 of the trace of Ghat."""
    if ghat.shape[0] > _FULL_EIG_LIMIT:
        raise DomainError("automatic rank selection needs a full eigendecomposition; "
                          "pass rank_r explicitly for this problem size")
    ev = np.linalg.eigvalsh(ghat)[::-1]
    ev = np.clip(ev, 0.0, None)
    cum = np.cumsum(ev)
    return int(np.searchsorted(cum, (1.0 - 1e-10) * cum[-1]) + 1)


def truncated_eig(ghat: np.ndarray, rank_r: int) -> TruncatedSvd:
    """Top-``rank_r`` eigenpairs of the PSD Gram, as an SVD of the feature map.

    Eigenvalues below ``1e-14 * trace`` are discarded with a warning and the
    rank is reduced accordingly.
    """
    m = ghat.shape[0]
    if not 1 <= rank_r <= m:
        raise DomainError(f"rank must lie in [1, {m}], got {rank_r}")
    if m <= _FULL_EIG_LIMIT or rank_r > m // 4:
        vals, vecs = np.linalg.eigh(ghat)
        vals, vecs = vals[::-1][:rank_r], vecs[:, ::-1][:, :rank_r]
    else:
        vals, vecs = scipy.sparse.linalg.eigsh(ghat, k=rank_r, which="LA")
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
    floor = 1e-14 * np.trace(ghat).real
    keep = vals > floor
    if not keep.all():
        warnings.warn(
            f"effective rank {int(keep.sum())} below requested {rank_r}; truncating",
            RankDeficiencyWarning, stacklevel=2)
        vals, vecs = vals[keep], vecs[:, keep]
    if vals.size == 0:
        raise DomainError("kernel Gram is numerically zero")
    return TruncatedSvd(qt=vecs, sigma=np.sqrt(vals), rank_r=int(vals.size))


@dataclass(frozen=True)
class KedmdResult:
    khat: np.ndarray          # (r, r) compressed operator matrix
    eigenvalues: np.ndarray   # (r,) sorted by decreasing modulus
    eigenvectors: np.ndarray  # (r, r) matching columns
    lifted: np.ndarray        # (M, r) eigenfunction values at the data points
    tsvd: TruncatedSvd


def kedmd(kg: KernelGrams, rank_r: int | None = None,
          tsvd: TruncatedSvd | None = None) -> KedmdResult:
    """Kernel EDMD: compress Ahat through the truncated eigenbasis of Ghat."""
    if tsvd is None:
        tsvd = truncated_eig(kg.ghat, rank_r if rank_r is not None else default_rank(kg.ghat))
    qs = tsvd.qt / tsvd.sigma[None, :]
    khat = qs.conj().T @ kg.ahat @ qs
    vals, vecs = operator_eigs(khat)
    lifted = (tsvd.qt * tsvd.sigma[None, :]) @ vecs
    return KedmdResult(khat=khat, eigenvalues=vals, eigenvectors=vecs,
                       lifted=lifted, tsvd=tsvd)


def _sqrt_smallest_clamped(U: np.ndarray, ref: float) -> float:
    """sqrt of the smallest eigenvalue, clamping roundoff-negative values.

    ``ref`` is a cancellation-free magnitude of the assembled matrix (sum of
    the Frobenius norms of its building blocks); eigenvalues above
    ``-1e-12 * ref`` count as zero, anything more negative is a failure.
    """
    try:
        vals = np.linalg.eigvalsh(0.5 * (U + U.conj().T))
    except np.linalg.LinAlgError:
        return np.nan
    xi = vals[0]
    if xi < -_CLAMP_REL * max(ref, np.finfo(float).tiny):
        return np.nan
    return float(np.sqrt(max(xi, 0.0)))


class KresEvaluator:
    """Modified kernelized residual bound to compressed Grams."""

    def __init__(self, kg: KernelGrams, rank_r: int | None = None,
                 tsvd: TruncatedSvd | None = None):
        if tsvd is None:
            tsvd = truncated_eig(kg.ghat, rank_r if rank_r is not None else default_rank(kg.ghat))
        self.tsvd = tsvd
        qt = tsvd.qt
        self.j_tilde = qt.conj().T @ kg.jhat @ qt
        self.a_tilde = qt.conj().T @ kg.ahat @ qt
        self.g_tilde = np.diag(tsvd.sigma ** 2)
        self._norms = (np.linalg.norm(self.j_tilde), np.linalg.norm(self.a_tilde),
                       np.linalg.norm(self.g_tilde))

    def _u_tilde(self, z) -> np.ndarray:
        U = (self.j_tilde - z * self.a_tilde - np.conj(z) * self.a_tilde.conj().T
             + abs(z) ** 2 * self.g_tilde)
        return 0.5 * (U + U.conj().T)

    def _ref(self, z) -> float:
        nj, na, ng = self._norms
        return nj + 2 * abs(z) * na + abs(z) ** 2 * ng

    def at(self, z) -> float:
        return _sqrt_smallest_clamped(self._u_tilde(z), self._ref(z))

    def minimizer(self, z) -> tuple[float, np.ndarray]:
        """Residual value plus the minimizing coefficient vector u.

        ``u`` encodes the observable in the compressed dictionary under the
        normalization ``u* Sigma^2 u = 1``.
        """
        vals, vecs = np.linalg.eigh(self._u_tilde(z))
        value = float(np.sqrt(max(vals[0], 0.0)))
        u = vecs[:, 0] / self.tsvd.sigma
        return value, u

    def grid(self, grid, meta: dict | None = None) -> ResidualField:
        grid = np.asarray(grid, dtype=complex).ravel()
        values = np.array([self.at(z) for z in grid])
        info = {"rank_r": self.tsvd.rank_r, "algorithm": "kres-modified"}
        info.update(meta or {})
        return ResidualField(grid=grid, values=values, meta=info)


def kresdmd_modified_grid(kg: KernelGrams, rank_r: int, grid,
                          meta: dict | None = None) -> ResidualField:
    return KresEvaluator(kg, rank_r).grid(grid, meta)


def kresdmd_original_grid(kg: KernelGrams, rank_r: int, grid,
                          meta: dict | None = None) -> ResidualField:
    """Original kernelized residual: identity-normalized coefficient vectors."""
    tsvd = truncated_eig(kg.ghat, rank_r)
    qs = tsvd.qt / tsvd.sigma[None, :]
    j_circ = qs.conj().T @ kg.jhat @ qs
    khat = qs.conj().T @ kg.ahat @ qs
    eye = np.eye(tsvd.rank_r)
    nj, nk = np.linalg.norm(j_circ), np.linalg.norm(khat)
    grid = np.asarray(grid, dtype=complex).ravel()
    values = np.empty(grid.shape, dtype=float)
    for i, z in enumerate(grid):
        U = j_circ - np.conj(z) * khat - z * khat.conj().T + abs(z) ** 2 * eye
        ref = nj + 2 * abs(z) * nk + abs(z) ** 2 * np.sqrt(tsvd.rank_r)
        values[i] = _sqrt_smallest_clamped(U, ref)
    info = {"rank_r": tsvd.rank_r, "algorithm": "kres-original"}
    info.update(meta or {})
    return ResidualField(grid=grid, values=values, meta=info)


def evaluate_compressed_observable(kernel: KernelSpec, snaps: SnapshotSet,
                                   tsvd: TruncatedSvd, u, points) -> np.ndarray:
    """Evaluate ``h = Psi~ u`` at arbitrary points by kernel extension.

    The compressed observables satisfy ``psi~_j(p) = kappa(p) Qt Sigma^{-1} e_j
    / sqrt(M)`` with ``kappa(p)_i = k(x_i, p)``; at the data points this
    reproduces ``sqrt(M) Qt Sigma u`` exactly.
    """
    u = np.asarray(u, dtype=complex).ravel()
    coef = tsvd.qt @ (u / tsvd.sigma) / np.sqrt(snaps.n_pairs)
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None]
    kappa = _kernel_matrix(kernel, _real_embedding(pts), _real_embedding(snaps.X))
    return kappa @ coef
