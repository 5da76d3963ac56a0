"""Classification of computed eigenvalues and metastability clustering."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import TrueSpectrum
from .errors import ConvergenceError, DomainError, EmptySet

__all__ = [
    "SpectralReport", "classify_eigenvalues", "hausdorff_to_truth",
    "MetastablePartition", "metastable_partition", "canonicalize_eigenvector",
    "select_near_one",
]


@dataclass(frozen=True)
class SpectralReport:
    """Eigenvalues with residuals and an accepted/spurious verdict."""

    eigenvalues: np.ndarray
    residuals: np.ndarray
    epsilon: float
    accepted: np.ndarray
    truth_match: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        entries = []
        for i, lam in enumerate(self.eigenvalues):
            entry = {
                "re": float(lam.real), "im": float(lam.imag),
                "residual": float(self.residuals[i]),
                "accepted": bool(self.accepted[i]),
            }
            if self.truth_match is not None:
                entry["dist_to_truth"] = float(self.truth_match[i])
            entries.append(entry)
        meta = dict(self.meta)
        space = meta.pop("space", None)
        return {"eigenvalues": entries, "epsilon": float(self.epsilon),
                "space": space, "meta": meta}


def classify_eigenvalues(eigs, residual_fn, epsilon: float,
                         truth: TrueSpectrum | None = None,
                         meta: dict | None = None) -> SpectralReport:
    """Evaluate a residual at every eigenvalue and threshold at epsilon.

    NaN residuals (failed solves) are never accepted.  The report is sorted
    by decreasing modulus; ``truth`` adds per-eigenvalue distances to the
    nearest analytic spectral point.
    """
    eigs = np.asarray(eigs, dtype=complex).ravel()
    order = np.argsort(-np.abs(eigs))
    eigs = eigs[order]
    residuals = np.array([residual_fn(lam) for lam in eigs], dtype=float)
    with np.errstate(invalid="ignore"):
        accepted = residuals < epsilon
    accepted &= np.isfinite(residuals)
    truth_match = None
    if truth is not None and eigs.size:
        pts = truth.as_array()
        truth_match = np.abs(eigs[:, None] - pts[None, :]).min(axis=1)
    return SpectralReport(eigenvalues=eigs, residuals=residuals, epsilon=float(epsilon),
                          accepted=accepted, truth_match=truth_match, meta=meta or {})


def hausdorff_to_truth(eigs, truth: TrueSpectrum, modulus_floor: float = 0.0) -> float:
    """Symmetric Hausdorff distance after filtering both sets to |z| >= floor."""
    if modulus_floor < 0:
        raise DomainError("modulus floor must be nonnegative")
    a = np.asarray(eigs, dtype=complex).ravel()
    b = truth.as_array()
    a = a[np.abs(a) >= modulus_floor]
    b = b[np.abs(b) >= modulus_floor]
    if a.size == 0 or b.size == 0:
        raise EmptySet("modulus floor removed every point from one of the sets")
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def select_near_one(eigs, gap_tol: float = 0.15, imag_tol: float = 0.02) -> np.ndarray:
    """Indices of eigenvalues near 1: Re > 1 - gap_tol and |Im| < imag_tol."""
    eigs = np.asarray(eigs, dtype=complex)
    mask = (eigs.real > 1.0 - gap_tol) & (np.abs(eigs.imag) < imag_tol)
    return np.nonzero(mask)[0]


def canonicalize_eigenvector(v) -> np.ndarray:
    """Unit norm with the first significant entry rotated to positive real."""
    v = np.asarray(v, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise DomainError("zero eigenvector cannot be canonicalized")
    v = v / norm
    sig = np.nonzero(np.abs(v) > 1e-8 * np.abs(v).max())[0][0]
    return v * (np.abs(v[sig]) / v[sig])


@dataclass(frozen=True)
class MetastablePartition:
    n_clusters: int
    labels: np.ndarray
    dominant_eigs: np.ndarray


def metastable_partition(eigvec_values, dominant_eigs, n_clusters: int,
                         seed: int = 0, max_iter: int = 300) -> MetastablePartition:
    """k-means partition of per-sample eigenvector embeddings.

    ``eigvec_values`` has one column per selected eigenvector, evaluated at
    the M data points; the real parts after canonicalization feed a seeded
    k-means++ with 10 restarts.  Zero-variance embeddings and empty clusters
    are rejected.
    """
    from sklearn.cluster import KMeans

    emb = np.asarray(eigvec_values)
    if emb.ndim == 1:
        emb = emb[:, None]
    if n_clusters < 2:
        raise DomainError("a metastable partition needs at least 2 clusters")
    cols = [canonicalize_eigenvector(emb[:, k]).real for k in range(emb.shape[1])]
    features = np.column_stack(cols)
    if np.allclose(features.var(axis=0), 0.0):
        raise DomainError("eigenvector embedding has zero variance; nothing to cluster")
    km = KMeans(n_clusters=n_clusters, n_init=10, random_state=seed, max_iter=max_iter)
    labels = km.fit_predict(features)
    if km.n_iter_ >= max_iter:
        raise ConvergenceError(f"k-means did not converge within {max_iter} iterations")
    counts = np.bincount(labels, minlength=n_clusters)
    if np.any(counts == 0):
        raise DomainError("k-means produced an empty cluster")
    return MetastablePartition(n_clusters=n_clusters, labels=labels,
                               dominant_eigs=np.asarray(dominant_eigs, dtype=complex))
