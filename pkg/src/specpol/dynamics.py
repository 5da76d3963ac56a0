"""Benchmark circle dynamics with analytically known transfer spectra.

Two families of degree-2 analytic circle maps are provided, both built from
the Moebius factor ``b(z) = (z - a)/(1 - conj(a) z)``:

* ``BLASCHKE_PRODUCT``:  ``S(z) = z (z + mu) / (1 + conj(mu) z)``.  The map
  fixes 0 with multiplier ``S'(0) = mu``, so the transfer spectrum on the
  appropriate annulus space is ``{mu**n} U {conj(mu)**n} U {0}``.
* ``BLASCHKE_SQUARED``:  ``S(z) = ((z - mu)/(1 - conj(mu) z))**2``, uniformly
  expanding for ``|mu| < 1/3``; the spectrum consists of powers of the
  multiplier at the interior attracting fixed point.

States on the circle are stored as complex numbers, never as angles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, UnsupportedMap

_CIRCLE_TOL = 1e-9


class MapKind(enum.Enum):
    BLASCHKE_PRODUCT = "blaschke1"
    BLASCHKE_SQUARED = "blaschke2"
    USER_TRAJECTORY = "trajectory"


@dataclass(frozen=True)
class CircleMap:
    """A benchmark circle map, immutable after construction."""

    kind: MapKind
    mu: complex = 0j
    annulus_radius: float = 0.0

    def __post_init__(self):
        mu = complex(self.mu)
        if self.kind is MapKind.BLASCHKE_PRODUCT and abs(mu) >= 1:
            raise DomainError(f"blaschke1 requires |mu| < 1, got |mu| = {abs(mu)}")
        if self.kind is MapKind.BLASCHKE_SQUARED and abs(mu) >= 1 / 3:
            raise DomainError(f"blaschke2 requires |mu| < 1/3, got |mu| = {abs(mu)}")
        if self.kind is not MapKind.USER_TRAJECTORY:
            r = self.annulus_radius if self.annulus_radius > 0 else max(abs(mu), 0.5)
            if not (abs(mu) <= r < 1):
                raise DomainError(f"annulus radius must satisfy |mu| <= r < 1, got {r}")
            object.__setattr__(self, "annulus_radius", float(r))
        object.__setattr__(self, "mu", mu)


def blaschke1(mu, annulus_radius=0.0) -> CircleMap:
    return CircleMap(MapKind.BLASCHKE_PRODUCT, complex(mu), annulus_radius)


def blaschke2(mu, annulus_radius=0.0) -> CircleMap:
    return CircleMap(MapKind.BLASCHKE_SQUARED, complex(mu), annulus_radius)


def _check_on_circle(z):
    dev = np.max(np.abs(np.abs(z) - 1.0))
    if dev > _CIRCLE_TOL:
        raise DomainError(f"state off the unit circle by {dev:.3e} (tol {_CIRCLE_TOL})")


def eval_map(cmap: CircleMap, z):
    """Evaluate S(z) for z on the unit circle (scalar or array)."""
    if cmap.kind is MapKind.USER_TRAJECTORY:
        raise UnsupportedMap("trajectory data has no evaluable map")
    z = np.asarray(z, dtype=complex)
    _check_on_circle(z)
    mu = cmap.mu
    if cmap.kind is MapKind.BLASCHKE_PRODUCT:
        out = z * (z + mu) / (1 + np.conj(mu) * z)
    else:
        out = ((z - mu) / (1 - np.conj(mu) * z)) ** 2
    return out if out.ndim else complex(out)


def map_derivative(cmap: CircleMap, z):
    """Complex derivative S'(z); valid anywhere off the poles."""
    if cmap.kind is MapKind.USER_TRAJECTORY:
        raise UnsupportedMap("trajectory data has no evaluable map")
    z = np.asarray(z, dtype=complex)
    mu = cmap.mu
    if cmap.kind is MapKind.BLASCHKE_PRODUCT:
        b = (z + mu) / (1 + np.conj(mu) * z)
        db = (1 - abs(mu) ** 2) / (1 + np.conj(mu) * z) ** 2
        out = b + z * db
    else:
        b = (z - mu) / (1 - np.conj(mu) * z)
        db = (1 - abs(mu) ** 2) / (1 - np.conj(mu) * z) ** 2
        out = 2 * b * db
    return out if out.ndim else complex(out)


def preimages(cmap: CircleMap, w):
    """Both circle preimages of w under the degree-2 map, shape (2,) + w.shape.

    Solved in closed form by clearing denominators (quadratic formula for the
    product map, Moebius inversion of the two square roots for the squared
    factor).
    """
    if cmap.kind is MapKind.USER_TRAJECTORY:
        raise UnsupportedMap("trajectory data has no evaluable map")
    w = np.asarray(w, dtype=complex)
    mu = cmap.mu
    if cmap.kind is MapKind.BLASCHKE_PRODUCT:
        # y^2 + (mu - conj(mu) w) y - w = 0
        bq = mu - np.conj(mu) * w
        disc = np.sqrt(bq * bq + 4 * w)
        y = np.stack([(-bq + disc) / 2, (-bq - disc) / 2])
    else:
        s = np.sqrt(w)
        y = np.stack([(mu + s) / (1 + np.conj(mu) * s),
                      (mu - s) / (1 - np.conj(mu) * s)])
    return y


def transfer_apply(cmap: CircleMap, h, z):
    """Apply the transfer operator by explicit preimage summation.

    ``(Lh)(z) = sum_{S(y)=z} h(y) / |S'(y)|`` with respect to normalized arc
    length; ``h`` must be callable on complex arrays.
    """
    ys = preimages(cmap, z)
    out = np.zeros(np.shape(z), dtype=complex)
    for y in ys:
        out = out + np.asarray(h(y)) / np.abs(map_derivative(cmap, y))
    return out


def attracting_fixed_point(cmap: CircleMap, max_iter: int = 100,
                           tol: float = 1e-14) -> tuple[complex, complex]:
    """Interior attracting fixed point of the squared-factor map.

    Newton's method seeded at 0 with the analytic derivative; falls back to a
    200 x 200 grid search over the disk if Newton leaves the disk or stalls.
    Returns ``(z_star, S'(z_star))``.
    """
    if cmap.kind is not MapKind.BLASCHKE_SQUARED:
        raise UnsupportedMap("fixed-point search is defined for blaschke2 only")

    def newton(z0):
        z = complex(z0)
        for _ in range(max_iter):
            step = (eval_map_disk(cmap, z) - z) / (map_derivative(cmap, z) - 1)
            z -= step
            if abs(z) >= 1:
                return None
            if abs(step) < tol:
                return z
        return None

    z_star = newton(0j)
    if z_star is None:
        gx = np.linspace(-0.99, 0.99, 200)
        zz = gx[:, None] + 1j * gx[None, :]
        zz = zz[np.abs(zz) < 1]
        vals = np.abs(eval_map_disk(cmap, zz) - zz)
        z_star = newton(zz[np.argmin(vals)])
    if z_star is None:
        raise ConvergenceError("fixed-point iteration did not converge")
    deriv = map_derivative(cmap, z_star)
    if abs(eval_map_disk(cmap, z_star) - z_star) > 1e-12 or abs(deriv) >= 1:
        raise ConvergenceError("fixed point failed residual/attraction check")
    return z_star, complex(deriv)


def eval_map_disk(cmap: CircleMap, z):
    """Evaluate the analytic continuation of S off the circle (no |z|=1 check)."""
    z = np.asarray(z, dtype=complex)
    mu = cmap.mu
    if cmap.kind is MapKind.BLASCHKE_PRODUCT:
        out = z * (z + mu) / (1 + np.conj(mu) * z)
    elif cmap.kind is MapKind.BLASCHKE_SQUARED:
        out = ((z - mu) / (1 - np.conj(mu) * z)) ** 2
    else:
        raise UnsupportedMap("trajectory data has no evaluable map")
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class TrueSpectrum:
    """Known point spectrum: powers of the fixed-point multiplier plus 0."""

    base: complex
    n_max: int
    points: tuple = field(default=())

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)


def true_spectrum(cmap: CircleMap, n_max: int | None = None) -> TrueSpectrum:
    """Exact spectrum of the transfer operator for the benchmark maps.

    ``n_max`` defaults to the smallest n with ``|base|**n < 1e-8``; beyond
    that the powers are numerically indistinguishable from the accumulation
    point 0, which is always included.
    """
    if cmap.kind is MapKind.BLASCHKE_PRODUCT:
        base = cmap.mu  # multiplier of the fixed point at the origin
    elif cmap.kind is MapKind.BLASCHKE_SQUARED:
        base = attracting_fixed_point(cmap)[1]
    else:
        raise UnsupportedMap("no analytic spectrum for trajectory data")

    if n_max is None:
        if abs(base) == 0:
            n_max = 1
        else:
            n_max = max(1, int(np.ceil(np.log(1e-8) / np.log(abs(base)))))
    pts = {complex(1.0), complex(0.0)}
    for n in range(1, n_max + 1):
        pts.add(complex(base ** n))
        pts.add(complex(np.conj(base) ** n))
    ordered = sorted(pts, key=lambda p: (-abs(p), p.real, p.imag))
    return TrueSpectrum(base=complex(base), n_max=n_max, points=tuple(ordered))
