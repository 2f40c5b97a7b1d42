"""The unit ball B, its unbounded realization H, and their Jordan triple determinants.

Points are complex numpy arrays whose last axis has length n; leading axes
are batch axes.  On H a point splits as ``w = (w1, w2)`` with ``w2`` the last
n - 1 coordinates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

BOUNDARY_TOL = 1e-12
SQRT2 = math.sqrt(2.0)


class Realization(str, enum.Enum):
    BALL = "ball"
    HALF_PLANE = "half_plane"


class DomainError(ValueError):
    """Point lies outside the open domain."""


class BoundaryError(DomainError):
    """Point lies on (or numerically at) the boundary of the domain."""


class PoleError(ArithmeticError):
    """A denominator of a fractional linear map or cocycle vanishes."""


def as_points(p, n=None):
    p = np.asarray(p, dtype=complex)
    if p.ndim == 0:
        p = p.reshape(1)
    if n is not None and p.shape[-1] != n:
        raise ValueError(f"expected points of dimension {n}, got shape {p.shape}")
    return p


def delta(z, w):
    """Jordan triple determinant of the ball, ``1 - w^* z``."""
    z, w = as_points(z), as_points(w)
    return 1.0 - np.sum(np.conj(w) * z, axis=-1)


def delta_h(z, w):
    """Jordan triple determinant of H, ``z1 + conj(w1) - w2^* z2``."""
    z, w = as_points(z), as_points(w)
    return z[..., 0] + np.conj(w[..., 0]) - np.sum(np.conj(w[..., 1:]) * z[..., 1:], axis=-1)


def ball_margin(z):
    """``1 - z^* z``; positive exactly inside B."""
    return delta(z, z).real


def half_plane_margin(w):
    """``Re w1 - |w2|^2 / 2``; positive exactly inside H (equals delta_h(w, w) / 2)."""
    w = as_points(w)
    return w[..., 0].real - 0.5 * np.sum(np.abs(w[..., 1:]) ** 2, axis=-1)


def margin(p, realization):
    if Realization(realization) is Realization.BALL:
        return ball_margin(p)
    return half_plane_margin(p)


def check_point(p, realization, tol=BOUNDARY_TOL):
    """Raise unless every point of ``p`` lies strictly inside its domain."""
    p = as_points(p)
    m = np.asarray(margin(p, realization))
    if not np.all(np.isfinite(m)):
        raise DomainError("non-finite point")
    if np.any(m < -tol):
        raise DomainError(f"point outside the {Realization(realization).value} domain (margin {m.min():.3g})")
    if np.any(m <= tol):
        raise BoundaryError(f"point on the boundary of the {Realization(realization).value} domain")
    return p


def in_domain(p, realization, tol=BOUNDARY_TOL):
    return np.asarray(margin(p, realization)) > tol


def invariant_density(p, realization):
    """Density of the invariant volume element w.r.t. Lebesgue measure."""
    p = check_point(p, realization)
    n = p.shape[-1]
    if Realization(realization) is Realization.BALL:
        base = delta(p, p).real
    else:
        base = delta_h(p, p).real
    return base ** (-(n + 1))


def cayley_point(z):
    """Image of a ball point under the partial Cayley transform."""
    z = as_points(z)
    den = 1.0 - z[..., 0]
    if np.any(np.abs(den) == 0):
        raise PoleError("Cayley transform has a pole at z1 = 1")
    w = np.empty_like(z)
    w[..., 0] = (1.0 + z[..., 0]) / den
    w[..., 1:] = SQRT2 * z[..., 1:] / den[..., None]
    return w


def cayley_point_inv(w):
    w = as_points(w)
    den = 1.0 + w[..., 0]
    if np.any(np.abs(den) == 0):
        raise PoleError("inverse Cayley transform has a pole at w1 = -1")
    z = np.empty_like(w)
    z[..., 0] = (w[..., 0] - 1.0) / den
    z[..., 1:] = SQRT2 * w[..., 1:] / den[..., None]
    return z


def psi(x, y, u):
    """Cusp coordinates ``(x, y, u) -> (x + u^*u/2 + iy, u)``.

    ``delta_h(psi(x, y, u), psi(x, y, u)) == 2x``.  Broadcasts over leading axes
    of ``x``, ``y`` and ``u`` (the latter with trailing axis n - 1).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("psi needs x > 0")
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=complex)
    if u.ndim == 0:
        u = u.reshape(1)
    shape = np.broadcast_shapes(x.shape, y.shape, u.shape[:-1])
    w = np.empty(shape + (u.shape[-1] + 1,), dtype=complex)
    w[..., 0] = x + 0.5 * np.sum(np.abs(u) ** 2, axis=-1) + 1j * y
    w[..., 1:] = u
    return w


def psi_inv(w):
    w = as_points(w)
    u = w[..., 1:].copy()
    x = w[..., 0].real - 0.5 * np.sum(np.abs(u) ** 2, axis=-1)
    return x, w[..., 0].imag.copy(), u


def sphere_volume(n):
    """Surface area of the unit sphere S^{2n-1} in C^n."""
    return 2.0 * math.pi**n / math.factorial(n - 1)


def ball_power_integral(lam, n, cutoff=0.0):
    """``int Delta(z, z)^lam dV`` over the truncated ball ``1 - |z|^2 > cutoff``.

    The integral is radial; in ``s = 1 - |z|^2`` it reads
    ``(pi^n / (n-1)!) int_cutoff^1 s^lam (1 - s)^(n-1) ds``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    pref = math.pi**n / math.factorial(n - 1)
    if cutoff <= 0.0:
        if lam <= -1:
            return math.inf
        return pref * special.beta(lam + 1, n)
    # expand (1 - s)^(n-1) binomially; each monomial integrates in closed form
    total = 0.0
    for j in range(n):
        coeff = math.comb(n - 1, j) * (-1) ** j
        p = lam + j
        if abs(p + 1) < 1e-15:
            total += coeff * (-math.log(cutoff))
        else:
            total += coeff * (1.0 - cutoff ** (p + 1)) / (p + 1)
    return pref * total


def midpoint_nodes(lo, hi, count):
    """Nodes and weights of the composite midpoint rule on [lo, hi]."""
    if count < 1:
        raise ValueError("need at least one cell")
    h = (hi - lo) / count
    nodes = lo + h * (np.arange(count) + 0.5)
    return nodes, np.full(count, h)


def log_midpoint_nodes(lo, hi, count):
    """Midpoint rule in ``log x``: nodes ``x_i`` and weights ``x_i * h`` on [lo, hi]."""
    if lo <= 0 or hi <= lo:
        raise ValueError("log-spaced rule needs 0 < lo < hi")
    tau, h = midpoint_nodes(math.log(lo), math.log(hi), count)
    x = np.exp(tau)
    return x, x * h


@dataclass(frozen=True)
class Region:
    """Integration box in cusp coordinates.

    ``x`` runs over ``[x_min, x_max]``, ``y`` over ``[y_min, y_max]`` and each
    coordinate of ``u`` over a rectangle ``(re_lo, re_hi, im_lo, im_hi)``.
    ``grid`` lists cell counts: x, y, then real and imaginary axis of every
    ``u`` coordinate.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    u_box: tuple = ()
    grid: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "u_box", tuple(tuple(float(v) for v in b) for b in self.u_box))
        object.__setattr__(self, "grid", tuple(int(g) for g in self.grid))
        if not self.x_min > 0:
            raise ValueError("x_min must be positive")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if not self.y_max > self.y_min:
            raise ValueError("y_max must exceed y_min")
        for b in self.u_box:
            if len(b) != 4 or not (b[1] > b[0] and b[3] > b[2]):
                raise ValueError(f"bad u box {b}")
        if len(self.grid) != 2 + 2 * len(self.u_box):
            raise ValueError(f"grid needs {2 + 2 * len(self.u_box)} resolutions, got {len(self.grid)}")
        if any(g < 2 for g in self.grid):
            raise ValueError("grid resolutions must be at least 2")

    @property
    def n(self):
        return 1 + len(self.u_box)

    def cross_section_volume(self):
        vol = self.y_max - self.y_min
        for re_lo, re_hi, im_lo, im_hi in self.u_box:
            vol *= (re_hi - re_lo) * (im_hi - im_lo)
        return vol

    def cross_section(self):
        """Midpoint nodes on the (y, u) box: arrays ``y``, ``u`` and weights."""
        axes = [midpoint_nodes(self.y_min, self.y_max, self.grid[1])]
        for i, (re_lo, re_hi, im_lo, im_hi) in enumerate(self.u_box):
            axes.append(midpoint_nodes(re_lo, re_hi, self.grid[2 + 2 * i]))
            axes.append(midpoint_nodes(im_lo, im_hi, self.grid[3 + 2 * i]))
        mesh = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        wmesh = np.meshgrid(*[a[1] for a in axes], indexing="ij")
        y = mesh[0].ravel()
        u = np.stack([mesh[1 + 2 * i].ravel() + 1j * mesh[2 + 2 * i].ravel() for i in range(len(self.u_box))], axis=-1)
        if not self.u_box:
            u = np.zeros((y.size, 0), dtype=complex)
        weights = np.prod([wm.ravel() for wm in wmesh], axis=0)
        return y, u, weights

    def to_dict(self):
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "y_min": self.y_min,
            "y_max": self.y_max,
            "u_box": [list(b) for b in self.u_box],
            "grid": list(self.grid),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["x_min"], d["x_max"], d["y_min"], d["y_max"], d.get("u_box", []), d["grid"])
