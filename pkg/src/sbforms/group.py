"""Block matrices of sS(U(n,1) x U(r)) and their fractional linear actions.

An element is stored as the (n+1) x (n+1) block ``g' = [[A, b], [c, d]]``
together with the odd block ``E``.  Elements tagged ``HALF_PLANE`` hold the
conjugate ``R g' R^{-1}`` by the partial Cayley matrix ``R`` and act on H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import PoleError, Realization, as_points, check_point

DEFAULT_TOL = 1e-10
SQRT2 = math.sqrt(2.0)


def form_matrix(n):
    """The hermitian form ``diag(1, ..., 1, -1)`` preserved by U(n, 1)."""
    J = np.eye(n + 1, dtype=complex)
    J[n, n] = -1
    return J


def cayley_matrix(n):
    """The partial Cayley matrix R (mixes the first and the last coordinate)."""
    R = np.eye(n + 1, dtype=complex)
    s = 1.0 / SQRT2
    R[0, 0] = s
    R[0, n] = s
    R[n, 0] = -s
    R[n, n] = s
    return R


def cayley_matrix_inv(n):
    return cayley_matrix(n).conj().T


class GroupElement:
    """Element ``(g', E)`` of G (ball tag) or of R G R^{-1} (half-plane tag)."""

    __slots__ = ("matrix", "E", "realization")

    def __init__(self, matrix, E, realization=Realization.BALL):
        matrix = np.array(matrix, dtype=complex)
        E = np.array(E, dtype=complex)
        if E.size == 0:
            E = np.zeros((0, 0), dtype=complex)
        elif E.ndim == 0:
            E = E.reshape(1, 1)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 2:
            raise ValueError(f"even block must be square of size n+1 >= 2, got {matrix.shape}")
        if E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise ValueError(f"odd block must be square, got {E.shape}")
        matrix.setflags(write=False)
        E.setflags(write=False)
        self.matrix = matrix
        self.E = E
        self.realization = Realization(realization)

    @classmethod
    def from_blocks(cls, A, b, c, d, E, realization=Realization.BALL):
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        n = A.shape[0]
        g = np.empty((n + 1, n + 1), dtype=complex)
        g[:n, :n] = A
        g[:n, n] = np.asarray(b, dtype=complex).reshape(n)
        g[n, :n] = np.asarray(c, dtype=complex).reshape(n)
        g[n, n] = d
        return cls(g, E, realization)

    @property
    def n(self):
        return self.matrix.shape[0] - 1

    @property
    def r(self):
        return self.E.shape[0]

    @property
    def A(self):
        return self.matrix[: self.n, : self.n]

    @property
    def b(self):
        return self.matrix[: self.n, self.n]

    @property
    def c(self):
        return self.matrix[self.n, : self.n]

    @property
    def d(self):
        return self.matrix[self.n, self.n]

    def __matmul__(self, other):
        return mul(self, other)

    def __repr__(self):
        return f"GroupElement(n={self.n}, r={self.r}, {self.realization.value})"

    def allclose(self, other, atol=1e-12):
        return (
            self.realization is other.realization
            and np.allclose(self.matrix, other.matrix, rtol=0, atol=atol)
            and np.allclose(self.E, other.E, rtol=0, atol=atol)
        )


def identity(n, r, realization=Realization.BALL):
    return GroupElement(np.eye(n + 1), np.eye(r), realization)


def _same_kind(g, h):
    if g.realization is not h.realization:
        raise ValueError(f"cannot combine {g.realization.value} and {h.realization.value} elements")
    if g.n != h.n or g.r != h.r:
        raise ValueError(f"dimension mismatch: (n, r) = ({g.n}, {g.r}) vs ({h.n}, {h.r})")


def mul(g, h):
    _same_kind(g, h)
    return GroupElement(g.matrix @ h.matrix, g.E @ h.E, g.realization)


def inv(g):
    return GroupElement(np.linalg.inv(g.matrix), np.linalg.inv(g.E), g.realization)


def to_half_plane(g):
    """Conjugate a ball element to ``R g R^{-1}`` acting on H."""
    if g.realization is Realization.HALF_PLANE:
        return g
    R = cayley_matrix(g.n)
    return GroupElement(R @ g.matrix @ R.conj().T, g.E, Realization.HALF_PLANE)


def to_ball(g):
    if g.realization is Realization.BALL:
        return g
    R = cayley_matrix(g.n)
    return GroupElement(R.conj().T @ g.matrix @ R, g.E, Realization.BALL)


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    form_residual: float
    unitarity_residual: float
    det_residual: float
    tol: float

    def __bool__(self):
        return self.member

    def to_dict(self):
        return {
            "member": self.member,
            "form_residual": self.form_residual,
            "unitarity_residual": self.unitarity_residual,
            "det_residual": self.det_residual,
            "tol": self.tol,
        }


def is_member(g, tol=DEFAULT_TOL) -> MembershipReport:
    """Check ``g'^* J g' = J``, ``E^* E = 1`` and ``det g' = det E``.

    Half-plane elements are conjugated back to the ball first.  Residuals are
    maximal absolute entry deviations.
    """
    gb = to_ball(g)
    J = form_matrix(gb.n)
    form = float(np.max(np.abs(gb.matrix.conj().T @ J @ gb.matrix - J)))
    if gb.r:
        unit = float(np.max(np.abs(gb.E.conj().T @ gb.E - np.eye(gb.r))))
    else:
        unit = 0.0
    det = float(abs(np.linalg.det(gb.matrix) - (np.linalg.det(gb.E) if gb.r else 1.0)))
    return MembershipReport(form < tol and unit < tol and det < tol, form, unit, det, tol)


def a_t(t, n, r):
    """The one-parameter subgroup mixing coordinate 1 with the last row (ball tag)."""
    g = np.eye(n + 1, dtype=complex)
    ch, sh = math.cosh(t), math.sinh(t)
    g[0, 0] = g[n, n] = ch
    g[0, n] = g[n, 0] = sh
    return GroupElement(g, np.eye(r), Realization.BALL)


def a_prime_t(t, n, r):
    """``R a_t R^{-1} = diag(e^t, 1, ..., 1, e^-t)`` (half-plane tag)."""
    g = np.eye(n + 1, dtype=complex)
    g[0, 0] = math.exp(t)
    g[n, n] = math.exp(-t)
    return GroupElement(g, np.eye(r), Realization.HALF_PLANE)


def n_prime(lam, u, r):
    """Heisenberg element with top row ``(1, u^*, i lam + u^*u/2)`` (half-plane tag)."""
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    n = u.size + 1
    g = np.eye(n + 1, dtype=complex)
    g[0, 1:n] = np.conj(u)
    g[0, n] = 1j * lam + 0.5 * np.vdot(u, u).real
    g[1:n, n] = u
    return GroupElement(g, np.eye(r), Realization.HALF_PLANE)


def heisenberg_mul(x, y):
    """Product of Heisenberg parameters ``(lam, u) * (mu, v)``."""
    lam, u = x
    mu, v = y
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    return lam + mu + np.vdot(u, v).imag, u + v


def center_element(E, n, eps=None, realization=Realization.BALL):
    """Central element ``(eps * 1, E)`` with ``eps^(n+1) = det E``.

    Without ``eps`` the principal (n+1)-th root of ``det E`` is used.
    """
    E = np.atleast_2d(np.asarray(E, dtype=complex))
    detE = np.linalg.det(E) if E.size else 1.0
    if eps is None:
        eps = complex(detE) ** (1.0 / (n + 1))
    elif abs(complex(eps) ** (n + 1) - detE) > DEFAULT_TOL:
        raise ValueError("eps^(n+1) must equal det E")
    return GroupElement(eps * np.eye(n + 1), E, realization)


def _denominator(g, z):
    return z @ g.c + g.d


def mobius(g, z, check=True):
    """Fractional linear action ``(A z + b) / (c z + d)`` on the body.

    With ``check`` the argument and the result must lie strictly inside the
    domain matching the element's tag.
    """
    z = as_points(z, g.n)
    if check:
        check_point(z, g.realization)
    den = _denominator(g, z)
    if np.any(den == 0):
        raise PoleError("vanishing denominator c z + d")
    out = (z @ g.A.T + g.b) / den[..., None]
    if check:
        check_point(out, g.realization)
    return out


def cocycle(g, z):
    """``j(g, z) = (c z + d)^{-1}``."""
    z = as_points(z, g.n)
    den = _denominator(g, z)
    if np.any(den == 0):
        raise PoleError("vanishing denominator c z + d")
    return 1.0 / den


def cocycle_cayley(z):
    """``j(R, z) = sqrt(2) / (1 - z1)``."""
    z = as_points(z)
    den = 1.0 - z[..., 0]
    if np.any(den == 0):
        raise PoleError("j(R, z) has a pole at z1 = 1")
    return SQRT2 / den


def cocycle_cayley_inv(w):
    """``j(R^{-1}, w) = sqrt(2) / (1 + w1)``."""
    w = as_points(w)
    den = 1.0 + w[..., 0]
    if np.any(den == 0):
        raise PoleError("j(R^-1, w) has a pole at w1 = -1")
    return SQRT2 / den


def random_unitary(dim, rng):
    """Haar-distributed unitary matrix (QR of a complex Ginibre matrix)."""
    if dim == 0:
        return np.zeros((0, 0), dtype=complex)
    Z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, Rm = np.linalg.qr(Z)
    ph = np.diag(Rm) / np.abs(np.diag(Rm))
    return Q * ph


def random_member(n, r, rng, t_max=1.5, realization=Realization.BALL):
    """Random element of G as ``k1 a_t k2`` with the determinant condition enforced."""

    def random_k():
        k = np.zeros((n + 1, n + 1), dtype=complex)
        k[:n, :n] = random_unitary(n, rng)
        k[n, n] = np.exp(2j * math.pi * rng.random())
        return k

    t = rng.uniform(-t_max, t_max)
    g = random_k() @ a_t(t, n, 0).matrix @ random_k()
    E = random_unitary(r, rng)
    detE = np.linalg.det(E) if r else 1.0
    ratio = detE / np.linalg.det(g)
    g = g * ratio ** (1.0 / (n + 1))
    el = GroupElement(g, E, Realization.BALL)
    return to_half_plane(el) if Realization(realization) is Realization.HALF_PLANE else el


def random_ball_points(n, count, rng, radius=0.9):
    """Points uniformly distributed in the ball of the given radius."""
    z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    z /= np.linalg.norm(z, axis=-1, keepdims=True)
    rad = radius * rng.random(count) ** (1.0 / (2 * n))
    return z * rad[:, None]


def _pairs(M):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.atleast_2d(M)]


def _unpairs(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def element_to_dict(g):
    return {
        "n": g.n,
        "r": g.r,
        "realization": g.realization.value,
        "A": _pairs(g.A),
        "b": [[float(v.real), float(v.imag)] for v in g.b],
        "c": [[float(v.real), float(v.imag)] for v in g.c],
        "d": [float(g.d.real), float(g.d.imag)],
        "E": _pairs(g.E) if g.r else [],
    }


def element_from_dict(data):
    n, r = int(data["n"]), int(data["r"])
    A = _unpairs(data["A"]).reshape(n, n)
    b = np.array([complex(*p) for p in data["b"]])
    c = np.array([complex(*p) for p in data["c"]])
    d = complex(*data["d"])
    E = _unpairs(data["E"]).reshape(r, r) if r else np.zeros((0, 0))
    if b.shape != (n,) or c.shape != (n,):
        raise ValueError("block shapes inconsistent with n")
    return GroupElement.from_blocks(A, b, c, d, E, data.get("realization", "ball"))
