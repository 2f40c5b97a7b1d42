"""Exterior algebra on r odd generators.

Basis monomials are indexed by subsets I of {1, ..., r}, stored as bitsets
with the lowest bit standing for generator 1.  A monomial is always written
with increasing factor order, so products of monomials pick up the sign of
the sorting permutation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

MAX_RANK = 16


class DimensionError(ValueError):
    """Operands live in exterior algebras of different rank."""


@dataclass(frozen=True, order=False)
class MultiIndex:
    """Subset of {1, ..., r} encoded as a bitset."""

    bits: int = 0

    def __post_init__(self):
        if self.bits < 0 or self.bits >= (1 << (2 * MAX_RANK)):
            raise ValueError(f"bitset out of range: {self.bits}")

    @classmethod
    def from_indices(cls, indices) -> "MultiIndex":
        bits = 0
        for i in indices:
            i = int(i)
            if i < 1 or i > 2 * MAX_RANK:
                raise ValueError(f"odd index {i} out of range")
            if bits & (1 << (i - 1)):
                raise ValueError(f"repeated odd index {i}")
            bits |= 1 << (i - 1)
        return cls(bits)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.bits.bit_length()) if self.bits >> i & 1)

    def __len__(self):
        return bin(self.bits).count("1")

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return bool(self.bits >> (int(i) - 1) & 1)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        """Graded order: by cardinality, then lexicographically on indices."""
        return (len(self), self.indices)

    def max_index(self) -> int:
        return self.bits.bit_length()

    def __repr__(self):
        return "MultiIndex({" + ",".join(map(str, self.indices)) + "})"


EMPTY = MultiIndex(0)


def as_index(I) -> MultiIndex:
    if isinstance(I, MultiIndex):
        return I
    return MultiIndex.from_indices(I)


def all_indices(r: int, degree: int | None = None) -> list[MultiIndex]:
    """All multi-indices of {1..r} (optionally of one cardinality), graded order."""
    _check_rank(r)
    degrees = range(r + 1) if degree is None else [degree]
    out = []
    for rho in degrees:
        for combo in itertools.combinations(range(1, r + 1), rho):
            out.append(MultiIndex.from_indices(combo))
    return out


def _check_rank(r):
    if r < 0 or r > MAX_RANK:
        raise ValueError(f"rank r={r} outside 0..{MAX_RANK}")


def wedge(I, J):
    """Product of two basis monomials.

    Returns ``None`` when the monomials share a factor, otherwise
    ``(sign, K)`` with ``zeta^I ^ zeta^J = sign * zeta^K``.
    """
    I, J = as_index(I), as_index(J)
    if I.bits & J.bits:
        return None
    # each j in J has to move past every element of I larger than it
    inversions = 0
    for j in J.indices:
        inversions += bin(I.bits >> j).count("1")
    sign = -1 if inversions % 2 else 1
    return sign, MultiIndex(I.bits | J.bits)


def _laplace_det(M):
    k = M.shape[0]
    if k == 0:
        return 1.0 + 0j
    if k == 1:
        return complex(M[0, 0])
    if k == 2:
        return complex(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    total = 0j
    rest = list(range(1, k))
    for col in range(k):
        if M[0, col] == 0:
            continue
        cols = [c for c in range(k) if c != col]
        sub = M[np.ix_(rest, cols)]
        total += (-1) ** col * M[0, col] * _laplace_det(sub)
    return total


def minor(E, I, J) -> complex:
    """det of the submatrix of ``E`` with rows ``I`` and columns ``J``."""
    I, J = as_index(I), as_index(J)
    if len(I) != len(J):
        raise ValueError("minor needs equally many rows and columns")
    E = np.asarray(E, dtype=complex)
    rows = [i - 1 for i in I.indices]
    cols = [j - 1 for j in J.indices]
    sub = E[np.ix_(rows, cols)]
    if len(rows) <= 4:
        return _laplace_det(sub)
    return complex(np.linalg.det(sub))


def compound_matrix(E, degree: int):
    """Matrix of all degree-``degree`` minors, rows/columns in graded order.

    Returns ``(C, basis)`` where ``C[a, b] = det E[basis[a]; basis[b]]``.
    """
    E = np.asarray(E, dtype=complex)
    r = E.shape[0]
    if E.shape != (r, r):
        raise DimensionError(f"expected a square matrix, got shape {E.shape}")
    basis = all_indices(r, degree)
    C = np.empty((len(basis), len(basis)), dtype=complex)
    for a, I in enumerate(basis):
        for b, J in enumerate(basis):
            C[a, b] = minor(E, I, J)
    return C, basis


class GrassmannVector:
    """Element of the exterior algebra with complex coefficients.

    ``r`` is the number of generators.  The holomorphic sector uses indices
    in 1..r; the full sector (generators and their conjugates) uses 1..2r and
    is flagged with ``full=True``, where index ``r + i`` stands for the
    conjugate of generator ``i``.
    """

    __slots__ = ("r", "full", "_coeffs")

    def __init__(self, r: int, coeffs=None, full: bool = False):
        _check_rank(r)
        self.r = r
        self.full = full
        limit = 2 * r if full else r
        data = {}
        for I, c in (coeffs or {}).items():
            I = as_index(I)
            if I.max_index() > limit:
                raise DimensionError(f"{I} does not fit rank {limit}")
            c = complex(c)
            if c != 0:
                data[I] = data.get(I, 0j) + c
        self._coeffs = MappingProxyType(dict(sorted(data.items(), key=lambda kv: kv[0].sort_key())))

    @classmethod
    def basis(cls, r, I, full=False):
        return cls(r, {as_index(I): 1.0}, full=full)

    @property
    def coeffs(self):
        return self._coeffs

    def __getitem__(self, I):
        return self._coeffs.get(as_index(I), 0j)

    def support(self):
        return list(self._coeffs)

    def degrees(self):
        return sorted({len(I) for I in self._coeffs})

    def _check(self, other):
        if not isinstance(other, GrassmannVector):
            return NotImplemented
        if other.r != self.r or other.full != self.full:
            raise DimensionError(
                f"rank mismatch: ({self.r}, full={self.full}) vs ({other.r}, full={other.full})"
            )

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        data = dict(self._coeffs)
        for I, c in other._coeffs.items():
            data[I] = data.get(I, 0j) + c
        return GrassmannVector(self.r, data, self.full)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        if isinstance(scalar, GrassmannVector):
            return self.wedge(scalar)
        return GrassmannVector(self.r, {I: scalar * c for I, c in self._coeffs.items()}, self.full)

    __rmul__ = __mul__

    def __neg__(self):
        return -1 * self

    def wedge(self, other):
        self._check(other)
        data = {}
        for I, a in self._coeffs.items():
            for J, b in other._coeffs.items():
                prod = wedge(I, J)
                if prod is None:
                    continue
                sign, K = prod
                data[K] = data.get(K, 0j) + sign * a * b
        return GrassmannVector(self.r, data, self.full)

    def scalar_product(self, other) -> complex:
        return scalar_product(self, other)

    def norm(self) -> float:
        return norm(self)

    def to_array(self, basis=None):
        if basis is None:
            basis = all_indices(2 * self.r if self.full else self.r)
        return np.array([self[I] for I in basis], dtype=complex)

    def allclose(self, other, atol=1e-12):
        self._check(other)
        keys = set(self._coeffs) | set(other._coeffs)
        return all(abs(self[I] - other[I]) <= atol for I in keys)

    def __repr__(self):
        terms = ", ".join(f"{I.indices}: {c:.6g}" for I, c in self._coeffs.items())
        return f"GrassmannVector(r={self.r}, {{{terms}}})"


def scalar_product(a: GrassmannVector, b: GrassmannVector) -> complex:
    """Canonical scalar product, linear in ``a`` and conjugate-linear in ``b``."""
    if a.r != b.r or a.full != b.full:
        raise DimensionError("scalar product of vectors of different rank")
    total = 0j
    for I, c in a.coeffs.items():
        total += c * np.conj(b[I])
    return complex(total)


def norm(a: GrassmannVector) -> float:
    return math.sqrt(max(scalar_product(a, a).real, 0.0))


def exterior_action(E, x) -> GrassmannVector:
    """Image of ``zeta^I`` (or of a vector) under the substitution zeta -> E zeta.

    For a monomial ``I`` the result is ``sum_J det(E[I;J]) zeta^J`` over
    ``|J| = |I|``.  A :class:`GrassmannVector` argument is mapped linearly.
    """
    E = np.asarray(E, dtype=complex)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {E.shape}")
    r = E.shape[0]
    if isinstance(x, GrassmannVector):
        if x.r != r or x.full:
            raise DimensionError(f"matrix of size {r} acting on rank {x.r}")
        out = GrassmannVector(r)
        for I, c in x.coeffs.items():
            out = out + c * exterior_action(E, I)
        return out
    I = as_index(x)
    if I.max_index() > r:
        raise DimensionError(f"{I} does not fit rank {r}")
    data = {J: minor(E, I, J) for J in all_indices(r, len(I))}
    return GrassmannVector(r, data)
