"""Fourier analysis at a cusp of H.

A cusp is described by its period ``lambda0``, the phase exponent ``chi``
(the cusp element has cocycle ``exp(2 pi i chi)``) and the diagonal odd twist
``D`` (its odd block is ``exp(2 pi i D)``).  The I-component of a weight-k
form then expands in modes ``c_{I,m}(w2) exp(2 pi m w1)`` with ``m`` on the
shifted lattice ``(Z - tr_I D - (k + |I|) chi) / lambda0``.

Shifting ``chi`` by an integer only relabels the lattice index j.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .domain import Realization, as_points, check_point
from .grassmann import MultiIndex, as_index
from .superfunc import Component, SuperFunction, fourier_mode_evaluator

DEFAULT_QUAD_POINTS = 256
ZERO_FREQ_TOL = 1e-12


@dataclass(frozen=True)
class CuspData:
    lambda0: float
    chi: float = 0.0
    D: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "lambda0", float(self.lambda0))
        object.__setattr__(self, "chi", float(self.chi))
        D = np.asarray(self.D, dtype=float)
        if D.ndim == 2:
            if np.any(D - np.diag(np.diag(D))):
                raise ValueError("odd twist D must be diagonal")
            D = np.diag(D)
        object.__setattr__(self, "D", tuple(float(d) for d in np.atleast_1d(D)) if D.size else ())
        if self.lambda0 == 0 or not math.isfinite(self.lambda0):
            raise ValueError("lambda0 must be a nonzero real number")

    @property
    def r(self):
        return len(self.D)

    def odd_block(self):
        """``E = exp(2 pi i D)``."""
        return np.diag(np.exp(2j * math.pi * np.asarray(self.D)))

    def to_dict(self):
        return {"lambda0": self.lambda0, "chi": self.chi, "D": list(self.D)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["lambda0"], d.get("chi", 0.0), d.get("D", []))


def tr_I(D, I):
    """Sum of the diagonal entries of D selected by I."""
    D = D.D if isinstance(D, CuspData) else D
    D = np.asarray(D, dtype=float)
    if D.ndim == 2:
        D = np.diag(D)
    I = as_index(I)
    if I.max_index() > D.size:
        raise IndexError(f"{I} out of range for r = {D.size}")
    return float(sum(D[i - 1] for i in I.indices))


def twist(cusp, I, k):
    """``tr_I D + (k + |I|) chi``: the lattice offset of the I-component."""
    I = as_index(I)
    return tr_I(cusp.D, I) + (k + len(I)) * cusp.chi


def lattice_frequency(cusp, I, k, j):
    return (j - twist(cusp, I, k)) / cusp.lambda0


def lattice_index(cusp, I, k, m):
    """Real index ``j`` with ``m = (j - twist) / lambda0`` (integral iff m is on the lattice)."""
    return m * cusp.lambda0 + twist(cusp, I, k)


def on_lattice(cusp, I, k, m, atol=1e-12):
    j = lattice_index(cusp, I, k, m)
    return abs(j - round(j)) <= atol


def has_zero_frequency(cusp, I, k, atol=ZERO_FREQ_TOL):
    """Whether ``twist == 0 mod Z``, i.e. the lattice contains m = 0."""
    t = twist(cusp, I, k)
    return abs(t - round(t)) <= atol


def frequency_lattice(cusp, I, k, window):
    """Lattice frequencies for ``j`` in the inclusive integer window, ascending."""
    lo, hi = window
    return sorted(lattice_frequency(cusp, I, k, j) for j in range(int(lo), int(hi) + 1))


def fourier_coefficient(q, m, base, cusp, quad_points=DEFAULT_QUAD_POINTS):
    """``(1/lambda0) int_0^lambda0 q(w + i t e1) exp(-2 pi i m t) dt`` by the uniform rule.

    Returns ``c_{I,m}(w2) exp(2 pi m w1)`` at ``w = base``.  On band-limited
    inputs the rule is exact whenever every lattice-index gap is smaller than
    ``quad_points``.
    """
    if quad_points < 8:
        raise ValueError("quad_points must be at least 8")
    base = as_points(base)
    check_point(base, Realization.HALF_PLANE)
    t = cusp.lambda0 * np.arange(quad_points) / quad_points
    pts = np.repeat(base[None, :], quad_points, axis=0)
    pts[:, 0] = pts[:, 0] + 1j * t
    vals = np.asarray(q(pts), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite values of q on the quadrature contour")
    return complex(np.sum(vals * np.exp(-2j * math.pi * m * t)) / quad_points)


def recovered_coefficient(value, m, base):
    """``c_{I,m}(w2)`` from the product value returned by :func:`fourier_coefficient`."""
    base = as_points(base)
    return value * np.exp(-2 * math.pi * m * base[0])


@dataclass(frozen=True)
class FourierMode:
    I: MultiIndex
    m: float
    c: Component = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "I", as_index(self.I))
        if not isinstance(self.c, Component):
            object.__setattr__(self, "c", Component(self.c))


def synthesize(modes):
    """Dict ``I -> evaluator`` summing the given modes per multi-index."""
    grouped = {}
    for mode in modes:
        grouped.setdefault(mode.I, []).append(fourier_mode_evaluator(mode.m, mode.c))
    out = {}
    for I, comps in grouped.items():

        def ev(w, comps=comps):
            total = comps[0](w)
            for c in comps[1:]:
                total = total + c(w)
            return total

        out[I] = Component(ev, " + ".join(c.descriptor for c in comps))
    return out


def synthesize_function(modes, n, r, k):
    """Super function on H whose components are the synthesized mode sums."""
    return SuperFunction(n, r, k, synthesize(modes), Realization.HALF_PLANE)


def zero_evaluator(w):
    return np.zeros(np.shape(w)[:-1], dtype=complex)


def _map(fn, items, threads):
    # executor.map keeps input order, so results do not depend on scheduling
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


@dataclass
class CoefficientRecord:
    I: MultiIndex
    m: float
    j: int
    base: np.ndarray
    value: complex

    @property
    def coefficient(self):
        """``c_{I,m}(w2)`` at the base point."""
        return complex(recovered_coefficient(self.value, self.m, self.base))

    def to_dict(self):
        return {
            "I": list(self.I.indices),
            "m": self.m,
            "j": self.j,
            "base": [[float(v.real), float(v.imag)] for v in self.base],
            "value": [self.value.real, self.value.imag],
        }


def coefficient_table(f, cusp, window, bases, quad_points=DEFAULT_QUAD_POINTS, threads=1):
    """All lattice coefficients of every component of ``f`` over a window and base points."""
    if f.realization is not Realization.HALF_PLANE:
        raise ValueError("Fourier expansion needs a function on H")
    bases = [as_points(b, f.n) for b in bases]
    jobs = []
    for I, comp in f.components.items():
        for j in range(int(window[0]), int(window[1]) + 1):
            m = lattice_frequency(cusp, I, f.k, j)
            for b in bases:
                jobs.append((I, comp, m, j, b))

    def run(job):
        I, comp, m, j, b = job
        return CoefficientRecord(I, m, j, b, fourier_coefficient(comp, m, b, cusp, quad_points))

    return _map(run, jobs, threads)


@dataclass
class KoecherReport:
    passed: bool
    tol: float
    max_positive: float
    offending: list
    constancy: list

    def to_dict(self):
        return {
            "passed": self.passed,
            "tol": self.tol,
            "max_positive": self.max_positive,
            "offending": self.offending,
            "constancy": self.constancy,
        }


def koecher_check(f, cusp, window, bases, tol=1e-10, quad_points=DEFAULT_QUAD_POINTS, threads=1):
    """Check that no positive lattice frequency carries mass.

    For every component of ``f`` (a function on H), every lattice frequency
    ``m > 0`` in the window and every base point, ``|c_{I,m}(w2) e^{2 pi m w1}|``
    must stay below ``tol``.  When the lattice of a component contains 0, the
    constant coefficient ``c_{I,0}`` must also agree across the base points.
    """
    table = coefficient_table(f, cusp, window, bases, quad_points, threads)
    max_pos = 0.0
    offending = []
    for rec in table:
        if rec.m > ZERO_FREQ_TOL:
            mag = abs(rec.value)
            max_pos = max(max_pos, mag)
            if mag >= tol:
                offending.append({"I": list(rec.I.indices), "m": rec.m, "j": rec.j, "base": rec.to_dict()["base"], "mass": mag})
    constancy = []
    for I in f.components:
        if not has_zero_frequency(cusp, I, f.k):
            continue
        zero = [rec for rec in table if rec.I == I and abs(rec.m) <= ZERO_FREQ_TOL]
        if not zero:
            continue
        vals = np.array([rec.coefficient for rec in zero])
        spread = float(np.max(np.abs(vals - vals[0]))) if vals.size else 0.0
        constancy.append({"I": list(I.indices), "values": [[v.real, v.imag] for v in vals], "spread": spread, "constant": spread < tol})
    passed = not offending and all(c["constant"] for c in constancy)
    return KoecherReport(passed, tol, max_pos, offending, constancy)


def sample_directions(dim):
    """Fixed unit directions in C^dim: coordinate axes times 1, i, -1, -i and the diagonal."""
    dirs = []
    for i in range(dim):
        for ph in (1, 1j, -1, -1j):
            v = np.zeros(dim, dtype=complex)
            v[i] = ph
            dirs.append(v)
    diag = np.full(dim, (1 + 1j) / math.sqrt(2 * dim))
    dirs.append(diag)
    dirs.append(-diag)
    return dirs


@dataclass
class LiouvilleReport:
    passed: bool
    worst_ratio: float
    samples: list

    def to_dict(self):
        return {"passed": self.passed, "worst_ratio": self.worst_ratio, "samples": self.samples}


def liouville_bound_check(c, m, bound, radii, dim=1, rtol=1e-12):
    """Test ``|c(u)| <= bound * exp(-pi m |u|^2)`` on spheres of the given radii.

    ``c`` is an evaluator on ``C^dim``.  The growth bound holds for every
    coefficient of a form; for ``m > 0`` it forces ``c`` to vanish.
    """
    if any(rad <= 0 for rad in radii):
        raise ValueError("radii must be positive")
    samples = []
    worst = 0.0
    passed = True
    for rad in radii:
        for d in sample_directions(dim):
            u = rad * d
            val = abs(complex(np.asarray(c(u[None, :]))[0]))
            rhs = bound * math.exp(-math.pi * m * rad * rad)
            ok = val <= rhs * (1 + rtol)
            ratio = val / rhs if rhs > 0 else (math.inf if val > 0 else 0.0)
            worst = max(worst, ratio)
            passed = passed and ok
            samples.append({"radius": rad, "u": [[float(x.real), float(x.imag)] for x in u], "abs_c": val, "rhs": rhs, "ok": ok})
    return LiouvilleReport(passed, worst, samples)
