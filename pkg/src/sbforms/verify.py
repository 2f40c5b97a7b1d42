"""Seeded identity suites over random group elements and points.

Each suite returns a :class:`SuiteResult` holding the worst residual seen.
The same suites back the ``verify`` and ``measure-check`` CLI commands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import domain as dom
from . import group as grp
from . import superfunc as sf
from .domain import Realization
from .grassmann import all_indices

FD_STEP = 1e-5


@dataclass
class SuiteResult:
    name: str
    residual: float
    tol: float
    samples: int

    @property
    def passed(self):
        return bool(self.residual < self.tol)

    def to_dict(self):
        return {"name": self.name, "residual": self.residual, "tol": self.tol, "samples": self.samples, "passed": self.passed}


def random_half_plane_points(n, count, rng):
    x = rng.uniform(0.2, 3.0, count)
    y = rng.uniform(-2.0, 2.0, count)
    u = rng.standard_normal((count, n - 1)) + 1j * rng.standard_normal((count, n - 1))
    return dom.psi(x, y, 0.7 * u)


def _points(n, count, rng, realization):
    if Realization(realization) is Realization.BALL:
        return grp.random_ball_points(n, count, rng)
    return random_half_plane_points(n, count, rng)


def cocycle_law(n, r, samples, rng, realization=Realization.BALL, tol=1e-10):
    worst = 0.0
    for _ in range(samples):
        g = grp.random_member(n, r, rng, realization=realization)
        h = grp.random_member(n, r, rng, realization=realization)
        z = _points(n, 1, rng, realization)[0]
        lhs = grp.cocycle(grp.mul(g, h), z)
        rhs = grp.cocycle(g, grp.mobius(h, z)) * grp.cocycle(h, z)
        worst = max(worst, float(abs(lhs - rhs)))
    return SuiteResult(f"cocycle_law[{Realization(realization).value}]", worst, tol, samples)


def delta_law(n, r, samples, rng, tol=1e-10):
    """``Delta(gz, gw) = Delta(z, w) j(g, z) conj(j(g, w))``."""
    worst = 0.0
    for _ in range(samples):
        g = grp.random_member(n, r, rng)
        z, w = grp.random_ball_points(n, 2, rng)
        lhs = dom.delta(grp.mobius(g, z), grp.mobius(g, w))
        rhs = dom.delta(z, w) * grp.cocycle(g, z) * np.conj(grp.cocycle(g, w))
        worst = max(worst, float(abs(lhs - rhs)))
    return SuiteResult("delta_law", worst, tol, samples)


def jacobian_fd(g, z, step=FD_STEP):
    """Complex Jacobian matrix of ``z -> g z`` by central differences; batched over z."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    cols = []
    for b in range(n):
        e = np.zeros(n)
        e[b] = step
        cols.append((grp.mobius(g, z + e, check=False) - grp.mobius(g, z - e, check=False)) / (2 * step))
    return np.stack(cols, axis=-1)


def jacobian_cocycle(n, r, samples, rng, tol=1e-6):
    """``|det D(z -> gz)| = |j(g, z)|^(n+1)``, relative error."""
    worst = 0.0
    for _ in range(samples):
        g = grp.random_member(n, r, rng)
        z = grp.random_ball_points(n, 1, rng)[0]
        det = abs(np.linalg.det(jacobian_fd(g, z)))
        ref = abs(grp.cocycle(g, z)) ** (n + 1)
        worst = max(worst, float(abs(det - ref) / ref))
    return SuiteResult("jacobian_cocycle", worst, tol, samples)


def heisenberg_rule(n, r, samples, rng, tol=1e-12):
    worst = 0.0
    for _ in range(samples):
        lam, mu = rng.uniform(-2, 2, 2)
        u = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        v = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        prod = grp.mul(grp.n_prime(lam, u, r), grp.n_prime(mu, v, r))
        lam2, w = grp.heisenberg_mul((lam, u), (mu, v))
        worst = max(worst, float(np.max(np.abs(prod.matrix - grp.n_prime(lam2, w, r).matrix))))
    return SuiteResult("heisenberg_rule", worst, tol, samples)


def cayley_conjugation(n, r, tol=1e-12):
    """``R a_t R^{-1} = a'_t`` for t in [-2, 2]."""
    R = grp.cayley_matrix(n)
    worst = 0.0
    ts = np.linspace(-2, 2, 9)
    for t in ts:
        lhs = R @ grp.a_t(t, n, r).matrix @ R.conj().T
        worst = max(worst, float(np.max(np.abs(lhs - grp.a_prime_t(t, n, r).matrix))))
    return SuiteResult("cayley_conjugation", worst, tol, len(ts))


def cayley_roundtrip(n, samples, rng, tol=1e-12):
    z = grp.random_ball_points(n, samples, rng)
    w = dom.cayley_point(z)
    dom.check_point(w, Realization.HALF_PLANE)
    err = float(np.max(np.abs(dom.cayley_point_inv(w) - z)))
    return SuiteResult("cayley_roundtrip", err, tol, samples)


def psi_delta(n, samples, rng, tol=1e-12):
    """``delta_h(psi(x, y, u), psi(x, y, u)) = 2x``, relative to x."""
    x = rng.uniform(0.1, 10.0, samples)
    y = rng.uniform(-5, 5, samples)
    u = rng.standard_normal((samples, n - 1)) + 1j * rng.standard_normal((samples, n - 1))
    w = dom.psi(x, y, u)
    err = float(np.max(np.abs(dom.delta_h(w, w) - 2 * x) / x))
    return SuiteResult("psi_delta", err, tol, samples)


def sample_function(n, r, k, realization=Realization.HALF_PLANE, rho=None):
    """Polynomial test function with one component per odd multi-index."""
    comps = {}
    for idx, I in enumerate(all_indices(r) if rho is None else all_indices(r, rho)):
        coeff = complex(1 + 0.25 * idx, 0.5 - 0.125 * idx)
        exps = [(idx + i) % 3 for i in range(n)]
        comps[I] = sf.Component(
            sf.monomial_evaluator(coeff, exps).evaluator,
            f"poly{idx}",
        )
    return sf.SuperFunction(n, r, k, comps, realization)


def _component_residual(f, h, pts):
    a = f.evaluate_components(pts)
    b = h.evaluate_components(pts)
    worst = 0.0
    for I in set(a) | set(b):
        va = a.get(I, 0.0)
        vb = b.get(I, 0.0)
        scale = np.maximum(1.0, np.abs(vb))
        worst = max(worst, float(np.max(np.abs(va - vb) / scale)))
    return worst


def cayley_slash_identity(n, r, k, samples, rng, tol=1e-12):
    """``(f|_R)|_{R^-1} = f`` pointwise on H."""
    f = sample_function(n, r, k)
    pts = random_half_plane_points(n, samples, rng)
    return SuiteResult("cayley_slash_identity", _component_residual(sf.slash_cayley_inv(sf.slash_cayley(f)), f, pts), tol, samples)


def commuting_square(n, r, k, samples, rng, tol=1e-10):
    """``(f|_R)|_g = (f|_{R g R^-1})|_R`` on random ball elements and points."""
    f = sample_function(n, r, k)
    worst = 0.0
    for _ in range(samples):
        g = grp.random_member(n, r, rng, t_max=1.0)
        z = grp.random_ball_points(n, 1, rng, radius=0.7)
        lhs = sf.slash(sf.slash_cayley(f), g)
        rhs = sf.slash_cayley(sf.slash(f, grp.to_half_plane(g)))
        worst = max(worst, _component_residual(lhs, rhs, z))
    return SuiteResult("commuting_square", worst, tol, samples)


def density_invariance(n, r, samples, rng, half_width=0.05, tol=1e-3, g=None):
    """Invariant mass of a small box equals the mass of its image under g.

    The image mass is computed by change of variables with a finite-difference
    Jacobian (real Jacobian = |complex det|^2), the box mass directly, both by
    Monte Carlo on the same uniform samples of the box.
    """
    if g is None:
        g = grp.random_member(n, r, rng, t_max=1.0)
    center = grp.random_ball_points(n, 1, rng, radius=0.5)[0]
    offs = rng.uniform(-half_width, half_width, (samples, 2 * n))
    z = center + offs[:, :n] + 1j * offs[:, n:]
    vol = (2 * half_width) ** (2 * n)
    mass_box = vol * float(np.mean(dom.invariant_density(z, Realization.BALL)))
    gz = grp.mobius(g, z)
    jac = np.abs(np.linalg.det(jacobian_fd(g, z))) ** 2
    mass_image = vol * float(np.mean(dom.invariant_density(gz, Realization.BALL) * jac))
    rel = abs(mass_image - mass_box) / mass_box
    return SuiteResult("density_invariance", rel, tol, samples)


def level_sets(n, r, samples, rng, tol=1e-10):
    """``delta_h(n'(lam, u) R a_t 0) = 2 e^(2t)`` for Heisenberg translates."""
    worst = 0.0
    for t in (0.0, 0.5, -0.5, 1.0, -1.0):
        base = dom.cayley_point(grp.mobius(grp.a_t(t, n, r), np.zeros(n)))
        for _ in range(samples):
            lam = rng.uniform(-3, 3)
            u = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
            w = grp.mobius(grp.n_prime(lam, u, r), base)
            val = dom.delta_h(w, w)
            worst = max(worst, float(abs(val - 2 * math.exp(2 * t)) / math.exp(2 * t)))
    return SuiteResult("level_sets", worst, tol, 5 * samples)


SUITES = (
    "cocycle_law",
    "cocycle_law_half_plane",
    "delta_law",
    "jacobian_cocycle",
    "heisenberg_rule",
    "cayley_conjugation",
    "cayley_roundtrip",
    "psi_delta",
    "cayley_slash_identity",
    "commuting_square",
    "level_sets",
)


def run_suites(n=2, r=2, k=3, seed=0, samples=200, suites=SUITES, tol=None):
    """Run the named suites with one seeded generator, in the given order.

    ``tol`` optionally maps suite names to tolerances overriding the defaults.
    """
    tol = tol or {}
    rng = np.random.default_rng(seed)
    runners = {
        "cocycle_law": lambda t: cocycle_law(n, r, samples, rng, tol=t),
        "cocycle_law_half_plane": lambda t: cocycle_law(n, r, samples, rng, Realization.HALF_PLANE, tol=t),
        "delta_law": lambda t: delta_law(n, r, samples, rng, tol=t),
        "jacobian_cocycle": lambda t: jacobian_cocycle(n, r, samples, rng, tol=t),
        "heisenberg_rule": lambda t: heisenberg_rule(n, r, samples, rng, tol=t),
        "cayley_conjugation": lambda t: cayley_conjugation(n, r, tol=t),
        "cayley_roundtrip": lambda t: cayley_roundtrip(n, max(samples // 2, 100), rng, tol=t),
        "psi_delta": lambda t: psi_delta(n, samples, rng, tol=t),
        "cayley_slash_identity": lambda t: cayley_slash_identity(n, r, k, samples, rng, tol=t),
        "commuting_square": lambda t: commuting_square(n, r, k, max(samples // 10, 10), rng, tol=t),
        "level_sets": lambda t: level_sets(n, r, max(samples // 10, 10), rng, tol=t),
    }
    defaults = {
        "cocycle_law": 1e-10,
        "cocycle_law_half_plane": 1e-10,
        "delta_law": 1e-10,
        "jacobian_cocycle": 1e-6,
        "heisenberg_rule": 1e-12,
        "cayley_conjugation": 1e-12,
        "cayley_roundtrip": 1e-12,
        "psi_delta": 1e-12,
        "cayley_slash_identity": 1e-12,
        "commuting_square": 1e-10,
        "level_sets": 1e-10,
    }
    results = []
    for name in suites:
        if name not in runners:
            raise KeyError(f"unknown suite {name!r}")
        results.append(runners[name](float(tol.get(name, defaults[name]))))
    return results


__all__ = ["SUITES", "SuiteResult", "run_suites", "density_invariance", "jacobian_fd", "sample_function"]
