"""Super holomorphic functions as families of component evaluators.

A super function ``f = sum_I f_I zeta^I`` of weight k is stored as a map from
multi-indices to :class:`Component` objects.  Evaluators are vectorized: they
take points of shape ``(..., n)`` and return complex arrays of shape ``(...)``.
Slash operators compose evaluators lazily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable

import numpy as np

from . import group as grp
from .domain import (
    Realization,
    as_points,
    cayley_point,
    cayley_point_inv,
    check_point,
    delta,
    delta_h,
)
from .grassmann import EMPTY, GrassmannVector, MultiIndex, all_indices, as_index, minor


@dataclass(frozen=True)
class Component:
    evaluator: Callable
    descriptor: str = "<callable>"

    def __call__(self, p):
        return self.evaluator(p)


def int_power(x, p):
    """``x**p`` for integer ``p`` by repeated squaring (no branch cuts)."""
    p = int(p)
    if p < 0:
        return 1.0 / int_power(x, -p)
    result = np.ones_like(x)
    base = x
    while p:
        if p & 1:
            result = result * base
        base = base * base
        p >>= 1
    return result


class SuperFunction:
    """Finite family of components ``f_I`` with weight ``k`` on B or H."""

    def __init__(self, n, r, k, components, realization=Realization.BALL):
        self.n = int(n)
        self.r = int(r)
        self.k = int(k)
        self.realization = Realization(realization)
        comps = {}
        for I, comp in components.items():
            I = as_index(I)
            if I.max_index() > self.r:
                raise ValueError(f"{I} does not fit r = {self.r}")
            if not isinstance(comp, Component):
                comp = Component(comp)
            if I in comps:
                comps[I] = _sum_components([comps[I], comp])
            else:
                comps[I] = comp
        self.components = MappingProxyType(dict(sorted(comps.items(), key=lambda kv: kv[0].sort_key())))

    def __repr__(self):
        body = ", ".join(f"{I.indices}: {c.descriptor}" for I, c in self.components.items())
        return f"SuperFunction(n={self.n}, r={self.r}, k={self.k}, {self.realization.value}, {{{body}}})"

    def degrees(self):
        return sorted({len(I) for I in self.components})

    def __add__(self, other):
        if (self.n, self.r, self.k, self.realization) != (other.n, other.r, other.k, other.realization):
            raise ValueError("can only add super functions of the same type")
        comps = dict(self.components)
        for I, c in other.components.items():
            comps[I] = _sum_components([comps[I], c]) if I in comps else c
        return SuperFunction(self.n, self.r, self.k, comps, self.realization)

    def evaluate_components(self, p, check=True):
        """Dict ``I -> f_I(p)`` for a batch of points."""
        p = as_points(p, self.n)
        if check:
            check_point(p, self.realization)
        return {I: np.asarray(c(p), dtype=complex) for I, c in self.components.items()}


def _sum_components(comps):
    comps = list(comps)

    def ev(p):
        total = comps[0](p)
        for c in comps[1:]:
            total = total + c(p)
        return total

    return Component(ev, " + ".join(c.descriptor for c in comps))


def evaluate(f, p) -> GrassmannVector:
    """Value of ``f`` at a single point as a Grassmann vector."""
    p = as_points(p, f.n)
    if p.ndim != 1:
        raise ValueError("evaluate takes a single point; use evaluate_components for batches")
    vals = f.evaluate_components(p)
    return GrassmannVector(f.r, {I: complex(v) for I, v in vals.items()})


def degree_project(f, rho):
    return SuperFunction(f.n, f.r, f.k, {I: c for I, c in f.components.items() if len(I) == rho}, f.realization)


def _transport(f, point_map, factor, new_realization, E, label):
    """Components ``h_J(p) = sum_I f_I(point_map(p)) factor(p)^(k+|I|) det E[I;J]``."""
    out = {}
    r = f.r
    for J in sorted({J for I in f.components for J in all_indices(r, len(I))}, key=MultiIndex.sort_key):
        terms = []
        for I, comp in f.components.items():
            if len(I) != len(J):
                continue
            coeff = minor(E, I, J) if E is not None else (1.0 if I == J else 0.0)
            if coeff == 0:
                continue
            terms.append((comp, coeff, f.k + len(I)))
        if not terms:
            continue

        def ev(p, terms=terms):
            q = point_map(p)
            j = factor(p)
            total = 0j
            for comp, coeff, power in terms:
                total = total + coeff * comp(q) * int_power(j, power)
            return total

        desc = " + ".join(f"{c.descriptor}" for c, _, _ in terms)
        out[J] = Component(ev, f"({desc})|{label}")
    return SuperFunction(f.n, f.r, f.k, out, new_realization)


def slash(f, g):
    """Weight-k slash ``f|_g``; a right action, ``f|_(gh) = (f|_g)|_h``."""
    if g.realization is not f.realization:
        raise ValueError(f"{g.realization.value} element cannot act on a {f.realization.value} function")
    if (g.n, g.r) != (f.n, f.r):
        raise ValueError("group element and function have different (n, r)")
    report = grp.is_member(g)
    if not report:
        raise ValueError(f"not a group element: {report.to_dict()}")
    return _transport(
        f,
        lambda p: grp.mobius(g, p),
        lambda p: grp.cocycle(g, p),
        f.realization,
        g.E,
        "g",
    )


def slash_cayley(f):
    """``f|_R``: function on H to function on B."""
    if f.realization is not Realization.HALF_PLANE:
        raise ValueError("slash_cayley takes a function on H")

    def pm(z):
        check_point(z, Realization.BALL)
        return cayley_point(z)

    return _transport(f, pm, grp.cocycle_cayley, Realization.BALL, None, "R")


def slash_cayley_inv(f):
    """``f|_{R^-1}``: function on B to function on H."""
    if f.realization is not Realization.BALL:
        raise ValueError("slash_cayley_inv takes a function on B")

    def pm(w):
        check_point(w, Realization.HALF_PLANE)
        return cayley_point_inv(w)

    return _transport(f, pm, grp.cocycle_cayley_inv, Realization.HALF_PLANE, None, "R^-1")


def lift(f, g) -> GrassmannVector:
    """``f~(g) = f|_g(0; eta)`` for a ball function."""
    if f.realization is not Realization.BALL or g.realization is not Realization.BALL:
        raise ValueError("the lift is defined for ball functions and ball elements")
    return evaluate(slash(f, g), np.zeros(f.n))


def amplitude(f, p):
    """``sqrt(sum_I |f_I(p)|^2 D(p, p)^(k + |I|))`` with D the determinant of the domain."""
    p = as_points(p, f.n)
    vals = f.evaluate_components(p)
    base = (delta(p, p) if f.realization is Realization.BALL else delta_h(p, p)).real
    total = np.zeros(p.shape[:-1])
    for I, v in vals.items():
        total = total + np.abs(v) ** 2 * base ** (f.k + len(I))
    return np.sqrt(total)


# ----------------------------------------------------------------------------
# evaluator constructors

def _c(value):
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def constant_evaluator(value):
    value = complex(value)
    return Component(lambda p: np.full(np.shape(p)[:-1], value, dtype=complex), f"{value:g}")


def monomial_evaluator(coeff, exponents):
    """``coeff * prod_i p_i^e_i`` (non-negative integer exponents)."""
    coeff = complex(coeff)
    exponents = [int(e) for e in exponents]
    if any(e < 0 for e in exponents):
        raise ValueError("monomial exponents must be non-negative")

    def ev(p):
        p = np.asarray(p, dtype=complex)
        out = np.full(p.shape[:-1], coeff, dtype=complex)
        for i, e in enumerate(exponents):
            if e:
                out = out * int_power(p[..., i], e)
        return out

    desc = "*".join([f"{coeff:g}"] + [f"p{i + 1}^{e}" for i, e in enumerate(exponents) if e])
    return Component(ev, desc)


def fourier_mode_evaluator(m, c):
    """``c(w2) * exp(2 pi m w1)`` on H; ``c`` is a component on C^(n-1)."""
    m = float(m)
    if not isinstance(c, Component):
        c = Component(c)

    def ev(w):
        w = np.asarray(w, dtype=complex)
        return c(w[..., 1:]) * np.exp(2 * math.pi * m * w[..., 0])

    return Component(ev, f"[{c.descriptor}]*exp(2pi*{m:g}*w1)")


def cocycle_power_evaluator(power, realization):
    """``j(R, z)^power`` on B or ``j(R^-1, w)^power`` on H."""
    power = int(power)
    if Realization(realization) is Realization.BALL:
        return Component(lambda z: int_power(grp.cocycle_cayley(z), power), f"j(R,z)^{power}")
    return Component(lambda w: int_power(grp.cocycle_cayley_inv(w), power), f"j(R^-1,w)^{power}")


def component_from_spec(spec, realization=Realization.BALL):
    """Build one component from a JSON function spec (see ``function_from_spec``)."""
    kind = spec["kind"]
    if kind == "constant":
        return constant_evaluator(_c(spec.get("value", 1.0)))
    if kind == "monomial":
        return monomial_evaluator(_c(spec.get("coeff", 1.0)), spec.get("exponents", []))
    if kind == "fourier_mode":
        if Realization(realization) is not Realization.HALF_PLANE:
            raise ValueError("fourier_mode components live on H")
        c = component_from_spec(spec["c"]) if "c" in spec else constant_evaluator(_c(spec.get("coeff", 1.0)))
        return fourier_mode_evaluator(spec["m"], c)
    if kind == "cocycle_power":
        comp = cocycle_power_evaluator(spec["power"], realization)
        coeff = _c(spec.get("coeff", 1.0))
        if coeff == 1:
            return comp
        return Component(lambda p: coeff * comp(p), f"{coeff:g}*{comp.descriptor}")
    raise ValueError(f"unknown function kind {kind!r}")


def function_from_spec(spec):
    """Super function from JSON.

    ``{"n": 2, "r": 1, "k": 4, "realization": "ball"|"half_plane",
    "components": [{"kind": ..., "odd_index": [1], ...}, ...]}``; components
    sharing an ``odd_index`` are summed.
    """
    realization = Realization(spec.get("realization", "ball"))
    comps = {}
    for item in spec["components"]:
        I = MultiIndex.from_indices(item.get("odd_index", []))
        comp = component_from_spec(item, realization)
        comps.setdefault(I, []).append(comp)
    merged = {I: (cs[0] if len(cs) == 1 else _sum_components(cs)) for I, cs in comps.items()}
    return SuperFunction(spec["n"], spec["r"], spec["k"], merged, realization)


def constant_function(n, r, k, value=1.0, odd_index=(), realization=Realization.BALL):
    return SuperFunction(n, r, k, {MultiIndex.from_indices(odd_index): constant_evaluator(value)}, realization)


__all__ = [
    "EMPTY",
    "Component",
    "SuperFunction",
    "amplitude",
    "constant_function",
    "degree_project",
    "evaluate",
    "function_from_spec",
    "lift",
    "slash",
    "slash_cayley",
    "slash_cayley_inv",
]
