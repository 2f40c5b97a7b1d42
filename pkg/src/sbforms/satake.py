"""L^s integrability near a cusp and the weight-threshold classifier.

In cusp coordinates ``w = psi(x, y, u)`` the invariant measure on H becomes
``x^-(n+1) dx dy du`` and ``delta_h(w, w) = 2x``, so the I-component ``q`` of a
weight-k form is in L^s near the cusp iff

    int |q(psi(x, y, u))|^s x^((k + |I|) s / 2 - (n + 1)) dx dy du < inf.

A component with strictly negative frequency support decays like
``exp(2 pi M0 x)``; a nonzero constant term leaves the pure power ``x^alpha``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .domain import Region, log_midpoint_nodes, psi
from .grassmann import as_index

INF = math.inf
STABLE_RTOL = 1e-6
DEFAULT_DOUBLINGS = 4
_CHUNK = 1 << 16


class KoecherViolation(ValueError):
    """A positive frequency was handed to a routine that assumes none."""


def weight_threshold(n, rho, r=None):
    """Smallest weight ``2n - rho`` at which the constant-term obstruction is sharp."""
    if n < 2:
        raise ValueError("the threshold needs n >= 2")
    if rho < 0 or (r is not None and rho > r):
        raise ValueError(f"odd degree rho={rho} out of range")
    return 2 * n - rho


def tail_exponent(k, rho, n, s):
    """Power of x in the s-th power integrand (for s = inf: in the supremum)."""
    if s == INF:
        return (k + rho) / 2
    return (k + rho) * s / 2 - (n + 1)


def _s_label(s):
    return "inf" if s == INF else s


@dataclass(frozen=True)
class TailResult:
    finite: bool
    alpha: float
    bound: float | None
    reason: str

    def to_dict(self):
        return {"finite": self.finite, "alpha": self.alpha, "bound": self.bound, "reason": self.reason}


def _upper_gamma(a, x):
    return float(mpmath.gammainc(a, x))


def tail_dichotomy(M0, k, rho, n, s, x0, C=1.0, volume=1.0):
    """Decide whether ``int_x0^inf exp(2 pi M0 x s) x^alpha dx`` is finite.

    Finite iff ``M0 < 0`` or (``M0 == 0`` and ``alpha < -1``); for ``s = inf``
    the supremum of ``exp(2 pi M0 x) x^alpha`` is finite iff ``M0 < 0`` or
    ``alpha <= 0``.  A finite verdict carries the bound ``C^s * volume * value``
    (``C * value`` for the supremum), where the integral is evaluated through
    the upper incomplete gamma function.
    """
    if x0 <= 0:
        raise ValueError("x0 must be positive")
    if M0 > 0:
        raise KoecherViolation(f"M0 = {M0} > 0: positive frequencies must be excluded upstream")
    if s != INF and s < 1:
        raise ValueError("s must lie in [1, inf]")
    alpha = tail_exponent(k, rho, n, s)
    if s == INF:
        if M0 < 0:
            beta = -2 * math.pi * M0
            xstar = alpha / beta if alpha > 0 else 0.0
            xm = max(x0, xstar)
            sup = math.exp(-beta * xm) * xm**alpha
            return TailResult(True, alpha, C * sup, "exponential decay")
        if alpha <= 0:
            return TailResult(True, alpha, C * x0**alpha, "bounded power")
        return TailResult(False, alpha, None, f"constant term times x^{alpha:g} is unbounded")
    if M0 < 0:
        beta = -2 * math.pi * M0 * s
        value = beta ** (-(alpha + 1)) * _upper_gamma(alpha + 1, beta * x0)
        return TailResult(True, alpha, C**s * volume * value, "exponential decay")
    if alpha < -1:
        value = x0 ** (alpha + 1) / (-alpha - 1)
        return TailResult(True, alpha, C**s * volume * value, f"power tail x^{alpha:g} integrable")
    return TailResult(False, alpha, None, f"power tail x^{alpha:g} not integrable (alpha >= -1)")


@dataclass
class NormResult:
    """Quadrature of the s-th power integrand (or the supremum for s = inf).

    ``partials[i]`` is the value on ``[x_min, x_maxes[i]]``; ``x_maxes`` doubles
    after the first entry.
    """

    s: float
    value: float
    partials: list
    x_maxes: list
    rel_change: float
    diagnostic: str

    @property
    def norm(self):
        if self.s == INF:
            return self.value
        return self.value ** (1.0 / self.s)

    @property
    def stable(self):
        return self.diagnostic == "stable"

    def to_dict(self):
        return {
            "s": _s_label(self.s),
            "value": self.value,
            "partials": list(self.partials),
            "x_maxes": list(self.x_maxes),
            "rel_change": self.rel_change,
            "diagnostic": self.diagnostic,
        }


def _segments(region, doublings):
    nx = region.grid[0]
    h = math.log(region.x_max / region.x_min) / nx
    per_doubling = max(2, math.ceil(math.log(2.0) / h))
    segs = [log_midpoint_nodes(region.x_min, region.x_max, nx)]
    hi = region.x_max
    for _ in range(doublings):
        segs.append(log_midpoint_nodes(hi, 2 * hi, per_doubling))
        hi *= 2
    return segs


def ls_norm(q, k, I, s, region, doublings=DEFAULT_DOUBLINGS, rtol=STABLE_RTOL):
    """Weighted L^s quantity of ``q`` over a cusp region, with a tail diagnostic.

    For finite ``s`` the value is the tensor midpoint quadrature (log-spaced
    in x) of ``|q o psi|^s x^((k+|I|)s/2 - (n+1))``; for ``s = inf`` it is the
    grid supremum of ``|q o psi| x^((k+|I|)/2)``.  The x range is then extended
    by ``doublings`` successive doublings of ``x_max``; the diagnostic is
    ``"stable"`` when the last two partial values agree to ``rtol`` relatively
    and ``"growing"`` otherwise.
    """
    if not isinstance(region, Region):
        region = Region.from_dict(region)
    if s != INF and s < 1:
        raise ValueError("s must lie in [1, inf]")
    I = as_index(I)
    y, u, wcs = region.cross_section()
    if y.size == 0:
        raise ValueError("empty cross-section grid")
    if s == INF:
        expo = (k + len(I)) / 2
    else:
        expo = (k + len(I)) * s / 2 - (region.n + 1)

    partials = []
    x_maxes = []
    running = 0.0
    hi = region.x_max
    for idx, (x, wx) in enumerate(_segments(region, doublings)):
        seg = 0.0
        step = max(1, _CHUNK // y.size)
        for start in range(0, x.size, step):
            xs = x[start : start + step]
            pts = psi(xs[:, None], y[None, :], u[None, :, :])
            vals = np.abs(np.asarray(q(pts), dtype=complex))
            if not np.all(np.isfinite(vals)):
                raise FloatingPointError("non-finite values of q on the quadrature grid")
            if s == INF:
                seg = max(seg, float(np.max(vals * xs[:, None] ** expo)))
            else:
                inner = (vals**s) @ wcs
                seg += float(np.sum(inner * xs**expo * wx[start : start + step]))
        running = max(running, seg) if s == INF else running + seg
        partials.append(running)
        if idx > 0:
            hi *= 2
        x_maxes.append(hi)

    if len(partials) >= 2:
        a, b = partials[-2], partials[-1]
        scale = max(abs(a), abs(b))
        rel = abs(b - a) / scale if scale > 0 else 0.0
    else:
        rel = 0.0
    diagnostic = "stable" if rel <= rtol else "growing"
    return NormResult(s, partials[-1], partials, x_maxes, rel, diagnostic)


def constant_term_onset(c0, tail, region):
    """Smallest sampled x beyond which the negative-mode mass stays below ``|c0| / 2``.

    ``tail`` evaluates the non-constant part of the component on H.  Returns
    ``None`` when the mass exceeds ``|c0| / 2`` at the last sampled x.
    """
    y, u, _ = region.cross_section()
    x, _ = log_midpoint_nodes(region.x_min, region.x_max, region.grid[0])
    mass = np.array([np.max(np.abs(tail(psi(xi, y, u)))) for xi in x])
    ok = mass <= 0.5 * abs(c0)
    if not ok[-1]:
        return None
    bad = np.nonzero(~ok)[0]
    return float(x[0] if bad.size == 0 else x[bad[-1] + 1])


class Verdict(str, enum.Enum):
    CUSP_LIKE = "CuspLike"
    CONSTANT_TERM_OBSTRUCTION = "ConstantTermObstruction"
    KOECHER_VIOLATION = "KoecherViolation"


@dataclass(frozen=True)
class GrowthProfile:
    """Frequency data of one component at a cusp.

    ``M0`` is the largest negative frequency (``None`` if there are no
    negative modes); ``C_bound`` is a constant with
    ``|q(psi(x, y, u))| <= C_bound exp(2 pi M0 x)`` on the region.
    """

    M0: float | None = None
    has_positive_frequency: bool = False
    has_constant_term: bool = False
    C_bound: float = 1.0

    def __post_init__(self):
        if self.M0 is not None and self.M0 >= 0:
            raise ValueError("M0 must be negative (or None)")
        if self.C_bound < 0:
            raise ValueError("C_bound must be nonnegative")

    def to_dict(self):
        return {
            "M0": self.M0,
            "has_positive_frequency": self.has_positive_frequency,
            "has_constant_term": self.has_constant_term,
            "C_bound": self.C_bound,
        }


def profile_from_modes(modes, region=None, zero_tol=1e-12):
    """Growth profile of a finite list of (nonzero) Fourier modes of one component.

    With a region, ``C_bound`` is the sampled constant
    ``exp(-2 pi M0 x0) sum_m sup |c_m(u) exp(2 pi m w1)|`` over the
    cross-section at ``x0 = x_min``.
    """
    neg = [md for md in modes if md.m < -zero_tol]
    M0 = max((md.m for md in neg), default=None)
    pos = any(md.m > zero_tol for md in modes)
    const = any(abs(md.m) <= zero_tol for md in modes)
    C = 1.0
    if region is not None and neg:
        y, u, _ = region.cross_section()
        w = psi(region.x_min, y, u)
        total = 0.0
        for md in neg:
            total += float(np.max(np.abs(md.c(w[..., 1:]) * np.exp(2 * math.pi * md.m * w[..., 0]))))
        C = math.exp(-2 * math.pi * M0 * region.x_min) * total
    return GrowthProfile(M0, pos, const, C)


@dataclass
class Classification:
    verdict: Verdict
    n: int
    k: int
    rho: int
    threshold: int
    tails: dict = field(default_factory=dict)
    partials: list = field(default_factory=list)

    def to_dict(self):
        return {
            "verdict": self.verdict.value,
            "n": self.n,
            "k": self.k,
            "rho": self.rho,
            "threshold": self.threshold,
            "s_values": [_s_label(s) for s in self.tails],
            "bounds": {str(_s_label(s)): t.to_dict() for s, t in self.tails.items()},
            "partials": self.partials,
        }


def classify(profile, n, k, rho, s=None, x0=1.0, volume=1.0):
    """Verdict for a component of degree ``rho`` and weight ``k``.

    KoecherViolation if a positive frequency is present; otherwise
    ConstantTermObstruction if there is a constant term (requires
    ``k >= 2n - rho``); otherwise CuspLike, with finite tail bounds for
    s in {1, 2, inf} (and ``s`` if given).
    """
    threshold = weight_threshold(n, rho)
    s_values = [1, 2, INF]
    if s is not None and s not in s_values:
        s_values.insert(-1, s)
    if profile.has_positive_frequency:
        return Classification(Verdict.KOECHER_VIOLATION, n, k, rho, threshold)
    if profile.has_constant_term:
        if k < threshold:
            raise ValueError(f"constant-term verdict needs k >= 2n - rho = {threshold}, got k = {k}")
        tails = {sv: tail_dichotomy(0.0, k, rho, n, sv, x0) for sv in s_values}
        return Classification(Verdict.CONSTANT_TERM_OBSTRUCTION, n, k, rho, threshold, tails)
    tails = {}
    for sv in s_values:
        if profile.M0 is None:
            tails[sv] = TailResult(True, tail_exponent(k, rho, n, sv), 0.0, "zero component")
        else:
            tails[sv] = tail_dichotomy(profile.M0, k, rho, n, sv, x0, profile.C_bound, volume)
    return Classification(Verdict.CUSP_LIKE, n, k, rho, threshold, tails)
