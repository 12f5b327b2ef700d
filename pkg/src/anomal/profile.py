"""Piecewise closed-form similarity profiles.

The profile solves

    f'' + (N-1)/eta f' = -(c/2) (alpha f + eta f'),   f(0) = 1, f'(0) = 0,

with c = 1 - gamma while F = alpha f + eta f' > 0 and c = 1 + gamma while
F < 0.  On each stretch where F keeps one sign the equation is linear and,
after z = -(c/4) eta^2, becomes Kummer's equation with a = alpha/2, b = N/2.
The profile is therefore A M(a,b;z) + B V(a,b;z) on every segment, and the
coefficients are fixed by C^1 matching at the roots of F.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import _kernels as _k
from .errors import BreakpointCapError, NumericalFailure

BASIS_MV = "mv"
BASIS_MY = "my"


@dataclass(frozen=True)
class ProblemParams:
    """One profile problem: gamma in (-1, 1), dimension N >= 1, alpha > 0."""

    gamma: float
    dim: int
    alpha: float

    def __post_init__(self):
        if not (-1.0 < self.gamma < 1.0):
            raise ValueError(f"gamma must lie in (-1, 1), got {self.gamma!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be an integer >= 1, got {self.dim!r}")
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha!r}")
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def a(self) -> float:
        return 0.5 * self.alpha

    @property
    def b(self) -> float:
        return 0.5 * self.dim

    def branch_c(self, m: int) -> float:
        """c_m = 1 + (-1)^m gamma."""
        return 1.0 + self.gamma if m % 2 == 0 else 1.0 - self.gamma


def default_eta_max(gamma: float) -> float:
    """Scan horizon 12 / sqrt(min(1-gamma, 1+gamma)/4)."""
    return 12.0 / math.sqrt(min(1.0 - gamma, 1.0 + gamma) / 4.0)


@dataclass(frozen=True)
class BuildOptions:
    """Knobs for ``build_profile``.

    Attributes:
        eta_max: scan horizon; ``None`` selects ``default_eta_max(gamma)``.
        scan_step: grid step for F in units of the branch length sqrt(4/c).
        root_rtol: relative tolerance of breakpoint refinement.
        max_breakpoints: cap on the number of matching roots.
        tol_gauss: |C| <= tol_gauss |D| classifies the tail as Gaussian.
        degeneracy_tol: relative Wronskian below which {M, V} is treated as
            linearly dependent.
    """

    eta_max: float | None = None
    scan_step: float = 0.05
    root_rtol: float = 1e-12
    max_breakpoints: int = 64
    tol_gauss: float = 1e-8
    degeneracy_tol: float = 1e-10


@dataclass(frozen=True)
class Segment:
    """f = coeff_a * y1 + coeff_b * y2 on [lo, hi) with branch constant c.

    ``basis`` is ``"mv"`` for (M, V) and ``"my"`` for (M, (-z)^(1-b) M(a-b+1, 2-b; z)),
    the latter only where M and V are dependent.
    """

    index_m: int
    branch_c: float
    lo: float
    hi: float
    coeff_a: float
    coeff_b: float
    basis: str = BASIS_MV

    def contains(self, eta: float) -> bool:
        return self.lo <= eta < self.hi


class TailKind(str, Enum):
    POWER_LAW = "PowerLaw"
    GAUSSIAN = "Gaussian"


@dataclass(frozen=True)
class AsymptoticDescriptor:
    """Leading tail: coeff * eta^-rate (power law) or coeff * eta^(alpha-N) e^(-rate eta^2)."""

    kind: TailKind
    coeff: float
    rate: float
    power_coeff: float = 0.0
    gauss_coeff: float = 0.0


@dataclass(frozen=True)
class PiecewiseProfile:
    """Immutable piecewise profile; call it or use ``evaluate`` for (f, f')."""

    params: ProblemParams
    segments: tuple
    breakpoints: tuple
    f_at_breakpoints: tuple
    eta_max: float
    options: BuildOptions = field(default_factory=BuildOptions, compare=False)

    def segment_for(self, eta: float) -> Segment:
        # right-hand segment at a breakpoint
        i = int(np.searchsorted(self.breakpoints, eta, side="right"))
        return self.segments[i]

    def __call__(self, eta):
        return evaluate(self, eta)

    @property
    def n_breakpoints(self) -> int:
        return len(self.breakpoints)


def _basis(a, b, c, eta, basis, need_v=True):
    """(y1, dy1/deta, y2, dy2/deta) of the segment basis at eta."""
    z = -0.25 * c * eta * eta
    dzde = -0.5 * c * eta
    y1 = _k.hyp1f1(a, b, z)
    dy1 = a / b * _k.hyp1f1(a + 1.0, b + 1.0, z) if a != 0.0 else 0.0
    if not need_v or z == 0.0:
        return y1, dy1 * dzde, 0.0, 0.0
    x = -z
    if basis == BASIS_MV:
        cc = b - a
        u0, u1 = _k.hyperu_pair(cc, b, x)
        e = math.exp(z)
        y2 = e * u0
        dy2 = e * (u0 - cc * ((1.0 + cc - b) * u1 - u0) / x)
    else:
        a2 = a - b + 1.0
        b2 = 2.0 - b
        mm = _k.hyp1f1(a2, b2, z)
        dmm = a2 / b2 * _k.hyp1f1(a2 + 1.0, b2 + 1.0, z) if a2 != 0.0 else 0.0
        p = x ** (1.0 - b)
        y2 = p * mm
        dy2 = -(1.0 - b) * x ** (-b) * mm + p * dmm
    return y1, dy1 * dzde, y2, dy2 * dzde


def segment_values(seg: Segment, params: ProblemParams, eta: float) -> tuple[float, float]:
    """(f, f') of one segment's closed form at eta, ignoring its interval."""
    y1, d1, y2, d2 = _basis(params.a, params.b, seg.branch_c, eta, seg.basis,
                            need_v=seg.coeff_b != 0.0)
    return seg.coeff_a * y1 + seg.coeff_b * y2, seg.coeff_a * d1 + seg.coeff_b * d2


def _residual_f(seg, params, eta):
    f, fp = segment_values(seg, params, eta)
    return params.alpha * f + eta * fp


def evaluate(profile: PiecewiseProfile, eta):
    """Value and derivative of the profile.

    Args:
        profile: a built profile.
        eta: scalar or array of non-negative points.

    Returns:
        ``(f, f_prime)``, floats for scalar input, arrays otherwise.
    """
    if np.ndim(eta) == 0:
        e = float(eta)
        if e < 0:
            raise ValueError("eta must be non-negative")
        if e == 0.0:
            return 1.0, 0.0
        return segment_values(profile.segment_for(e), profile.params, e)
    arr = np.asarray(eta, dtype=float)
    f = np.empty_like(arr)
    fp = np.empty_like(arr)
    for idx, e in np.ndenumerate(arr):
        f[idx], fp[idx] = evaluate(profile, float(e))
    return f, fp


def first_root(params: ProblemParams, rtol: float = 1e-12) -> float | None:
    """Smallest eta > 0 with M((N-alpha)/2 - 1, N/2; (1-gamma) eta^2/4) = 0.

    This is the first zero of F on the first segment.  Returns ``None`` when
    alpha <= N - 2, where M has positive parameters and no positive zero.
    """
    a1 = params.b - params.a - 1.0
    if a1 >= 0.0:
        return None
    b = params.b
    s = 0.25 * (1.0 - params.gamma)

    def g(eta):
        return _k.hyp1f1(a1, b, s * eta * eta)

    h = 0.05 / math.sqrt(s)
    # M(a1, b; x) with a1 < 0 has its first zero well before x = 700
    eta_cap = math.sqrt(700.0 / s)
    lo = 0.0
    eta = h
    while eta <= eta_cap:
        if g(eta) <= 0.0:
            if g(eta) == 0.0:
                return eta
            return _bisect(g, lo, eta, rtol)
        lo = eta
        eta += h
    return None


def _bisect(fun, lo, hi, rtol):
    flo = fun(lo) if lo > 0 else 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


def _next_root(seg, params, eta_max, opts):
    expected = 1.0 if seg.index_m % 2 == 1 else -1.0
    h = opts.scan_step * math.sqrt(4.0 / seg.branch_c)
    prev = seg.lo
    eta = seg.lo + h
    while prev < eta_max:
        eta = min(eta, eta_max)
        v = _residual_f(seg, params, eta)
        if v == 0.0:
            return eta
        if v * expected < 0.0:
            lo = prev

            def g(t):
                # F vanishes at the left breakpoint; pin its sign there
                if t == lo:
                    return expected
                return _residual_f(seg, params, t)

            return brentq(g, lo, eta, xtol=1e-15, rtol=max(opts.root_rtol * 0.1, 1e-15),
                          maxiter=200)
        prev = eta
        eta += h
    return None


def _match(params, m, eta, f, fp, prev, opts):
    c = params.branch_c(m)
    if c == prev.branch_c:
        # identical linear ODE on both sides: the closed form carries over
        return Segment(m, c, eta, math.inf, prev.coeff_a, prev.coeff_b, prev.basis)
    a, b = params.a, params.b
    basis = BASIS_MV
    y1, d1, y2, d2 = _basis(a, b, c, eta, basis)
    det = y1 * d2 - d1 * y2
    scale = abs(y1 * d2) + abs(d1 * y2)
    if not abs(det) > opts.degeneracy_tol * scale:
        if b != math.floor(b):
            basis = BASIS_MY
            y1, d1, y2, d2 = _basis(a, b, c, eta, basis)
            det = y1 * d2 - d1 * y2
            scale = abs(y1 * d2) + abs(d1 * y2)
        if not abs(det) > opts.degeneracy_tol * scale:
            raise NumericalFailure(
                f"matching system singular at eta={eta:.6g} (alpha={params.alpha!r}, N={params.dim})")
    ca = (f * d2 - fp * y2) / det
    cb = (y1 * fp - d1 * f) / det
    if not (math.isfinite(ca) and math.isfinite(cb)):
        raise NumericalFailure(f"non-finite matching coefficients at eta={eta:.6g}")
    return Segment(m, c, eta, math.inf, ca, cb, basis)


def build_profile(params: ProblemParams, opts: BuildOptions | None = None) -> PiecewiseProfile:
    """Construct the piecewise profile by C^1 matching at the roots of F.

    Segments are built left to right.  Each root of F = eta f' + alpha f is
    bracketed on a uniform grid and refined with Brent's method; the next
    segment solves the 2x2 matching system in its own basis.  The last
    segment is the one whose F keeps its sign up to ``eta_max``.

    Raises:
        NumericalFailure: matching system singular or non-finite.
        BreakpointCapError: more than ``opts.max_breakpoints`` roots.
    """
    opts = opts or BuildOptions()
    eta_max = opts.eta_max if opts.eta_max is not None else default_eta_max(params.gamma)
    seg = Segment(1, params.branch_c(1), 0.0, math.inf, 1.0, 0.0)
    segs, bps, fvals = [], [], []
    while True:
        root = _next_root(seg, params, eta_max, opts)
        if root is None:
            segs.append(seg)
            break
        if len(bps) >= opts.max_breakpoints:
            raise BreakpointCapError(
                f"more than {opts.max_breakpoints} breakpoints (alpha={params.alpha!r})")
        f, fp = segment_values(seg, params, root)
        segs.append(replace(seg, hi=root))
        bps.append(root)
        fvals.append(f)
        seg = _match(params, seg.index_m + 1, root, f, fp, seg, opts)
    return PiecewiseProfile(params, tuple(segs), tuple(bps), tuple(fvals), eta_max, opts)


def reduced_root_equation(segment: Segment, params: ProblemParams, eta: float) -> float:
    """F/2 rewritten through the contiguous relations.

    With z M' + a M = a M(a+1,b;z) and z V' + a V = -V(a+1,b;z),

        (eta f' + alpha f) / 2 = a A M(a+1,b;z) - B V(a+1,b;z),

    so the zeros coincide with those of F on the segment.
    """
    a, b = params.a, params.b
    z = -0.25 * segment.branch_c * eta * eta
    out = a * segment.coeff_a * _k.hyp1f1(a + 1.0, b, z)
    if segment.coeff_b != 0.0 and z < 0.0:
        x = -z
        if segment.basis == BASIS_MV:
            out -= segment.coeff_b * math.exp(z) * _k.hyperu(b - a - 1.0, b, x)
        else:
            a2 = a - b + 1.0
            out += segment.coeff_b * a2 * x ** (1.0 - b) * _k.hyp1f1(a2 + 1.0, 2.0 - b, z)
    return out


def tail_coefficients(profile: PiecewiseProfile) -> tuple[float, float]:
    """(C, D) of the last segment: f ~ C eta^-alpha + D eta^(alpha-N) e^(-c eta^2/4).

    The Gaussian part of M on the negative axis sits on a Stokes line; its
    coefficient is taken as the average cos(pi(b-a)) Gamma(b)/Gamma(a) of the
    two lateral expansions.
    """
    p = profile.params
    a, b = p.a, p.b
    last = profile.segments[-1]
    s = 0.25 * last.branch_c
    pa = s ** (-a)
    pg = s ** (a - b)
    g_m = math.cos(math.pi * (b - a)) * _k.gamma(b) * _k.rgamma(a)
    c_pow = last.coeff_a * _k.gamma(b) * _k.rgamma(b - a)
    if last.basis == BASIS_MV:
        d_gauss = last.coeff_b + last.coeff_a * g_m
    else:
        g2 = _k.gamma(2.0 - b)
        c_pow += last.coeff_b * g2 * _k.rgamma(1.0 - a)
        d_gauss = last.coeff_a * g_m + last.coeff_b * math.cos(math.pi * (1.0 - a)) * g2 * _k.rgamma(a - b + 1.0)
    return c_pow * pa, d_gauss * pg


def classify_asymptotics(profile: PiecewiseProfile, tol_gauss: float | None = None) -> AsymptoticDescriptor:
    """Classify the tail of the last segment as power law or Gaussian."""
    tol = profile.options.tol_gauss if tol_gauss is None else tol_gauss
    c_pow, d_gauss = tail_coefficients(profile)
    last = profile.segments[-1]
    if abs(c_pow) <= tol * abs(d_gauss):
        return AsymptoticDescriptor(TailKind.GAUSSIAN, d_gauss, 0.25 * last.branch_c, c_pow, d_gauss)
    return AsymptoticDescriptor(TailKind.POWER_LAW, c_pow, profile.params.alpha, c_pow, d_gauss)


def zero_crossings(profile: PiecewiseProfile, n_dense: int = 10000) -> list[float]:
    """Sign changes of f, one bisected root per interior interval plus the final segment.

    Interior intervals are scanned on a fine grid (a zero is expected once
    in each); the final segment is sampled densely on [eta_last, eta_max].
    """
    params = profile.params
    out = []
    edges = (0.0,) + profile.breakpoints
    for i, seg in enumerate(profile.segments):
        lo = edges[i]
        hi = seg.hi if math.isfinite(seg.hi) else max(profile.eta_max, lo)
        n = n_dense if not math.isfinite(seg.hi) else 200
        if hi <= lo:
            continue
        grid = np.linspace(lo, hi, n + 1)
        vals = [segment_values(seg, params, float(t))[0] if t > 0 else 1.0 for t in grid]
        for j in range(n):
            v0, v1 = vals[j], vals[j + 1]
            if v0 == 0.0 and j > 0:
                out.append(float(grid[j]))
            elif v0 * v1 < 0.0:
                out.append(brentq(lambda t: segment_values(seg, params, t)[0],
                                  float(grid[j]), float(grid[j + 1]), xtol=1e-14))
    return out
