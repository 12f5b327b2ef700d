"""Anomalous similarity exponents, tail classification and zero counts.

The exponent alpha_k is the k-th value of alpha at which the power-law
coefficient C(alpha) of the tail vanishes, so that the profile decays like a
Gaussian.  It is found by scanning C in alpha and refining a sign change;
the resulting profile is then checked against the Kummer/Tricomi conditions
at its first and last matching roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import _kernels as _k
from .errors import BracketError, NumericalFailure, ScanExhaustedError
from .profile import (BuildOptions, PiecewiseProfile, ProblemParams, TailKind,
                      build_profile, classify_asymptotics, evaluate, tail_coefficients,
                      zero_crossings)

SCAN_STEP = 0.1
SCAN_OFFSET = 1e-4
# consecutive exponents can be closer than 1e-4 (gamma=-0.5, N=3: alpha_4 - alpha_3 ~ 5e-5)
PREV_OFFSET = 1e-7
ALPHA_XTOL = 1e-10
TRICOMI_TOL = 1e-7


def _profile(params, opts):
    try:
        return build_profile(params, opts)
    except NumericalFailure:
        # exact {M, V} degeneracy at even N: step off it by a few ulps
        bumped = replace(params, alpha=params.alpha * (1.0 + 1e-13))
        return build_profile(bumped, opts)


def tail_coefficient(params: ProblemParams, opts: BuildOptions | None = None) -> float:
    """Signed power-law coefficient C(alpha) of f ~ C eta^-alpha."""
    return tail_coefficients(_profile(params, opts))[0]


@dataclass(frozen=True)
class Certificate:
    """A posteriori checks on a computed exponent.

    With a1 = (N-alpha)/2 - 1 and X = (c_last/4) eta_last^2:

    Attributes:
        k: exponent index.
        n_breakpoints: roots of F of the profile at alpha_k (expected k + 1).
        kummer_residual: |M(a1, N/2; (1-gamma) eta_1^2/4)| relative to its
            contiguous neighbours (the first root condition).
        tricomi_residual: |U(a1, N/2; X)| relative to its contiguous
            neighbours (the last root condition).
        sign_printed: sign(M(a1, N/2; X)) sign(Gamma(a1 + 1)) (-1)^k.
        sign_value: ``sign_printed`` times sign(f(eta_last)), which is the
            sign the tail must have.  ``sign_printed`` alone is +1 only for
            even k because f(eta_last) has sign (-1)^k.
        sign_degenerate: M(a1, N/2; X) vanishes to rounding, so the sign
            product carries no information.  At gamma = 0 every root of F is
            a root of M(a1, N/2; eta^2/4), so this holds for every k; the sign
            check is then waived and the other three conditions decide.
    """

    k: int
    n_breakpoints: int
    kummer_residual: float
    tricomi_residual: float
    sign_printed: float
    sign_value: float
    sign_degenerate: bool = False

    @property
    def breakpoints_ok(self) -> bool:
        return self.n_breakpoints == self.k + 1

    @property
    def kummer_ok(self) -> bool:
        return self.kummer_residual <= TRICOMI_TOL

    @property
    def tricomi_ok(self) -> bool:
        return self.tricomi_residual <= TRICOMI_TOL

    @property
    def sign_ok(self) -> bool:
        return self.sign_degenerate or self.sign_value > 0

    @property
    def passed(self) -> bool:
        return self.breakpoints_ok and self.kummer_ok and self.tricomi_ok and self.sign_ok

    def as_dict(self) -> dict:
        return {
            "n_breakpoints": self.n_breakpoints,
            "kummer_residual": self.kummer_residual,
            "tricomi_residual": self.tricomi_residual,
            "sign_printed": self.sign_printed,
            "sign_value": self.sign_value,
            "sign_degenerate": self.sign_degenerate,
            "passed": self.passed,
        }


def _rel_u(a1, b, x):
    u0, u1 = _k.hyperu_pair(a1, b, x)
    um = (x + 2.0 * a1 - b) * u0 - a1 * (a1 - b + 1.0) * u1
    return abs(u0) / max(abs(u1), abs(um), 1e-300)


def _rel_m(a1, b, x):
    m0 = _k.hyp1f1(a1, b, x)
    scale = max(abs(_k.hyp1f1(a1 + 1.0, b, x)), abs(_k.hyp1f1(a1 - 1.0, b, x)), 1e-300)
    return abs(m0) / scale


def certify(k: int, profile: PiecewiseProfile) -> Certificate:
    """Evaluate the exponent conditions on a built profile."""
    p = profile.params
    nb = profile.n_breakpoints
    if nb == 0:
        return Certificate(k, 0, math.inf, math.inf, -1.0, -1.0)
    b = p.b
    a1 = b - p.a - 1.0
    x1 = 0.25 * (1.0 - p.gamma) * profile.breakpoints[0] ** 2
    x = 0.25 * profile.segments[-1].branch_c * profile.breakpoints[-1] ** 2
    scale = max(abs(_k.hyp1f1(a1 + 1.0, b, x)), abs(_k.hyp1f1(a1 - 1.0, b, x)), 1e-300)
    degenerate = abs(_k.hyp1f1(a1, b, x)) <= 1e-9 * scale
    sgn = 0.0 if degenerate else _sign_printed(k, a1, b, x)
    f_last = math.copysign(1.0, profile.f_at_breakpoints[-1])
    return Certificate(k, nb, _rel_m(a1, b, x1), _rel_u(a1, b, x), sgn, sgn * f_last, degenerate)


def _sign_printed(k, a1, b, x):
    m = _k.hyp1f1(a1, b, x)
    g = _k.rgamma(a1 + 1.0)
    if g == 0.0 or m == 0.0:
        return 0.0
    return math.copysign(1.0, m) * math.copysign(1.0, g) * (-1.0) ** k


def _changes(c0, c1):
    return c1 == 0.0 or (c0 > 0) != (c1 > 0)


def _first_bracket(probe, left, right, depth=0):
    """Leftmost sign change of C in [left, right], refining clustered exponents.

    Each exponent crossed adds one root of F, so a jump of two or more in the
    root count flags several exponents inside one scan step; the interval is
    then halved until each piece holds at most one.
    """
    (lo, c_lo, n_lo), (hi, c_hi, n_hi) = left, right
    if abs(n_hi - n_lo) <= 1 or depth >= 40:
        return (lo, hi) if _changes(c_lo, c_hi) else None
    mid_a = 0.5 * (lo + hi)
    mid = (mid_a,) + probe(mid_a)
    return (_first_bracket(probe, left, mid, depth + 1)
            or _first_bracket(probe, mid, right, depth + 1))


def _scan_start(k, dim, prev):
    if k == 0:
        return max(0.0, dim - 2.0) + SCAN_OFFSET
    return prev + PREV_OFFSET * max(1.0, prev)


def find_exponent(k: int, gamma: float, dim: int, prev: float | None = None, *,
                  opts: BuildOptions | None = None, window: float | None = None,
                  step: float = SCAN_STEP) -> tuple[float, Certificate]:
    """Locate alpha_k as the smallest zero of C(alpha) above alpha_{k-1}.

    Args:
        k: exponent index, k >= 0.
        gamma, dim: problem parameters.
        prev: alpha_{k-1}; computed recursively when omitted and k > 0.
        opts: profile build options.
        window: scan width in alpha, default 4 (k + 2).
        step: scan step in alpha.

    Returns:
        ``(alpha_k, certificate)``.

    Raises:
        ScanExhaustedError: no sign change of C inside the window.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > 0 and prev is None:
        prev = find_exponent(k - 1, gamma, dim, opts=opts)[0]
    window = 4.0 * (k + 2) if window is None else window
    lo = _scan_start(k, dim, prev)
    end = lo + window

    def probe(alpha):
        prof = _profile(ProblemParams(gamma, dim, alpha), opts)
        return tail_coefficients(prof)[0], prof.n_breakpoints

    def coef(alpha):
        return probe(alpha)[0]

    bracket = None
    left = (lo,) + probe(lo)
    # alpha_k can sit closer to alpha_{k-1} than the start offset; pull back
    # toward prev until the start has at most k + 1 roots of F
    while k > 0 and left[2] > k + 1 and lo - prev > 4.0 * ALPHA_XTOL:
        lo = prev + 0.25 * (lo - prev)
        left = (lo,) + probe(lo)
    while left[0] < end:
        hi = min(left[0] + step, end)
        right = (hi,) + probe(hi)
        bracket = _first_bracket(probe, left, right)
        if bracket is not None:
            break
        left = right
    if bracket is None:
        raise ScanExhaustedError(
            f"no sign change of the tail coefficient for k={k} on "
            f"[{_scan_start(k, dim, prev):.6g}, {end:.6g}]", k=k)
    lo, hi = bracket
    root = brentq(coef, lo, hi, xtol=0.1 * ALPHA_XTOL, rtol=1e-15, maxiter=200)
    # the side of the root just below it keeps exactly k + 1 roots of F
    best = None
    for shift in (0.0, -0.5 * ALPHA_XTOL, -ALPHA_XTOL, 0.5 * ALPHA_XTOL):
        alpha = root + shift
        cert = certify(k, _profile(ProblemParams(gamma, dim, alpha), opts))
        if best is None:
            best = (alpha, cert)
        if cert.breakpoints_ok:
            best = (alpha, cert)
            break
    return best


def _tail_samples(profile, lo, hi, n):
    etas = np.geomspace(lo, hi, n)
    f, _ = evaluate(profile, etas)
    keep = f != 0.0
    return etas[keep], np.abs(f[keep])


def tail_slope(profile: PiecewiseProfile, lo: float, hi: float, n: int = 400,
               correction: bool = False) -> float:
    """Least-squares slope of log|f| against log(eta) on [lo, hi].

    With ``correction`` the fit also carries an eta^-2 column, absorbing the
    first correction of the power-law tail, C eta^-alpha (1 + k eta^-2 + ...).
    """
    etas, f = _tail_samples(profile, lo, hi, n)
    x = np.log(etas)
    cols = [np.ones_like(x), x] + ([etas ** -2.0] if correction else [])
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), np.log(f), rcond=None)
    return float(coef[1])


def gaussian_window_end(profile: PiecewiseProfile, dominance: float = 1e3) -> float:
    """Largest eta <= eta_max where the Gaussian tail term exceeds the power-law one by ``dominance``.

    At a computed exponent C is only zero to solver precision, so far enough
    out the residual C eta^-alpha always wins; fits of the Gaussian rate must
    stop before that.
    """
    p = profile.params
    c_pow, d_gauss = tail_coefficients(profile)
    top = profile.eta_max
    if c_pow == 0.0:
        return top
    s = profile.segments[-1].branch_c / 4.0

    def margin(eta):
        # log of |D| eta^(alpha-N) e^(-s eta^2) / (|C| eta^-alpha), minus log(dominance)
        return (math.log(abs(d_gauss) / abs(c_pow)) + (2.0 * p.alpha - p.dim) * math.log(eta)
                - s * eta * eta - math.log(dominance))

    lo = max(profile.breakpoints[-1] if profile.breakpoints else 0.0, 1.0)
    if margin(top) >= 0.0:
        return top
    if margin(lo) < 0.0:
        return lo
    return brentq(margin, lo, top, xtol=1e-10)


def gauss_rate_fit(profile: PiecewiseProfile, lo: float, hi: float | None = None,
                   n: int = 400, correction: bool = False) -> float:
    """Fitted quadratic rate: minus the slope of log(|f| eta^(N - alpha)) against eta^2.

    ``hi`` defaults to ``gaussian_window_end(profile)``.  With ``correction``
    an eta^-2 column absorbs the first correction of the Gaussian tail.
    """
    p = profile.params
    hi = gaussian_window_end(profile) if hi is None else hi
    etas, f = _tail_samples(profile, lo, hi, n)
    y = np.log(f) + (p.dim - p.alpha) * np.log(etas)
    cols = [np.ones_like(etas), etas ** 2] + ([etas ** -2.0] if correction else [])
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), y, rcond=None)
    return float(-coef[1])

@dataclass(frozen=True)
class ExponentEntry:
    k: int
    alpha: float
    eta_roots: tuple
    gauss_rate: float
    certificate: Certificate


@dataclass(frozen=True)
class ExponentTable:
    """alpha_0 < alpha_1 < ... for one (gamma, N)."""

    gamma: float
    dim: int
    entries: tuple = field(default_factory=tuple)

    @property
    def alphas(self) -> list[float]:
        return [e.alpha for e in self.entries]

    def bracket(self, alpha: float) -> tuple[int, float | None, float]:
        """(k, alpha_k, alpha_{k+1}) with alpha_k < alpha <= alpha_{k+1}; k = -1 below alpha_0."""
        al = self.alphas
        if not al or alpha > al[-1]:
            top = al[-1] if al else None
            raise BracketError(f"alpha={alpha!r} above the last tabulated exponent {top!r}")
        for i, v in enumerate(al):
            if alpha <= v:
                return i - 1, (al[i - 1] if i > 0 else None), v
        raise BracketError("unreachable")


def exponent_table(gamma: float, dim: int, k_max: int, opts: BuildOptions | None = None) -> ExponentTable:
    """Exponents alpha_0..alpha_{k_max} with their matching roots."""
    entries = []
    prev = None
    for k in range(k_max + 1):
        alpha, cert = find_exponent(k, gamma, dim, prev, opts=opts)
        prof = _profile(ProblemParams(gamma, dim, alpha), opts)
        rate = 0.25 * (1.0 + (-1) ** k * gamma)
        entries.append(ExponentEntry(k, alpha, prof.breakpoints, rate, cert))
        prev = alpha
    return ExponentTable(float(gamma), int(dim), tuple(entries))


def count_zeros(params: ProblemParams, opts: BuildOptions | None = None, n_dense: int = 10000) -> int:
    """Sign changes of the closed-form profile on [0, eta_max]."""
    return len(zero_crossings(_profile(params, opts), n_dense=n_dense))


@dataclass(frozen=True)
class BehaviorReport:
    """Tail and zero structure of one profile.

    ``zeros`` is the count measured on the closed form; it equals
    ``zeros_predicted`` = #{j : alpha_j < alpha}.  ``zeros_printed`` is the
    count under the alternative reading "k zeros for alpha_k < alpha <=
    alpha_{k+1}", which is one lower above alpha_0.
    """

    params: ProblemParams
    tail_kind: TailKind
    tail_coeff: float
    tail_rate: float
    zeros: int
    zeros_predicted: int
    zeros_printed: int
    bracket_k: int
    bracket_lo: float | None
    bracket_hi: float

    def as_dict(self) -> dict:
        return {
            "gamma": self.params.gamma,
            "dim": self.params.dim,
            "alpha": self.params.alpha,
            "tail_kind": self.tail_kind.value,
            "tail_coeff": self.tail_coeff,
            "tail_rate": self.tail_rate,
            "zeros": self.zeros,
            "zeros_predicted": self.zeros_predicted,
            "zeros_printed_convention": self.zeros_printed,
            "bracket_k": self.bracket_k,
            "bracket_lo": self.bracket_lo,
            "bracket_hi": self.bracket_hi,
        }


def classify(params: ProblemParams, table: ExponentTable, opts: BuildOptions | None = None,
             snap: float = 1e-9) -> BehaviorReport:
    """Tail kind, tail constant, zero counts and bracketing exponents for alpha.

    An alpha within ``snap`` of a tabulated exponent is evaluated exactly at
    that exponent, so the Gaussian case is not lost to rounding of the input.

    Raises:
        BracketError: alpha lies above the last exponent in ``table``.
    """
    if params.gamma != table.gamma or params.dim != table.dim:
        raise BracketError("table was computed for different (gamma, N)")
    k, lo, hi = table.bracket(params.alpha)
    for v in table.alphas:
        if abs(params.alpha - v) <= snap * max(1.0, v):
            params = replace(params, alpha=v)
    prof = _profile(params, opts)
    desc = classify_asymptotics(prof)
    nz = len(zero_crossings(prof))
    predicted = sum(1 for v in table.alphas if v < params.alpha)
    printed = max(k, 0)
    return BehaviorReport(params, desc.kind, desc.coeff, desc.rate, nz, predicted, printed,
                          k, lo, hi)
