"""Pure-Python scalar kernels for Gamma, Kummer M and Tricomi U.

Mirror of ``_ckernels.pyx``; keep the two in lockstep. Every function takes
and returns plain floats.
"""
import math

from ..errors import ConvergenceError, DomainError, PoleError

BACKEND = "python"

MAX_TERMS = 10000
SERIES_EPS = 1e-17
ASYM_MIN_X = 20.0
ASYM_MAX_TERMS = 500
# Laplace-integral quadrature is only used for a >= A_MIN; lower a is reached
# by downward recurrence, which is the stable direction for U.
A_MIN = 4.0
LOG_CUTOFF = -42.0
MAX_HALVINGS = 8

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = 2.5066282746310002


def _is_nonpos_int(x):
    return x <= 0.0 and x == math.floor(x)


def sinpi(x):
    """sin(pi*x), exactly zero at the integers."""
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def _gamma_pos(x):
    # x >= 0.5
    if x > 171.62:
        return math.inf
    if x == math.floor(x) and x <= 30.0:
        return float(math.factorial(int(x) - 1))
    x -= 1.0
    s = _LANCZOS[0]
    for i in range(1, 9):
        s += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    # split the power so t**(x+0.5) does not overflow before exp(-t) kicks in
    half = t ** (0.5 * (x + 0.5))
    return _SQRT_2PI * half * math.exp(-t) * half * s


def gamma(x):
    if _is_nonpos_int(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    if x < 0.5:
        return math.pi / (sinpi(x) * _gamma_pos(1.0 - x))
    return _gamma_pos(x)


def rgamma(x):
    if _is_nonpos_int(x):
        return 0.0
    if x < 0.5:
        return sinpi(x) * _gamma_pos(1.0 - x) / math.pi
    if x > 171.62:
        return 0.0
    return 1.0 / _gamma_pos(x)


def hyp1f1_series(a, b, x):
    """Power series of M(a,b;x) with term recursion."""
    term = 1.0
    s = 1.0
    small = 0
    for k in range(MAX_TERMS):
        term *= (a + k) / (b + k) * x / (k + 1.0)
        s += term
        if abs(term) <= SERIES_EPS * abs(s):
            small += 1
            if small >= 3:
                return s
        else:
            small = 0
    raise ConvergenceError(f"M({a}, {b}; {x}) series did not converge in {MAX_TERMS} terms")


def _log_abs_gamma(x):
    return math.lgamma(x)


def _asym_sum(a, b, x, sign):
    # sum_k (a)_k (a-b+1)_k / k! (sign*x)^-k ; None if it starts growing first
    s = 1.0
    t = 1.0
    c = a - b + 1.0
    for k in range(ASYM_MAX_TERMS):
        ratio = (a + k) * (c + k) / ((k + 1.0) * x)
        if abs(ratio) >= 1.0:
            return None
        t *= sign * ratio
        s += t
        if abs(t) <= SERIES_EPS * abs(s):
            return s
    return None


def _hyp1f1_neg_asym(a, b, x):
    # M(a,b;-x) for large x: power-law part only, when the Gaussian part is negligible
    if x < ASYM_MIN_X:
        return None
    c = b - a
    if not _is_nonpos_int(a):
        lead = -x + (2.0 * a - b) * math.log(x) + _log_abs_gamma(c) - _log_abs_gamma(a)
        if lead > -39.0:
            return None
    s = _asym_sum(a, b, x, 1.0)
    if s is None:
        return None
    return gamma(b) * rgamma(c) * x ** (-a) * s


def hyp1f1(a, b, z):
    """Kummer M(a,b;z) for real arguments."""
    if _is_nonpos_int(b):
        raise PoleError(f"M(a,b;z) undefined for b={b!r}")
    if z == 0.0:
        return 1.0
    if z > 0.0:
        return hyp1f1_series(a, b, z)
    x = -z
    c = b - a
    if _is_nonpos_int(c):
        return math.exp(-x) * hyp1f1_series(c, b, x)
    v = _hyp1f1_neg_asym(a, b, x)
    if v is not None:
        return v
    if x > 700.0:
        raise ConvergenceError(f"M({a}, {b}; {z}) out of range")
    return math.exp(-x) * hyp1f1_series(c, b, x)


def hyperu_poly(n, b, x):
    """U(-n,b;x) for integer n >= 0 as a finite polynomial."""
    total = 0.0
    binom = 1.0
    for k in range(n + 1):
        poch = 1.0
        for j in range(n - k):
            poch *= b + k + j
        total += (-1.0) ** (n + k) * binom * poch * x ** k
        binom = binom * (n - k) / (k + 1.0)
    return total


def hyperu_asym(a, b, x):
    """Asymptotic series for U(a,b;x); None when it cannot reach full precision."""
    if x < ASYM_MIN_X:
        return None
    s = _asym_sum(a, b, x, -1.0)
    if s is None:
        return None
    return x ** (-a) * s


def _log1pexp(u):
    if u > 30.0:
        return u + math.log1p(math.exp(-u))
    return math.log1p(math.exp(u))


def hyperu_quad(a, b, x):
    """U(a,b;x) for a > 0 from the Laplace integral, trapezoid rule in t = e^u.

    The integrand is analytic in a strip around the real u axis, so the
    trapezoid rule converges geometrically; the step is halved until two
    successive estimates agree.
    """
    if not a > 0.0:
        raise DomainError("Laplace integral needs a > 0")
    p = b - a - 1.0

    def dphi(u):
        e = math.exp(u)
        return -x * e + a + p / (1.0 + 1.0 / e)

    def phi(u):
        return -x * math.exp(u) + a * u + p * _log1pexp(u)

    lo = math.log(a / x) - 1.0
    while dphi(lo) <= 0.0:
        lo -= 2.0
    hi = math.log(max(a, a + p, 1.0) / x) + 1.0
    while dphi(hi) >= 0.0:
        hi += 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if dphi(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9:
            break
    u0 = 0.5 * (lo + hi)
    e0 = math.exp(u0)
    sig = 1.0 / (1.0 + 1.0 / e0)
    kappa = x * e0 - p * sig * (1.0 - sig)
    if not kappa > 0.0:
        kappa = 1.0
    h = min(0.2, 0.5 / math.sqrt(kappa))
    phi0 = phi(u0)

    def side_sum(start, step):
        acc = 0.0
        u = start
        for _ in range(1000000):
            d = phi(u) - phi0
            if d < LOG_CUTOFF:
                return acc
            acc += math.exp(d)
            u += step
        raise ConvergenceError("U quadrature tail did not decay")

    s = 1.0 + side_sum(u0 + h, h) + side_sum(u0 - h, -h)
    total = h * s
    for _ in range(MAX_HALVINGS):
        mids = side_sum(u0 + 0.5 * h, h) + side_sum(u0 - 0.5 * h, -h)
        new = 0.5 * (total + h * mids)
        h *= 0.5
        if abs(new - total) <= 1e-14 * abs(new):
            return math.exp(phi0 - math.lgamma(a)) * new
        total = new
    raise ConvergenceError(f"U({a}, {b}; {x}) quadrature did not settle")


def _hyperu_direct(a, b, x):
    # single value for a >= A_MIN-ish or non-positive integer a
    if _is_nonpos_int(a):
        return hyperu_poly(int(-a), b, x)
    v = hyperu_asym(a, b, x)
    if v is not None:
        return v
    return hyperu_quad(a, b, x)


def hyperu_pair(a, b, x):
    """(U(a,b;x), U(a+1,b;x)) for x > 0 and any real a."""
    if not x > 0.0:
        raise DomainError(f"U(a,b;x) needs x > 0, got {x!r}")
    u0 = hyperu_poly(int(-a), b, x) if _is_nonpos_int(a) else hyperu_asym(a, b, x)
    a1 = a + 1.0
    u1 = hyperu_poly(int(-a1), b, x) if _is_nonpos_int(a1) else hyperu_asym(a1, b, x)
    if u0 is not None and u1 is not None:
        return u0, u1
    if a >= A_MIN:
        if u0 is None:
            u0 = hyperu_quad(a, b, x)
        if u1 is None:
            u1 = hyperu_quad(a1, b, x)
        return u0, u1
    n = int(math.ceil(A_MIN - a))
    c = a + n
    lo_val = _hyperu_direct(c, b, x)
    hi_val = _hyperu_direct(c + 1.0, b, x)
    # U(c-1) = (x + 2c - b) U(c) - c (c - b + 1) U(c+1)
    for _ in range(n):
        new = (x + 2.0 * c - b) * lo_val - c * (c - b + 1.0) * hi_val
        hi_val = lo_val
        lo_val = new
        c -= 1.0
    if u0 is None:
        u0 = lo_val
    if u1 is None:
        u1 = hi_val
    return u0, u1


def hyperu(a, b, x):
    """Tricomi U(a,b;x) for x > 0."""
    if not x > 0.0:
        raise DomainError(f"U(a,b;x) needs x > 0, got {x!r}")
    if _is_nonpos_int(a):
        return hyperu_poly(int(-a), b, x)
    v = hyperu_asym(a, b, x)
    if v is not None:
        return v
    if a >= A_MIN:
        return hyperu_quad(a, b, x)
    return hyperu_pair(a, b, x)[0]
