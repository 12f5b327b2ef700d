# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels for Gamma, Kummer M and Tricomi U.

Same algorithms and constants as ``_pykernels.py``; the two must agree to
rounding.
"""
from libc.math cimport (exp, log, log1p, sin, sqrt, pow, fabs, floor, ceil,
                        fmod, lgamma, M_PI, INFINITY)

from ..errors import ConvergenceError, DomainError, PoleError

BACKEND = "cython"

DEF MAX_TERMS = 10000
DEF SERIES_EPS = 1e-17
DEF ASYM_MIN_X = 20.0
DEF ASYM_MAX_TERMS = 500
DEF A_MIN = 4.0
DEF LOG_CUTOFF = -42.0
DEF MAX_HALVINGS = 8
DEF SIDE_CAP = 1000000

cdef double _LANCZOS_G = 7.0
cdef double[9] _LANCZOS
_LANCZOS[:] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
]
cdef double _SQRT_2PI = 2.5066282746310002
cdef double _NAN = float("nan")


cdef inline bint _is_nonpos_int(double x) nogil:
    return x <= 0.0 and x == floor(x)


cpdef double sinpi(double x):
    cdef double r = fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return sin(M_PI * r)


cdef double _gamma_pos(double x) nogil:
    cdef double s, t, half, f
    cdef int i, n
    if x > 171.62:
        return INFINITY
    if x == floor(x) and x <= 30.0:
        f = 1.0
        n = <int>x
        for i in range(2, n):
            f *= i
        return f
    x -= 1.0
    s = _LANCZOS[0]
    for i in range(1, 9):
        s += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    half = pow(t, 0.5 * (x + 0.5))
    return _SQRT_2PI * half * exp(-t) * half * s


cpdef double gamma(double x) except? -1.0:
    if _is_nonpos_int(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    if x < 0.5:
        return M_PI / (sinpi(x) * _gamma_pos(1.0 - x))
    return _gamma_pos(x)


cpdef double rgamma(double x):
    if _is_nonpos_int(x):
        return 0.0
    if x < 0.5:
        return sinpi(x) * _gamma_pos(1.0 - x) / M_PI
    if x > 171.62:
        return 0.0
    return 1.0 / _gamma_pos(x)


cpdef double hyp1f1_series(double a, double b, double x) except? -1.0:
    cdef double term = 1.0, s = 1.0
    cdef int small = 0, k
    for k in range(MAX_TERMS):
        term *= (a + k) / (b + k) * x / (k + 1.0)
        s += term
        if fabs(term) <= SERIES_EPS * fabs(s):
            small += 1
            if small >= 3:
                return s
        else:
            small = 0
    raise ConvergenceError(f"M({a}, {b}; {x}) series did not converge in {MAX_TERMS} terms")


cdef bint _asym_sum(double a, double b, double x, double sign, double* out) nogil:
    cdef double s = 1.0, t = 1.0, c = a - b + 1.0, ratio
    cdef int k
    for k in range(ASYM_MAX_TERMS):
        ratio = (a + k) * (c + k) / ((k + 1.0) * x)
        if fabs(ratio) >= 1.0:
            return False
        t *= sign * ratio
        s += t
        if fabs(t) <= SERIES_EPS * fabs(s):
            out[0] = s
            return True
    return False


cdef bint _hyp1f1_neg_asym(double a, double b, double x, double* out) except -1:
    cdef double c = b - a, lead, s
    if x < ASYM_MIN_X:
        return False
    if not _is_nonpos_int(a):
        lead = -x + (2.0 * a - b) * log(x) + lgamma(c) - lgamma(a)
        if lead > -39.0:
            return False
    if not _asym_sum(a, b, x, 1.0, &s):
        return False
    out[0] = gamma(b) * rgamma(c) * pow(x, -a) * s
    return True


cpdef double hyp1f1(double a, double b, double z) except? -1.0:
    cdef double x, c, v
    if _is_nonpos_int(b):
        raise PoleError(f"M(a,b;z) undefined for b={b!r}")
    if z == 0.0:
        return 1.0
    if z > 0.0:
        return hyp1f1_series(a, b, z)
    x = -z
    c = b - a
    if _is_nonpos_int(c):
        return exp(-x) * hyp1f1_series(c, b, x)
    if _hyp1f1_neg_asym(a, b, x, &v):
        return v
    if x > 700.0:
        raise ConvergenceError(f"M({a}, {b}; {z}) out of range")
    return exp(-x) * hyp1f1_series(c, b, x)


cpdef double hyperu_poly(int n, double b, double x):
    cdef double total = 0.0, binom = 1.0, poch, sgn
    cdef int k, j
    for k in range(n + 1):
        poch = 1.0
        for j in range(n - k):
            poch *= b + k + j
        sgn = 1.0 if (n + k) % 2 == 0 else -1.0
        total += sgn * binom * poch * pow(x, k)
        binom = binom * (n - k) / (k + 1.0)
    return total


cdef bint _hyperu_asym(double a, double b, double x, double* out) nogil:
    cdef double s
    if x < ASYM_MIN_X:
        return False
    if not _asym_sum(a, b, x, -1.0, &s):
        return False
    out[0] = pow(x, -a) * s
    return True


def hyperu_asym(double a, double b, double x):
    cdef double v
    if _hyperu_asym(a, b, x, &v):
        return v
    return None


cdef inline double _log1pexp(double u) nogil:
    if u > 30.0:
        return u + log1p(exp(-u))
    return log1p(exp(u))


cdef inline double _dphi(double u, double a, double p, double x) nogil:
    cdef double e = exp(u)
    return -x * e + a + p / (1.0 + 1.0 / e)


cdef inline double _phi(double u, double a, double p, double x) nogil:
    return -x * exp(u) + a * u + p * _log1pexp(u)


cdef double _side_sum(double start, double step, double a, double p, double x,
                      double phi0) nogil:
    # NaN signals a tail that never decayed
    cdef double acc = 0.0, u = start, d
    cdef int i
    for i in range(SIDE_CAP):
        d = _phi(u, a, p, x) - phi0
        if d < LOG_CUTOFF:
            return acc
        acc += exp(d)
        u += step
    return _NAN


cpdef double hyperu_quad(double a, double b, double x) except? -1.0:
    cdef double p, lo, hi, mid, u0, e0, sig, kappa, h, phi0, s, total, mids, new, m
    cdef int i
    if not a > 0.0:
        raise DomainError("Laplace integral needs a > 0")
    p = b - a - 1.0
    lo = log(a / x) - 1.0
    while _dphi(lo, a, p, x) <= 0.0:
        lo -= 2.0
    m = a
    if a + p > m:
        m = a + p
    if 1.0 > m:
        m = 1.0
    hi = log(m / x) + 1.0
    while _dphi(hi, a, p, x) >= 0.0:
        hi += 2.0
    for i in range(200):
        mid = 0.5 * (lo + hi)
        if _dphi(mid, a, p, x) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9:
            break
    u0 = 0.5 * (lo + hi)
    e0 = exp(u0)
    sig = 1.0 / (1.0 + 1.0 / e0)
    kappa = x * e0 - p * sig * (1.0 - sig)
    if not kappa > 0.0:
        kappa = 1.0
    h = 0.5 / sqrt(kappa)
    if h > 0.2:
        h = 0.2
    phi0 = _phi(u0, a, p, x)
    s = 1.0 + _side_sum(u0 + h, h, a, p, x, phi0) + _side_sum(u0 - h, -h, a, p, x, phi0)
    if s != s:
        raise ConvergenceError("U quadrature tail did not decay")
    total = h * s
    for i in range(MAX_HALVINGS):
        mids = _side_sum(u0 + 0.5 * h, h, a, p, x, phi0) + _side_sum(u0 - 0.5 * h, -h, a, p, x, phi0)
        if mids != mids:
            raise ConvergenceError("U quadrature tail did not decay")
        new = 0.5 * (total + h * mids)
        h *= 0.5
        if fabs(new - total) <= 1e-14 * fabs(new):
            return exp(phi0 - lgamma(a)) * new
        total = new
    raise ConvergenceError(f"U({a}, {b}; {x}) quadrature did not settle")


cdef double _hyperu_direct(double a, double b, double x) except? -1.0:
    cdef double v
    if _is_nonpos_int(a):
        return hyperu_poly(<int>(-a), b, x)
    if _hyperu_asym(a, b, x, &v):
        return v
    return hyperu_quad(a, b, x)


def hyperu_pair(double a, double b, double x):
    cdef double u0 = 0.0, u1 = 0.0, a1 = a + 1.0, c, lo_val, hi_val, new
    cdef bint have0, have1
    cdef int n, j
    if not x > 0.0:
        raise DomainError(f"U(a,b;x) needs x > 0, got {x!r}")
    if _is_nonpos_int(a):
        u0 = hyperu_poly(<int>(-a), b, x)
        have0 = True
    else:
        have0 = _hyperu_asym(a, b, x, &u0)
    if _is_nonpos_int(a1):
        u1 = hyperu_poly(<int>(-a1), b, x)
        have1 = True
    else:
        have1 = _hyperu_asym(a1, b, x, &u1)
    if have0 and have1:
        return u0, u1
    if a >= A_MIN:
        if not have0:
            u0 = hyperu_quad(a, b, x)
        if not have1:
            u1 = hyperu_quad(a1, b, x)
        return u0, u1
    n = <int>ceil(A_MIN - a)
    c = a + n
    lo_val = _hyperu_direct(c, b, x)
    hi_val = _hyperu_direct(c + 1.0, b, x)
    for j in range(n):
        new = (x + 2.0 * c - b) * lo_val - c * (c - b + 1.0) * hi_val
        hi_val = lo_val
        lo_val = new
        c -= 1.0
    if not have0:
        u0 = lo_val
    if not have1:
        u1 = hi_val
    return u0, u1


cpdef double hyperu(double a, double b, double x) except? -1.0:
    cdef double v
    if not x > 0.0:
        raise DomainError(f"U(a,b;x) needs x > 0, got {x!r}")
    if _is_nonpos_int(a):
        return hyperu_poly(<int>(-a), b, x)
    if _hyperu_asym(a, b, x, &v):
        return v
    if a >= A_MIN:
        return hyperu_quad(a, b, x)
    return hyperu_pair(a, b, x)[0]
