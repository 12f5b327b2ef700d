"""Real-valued Gamma, Kummer M, Tricomi U and the recessive companion V.

For z < 0 the pair ``{M(a,b;z), V(a,b;z)}`` with

    V(a,b;z) = e^z U(b-a, b; -z)

is a real fundamental system of Kummer's equation
``z w'' + (b - z) w' - a w = 0``, except when ``b - a`` is a non-positive
integer (then M is itself a multiple of V).  ``m2_solution`` supplies the
independent partner ``(-z)^(1-b) M(a-b+1, 2-b; z)`` for non-integer b.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernels as _k
from .errors import DomainError, PoleError

BACKEND = _k.BACKEND


class HypParams(NamedTuple):
    """Arguments of a confluent hypergeometric evaluation."""

    a: float
    b: float
    z: float


class BasisPair(NamedTuple):
    """Values and z-derivatives of M and V at one point."""

    value_m: float
    deriv_m: float
    value_v: float
    deriv_v: float

    @property
    def wronskian(self) -> float:
        return self.value_m * self.deriv_v - self.deriv_m * self.value_v


def _check_b(b):
    if b <= 0 and b == math.floor(b):
        raise PoleError(f"b={b!r} is a non-positive integer")


def gamma(x: float) -> float:
    """Gamma function (Lanczos, reflected below 1/2); PoleError on 0, -1, -2, ..."""
    return _k.gamma(float(x))


def reciprocal_gamma(x: float) -> float:
    """1/Gamma(x) as an entire function: exactly 0 at the non-positive integers."""
    return _k.rgamma(float(x))


def kummer_m(a: float, b: float, z: float) -> float:
    """Kummer's function M(a,b;z).

    Negative z is routed through M(a,b;z) = e^z M(b-a,b;-z), so the power
    series only ever runs on a positive argument.
    """
    return _k.hyp1f1(float(a), float(b), float(z))


def kummer_m_deriv(a: float, b: float, z: float) -> float:
    """dM/dz = (a/b) M(a+1, b+1; z)."""
    _check_b(b)
    if a == 0.0:
        return 0.0
    return a / b * _k.hyp1f1(a + 1.0, b + 1.0, float(z))


def tricomi_u(a: float, b: float, z: float) -> float:
    """Tricomi's U(a,b;z) for z > 0 (the solution recessive at +infinity)."""
    if not z > 0:
        raise DomainError(f"U(a,b;z) is only evaluated for z > 0, got z={z!r}; use v_solution")
    return _k.hyperu(float(a), float(b), float(z))


def tricomi_u_deriv(a: float, b: float, z: float) -> float:
    """dU/dz = a((1+a-b) U(a+1,b;z) - U(a,b;z)) / z."""
    if not z > 0:
        raise DomainError(f"U(a,b;z) is only evaluated for z > 0, got z={z!r}")
    u0, u1 = _k.hyperu_pair(float(a), float(b), float(z))
    return a * ((1.0 + a - b) * u1 - u0) / z


def _v_pair(a, b, z):
    # V and dV/dz from one contiguous pair of U values
    if not z < 0:
        raise DomainError(f"V(a,b;z) is only evaluated for z < 0, got z={z!r}")
    x = -z
    c = b - a
    u0, u1 = _k.hyperu_pair(c, b, x)
    du = c * ((1.0 + c - b) * u1 - u0) / x
    e = math.exp(z)
    return e * u0, e * (u0 - du)


def v_solution(a: float, b: float, z: float) -> float:
    """Recessive real solution V(a,b;z) = e^z U(b-a, b; -z) for z < 0."""
    if not z < 0:
        raise DomainError(f"V(a,b;z) is only evaluated for z < 0, got z={z!r}")
    return math.exp(z) * _k.hyperu(float(b - a), float(b), -float(z))


def v_solution_deriv(a: float, b: float, z: float) -> float:
    """dV/dz = e^z [U(b-a,b;-z) + (b-a) U(b-a+1, b+1; -z)]."""
    return _v_pair(float(a), float(b), float(z))[1]


def v_shifted(a: float, b: float, z: float) -> float:
    """V(a+1,b;z); satisfies z V'(a,b;z) + a V(a,b;z) = -V(a+1,b;z)."""
    return v_solution(a + 1.0, b, z)


def basis_pair(a: float, b: float, z: float) -> BasisPair:
    """M, M', V, V' at z < 0."""
    m = kummer_m(a, b, z)
    dm = kummer_m_deriv(a, b, z)
    v, dv = _v_pair(float(a), float(b), float(z))
    return BasisPair(m, dm, v, dv)


def m2_solution(a: float, b: float, z: float) -> tuple[float, float]:
    """Second solution (-z)^(1-b) M(a-b+1, 2-b; z) and its z-derivative, z < 0.

    Independent of M whenever b is not an integer; used where {M, V}
    degenerates (b - a a non-positive integer).
    """
    if not z < 0:
        raise DomainError("m2_solution needs z < 0")
    if b == math.floor(b):
        raise PoleError("m2_solution needs non-integer b")
    x = -z
    a2 = a - b + 1.0
    b2 = 2.0 - b
    mm = _k.hyp1f1(a2, b2, z)
    dmm = a2 / b2 * _k.hyp1f1(a2 + 1.0, b2 + 1.0, z) if a2 != 0.0 else 0.0
    p = x ** (1.0 - b)
    val = p * mm
    der = -(1.0 - b) * x ** (-b) * mm + p * dmm
    return val, der


def wronskian_constant(a: float, b: float) -> float:
    """K in W{M, V}(z) = K (-z)^(-b) e^z."""
    return _k.gamma(b) * _k.rgamma(b - a)


def real_wronskian(a: float, b: float, z: float) -> float:
    """Closed form of W{M(a,b;.), V(a,b;.)} at z < 0."""
    if not z < 0:
        raise DomainError("the real Wronskian is defined for z < 0")
    return wronskian_constant(a, b) * (-z) ** (-b) * math.exp(z)


def _asym_seed(a, b, x):
    # optimally truncated asymptotic series of U and dU/dx at large x
    s, ds, t = 1.0, 0.0, 1.0
    best = math.inf
    for k in range(1, 400):
        r = -(a + k - 1) * (a - b + k) / (k * x)
        if abs(r) >= 1.0:
            break
        t *= r
        if abs(t) > best:
            break
        best = abs(t)
        s += t
        ds += -k * t / x
    u = x ** (-a) * s
    du = -a * x ** (-a - 1.0) * s + x ** (-a) * ds
    return u, du


def tricomi_u_ode(a: float, b: float, z: float, rtol: float = 1e-12) -> float:
    """Reference U(a,b;z): integrate Kummer's ODE backwards from a far point.

    Seeded at z_far = max(100, 10|a|, 10|b|) by the asymptotic expansion.
    Backward integration is the stable direction for the recessive solution.
    Slow; meant for cross-checks only.
    """
    if not z > 0:
        raise DomainError("tricomi_u_ode needs z > 0")
    x_far = max(100.0, 10.0 * abs(a), 10.0 * abs(b), 2.0 * z)
    u, du = _asym_seed(a, b, x_far)

    def rhs(x, y):
        return [y[1], (a * y[0] - (b - x) * y[1]) / x]

    sol = solve_ivp(rhs, (x_far, z), [u, du], method="DOP853", rtol=rtol,
                    atol=1e-300, dense_output=False)
    if not sol.success:
        raise DomainError(sol.message)
    return float(sol.y[0, -1])


def kummer_residual(fun, a: float, b: float, z: float, h: float = 1e-3) -> float:
    """Central-difference residual of z w'' + (b - z) w' - a w at z."""
    w0 = fun(a, b, z)
    wp = fun(a, b, z + h)
    wm = fun(a, b, z - h)
    d1 = (wp - wm) / (2 * h)
    d2 = (wp - 2 * w0 + wm) / (h * h)
    return z * d2 + (b - z) * d1 - a * w0


def kummer_m_array(a: float, b: float, z) -> np.ndarray:
    """Vectorised convenience wrapper over ``kummer_m``."""
    zz = np.asarray(z, dtype=float)
    return np.vectorize(lambda t: _k.hyp1f1(a, b, float(t)), otypes=[float])(zz)
