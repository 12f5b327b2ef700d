"""Direct integration of the discontinuous profile ODEs.

Used as an independent check on the closed-form profiles: no special
functions are involved, only an adaptive Dormand-Prince 5(4) pair with
dense output, event location on the interpolant, and a restart on the
other branch at every switching point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import IntegrationError
from .profile import ProblemParams

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6] + (0.0,)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# dense output: y(t0 + th h) = y0 + h sum_i k_i sum_j P[i][j] th^(j+1)
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

SWITCH_F = "switch_F"
SWITCH_FPP = "switch_fpp"
SWITCH_FP = "switch_fp"
AMBIGUOUS = "ambiguous_branch"


@dataclass(frozen=True)
class OracleTrajectory:
    """Samples of (f, f') and the located branch switches.

    ``events`` holds ``(eta, kind)`` pairs with kind one of ``switch_F``,
    ``switch_fpp``, ``switch_fp`` (or ``ambiguous_branch`` as a warning).
    """

    etas: np.ndarray
    f_values: np.ndarray
    f_prime_values: np.ndarray
    events: tuple
    n_steps: int = 0

    def switch_points(self, kind: str = SWITCH_F) -> list[float]:
        return [e for e, k in self.events if k == kind]

    def value_at(self, eta: float) -> float:
        """Linear interpolation of f; exact at sample points."""
        return float(np.interp(eta, self.etas, self.f_values))

    @property
    def zero_count(self) -> int:
        s = np.sign(self.f_values)
        s = s[s != 0]
        return int(np.count_nonzero(s[1:] != s[:-1]))


def _step(rhs, t, y, h, k1):
    ks = [k1]
    for i in range(1, 7):
        row = _A[i]
        yi = [y[j] + h * sum(row[s] * ks[s][j] for s in range(i)) for j in range(2)]
        ks.append(rhs(t + _C[i] * h, yi))
    y_new = [y[j] + h * sum(_B[s] * ks[s][j] for s in range(6)) for j in range(2)]
    err = [h * sum(_E[s] * ks[s][j] for s in range(7)) for j in range(2)]
    return y_new, err, ks


def _dense(y0, h, ks, th):
    w = [sum(_P[i][q] * th ** (q + 1) for q in range(4)) for i in range(7)]
    return [y0[j] + h * sum(w[i] * ks[i][j] for i in range(7)) for j in range(2)]


class _Integrator:
    """Adaptive DP5(4) on a fixed right-hand side, stopping at the first event."""

    def __init__(self, rtol, atol, h_min=1e-14):
        self.rtol = rtol
        self.atol = atol
        self.h_min = h_min
        self.n_steps = 0

    def run(self, rhs, t0, y0, t_end, h, events, record):
        """Integrate from t0 towards t_end.

        ``events`` is a list of (function(t, y) -> float, kind, sign); the run
        stops at the first sign change of any of them.  ``sign`` is the sign the
        branch assumes at t0, so a value that is zero up to rounding right
        after a restart is not mistaken for another switch.  ``record(t0, y0, t1, y1)``
        receives every accepted step.  Returns (t, y, h, kind or None).
        """
        t, y = t0, list(y0)
        k1 = rhs(t, y)
        g_prev = [float(sg) if sg else ev(t, y) for ev, _, sg in events]
        while t < t_end:
            h = min(h, t_end - t)
            if h < self.h_min * max(1.0, abs(t)):
                raise IntegrationError(f"step size underflow at eta={t:.12g}", location=t)
            y_new, err, ks = _step(rhs, t, y, h, k1)
            sc = [self.atol + self.rtol * max(abs(y[j]), abs(y_new[j])) for j in range(2)]
            en = math.sqrt(0.5 * sum((err[j] / sc[j]) ** 2 for j in range(2)))
            if not math.isfinite(en):
                h *= 0.1
                continue
            if en > 1.0:
                h *= max(0.2, 0.9 * en ** -0.2)
                continue
            self.n_steps += 1
            t_new = t + h
            g_new = [ev(t_new, y_new) for ev, _, _ in events]
            hit = None
            for i, (g0, g1) in enumerate(zip(g_prev, g_new)):
                if g0 != 0.0 and (g1 == 0.0 or (g0 > 0) != (g1 > 0)):
                    th = self._locate(events[i][0], t, y, h, ks, g0, g1)
                    if hit is None or th < hit[0]:
                        hit = (th, i)
            if hit is not None:
                th, i = hit
                t_ev = t + th * h
                # one fresh step straight to the event instead of trusting the interpolant
                y_ev, _, _ = _step(rhs, t, y, th * h, k1)
                record(t, y, t_ev, y_ev)
                return t_ev, y_ev, h, events[i][1]
            record(t, y, t_new, y_new)
            t, y = t_new, y_new
            k1 = ks[6]
            g_prev = g_new
            fac = 5.0 if en == 0.0 else min(5.0, 0.9 * en ** -0.2)
            h *= fac
        return t, y, h, None

    @staticmethod
    def _locate(ev, t, y, h, ks, g0, g1):
        if g1 == 0.0:
            return 1.0

        def g(th):
            if th == 0.0:
                return g0
            yy = _dense(y, h, ks, th)
            return ev(t + th * h, yy)

        return brentq(g, 0.0, 1.0, xtol=1e-13, rtol=1e-15)


def _seed(alpha, dim, c, eta):
    # f = 1 + p eta^2 + q eta^4 from f'' + (N-1)/eta f' = -(c/2)(alpha f + eta f')
    p = -c * alpha / (4.0 * dim)
    q = -c * (alpha + 2.0) * p / (8.0 * (dim + 2.0))
    return [1.0 + p * eta ** 2 + q * eta ** 4, 2.0 * p * eta + 4.0 * q * eta ** 3]


class _Recorder:
    """Collects accepted steps; with a sample grid, re-steps to each sample."""

    def __init__(self, samples):
        self.samples = None if samples is None else np.asarray(samples, dtype=float)
        self.ts, self.fs, self.fps = [], [], []
        if self.samples is not None:
            if np.any(np.diff(self.samples) < 0):
                raise ValueError("samples must be increasing")
            self.sf = np.full(self.samples.shape, np.nan)
            self.sfp = np.full(self.samples.shape, np.nan)
        self.rhs = None

    def __call__(self, t0, y0, t1, y1):
        if self.samples is not None:
            lo = np.searchsorted(self.samples, t0, side="right")
            hi = np.searchsorted(self.samples, t1, side="right")
            for i in range(lo, hi):
                s = float(self.samples[i])
                if s == t1:
                    ys = y1
                else:
                    ys, _, _ = _step(self.rhs, t0, y0, s - t0, self.rhs(t0, y0))
                self.sf[i], self.sfp[i] = ys
        self.ts.append(t1)
        self.fs.append(y1[0])
        self.fps.append(y1[1])

    def finish(self, events, n_steps, eta0, seed_fn):
        if self.samples is None:
            y0 = seed_fn(eta0)
            etas = np.array([0.0, eta0] + self.ts)
            f = np.array([1.0, y0[0]] + self.fs)
            fp = np.array([0.0, y0[1]] + self.fps)
        else:
            etas = self.samples
            f, fp = self.sf, self.sfp
            for i in np.flatnonzero(etas <= eta0):
                f[i], fp[i] = seed_fn(float(etas[i]))
        return OracleTrajectory(etas, f, fp, tuple(events), n_steps)


def _drive(make_rhs, make_events, state, y0, eta0, eta_max, tol, atol, samples, seed_fn,
           transition):
    stepper = _Integrator(tol, atol)
    rec = _Recorder(samples)
    t, y, h = eta0, list(y0), 1e-3
    events = []
    while t < eta_max:
        rhs = make_rhs(state)
        rec.rhs = rhs
        t, y, h, kind = stepper.run(rhs, t, y, eta_max, h, make_events(state), rec)
        if kind is None:
            break
        events.append((t, kind))
        state = transition(state, kind, t, y)
        if len(events) > 10000:
            raise IntegrationError("too many branch switches", location=t)
    return rec.finish(events, stepper.n_steps, eta0, seed_fn)


def integrate_barenblatt(params: ProblemParams, eta_max: float, tol: float = 1e-10, *,
                         samples=None, eta0: float = 1e-4, atol: float | None = None) -> OracleTrajectory:
    """Integrate f'' + (N-1)/eta f' = -(c/2)(alpha f + eta f') with c switching on sign(F).

    c = 1 - gamma while F = alpha f + eta f' > 0 and 1 + gamma while F < 0.

    Args:
        params: problem triple.
        eta_max: end of the integration interval.
        tol: local relative error target of the embedded pair (>= 1e-12).
        samples: optional increasing etas at which to report (f, f'); by
            default the accepted step points are returned.
        eta0: start of the regular part; the seed is the Taylor expansion
            through eta^4 about the origin.
        atol: absolute floor of the error control (default tol * 1e-6).

    Raises:
        IntegrationError: on step-size underflow; ``location`` holds the eta.
    """
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    g, n, alpha = params.gamma, params.dim, params.alpha
    atol = tol * 1e-6 if atol is None else atol
    nm1 = n - 1.0

    def make_rhs(branch):
        hc = 0.5 * (1.0 - g if branch > 0 else 1.0 + g)

        def rhs(t, y):
            return [y[1], -nm1 / t * y[1] - hc * (alpha * y[0] + t * y[1])]
        return rhs

    def ev_f(t, y):
        return alpha * y[0] + t * y[1]

    def seed_fn(eta):
        return _seed(alpha, n, 1.0 - g, eta)

    return _drive(make_rhs, lambda s: [(ev_f, SWITCH_F, s)], 1, seed_fn(eta0), eta0, eta_max,
                  tol, atol, samples, seed_fn, lambda s, kind, t, y: -s)


def integrate_pucci(params: ProblemParams, lam: float, Lam: float, eta_max: float,
                    tol: float = 1e-10, *, samples=None, eta0: float = 1e-4,
                    atol: float | None = None) -> OracleTrajectory:
    """Integrate the radial Pucci profile equation

        sigma(f'') f'' + sigma(f') (N-1)/eta f' = -(alpha f + eta f')/2,

    with sigma = Lam on positive and lam on negative arguments.  ``params.gamma``
    is ignored.  Solving for f'' is explicit: with R the right-hand side
    minus the f' term, f'' = R/Lam if R > 0 and R/lam if R < 0, so exactly one
    branch hypothesis is self-consistent.  Events are the sign changes of R
    (that is of f'') and of f'.
    """
    if not (0.0 < lam <= Lam):
        raise ValueError("need 0 < lam <= Lam")
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    n, alpha = params.dim, params.alpha
    atol = tol * 1e-6 if atol is None else atol
    nm1 = n - 1.0

    def sig(s):
        return Lam if s > 0 else lam

    def r_of(s_fp):
        k = sig(s_fp) * nm1

        def r(t, y):
            return -0.5 * (alpha * y[0] + t * y[1]) - k / t * y[1]
        return r

    def make_rhs(state):
        s_fp, s_fpp = state
        r = r_of(s_fp)
        inv = 1.0 / sig(s_fpp)

        def rhs(t, y):
            return [y[1], r(t, y) * inv]
        return rhs

    def make_events(state):
        r = r_of(state[0])
        return [(lambda t, y: y[1], SWITCH_FP, state[0]), (r, SWITCH_FPP, state[1])]

    def transition(state, kind, t, y):
        s_fp, s_fpp = state
        if kind == SWITCH_FP:
            s_fp = -s_fp
        else:
            s_fpp = -s_fpp
        # the switched hypothesis must reproduce the sign it assumes
        r = r_of(s_fp)(t, y)
        if kind == SWITCH_FPP and r * s_fpp < -1e-6 * (abs(y[0]) + abs(y[1])):
            raise IntegrationError("inconsistent second-derivative branch", location=t)
        return (s_fp, s_fpp)

    def seed_fn(eta):
        return _seed(alpha, n, 1.0 / lam, eta)

    return _drive(make_rhs, make_events, (-1, -1), seed_fn(eta0), eta0, eta_max,
                  tol, atol, samples, seed_fn, transition)
