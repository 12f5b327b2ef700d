"""Self-checks run by ``anomal validate``.

Each suite returns a ``SuiteResult`` with the worst measured deviation and
the tolerance it was held to.  Pseudo-random parameter points come from a
fixed seed so repeated runs print identical numbers.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import special as sf
from .errors import AnomalError
from .exponents import find_exponent
from .oracle import integrate_barenblatt, integrate_pucci
from .profile import ProblemParams, build_profile, evaluate, segment_values, zero_crossings

SEED = 20240611
N_RANDOM = 1000


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""


def worker_count() -> int:
    """Workers allowed by ANOMAL_THREADS (0 or unset = one per CPU)."""
    raw = os.environ.get("ANOMAL_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, n)


def parallel_map(fn, items):
    """Ordered map over items using at most ``worker_count()`` threads."""
    items = list(items)
    n = min(worker_count(), len(items)) or 1
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _random_points(n, seed=SEED):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-4.0, 4.0, n)
    b = rng.uniform(-4.0, 4.0, n)
    # keep b off the poles of M
    b = np.where(np.abs(b - np.round(b)) < 1e-3, b + 0.01, b)
    z = rng.uniform(-30.0, 30.0, n)
    return a, b, z


def suite_units(tol=1e-10) -> SuiteResult:
    checks = [
        (sf.kummer_m(0.5, 1.5, -1.0), 0.5 * math.sqrt(math.pi) * math.erf(1.0)),
        (sf.tricomi_u(1.0, 1.0, 1.0), 0.5963473623231940),
        (sf.gamma(0.5), math.sqrt(math.pi)),
        (sf.kummer_m(1.0, 1.0, 1.0), math.e),
        (sf.tricomi_u(-1.0, 1.5, 2.0), 0.5),
        (sf.v_solution(1.0, 1.0, -1.0), math.exp(-1.0)),
    ]
    worst = max(abs(x - y) / abs(y) for x, y in checks)
    return SuiteResult("units", worst <= tol, worst, tol)


def suite_identities(n=N_RANDOM) -> SuiteResult:
    """Kummer transformation and the M and U contiguous recurrences."""
    a, b, z = _random_points(n)
    w_kt = w_mr = w_ur = 0.0
    for ai, bi, zi in zip(a, b, z):
        ci = bi - ai
        ai = bi - ci  # makes b - a exact
        m = sf.kummer_m(ai, bi, zi)
        kt = math.exp(zi) * sf.kummer_m(ci, bi, -zi)
        w_kt = max(w_kt, abs(m - kt) / max(1.0, abs(m)))
        dm = sf.kummer_m_deriv(ai, bi, zi)
        m1 = sf.kummer_m(ai + 1.0, bi, zi)
        terms = (zi * dm, ai * m, ai * m1)
        w_mr = max(w_mr, abs(terms[0] + terms[1] - terms[2]) / max(max(map(abs, terms)), 1e-300))
        x = abs(zi) + 0.05
        u = sf.tricomi_u(ai, bi, x)
        du = -ai * sf.tricomi_u(ai + 1.0, bi + 1.0, x)
        u1 = sf.tricomi_u(ai + 1.0, bi, x)
        terms = (ai * u, x * du, ai * (1.0 + ai - bi) * u1)
        scale = max(max(map(abs, terms)), 1e-300)
        w_ur = max(w_ur, abs(terms[0] + terms[1] - terms[2]) / scale)
    ok = bool(w_kt <= 1e-11 and w_mr <= 1e-10 and w_ur <= 1e-9)
    worst = max(w_kt / 1e-11, w_mr / 1e-10, w_ur / 1e-9)
    detail = f"kummer={w_kt:.3e} m_rec={w_mr:.3e} u_rec={w_ur:.3e}"
    return SuiteResult("identities", ok, worst, 1.0, detail)


def suite_wronskian(n=N_RANDOM, tol=1e-8) -> SuiteResult:
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(n):
        a = rng.uniform(-4.0, 4.0)
        b = rng.uniform(0.05, 4.0)
        z = -rng.uniform(0.05, 30.0)
        w_ref = sf.real_wronskian(a, b, z)
        if w_ref == 0.0:
            continue
        w = sf.basis_pair(a, b, z).wronskian
        worst = max(worst, abs(w - w_ref) / abs(w_ref))
    return SuiteResult("wronskian", worst <= tol, worst, tol, f"max relative deviation {worst:.3e}")


STANDARD_GRID = [(g, n) for g in (-0.5, 0.0, 0.5) for n in (1, 3)]


def structural_errors(prof):
    """Worst C^1 jump and a count of violated sign/zero rules."""
    p = prof.params
    bad = 0
    jump = 0.0
    for m, eta in enumerate(prof.breakpoints, start=1):
        left = prof.segments[m - 1]
        right = prof.segments[m]
        fl, fpl = segment_values(left, p, eta)
        fr, fpr = segment_values(right, p, eta)
        scale = max(abs(fl), abs(fpl), 1e-300)
        jump = max(jump, abs(fl - fr) / scale, abs(fpl - fpr) / scale)
        if (fl > 0) != (m % 2 == 1):
            bad += 1
    zeros = zero_crossings(prof)
    edges = (0.0,) + prof.breakpoints + (math.inf,)
    for i in range(len(prof.segments)):
        inside = sum(1 for r in zeros if edges[i] < r < edges[i + 1])
        expected = 1 if 0 < i < len(prof.segments) - 1 else 0
        if inside != expected:
            bad += 1
    for i, seg in enumerate(prof.segments):
        hi = seg.hi if math.isfinite(seg.hi) else prof.eta_max
        mid = 0.5 * (edges[i] + hi)
        f, fp = evaluate(prof, mid)
        if (p.alpha * f + mid * fp > 0) != (seg.index_m % 2 == 1):
            bad += 1
    return jump, bad


def suite_profile(tol=1e-9) -> SuiteResult:
    """C^1 continuity, sign pattern and zero placement on the standard grid."""
    alphas = (0.5, 1.5, 2.5, 4.0, 5.5)
    cases = [(g, n, al) for g, n in STANDARD_GRID for al in alphas]

    def one(c):
        return structural_errors(build_profile(ProblemParams(*c)))

    res = parallel_map(one, cases)
    worst = max(r[0] for r in res)
    bad = sum(r[1] for r in res)
    return SuiteResult("profile", worst <= tol and bad == 0, worst, tol,
                       f"{len(cases)} profiles, {bad} sign/zero violations")


def _oracle_dev(case, tol):
    g, n, al = case
    p = ProblemParams(g, n, al)
    etas = np.linspace(0.0, 8.0, 161)
    prof = build_profile(p)
    f, _ = evaluate(prof, etas)
    tr = integrate_barenblatt(p, 8.0, tol, samples=etas)
    return float(np.max(np.abs(f - tr.f_values) / np.maximum(np.abs(tr.f_values), 1e-3)))


def suite_oracle(tol=1e-12, bound=1e-6) -> SuiteResult:
    """Closed form against the ODE oracle at 0.7 and 1.3 times alpha_0."""
    cases = []
    for g, n in STANDARD_GRID:
        a0 = find_exponent(0, g, n)[0]
        cases += [(g, n, 0.7 * a0), (g, n, 1.3 * a0)]
    devs = parallel_map(lambda c: _oracle_dev(c, tol), cases)
    worst = max(devs)
    return SuiteResult("oracle", worst <= bound, worst, bound, f"{len(cases)} triples, oracle tol {tol:g}")


def suite_exponents(tol=1e-8) -> SuiteResult:
    """gamma = 0: alpha_k = N + 2k and every certificate passes."""
    worst = 0.0
    failed = 0
    for n in (1, 2, 3):
        prev = None
        for k in range(4):
            alpha, cert = find_exponent(k, 0.0, n, prev)
            worst = max(worst, abs(alpha - (n + 2 * k)))
            failed += 0 if cert.passed else 1
            prev = alpha
    return SuiteResult("exponents", worst <= tol and failed == 0, worst, tol,
                       f"{failed} failed certificates")


def suite_pucci(tol=1e-8, oracle_tol=1e-10) -> SuiteResult:
    """lam = Lam = 1 reproduces the gamma = 0 Barenblatt oracle."""
    etas = np.linspace(0.0, 6.0, 121)
    worst = 0.0
    for n, al in ((1, 1.0), (3, 3.0), (2, 2.7)):
        p = ProblemParams(0.0, n, al)
        a = integrate_pucci(p, 1.0, 1.0, 6.0, oracle_tol, samples=etas).f_values
        b = integrate_barenblatt(p, 6.0, oracle_tol, samples=etas).f_values
        worst = max(worst, float(np.max(np.abs(a - b))))
    return SuiteResult("pucci", worst <= tol, worst, tol)


SUITES = {
    "units": lambda tol: suite_units(),
    "identities": lambda tol: suite_identities(),
    "wronskian": lambda tol: suite_wronskian(),
    "profile": lambda tol: suite_profile(),
    "oracle": lambda tol: suite_oracle(tol=tol),
    "exponents": lambda tol: suite_exponents(),
    "pucci": lambda tol: suite_pucci(oracle_tol=tol),
}


def run_suites(names=None, tol=1e-12) -> list[SuiteResult]:
    """Run the named suites (all by default) in a fixed order."""
    names = list(SUITES) if not names else list(names)
    out = []
    for name in names:
        try:
            out.append(SUITES[name](tol))
        except AnomalError as exc:
            out.append(SuiteResult(name, False, math.inf, math.nan, f"error: {exc}"))
    return out
