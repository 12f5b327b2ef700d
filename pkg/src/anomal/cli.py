"""Command-line front end: ``anomal {profile,exponents,classify,validate,sweep}``.

Output is CSV (UTF-8, LF, ``#`` metadata lines, 12 significant digits) or
JSON (round-trip floats, see ``SCHEMAS``).  Exit codes: 0 success,
1 validation failure, 2 usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import re
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import (AnomalError, BracketError, ConvergenceError, NumericalFailure,
                     ScanExhaustedError)
from .exponents import classify, exponent_table
from .oracle import integrate_barenblatt
from .profile import (ProblemParams, build_profile, classify_asymptotics, evaluate,
                      first_root, tail_coefficients, zero_crossings)
from .validation import SUITES, parallel_map, run_suites

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
TOL_MIN, TOL_MAX = 1e-12, 1e-4
# validate accepts tighter requests; the oracle is then held at TOL_MIN
VALIDATE_TOL_MIN = 1e-15

COLUMNS = {
    "profile": ["eta", "f_closed", "f_prime_closed", "f_oracle", "segment_index"],
    "exponents": ["k", "alpha_k", "gauss_rate", "n_roots", "eta_roots", "certificate_pass"],
    "classify": ["gamma", "dim", "alpha", "tail_kind", "tail_coeff", "tail_rate", "zeros",
                 "zeros_predicted", "zeros_printed_convention", "bracket_k", "bracket_lo",
                 "bracket_hi"],
    "validate": ["suite", "passed", "worst", "tolerance", "detail"],
    "sweep": ["gamma", "dim", "alpha", "quantity", "value"],
}

_NUM = {"type": ["number", "null"]}
_INT = {"type": "integer"}
_ROW_TYPES = {
    "profile": {"eta": _NUM, "f_closed": _NUM, "f_prime_closed": _NUM, "f_oracle": _NUM,
                "segment_index": _INT},
    "exponents": {"k": _INT, "alpha_k": _NUM, "gauss_rate": _NUM, "n_roots": _INT,
                  "eta_roots": {"type": "array", "items": {"type": "number"}},
                  "certificate_pass": {"type": "boolean"}},
    "classify": {"gamma": _NUM, "dim": _INT, "alpha": _NUM,
                 "tail_kind": {"enum": ["PowerLaw", "Gaussian"]}, "tail_coeff": _NUM,
                 "tail_rate": _NUM, "zeros": _INT, "zeros_predicted": _INT,
                 "zeros_printed_convention": _INT, "bracket_k": _INT, "bracket_lo": _NUM,
                 "bracket_hi": _NUM},
    "validate": {"suite": {"type": "string"}, "passed": {"type": "boolean"}, "worst": _NUM,
                 "tolerance": _NUM, "detail": {"type": "string"}},
    "sweep": {"gamma": _NUM, "dim": _INT, "alpha": _NUM, "quantity": {"type": "string"},
              "value": _NUM},
}


def _schema(command):
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["schema", "meta", "columns", "rows"],
        "properties": {
            "schema": {"const": f"anomal.{command}/1"},
            "meta": {"type": "object"},
            "columns": {"const": COLUMNS[command]},
            "rows": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": COLUMNS[command],
                    "additionalProperties": False,
                    "properties": _ROW_TYPES[command],
                },
            },
        },
    }


SCHEMAS = {c: _schema(c) for c in COLUMNS}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated command-line settings."""

    command: str
    gamma: float = 0.0
    dim: int = 1
    alpha: float | None = None
    k_max: int | None = None
    eta_max: float = 8.0
    samples: int = 81
    tol: float = 1e-10
    output_format: str = "csv"
    output_path: str | None = None
    suites: tuple = ()

    def __post_init__(self):
        if not (-1.0 < self.gamma < 1.0):
            raise UsageError(f"--gamma must lie in (-1, 1), got {self.gamma}")
        if self.dim < 1:
            raise UsageError(f"--dim must be >= 1, got {self.dim}")
        if self.samples < 2:
            raise UsageError(f"--samples must be >= 2, got {self.samples}")
        lo = VALIDATE_TOL_MIN if self.command == "validate" else TOL_MIN
        if not (lo <= self.tol <= TOL_MAX):
            raise UsageError(f"--tol must lie in [{lo:g}, {TOL_MAX:g}], got {self.tol:g}")
        if not self.eta_max > 0:
            raise UsageError("--eta-max must be positive")
        if self.alpha is not None and not self.alpha > 0:
            raise UsageError("--alpha must be positive")
        if self.k_max is not None and self.k_max < 0:
            raise UsageError("--k-max must be >= 0")

    @property
    def oracle_tol(self) -> float:
        return max(self.tol, TOL_MIN)


def _fmt_csv(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return ";".join(_fmt_csv(x) for x in v)
    s = str(v)
    if any(ch in s for ch in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def _json_safe(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    return v


def render(command, meta, rows, fmt) -> str:
    """Serialize rows (dicts keyed by ``COLUMNS[command]``) as CSV or JSON text."""
    cols = COLUMNS[command]
    if fmt == "json":
        doc = {
            "schema": f"anomal.{command}/1",
            "meta": _json_safe(meta),
            "columns": cols,
            "rows": [{c: _json_safe(r[c]) for c in cols} for r in rows],
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    for key, val in meta.items():
        buf.write(f"# {key}={_fmt_csv(val)}\n")
    buf.write(",".join(cols) + "\n")
    for r in rows:
        buf.write(",".join(_fmt_csv(r[c]) for c in cols) + "\n")
    return buf.getvalue()


def _emit(cfg, text):
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _meta(cfg, **extra):
    out = {"command": cfg.command, "version": __version__}
    out.update(extra)
    return out


def cmd_profile(cfg: RunConfig) -> int:
    if cfg.alpha is None:
        raise UsageError("profile needs --alpha")
    p = ProblemParams(cfg.gamma, cfg.dim, cfg.alpha)
    prof = build_profile(p)
    etas = np.linspace(0.0, cfg.eta_max, cfg.samples)
    f, fp = evaluate(prof, etas)
    tr = integrate_barenblatt(p, cfg.eta_max, cfg.oracle_tol, samples=etas)
    dev = float(np.max(np.abs(f - tr.f_values) / np.maximum(np.abs(tr.f_values), 1e-3)))
    tail = classify_asymptotics(prof)
    rows = [{"eta": float(e), "f_closed": float(a), "f_prime_closed": float(b),
             "f_oracle": float(c), "segment_index": prof.segment_for(float(e)).index_m}
            for e, a, b, c in zip(etas, f, fp, tr.f_values)]
    meta = _meta(cfg, gamma=p.gamma, dim=p.dim, alpha=p.alpha, breakpoints=list(prof.breakpoints),
                 tail_kind=tail.kind.value, tail_coeff=tail.coeff, tail_rate=tail.rate,
                 oracle_tol=cfg.oracle_tol, max_rel_dev=dev)
    _emit(cfg, render("profile", meta, rows, cfg.output_format))
    return EXIT_OK


def cmd_exponents(cfg: RunConfig) -> int:
    k_max = 3 if cfg.k_max is None else cfg.k_max
    table = exponent_table(cfg.gamma, cfg.dim, k_max)
    rows = [{"k": e.k, "alpha_k": e.alpha, "gauss_rate": e.gauss_rate,
             "n_roots": len(e.eta_roots), "eta_roots": list(e.eta_roots),
             "certificate_pass": e.certificate.passed} for e in table.entries]
    meta = _meta(cfg, gamma=cfg.gamma, dim=cfg.dim, k_max=k_max)
    _emit(cfg, render("exponents", meta, rows, cfg.output_format))
    return EXIT_OK


def _covering_table(gamma, dim, alpha, k_max):
    if k_max is not None:
        return exponent_table(gamma, dim, k_max)
    k = 1
    while True:
        table = exponent_table(gamma, dim, k)
        if table.alphas[-1] >= alpha or k >= 32:
            return table
        k *= 2


def cmd_classify(cfg: RunConfig) -> int:
    if cfg.alpha is None:
        raise UsageError("classify needs --alpha")
    p = ProblemParams(cfg.gamma, cfg.dim, cfg.alpha)
    table = _covering_table(cfg.gamma, cfg.dim, cfg.alpha, cfg.k_max)
    try:
        rep = classify(p, table)
    except BracketError as exc:
        raise UsageError(f"{exc}; raise --k-max") from exc
    meta = _meta(cfg, exponents=table.alphas)
    _emit(cfg, render("classify", meta, [rep.as_dict()], cfg.output_format))
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    results = run_suites(cfg.suites or None, tol=cfg.oracle_tol)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status} {r.name}: worst={r.worst:.3e} tol={r.tolerance:.1e}"
        if r.detail:
            line += f" ({r.detail})"
        print(line)
    if cfg.tol < TOL_MIN:
        print(f"note: oracle tolerance held at {TOL_MIN:g} (requested {cfg.tol:g})")
    if cfg.output_path:
        rows = [{"suite": r.name, "passed": r.passed, "worst": r.worst,
                 "tolerance": r.tolerance, "detail": r.detail} for r in results]
        meta = _meta(cfg, tol=cfg.tol, oracle_tol=cfg.oracle_tol)
        _emit(cfg, render("validate", meta, rows, cfg.output_format))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def _sweep_point(pt):
    g, n, al = pt
    p = ProblemParams(g, n, al)
    prof = build_profile(p)
    c_pow, d_gauss = tail_coefficients(prof)
    tail = classify_asymptotics(prof)
    eta1 = first_root(p)
    return [
        ("n_breakpoints", float(prof.n_breakpoints)),
        ("zeros", float(len(zero_crossings(prof)))),
        ("tail_coeff", c_pow),
        ("gauss_coeff", d_gauss),
        ("is_gaussian", 1.0 if tail.kind.value == "Gaussian" else 0.0),
        ("eta_1", eta1),
    ]


def cmd_sweep(cfg: RunConfig, gammas, dims, alphas) -> int:
    for g in gammas:
        if not -1.0 < g < 1.0:
            raise UsageError(f"--gamma values must lie in (-1, 1), got {g}")
    if any(n < 1 for n in dims) or any(not a > 0 for a in alphas):
        raise UsageError("--dim values must be >= 1 and --alpha values positive")
    points = [(g, n, a) for g in gammas for n in dims for a in alphas]
    results = parallel_map(_sweep_point, points)
    rows = [{"gamma": g, "dim": n, "alpha": a, "quantity": q, "value": v}
            for (g, n, a), res in zip(points, results) for q, v in res]
    meta = _meta(cfg, gammas=list(gammas), dims=list(dims), n_alpha=len(alphas))
    _emit(cfg, render("sweep", meta, rows, cfg.output_format))
    return EXIT_OK


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _alpha_spec(text):
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    if ":" in text:
        try:
            a, b, n = text.split(":")
            vals = np.linspace(float(a), float(b), int(n))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad alpha range {text!r}") from exc
        return [float(v) for v in vals]
    return _float_list(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv", dest="output_format")
    common.add_argument("--output", default=None, help="write here instead of stdout")
    common.add_argument("--tol", type=float, default=1e-10, help="oracle local error target")

    point = argparse.ArgumentParser(add_help=False)
    point.add_argument("--gamma", type=float, default=0.0)
    point.add_argument("--dim", type=int, default=1)

    parser = _Parser(prog="anomal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("profile", parents=[common, point], help="closed-form profile vs oracle")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eta-max", type=float, default=8.0)
    p.add_argument("--samples", type=int, default=81)

    p = sub.add_parser("exponents", parents=[common, point], help="anomalous exponent table")
    p.add_argument("--k-max", type=int, default=3)

    p = sub.add_parser("classify", parents=[common, point], help="tail and zero structure")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k-max", type=int, default=None)

    p = sub.add_parser("validate", parents=[common], help="run the self-check suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES), default=None,
                   help="suite to run (repeatable); all when omitted")
    p.set_defaults(tol=1e-12)

    p = sub.add_parser("sweep", parents=[common], help="tidy rows over a parameter grid")
    p.add_argument("--gamma", type=_float_list, default=[0.0], help="comma-separated list")
    p.add_argument("--dim", type=_int_list, default=[1], help="comma-separated list")
    p.add_argument("--alpha", type=_alpha_spec, default=_alpha_spec("0.5:6:12"),
                   help="start:stop:num or comma-separated list")
    return parser


def _config(ns) -> RunConfig:
    kw = dict(command=ns.command, tol=ns.tol, output_format=ns.output_format,
              output_path=ns.output)
    if ns.command in ("profile", "exponents", "classify"):
        kw.update(gamma=ns.gamma, dim=ns.dim)
    if ns.command in ("profile", "classify"):
        kw["alpha"] = ns.alpha
    if ns.command == "profile":
        kw.update(eta_max=ns.eta_max, samples=ns.samples)
    if ns.command in ("exponents", "classify"):
        kw["k_max"] = ns.k_max
    if ns.command == "validate":
        kw["suites"] = tuple(ns.suite or ())
    return RunConfig(**kw)


_NUMBER_LIST = re.compile(r"^-[\d.][\d.eE+\-]*([,:][-\d.eE+]*)*$")


def _join_negative_values(argv):
    """Attach values such as ``-0.5,0.5`` to their flag so argparse reads them as values."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok.startswith("--") and "=" not in tok:
            nxt = next(it, None)
            if nxt is not None and _NUMBER_LIST.match(nxt):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = parser.parse_args(_join_negative_values(argv))
    try:
        cfg = _config(ns)
        if ns.command == "profile":
            return cmd_profile(cfg)
        if ns.command == "exponents":
            return cmd_exponents(cfg)
        if ns.command == "classify":
            return cmd_classify(cfg)
        if ns.command == "validate":
            return cmd_validate(cfg)
        return cmd_sweep(cfg, ns.gamma, ns.dim, ns.alpha)
    except UsageError as exc:
        print(f"anomal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # invalid problem parameters surface as ValueError from ProblemParams
        if isinstance(exc, AnomalError):
            print(f"anomal: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"anomal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScanExhaustedError as exc:
        print(f"anomal: numerical failure at k={exc.k}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (NumericalFailure, ConvergenceError, AnomalError, ArithmeticError) as exc:
        print(f"anomal: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
