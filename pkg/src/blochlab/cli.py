"""Command-line front end.

Each run is described by a :class:`RunConfig`; the artifact (JSON, or CSV when
``--out`` ends in ``.csv``) records the configuration and the code version so
it can be regenerated exactly.  Exit codes: 0 success, 1 usage or runtime
error (including quadrature that did not converge), 2 failed verification.
"""

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import __version__, spectra
from .blochlib import conjugate_exponential, parse_function_spec
from .certify import Certificate, certify_sigma
from .core.hyperbolic import DISK, HALF_PLANE
from .core.interval import NATIVE_PRECISION
from .errors import ConvergenceError, DomainError, ParseError
from .martingale import build_martingale, variance_extremes
from .transforms import bergman_project, beurling_modified, mu_from_bloch

__all__ = ["RunConfig", "run_command", "emit_certificate", "load_certificate", "parse_function_spec", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

COMMANDS = ("certify", "variance", "spectrum", "martingale", "transform", "alpha")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Everything that determines a run; numeric lists stay as the text given."""

    command: str
    function: str = None
    method: str = None
    r: str = None
    h: str = None
    R: float = None
    n: int = None
    depth: int = None
    tau: str = None
    tol: float = None
    budget: int = None
    seed: int = 0
    grid: int = 1000
    precision: int = None
    threads: int = 1
    out: str = None


# -- formatting -------------------------------------------------------------------------


def fmt(x):
    """17 significant digits, enough to round-trip a double."""
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.complexfloating):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _write(text, path):
    if path is None:
        # artifacts are UTF-8 whatever the terminal locale
        buf = getattr(sys.stdout, "buffer", None)
        if buf is None:
            sys.stdout.write(text)
        else:
            sys.stdout.flush()
            buf.write(text.encode("utf-8"))
            buf.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(config, result, header=None, rows=None):
    if config.out is not None and config.out.lower().endswith(".csv"):
        if header is None:
            raise UsageError(f"{config.command} has no tabular output; use a .json path")
        _write(_csv_text(header, rows), config.out)
        return
    doc = {"code_version": __version__, "config": _jsonable(asdict(config)), "result": _jsonable(result)}
    _write(json.dumps(doc, indent=2) + "\n", config.out)


def emit_certificate(cert, path):
    """Write the versioned certificate JSON to ``path``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(cert.to_json())


def load_certificate(path):
    with open(path, encoding="utf-8") as fh:
        return Certificate.from_json(fh.read())


# -- argument helpers -------------------------------------------------------------------


def parse_rational(text):
    """``"p/q"`` or a decimal literal, read exactly."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def parse_list(text, name):
    if text is None:
        raise UsageError(f"--{name} is required")
    return [float(parse_rational(p)) for p in str(text).split(",") if p.strip()]


def _precision(config):
    if config.precision is not None:
        return int(config.precision)
    env = os.environ.get("BLOCHLAB_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"BLOCHLAB_PRECISION must be an integer, got {env!r}") from None
    return NATIVE_PRECISION


def _function(config, domain=None):
    if not config.function:
        raise UsageError("--function is required")
    b = parse_function_spec(config.function)
    if domain == HALF_PLANE and b.domain == DISK:
        b = conjugate_exponential(b)
    return b


# -- subcommands ------------------------------------------------------------------------


def _run_certify(config):
    r = parse_rational(config.r) if config.r is not None else Fraction(2, 5)
    cert = certify_sigma(r, precision=_precision(config), grid=config.grid, threads=config.threads)
    text = cert.to_json()
    _write(text, config.out)
    return EXIT_OK if cert.verified else EXIT_FAILED


def _run_variance(config):
    method = config.method or ("circle" if config.h is None else "strip")
    tol = config.tol
    if method == "circle":
        b = _function(config)
        if b.domain != DISK:
            raise UsageError("the circle method takes a disk function")
        est = spectra.variance_circle(b, parse_list(config.r, "r"), **({"tol": tol} if tol else {}))
    elif method == "strip":
        b = _function(config, HALF_PLANE)
        est = spectra.variance_strip(b, parse_list(config.h, "h"), **({"tol": tol} if tol else {}))
    else:
        raise UsageError(f"unknown variance method {method!r}")
    rows = list(zip(est.parameters, est.per_step))
    _emit(config, est.to_dict(), ("r" if method == "circle" else "h", "variance"), rows)
    return EXIT_OK


def _run_spectrum(config):
    b = _function(config)
    if config.tau is None:
        raise UsageError("--tau is required")
    try:
        tau = complex(config.tau.replace(" ", ""))
    except ValueError:
        raise UsageError(f"--tau must be a number, got {config.tau!r}") from None
    kw = {"tol": config.tol} if config.tol else {}
    prof = spectra.integral_means_profile(b, tau, parse_list(config.r, "r"), **kw)
    result = {"tau": tau, "value": prof.value, "parameters": prof.parameters, "per_step": prof.per_step, "converged": prof.converged}
    _emit(config, result, ("r", "beta"), list(zip(prof.parameters, prof.per_step)))
    return EXIT_OK


def _run_martingale(config):
    b = _function(config, HALF_PLANE)
    n = config.n or 2
    depth = config.depth or 3
    h0 = float(parse_rational(config.h)) if config.h is not None else 1e-6 * float(n) ** -depth
    tree = build_martingale(b, n, depth, h0)
    extremes = [variance_extremes(tree, lvl) for lvl in range(depth)]
    result = {
        "tree": json.loads(tree.to_json()),
        "extremes": [{"level": lvl, "m": m, "M": M} for lvl, (m, M) in enumerate(extremes)],
        "flagged": [list(f) for f in tree.flagged],
    }
    rows = [(lvl, j, v.real, v.imag, tree.errors[(lvl, j)]) for (lvl, j), v in sorted(tree.values.items())]
    _emit(config, result, ("level", "j", "re", "im", "tol"), rows)
    return EXIT_OK


def _run_transform(config):
    b = _function(config)
    tol = config.tol or 1e-6
    mu = mu_from_bloch(b)
    rows = []
    if b.domain == DISK:
        zs = np.array(parse_list(config.r if config.r is not None else "0,0.25,0.5,0.75", "r"), dtype=complex)
        P = np.atleast_1d(bergman_project(mu, zs, tol=tol))
        expect = b(zs) - b(0.0)
        for z, p, e in zip(zs, P, expect):
            rows.append((z.real, z.imag, p.real, p.imag, e.real, e.imag, abs(p - e)))
        kind = "bergman_projection"
    else:
        hs = parse_list(config.h if config.h is not None else "1", "h")
        for y in hs:
            z = complex(0.0, y)
            _, d = beurling_modified(mu, z, tol)
            e = complex(b.derivative(z))
            rows.append((z.real, z.imag, d.real, d.imag, e.real, e.imag, abs(d - e)))
        kind = "beurling_derivative"
    header = ("z_re", "z_im", "value_re", "value_im", "expected_re", "expected_im", "abs_error")
    result = {"kind": kind, "coefficient": mu.params, "rows": [dict(zip(header, r)) for r in rows]}
    _emit(config, result, header, rows)
    return EXIT_OK


def _run_alpha(config):
    if config.R is None:
        raise UsageError("--R is required")
    if not config.R > 0:
        raise UsageError(f"--R must be positive, got {config.R}")
    budget = config.budget if config.budget is not None else 32
    if budget < 1:
        raise UsageError(f"--budget must be at least 1, got {budget}")
    res = spectra.alpha_search(config.R, budget, seed=config.seed)
    result = {"value": res.value, "label": res.label, "evaluated": res.evaluated, "values": res.values}
    _emit(config, result, ("candidate", "alpha_average"), list(enumerate(res.values)))
    return EXIT_OK


_DISPATCH = {
    "certify": _run_certify,
    "variance": _run_variance,
    "spectrum": _run_spectrum,
    "martingale": _run_martingale,
    "transform": _run_transform,
    "alpha": _run_alpha,
}


def run_command(config):
    """Run one configured command; returns the exit code."""
    if config.command not in _DISPATCH:
        raise UsageError(f"unknown command {config.command!r}")
    if config.threads is not None and config.threads < 1:
        raise UsageError("--threads must be at least 1")
    return _DISPATCH[config.command](config)


# -- argv ----------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="blochlab", description="Spectral statistics of Bloch functions and the Sigma_B^2 certificate.")
    parser.add_argument("--version", action="version", version=f"blochlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "certify": "certify Sigma_B^2 < 0.9 with interval arithmetic",
        "variance": "asymptotic variance profile (circle or strip method)",
        "spectrum": "integral means spectrum profile",
        "martingale": "n-adic martingale of interval averages",
        "transform": "Bergman projection / Beurling transform of mu_b",
        "alpha": "randomised lower bound for alpha(R)",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--function", help="function spec, e.g. special:0.3, lacunary:2, poly:0,1, logmap, logz")
        p.add_argument("--method", help="variance method: circle or strip")
        p.add_argument("--r", help="radius or comma-separated radii; p/q accepted")
        p.add_argument("--h", help="height(s); p/q accepted")
        p.add_argument("--R", type=float, help="hyperbolic radius")
        p.add_argument("--n", type=int, help="grid base")
        p.add_argument("--depth", type=int, help="martingale depth")
        p.add_argument("--tau", help="complex exponent for the integral means")
        p.add_argument("--tol", type=float, help="quadrature tolerance")
        p.add_argument("--budget", type=int, help="number of alpha candidates")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--grid", type=int, default=1000, help="scan cells for certify")
        p.add_argument("--precision", type=int, help="interval precision in bits (default: $BLOCHLAB_PRECISION or 53)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", help="output path (.csv for tables, otherwise JSON); stdout when omitted")
    return parser


def main(argv=None):
    try:
        ns = build_parser().parse_args(argv)
        config = RunConfig(**vars(ns))
        return run_command(config)
    except (UsageError, ParseError, DomainError) as exc:
        print(f"blochlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"blochlab: did not converge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
