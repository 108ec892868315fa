"""``verify``: run identity suites and report residuals.

Configuration is layered: built-in defaults, then a JSON file (``--config``
or the ``RUIJSENAARS_CONFIG`` environment variable), then command-line
flags.  Exit status: 0 all checks pass, 1 a residual check failed,
2 an independence verdict was inconclusive, 3 configuration or regime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields
from itertools import combinations_with_replacement

import numpy as np

from . import __version__
from .errors import (
    BalancingError,
    GenericityError,
    ParameterDomainError,
    SamplingError,
    UnsupportedRegimeError,
)
from .identities import (
    bold_kernel_identity_residual,
    bold_wronski_residual,
    determinant_residual,
    kernel_identity_residual,
    run_scalar_suite,
    wronski_residual,
)
from .independence import independence_at_degree, kappa_eq_delta_suite
from .operators import FAMILIES, build
from .physics import check_poincare, delta_gauge_residual, gauge_identification
from .shiftalg import ResidualReport, SamplerConfig, commutes_at
from .specialfn import BracketContext, ModelParams

__all__ = ["SuiteConfig", "load_config", "run_suite", "emit_report", "main", "SUITES", "CONFIG_ENV"]

CONFIG_ENV = "RUIJSENAARS_CONFIG"
SUITES = ("commutativity", "wronski", "kernel", "sources", "independence", "poincare")
SCALAR_IDENTITIES = ("rsi", "nssi", "ksni", "frobenius", "csp", "tt", "lss", "ktp")
EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3

_DEFAULT_P = 0.3 * np.exp(0.7j)
_DEFAULT_DELTA = np.sqrt(2) / 10 + 1j * np.sqrt(3) / 20
_DEFAULT_KAPPA = np.sqrt(5) / 10 - 1j * np.sqrt(7) / 40


class ConfigError(ValueError):
    pass


def _complex(v):
    """Accept a number, a string like '0.1+0.2j', or an [re, im] pair."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex pair must have two entries, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"cannot parse complex number {v!r}") from exc
    return complex(v)


@dataclass
class SuiteConfig:
    suite: str = "all"
    identity: str | None = None
    variant: str = "elliptic"
    p: complex | None = None
    tau: complex | None = None
    omega: float = 1.0
    delta: complex = _DEFAULT_DELTA
    kappa: complex = _DEFAULT_KAPPA
    m: int = 1
    r: int = 1
    n: int | None = None
    s: int | None = None
    k: int = 1
    kmax: int = 2
    nmax: int = 3
    samples: int = 20
    tol: float = 1e-8
    seed: int = 0
    pole_floor: float = 1e-6
    genericity_floor: float = 1e-10
    exceptional: bool = False

    def validate(self):
        if self.suite != "all" and self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.identity is not None and self.identity not in SCALAR_IDENTITIES:
            raise ConfigError(f"unknown identity {self.identity!r}; choose from {SCALAR_IDENTITIES}")
        for name in ("m", "r", "k", "kmax", "nmax", "seed"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        for name in ("n", "s"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"{name} must be nonnegative")
        if self.samples < 1:
            raise ConfigError("samples must be positive")
        if not 0 < self.tol < 1:
            raise ConfigError("tol must lie in (0, 1)")
        if self.p is not None and self.tau is not None:
            raise ConfigError("give either p or tau, not both")
        return self

    @property
    def nome(self):
        if self.tau is not None:
            return complex(np.exp(2j * np.pi * self.tau))
        return complex(_DEFAULT_P if self.p is None else self.p)

    def params(self):
        ctx = BracketContext.from_name(self.variant, p=self.nome, omega=self.omega)
        return ModelParams(
            self.delta, self.kappa, ctx,
            genericity_floor=self.genericity_floor, pole_floor=self.pole_floor,
        )

    def sampler(self):
        return SamplerConfig(samples=self.samples, tol=self.tol, seed=self.seed)

    def echo(self):
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = [v.real, v.imag] if isinstance(v, complex) else v
        nome = self.nome
        out["p"] = [nome.real, nome.imag]
        out["variant"] = BracketContext.from_name(self.variant, p=self.nome, omega=self.omega).variant
        return out


_COMPLEX_FIELDS = {"p", "tau", "delta", "kappa"}
_INT_FIELDS = {"m", "r", "n", "s", "k", "kmax", "nmax", "samples", "seed"}
_FLOAT_FIELDS = {"omega", "tol", "pole_floor", "genericity_floor"}


def _coerce(name, value):
    if value is None:
        return None
    if name in _COMPLEX_FIELDS:
        return _complex(value)
    if name in _INT_FIELDS:
        if isinstance(value, bool) or int(value) != value:
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        return int(value)
    if name in _FLOAT_FIELDS:
        return float(value)
    if name == "exceptional" and not isinstance(value, bool):
        raise ConfigError("exceptional must be true or false")
    return value


def load_config(path=None, overrides=None):
    """Defaults, then the JSON file at ``path`` (or ``$RUIJSENAARS_CONFIG``), then ``overrides``."""
    values = {}
    path = path or os.environ.get(CONFIG_ENV)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        values.update(data)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = {f.name for f in fields(SuiteConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = SuiteConfig(**{k: _coerce(k, v) for k, v in values.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


# -- suites ------------------------------------------------------------------

def _commutativity(cfg, params, sc):
    m, r, K = cfg.m, cfg.r, max(cfg.kmax, 1)
    ops = {(f, k): build(f, m, r, k, params) for f in FAMILIES for k in range(1, K + 1)}
    out = []
    for f1, f2 in combinations_with_replacement(FAMILIES, 2):
        res = []
        for k1 in range(1, K + 1):
            for k2 in range(1, K + 1):
                if f1 == f2 and k2 <= k1:
                    continue
                a, b = ops[(f1, k1)], ops[(f2, k2)]
                res.extend(commutes_at(a, b, sc).residuals)
        if res:
            out.append(ResidualReport(
                f"commutativity[{f1},{f2}]", res, sc.tol, sc.seed, params={"m": m, "r": r, "kmax": K},
            ))
    return out


def _bold_supported(params):
    ctx = params.context
    return ctx.variant == "elliptic" or (ctx.variant == "trigonometric" and ctx.omega == 1)


def _wronski(cfg, params, sc):
    m, r, K = cfg.m, cfg.r, max(cfg.kmax, 1)
    out = [wronski_residual(m, r, k, params, sc) for k in range(1, K + 1)]
    for route in ("determinant", "recursion"):
        for fam in ("H", "D"):
            out += [determinant_residual(m, r, l, params, sc, route=route, family=fam) for l in range(1, K + 1)]
    if _bold_supported(params):
        out += [bold_wronski_residual(m, r, k, params, sc) for k in range(1, K + 1)]
    return out


def _kernel(cfg, params, sc):
    m, r = cfg.m, cfg.r
    n = m if cfg.n is None else cfg.n
    s = r if cfg.s is None else cfg.s
    out = [kernel_identity_residual(m, r, n, s, k, params, sc, exceptional=cfg.exceptional) for k in range(1, max(cfg.kmax, 1) + 1)]
    if _bold_supported(params):
        out += [bold_kernel_identity_residual(m, r, n, s, k, params, sc, exceptional=cfg.exceptional) for k in range(1, max(cfg.kmax, 1) + 1)]
    return out


def _source_sizes(cfg):
    """Sizes for each scalar identity, nudged away from trivially symmetric cases."""
    n = max(cfg.n if cfg.n is not None else cfg.m + cfg.r, 3)
    m, r = max(cfg.m, 2), cfg.r
    k = min(max(cfg.k, 1), n)
    kr = k if 2 * k != n else k - 1
    lam = tuple(range(1, m + 1))
    kc = k if 2 * k != sum(lam) + r else k + 1
    return {
        "rsi": {"n": n, "k": kr},
        "nssi": {"n": n},
        "ksni": {"n": n, "k": k},
        "frobenius": {"n": n},
        "csp": {"lam": lam, "r": r, "k": kc},
        "tt": {"m": m, "r": r, "k": k},
        "lss": {"m": m, "k": k},
        "ktp": {"m": m, "r": r, "n": max(cfg.n if cfg.n is not None else 1, 1),
                "s": cfg.s if cfg.s is not None else 1, "k": k},
    }


def _sources(cfg, params, sc):
    sizes = _source_sizes(cfg)
    return [run_scalar_suite(name, params, sc, **sizes[name]) for name in SCALAR_IDENTITIES]


def _independence(cfg, params, sc):
    m, r = cfg.m, cfg.r
    out = []
    for N in range(1, max(cfg.nmax, 1) + 1):
        cert = independence_at_degree(m, r, N, params, sc)
        s = cert.singular_values
        out.append(ResidualReport(
            f"independence(m={m},r={r},N={N})",
            [s[-1] / s[0] if s else 0.0], sc.tol, sc.seed, verdict=cert.verdict,
            params={"m": m, "r": r, "N": N, "rank": cert.rank, "rows": cert.rows, "gap": cert.gap},
            notes="residual is the smallest normalized singular value",
        ))
    out.append(kappa_eq_delta_suite(m, r, max(cfg.kmax, 1), params.replace(kappa=params.delta), sc))
    return out


def _poincare(cfg, params, sc):
    m, r = cfg.m, cfg.r
    out = [check_poincare(m, r, params, sc)]
    for sign in (1, -1):
        out.append(gauge_identification(m, r, params, sign, sc))
        out.append(delta_gauge_residual(m, r, params, sign, sc))
    return out


_RUNNERS = {
    "commutativity": _commutativity,
    "wronski": _wronski,
    "kernel": _kernel,
    "sources": _sources,
    "independence": _independence,
    "poincare": _poincare,
}


def _record(rep):
    rec = {
        "name": rep.name,
        "params": rep.params,
        "samples": rep.samples,
        "max_residual": rep.max_residual,
        "median_residual": rep.median_residual,
        "verdict": rep.verdict,
    }
    if rep.notes:
        rec["notes"] = rep.notes
    return rec


def run_suite(config):
    """Run the configured checks; return ``(exit_status, report_dict)``."""
    params = config.params()
    sc = config.sampler()
    if config.identity is not None:
        sizes = {"n": max(config.n if config.n is not None else 3, 1), "k": config.k}
        if config.identity in ("nssi", "frobenius"):
            sizes.pop("k")
        elif config.identity not in ("rsi", "ksni"):
            sizes = _source_sizes(config)[config.identity]
        reports = [run_scalar_suite(config.identity, params, sc, **sizes)]
    else:
        names = SUITES if config.suite == "all" else (config.suite,)
        reports = [rep for name in names for rep in _RUNNERS[name](config, params, sc)]
    checks = sorted((_record(r) for r in reports), key=lambda c: c["name"])
    verdicts = {c["verdict"] for c in checks}
    if "fail" in verdicts:
        status = EXIT_FAIL
    elif "inconclusive" in verdicts:
        status = EXIT_INCONCLUSIVE
    else:
        status = EXIT_PASS
    doc = {
        "version": __version__,
        "variant": params.context.variant,
        "seed": config.seed,
        "config": config.echo(),
        "status": {EXIT_PASS: "pass", EXIT_FAIL: "fail", EXIT_INCONCLUSIVE: "inconclusive"}[status],
        "checks": checks,
    }
    return status, doc


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (tuple, np.ndarray)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_report(doc, fmt="json"):
    """Render a report as newline-terminated JSON or a plain-text table."""
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2, default=_jsonable, ensure_ascii=False) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    checks = doc.get("checks", [])
    width = max([len(c["name"]) for c in checks] + [5])
    lines = [f"{'check':<{width}}  {'verdict':<12}  {'max':>10}  {'median':>10}  samples"]
    for c in checks:
        lines.append(
            f"{c['name']:<{width}}  {c['verdict']:<12}  {c['max_residual']:>10.3e}  "
            f"{c['median_residual']:>10.3e}  {c['samples']}"
        )
    lines.append(f"status: {doc.get('status', 'pass')} ({len(checks)} checks, seed {doc.get('seed')})")
    return "\n".join(lines) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share the configuration exit status, not argparse's default 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _parser():
    ap = _Parser(prog="verify", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    ap.add_argument("--suite", choices=("all",) + SUITES)
    ap.add_argument("--identity", choices=SCALAR_IDENTITIES, help="run a single scalar identity")
    ap.add_argument("--variant", choices=("elliptic", "trig", "trigonometric", "hyperbolic", "rational"))
    for name in ("m", "r", "n", "s", "k", "kmax", "nmax", "samples", "seed"):
        ap.add_argument(f"--{name}", type=int)
    for name in ("p", "tau", "delta", "kappa"):
        ap.add_argument(f"--{name}", help="complex number, e.g. 0.1+0.05j")
    for name in ("omega", "tol"):
        ap.add_argument(f"--{name}", type=float)
    ap.add_argument("--pole-floor", dest="pole_floor", type=float)
    ap.add_argument("--genericity-floor", dest="genericity_floor", type=float)
    ap.add_argument(
        "--exceptional", action="store_true", default=None,
        help="allow kernel checks with m != n (kappa/delta rational)",
    )
    ap.add_argument("--json", dest="json_path", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    ap.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")
    return ap


_REGIME_ERRORS = (
    BalancingError, GenericityError, ParameterDomainError, UnsupportedRegimeError, SamplingError,
)


def main(argv=None):
    args = _parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "json_path", "format")}
    try:
        config = load_config(args.config, overrides)
        status, doc = run_suite(config)
    except (ConfigError, *_REGIME_ERRORS) as exc:
        print(f"verify: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.json_path == "-":
        sys.stdout.write(emit_report(doc, "json"))
    else:
        if args.json_path:
            with open(args.json_path, "w", encoding="utf-8") as fh:
                fh.write(emit_report(doc, "json"))
        sys.stdout.write(emit_report(doc, args.format))
    return status


if __name__ == "__main__":
    raise SystemExit(main())
