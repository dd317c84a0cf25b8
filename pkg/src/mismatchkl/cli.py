"""Command-line front end: verify the identities on a configured instance,
sweep the scaling parameter, or run the built-in acceptance battery.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 runtime
domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    BinomialChannel,
    DiscretePrior,
    DomainError,
    NegBinomialChannel,
    kl_divergence,
    output_pmf,
)
from .identities import (
    ToleranceSpec,
    theorem_rhs_binomial,
    theorem_rhs_negbinomial,
    verify_lemma,
    verify_theorem,
)
from .oracle import DiffConfig, central_diff, divergence_at, divergence_curve
from .selftest import DEFAULT_SEED, run_battery

SEED_ENV_VAR = "MISMATCHKL_SEED"

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str = "binomial"
    n: int | None = None  # binomial trial count
    r: int | None = None  # negative binomial failure count
    param: float | None = None  # single a or b value (verify)
    grid: list[float] = field(default_factory=list)  # a or b grid (sweep)
    p_support: list[float] = field(default_factory=list)
    p_weights: list[float] = field(default_factory=list)
    q_support: list[float] = field(default_factory=list)
    q_weights: list[float] = field(default_factory=list)
    abs_tol: float = 1e-9
    rel_tol: float = 1e-5
    fd_step_scale: float = 1e-4
    richardson_levels: int = 3
    epsilon: float = 1e-12
    format: str = "csv"
    seed: int = DEFAULT_SEED

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        cfg = cls()
        known = set(cfg.__dataclass_fields__)
        flat = dict(d)
        for side in ("p_prior", "q_prior"):
            block = flat.pop(side, None)
            if block is not None:
                if not isinstance(block, dict) or set(block) - {"support", "weights"}:
                    raise ConfigError(f"{side}: expected {{support, weights}} block")
                flat[side[0] + "_support"] = block.get("support", [])
                flat[side[0] + "_weights"] = block.get("weights", [])
        tol = flat.pop("tolerance", None)
        if tol is not None:
            if not isinstance(tol, dict):
                raise ConfigError("tolerance: expected a block")
            flat.update(tol)
        for key, value in flat.items():
            if key not in known:
                raise ConfigError(f"unknown config field: {key}")
            setattr(cfg, key, value)
        return cfg

    def to_dict(self) -> dict:
        d = {
            "family": self.family,
            "p_prior": {"support": list(self.p_support), "weights": list(self.p_weights)},
            "q_prior": {"support": list(self.q_support), "weights": list(self.q_weights)},
            "tolerance": {
                "abs_tol": self.abs_tol,
                "rel_tol": self.rel_tol,
                "fd_step_scale": self.fd_step_scale,
                "richardson_levels": self.richardson_levels,
            },
            "epsilon": self.epsilon,
            "format": self.format,
            "seed": self.seed,
        }
        if self.n is not None:
            d["n"] = self.n
        if self.r is not None:
            d["r"] = self.r
        if self.param is not None:
            d["param"] = self.param
        if self.grid:
            d["grid"] = list(self.grid)
        return d

    # ---- validated domain objects -------------------------------------

    def _prior(self, support, weights, name) -> DiscretePrior:
        if not support:
            raise ConfigError(f"{name}: support is empty")
        if len(support) != len(weights):
            raise ConfigError(f"{name}: support and weights lengths differ")
        total = math.fsum(weights)
        if abs(total - 1.0) > 1e-6:
            raise ConfigError(f"{name}: weights sum to {total}, not 1 within 1e-6")
        weights = [w / total for w in weights]
        try:
            return DiscretePrior(tuple(support), tuple(weights))
        except DomainError as exc:
            raise ConfigError(f"{name}: {exc}") from exc

    def p_prior(self) -> DiscretePrior:
        return self._prior(self.p_support, self.p_weights, "p_prior")

    def q_prior(self) -> DiscretePrior:
        return self._prior(self.q_support, self.q_weights, "q_prior")

    def channel(self, param: float):
        try:
            if self.family == "binomial":
                if self.n is None:
                    raise ConfigError("binomial family requires n")
                return BinomialChannel(self.n, param)
            if self.family == "negbinomial":
                if self.r is None:
                    raise ConfigError("negbinomial family requires r")
                return NegBinomialChannel(self.r, param)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"unknown family: {self.family}")

    def tolerance(self) -> ToleranceSpec:
        try:
            return ToleranceSpec(
                abs_tol=self.abs_tol,
                rel_tol=self.rel_tol,
                fd_step_scale=self.fd_step_scale,
                richardson_levels=self.richardson_levels,
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self, need_grid: bool = False) -> None:
        if self.family not in ("binomial", "negbinomial"):
            raise ConfigError(f"unknown family: {self.family}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown output format: {self.format}")
        if not 0 < self.epsilon < 1:
            raise ConfigError(f"epsilon={self.epsilon} must lie in (0,1)")
        p, q = self.p_prior(), self.q_prior()
        self.tolerance()
        params = self.grid if need_grid else [self.param]
        if need_grid and len(self.grid) < 2:
            raise ConfigError("sweep requires a grid with at least 2 points")
        if not need_grid and self.param is None:
            raise ConfigError("verify requires a single 'param' value (a or b)")
        for value in params:
            ch = self.channel(value)
            try:
                ch.check_compatible(p)
                ch.check_compatible(q)
            except DomainError as exc:
                raise ConfigError(f"param {value}: {exc}") from exc


def load_config(path: str, overrides: argparse.Namespace) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top-level config must be an object")
    cfg = RunConfig.from_dict(raw)
    if getattr(overrides, "family", None):
        cfg.family = overrides.family
    if getattr(overrides, "format", None):
        cfg.format = overrides.format
    if getattr(overrides, "seed", None) is not None:
        cfg.seed = overrides.seed
    if getattr(overrides, "grid", None):
        try:
            cfg.grid = [float(v) for v in overrides.grid.split(",")]
        except ValueError as exc:
            raise ConfigError(f"--grid: {exc}") from exc
    return cfg


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def cmd_verify(cfg: RunConfig) -> int:
    cfg.validate(need_grid=False)
    ch = cfg.channel(cfg.param)
    tol = cfg.tolerance()
    p, q = cfg.p_prior(), cfg.q_prior()
    reports = [
        verify_lemma(p, ch, tol, eps=cfg.epsilon),
        verify_lemma(q, ch, tol, eps=cfg.epsilon),
        verify_theorem(p, q, ch, tol, eps=cfg.epsilon),
    ]
    print("label,point,analytic,oracle,abs_err,rel_err,pass")
    for rep in reports:
        for key, a_val, o_val, abs_err, rel_err in rep.per_point:
            print(
                f"{rep.label},{_fmt(key)},{_fmt(a_val)},{_fmt(o_val)},"
                f"{_fmt(abs_err)},{_fmt(rel_err)},{rep.passed}"
            )
    all_pass = all(r.passed for r in reports)
    print(f"# overall: {'PASS' if all_pass else 'FAIL'}")
    return EXIT_OK if all_pass else EXIT_VERIFY_FAIL


def _sweep_records(cfg: RunConfig) -> list[dict]:
    p, q = cfg.p_prior(), cfg.q_prior()
    tol = cfg.tolerance()
    template = cfg.channel(cfg.grid[0])
    curve = divergence_curve(p, q, template, cfg.grid, eps=cfg.epsilon)
    records = []
    for param, div in curve:
        ch = cfg.channel(param)
        if isinstance(ch, BinomialChannel):
            analytic = theorem_rhs_binomial(p, q, ch)
            cap = min(p.min_support(), q.min_support()) - param
            dcfg = DiffConfig(tol.fd_step_scale, tol.richardson_levels, cap / 4.0)

            def kl_at(a, _n=ch.n):
                c = BinomialChannel(_n, a)
                return kl_divergence(output_pmf(p, c), output_pmf(q, c))

        else:
            analytic = theorem_rhs_negbinomial(p, q, ch, eps=cfg.epsilon)
            dcfg = DiffConfig(tol.fd_step_scale, tol.richardson_levels)

            def kl_at(b, _r=ch.r):
                return divergence_at(p, q, NegBinomialChannel(_r, b), cfg.epsilon)

        fd, _ = central_diff(kl_at, param, dcfg)
        abs_err = abs(analytic - fd)
        rel_err = abs_err / abs(fd) if fd != 0 else (0.0 if abs_err == 0 else math.inf)
        records.append(
            {
                "param": param,
                "divergence": div,
                "analytic_rhs": analytic,
                "fd_derivative": fd,
                "abs_err": abs_err,
                "rel_err": rel_err,
            }
        )
    return records


def cmd_sweep(cfg: RunConfig) -> int:
    cfg.validate(need_grid=True)
    records = _sweep_records(cfg)
    columns = ["param", "divergence", "analytic_rhs", "fd_derivative", "abs_err", "rel_err"]
    if cfg.format == "csv":
        print(",".join(columns))
        for rec in records:
            print(",".join(_fmt(rec[c]) for c in columns))
    else:
        print(json.dumps(records, indent=2))
    return EXIT_OK


def cmd_selftest(cfg: RunConfig | None, seed: int) -> int:
    tol_override = None
    if cfg is not None:
        tol_override = cfg.tolerance()
        seed = cfg.seed
    results = run_battery(seed, tol_override)
    failures = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"criterion {res.index} [{res.name}]: {status} ({res.detail})")
        if not res.passed:
            failures.append(res.name)
    if failures:
        print(f"# selftest FAIL: {', '.join(failures)}")
        return EXIT_VERIFY_FAIL
    print("# selftest PASS")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mismatchkl",
        description="Verify relative-entropy derivative identities for "
        "binomial and negative binomial channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify", "sweep", "selftest"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="path to a JSON run configuration")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--seed", type=int)
        sp.add_argument("--family", choices=["binomial", "negbinomial"])
        sp.add_argument("--grid", help="comma-separated a/b grid override")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = None
        if args.config:
            cfg = load_config(args.config, args)
        if args.command == "selftest":
            seed = args.seed
            if seed is None:
                seed = int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))
            return cmd_selftest(cfg, seed)
        if cfg is None:
            raise ConfigError(f"{args.command} requires --config")
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_sweep(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
