"""Command-line front end: conditions, simulate, rates, cf-check, audit.

Exit codes: 0 success, 1 configuration/numeric/IO failures, 2 mathematical
audit failures (an inequality or certified-bound violation beyond its error
budget).  Output files are written atomically (temp file + rename) and are a
pure function of the configuration and seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

from . import conditions as cond
from . import quadrature
from .families import (
    SummandFamily,
    comparator_family,
    family_spec_string,
    parse_family,
)
from .indices import (
    TRUNCATION_TARGET,
    index_spec_string,
    make_index,
    parse_index,
)
from .montecarlo import cf_identity_check, kolmogorov_distance, simulate
from .rates import (
    empirical_rotar_constant,
    large_o_audit,
    make_test_function,
    small_o_audit,
)

CF_TOLERANCE = 1e-12  # fixed contract for the mixed-cf identity


class UsageError(ValueError):
    """Invalid flags or flag values; exits with status 1."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    family: str = "rademacher"
    index: str = "det"
    n_grid: tuple = (10, 100, 1000)
    epsilon_grid: tuple = (0.5,)
    delta: float = 1.0
    trials: int = 0
    seed: int = 0
    quad_tol: float = 1e-10
    trunc_mass: float = TRUNCATION_TARGET
    fn_id: str = "sin"
    alpha: float | None = None
    mode: str = "large-o"
    t_grid: tuple = (0.0, 0.5, 1.0, 2.0, 4.0)
    out: str | None = None
    workers: int | None = None
    print_config: bool = False

    def to_argv(self) -> list:
        """Canonical flag list; parse_args on it reproduces this config."""
        argv = [self.subcommand]
        argv += ["--family", self.family, "--index", self.index]
        argv += ["--n-grid", ",".join(str(n) for n in self.n_grid)]
        argv += ["--epsilon", ",".join(repr(e) for e in self.epsilon_grid)]
        argv += ["--delta", repr(self.delta)]
        argv += ["--trials", str(self.trials), "--seed", str(self.seed)]
        argv += ["--quad-tol", repr(self.quad_tol)]
        argv += ["--trunc-mass", repr(self.trunc_mass)]
        argv += ["--fn", self.fn_id, "--mode", self.mode]
        if self.alpha is not None:
            argv += ["--alpha", repr(self.alpha)]
        argv += ["--t-grid", ",".join(repr(t) for t in self.t_grid)]
        if self.out is not None:
            argv += ["--out", self.out]
        if self.workers is not None:
            argv += ["--workers", str(self.workers)]
        return argv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(raw: str) -> tuple:
    try:
        values = tuple(int(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise UsageError(f"--n-grid expects comma-separated integers: {raw!r}")
    if not values or any(v < 1 for v in values):
        raise UsageError(f"--n-grid entries must be positive integers: {raw!r}")
    return values


def _float_list(flag: str, raw: str) -> tuple:
    try:
        values = tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers: {raw!r}")
    if not values:
        raise UsageError(f"{flag} must not be empty")
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="randclt", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    specs = {
        "conditions": "evaluate condition functionals over a grid (CSV)",
        "simulate": "Monte Carlo sweep of the normalized-sum distance (CSV)",
        "rates": "approximation-rate audit for a test function (CSV)",
        "cf-check": "characteristic-function mixing identity (JSON)",
        "audit": "inequality-chain and certified-bound audit (JSON)",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--family", default="rademacher")
        p.add_argument("--index", default="det")
        p.add_argument("--n-grid", "--n", dest="n_grid", default="10,100,1000")
        p.add_argument("--epsilon", default="0.5")
        p.add_argument("--delta", type=float, default=1.0)
        p.add_argument("--trials", type=int, default=0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--quad-tol", type=float, default=1e-10)
        p.add_argument("--trunc-mass", type=float, default=TRUNCATION_TARGET)
        p.add_argument("--fn", dest="fn_id", default="sin")
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--mode", choices=("large-o", "small-o"), default="large-o")
        p.add_argument("--t-grid", default="0,0.5,1,2,4")
        p.add_argument("--out", default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--print-config", action="store_true")
    return parser


def parse_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    config = RunConfig(
        subcommand=ns.subcommand,
        family=ns.family,
        index=ns.index,
        n_grid=_int_list(ns.n_grid),
        epsilon_grid=_float_list("--epsilon", ns.epsilon),
        delta=ns.delta,
        trials=ns.trials,
        seed=ns.seed,
        quad_tol=ns.quad_tol,
        trunc_mass=ns.trunc_mass,
        fn_id=ns.fn_id,
        alpha=ns.alpha,
        mode=ns.mode,
        t_grid=_float_list("--t-grid", ns.t_grid),
        out=ns.out,
        workers=ns.workers,
        print_config=ns.print_config,
    )
    _validate(config)
    return config


def _validate(config: RunConfig) -> None:
    if config.subcommand in ("simulate", "rates") and config.trials < 1:
        raise UsageError(f"--trials must be >= 1: {config.trials}")
    if any(e <= 0.0 for e in config.epsilon_grid):
        raise UsageError(f"--epsilon entries must be positive: {config.epsilon_grid}")
    if not (0.0 < config.delta <= 1.0):
        raise UsageError(f"--delta must lie in (0, 1]: {config.delta}")
    if not (0.0 < config.quad_tol <= 1e-4):
        raise UsageError(f"--quad-tol must lie in (0, 1e-4]: {config.quad_tol}")
    if not (0.0 < config.trunc_mass < 1.0):
        raise UsageError(f"--trunc-mass must lie in (0, 1): {config.trunc_mass}")
    if config.trials < 0:
        raise UsageError(f"--trials must be nonnegative: {config.trials}")
    try:
        parse_family(config.family)
        parse_index(config.index)
        if config.subcommand == "rates":
            make_test_function(config.fn_id)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(config: RunConfig, text: str) -> None:
    if config.out:
        _write_atomic(config.out, text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Subcommand runners
# ---------------------------------------------------------------------------


def _family_and_index(config: RunConfig):
    family = parse_family(config.family)
    kind, param = parse_index(config.index)
    return family, kind, param


def _run_conditions(config: RunConfig) -> int:
    family, kind, param = _family_and_index(config)
    comp = family.comparator()
    rows = []
    for n in config.n_grid:
        model = make_index(kind, n, param, target=config.trunc_mass)
        per_n = [
            cond.lyapunov(family, n, config.delta),
            cond.feller(family, n),
            cond.random_feller(family, model),
        ]
        for eps in config.epsilon_grid:
            per_n += [
                cond.lindeberg(family, n, eps),
                cond.infinitesimality(family, n, eps),
                cond.rotar(family, comp, n, eps),
                cond.random_lindeberg(family, model, eps),
                cond.random_rotar(family, comp, model, eps),
            ]
        for rep in per_n:
            rows.append(
                (
                    rep.condition.value,
                    rep.n,
                    rep.epsilon,
                    rep.delta,
                    rep.value,
                    rep.error_bound,
                )
            )
    _emit(config, _csv(
        ("condition", "n", "epsilon", "delta", "value", "error_bound"), rows
    ))
    return 0


def _run_simulate(config: RunConfig) -> int:
    family, kind, param = _family_and_index(config)
    rows = []
    for n in config.n_grid:
        model = make_index(kind, n, param, target=config.trunc_mass)
        sample = simulate(family, model, config.trials, config.seed, workers=config.workers)
        est = kolmogorov_distance(sample)
        rows.append((n, config.trials, config.seed, est.d_hat, est.dkw_band))
    _emit(config, _csv(("n", "trials", "seed", "d_hat", "dkw_band"), rows))
    return 0


def _run_rates(config: RunConfig) -> int:
    family, kind, param = _family_and_index(config)
    f = make_test_function(config.fn_id)
    if config.alpha is not None and f.lipschitz is not None:
        f = dataclasses.replace(f, lipschitz=(config.alpha, f.lipschitz[1]))

    def factory(n):
        return make_index(kind, n, param, target=config.trunc_mass)

    rows = []
    if config.mode == "large-o":
        curve = large_o_audit(
            family, factory, f, config.n_grid, config.trials, config.seed,
            workers=config.workers,
        )
        for p in curve.points:
            ratio = p.metric / p.bound if p.bound > 0 else math.inf
            rows.append((p.n, p.metric, p.mc_stderr, p.bound, ratio))
    else:
        curve = small_o_audit(
            family, family.comparator(), factory, f, config.n_grid,
            config.epsilon_grid, config.trials, config.seed, workers=config.workers,
        )
        for p in curve.points:
            rows.append((p.n, p.metric, p.mc_stderr, p.inv_b_expectation, p.ratio))
    _emit(config, _csv(("n", "metric", "mc_stderr", "bound", "ratio"), rows))
    return 0


def _run_cf_check(config: RunConfig) -> int:
    family, kind, param = _family_and_index(config)
    normal_twin = comparator_family(family)
    model = make_index(kind, config.n_grid[0], param, target=config.trunc_mass)
    result = cf_identity_check(normal_twin, model, config.t_grid)
    passed = result.max_deviation <= CF_TOLERANCE
    payload = {
        "family": family_spec_string(family),
        "index": index_spec_string(kind, param),
        "t_grid": list(result.t_grid),
        "deviations": list(result.deviations),
        "max_deviation": result.max_deviation,
        "tail_mass": result.truncation_tail_mass,
        "tolerance": CF_TOLERANCE,
        "passed": passed,
    }
    _emit(config, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0 if passed else 2


def _run_audit(config: RunConfig) -> int:
    family, kind, param = _family_and_index(config)
    comp = family.comparator()
    normal_twin = comparator_family(family)
    cf_model = make_index(kind, config.n_grid[-1], param, target=config.trunc_mass)
    cf = cf_identity_check(normal_twin, cf_model, config.t_grid)
    cf_passed = cf.max_deviation <= CF_TOLERANCE
    configs = []
    all_passed = cf_passed
    for n in config.n_grid:
        model = make_index(kind, n, param, target=config.trunc_mass)
        for eps in config.epsilon_grid:
            audit = cond.implication_audit(family, comp, model, n, eps, config.delta)
            entry = {
                "n": n,
                "epsilon": eps,
                "checks": [dataclasses.asdict(c) for c in audit.checks],
                "passed": audit.passed,
            }
            if config.trials >= 1:
                entry["empirical_constant"] = empirical_rotar_constant(
                    family, comp, model, eps, config.trials, config.seed
                )
            configs.append(entry)
            all_passed = all_passed and audit.passed
    payload = {
        "family": family_spec_string(family),
        "index": index_spec_string(kind, param),
        "delta": config.delta,
        "seed": config.seed,
        "cf_identity": {
            "max_deviation": cf.max_deviation,
            "tolerance": CF_TOLERANCE,
            "passed": cf_passed,
            "t_grid": list(cf.t_grid),
        },
        "configs": configs,
        "passed": all_passed,
    }
    _emit(config, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0 if all_passed else 2


_RUNNERS = {
    "conditions": _run_conditions,
    "simulate": _run_simulate,
    "rates": _run_rates,
    "cf-check": _run_cf_check,
    "audit": _run_audit,
}


def run(config: RunConfig) -> int:
    """Execute a validated config; returns the process exit status."""
    if config.print_config:
        sys.stdout.write(" ".join(config.to_argv()) + "\n")
        return 0
    quadrature.set_default_tol(config.quad_tol)
    try:
        return _RUNNERS[config.subcommand](config)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"randclt: error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"randclt: usage error: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
