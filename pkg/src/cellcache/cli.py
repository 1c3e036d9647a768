"""Experiment orchestration: config files, sweep tables, reproducible output.

Five scenarios map the library onto machine-readable result tables:

  coverage        per-rank coverage with bound pairs over a gamma/L/B sweep
  optimize-prob   KKT probabilistic placement against the most-popular baseline
  optimize-coded  greedy fragment placement (exhaustive oracle when N is small)
  simulate        Monte Carlo estimates next to their analytic targets
  compare         probabilistic vs coded policies across the gamma sweep

Each run writes a results table (CSV or JSON), a manifest recording the
resolved configuration, its hash, the seed, and the artifact version, and
optionally plain x/y plot-data files.  Feeding a manifest back through
--config replays the run byte for byte.  Analytic columns carry their
fidelity in the header (name:exact, name:bound, name:approx) so no emitted
number is ambiguous about what produced it.

All SIR thresholds cross this boundary in dB; the library works in linear
units (gamma = 10^(dB/10)).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib  # type: ignore[no-redef]

from . import __version__
from .coverage import (
    ExactModeCapError,
    cov_mf_bounds,
    cov_mf_exact,
    cov_nomf_bounds,
    cov_nomf_exact,
    cov_quantized,
    cov_zf_approx_bounds,
    cov_zf_exact,
    coverage_profile,
)
from .geometry import NetworkParams
from .metrics import (
    UNCACHED,
    afot_coded,
    afot_prob,
    aese_coded,
    aese_prob,
    fot_coded_nomf,
    fot_coded_ozf,
    rate_table,
    zipf_popularity,
)
from .montecarlo import TrialPlan, sim_coverage, sim_sic_fot
from .placement import (
    EXHAUSTIVE_N_CAP,
    exhaustive_coded,
    greedy_coded,
    mpc_policy,
    solve_prob_caching,
)
from .specfun import NonConvergenceError

SCENARIOS = ("coverage", "optimize-prob", "optimize-coded", "simulate", "compare")
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NONCONVERGENCE = 3

# gamma sweep covering the usual low/mid/high SIR-target regimes
_DEFAULT_GAMMA_DB = (-10.0, -5.0, 0.0, 5.0, 10.0)


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def db_to_linear(gamma_db: float) -> float:
    return 10.0 ** (gamma_db / 10.0)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment description.

    Defaults reproduce the standard evaluation setup: alpha=4, N=100 files,
    cache size M=10, popularity exponent 0.5, cluster size K=3.
    """

    scenario: str
    lambda_b: float = 1.0
    alpha: float = 4.0
    L: int = 3
    K: int = 3
    feedback_bits: int | None = None
    scheme: str = "mf"            # mf | zf | no-mf (prob delivery: mf | zf)
    coded_scheme: str = "no-mf"   # no-mf | o-zf
    N: int = 100
    M: int = 10
    delta: float = 0.5
    gamma_db: tuple[float, ...] = _DEFAULT_GAMMA_DB
    L_sweep: tuple[int, ...] | None = None
    B_sweep: tuple[int, ...] | None = None
    trials: int = 100_000
    seed: int = 0
    out_dir: str = "runs"
    fmt: str = "csv"
    plot_data: bool = False

    def to_dict(self) -> dict:
        """Nested dict mirroring the config-file layout (manifest payload).

        The output directory is where results land, not what they contain,
        so it stays out of the dict and replayed runs hash identically no
        matter where they are written.
        """
        network: dict = {
            "lambda_b": self.lambda_b, "alpha": self.alpha,
            "L": self.L, "K": self.K,
            "scheme": self.scheme, "coded_scheme": self.coded_scheme,
        }
        if self.feedback_bits is not None:
            network["feedback_bits"] = self.feedback_bits
        sweep: dict = {"gamma_db": list(self.gamma_db)}
        if self.L_sweep is not None:
            sweep["L"] = list(self.L_sweep)
        if self.B_sweep is not None:
            sweep["feedback_bits"] = list(self.B_sweep)
        return {
            "scenario": self.scenario,
            "network": network,
            "catalog": {"N": self.N, "M": self.M, "delta": self.delta},
            "sweep": sweep,
            "simulation": {"trials": self.trials, "seed": self.seed},
            "output": {"format": self.fmt, "plot_data": self.plot_data},
        }


def _section(data: dict, name: str, keys: tuple[str, ...]) -> dict:
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}]: must be a table")
    for key in sec:
        if key not in keys:
            raise ConfigError(f"[{name}] {key}: unknown key")
    return sec


def _num(sec: dict, name: str, key: str, default, kind=float):
    value = sec.get(key, default)
    if value is None:
        return None
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"[{name}] {key}: expected a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(f"[{name}] {key}: expected an integer, got {value!r}")
    return kind(value)


def _numlist(sec: dict, name: str, key: str, default, kind=float):
    values = sec.get(key, default)
    if values is None:
        return None
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"[{name}] {key}: expected a nonempty list")
    return tuple(
        _num({key: v}, name, key, None, kind) for v in values
    )


def config_from_dict(data: dict, scenario: str | None = None,
                     overrides: dict | None = None) -> ExperimentConfig:
    """Build and validate a config from a parsed file plus CLI overrides."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table")
    for key in data:
        if key not in ("scenario", "network", "catalog", "sweep",
                       "simulation", "output"):
            raise ConfigError(f"{key}: unknown section")
    scenario = scenario or data.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario: expected one of {SCENARIOS}, "
                          f"got {scenario!r}")

    net = _section(data, "network", ("lambda_b", "alpha", "L", "K",
                                     "feedback_bits", "scheme",
                                     "coded_scheme"))
    cat = _section(data, "catalog", ("N", "M", "delta"))
    sweep = _section(data, "sweep", ("gamma_db", "L", "feedback_bits"))
    sim = _section(data, "simulation", ("trials", "seed"))
    out = _section(data, "output", ("directory", "format", "plot_data"))

    scheme = net.get("scheme", "mf")
    coded_scheme = net.get("coded_scheme", "no-mf")
    fmt = out.get("format", "csv")
    plot = out.get("plot_data", False)
    if not isinstance(plot, bool):
        raise ConfigError(f"[output] plot_data: expected a boolean, got {plot!r}")
    directory = out.get("directory", "runs")
    if not isinstance(directory, str):
        raise ConfigError(f"[output] directory: expected a string")

    cfg = ExperimentConfig(
        scenario=scenario,
        lambda_b=_num(net, "network", "lambda_b", 1.0),
        alpha=_num(net, "network", "alpha", 4.0),
        L=_num(net, "network", "L", 3, int),
        K=_num(net, "network", "K", 3, int),
        feedback_bits=_num(net, "network", "feedback_bits", None, int),
        scheme=str(scheme).lower(),
        coded_scheme=str(coded_scheme).lower(),
        N=_num(cat, "catalog", "N", 100, int),
        M=_num(cat, "catalog", "M", 10, int),
        delta=_num(cat, "catalog", "delta", 0.5),
        gamma_db=_numlist(sweep, "sweep", "gamma_db", list(_DEFAULT_GAMMA_DB)),
        L_sweep=_numlist(sweep, "sweep", "L", None, int),
        B_sweep=_numlist(sweep, "sweep", "feedback_bits", None, int),
        trials=_num(sim, "simulation", "trials", 100_000, int),
        seed=_num(sim, "simulation", "seed", 0, int),
        out_dir=directory,
        fmt=str(fmt),
        plot_data=plot,
    )
    if overrides:
        cfg = replace(cfg, **{k: v for k, v in overrides.items()
                              if v is not None})
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig) -> None:
    """Check every sweep point's preconditions before any computation."""
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"scenario: expected one of {SCENARIOS}")
    if cfg.fmt not in ("csv", "json"):
        raise ConfigError(f"[output] format: expected csv or json, got {cfg.fmt!r}")
    if cfg.trials < 1:
        raise ConfigError("[simulation] trials: must be >= 1")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("[simulation] seed: must fit in an unsigned 64-bit int")
    if not 1 <= cfg.M < cfg.N:
        raise ConfigError(f"[catalog] M: need 1 <= M < N, got M={cfg.M}, N={cfg.N}")
    if cfg.delta < 0:
        raise ConfigError("[catalog] delta: popularity exponent must be >= 0")

    allowed = {
        "coverage": ("mf", "zf", "no-mf"),
        "simulate": ("mf", "zf", "no-mf"),
        "optimize-prob": ("mf", "zf"),
        "compare": ("mf", "zf"),
        "optimize-coded": ("mf", "zf"),  # scheme unused; accept the default
    }[cfg.scenario]
    if cfg.scheme not in allowed:
        raise ConfigError(f"[network] scheme: {cfg.scenario} accepts "
                          f"{allowed}, got {cfg.scheme!r}")
    if cfg.coded_scheme not in ("no-mf", "o-zf"):
        raise ConfigError(f"[network] coded_scheme: expected no-mf or o-zf, "
                          f"got {cfg.coded_scheme!r}")

    quantized_sweep = cfg.B_sweep if cfg.B_sweep is not None else \
        (cfg.feedback_bits,)
    if any(b is not None for b in quantized_sweep) and cfg.scheme not in ("mf", "zf"):
        raise ConfigError("[network] feedback_bits: limited feedback is "
                          "modeled for mf and zf only")
    for L in cfg.L_sweep or (cfg.L,):
        for B in quantized_sweep:
            for g in cfg.gamma_db:
                try:
                    params = NetworkParams(
                        lambda_b=cfg.lambda_b, alpha=cfg.alpha, L=L, K=cfg.K,
                        gamma=db_to_linear(g), feedback_bits=B)
                    if cfg.scheme == "zf" or (
                            cfg.scenario in ("optimize-coded", "compare")
                            and cfg.coded_scheme == "o-zf"):
                        params.require_zf_feasible()
                except ValueError as exc:
                    raise ConfigError(
                        f"[network/sweep] L={L}, feedback_bits={B}, "
                        f"gamma_db={g:g}: {exc}") from exc


def load_config(path: str | None, scenario: str | None = None,
                overrides: dict | None = None) -> ExperimentConfig:
    """Parse a TOML config file or a JSON manifest into a validated config."""
    data: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"--config {path}: {exc}") from exc
        try:
            if path.endswith(".json"):
                data = json.loads(text)
            else:
                data = tomllib.loads(text)
        except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"--config {path}: {exc}") from exc
        if isinstance(data, dict) and "artifact" in data and "config" in data:
            data = data["config"]  # manifest replay
    return config_from_dict(data, scenario, overrides)


# ---------------------------------------------------------------------------
# table plumbing
# ---------------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _table_csv(columns: list[str], rows: list[dict]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue().encode("utf-8")


def _table_json(columns: list[str], rows: list[dict]) -> bytes:
    payload = {
        "columns": columns,
        "rows": [{c: row.get(c) for c in columns} for row in rows],
    }
    return (json.dumps(payload, indent=2) + "\n").encode("utf-8")


def _attempt(notes: list[str], label: str, fn):
    """Evaluate one analytic cell; a per-point failure marks the row and
    the run continues.  Non-convergence is fatal by contract."""
    try:
        return fn()
    except (ExactModeCapError, ValueError, ArithmeticError) as exc:
        notes.append(f"{label}: {exc}")
        return None


def _status(notes: list[str]) -> str:
    return "ok" if not notes else "failed: " + "; ".join(notes)


_FIDELITY_TAG = {
    "exact": "exact",
    "closed-form": "exact",
    "lower-bound": "bound",
    "upper-bound": "bound",
    "approx-lower": "approx",
    "approx-upper": "approx",
}


def _params_at(cfg: ExperimentConfig, gamma_db: float, L: int | None = None,
               B: int | None = None) -> NetworkParams:
    return NetworkParams(
        lambda_b=cfg.lambda_b, alpha=cfg.alpha,
        L=cfg.L if L is None else L, K=cfg.K,
        gamma=db_to_linear(gamma_db),
        feedback_bits=B,
    )


def _gamma_label(gamma_db: float) -> str:
    return f"{gamma_db:g}dB"


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

def _scenario_coverage(cfg: ExperimentConfig):
    pair_tag = "approx" if cfg.scheme == "zf" else "bound"
    lo_col, up_col = f"cov_lower:{pair_tag}", f"cov_upper:{pair_tag}"
    columns = ["scheme", "L", "K", "feedback_bits", "gamma_db", "k",
               "coverage:exact", lo_col, up_col, "status"]
    exact_fn = {"mf": cov_mf_exact, "zf": cov_zf_exact}.get(cfg.scheme)
    bound_fn = {"mf": cov_mf_bounds, "zf": cov_zf_approx_bounds}.get(cfg.scheme)

    rows, series = [], {}
    for L in cfg.L_sweep or (cfg.L,):
        for B in cfg.B_sweep if cfg.B_sweep is not None else (cfg.feedback_bits,):
            for g in cfg.gamma_db:
                params = _params_at(cfg, g, L=L, B=B)
                for k in range(1, cfg.K + 1):
                    notes: list[str] = []
                    if B is not None:
                        exact = None
                        pair = _attempt(notes, "bounds",
                                        lambda: cov_quantized(cfg.scheme, k, params))
                    elif cfg.scheme == "no-mf":
                        exact = _attempt(notes, "exact",
                                         lambda: cov_nomf_exact(k, cfg.K, params))
                        pair = _attempt(notes, "bounds",
                                        lambda: cov_nomf_bounds(k, cfg.K, params))
                    else:
                        exact = _attempt(notes, "exact",
                                         lambda: exact_fn(k, params))
                        pair = _attempt(notes, "bounds",
                                        lambda: bound_fn(k, params))
                    lo, up = pair if pair is not None else (None, None)
                    rows.append({
                        "scheme": cfg.scheme, "L": L, "K": cfg.K,
                        "feedback_bits": B, "gamma_db": g, "k": k,
                        "coverage:exact": exact, lo_col: lo, up_col: up,
                        "status": _status(notes),
                    })
                    series[(L, B, g, k)] = exact if exact is not None else lo

    plots = {}
    if cfg.plot_data:
        for L in cfg.L_sweep or (cfg.L,):
            for B in cfg.B_sweep if cfg.B_sweep is not None else (cfg.feedback_bits,):
                name = f"plotdata_coverage_L{L}" + \
                       (f"_B{B}" if B is not None else "") + ".csv"
                cols = ["gamma_db"] + [f"k{k}" for k in range(1, cfg.K + 1)]
                prows = [dict({"gamma_db": g},
                              **{f"k{k}": series[(L, B, g, k)]
                                 for k in range(1, cfg.K + 1)})
                         for g in cfg.gamma_db]
                plots[name] = (cols, prows)
    return columns, rows, plots


def _prob_pipeline(cfg: ExperimentConfig, gamma_db: float):
    """(popularity, coverage profile, rate table) for one sweep point."""
    params = _params_at(cfg, gamma_db)
    pop = zipf_popularity(cfg.N, cfg.delta)
    profile = coverage_profile(cfg.scheme, params)
    table = rate_table(cfg.scheme, params)
    return params, pop, profile, table


def _scenario_optimize_prob(cfg: ExperimentConfig):
    probe = coverage_profile(cfg.scheme, _params_at(cfg, cfg.gamma_db[0]))
    cov_tag = _FIDELITY_TAG[probe.fidelity]
    afot_col = f"afot:{cov_tag}"
    aese_col = f"aese:{cov_tag}"
    columns = ["scheme", "gamma_db", "policy", afot_col, aese_col,
               "cache_load", "status"]

    rows, alloc = [], {}
    for g in cfg.gamma_db:
        _, pop, profile, table = _prob_pipeline(cfg, g)
        opc = solve_prob_caching(pop, profile.values, cfg.M)
        for label, policy in (("opc", opc), ("mpc", mpc_policy(cfg.N, cfg.M))):
            rows.append({
                "scheme": cfg.scheme, "gamma_db": g, "policy": label,
                afot_col: afot_prob(policy, pop, profile),
                aese_col: aese_prob(policy, pop, table.rates),
                "cache_load": float(sum(policy.a)),
                "status": "ok",
            })
        alloc[g] = (pop, opc)

    plots = {}
    if cfg.plot_data:
        cols = ["file", "popularity"] + \
               [f"a_{_gamma_label(g)}" for g in cfg.gamma_db]
        prows = []
        for n in range(cfg.N):
            row = {"file": n + 1,
                   "popularity": alloc[cfg.gamma_db[0]][0].p[n]}
            for g in cfg.gamma_db:
                row[f"a_{_gamma_label(g)}"] = alloc[g][1].a[n]
            prows.append(row)
        plots["plotdata_allocation.csv"] = (cols, prows)
    return columns, rows, plots


def _coded_values(cfg: ExperimentConfig, params: NetworkParams, scheme: str):
    """Per-file profit table over depths 1..K plus the uncached column."""
    fot = fot_coded_nomf if scheme == "no-mf" else fot_coded_ozf
    per_depth = [fot(b, params) for b in range(1, cfg.K + 1)] + [0.0]
    return [per_depth] * cfg.N


def _depth_histogram(policy) -> str:
    counts: dict[object, int] = {}
    for b in policy.b:
        key = "U" if b is UNCACHED else b
        counts[key] = counts.get(key, 0) + 1
    parts = [f"{d}:{counts[d]}" for d in sorted(k for k in counts if k != "U")]
    if "U" in counts:
        parts.append(f"U:{counts['U']}")
    return " ".join(parts)


def _coded_tag(cfg: ExperimentConfig, scheme: str) -> str:
    # no-mf chains are product-form approximations; o-zf inherits the
    # fidelity the zero-forcing coverage pipeline actually runs at
    if scheme == "no-mf":
        return "approx"
    probe = coverage_profile("zf", _params_at(cfg, cfg.gamma_db[0]))
    return _FIDELITY_TAG[probe.fidelity]


def _scenario_optimize_coded(cfg: ExperimentConfig):
    scheme = cfg.coded_scheme
    tag = _coded_tag(cfg, scheme)
    afot_col, aese_col = f"afot:{tag}", f"aese:{tag}"
    exh_col = f"afot_exhaustive:{tag}"
    columns = ["scheme", "gamma_db", "depths", "cache_load",
               afot_col, aese_col, exh_col, "status"]

    rows, per_file = [], {}
    for g in cfg.gamma_db:
        params = _params_at(cfg, g)
        pop = zipf_popularity(cfg.N, cfg.delta)
        notes: list[str] = []
        values = _coded_values(cfg, params, scheme)
        policy = greedy_coded(pop, values, cfg.M, cfg.K)
        load = sum(0.0 if b is UNCACHED else 1.0 / b for b in policy.b)
        exhaustive = None
        if cfg.N <= EXHAUSTIVE_N_CAP:
            best = exhaustive_coded(pop, values, cfg.M, cfg.K)
            exhaustive = afot_coded(best, pop, params, scheme)
        rows.append({
            "scheme": scheme, "gamma_db": g,
            "depths": _depth_histogram(policy), "cache_load": load,
            afot_col: afot_coded(policy, pop, params, scheme),
            aese_col: _attempt(notes, "aese",
                               lambda: aese_coded(policy, pop, params, scheme)),
            exh_col: exhaustive,
            "status": _status(notes),
        })
        per_file[g] = policy

    plots = {}
    if cfg.plot_data:
        cols = ["file"] + [f"b_{_gamma_label(g)}" for g in cfg.gamma_db]
        prows = []
        for n in range(cfg.N):
            row = {"file": n + 1}
            for g in cfg.gamma_db:
                b = per_file[g].b[n]
                row[f"b_{_gamma_label(g)}"] = 0 if b is UNCACHED else b
            prows.append(row)
        plots["plotdata_coded_depths.csv"] = (cols, prows)
    return columns, rows, plots


def _scenario_simulate(cfg: ExperimentConfig):
    quantized = cfg.feedback_bits is not None
    pair_tag = "approx" if cfg.scheme == "zf" and not quantized else "bound"
    lo_col, up_col = f"cov_lower:{pair_tag}", f"cov_upper:{pair_tag}"
    columns = ["scheme", "L", "feedback_bits", "gamma_db", "statistic", "k",
               "coverage:exact", lo_col, up_col]
    if cfg.scheme == "no-mf":
        columns.append("sic_fot:approx")
    columns += ["sim_mean", "sim_se", "trials", "truncation_bound", "status"]

    rows, series = [], {}
    for g in cfg.gamma_db:
        params = _params_at(cfg, g, B=cfg.feedback_bits)
        plan = TrialPlan(trials=cfg.trials, seed=cfg.seed, scheme=cfg.scheme,
                         params=params)
        for k in range(1, cfg.K + 1):
            notes: list[str] = []
            if quantized:
                exact, pair = None, _attempt(
                    notes, "bounds",
                    lambda: cov_quantized(cfg.scheme, k, params))
            elif cfg.scheme == "no-mf":
                exact = _attempt(notes, "exact",
                                 lambda: cov_nomf_exact(k, cfg.K, params))
                pair = _attempt(notes, "bounds",
                                lambda: cov_nomf_bounds(k, cfg.K, params))
            elif cfg.scheme == "mf":
                exact = _attempt(notes, "exact",
                                 lambda: cov_mf_exact(k, params))
                pair = _attempt(notes, "bounds",
                                lambda: cov_mf_bounds(k, params))
            else:
                exact = _attempt(notes, "exact",
                                 lambda: cov_zf_exact(k, params))
                pair = _attempt(notes, "bounds",
                                lambda: cov_zf_approx_bounds(k, params))
            lo, up = pair if pair is not None else (None, None)
            est = sim_coverage(plan, k, b_n=cfg.K if cfg.scheme == "no-mf"
                               else None)
            rows.append({
                "scheme": cfg.scheme, "L": cfg.L,
                "feedback_bits": cfg.feedback_bits, "gamma_db": g,
                "statistic": "coverage", "k": k,
                "coverage:exact": exact, lo_col: lo, up_col: up,
                "sim_mean": est.mean, "sim_se": est.standard_error,
                "trials": est.trials,
                "truncation_bound": est.truncation_bound,
                "status": _status(notes),
            })
            series[(g, k)] = est.mean
        if cfg.scheme == "no-mf":
            # the joint successively-decoded event, next to its product form
            notes = []
            est = sim_sic_fot(plan, cfg.K)
            rows.append({
                "scheme": cfg.scheme, "L": cfg.L,
                "feedback_bits": cfg.feedback_bits, "gamma_db": g,
                "statistic": "sic-fot", "k": None,
                "sic_fot:approx": _attempt(
                    notes, "sic-fot", lambda: fot_coded_nomf(cfg.K, params)),
                "sim_mean": est.mean, "sim_se": est.standard_error,
                "trials": est.trials,
                "truncation_bound": est.truncation_bound,
                "status": _status(notes),
            })

    plots = {}
    if cfg.plot_data:
        cols = ["gamma_db"] + [f"k{k}" for k in range(1, cfg.K + 1)]
        prows = [dict({"gamma_db": g},
                      **{f"k{k}": series[(g, k)] for k in range(1, cfg.K + 1)})
                 for g in cfg.gamma_db]
        plots["plotdata_simulate.csv"] = (cols, prows)
    return columns, rows, plots


def _scenario_compare(cfg: ExperimentConfig):
    probe = coverage_profile(cfg.scheme, _params_at(cfg, cfg.gamma_db[0]))
    prob_tag = _FIDELITY_TAG[probe.fidelity]
    mpc_col = f"afot_mpc:{prob_tag}"
    opc_col = f"afot_opc:{prob_tag}"
    zf_ok = cfg.L >= cfg.K
    cc_nomf_col = "afot_cc_nomf:approx"
    cc_ozf_col = "afot_cc_ozf:" + (_coded_tag(cfg, "o-zf") if zf_ok else "bound")
    columns = ["gamma_db", mpc_col, opc_col, cc_nomf_col, cc_ozf_col,
               f"adv_opc_mpc:{prob_tag}", "adv_cc_mpc:approx", "status"]
    rows = []
    for g in cfg.gamma_db:
        params = _params_at(cfg, g)
        pop = zipf_popularity(cfg.N, cfg.delta)
        notes: list[str] = []
        profile = coverage_profile(cfg.scheme, params)
        opc = solve_prob_caching(pop, profile.values, cfg.M)
        afot_mpc = afot_prob(mpc_policy(cfg.N, cfg.M), pop, profile)
        afot_opc = afot_prob(opc, pop, profile)

        coded = {}
        for scheme in ("no-mf", "o-zf"):
            if scheme == "o-zf" and not zf_ok:
                notes.append("o-zf: needs L >= K")
                coded[scheme] = None
                continue
            values = _coded_values(cfg, params, scheme)
            policy = greedy_coded(pop, values, cfg.M, cfg.K)
            coded[scheme] = afot_coded(policy, pop, params, scheme)
        cc_best = max(v for v in coded.values() if v is not None)
        rows.append({
            "gamma_db": g, mpc_col: afot_mpc, opc_col: afot_opc,
            cc_nomf_col: coded["no-mf"], cc_ozf_col: coded["o-zf"],
            f"adv_opc_mpc:{prob_tag}": afot_opc - afot_mpc,
            "adv_cc_mpc:approx": cc_best - afot_mpc,
            "status": _status(notes),
        })

    plots = {}
    if cfg.plot_data:
        cols = ["gamma_db", "afot_mpc", "afot_opc", "afot_cc_nomf",
                "afot_cc_ozf"]
        prows = [{"gamma_db": r["gamma_db"], "afot_mpc": r[mpc_col],
                  "afot_opc": r[opc_col], "afot_cc_nomf": r[cc_nomf_col],
                  "afot_cc_ozf": r[cc_ozf_col]} for r in rows]
        plots["plotdata_compare.csv"] = (cols, prows)
    return columns, rows, plots


_SCENARIO_FN = {
    "coverage": _scenario_coverage,
    "optimize-prob": _scenario_optimize_prob,
    "optimize-coded": _scenario_optimize_coded,
    "simulate": _scenario_simulate,
    "compare": _scenario_compare,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def run_experiment(config: ExperimentConfig) -> list[Path]:
    """Run one scenario and write results, plot data, and the manifest.

    Returns the written paths.  Identical configs produce byte-identical
    files; the manifest itself can be passed back as --config to replay.
    """
    validate_config(config)
    columns, rows, plots = _SCENARIO_FN[config.scenario](config)

    payloads: dict[str, bytes] = {}
    results_name = f"results.{config.fmt}"
    if config.fmt == "csv":
        payloads[results_name] = _table_csv(columns, rows)
    else:
        payloads[results_name] = _table_json(columns, rows)
    for name, (cols, prows) in sorted(plots.items()):
        payloads[name] = _table_csv(cols, prows)

    resolved = config.to_dict()
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    manifest = {
        "artifact": "cellcache",
        "version": __version__,
        "scenario": config.scenario,
        "seed": config.seed,
        "config": resolved,
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "files": {name: hashlib.sha256(data).hexdigest()
                  for name, data in payloads.items()},
    }
    payloads["manifest.json"] = (
        json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode()

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, data in payloads.items():
        path = out / name
        path.write_bytes(data)
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellcache",
        description="Coverage, cache placement, and Monte Carlo experiments "
                    "for cache-enabled small-cell networks.")
    sub = parser.add_subparsers(dest="scenario", required=True,
                                metavar="{" + ",".join(SCENARIOS) + "}")
    helps = {
        "coverage": "per-rank coverage with bound pairs over the sweep",
        "optimize-prob": "probabilistic placement vs most-popular baseline",
        "optimize-coded": "greedy coded placement (exhaustive when small)",
        "simulate": "Monte Carlo estimates next to analytic targets",
        "compare": "probabilistic vs coded policies across the sweep",
    }
    for name in SCENARIOS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", metavar="<path>",
                        help="TOML config or a manifest.json to replay")
        sp.add_argument("--seed", type=int, metavar="<u64>",
                        help="override the simulation seed")
        sp.add_argument("--trials", type=int, metavar="<n>",
                        help="override the Monte Carlo trial count")
        sp.add_argument("--out", metavar="<dir>",
                        help="output directory (default runs/)")
        sp.add_argument("--format", choices=("csv", "json"), dest="fmt",
                        help="results table format")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "trials": args.trials,
                 "out_dir": args.out, "fmt": args.fmt}
    try:
        config = load_config(args.config, args.scenario, overrides)
        written = run_experiment(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except NonConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
