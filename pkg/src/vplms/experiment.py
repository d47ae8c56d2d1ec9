"""Monte-Carlo experiment configuration, orchestration and emission.

A run identifies one random sparse system per (sparsity level, run index)
pair; every configured algorithm consumes the identical input and noise
streams of that run, which makes the comparisons paired. Run seeds are
derived by mixing (base_seed, sparsity, run_index), so any single run can
be reproduced without executing the ones before it and workers can fan
out without coordinating.

Outputs per sparsity level: one CSV of ensemble-mean traces (MSD per
algorithm, p per variable-p algorithm, 17 significant digits), plus a
machine-readable summary and the resolved configuration with its
fingerprint.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .attractors import PenaltyParams
from .filters import (
    AlgoKind,
    DeltaSchedule,
    HyperParams,
    ScheduleKind,
    gsd_default_schedule,
    gse_default_schedule,
    lms_step,
    lp_lms_step,
    lpl_lms_step,
    new_state,
    predict_error,
    vp_step,
)
from .metrics import EnsembleTrace, RunTrace, ensemble_average, squared_deviation, steady_state_msd
from .signal_model import (
    SparseSystemSpec,
    generate_sparse_weights,
    generate_white_gaussian,
    regressor_matrix,
    snr_to_noise_variance,
)

log = logging.getLogger("vplms")

DEFAULT_BASE_SEED = 20260810


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def default_hyper(algo: AlgoKind) -> HyperParams:
    """Library-default hyperparameters per algorithm."""
    penalty = PenaltyParams(rho=5e-4, epsilon=5e-2, p=0.5)
    if algo is AlgoKind.LMS:
        return HyperParams(mu=5e-2)
    if algo in (AlgoKind.LP_LMS, AlgoKind.LPL_LMS):
        return HyperParams(mu=5e-2, penalty=penalty)
    if algo is AlgoKind.VP_GSD_LMS:
        return HyperParams(mu=5e-2, penalty=penalty, T=5, p0=0.5)
    return HyperParams(mu=5e-2, penalty=penalty, T=5, p0=1.0)


def default_schedule(algo: AlgoKind) -> DeltaSchedule | None:
    if algo is AlgoKind.VP_GSD_LMS:
        return gsd_default_schedule()
    if algo.is_variable_p:
        return gse_default_schedule()
    return None


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description.

    Missing per-algorithm entries in ``hyper``/``schedules`` are filled
    with the library defaults on construction.
    """

    num_taps: int = 16
    sparsity_levels: tuple[int, ...] = (1, 4, 8, 16)
    signal_length: int = 500
    snr_db: float = 20.0
    input_variance: float = 1.0
    num_runs: int = 200
    base_seed: int = DEFAULT_BASE_SEED
    algorithms: tuple[AlgoKind, ...] = tuple(AlgoKind)
    hyper: dict = field(default_factory=dict)
    schedules: dict = field(default_factory=dict)
    tail_window: int = 50
    out_dir: str = "results"

    def __post_init__(self) -> None:
        object.__setattr__(self, "sparsity_levels", tuple(int(s) for s in self.sparsity_levels))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.num_taps < 1:
            raise ConfigError(f"num_taps must be >= 1, got {self.num_taps}")
        if not self.sparsity_levels:
            raise ConfigError("sparsity_levels must not be empty")
        for s in self.sparsity_levels:
            if not 1 <= s <= self.num_taps:
                raise ConfigError(
                    f"sparsity_levels entry {s} outside [1, num_taps={self.num_taps}]"
                )
        if self.signal_length < self.num_taps:
            raise ConfigError(
                f"signal_length {self.signal_length} must be >= num_taps={self.num_taps}"
            )
        if self.input_variance <= 0:
            raise ConfigError(f"input_variance must be > 0, got {self.input_variance}")
        if self.num_runs < 1:
            raise ConfigError(f"num_runs must be >= 1, got {self.num_runs}")
        if self.base_seed < 0:
            raise ConfigError(f"base_seed must be >= 0, got {self.base_seed}")
        if not self.algorithms:
            raise ConfigError("algorithms must not be empty")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ConfigError("algorithms must be unique")
        if not 1 <= self.tail_window <= self.iterations:
            raise ConfigError(
                f"tail_window must lie in [1, {self.iterations}], got {self.tail_window}"
            )
        hyper = dict(self.hyper)
        schedules = dict(self.schedules)
        for algo in self.algorithms:
            hyper.setdefault(algo, default_hyper(algo))
            if algo.is_variable_p:
                schedules.setdefault(algo, default_schedule(algo))
        object.__setattr__(self, "hyper", hyper)
        object.__setattr__(self, "schedules", schedules)

    @property
    def iterations(self) -> int:
        """Loop length: one step per full regressor window."""
        return self.signal_length - self.num_taps + 1


@dataclass(frozen=True)
class SummaryRecord:
    algo: AlgoKind
    num_nonzero: int
    num_taps: int
    sparsity_ratio: float
    steady_state_msd: float
    final_mean_p: float | None
    num_runs: int
    config_fingerprint: str


@dataclass(frozen=True)
class MonteCarloResult:
    """Ensemble traces keyed by sparsity level then algorithm."""

    ensembles: dict
    summaries: list
    config: ExperimentConfig
    fingerprint: str


# ---------------------------------------------------------------------------
# serialization / fingerprint

def _penalty_dict(p: PenaltyParams | None):
    if p is None:
        return None
    d = {"rho": p.rho, "epsilon": p.epsilon, "p": p.p, "zero_floor": p.zero_floor}
    if p.newton is not None:
        d["newton"] = {
            "delta_n": p.newton.delta_n,
            "iterations": p.newton.iterations,
            "initial_guess": p.newton.initial_guess,
        }
    return d


def _schedule_dict(s: DeltaSchedule | None):
    if s is None:
        return None
    if s.kind is ScheduleKind.LINEAR_DECAY:
        return {"kind": "linear", "delta0": s.delta0, "u": s.u}
    return {"kind": "piecewise", "pieces": [[int(i), float(v)] for i, v in s.pieces]}


def config_to_dict(config: ExperimentConfig) -> dict:
    """Plain-data view of the resolved configuration."""
    return {
        "num_taps": config.num_taps,
        "sparsity_levels": list(config.sparsity_levels),
        "signal_length": config.signal_length,
        "snr_db": config.snr_db,
        "input_variance": config.input_variance,
        "num_runs": config.num_runs,
        "base_seed": config.base_seed,
        "algorithms": [a.value for a in config.algorithms],
        "tail_window": config.tail_window,
        "out_dir": config.out_dir,
        "hyper": {
            a.value: {
                "mu": h.mu,
                "penalty": _penalty_dict(h.penalty),
                "T": h.T,
                "p_min": h.p_min,
                "p0": h.p0,
                "warmup": h.warmup,
            }
            for a, h in ((a, config.hyper[a]) for a in config.algorithms)
        },
        "schedules": {
            a.value: _schedule_dict(config.schedules.get(a))
            for a in config.algorithms
            if a.is_variable_p
        },
    }


def config_fingerprint(config: ExperimentConfig) -> str:
    """sha256 over the canonical JSON of the resolved configuration."""
    payload = json.dumps(config_to_dict(config), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()


# ---------------------------------------------------------------------------
# config file / CLI overrides

_EXPERIMENT_KEYS = {
    "taps": ("num_taps", int),
    "nonzero": ("sparsity_levels", "int_list"),
    "iters": ("signal_length", int),
    "snr_db": ("snr_db", float),
    "input_variance": ("input_variance", float),
    "runs": ("num_runs", int),
    "seed": ("base_seed", int),
    "tail_window": ("tail_window", int),
    "algos": ("algorithms", "algo_list"),
    "out_dir": ("out_dir", str),
}

_ALGO_KEYS = {"mu", "rho", "epsilon", "p", "p0", "T", "p_min", "warmup", "zero_floor", "delta"}


def _parse_int_list(raw: str) -> tuple[int, ...]:
    parts = [p for chunk in raw.split(",") for p in chunk.split()]
    return tuple(int(p) for p in parts)


def parse_algo(name: str) -> AlgoKind:
    try:
        return AlgoKind(name.strip().lower())
    except ValueError:
        valid = ", ".join(a.value for a in AlgoKind)
        raise ConfigError(f"unknown algorithm {name!r}; valid: {valid}") from None


def _parse_algo_list(raw: str) -> tuple[AlgoKind, ...]:
    parts = [p for chunk in raw.split(",") for p in chunk.split()]
    return tuple(parse_algo(p) for p in parts)


def parse_schedule(raw: str) -> DeltaSchedule:
    """Schedule syntax: ``linear <delta0> <u>`` or
    ``piecewise <start>:<delta> [<start>:<delta> ...]``."""
    parts = raw.replace(",", " ").split()
    if not parts:
        raise ConfigError("delta: empty schedule")
    kind, args = parts[0].lower(), parts[1:]
    if kind == "linear":
        if len(args) != 2:
            raise ConfigError(f"delta: linear schedule needs '<delta0> <u>', got {raw!r}")
        return DeltaSchedule.linear(float(args[0]), float(args[1]))
    if kind == "piecewise":
        if not args:
            raise ConfigError("delta: piecewise schedule needs at least one start:value pair")
        pieces = []
        for a in args:
            try:
                start, value = a.split(":")
                pieces.append((int(start), float(value)))
            except ValueError:
                raise ConfigError(f"delta: bad piece {a!r}, expected start:value") from None
        return DeltaSchedule.piecewise(pieces)
    raise ConfigError(f"delta: unknown schedule kind {kind!r}")


def _apply_algo_section(algo: AlgoKind, items: Mapping[str, str],
                        hyper: dict, schedules: dict) -> None:
    h = hyper.get(algo, default_hyper(algo))
    pen = h.penalty
    pen_fields = {}
    hyper_fields = {}
    for key, raw in items.items():
        if key not in _ALGO_KEYS:
            raise ConfigError(f"unknown key {key!r} in section [algo.{algo.value}]")
        if key == "delta":
            if not algo.is_variable_p:
                raise ConfigError(f"delta schedule given for fixed-p algorithm {algo.value}")
            schedules[algo] = parse_schedule(raw)
        elif key in ("rho", "epsilon", "p", "zero_floor"):
            pen_fields[key] = float(raw)
        elif key == "mu":
            hyper_fields["mu"] = float(raw)
        elif key == "T":
            hyper_fields["T"] = int(raw)
        elif key == "warmup":
            hyper_fields["warmup"] = int(raw)
        else:  # p0, p_min
            hyper_fields[key] = float(raw)
    if pen_fields:
        if pen is None:
            pen = PenaltyParams(
                rho=pen_fields.get("rho", 5e-4),
                epsilon=pen_fields.get("epsilon", 5e-2),
                p=pen_fields.get("p", 0.5),
                zero_floor=pen_fields.get("zero_floor", 1e-12),
            )
        else:
            pen = replace(pen, **pen_fields)
        hyper_fields["penalty"] = pen
    if hyper_fields:
        h = replace(h, **hyper_fields)
    hyper[algo] = h


def parse_config(path: str | None = None,
                 overrides: Mapping[str, object] | None = None) -> ExperimentConfig:
    """Resolve a configuration from an optional INI file plus overrides.

    The file carries an ``[experiment]`` section and optional
    ``[algo.<name>]`` sections; overrides (CLI flags) use the same keys
    as the ``[experiment]`` section and win over file values. Unknown
    keys and invariant violations raise :class:`ConfigError` naming the
    offender.
    """
    fields: dict = {}
    hyper: dict = {}
    schedules: dict = {}

    if path is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        read = parser.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path!r}")
        for section in parser.sections():
            if section == "experiment":
                for key, raw in parser.items(section):
                    if key not in _EXPERIMENT_KEYS:
                        raise ConfigError(f"unknown key {key!r} in section [experiment]")
                    name, conv = _EXPERIMENT_KEYS[key]
                    if conv == "int_list":
                        fields[name] = _parse_int_list(raw)
                    elif conv == "algo_list":
                        fields[name] = _parse_algo_list(raw)
                    else:
                        fields[name] = conv(raw)
            elif section.startswith("algo."):
                algo = parse_algo(section[len("algo."):])
                _apply_algo_section(algo, dict(parser.items(section)), hyper, schedules)
            else:
                raise ConfigError(f"unknown config section [{section}]")

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _EXPERIMENT_KEYS:
            raise ConfigError(f"unknown configuration key {key!r}")
        name, conv = _EXPERIMENT_KEYS[key]
        if conv == "int_list":
            value = tuple(int(v) for v in value) if not isinstance(value, str) \
                else _parse_int_list(value)
        elif conv == "algo_list":
            value = _parse_algo_list(value) if isinstance(value, str) \
                else tuple(parse_algo(v) if isinstance(v, str) else v for v in value)
        else:
            value = conv(value)
        fields[name] = value

    try:
        return ExperimentConfig(hyper=hyper, schedules=schedules, **fields)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# execution

def run_seed_for(config: ExperimentConfig, num_nonzero: int, run_index: int) -> int:
    """Deterministic per-run seed mixing (base_seed, sparsity, run index)."""
    ss = np.random.SeedSequence([config.base_seed, num_nonzero, run_index])
    return int(ss.generate_state(1, np.uint64)[0])


def _trace_one(algo, hyper, schedule, X, y, w_true, run_seed) -> RunTrace:
    iters = X.shape[0]
    num_taps = X.shape[1]
    state = new_state(algo, num_taps, hyper, schedule)
    msd = np.empty(iters)
    record_p = algo.is_variable_p
    p_trace = np.empty(iters) if record_p else np.empty(0)
    for i in range(iters):
        x = X[i]
        if algo.is_variable_p:
            if i + 1 < iters:
                vp_step(state, algo, x, y[i], X[i + 1], y[i + 1],
                        hyper, schedule, w_true=w_true)
            else:
                vp_step(state, algo, x, y[i], None, None,
                        hyper, schedule, w_true=w_true)
        else:
            e = predict_error(state, x, y[i])
            if algo is AlgoKind.LMS:
                lms_step(state, x, e, hyper.mu)
            elif algo is AlgoKind.LP_LMS:
                lp_lms_step(state, x, e, hyper)
            else:
                lpl_lms_step(state, x, e, hyper)
        msd[i] = squared_deviation(w_true, state.w_est)
        if record_p:
            p_trace[i] = state.p
    return RunTrace(algo=algo, msd_per_iteration=msd, p_per_iteration=p_trace,
                    run_seed=run_seed)


def run_single(config: ExperimentConfig, num_nonzero: int, run_index: int) -> list[RunTrace]:
    """Execute one Monte-Carlo run: one fresh sparse system, one input
    and one noise stream, every configured algorithm on those same
    streams. Returns one trace per algorithm, in configuration order.
    """
    seed = run_seed_for(config, num_nonzero, run_index)
    rng = np.random.default_rng(seed)
    spec = SparseSystemSpec(
        num_taps=config.num_taps, num_nonzero=num_nonzero, seed=seed
    )
    weights = generate_sparse_weights(spec, rng)
    x_stream = generate_white_gaussian(config.signal_length, config.input_variance, rng)
    noise_var = snr_to_noise_variance(config.snr_db, config.input_variance)
    n_stream = generate_white_gaussian(config.signal_length, noise_var, rng)

    X = regressor_matrix(x_stream, config.num_taps)
    y = X @ weights.coefficients + n_stream.samples[config.num_taps - 1 :]

    traces = []
    for algo in config.algorithms:
        traces.append(
            _trace_one(algo, config.hyper[algo], config.schedules.get(algo),
                       X, y, weights.coefficients, seed)
        )
    return traces


def run_monte_carlo(config: ExperimentConfig, workers: int = 1) -> MonteCarloResult:
    """All runs for all sparsity levels; ensemble means and summaries.

    Runs may execute on parallel workers; results are reduced in run
    order, so the output does not depend on the worker count.
    """
    fingerprint = config_fingerprint(config)
    ensembles: dict = {}
    summaries: list[SummaryRecord] = []
    for s in config.sparsity_levels:
        t0 = time.perf_counter()
        per_run: list[list[RunTrace]] = [None] * config.num_runs  # type: ignore
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {
                    pool.submit(run_single, config, s, idx): idx
                    for idx in range(config.num_runs)
                }
                for fut, idx in futures.items():
                    try:
                        per_run[idx] = fut.result()
                    except Exception as exc:
                        raise RuntimeError(
                            f"Monte-Carlo run failed at sparsity={s}, run_index={idx}"
                        ) from exc
        else:
            for idx in range(config.num_runs):
                try:
                    per_run[idx] = run_single(config, s, idx)
                except Exception as exc:
                    raise RuntimeError(
                        f"Monte-Carlo run failed at sparsity={s}, run_index={idx}"
                    ) from exc

        level: dict = {}
        for j, algo in enumerate(config.algorithms):
            ens = ensemble_average([per_run[i][j] for i in range(config.num_runs)])
            level[algo] = ens
            final_p = float(ens.mean_p[-1]) if ens.mean_p.size else None
            summaries.append(
                SummaryRecord(
                    algo=algo,
                    num_nonzero=s,
                    num_taps=config.num_taps,
                    sparsity_ratio=s / config.num_taps,
                    steady_state_msd=steady_state_msd(ens, config.tail_window),
                    final_mean_p=final_p,
                    num_runs=config.num_runs,
                    config_fingerprint=fingerprint,
                )
            )
        ensembles[s] = level
        log.info(
            "sparsity %d/%d: %d runs x %d algorithms in %.1fs",
            s, config.num_taps, config.num_runs, len(config.algorithms),
            time.perf_counter() - t0,
        )
    return MonteCarloResult(
        ensembles=ensembles, summaries=summaries, config=config, fingerprint=fingerprint
    )


# ---------------------------------------------------------------------------
# emission

def _fmt(v: float) -> str:
    return format(v, ".17g")


def write_traces_csv(ensembles: Mapping[AlgoKind, EnsembleTrace], path) -> None:
    """One sparsity level's ensemble traces as CSV.

    Columns: ``iteration``, ``msd_<algo>`` per algorithm, then
    ``p_<algo>`` per variable-p algorithm. Values use 17 significant
    digits so reruns round-trip bit-faithfully.
    """
    if not ensembles:
        raise ValueError("no ensembles to write")
    algos = list(ensembles)
    n = ensembles[algos[0]].mean_msd.size
    if any(ensembles[a].mean_msd.size != n for a in algos):
        raise ValueError("ensemble traces must share one length")
    vp_algos = [a for a in algos if ensembles[a].mean_p.size]
    header = ["iteration"] + [f"msd_{a.value}" for a in algos] + [f"p_{a.value}" for a in vp_algos]
    lines = [",".join(header)]
    for i in range(n):
        row = [str(i + 1)]
        row += [_fmt(float(ensembles[a].mean_msd[i])) for a in algos]
        row += [_fmt(float(ensembles[a].mean_p[i])) for a in vp_algos]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary(records: list[SummaryRecord], path) -> None:
    """Machine-readable summary, one record per (algorithm, sparsity)."""
    if not records:
        raise ValueError("no summary records to write")
    payload = {
        "records": [
            {
                "algo": r.algo.value,
                "num_nonzero": r.num_nonzero,
                "num_taps": r.num_taps,
                "sparsity_ratio": r.sparsity_ratio,
                "steady_state_msd": r.steady_state_msd,
                "final_mean_p": r.final_mean_p,
                "num_runs": r.num_runs,
                "config_fingerprint": r.config_fingerprint,
            }
            for r in records
        ]
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def write_resolved_config(config: ExperimentConfig, path) -> None:
    """The resolved configuration with its fingerprint, as JSON metadata."""
    payload = {
        "fingerprint": config_fingerprint(config),
        "config": config_to_dict(config),
        "notes": {
            "true_system": "support and nonzero values are redrawn for every run",
            "run_seed": "mix(base_seed, sparsity, run_index) via SeedSequence",
            "iterations": config.iterations,
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def run_experiment(config: ExperimentConfig, workers: int = 1,
                   figures: bool = True) -> dict:
    """Run the Monte-Carlo suite and write every output file.

    Returns the written paths keyed by kind. Figure rendering accompanies
    the CSVs unless ``figures`` is False.
    """
    result = run_monte_carlo(config, workers=workers)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    paths: dict = {"traces": {}, "figures": []}
    for s, level in result.ensembles.items():
        csv_path = out / f"traces_s{s}.csv"
        write_traces_csv(level, csv_path)
        paths["traces"][s] = str(csv_path)

    summary_path = out / "summary.json"
    write_summary(result.summaries, summary_path)
    paths["summary"] = str(summary_path)

    config_path = out / "config.json"
    write_resolved_config(config, config_path)
    paths["config"] = str(config_path)

    if figures:
        from . import plotting

        paths["figures"] = plotting.render_figures(result, out)
    return paths
