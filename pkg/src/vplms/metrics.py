"""Deviation metrics, ensemble averaging and the mean-misalignment
diagnostic recursion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attractors import PenaltyParams, lp_attractor, pl_attractor
from .filters import AlgoKind


@dataclass(frozen=True)
class RunTrace:
    """Per-iteration record of one algorithm in one Monte-Carlo run.

    ``p_per_iteration`` is empty for the fixed-p algorithms.
    """

    algo: AlgoKind
    msd_per_iteration: np.ndarray
    p_per_iteration: np.ndarray
    run_seed: int

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "msd_per_iteration", np.asarray(self.msd_per_iteration, float)
        )
        object.__setattr__(
            self, "p_per_iteration", np.asarray(self.p_per_iteration, float)
        )


@dataclass(frozen=True)
class EnsembleTrace:
    """Pointwise mean over the runs of one algorithm."""

    mean_msd: np.ndarray
    mean_p: np.ndarray
    num_runs: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean_msd", np.asarray(self.mean_msd, float))
        object.__setattr__(self, "mean_p", np.asarray(self.mean_p, float))
        if self.num_runs < 1:
            raise ValueError(f"num_runs must be >= 1, got {self.num_runs}")


def squared_deviation(w_true, w_est) -> float:
    """sum_i (w_true_i - w_est_i)^2."""
    a = np.asarray(w_true, float)
    b = np.asarray(w_est, float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(d @ d)


def ensemble_average(traces: list[RunTrace]) -> EnsembleTrace:
    """Pointwise arithmetic mean of MSD (and p) sequences across runs.

    All traces must belong to the same algorithm and share lengths.
    """
    if not traces:
        raise ValueError("cannot average an empty trace list")
    algo = traces[0].algo
    if any(t.algo is not algo for t in traces):
        raise ValueError("all traces must come from the same algorithm")
    n = traces[0].msd_per_iteration.size
    if any(t.msd_per_iteration.size != n for t in traces):
        raise ValueError("all traces must share the same length")
    np_ = traces[0].p_per_iteration.size
    if any(t.p_per_iteration.size != np_ for t in traces):
        raise ValueError("all traces must share the same p-trace length")
    mean_msd = np.mean(np.stack([t.msd_per_iteration for t in traces]), axis=0)
    if np_:
        mean_p = np.mean(np.stack([t.p_per_iteration for t in traces]), axis=0)
    else:
        mean_p = np.empty(0)
    return EnsembleTrace(mean_msd=mean_msd, mean_p=mean_p, num_runs=len(traces))


def steady_state_msd(trace: EnsembleTrace, tail_window: int) -> float:
    """Mean of the last ``tail_window`` ensemble-MSD values."""
    n = trace.mean_msd.size
    if not 1 <= tail_window <= n:
        raise ValueError(f"tail_window must lie in [1, {n}], got {tail_window}")
    return float(trace.mean_msd[-tail_window:].mean())


def lms_msd_prediction(mu: float, noise_variance: float, num_taps: int,
                       input_variance: float = 1.0) -> float:
    """Classical white-input steady-state MSD of plain LMS,
    mu sigma_n^2 N / (2 - mu N sigma_x^2); an independent sanity oracle."""
    return mu * noise_variance * num_taps / (2.0 - mu * num_taps * input_variance)


def mean_misalignment_step(
    v_mean: np.ndarray,
    R: np.ndarray,
    mu: float,
    penalty: PenaltyParams,
    w_snapshot: np.ndarray,
    kind: str,
) -> np.ndarray:
    """One step of the mean-misalignment recursion
    (I - mu R) v - rho G(w_snapshot), with G the attractor selected by
    ``kind`` ("lp" or "pl").

    A diagnostic companion to the empirical ensemble mean of w_k - w;
    the attractor is evaluated at a caller-supplied weight snapshot.
    """
    v = np.asarray(v_mean, float)
    R = np.asarray(R, float)
    w = np.asarray(w_snapshot, float)
    if R.shape != (v.size, v.size):
        raise ValueError(f"R has shape {R.shape}, expected {(v.size, v.size)}")
    if w.size != v.size:
        raise ValueError(f"w_snapshot has length {w.size}, expected {v.size}")
    if kind == "lp":
        g = lp_attractor(w, penalty)
    elif kind == "pl":
        g = pl_attractor(w, penalty)
    else:
        raise ValueError(f"kind must be 'lp' or 'pl', got {kind!r}")
    return (np.eye(v.size) - mu * R) @ v - penalty.rho * g
