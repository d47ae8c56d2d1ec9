"""State machines for the LMS family with sparsity penalties.

Six algorithms share one step anatomy: error prediction, a gradient
weight update optionally carrying a zero-attractor term, and (for the
variable-p variants) a sign-smoothed stochastic update of the norm order
p driven by either the squared-error gradient or the squared-deviation
oracle gradient.

Steps rebind ``state.w_est`` to a fresh array rather than mutating in
place, so references taken before a step stay valid and states can be
handed between execution contexts. A state is owned by a single run;
distinct runs may proceed concurrently without coordination.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .attractors import PenaltyParams, lp_attractor, pl_attractor
from .gradients import (
    GradContext,
    d_lp_attractor_dp,
    d_pl_attractor_dp,
    gsd_gradient,
    gse_gradient,
    gse_pl_gradient,
)


class AlgoKind(Enum):
    """The supported adaptive-filter variants."""

    LMS = "lms"
    LP_LMS = "lp_lms"
    LPL_LMS = "lpl_lms"
    VP_GSE_LMS = "vp_gse_lms"
    VP_GSE_PL_LMS = "vp_gse_pl_lms"
    VP_GSD_LMS = "vp_gsd_lms"

    @property
    def is_variable_p(self) -> bool:
        return self in (
            AlgoKind.VP_GSE_LMS,
            AlgoKind.VP_GSE_PL_LMS,
            AlgoKind.VP_GSD_LMS,
        )

    @property
    def uses_pl_attractor(self) -> bool:
        return self in (AlgoKind.LPL_LMS, AlgoKind.VP_GSE_PL_LMS)

    @property
    def uses_attractor(self) -> bool:
        return self is not AlgoKind.LMS

    @property
    def needs_true_weights(self) -> bool:
        """The squared-deviation variant peeks at the true system."""
        return self is AlgoKind.VP_GSD_LMS

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    AlgoKind.LMS: "LMS",
    AlgoKind.LP_LMS: "Lp-LMS",
    AlgoKind.LPL_LMS: "Lpl-LMS",
    AlgoKind.VP_GSE_LMS: "VP-LMS (SE grad)",
    AlgoKind.VP_GSE_PL_LMS: "VP-Lpl-LMS (SE grad)",
    AlgoKind.VP_GSD_LMS: "VP-LMS (SD oracle)",
}


@dataclass(frozen=True)
class HyperParams:
    """Step sizes and variable-p machinery shared by the algorithms.

    ``penalty`` is None for plain LMS. ``T`` is the smoothing window of
    the p update, ``warmup`` the number of iterations before p may move
    (defaults to T, the first point at which the window is full), ``p0``
    the starting norm order for the variable-p variants and ``p_min`` the
    clamp floor keeping every power and logarithm finite.
    """

    mu: float
    penalty: PenaltyParams | None = None
    T: int = 5
    p_min: float = 0.05
    p0: float = 1.0
    warmup: int | None = None

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if not 0.0 < self.p_min < 1.0:
            raise ValueError(f"p_min must lie in (0, 1), got {self.p_min}")
        if not self.p_min < self.p0 <= 1.0:
            raise ValueError(
                f"p0 must lie in ({self.p_min}, 1], got {self.p0}"
            )
        if self.warmup is not None and self.warmup < 0:
            raise ValueError(f"warmup must be >= 0, got {self.warmup}")

    @property
    def effective_warmup(self) -> int:
        return self.T if self.warmup is None else self.warmup


class ScheduleKind(Enum):
    LINEAR_DECAY = "linear"
    PIECEWISE = "piecewise"


@dataclass(frozen=True)
class DeltaSchedule:
    """Plan for the p-update step size delta over the iterations.

    LINEAR_DECAY starts at ``delta0`` and loses ``u`` per iteration,
    clamped at 0. PIECEWISE holds the value of the last piece whose
    1-based start iteration has been reached (0 before the first piece).
    """

    kind: ScheduleKind
    u: float = 0.0
    delta0: float = 0.0
    pieces: tuple[tuple[int, float], ...] = ()

    def __post_init__(self) -> None:
        if self.u < 0:
            raise ValueError(f"u must be >= 0, got {self.u}")
        if self.delta0 < 0:
            raise ValueError(f"delta0 must be >= 0, got {self.delta0}")
        starts = [s for s, _ in self.pieces]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError(f"piece starts must be strictly increasing, got {starts}")
        if any(v < 0 for _, v in self.pieces):
            raise ValueError("piece delta values must be >= 0")

    @classmethod
    def linear(cls, delta0: float, u: float) -> "DeltaSchedule":
        return cls(kind=ScheduleKind.LINEAR_DECAY, u=u, delta0=delta0)

    @classmethod
    def piecewise(cls, pieces) -> "DeltaSchedule":
        return cls(kind=ScheduleKind.PIECEWISE, pieces=tuple(pieces))

    def initial_delta(self) -> float:
        if self.kind is ScheduleKind.LINEAR_DECAY:
            return self.delta0
        return delta_at(self, 1, 0.0)


def gse_default_schedule() -> DeltaSchedule:
    """Default plan for the squared-error-driven variants: 0.01, 0.005,
    0.003, 0.001 and 0 over successive 100-iteration blocks."""
    return DeltaSchedule.piecewise(
        [(1, 0.01), (101, 0.005), (201, 0.003), (301, 0.001), (401, 0.0)]
    )


def gsd_default_schedule() -> DeltaSchedule:
    """Default plan for the squared-deviation-driven variant: a 10-step
    hold at 0, then 0.05/0.03/0.02/0.01 over 20-step blocks, 0.005 up to
    200, 0.001 afterwards."""
    return DeltaSchedule.piecewise(
        [(1, 0.0), (11, 0.05), (31, 0.03), (51, 0.02), (71, 0.01), (91, 0.005), (201, 0.001)]
    )


def delta_at(schedule: DeltaSchedule, iteration: int, current_delta: float) -> float:
    """Delta value for the given 1-based iteration.

    LINEAR_DECAY decrements the running value; PIECEWISE looks the
    iteration up in the plan.
    """
    if schedule.kind is ScheduleKind.LINEAR_DECAY:
        return max(current_delta - schedule.u, 0.0)
    value = 0.0
    for start, d in schedule.pieces:
        if start <= iteration:
            value = d
        else:
            break
    return value


@dataclass
class FilterState:
    """Mutable per-run state: the estimate, the norm order and its
    adaptation machinery."""

    w_est: np.ndarray
    p: float
    delta: float = 0.0
    grad_history: deque = field(default_factory=lambda: deque(maxlen=5))
    iteration: int = 0


def new_state(
    algo: AlgoKind,
    num_taps: int,
    hyper: HyperParams,
    schedule: DeltaSchedule | None = None,
) -> FilterState:
    """Fresh all-zero state for one run of ``algo``."""
    if algo.is_variable_p:
        p = hyper.p0
    elif hyper.penalty is not None:
        p = hyper.penalty.p
    else:
        p = hyper.p0
    delta = schedule.initial_delta() if (algo.is_variable_p and schedule) else 0.0
    return FilterState(
        w_est=np.zeros(num_taps),
        p=p,
        delta=delta,
        grad_history=deque(maxlen=hyper.T),
    )


def predict_error(state: FilterState, regressor: np.ndarray, y: float) -> float:
    """Instantaneous error y - w_est.x; leaves the state untouched."""
    x = np.asarray(regressor, float)
    if x.size != state.w_est.size:
        raise ValueError(f"regressor has length {x.size}, expected {state.w_est.size}")
    return float(y - state.w_est @ x)


def lms_step(state: FilterState, regressor: np.ndarray, e: float, mu: float) -> FilterState:
    """Plain stochastic-gradient update w <- w + mu e x."""
    x = np.asarray(regressor, float)
    if x.size != state.w_est.size:
        raise ValueError(f"regressor has length {x.size}, expected {state.w_est.size}")
    state.w_est = state.w_est + mu * e * x
    state.iteration += 1
    return state


def _sparse_step(state, regressor, e, hyper, attractor) -> FilterState:
    if hyper.penalty is None:
        raise ValueError("sparse step needs penalty parameters")
    x = np.asarray(regressor, float)
    if x.size != state.w_est.size:
        raise ValueError(f"regressor has length {x.size}, expected {state.w_est.size}")
    g = attractor(state.w_est, hyper.penalty)  # at the pre-update weights
    state.w_est = state.w_est + hyper.mu * e * x - hyper.penalty.rho * g
    state.iteration += 1
    return state


def lp_lms_step(state: FilterState, regressor, e: float, hyper: HyperParams) -> FilterState:
    """LMS update minus rho times the p-norm attractor."""
    return _sparse_step(state, regressor, e, hyper, lp_attractor)


def lpl_lms_step(state: FilterState, regressor, e: float, hyper: HyperParams) -> FilterState:
    """LMS update minus rho times the p-norm-like attractor."""
    return _sparse_step(state, regressor, e, hyper, pl_attractor)


def update_p(
    state: FilterState,
    new_gradient: float,
    schedule: DeltaSchedule | None,
    hyper: HyperParams,
) -> FilterState:
    """Push a gradient sample and apply the sign-smoothed p update.

    p moves by -delta * sgn(mean of the last T gradients) once the
    window is full and the warmup has passed, clamped to [p_min, 1].
    The running delta then advances to its value for the next iteration.
    """
    state.grad_history.append(float(new_gradient))
    full = len(state.grad_history) == state.grad_history.maxlen
    if state.iteration >= hyper.effective_warmup and full:
        smoothed = sum(state.grad_history) / len(state.grad_history)
        direction = (smoothed > 0.0) - (smoothed < 0.0)
        if direction:
            state.p = min(1.0, max(hyper.p_min, state.p - state.delta * direction))
    if schedule is not None:
        state.delta = delta_at(schedule, state.iteration + 1, state.delta)
    return state


def vp_step(
    state: FilterState,
    algo: AlgoKind,
    regressor_k: np.ndarray,
    y_k: float,
    regressor_next: np.ndarray | None,
    y_next: float | None,
    hyper: HyperParams,
    schedule: DeltaSchedule | None,
    w_true: np.ndarray | None = None,
) -> FilterState:
    """One full iteration of a variable-p algorithm.

    Predicts the error, applies the matching sparse weight update at the
    current p, evaluates the post-update error on the next sample and
    feeds the matching p-gradient to :func:`update_p`. When no next
    sample exists (final iteration) the p update is skipped.
    """
    if not algo.is_variable_p:
        raise ValueError(f"vp_step drives variable-p algorithms, got {algo}")
    if algo.needs_true_weights and w_true is None:
        raise ValueError(f"{algo.value} needs the true weights (oracle mode)")
    if hyper.penalty is None:
        raise ValueError("variable-p algorithms need penalty parameters")

    params = replace(hyper.penalty, p=state.p)
    hyper_now = replace(hyper, penalty=params)
    e = predict_error(state, regressor_k, y_k)
    w_prev = state.w_est  # steps rebind, so this reference stays pre-update
    if algo.uses_pl_attractor:
        lpl_lms_step(state, regressor_k, e, hyper_now)
    else:
        lp_lms_step(state, regressor_k, e, hyper_now)

    if regressor_next is None or y_next is None:
        return state

    e_next = predict_error(state, regressor_next, y_next)
    if algo is AlgoKind.VP_GSE_LMS:
        dgdp = d_lp_attractor_dp(w_prev, params)
        ctx = GradContext(w_prev=w_prev, e_next=e_next, x_next=regressor_next, params=params)
        grad = gse_gradient(ctx, dgdp)
    elif algo is AlgoKind.VP_GSE_PL_LMS:
        dgdp = d_pl_attractor_dp(w_prev, params)
        ctx = GradContext(w_prev=w_prev, e_next=e_next, x_next=regressor_next, params=params)
        grad = gse_pl_gradient(ctx, dgdp)
    else:
        dgdp = d_lp_attractor_dp(w_prev, params)
        ctx = GradContext(
            w_prev=w_prev,
            e_next=e_next,
            x_next=regressor_next,
            params=params,
            w_true=w_true,
            w_next=state.w_est,
        )
        grad = gsd_gradient(ctx, dgdp)
    return update_p(state, grad, schedule, hyper)
