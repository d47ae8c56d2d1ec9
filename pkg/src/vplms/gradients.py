"""Derivatives of the attractor terms with respect to the norm order p.

The closed forms below come from differentiating the attractors of
:mod:`vplms.attractors` analytically in p, holding the weight vector
fixed (only the most recent attractor application is differentiated).
With S = sum |w_i|^p, Sl = sum |w_i|^p ln|w_i| over unmasked entries,
L = ln||w||_p = ln(S)/p, t_i = |w_i|^(1-p) and D_i = eps + t_i:

* p-norm attractor:   dG_i/dp = ||w||_p^(1-p) sgn(w_i)
                                 * (C D_i / p + t_i ln|w_i|) / D_i^2
  where C = (1-p) Sl/S - L,
* p-norm-like:        dG_i/dp = sgn(w_i) (D_i + p t_i ln|w_i|) / D_i^2.

These feed the scalar gradients of the instantaneous squared error (SE)
and squared deviation (SD) with respect to p, given the update
w_next = w_prev + mu e x - rho G(w_prev, p):

* dSE/dp = 2 rho e_next (x_next . dG/dp),
* dSD/dp = 2 rho sum_i (w_true_i - w_next_i) dG_i/dp.

Every closed form here is validated against the central finite-difference
oracle :func:`fd_gradient_oracle`; the oracle is the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .attractors import PenaltyParams


@dataclass(frozen=True)
class GradContext:
    """State needed to assemble a scalar p-gradient.

    ``w_prev`` is the weight vector the attractor acted on (pre-update),
    ``e_next``/``x_next`` the error and regressor observed after the
    update. ``w_true`` and ``w_next`` are only needed for the
    squared-deviation gradient, which uses the true system and is an
    oracle/benchmark tool, not an identifiable quantity.
    """

    w_prev: np.ndarray
    e_next: float
    x_next: np.ndarray
    params: PenaltyParams
    w_true: np.ndarray | None = None
    w_next: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "w_prev", np.asarray(self.w_prev, float))
        object.__setattr__(self, "x_next", np.asarray(self.x_next, float))
        n = self.w_prev.size
        if self.x_next.size != n:
            raise ValueError(f"x_next has length {self.x_next.size}, expected {n}")
        for name in ("w_true", "w_next"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, float)
                object.__setattr__(self, name, v)
                if v.size != n:
                    raise ValueError(f"{name} has length {v.size}, expected {n}")


def d_lp_attractor_dp(w, params: PenaltyParams) -> np.ndarray:
    """Elementwise derivative in p of the p-norm attractor.

    Near-zero entries return 0, as does the all-(near-)zero vector.
    Always evaluated with exact powers; the Newton approximation applies
    to attractor values, not their derivatives.
    """
    w = np.asarray(w, float)
    aw = np.abs(w)
    mask = aw > params.zero_floor
    out = np.zeros_like(w)
    if not mask.any():
        return out
    a = aw[mask]
    p = params.p
    ap = a ** p
    s = float(ap.sum())
    if s ** (1.0 / p) <= params.zero_floor:
        return out
    log_a = np.log(a)
    norm_log = np.log(s) / p
    c = (1.0 - p) * float((ap * log_a).sum()) / s - norm_log
    t = a ** (1.0 - p)
    d = params.epsilon + t
    out[mask] = (
        s ** ((1.0 - p) / p) * np.sign(w[mask]) * (c * d / p + t * log_a) / (d * d)
    )
    return out


def d_pl_attractor_dp(w, params: PenaltyParams) -> np.ndarray:
    """Elementwise derivative in p of the p-norm-like attractor."""
    w = np.asarray(w, float)
    aw = np.abs(w)
    mask = aw > params.zero_floor
    out = np.zeros_like(w)
    if not mask.any():
        return out
    a = aw[mask]
    log_a = np.log(a)
    t = a ** (1.0 - params.p)
    d = params.epsilon + t
    out[mask] = np.sign(w[mask]) * (d + params.p * t * log_a) / (d * d)
    return out


def gse_gradient(ctx: GradContext, dgdp: np.ndarray) -> float:
    """Gradient of the instantaneous squared error with respect to p:
    2 rho e_next (x_next . dG/dp)."""
    dgdp = np.asarray(dgdp, float)
    if dgdp.size != ctx.x_next.size:
        raise ValueError(f"dgdp has length {dgdp.size}, expected {ctx.x_next.size}")
    return 2.0 * ctx.params.rho * ctx.e_next * float(ctx.x_next @ dgdp)


def gse_pl_gradient(ctx: GradContext, dgdp: np.ndarray) -> float:
    """Squared-error gradient for the p-norm-like penalty; same assembly
    as :func:`gse_gradient`, fed the p-norm-like attractor derivative."""
    return gse_gradient(ctx, dgdp)


def gsd_gradient(ctx: GradContext, dgdp: np.ndarray) -> float:
    """Gradient of the squared deviation ||w_true - w_next||^2 with
    respect to p: 2 rho sum_i (w_true_i - w_next_i) dG_i/dp.

    Needs the true weights; usable only as a benchmark oracle.
    """
    if ctx.w_true is None or ctx.w_next is None:
        raise ValueError("gsd_gradient needs both w_true and w_next in the context")
    dgdp = np.asarray(dgdp, float)
    if dgdp.size != ctx.w_true.size:
        raise ValueError(f"dgdp has length {dgdp.size}, expected {ctx.w_true.size}")
    return 2.0 * ctx.params.rho * float((ctx.w_true - ctx.w_next) @ dgdp)


def fd_gradient_oracle(f: Callable[[float], float], p: float, h: float) -> float:
    """Central finite difference (f(p+h) - f(p-h)) / (2h).

    Independent reference for every closed-form gradient in this module;
    p +- h must stay inside (0, 1).
    """
    if not (0.0 < p - h and p + h < 1.0):
        raise ValueError(f"p +- h must stay inside (0, 1); got p={p}, h={h}")
    return (f(p + h) - f(p - h)) / (2.0 * h)
