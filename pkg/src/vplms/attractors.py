"""Zero-attractor terms of the sparsity penalties.

Two penalty families are supported, both parameterized by a norm order
p in (0, 1]:

* the p-norm penalty ||w||_p = (sum |w_i|^p)^(1/p), whose regularized
  gradient is the attractor
  G_i = ||w||_p^(1-p) * sgn(w_i) / (eps + |w_i|^(1-p)), and
* the p-norm-like penalty sum |w_i|^p, whose attractor is
  G_i = p * sgn(w_i) / (eps + |w_i|^(1-p)).

Filters subtract rho * G from the weight update. Magnitudes at or below
``zero_floor`` contribute nothing anywhere, which keeps every power and
logarithm downstream finite from the all-zero start state.

The fractional powers inside the attractors can optionally be replaced by
a fixed number of Newton iterations (:func:`newton_pow`), the cheap
approximation used when decimal exponentials are to be avoided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_ZERO_FLOOR = 1e-12


@dataclass(frozen=True)
class NewtonPowConfig:
    """Settings for the Newton-iteration power approximation.

    ``delta_n`` is the exponent-splitting step of the iteration (None
    selects the exponent itself, which makes the inner constant an exact
    integer power). ``initial_guess`` seeds the iteration; None selects a
    rational first guess accurate over wide magnitude ranges, while the
    default 1.0 reproduces the plain iteration.
    """

    delta_n: float | None = None
    iterations: int = 4
    initial_guess: float | None = 1.0

    def __post_init__(self) -> None:
        if self.delta_n is not None and self.delta_n <= 0:
            raise ValueError(f"delta_n must be > 0, got {self.delta_n}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.initial_guess is not None and self.initial_guess <= 0:
            raise ValueError(f"initial_guess must be > 0, got {self.initial_guess}")


@dataclass(frozen=True)
class PenaltyParams:
    """Strength and shape of a zero-attracting penalty.

    ``rho`` is the attractor strength applied by the filter (step size
    times penalty weight), ``epsilon`` regularizes the denominator near
    zero, ``p`` is the norm order. When ``newton`` is set, attractor
    evaluations route every fractional power through the Newton
    approximation instead of exact exponentials.
    """

    rho: float
    epsilon: float
    p: float
    zero_floor: float = DEFAULT_ZERO_FLOOR
    newton: NewtonPowConfig | None = None

    def __post_init__(self) -> None:
        if self.rho < 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if self.zero_floor <= 0:
            raise ValueError(f"zero_floor must be > 0, got {self.zero_floor}")


def sign(x):
    """Sign function: -1 for x < 0, 0 for x = 0, +1 for x > 0; elementwise."""
    return np.sign(x)


def lp_norm(w, p: float, zero_floor: float = DEFAULT_ZERO_FLOOR) -> float:
    """(sum |w_i|^p)^(1/p) with near-zero entries masked out; 0 for the
    all-(near-)zero vector."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    aw = np.abs(np.asarray(w, float))
    m = aw > zero_floor
    if not m.any():
        return 0.0
    return float(np.sum(aw[m] ** p) ** (1.0 / p))


def rational_power_seed(base, exponent: float):
    """First guess for base**exponent: the (1,1) rational approximant
    around base = 1, (1 + (1+e)/2 (b-1)) / (1 + (1-e)/2 (b-1)).

    Uses one division and no transcendentals; positive for all b > 0 and
    e in [0, 1], and close enough to the true power for the Newton
    iteration to enter its quadratic regime immediately.
    """
    b = np.asarray(base, float)
    out = (1.0 + 0.5 * (1.0 + exponent) * (b - 1.0)) / (
        1.0 + 0.5 * (1.0 - exponent) * (b - 1.0)
    )
    return out if isinstance(base, np.ndarray) else float(out)


def _newton_pow_iterate(base, exponent, delta, iterations, guess, zero_floor):
    """Run g <- g - delta*(g^(1/delta) - c)/g^(1/delta - 1) with
    c = base^(exponent/delta); floors g at zero_floor each step.

    Overflow is left to produce inf/nan for the caller's finiteness
    check rather than raising mid-iteration.
    """
    base = np.float64(base) if np.isscalar(base) else base
    g = np.float64(guess) if np.isscalar(guess) else guess
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        c = base ** (exponent / delta)
        inv = 1.0 / delta
        for _ in range(iterations):
            g = g - delta * (g ** inv - c) / g ** (inv - 1.0)
            g = np.maximum(g, zero_floor)
    return g


def newton_pow(
    base_magnitude: float,
    exponent: float,
    cfg: NewtonPowConfig | None = None,
    zero_floor: float = DEFAULT_ZERO_FLOOR,
) -> float:
    """Approximate base_magnitude**exponent by Newton iterations on
    g^(1/delta) = base^(exponent/delta).

    ``base_magnitude`` must exceed ``zero_floor`` (callers route exact
    zeros around the power entirely); ``exponent`` lies in [0, 1).
    Raises FloatingPointError if the iterate leaves the finite range.
    """
    if cfg is None:
        cfg = NewtonPowConfig()
    if base_magnitude <= zero_floor:
        raise ValueError(
            f"base_magnitude must exceed zero_floor={zero_floor}, got {base_magnitude}"
        )
    if not 0.0 <= exponent < 1.0:
        raise ValueError(f"exponent must lie in [0, 1), got {exponent}")
    if exponent == 0.0:
        return 1.0
    delta = cfg.delta_n if cfg.delta_n is not None else exponent
    guess = (
        cfg.initial_guess
        if cfg.initial_guess is not None
        else rational_power_seed(base_magnitude, exponent)
    )
    g = _newton_pow_iterate(
        float(base_magnitude), exponent, delta, cfg.iterations, float(guess), zero_floor
    )
    if not np.isfinite(g):
        raise FloatingPointError(
            f"newton_pow diverged for base={base_magnitude}, exponent={exponent}"
        )
    return float(g)


def _frac_pow(a: np.ndarray, exponent: float, params: PenaltyParams) -> np.ndarray:
    """a**exponent for positive a and exponent in [0, 1], honoring the
    penalty's newton mode."""
    if exponent <= 0.0:
        return np.ones_like(a)
    if exponent >= 1.0:
        return a
    cfg = params.newton
    if cfg is None:
        return a ** exponent
    delta = cfg.delta_n if cfg.delta_n is not None else exponent
    guess = (
        np.full_like(a, cfg.initial_guess)
        if cfg.initial_guess is not None
        else rational_power_seed(a, exponent)
    )
    g = _newton_pow_iterate(a, exponent, delta, cfg.iterations, guess, params.zero_floor)
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("newton power iteration diverged")
    return g


def _pos_pow_scalar(s: float, q: float, params: PenaltyParams) -> float:
    """s**q for s > 0, q >= 0: integer part exact, fractional part per
    the penalty's power mode."""
    n = int(np.floor(q))
    frac = q - n
    out = s ** n
    if frac > 0.0:
        out *= float(_frac_pow(np.asarray([s]), frac, params)[0])
    return out


def lp_attractor(w, params: PenaltyParams) -> np.ndarray:
    """Attractor of the p-norm penalty:
    G_i = ||w||_p^(1-p) * sgn(w_i) / (eps + |w_i|^(1-p)).

    Entries with |w_i| <= zero_floor give 0; the all-(near-)zero vector
    gives the zero vector. The caller applies rho.
    """
    w = np.asarray(w, float)
    aw = np.abs(w)
    mask = aw > params.zero_floor
    G = np.zeros_like(w)
    if not mask.any():
        return G
    a = aw[mask]
    p = params.p
    s = float(np.sum(_frac_pow(a, p, params)))
    if s <= params.zero_floor:
        return G
    norm_pow = _pos_pow_scalar(s, (1.0 - p) / p, params)  # ||w||_p^(1-p)
    t = _frac_pow(a, 1.0 - p, params)
    G[mask] = norm_pow * np.sign(w[mask]) / (params.epsilon + t)
    return G


def pl_attractor(w, params: PenaltyParams) -> np.ndarray:
    """Attractor of the p-norm-like penalty:
    G_i = p * sgn(w_i) / (eps + |w_i|^(1-p)).

    Bounded by p/eps in magnitude; near-zero entries give 0.
    """
    w = np.asarray(w, float)
    aw = np.abs(w)
    mask = aw > params.zero_floor
    G = np.zeros_like(w)
    if not mask.any():
        return G
    t = _frac_pow(aw[mask], 1.0 - params.p, params)
    G[mask] = params.p * np.sign(w[mask]) / (params.epsilon + t)
    return G
