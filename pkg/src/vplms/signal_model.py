"""Sparse FIR system model and seeded signal generation.

Provides the ground-truth sparse impulse responses, white Gaussian
input/noise streams and the observed output y_k = w.x_k + n_k used by the
identification experiments. All generators are deterministic given a seed;
Monte-Carlo runs own independent substreams (see :mod:`vplms.experiment`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SparseSystemSpec:
    """Recipe for a random sparse FIR system.

    Parameters
    ----------
    num_taps : int
        Total filter length N.
    num_nonzero : int
        Number S of nonzero taps, 1 <= S <= N.
    coeff_mean, coeff_variance : float
        Gaussian law of the nonzero tap values.
    seed : int
        Fallback seed when no generator is supplied to
        :func:`generate_sparse_weights`.
    """

    num_taps: int
    num_nonzero: int
    coeff_mean: float = 0.0
    coeff_variance: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_taps < 1:
            raise ValueError(f"num_taps must be >= 1, got {self.num_taps}")
        if not 1 <= self.num_nonzero <= self.num_taps:
            raise ValueError(
                f"num_nonzero must lie in [1, {self.num_taps}], got {self.num_nonzero}"
            )
        if self.coeff_variance <= 0:
            raise ValueError(f"coeff_variance must be > 0, got {self.coeff_variance}")


@dataclass(frozen=True)
class TrueWeights:
    """A sparse impulse response together with its support set."""

    coefficients: np.ndarray
    support: np.ndarray  # sorted 0-based indices of the nonzero taps

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, float))
        object.__setattr__(self, "support", np.asarray(self.support, int))

    @property
    def num_taps(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True)
class SignalStream:
    """A finite stream of real samples with a nominal variance."""

    samples: np.ndarray
    variance: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", np.asarray(self.samples, float))
        if self.variance <= 0:
            raise ValueError(f"variance must be > 0, got {self.variance}")

    def __len__(self) -> int:
        return self.samples.size


def generate_sparse_weights(
    spec: SparseSystemSpec, rng: np.random.Generator | None = None
) -> TrueWeights:
    """Draw a sparse system: S support positions uniformly without
    replacement, values i.i.d. Gaussian.

    Exact zeros are redrawn so the support invariant holds exactly.
    Deterministic given ``rng`` (or ``spec.seed`` when ``rng`` is None).
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    support = np.sort(rng.choice(spec.num_taps, size=spec.num_nonzero, replace=False))
    sigma = float(np.sqrt(spec.coeff_variance))
    values = spec.coeff_mean + sigma * rng.standard_normal(spec.num_nonzero)
    while np.any(values == 0.0):  # probability-zero guard
        redo = values == 0.0
        values[redo] = spec.coeff_mean + sigma * rng.standard_normal(int(redo.sum()))
    coeffs = np.zeros(spec.num_taps)
    coeffs[support] = values
    return TrueWeights(coefficients=coeffs, support=support)


def generate_white_gaussian(
    length: int, variance: float, rng: np.random.Generator
) -> SignalStream:
    """Zero-mean i.i.d. Gaussian stream of the given length and variance."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if variance <= 0:
        raise ValueError(f"variance must be > 0, got {variance}")
    samples = np.sqrt(variance) * rng.standard_normal(length)
    return SignalStream(samples=samples, variance=float(variance))


def snr_to_noise_variance(snr_db: float, signal_variance: float) -> float:
    """Noise variance that realizes the given SNR against ``signal_variance``."""
    if signal_variance <= 0:
        raise ValueError(f"signal_variance must be > 0, got {signal_variance}")
    return signal_variance / 10.0 ** (snr_db / 10.0)


def regressor(stream: SignalStream, k: int, num_taps: int) -> np.ndarray:
    """Tapped-delay-line window [x_k, x_{k-1}, ..., x_{k-N+1}].

    ``k`` is the 1-based time index; only full windows are served, so
    num_taps <= k <= len(stream). No zero padding.
    """
    length = len(stream)
    if k < num_taps or k > length:
        raise ValueError(
            f"no full window at k={k} for num_taps={num_taps}, stream length {length}"
        )
    return stream.samples[k - num_taps : k][::-1].copy()


def system_output(weights, regressor_vec: np.ndarray, noise_sample: float) -> float:
    """Observed output w.x + n for one time step.

    ``weights`` may be a :class:`TrueWeights` or a raw coefficient vector.
    """
    coeffs = np.asarray(getattr(weights, "coefficients", weights), float)
    x = np.asarray(regressor_vec, float)
    if coeffs.shape != x.shape:
        raise ValueError(f"dimension mismatch: weights {coeffs.shape} vs regressor {x.shape}")
    return float(coeffs @ x + noise_sample)


def regressor_matrix(stream: SignalStream, num_taps: int) -> np.ndarray:
    """All full regressor windows stacked row-wise.

    Row i holds the window at 1-based time k = num_taps + i, i.e.
    ``regressor(stream, num_taps + i, num_taps)``; there are
    len(stream) - num_taps + 1 rows.
    """
    if len(stream) < num_taps:
        raise ValueError(
            f"stream length {len(stream)} shorter than num_taps={num_taps}"
        )
    windows = np.lib.stride_tricks.sliding_window_view(stream.samples, num_taps)
    return windows[:, ::-1].copy()
