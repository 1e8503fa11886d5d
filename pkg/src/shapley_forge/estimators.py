"""Monte-Carlo estimators for correlations and for the index vector.

Sample counts follow additive Chernoff bounds so that with probability
1 - delta every coordinate lands within its share of an overall Euclidean
budget gamma: correlations get gamma/sqrt(n+1) per slot from m =
ceil(2 (n+1) ln(2(n+1)/delta) / gamma^2) draws, index estimates get
gamma/sqrt(n) per voter from m = ceil(8 n ln(2n/delta) / gamma^2) sampled
voter orders (each summand spans [-2, 2]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mu import mu_distribution, sample_mu_batch


@dataclass(frozen=True)
class EstimateConfig:
    gamma: float = 0.1
    delta: float = 0.01
    seed: int = 0
    max_samples: int | None = None

    def __post_init__(self) -> None:
        if not 0 < self.gamma:
            raise ValueError("gamma must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0,1)")


def correlation_sample_count(n: int, gamma: float, delta: float) -> int:
    return math.ceil(2 * (n + 1) * math.log(2 * (n + 1) / delta) / gamma**2)


def shapley_sample_count(n: int, gamma: float, delta: float) -> int:
    return math.ceil(8 * n * math.log(2 * n / delta) / gamma**2)


def _check_budget(m: int, cfg: EstimateConfig) -> None:
    if cfg.max_samples is not None and m > cfg.max_samples:
        raise ValueError(f"estimator needs {m} samples, over the configured cap {cfg.max_samples}")


_BATCH = 1 << 15


def estimate_correlations(fn, n: int, cfg: EstimateConfig) -> tuple[np.ndarray, int]:
    """Estimate (E[f], E[f x_1], ..., E[f x_n]) under the slice distribution."""
    m = correlation_sample_count(n, cfg.gamma, cfg.delta)
    _check_budget(m, cfg)
    rng = np.random.default_rng(cfg.seed)
    dist = mu_distribution(n)
    acc = np.zeros(n + 1)
    done = 0
    while done < m:
        b = min(_BATCH, m - done)
        X = sample_mu_batch(dist, b, rng)
        v = np.asarray(fn(X), dtype=np.float64)
        acc[0] += v.sum()
        acc[1:] += v @ X
        done += b
    return acc / m, m


def _order_sweep(fn, n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Sum of per-voter jumps over m sampled voter orders.

    Each order is swept once: the n+1 nested prefixes are evaluated in a
    batch and consecutive differences are credited to the voter that joined.
    Per-order totals telescope to f(all +1) - f(all -1) exactly.
    """
    acc = np.zeros(n)
    steps = np.arange(n + 1)[None, :, None]
    done = 0
    while done < m:
        b = min(_BATCH, m - done)
        P = np.argsort(rng.random((b, n)), axis=1)
        rank = np.argsort(P, axis=1)
        X = np.where(rank[:, None, :] < steps, 1, -1).astype(np.int8)
        V = np.asarray(fn(X.reshape(-1, n)), dtype=np.float64).reshape(b, n + 1)
        diffs = V[:, 1:] - V[:, :-1]
        acc += np.bincount(P.ravel(), weights=diffs.ravel(), minlength=n)
        done += b
    return acc


def estimate_shapley(fn, n: int, cfg: EstimateConfig) -> tuple[np.ndarray, int]:
    """Estimate the index vector from random voter orders."""
    m = shapley_sample_count(n, cfg.gamma, cfg.delta)
    _check_budget(m, cfg)
    rng = np.random.default_rng(cfg.seed)
    return _order_sweep(fn, n, m, rng) / m, m


def estimate_shapley_fixed(fn, n: int, m: int, seed: int = 0) -> np.ndarray:
    """Index estimate from a caller-chosen number of sampled orders."""
    if m < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    return _order_sweep(fn, n, m, rng) / m
