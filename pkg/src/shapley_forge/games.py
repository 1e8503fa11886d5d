"""Core game representations: voting games, quota games, bounded affine forms.

Conventions used throughout the package:

* inputs live in {-1,+1}^n; +1 means a yes-vote,
* an LTF evaluates sign(w.x - theta) with sign(0) = +1,
* an LBF evaluates clip(w.x - theta) to [-1, 1],
* batch evaluators take an (m, n) matrix of +-1 rows and return m values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def as_bits(x: "BitString | Sequence[int] | np.ndarray") -> np.ndarray:
    """Validate a +-1 vector and return it as an int8 array."""
    if isinstance(x, BitString):
        return x.bits
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError(f"bit string must be 1-dimensional, got shape {arr.shape}")
    if not np.all(np.abs(arr) == 1):
        raise ValueError("bit string entries must be exactly -1 or +1")
    return arr.astype(np.int8)


@dataclass(frozen=True)
class BitString:
    """A vector in {-1,+1}^n."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", as_bits(np.asarray(self.bits)))
        if self.bits.size == 0:
            raise ValueError("bit string must be non-empty")
        self.bits.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.bits.size)

    @property
    def wt(self) -> int:
        """Number of +1 entries."""
        return int(np.count_nonzero(self.bits == 1))


@dataclass(frozen=True)
class VotingGame:
    """Linear threshold function sign(w.x - theta), sign(0) = +1."""

    weights: np.ndarray
    threshold: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)) or not np.isfinite(self.threshold):
            raise ValueError("weights and threshold must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "threshold", float(self.threshold))
        w.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class QuotaGame:
    """Human-facing encoding: yes-set S passes iff sum of its weights >= quota."""

    int_weights: tuple[int, ...]
    quota: int

    def __post_init__(self) -> None:
        ws = tuple(int(w) for w in self.int_weights)
        if len(ws) < 1:
            raise ValueError("need at least one voter")
        if any(w < 0 for w in ws):
            raise ValueError("quota-game weights must be nonnegative integers")
        q = int(self.quota)
        if not 0 < q <= sum(ws):
            raise ValueError(f"quota must satisfy 0 < q <= total, got q={q} total={sum(ws)}")
        object.__setattr__(self, "int_weights", ws)
        object.__setattr__(self, "quota", q)

    @property
    def n(self) -> int:
        return len(self.int_weights)

    @property
    def total(self) -> int:
        return sum(self.int_weights)


@dataclass(frozen=True)
class LinearBoundedFunction:
    """Clipped affine form clip(w.x - theta, -1, 1)."""

    weights: np.ndarray
    threshold: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)) or not np.isfinite(self.threshold):
            raise ValueError("weights and threshold must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "threshold", float(self.threshold))
        w.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.weights.size)


def _check_dim(n_game: int, n_x: int) -> None:
    if n_game != n_x:
        raise ValueError(f"dimension mismatch: game has n={n_game}, input has n={n_x}")


def evaluate_ltf(game: VotingGame, x: "BitString | Sequence[int] | np.ndarray") -> int:
    bits = as_bits(x)
    _check_dim(game.n, bits.size)
    val = float(game.weights @ bits) - game.threshold
    return 1 if val >= 0 else -1


def evaluate_lbf(lbf: LinearBoundedFunction, x: "BitString | Sequence[int] | np.ndarray") -> float:
    bits = as_bits(x)
    _check_dim(lbf.n, bits.size)
    val = float(lbf.weights @ bits) - lbf.threshold
    return float(min(1.0, max(-1.0, val)))


def ltf_values(game: VotingGame, X: np.ndarray) -> np.ndarray:
    """sign(w.x - theta) for every row of X, as float +-1."""
    vals = X @ game.weights - game.threshold
    return np.where(vals >= 0, 1.0, -1.0)


def lbf_values(lbf: LinearBoundedFunction, X: np.ndarray) -> np.ndarray:
    vals = X @ lbf.weights - lbf.threshold
    return np.clip(vals, -1.0, 1.0)


def ltf_fn(game: VotingGame):
    """Batch oracle closure for a voting game."""
    return lambda X: ltf_values(game, X)


def lbf_fn(lbf: LinearBoundedFunction):
    return lambda X: lbf_values(lbf, X)


def rowwise(f) -> "callable":
    """Adapt a scalar per-row function to the batch oracle contract."""

    def batch(X: np.ndarray) -> np.ndarray:
        return np.array([f(row) for row in X], dtype=np.float64)

    return batch


def quota_to_ltf(g: QuotaGame) -> VotingGame:
    """Encode quota semantics as a sign form.

    With w.x = 2*w(S) - total for yes-set S, theta = 2q - total - 1/2 makes
    sign(w.x - theta) = +1 exactly when w(S) >= q; the half-integer offset
    rules out ties for integer weights.
    """
    theta = 2 * g.quota - g.total - 0.5
    return VotingGame(np.array(g.int_weights, dtype=np.float64), theta)


def is_eta_reasonable(game: VotingGame, eta: float) -> tuple[bool, bool]:
    """(|theta| <= (1-eta)*||w||_1, all weights >= 0)."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0,1), got {eta}")
    l1 = float(np.sum(np.abs(game.weights)))
    reasonable = abs(game.threshold) <= (1.0 - eta) * l1
    monotone = bool(np.all(game.weights >= 0))
    return reasonable, monotone


def threshold_lbf(lbf: LinearBoundedFunction) -> VotingGame:
    """Replace the clipped affine form by its sign."""
    return VotingGame(lbf.weights.copy(), lbf.threshold)


# ---------------------------------------------------------------------------
# File formats
#
# game file:  {"n": int, "weights": [...], "threshold": real}
# quota file: {"n": int, "weights": [int...], "quota": int}
# ---------------------------------------------------------------------------


def game_to_dict(game: VotingGame) -> dict:
    return {"n": game.n, "weights": [float(w) for w in game.weights], "threshold": game.threshold}


def game_from_dict(obj: dict) -> VotingGame:
    for key in ("n", "weights", "threshold"):
        if key not in obj:
            raise ValueError(f"game file missing field '{key}'")
    weights = np.asarray(obj["weights"], dtype=np.float64)
    if int(obj["n"]) != weights.size:
        raise ValueError(f"game file: n={obj['n']} but {weights.size} weights given")
    return VotingGame(weights, float(obj["threshold"]))


def quota_from_dict(obj: dict) -> QuotaGame:
    for key in ("n", "weights", "quota"):
        if key not in obj:
            raise ValueError(f"quota file missing field '{key}'")
    weights = [int(w) for w in obj["weights"]]
    if int(obj["n"]) != len(weights):
        raise ValueError(f"quota file: n={obj['n']} but {len(weights)} weights given")
    return QuotaGame(tuple(weights), int(obj["quota"]))


def load_game(path: str) -> VotingGame:
    """Load a game file; quota files are accepted and converted."""
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object")
    if "quota" in obj:
        return quota_to_ltf(quota_from_dict(obj))
    return game_from_dict(obj)


def save_game(game: VotingGame, path: str) -> None:
    from .cli import dumps_json17  # local import to avoid a cycle at import time

    with open(path, "w") as fh:
        fh.write(dumps_json17(game_to_dict(game)))
        fh.write("\n")
