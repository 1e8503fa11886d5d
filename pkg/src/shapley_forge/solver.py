"""Grid search that turns a target index vector into a weighted voting game.

A target index vector pins the coordinate correlations of a matching game up
to two unknowns: the game's mean under the slice distribution and the mean
of its coordinate correlations.  The solver sweeps a grid over that square,
runs the boosting loop against each implied correlation vector, thresholds
each resulting clipped form into a voting game and keeps any candidate whose
(estimated or exact) index distance clears the acceptance margin 8*eps/10.

For n up to the enumeration cap the whole grid is boosted in lockstep by a
vectorized engine: rows stay in a closed-form "linear" regime while their
running sums provably never clip, and move one-way into a dense regime that
re-derives correlations from the materialized support table.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .boosting import (
    BoostResult,
    BoostTargets,
    IterationCapError,
    boost,
    exact_dp_oracle,
    exact_enum_oracle,
    ltf_from_state,
    sampled_oracle,
)
from .estimators import EstimateConfig, estimate_shapley
from .games import VotingGame, ltf_fn
from .indices import (
    d_shapley,
    shapley_exact_truthtable,
    shapley_int_ltf_dp,
    truthtable_coefficient_matrix,
)
from .mu import degree1_moment_matrix, enumerate_cube, enumerate_support, lambda_n, mu_weights

ORACLE_MODES = ("exact-enum", "exact-dp", "sampled")


@dataclass(frozen=True)
class SolveConfig:
    epsilon: float | None = None
    xi: float = 0.005
    grid_step: float = 0.05
    delta: float = 0.01
    seed: int = 0
    oracle_mode: str = "exact-enum"
    weight_bound: float | None = None
    eta: float = 0.1
    enum_cap: int = 14
    stall_window: int = 512
    early_stop: bool = True
    check_every: int = 64

    def __post_init__(self) -> None:
        if self.oracle_mode not in ORACLE_MODES:
            raise ValueError(f"oracle_mode must be one of {ORACLE_MODES}, got {self.oracle_mode!r}")
        if not 0 < self.grid_step <= 2:
            raise ValueError("grid_step must lie in (0, 2]")
        if not 0 < self.xi <= 1:
            raise ValueError("xi must lie in (0, 1]")


@dataclass(frozen=True)
class GuessPoint:
    """One grid cell: guessed mean of the game and of its correlations."""

    f_star_0: float
    mean_corr: float


@dataclass(frozen=True)
class SolveResult:
    game: VotingGame | None
    est_dshapley: float
    guess: GuessPoint | None
    boost_iterations: int
    status: str
    nu_warning: bool = False
    grid_evaluated: int = 0


# ---------------------------------------------------------------------------
# Vectorized multi-target boosting engine
# ---------------------------------------------------------------------------


class _GridEngine:
    """Boosts every target row of A in lockstep over the support table.

    A row starts in linear mode: while sum_l |net_l| stays below 1/gamma no
    support point can clip, so the correlation update of an append is the
    closed-form gamma * sign * (second-moment column).  Once the L1 mass
    crosses the cap the row flips permanently to dense mode, which keeps the
    integer score vector S = net . (1, x) per support point and re-derives
    correlations from clip(gamma*S) after every append (float32 by default;
    well inside the oracle accuracy budget).
    """

    def __init__(
        self,
        n: int,
        targets: np.ndarray,
        gamma: float,
        *,
        stall_window: int | None = 512,
        cap: float = math.inf,
        force_dense: bool = False,
        float64_dense: bool = False,
    ) -> None:
        self.n = n
        self.gamma = float(gamma)
        self.A = np.asarray(targets, dtype=np.float64)
        if self.A.ndim != 2 or self.A.shape[1] != n + 1:
            raise ValueError(f"targets must be (G, {n + 1})")
        self.G = self.A.shape[0]
        support = enumerate_support(n)
        self.M = support.shape[0]
        Xext = np.ones((self.M, n + 1), dtype=np.int8)
        Xext[:, 1:] = support
        self.Xext = Xext
        self.Xext32 = Xext.astype(np.int32)
        self.wts = mu_weights(n)
        self.Wmu32 = (self.wts[:, None] * Xext).astype(np.float32)
        self.cross = degree1_moment_matrix(n)
        self.stall_window = math.inf if stall_window is None else int(stall_window)
        self.stall_tolerance = self.gamma / 16.0
        self.cap = cap
        self.float64_dense = float64_dense

        self.net = np.zeros((self.G, n + 1), dtype=np.int64)
        self.corr = np.zeros((self.G, n + 1))
        self.t = np.zeros(self.G, dtype=np.int64)
        self.best = np.full(self.G, np.inf)
        self.last_improved = np.zeros(self.G, dtype=np.int64)
        self.alive = np.ones(self.G, dtype=bool)
        self.converged = np.zeros(self.G, dtype=bool)
        self.dense = np.zeros(self.G, dtype=bool)
        self.S: np.ndarray | None = None
        # no point clips while the L1 mass of net stays at or below this
        self.lin_cap = int(math.floor(1.0 / self.gamma)) - 1
        if force_dense:
            self.lin_cap = -1

    def _densify(self, rows: np.ndarray) -> None:
        if self.S is None:
            self.S = np.zeros((self.G, self.M), dtype=np.int32)
        for g in rows:
            self.S[g] = self.Xext32 @ self.net[g].astype(np.int32)
        self.dense[rows] = True

    def _dense_corr(self, rows: np.ndarray) -> None:
        assert self.S is not None
        if self.float64_dense:
            H = np.clip(self.gamma * self.S[rows], -1.0, 1.0)
            self.corr[rows] = (H * self.wts) @ self.Xext
        else:
            H = self.S[rows].astype(np.float32)
            H *= np.float32(self.gamma)
            np.clip(H, -1.0, 1.0, out=H)
            self.corr[rows] = H @ self.Wmu32

    def step(self) -> list[int]:
        """One boosting round for every live row; returns rows that finished."""
        act = np.nonzero(self.alive)[0]
        if act.size == 0:
            return []
        viol = self.A[act] - self.corr[act]
        absv = np.abs(viol)
        j = np.argmax(absv, axis=1)
        pick = np.arange(act.size)
        v = absv[pick, j]
        conv = v <= self.gamma
        improved = v < self.best[act] - self.stall_tolerance
        stalled = (~conv) & (~improved) & (self.t[act] - self.last_improved[act] >= self.stall_window)
        self.converged[act[conv]] = True
        finished = act[conv | stalled]
        self.alive[finished] = False
        imp_rows = act[improved]
        self.best[imp_rows] = v[improved]
        self.last_improved[imp_rows] = self.t[imp_rows]

        run = ~(conv | stalled)
        rows = act[run]
        if rows.size == 0:
            return finished.tolist()
        if np.max(self.t[rows]) + 1 > self.cap:
            raise IterationCapError(f"grid row exceeded the round cap {self.cap}")
        jj = j[run]
        sg = np.where(viol[pick[run], jj] > 0, 1, -1).astype(np.int64)
        self.net[rows, jj] += sg
        self.t[rows] += 1

        was_dense = self.dense[rows].copy()
        lin = ~was_dense
        if np.any(lin):
            lrows = rows[lin]
            self.corr[lrows] += self.gamma * sg[lin, None] * self.cross[jj[lin]]
            over = np.abs(self.net[lrows]).sum(axis=1) > self.lin_cap
            if np.any(over):
                self._densify(lrows[over])
        if np.any(was_dense):
            urows = rows[was_dense]
            uj = jj[was_dense]
            us = sg[was_dense]
            for col in np.unique(uj):
                colvec = self.Xext32[:, col]
                sel = uj == col
                plus = urows[sel & (us > 0)]
                minus = urows[sel & (us < 0)]
                if plus.size:
                    self.S[plus] += colvec
                if minus.size:
                    self.S[minus] -= colvec
        now_dense = rows[self.dense[rows]]
        if now_dense.size:
            self._dense_corr(now_dense)
        return finished.tolist()

    def run(self, checkpoint=None, check_every: int = 64) -> None:
        pending: list[int] = []
        k = 0
        while np.any(self.alive):
            pending.extend(self.step())
            k += 1
            if checkpoint is not None and k % check_every == 0 and pending:
                if checkpoint(pending):
                    return
                pending = []
        if checkpoint is not None and pending:
            checkpoint(pending)


# ---------------------------------------------------------------------------
# Guess construction and candidate validation
# ---------------------------------------------------------------------------


def _grid_axis(step: float) -> np.ndarray:
    npts = math.ceil(2.0 / step - 1e-9) + 1
    return np.linspace(-1.0, 1.0, npts)


def _target_rows(target: np.ndarray, nu: float, axis: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All grid cells: returns (A, f0s, means) with A of shape (G, n+1)."""
    n = target.size
    lam = lambda_n(n)
    base = (2.0 / lam) * (target - nu)
    f0s = np.repeat(axis, axis.size)
    means = np.tile(axis, axis.size)
    A = np.empty((f0s.size, n + 1))
    A[:, 0] = f0s
    A[:, 1:] = means[:, None] + base[None, :]
    return A, f0s, means


def _candidate_game(net: np.ndarray, gamma: float) -> VotingGame:
    return VotingGame(gamma * net[1:].astype(np.float64), -gamma * float(net[0]))


def _int_candidate(net: np.ndarray) -> VotingGame:
    """Same sign function as the gamma-scaled candidate, integer weights."""
    return VotingGame(net[1:].astype(np.float64), -float(net[0]))


def _exact_d_enum_batch(nets: np.ndarray, target: np.ndarray, n: int) -> np.ndarray:
    """Exact index distance for many candidates at once, by truth table."""
    cube = enumerate_cube(n)
    ext = np.ones((cube.shape[0], n + 1))
    ext[:, 1:] = cube
    scores = nets.astype(np.float64) @ ext.T
    signs = np.where(scores >= 0, 1.0, -1.0)
    shap = signs @ truthtable_coefficient_matrix(n)
    return np.linalg.norm(shap - target[None, :], axis=1)


def validate_candidate(
    target: np.ndarray, game: VotingGame, cfg: SolveConfig, *, seed: int | None = None
) -> float:
    """Index distance of a candidate: exact when the oracle mode is exact."""
    target = np.asarray(target, dtype=np.float64)
    n = game.n
    if cfg.oracle_mode == "sampled":
        eps = cfg.epsilon if cfg.epsilon is not None else 0.1
        est_cfg = EstimateConfig(
            gamma=eps / 10.0, delta=cfg.delta / 2.0, seed=cfg.seed if seed is None else seed
        )
        est, _ = estimate_shapley(ltf_fn(game), n, est_cfg)
        return d_shapley(est, target)
    w_int = np.rint(game.weights)
    if cfg.oracle_mode == "exact-dp" and np.allclose(game.weights, w_int, atol=1e-9):
        rep = shapley_int_ltf_dp(game)
        return d_shapley(rep.shapley, target)
    rep = shapley_exact_truthtable(ltf_fn(game), n)
    return d_shapley(rep.shapley, target)


def _make_oracle(n: int, cfg: SolveConfig, xi: float, grid_points: int, cap: int):
    if cfg.oracle_mode == "exact-enum":
        return exact_enum_oracle(n)
    if cfg.oracle_mode == "exact-dp":
        return exact_dp_oracle(n)
    delta_each = (cfg.delta / 2.0) / (grid_points * (cap + 1))
    return sampled_oracle(n, xi, delta_each, cfg.seed)


def candidate_from_guess(
    target: np.ndarray, guess: GuessPoint, cfg: SolveConfig, *, xi: float | None = None
) -> tuple[VotingGame, BoostResult]:
    """Boost a single grid cell to a candidate game; total for any guess."""
    target = np.asarray(target, dtype=np.float64)
    n = target.size
    xi = cfg.xi if xi is None else xi
    nu = 2.0 / n
    lam = lambda_n(n)
    a = np.empty(n + 1)
    a[0] = guess.f_star_0
    a[1:] = (2.0 / lam) * (target - nu) + guess.mean_corr
    cap = math.ceil(64.0 / xi**2)
    oracle = _make_oracle(n, cfg, xi, 1, cap)
    res = boost(BoostTargets(a=a, xi=xi), oracle, cap=cap, stall_window=cfg.stall_window)
    return ltf_from_state(res.state), res


# ---------------------------------------------------------------------------
# Full solvers
# ---------------------------------------------------------------------------


def solve_is(target, cfg: SolveConfig = SolveConfig()) -> SolveResult:
    """Synthesize a game whose index vector approximates the target."""
    return _solve(np.asarray(target, dtype=np.float64), cfg, cfg.xi, default_eps=0.1)


def solve_isbw(target, cfg: SolveConfig) -> SolveResult:
    """Bounded-weight variant: xi shrinks with the assumed weight budget."""
    target = np.asarray(target, dtype=np.float64)
    if cfg.weight_bound is None or cfg.weight_bound <= 0:
        raise ValueError("solve_isbw needs a positive weight_bound")
    n = target.size
    xi = min(cfg.xi, 1.0 / (10.0 * n * cfg.weight_bound))
    return _solve(target, cfg, xi, default_eps=n ** (-1.0 / 8.0))


def _solve(target: np.ndarray, cfg: SolveConfig, xi: float, default_eps: float) -> SolveResult:
    n = target.size
    if n < 3:
        raise ValueError(f"need at least 3 voters, got {n}")
    eps = cfg.epsilon if cfg.epsilon is not None else default_eps
    accept_at = 0.8 * eps
    nu = 2.0 / n
    nu_warning = abs(float(target.sum()) - 2.0) > 0.01
    if nu_warning:
        warnings.warn(
            f"target entries sum to {target.sum():.4f}, not 2; treating the source "
            "as monotone non-constant anyway",
            stacklevel=3,
        )
    axis = _grid_axis(cfg.grid_step)
    A, f0s, means = _target_rows(target, nu, axis)
    cap = math.ceil(64.0 / xi**2)

    use_engine = n <= cfg.enum_cap and cfg.oracle_mode in ("exact-enum", "exact-dp")
    if use_engine:
        return _solve_engine(target, cfg, xi, eps, accept_at, nu_warning, A, f0s, means, cap)
    return _solve_sequential(target, cfg, xi, eps, accept_at, nu_warning, A, f0s, means, cap)


def _pick(accepted: list) -> tuple:
    return min(accepted, key=lambda r: (r[0], r[1], r[2]))


def _solve_engine(target, cfg, xi, eps, accept_at, nu_warning, A, f0s, means, cap) -> SolveResult:
    n = target.size
    G = A.shape[0]
    gamma = xi / 2.0
    engine = _GridEngine(n, A, gamma, stall_window=cfg.stall_window, cap=cap)
    accepted: list[tuple] = []  # (est, iterations, grid index)
    seen: dict[int, float] = {}

    def validate(rows: list[int]) -> None:
        rows = [g for g in rows if g not in seen]
        if not rows:
            return
        nets = engine.net[rows]
        if cfg.oracle_mode == "exact-enum":
            ds = _exact_d_enum_batch(nets, target, n)
        else:
            ds = np.array(
                [d_shapley(shapley_int_ltf_dp(_int_candidate(net)).shapley, target) for net in nets]
            )
        for g, d in zip(rows, ds):
            seen[g] = float(d)
            if d <= accept_at:
                accepted.append((float(d), int(engine.t[g]), int(g)))

    def checkpoint(finished: list[int]) -> bool:
        # stalled rows still carry usable candidates; validation is cheap here
        validate(finished)
        return bool(accepted) and cfg.early_stop

    engine.run(checkpoint, cfg.check_every)

    if not accepted:
        # converged rows failed the margin; sweep everything, stalled included
        validate(list(range(G)))
    evaluated = int(np.count_nonzero(~engine.alive))
    if accepted:
        d, iters, g = _pick(accepted)
        return SolveResult(
            game=_candidate_game(engine.net[g], gamma),
            est_dshapley=d,
            guess=GuessPoint(float(f0s[g]), float(means[g])),
            boost_iterations=iters,
            status="solved",
            nu_warning=nu_warning,
            grid_evaluated=evaluated,
        )
    g = min(seen, key=lambda k: (seen[k], k))
    return SolveResult(
        game=_candidate_game(engine.net[g], gamma),
        est_dshapley=seen[g],
        guess=GuessPoint(float(f0s[g]), float(means[g])),
        boost_iterations=int(engine.t[g]),
        status="no-solution",
        nu_warning=nu_warning,
        grid_evaluated=evaluated,
    )


def _solve_sequential(target, cfg, xi, eps, accept_at, nu_warning, A, f0s, means, cap) -> SolveResult:
    n = target.size
    G = A.shape[0]
    gamma = xi / 2.0
    if cfg.oracle_mode == "exact-enum" and n > 20:
        raise ValueError(f"enumeration oracle is unavailable at n={n}; use exact-dp or sampled")
    oracle = _make_oracle(n, cfg, xi, G, cap)
    accepted: list[tuple] = []
    fallback: list[tuple] = []  # (est or None, iterations, g, net)
    evaluated = 0
    rng = np.random.default_rng(cfg.seed ^ 0x5EED)
    for g in range(G):
        res = boost(BoostTargets(a=A[g], xi=xi), oracle, cap=cap, stall_window=cfg.stall_window)
        evaluated += 1
        net = res.state.net
        if res.converged:
            est = validate_candidate(
                target, _int_candidate(net), cfg, seed=int(rng.integers(2**63))
            )
            fallback.append((est, res.iterations, g, net))
            if est <= accept_at:
                accepted.append((est, res.iterations, g, net))
                if cfg.early_stop:
                    break
        else:
            fallback.append((None, res.iterations, g, net))
    if accepted:
        d, iters, g, net = _pick(accepted)
        return SolveResult(
            game=_candidate_game(net, gamma),
            est_dshapley=d,
            guess=GuessPoint(float(f0s[g]), float(means[g])),
            boost_iterations=iters,
            status="solved",
            nu_warning=nu_warning,
            grid_evaluated=evaluated,
        )
    # no accepted candidate: fill in estimates for the cheap exact modes
    if cfg.oracle_mode != "sampled":
        fallback = [
            (
                est
                if est is not None
                else validate_candidate(target, _int_candidate(net), cfg),
                iters,
                g,
                net,
            )
            for est, iters, g, net in fallback
        ]
    scored = [f for f in fallback if f[0] is not None]
    if not scored:
        scored = [
            (
                validate_candidate(target, _int_candidate(net), cfg, seed=int(rng.integers(2**63))),
                iters,
                g,
                net,
            )
            for est, iters, g, net in fallback[:1]
        ]
    d, iters, g, net = _pick(scored)
    return SolveResult(
        game=_candidate_game(net, gamma),
        est_dshapley=d,
        guess=GuessPoint(float(f0s[g]), float(means[g])),
        boost_iterations=iters,
        status="no-solution",
        nu_warning=nu_warning,
        grid_evaluated=evaluated,
    )


def exhaustive_baseline(target, max_weight: int = 6) -> tuple[VotingGame, float]:
    """Best small integer game by brute force; the optimality yardstick.

    Enumerates every weight vector in {0..max_weight}^n (lexicographically)
    and every half-integer threshold in [-total, total], returning the first
    minimizer of the exact index distance.
    """
    target = np.asarray(target, dtype=np.float64)
    n = target.size
    if n > 5:
        raise ValueError(f"baseline enumeration is capped at n=5, got {n}")
    if max_weight > 6:
        raise ValueError(f"baseline weight cap is 6, got {max_weight}")
    cube = enumerate_cube(n).astype(np.float64)
    A = truthtable_coefficient_matrix(n)
    best: tuple | None = None
    for w in itertools.product(range(max_weight + 1), repeat=n):
        wv = np.array(w, dtype=np.float64)
        vals = cube @ wv
        tot = int(wv.sum())
        thetas = np.arange(-2 * tot, 2 * tot + 1) * 0.5
        signs = np.where(vals[None, :] >= thetas[:, None], 1.0, -1.0)
        ds = np.linalg.norm(signs @ A - target[None, :], axis=1)
        i = int(np.argmin(ds))
        if best is None or ds[i] < best[0]:
            best = (float(ds[i]), wv, float(thetas[i]))
    assert best is not None
    return VotingGame(best[1], best[2]), best[0]
