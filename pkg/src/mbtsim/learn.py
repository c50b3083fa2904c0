"""Policy-gradient training for quoting policies.

The policy is Gaussian over depths with a linear mean in the features
[1, q, T - t, q * (T - t)] (inventory scaled by max_inventory, time by
the horizon) and one learned log standard deviation per action
dimension.  Training is plain REINFORCE on whole-episode returns with a
batch-mean baseline; advantages are normalized by a running standard
deviation of returns before each ascent step.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .agents import field_index
from .environment import EnvironmentConfig, TradingEnvironment
from .errors import ConfigError

LOG_STD_BOUNDS = (-5.0, 2.0)


@dataclass(frozen=True)
class TrainConfig:
    num_trajectories: int = 1000
    num_updates: int = 300
    learning_rate: float = 0.01
    baseline: str = "batch_mean"
    eval_every: int = 0
    seed: int = 0
    initial_half_spread: float | None = None
    initial_log_std: float = -1.2
    divergence_patience: int = 50

    def validate(self) -> list[str]:
        problems = []
        if self.num_trajectories < 1:
            problems.append("train.num_trajectories must be >= 1")
        if self.num_updates < 1:
            problems.append("train.num_updates must be >= 1")
        if not self.learning_rate > 0:
            problems.append("train.learning_rate must be > 0")
        if self.baseline != "batch_mean":
            problems.append("train.baseline must be 'batch_mean'")
        if self.eval_every < 0:
            problems.append("train.eval_every must be >= 0")
        if self.divergence_patience < 1:
            problems.append("train.divergence_patience must be >= 1")
        return problems


class TrainingDiverged(RuntimeError):
    def __init__(self, message: str, curve: list[float],
                 curve_seconds: list[float] | None = None,
                 curve_std: list[float] | None = None):
        super().__init__(message)
        self.curve = curve
        self.curve_seconds = list(curve_seconds or [])
        self.curve_std = list(curve_std or [])


class Adam:
    """Per-coordinate adaptive ascent steps.

    The score-function gradient for a Gaussian mean grows like 1/sigma
    as the learned standard deviation shrinks; a fixed-step ascent blows
    up late in training.  Adam keeps every coordinate step bounded by
    the learning rate regardless of that scale.
    """

    def __init__(self, shapes, learning_rate: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = float(learning_rate)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, grads):
        self.t += 1
        steps = []
        for i, g in enumerate(grads):
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / (1.0 - self.beta1**self.t)
            v_hat = self.v[i] / (1.0 - self.beta2**self.t)
            steps.append(self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps))
        return steps


class GaussianPolicy:
    """Linear-Gaussian quoting policy over depth actions."""

    N_FEATURES = 4

    def __init__(
        self,
        layout,
        terminal_time: float,
        max_inventory: int,
        action_dim: int = 2,
        initial_action: float = 0.5,
        initial_log_std: float = -1.2,
        seed: int = 0,
    ):
        self._q_index = field_index(layout, "inventory")
        self._t_index = field_index(layout, "time")
        self.terminal_time = float(terminal_time)
        self.q_scale = float(max_inventory)
        self.action_dim = int(action_dim)
        self.weights = np.zeros((self.action_dim, self.N_FEATURES))
        self.weights[:, 0] = initial_action
        self.log_std = np.full(self.action_dim, float(initial_log_std))
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def features(self, observations: np.ndarray) -> np.ndarray:
        obs = np.asarray(observations, dtype=float)
        q = obs[..., self._q_index] / self.q_scale
        tau = (self.terminal_time - obs[..., self._t_index]) / self.terminal_time
        ones = np.ones_like(q)
        return np.stack([ones, q, tau, q * tau], axis=-1)

    def mean_action(self, observations: np.ndarray) -> np.ndarray:
        return self.features(observations) @ self.weights.T

    def act(self, observations: np.ndarray) -> np.ndarray:
        mean = self.mean_action(observations)
        eps = self._rng.standard_normal(mean.shape)
        return mean + np.exp(self.log_std) * eps

    def get_action(self, observations: np.ndarray) -> np.ndarray:
        """Deterministic (mean) action, for evaluation."""
        return self.mean_action(observations)

    def log_prob(self, observations: np.ndarray, actions: np.ndarray) -> np.ndarray:
        resid = actions - self.mean_action(observations)
        var = np.exp(2.0 * self.log_std)
        terms = -0.5 * resid**2 / var - self.log_std - 0.5 * np.log(2.0 * np.pi)
        return terms.sum(axis=-1)

    def log_prob_grads(self, observations: np.ndarray, actions: np.ndarray):
        """Per-sample gradients of log pi wrt weights and log_std.

        observations (..., D), actions (..., A); returns
        (grad_w (..., A, F), grad_log_std (..., A)).
        """
        x = self.features(observations)
        resid = actions - self.mean_action(observations)
        var = np.exp(2.0 * self.log_std)
        grad_w = (resid / var)[..., :, None] * x[..., None, :]
        grad_log_std = resid**2 / var - 1.0
        return grad_w, grad_log_std


@dataclass
class Rollout:
    observations: np.ndarray   # (N, n_steps + 1, D)
    actions: np.ndarray        # (N, n_steps, A)
    rewards: np.ndarray        # (N, n_steps)

    @property
    def returns(self) -> np.ndarray:
        return self.rewards.sum(axis=1)


def rollout(env: TradingEnvironment, agent, episode: int | None = None,
            stochastic: bool = False) -> Rollout:
    """Run one full episode batch and record the trajectory tensors."""
    n = env.config.num_trajectories
    n_steps = env.config.n_steps
    obs = env.reset(episode)
    observations = np.empty((n, n_steps + 1, env.observation_dim))
    actions = np.empty((n, n_steps, env.action_dim))
    rewards = np.empty((n, n_steps))
    observations[:, 0] = obs
    for k in range(n_steps):
        act = agent.act(obs) if stochastic else agent.get_action(obs)
        result = env.step(act)
        observations[:, k + 1] = result.observations
        actions[:, k] = act
        rewards[:, k] = result.rewards
        obs = result.observations
    return Rollout(observations, actions, rewards)


def pg_update(
    policy: GaussianPolicy,
    data: Rollout,
    learning_rate: float,
    return_scale: float,
    optimizer: Adam | None = None,
) -> dict:
    """One REINFORCE ascent step with a batch-mean baseline.

    With no optimizer the raw gradient is applied at the given rate
    (useful for estimator tests); training passes an Adam instance.
    """
    returns = data.returns
    adv = (returns - returns.mean()) / max(return_scale, 1e-12)
    obs = data.observations[:, :-1]
    grad_w, grad_log_std = policy.log_prob_grads(obs, data.actions)
    gw = np.einsum("n,ntaf->af", adv, grad_w) / adv.size
    gs = np.einsum("n,nta->a", adv, grad_log_std) / adv.size
    if optimizer is None:
        step_w, step_s = learning_rate * gw, learning_rate * gs
    else:
        step_w, step_s = optimizer.step([gw, gs])
    policy.weights += step_w
    policy.log_std += step_s
    np.clip(policy.log_std, *LOG_STD_BOUNDS, out=policy.log_std)
    return {"mean_return": float(returns.mean()), "grad_norm": float(np.sqrt((gw**2).sum()))}


@dataclass
class TrainResult:
    policy: GaussianPolicy
    curve: list[float]
    curve_seconds: list[float]
    curve_std: list[float]
    eval_history: list[tuple[int, float]]
    wall_time: float
    random_level: float


def _myopic_half_spread(config: EnvironmentConfig) -> float:
    from . import fills as fl
    if isinstance(config.fill, fl.ExponentialFill):
        return 1.0 / config.fill.fill_exponent
    return 0.25 * fl.max_depth(config.fill)


def train(
    config: EnvironmentConfig,
    train_config: TrainConfig = TrainConfig(),
    progress=None,
) -> TrainResult:
    """Train a Gaussian quoting policy with REINFORCE.

    Deterministic for a given (config, train_config).  Raises
    TrainingDiverged if the batch mean return stays below the random
    agent's level for ``divergence_patience`` consecutive updates.
    """
    problems = train_config.validate()
    if config.action_type != "limit":
        problems.append("training supports the limit action type only")
    if problems:
        raise ConfigError(problems)
    from .agents import RandomAgent

    env_cfg = replace(
        config,
        num_trajectories=train_config.num_trajectories,
        master_seed=train_config.seed,
    )
    env = TradingEnvironment(env_cfg)
    init_action = train_config.initial_half_spread
    if init_action is None:
        init_action = _myopic_half_spread(config)
    policy = GaussianPolicy(
        env.layout,
        terminal_time=config.terminal_time,
        max_inventory=config.max_inventory,
        action_dim=env.action_dim,
        initial_action=init_action,
        initial_log_std=train_config.initial_log_std,
        seed=train_config.seed + 1,
    )

    probe_cfg = replace(
        env_cfg,
        num_trajectories=max(train_config.num_trajectories, 1000),
        master_seed=train_config.seed + 1_000_003,
    )
    probe_env = TradingEnvironment(probe_cfg)
    random_level = float(
        rollout(probe_env, RandomAgent(probe_env, seed=train_config.seed)).returns.mean()
    )

    start = time.monotonic()
    curve: list[float] = []
    curve_seconds: list[float] = []
    curve_std: list[float] = []
    eval_history: list[tuple[int, float]] = []
    optimizer = Adam(
        [policy.weights.shape, policy.log_std.shape], train_config.learning_rate
    )
    running_scale = None
    below = 0
    for update in range(train_config.num_updates):
        data = rollout(env, policy, episode=update, stochastic=True)
        batch_std = float(data.returns.std())
        running_scale = (
            batch_std if running_scale is None else 0.9 * running_scale + 0.1 * batch_std
        )
        stats = pg_update(
            policy, data, train_config.learning_rate, running_scale, optimizer
        )
        curve.append(stats["mean_return"])
        curve_seconds.append(time.monotonic() - start)
        curve_std.append(batch_std)
        below = below + 1 if stats["mean_return"] < random_level else 0
        if below >= train_config.divergence_patience:
            raise TrainingDiverged(
                f"mean return stayed below the random-agent level ({random_level:.3f}) "
                f"for {below} consecutive updates",
                curve, curve_seconds, curve_std,
            )
        if train_config.eval_every and (update + 1) % train_config.eval_every == 0:
            eval_history.append((update + 1, stats["mean_return"]))
        if progress is not None:
            progress(update, stats)
    return TrainResult(policy, curve, curve_seconds, curve_std, eval_history,
                       time.monotonic() - start, random_level)


@dataclass
class EvalReport:
    agent_name: str
    mean_reward: float
    std_error: float
    n_episodes: int
    normalized_score: float | None = None
    baselines: dict = field(default_factory=dict)


def evaluate(
    config: EnvironmentConfig,
    agent,
    n_episodes: int,
    seed: int = 0,
    max_batch: int = 10_000,
    baselines: dict | None = None,
    agent_name: str | None = None,
) -> EvalReport:
    """Mean episode reward with standard error over fresh evaluation seeds.

    Episodes run in batches of at most ``max_batch`` trajectories.  When
    ``baselines`` provides 'cj' and 'fixed_best' mean rewards, the report
    carries the normalized score
    (mean - fixed_best) / (cj - fixed_best).
    """
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    width = min(n_episodes, max_batch)
    env = TradingEnvironment(replace(config, num_trajectories=width, master_seed=seed))
    returns = []
    done = 0
    episode = 0
    while done < n_episodes:
        data = rollout(env, agent, episode=episode)
        take = min(width, n_episodes - done)
        returns.append(data.returns[:take])
        done += take
        episode += 1
    r = np.concatenate(returns)
    mean = float(r.mean())
    se = float(r.std(ddof=1) / np.sqrt(r.size)) if r.size > 1 else 0.0
    score = None
    if baselines and "cj" in baselines and "fixed_best" in baselines:
        gap = baselines["cj"] - baselines["fixed_best"]
        if gap != 0:
            score = (mean - baselines["fixed_best"]) / gap
    return EvalReport(
        agent_name or type(agent).__name__,
        mean,
        se,
        int(r.size),
        score,
        dict(baselines or {}),
    )
