"""Proximal policy optimization over the vectorized environment.

A compact clipped-surrogate PPO with GAE, running observation
normalization, and a running return scale, sized for quick smoke runs
on a CPU.  Episodes share one fixed horizon, so each update consumes
exactly one full episode batch.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .vector_env import VectorEnv


@dataclass
class PpoConfig:
    num_updates: int = 1000
    budget_seconds: float | None = None
    epochs: int = 4
    minibatches: int = 8
    learning_rate: float = 3e-4
    clip: float = 0.2
    gamma: float = 1.0
    gae_lambda: float = 0.95
    value_coef: float = 0.5
    entropy_coef: float = 0.0
    max_grad_norm: float = 0.5
    hidden: int = 64
    seed: int = 0
    initial_action: float = 0.5
    initial_log_std: float = -1.0


class RunningNorm:
    """Running per-coordinate mean and variance over observation batches."""

    def __init__(self, dim: int):
        self.mean = np.zeros(dim)
        self.var = np.ones(dim)
        self.count = 1e-4

    def update(self, batch: np.ndarray) -> None:
        batch_mean = batch.mean(axis=0)
        batch_var = batch.var(axis=0)
        n = batch.shape[0]
        delta = batch_mean - self.mean
        total = self.count + n
        self.mean += delta * n / total
        m_a = self.var * self.count
        m_b = batch_var * n
        self.var = (m_a + m_b + delta**2 * self.count * n / total) / total
        self.count = total

    def normalize(self, batch: np.ndarray) -> np.ndarray:
        scaled = (batch - self.mean) / np.sqrt(self.var + 1e-8)
        return np.clip(scaled, -10.0, 10.0)


def _mlp(dim_in: int, hidden: int, dim_out: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Linear(dim_in, hidden), nn.Tanh(),
        nn.Linear(hidden, hidden), nn.Tanh(),
        nn.Linear(hidden, dim_out),
    )


class ActorCritic(nn.Module):
    def __init__(self, obs_dim: int, action_dim: int, config: PpoConfig):
        super().__init__()
        self.actor = _mlp(obs_dim, config.hidden, action_dim)
        self.critic = _mlp(obs_dim, config.hidden, 1)
        last = self.actor[-1]
        with torch.no_grad():
            last.weight.mul_(0.01)
            last.bias.fill_(config.initial_action)
        self.log_std = nn.Parameter(
            torch.full((action_dim,), float(config.initial_log_std))
        )

    def distribution(self, obs: torch.Tensor) -> torch.distributions.Normal:
        return torch.distributions.Normal(self.actor(obs), self.log_std.exp())

    def value(self, obs: torch.Tensor) -> torch.Tensor:
        return self.critic(obs).squeeze(-1)


@dataclass
class PpoResult:
    model: ActorCritic
    obs_norm: RunningNorm
    curve: list[float] = field(default_factory=list)
    wall_time: float = 0.0


def _collect_episode(env: VectorEnv, model: ActorCritic, obs_norm: RunningNorm,
                     obs_raw: np.ndarray):
    """One full episode batch; returns tensors plus next episode's first obs."""
    obs_steps, action_steps, logp_steps, value_steps, reward_steps = [], [], [], [], []
    while True:
        obs_norm.update(obs_raw)
        x = torch.as_tensor(obs_norm.normalize(obs_raw), dtype=torch.float32)
        with torch.no_grad():
            dist = model.distribution(x)
            actions = dist.sample()
            logp = dist.log_prob(actions).sum(-1)
            values = model.value(x)
        next_obs, rewards, terminations, _ = env.step(actions.numpy().astype(float))
        obs_steps.append(x)
        action_steps.append(actions)
        logp_steps.append(logp)
        value_steps.append(values)
        reward_steps.append(torch.as_tensor(rewards, dtype=torch.float32))
        obs_raw = next_obs
        if terminations.all():
            break
    return (torch.stack(obs_steps), torch.stack(action_steps),
            torch.stack(logp_steps), torch.stack(value_steps),
            torch.stack(reward_steps), obs_raw)


def _gae(rewards: torch.Tensor, values: torch.Tensor, gamma: float,
         lam: float) -> torch.Tensor:
    advantages = torch.zeros_like(rewards)
    running = torch.zeros(rewards.shape[1])
    next_value = torch.zeros(rewards.shape[1])
    for t in range(rewards.shape[0] - 1, -1, -1):
        delta = rewards[t] + gamma * next_value - values[t]
        running = delta + gamma * lam * running
        advantages[t] = running
        next_value = values[t]
    return advantages


def train_ppo(config_text: str, config: PpoConfig = PpoConfig()) -> PpoResult:
    torch.manual_seed(config.seed)
    env = VectorEnv(config_text)
    obs_dim = env.single_observation_space.shape[0]
    action_dim = env.single_action_space.shape[0]
    model = ActorCritic(obs_dim, action_dim, config)
    obs_norm = RunningNorm(obs_dim)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)

    result = PpoResult(model, obs_norm)
    start = time.monotonic()
    obs_raw, _ = env.reset()
    return_scale = None
    for _ in range(config.num_updates):
        if (config.budget_seconds is not None and result.curve
                and time.monotonic() - start > config.budget_seconds):
            break
        obs, actions, logp_old, values, rewards, obs_raw = _collect_episode(
            env, model, obs_norm, obs_raw
        )
        returns_raw = rewards.sum(0)
        result.curve.append(float(returns_raw.mean()))
        batch_scale = float(returns_raw.std()) + 1e-6
        return_scale = (batch_scale if return_scale is None
                        else 0.9 * return_scale + 0.1 * batch_scale)
        scaled = rewards / return_scale
        advantages = _gae(scaled, values, config.gamma, config.gae_lambda)
        targets = advantages + values
        advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)

        flat = lambda x: x.reshape(-1, *x.shape[2:])
        data = tuple(map(flat, (obs, actions, logp_old, advantages, targets)))
        n_samples = data[0].shape[0]
        for _ in range(config.epochs):
            order = torch.randperm(n_samples)
            for chunk in order.chunk(config.minibatches):
                b_obs, b_act, b_logp, b_adv, b_tgt = (d[chunk] for d in data)
                dist = model.distribution(b_obs)
                logp = dist.log_prob(b_act).sum(-1)
                ratio = (logp - b_logp).exp()
                clipped = torch.clamp(ratio, 1.0 - config.clip, 1.0 + config.clip)
                policy_loss = -torch.min(ratio * b_adv, clipped * b_adv).mean()
                value_loss = (model.value(b_obs) - b_tgt).pow(2).mean()
                entropy = dist.entropy().sum(-1).mean()
                loss = (policy_loss + config.value_coef * value_loss
                        - config.entropy_coef * entropy)
                optimizer.zero_grad()
                loss.backward()
                nn.utils.clip_grad_norm_(model.parameters(), config.max_grad_norm)
                optimizer.step()
    result.wall_time = time.monotonic() - start
    env.close()
    return result


def policy_action_fn(model: ActorCritic, obs_norm: RunningNorm):
    """Deterministic (mean) action function over raw observations."""

    def act(obs_raw: np.ndarray) -> np.ndarray:
        x = torch.as_tensor(obs_norm.normalize(obs_raw), dtype=torch.float32)
        with torch.no_grad():
            return model.actor(x).numpy().astype(float)

    return act


def random_action_fn(env: VectorEnv, seed: int = 0):
    """Uniform sampling from the batched action space."""
    rng = np.random.Generator(np.random.PCG64(seed))

    def act(obs_raw: np.ndarray) -> np.ndarray:
        return env.action_space.sample(rng)

    return act


def evaluate_policy(config_text: str, act, n_episodes: int) -> tuple[float, float]:
    """Mean episode return and its standard error under a deterministic driver."""
    env = VectorEnv(config_text)
    returns: list[np.ndarray] = []
    collected = 0
    while collected < n_episodes:
        obs, _ = env.reset()
        totals = np.zeros(env.num_envs)
        while True:
            obs, rewards, terminations, _ = env.step(act(obs))
            totals += rewards
            if terminations.all():
                break
        returns.append(totals.copy())
        collected += env.num_envs
    env.close()
    flat = np.concatenate(returns)[:n_episodes]
    return float(flat.mean()), float(flat.std(ddof=1) / np.sqrt(flat.size))
