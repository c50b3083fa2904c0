"""TOML configuration parsing and strict validation.

Sections: [env], [arrival], [midprice], [fill], [reward] describe the
environment; [agent] and [train] are optional.  Unknown sections or keys
are hard errors, reported with the line they appear on; every violation
found is reported, not just the first.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - python < 3.11
    import tomli as tomllib

import numpy as np

from . import arrivals as arr
from . import fills as fl
from . import midprice as mp
from . import rewards as rw
from .closed_form import CjParams, cj_solve
from .environment import EnvironmentConfig, TradingEnvironment
from .errors import ConfigError
from .learn import GaussianPolicy, TrainConfig

_FLOAT = ("float", (int, float))
_INT = ("int", int)
_BOOL = ("bool", bool)
_STR = ("str", str)

_ENV_KEYS = {
    "terminal_time": _FLOAT,
    "n_steps": _INT,
    "num_trajectories": _INT,
    "action_type": _STR,
    "initial_cash": _FLOAT,
    "initial_inventory": ("int or [low, high]", None),
    "max_inventory": _INT,
    "minimum_tick_size": _FLOAT,
    "observe_auxiliaries": _BOOL,
    "master_seed": _INT,
}

_MODEL_KEYS = {
    "arrival": {
        "poisson": {"lambda_bid": _FLOAT, "lambda_ask": _FLOAT},
        "hawkes": {
            "baseline": _FLOAT,
            "reversion": _FLOAT,
            "jump": _FLOAT,
            "initial_intensity": ("float or [bid, ask]", None),
        },
    },
    "midprice": {
        "bm": {"s0": _FLOAT, "drift": _FLOAT, "volatility": _FLOAT},
        "gbm": {"s0": _FLOAT, "drift": _FLOAT, "volatility": _FLOAT},
        "bm_jump": {
            "s0": _FLOAT, "volatility": _FLOAT,
            "jump_down": _FLOAT, "jump_up": _FLOAT,
        },
        "ou": {"s0": _FLOAT, "reversion": _FLOAT, "mean": _FLOAT, "volatility": _FLOAT},
        "ou_drift": {
            "s0": _FLOAT, "volatility": _FLOAT, "drift0": _FLOAT,
            "drift_reversion": _FLOAT, "drift_mean": _FLOAT, "drift_volatility": _FLOAT,
        },
        "ou_jump": {
            "s0": _FLOAT, "reversion": _FLOAT, "mean": _FLOAT, "volatility": _FLOAT,
            "jump_down": _FLOAT, "jump_up": _FLOAT,
        },
        "ou_jump_drift": {
            "s0": _FLOAT, "volatility": _FLOAT, "drift0": _FLOAT,
            "drift_reversion": _FLOAT, "drift_mean": _FLOAT, "drift_volatility": _FLOAT,
            "jump_down": _FLOAT, "jump_up": _FLOAT,
        },
    },
    "fill": {
        "exponential": {"fill_exponent": _FLOAT},
        "triangular": {"max_fill_depth": _FLOAT},
        "power": {"fill_exponent": _FLOAT, "fill_multiplier": _FLOAT},
    },
    "reward": {
        "pnl": {},
        "running_penalty": {
            "per_step_inventory_aversion": _FLOAT,
            "terminal_inventory_aversion": _FLOAT,
        },
        "exponential_utility": {"risk_aversion": _FLOAT},
    },
}

_MODEL_DEFAULTS = {
    ("arrival", "hawkes"): {"initial_intensity": None},
    ("midprice", "bm"): {"drift": 0.0},
    ("midprice", "gbm"): {"drift": 0.0},
    ("midprice", "ou_drift"): {"drift0": 0.0, "drift_mean": 0.0},
    ("midprice", "ou_jump_drift"): {"drift0": 0.0, "drift_mean": 0.0},
    ("reward", "running_penalty"): {
        "per_step_inventory_aversion": 0.0,
        "terminal_inventory_aversion": 0.0,
    },
}

_MODEL_CLASSES = {
    ("arrival", "poisson"): arr.PoissonArrival,
    ("midprice", "bm"): mp.BrownianMidprice,
    ("midprice", "gbm"): mp.GeometricBrownianMidprice,
    ("midprice", "bm_jump"): mp.JumpBrownianMidprice,
    ("midprice", "ou"): mp.OuMidprice,
    ("midprice", "ou_drift"): mp.OuDriftMidprice,
    ("midprice", "ou_jump"): mp.OuJumpMidprice,
    ("midprice", "ou_jump_drift"): mp.OuJumpDriftMidprice,
    ("fill", "exponential"): fl.ExponentialFill,
    ("fill", "triangular"): fl.TriangularFill,
    ("fill", "power"): fl.PowerFill,
    ("reward", "pnl"): rw.PnlReward,
    ("reward", "running_penalty"): rw.RunningInventoryPenalty,
    ("reward", "exponential_utility"): rw.ExponentialUtility,
}

_AGENT_KEYS = {
    "random": {"seed": _INT},
    "fixed_action": {"action": ("list", list)},
    "fixed_spread": {"half_spread": _FLOAT},
    "avellaneda_stoikov": {
        "risk_aversion": _FLOAT, "volatility": _FLOAT, "fill_exponent": _FLOAT,
    },
    "cartea_jaimungal": {"refine": _INT},
}

_TRAIN_KEYS = {
    "num_trajectories": _INT,
    "num_updates": _INT,
    "learning_rate": _FLOAT,
    "baseline": _STR,
    "eval_every": _INT,
    "seed": _INT,
    "initial_half_spread": _FLOAT,
    "initial_log_std": _FLOAT,
    "divergence_patience": _INT,
}

_SECTIONS = ("env", "arrival", "midprice", "fill", "reward", "agent", "train")


class _Locator:
    """Maps (section, key) to the line it appears on in the source text."""

    def __init__(self, text: str, path: str | None):
        self.path = path or "<config>"
        self.lines: dict[tuple[str, str], int] = {}
        self.section_lines: dict[str, int] = {}
        section = ""
        for lineno, line in enumerate(text.splitlines(), start=1):
            m = re.match(r"\s*\[([^\]]+)\]", line)
            if m:
                section = m.group(1).strip()
                self.section_lines[section] = lineno
                continue
            m = re.match(r"\s*([A-Za-z0-9_-]+)\s*=", line)
            if m:
                self.lines[(section, m.group(1))] = lineno

    def at(self, section: str, key: str | None = None) -> str:
        line = (
            self.lines.get((section, key))
            if key is not None
            else self.section_lines.get(section)
        )
        where = f"{self.path}:{line}" if line else self.path
        label = f"[{section}] {key}" if key else f"[{section}]"
        return f"{where}: {label}"


@dataclass
class ParsedConfig:
    text: str
    path: str | None
    raw: dict
    locator: _Locator


def parse_config_text(text: str, path: str | None = None) -> ParsedConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError([f"{path or '<config>'}: TOML parse error: {e}"]) from e
    locator = _Locator(text, path)
    problems = [
        f"{locator.at(name)}: unknown section"
        for name in raw
        if name not in _SECTIONS
    ]
    if problems:
        raise ConfigError(problems)
    return ParsedConfig(text, path, raw, locator)


def load_config(path: str) -> ParsedConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config_text(f.read(), path)


def _type_ok(value, types) -> bool:
    if types is None:
        return True
    if isinstance(value, bool):
        return types is bool
    return isinstance(value, types)


def _check_keys(section: str, data: dict, allowed: dict, loc: _Locator,
                problems: list[str]) -> dict:
    out = {}
    for key, value in data.items():
        if key == "model" or key == "type":
            continue
        if key not in allowed:
            problems.append(f"{loc.at(section, key)}: unknown key")
            continue
        label, types = allowed[key]
        if not _type_ok(value, types):
            problems.append(f"{loc.at(section, key)}: expected {label}")
            continue
        out[key] = value
    return out


def _build_model(section: str, parsed: ParsedConfig, problems: list[str]):
    data = parsed.raw.get(section)
    loc = parsed.locator
    if data is None:
        problems.append(f"{parsed.path or '<config>'}: missing required section [{section}]")
        return None
    model = data.get("model")
    variants = _MODEL_KEYS[section]
    if model not in variants:
        problems.append(
            f"{loc.at(section, 'model') if 'model' in data else loc.at(section)}: "
            f"model must be one of {sorted(variants)}"
        )
        return None
    allowed = variants[model]
    kwargs = _check_keys(section, data, allowed, loc, problems)
    defaults = _MODEL_DEFAULTS.get((section, model), {})
    for key in allowed:
        if key not in kwargs:
            if key in defaults:
                kwargs[key] = defaults[key]
            else:
                problems.append(f"{loc.at(section)}: missing required key '{key}'")
    if len(kwargs) != len(allowed):
        return None
    if section == "arrival" and model == "hawkes":
        intensity = kwargs.pop("initial_intensity")
        if intensity is None:
            intensity = kwargs["baseline"]
        if isinstance(intensity, (int, float)):
            pair = (float(intensity), float(intensity))
        elif isinstance(intensity, list) and len(intensity) == 2:
            pair = (float(intensity[0]), float(intensity[1]))
        else:
            problems.append(
                f"{loc.at(section, 'initial_intensity')}: expected float or [bid, ask]"
            )
            return None
        kwargs["initial_intensity_bid"], kwargs["initial_intensity_ask"] = pair
        return arr.HawkesArrival(**kwargs)
    return _MODEL_CLASSES[(section, model)](**kwargs)


def build_environment_config(parsed: ParsedConfig, **overrides) -> EnvironmentConfig:
    """Assemble an EnvironmentConfig, collecting every violation found."""
    problems: list[str] = []
    loc = parsed.locator
    models = {
        section: _build_model(section, parsed, problems)
        for section in ("arrival", "midprice", "fill", "reward")
    }
    env_data = parsed.raw.get("env", {})
    env_kwargs = _check_keys("env", env_data, _ENV_KEYS, loc, problems)
    inv = env_kwargs.get("initial_inventory")
    if inv is not None:
        if isinstance(inv, list):
            if len(inv) == 2 and all(isinstance(v, int) for v in inv):
                env_kwargs["initial_inventory"] = (inv[0], inv[1])
            else:
                problems.append(
                    f"{loc.at('env', 'initial_inventory')}: expected int or [low, high]"
                )
                env_kwargs.pop("initial_inventory")
        elif not isinstance(inv, int):
            problems.append(
                f"{loc.at('env', 'initial_inventory')}: expected int or [low, high]"
            )
            env_kwargs.pop("initial_inventory")
    env_kwargs.update(overrides)
    if problems or any(m is None for m in models.values()):
        raise ConfigError(problems)
    config = EnvironmentConfig(
        arrival=models["arrival"],
        midprice=models["midprice"],
        fill=models["fill"],
        reward=models["reward"],
        **env_kwargs,
    )
    problems = config.validate()
    if problems:
        raise ConfigError(problems)
    return config


def cj_params_from_config(config: EnvironmentConfig) -> CjParams:
    """Benchmark solver parameters implied by an environment config."""
    problems = []
    if not isinstance(config.arrival, arr.PoissonArrival):
        problems.append("closed-form quoting requires the poisson arrival model")
    if not isinstance(config.fill, fl.ExponentialFill):
        problems.append("closed-form quoting requires the exponential fill model")
    if isinstance(config.reward, rw.RunningInventoryPenalty):
        phi = config.reward.per_step_inventory_aversion
        a = config.reward.terminal_inventory_aversion
    elif isinstance(config.reward, rw.PnlReward):
        phi, a = 0.0, 0.0
    else:
        problems.append(
            "closed-form quoting requires the running_penalty or pnl reward"
        )
        phi = a = 0.0
    if problems:
        raise ConfigError(problems)
    return CjParams(
        lambda_bid=config.arrival.lambda_bid,
        lambda_ask=config.arrival.lambda_ask,
        fill_exponent=config.fill.fill_exponent,
        running_aversion=phi,
        terminal_aversion=a,
        max_inventory=config.max_inventory,
        terminal_time=config.terminal_time,
    )


def build_train_config(parsed: ParsedConfig, **overrides) -> TrainConfig:
    problems: list[str] = []
    data = parsed.raw.get("train", {})
    kwargs = _check_keys("train", data, _TRAIN_KEYS, parsed.locator, problems)
    if problems:
        raise ConfigError(problems)
    kwargs.update(overrides)
    cfg = TrainConfig(**kwargs)
    problems = cfg.validate()
    if problems:
        raise ConfigError(problems)
    return cfg


def agent_spec(parsed: ParsedConfig) -> tuple[str, dict]:
    """(type, params) from the [agent] section; defaults to fixed_spread."""
    data = parsed.raw.get("agent", {})
    problems: list[str] = []
    kind = data.get("type", "fixed_spread")
    if kind not in _AGENT_KEYS:
        problems.append(
            f"{parsed.locator.at('agent')}: type must be one of {sorted(_AGENT_KEYS)}"
        )
        raise ConfigError(problems)
    params = _check_keys("agent", data, _AGENT_KEYS[kind], parsed.locator, problems)
    if problems:
        raise ConfigError(problems)
    return kind, params


def build_agent(env: TradingEnvironment, kind: str, params: dict):
    """Instantiate an agent against a live environment."""
    from .agents import (
        AvellanedaStoikovAgent,
        CarteaJaimungalAgent,
        FixedActionAgent,
        FixedSpreadAgent,
        RandomAgent,
    )
    from .learn import _myopic_half_spread

    config = env.config
    if kind == "random":
        return RandomAgent(env, seed=params.get("seed", 0))
    if kind == "fixed_action":
        if "action" not in params:
            raise ConfigError(["[agent] fixed_action requires 'action'"])
        return FixedActionAgent(params["action"], env.layout, env.dt)
    if kind == "fixed_spread":
        if config.action_type == "touch":
            raise ConfigError(
                ["[agent] fixed_spread quotes depths; touch actions need"
                 " the fixed_action or random agent"]
            )
        half = params.get("half_spread", _myopic_half_spread(config))
        return FixedSpreadAgent(half, action_dim=env.action_dim)
    if kind == "avellaneda_stoikov":
        if "risk_aversion" not in params:
            raise ConfigError(["[agent] avellaneda_stoikov requires 'risk_aversion'"])
        volatility = params.get("volatility", getattr(config.midprice, "volatility", None))
        fill_exponent = params.get(
            "fill_exponent", getattr(config.fill, "fill_exponent", None)
        )
        problems = []
        if volatility is None:
            problems.append("[agent] volatility required when the midprice model has none")
        if fill_exponent is None:
            problems.append("[agent] fill_exponent required for non-exponential fill models")
        if problems:
            raise ConfigError(problems)
        return AvellanedaStoikovAgent(
            env.layout, params["risk_aversion"], volatility,
            config.terminal_time, fill_exponent,
        )
    if kind == "cartea_jaimungal":
        cj = cj_params_from_config(config)
        solution = cj_solve(cj, config.n_steps, refine=params.get("refine", 10))
        return CarteaJaimungalAgent(solution, env.layout, env.max_depth)
    raise ConfigError([f"unknown agent type {kind!r}"])


def build_policy_from_weights(env: TradingEnvironment, weights, log_std) -> GaussianPolicy:
    policy = GaussianPolicy(
        env.layout,
        terminal_time=env.config.terminal_time,
        max_inventory=env.config.max_inventory,
        action_dim=env.action_dim,
    )
    policy.weights = np.asarray(weights, dtype=float).reshape(policy.weights.shape)
    policy.log_std = np.asarray(log_std, dtype=float).reshape(policy.log_std.shape)
    return policy
