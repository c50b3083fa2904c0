"""Batch-vectorized limit-order-book market making simulator."""

__version__ = "0.1.0"

from .arrivals import HawkesArrival, PoissonArrival
from .closed_form import CjParams, CjSolution, as_quotes, cj_solve
from .config import (
    build_agent,
    build_environment_config,
    build_train_config,
    load_config,
    parse_config_text,
)
from .dp import dp_solve
from .environment import (
    EnvironmentConfig,
    StepResult,
    TradingEnvironment,
    observation_layout,
)
from .errors import ConfigError, SimulationError
from .fills import ExponentialFill, PowerFill, TriangularFill, fill_probability, max_depth
from .learn import (
    EvalReport,
    GaussianPolicy,
    TrainConfig,
    TrainingDiverged,
    evaluate,
    pg_update,
    rollout,
    train,
)
from .midprice import (
    BrownianMidprice,
    GeometricBrownianMidprice,
    JumpBrownianMidprice,
    OuDriftMidprice,
    OuJumpDriftMidprice,
    OuJumpMidprice,
    OuMidprice,
)
from .rewards import ExponentialUtility, PnlReward, RunningInventoryPenalty
from .rng import RandomSource

__all__ = [
    "__version__",
    "BrownianMidprice",
    "CjParams",
    "CjSolution",
    "ConfigError",
    "EnvironmentConfig",
    "EvalReport",
    "ExponentialFill",
    "ExponentialUtility",
    "GaussianPolicy",
    "GeometricBrownianMidprice",
    "HawkesArrival",
    "JumpBrownianMidprice",
    "OuDriftMidprice",
    "OuJumpDriftMidprice",
    "OuJumpMidprice",
    "OuMidprice",
    "PnlReward",
    "PoissonArrival",
    "PowerFill",
    "RandomSource",
    "RunningInventoryPenalty",
    "SimulationError",
    "StepResult",
    "TradingEnvironment",
    "TrainConfig",
    "TrainingDiverged",
    "TriangularFill",
    "as_quotes",
    "build_agent",
    "build_environment_config",
    "build_train_config",
    "cj_solve",
    "dp_solve",
    "evaluate",
    "fill_probability",
    "load_config",
    "max_depth",
    "observation_layout",
    "parse_config_text",
    "pg_update",
    "rollout",
    "train",
]
