"""Error types shared across the package."""
from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration; carries every violated constraint."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"- {p}" for p in problems))


class SimulationError(RuntimeError):
    """Numerical failure while simulating or solving."""
