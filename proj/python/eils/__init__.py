"""Python access to the eils training loop and metrics."""

from ._core import ConfigError, modulate, parse_seed_list, recovery_time, reversal_speed, run

__all__ = ["ConfigError", "modulate", "parse_seed_list", "recovery_time", "reversal_speed", "run"]
