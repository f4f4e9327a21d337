"""Round-level protocol simulators."""

from .b92 import run_b92
from .bb84 import run_bb84, run_sixstate
from .models import AttackModel, ChannelModel, ConfigError, DetectorModel, ProtocolConfig
from .records import RoundRecord, RoundRecords, SimulationResult
from .twoway import run_lm05, run_sdc

RUNNERS = {
    "bb84": run_bb84,
    "sixstate": run_sixstate,
    "b92": run_b92,
    "lm05": run_lm05,
    "sdc": run_sdc,
}


def simulate(config: ProtocolConfig, workers: int | None = None) -> SimulationResult:
    return RUNNERS[config.protocol](config, workers=workers)


__all__ = [
    "AttackModel",
    "ChannelModel",
    "ConfigError",
    "DetectorModel",
    "ProtocolConfig",
    "RUNNERS",
    "RoundRecord",
    "RoundRecords",
    "SimulationResult",
    "run_b92",
    "run_bb84",
    "run_lm05",
    "run_sdc",
    "run_sixstate",
    "simulate",
]
