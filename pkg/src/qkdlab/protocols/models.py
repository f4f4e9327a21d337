"""Configuration for channels, detectors, attacks and protocol runs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

PROTOCOLS = ("bb84", "sixstate", "b92", "lm05", "sdc")
ATTACKS = ("none", "intercept-resend", "usd", "entangle-resend")


class ConfigError(ValueError):
    """A configuration value is missing or out of range."""


def _prob(name: str, v: float) -> float:
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise ConfigError(f"{name} must lie in [0, 1], got {v}")
    return v


@dataclass(frozen=True)
class ChannelModel:
    """Depolarizing E(rho) = p rho + (1-p) 1/2 followed by transmission eta.

    ``kind`` is informational ("depolarizing", "lossy" or "composed"); both
    parameters always apply, so an identity channel is p = eta = 1.
    """

    kind: str = "composed"
    p: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("depolarizing", "lossy", "composed", "identity"):
            raise ConfigError(f"unknown channel kind {self.kind!r}")
        _prob("channel.p", self.p)
        _prob("channel.eta", self.eta)

    @classmethod
    def depolarizing(cls, p: float) -> "ChannelModel":
        return cls("depolarizing", p=p)

    @classmethod
    def lossy(cls, eta: float) -> "ChannelModel":
        return cls("lossy", eta=eta)

    @property
    def qber(self) -> float:
        """Basis-independent error rate the depolarizing part induces."""
        return (1 - self.p) / 2


@dataclass(frozen=True)
class DetectorModel:
    efficiency: float = 1.0
    dark_count: float = 0.0
    double_click_policy: str = "random-bit"

    def __post_init__(self):
        _prob("detector.efficiency", self.efficiency)
        _prob("detector.dark_count", self.dark_count)
        if self.double_click_policy not in ("random-bit", "discard"):
            raise ConfigError(f"unknown double-click policy {self.double_click_policy!r}")


@dataclass(frozen=True)
class AttackModel:
    kind: str = "none"
    fraction: float = 1.0

    def __post_init__(self):
        if self.kind not in ATTACKS:
            raise ConfigError(f"unknown attack {self.kind!r}")
        _prob("attack.fraction", self.fraction)

    @property
    def active(self) -> bool:
        return self.kind != "none" and self.fraction > 0


@dataclass(frozen=True)
class ProtocolConfig:
    protocol: str = "bb84"
    rounds: int = 10_000
    p_x: float = 0.5
    r: float = 0.5
    version: int = 1
    p_x_check: float = 0.5
    channel: ChannelModel = field(default_factory=ChannelModel)
    detector: DetectorModel = field(default_factory=DetectorModel)
    attack: AttackModel = field(default_factory=AttackModel)
    seed: int = 0

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if int(self.rounds) < 1:
            raise ConfigError("rounds must be at least 1")
        _prob("p_x", self.p_x)
        _prob("r", self.r)
        _prob("p_x_check", self.p_x_check)
        if self.version not in (1, 2):
            raise ConfigError("LM05 version must be 1 or 2")
        if int(self.seed) < 0:
            raise ConfigError("seed must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ProtocolConfig":
        data = dict(data)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "channel" in data:
                data["channel"] = ChannelModel(**data["channel"])
            if "detector" in data:
                data["detector"] = DetectorModel(**data["detector"])
            if "attack" in data:
                data["attack"] = AttackModel(**data["attack"])
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path: str | Path) -> "ProtocolConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)


def binomial_sigma(p: float, n: int) -> float:
    return float(np.sqrt(max(p * (1 - p), 0.0) / max(n, 1)))
