"""The RateReport record shared by calculators, the pipeline and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

ABORT_SYMBOL = "⊥"


@dataclass
class RateReport:
    """Inputs, entropy bounds, leak, epsilon budget and the resulting rate or length.

    Exactly one of ``rate`` and ``length`` is set.  Negative values are stored
    as 0 with ``no_positive_rate`` raised.
    """

    protocol: str
    inputs: dict[str, Any]
    hmin: float | None = None
    hmax: float | None = None
    leak: float | None = None
    eps_pe: float = 0.0
    eps_cor: float = 0.0
    eps_pa: float = 0.0
    rate: float | None = None
    length: int | None = None
    abort: bool = False
    no_positive_rate: bool = False
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if (self.rate is None) == (self.length is None):
            raise ValueError("set exactly one of rate and length")
        if self.rate is not None and self.rate <= 0:
            self.no_positive_rate = True
            self.rate = 0.0
        if self.length is not None and self.length <= 0:
            self.no_positive_rate = True
            self.length = 0

    @property
    def eps_total(self) -> float:
        return self.eps_pe + self.eps_cor + self.eps_pa

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {"abort": self.abort, "no_positive_rate": self.no_positive_rate}
        if self.rate is not None:
            result["rate"] = float(self.rate)
        else:
            result["length"] = int(self.length)
        if self.abort:
            result["key"] = ABORT_SYMBOL
        out = {
            "protocol": self.protocol,
            "inputs": self.inputs,
            "bounds": {"hmin": self.hmin, "hmax": self.hmax, "leak": self.leak},
            "eps": {"pe": self.eps_pe, "cor": self.eps_cor, "pa": self.eps_pa, "total": self.eps_total},
            "result": result,
        }
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_schema() -> dict[str, Any]:
    text = resources.files("qkdlab").joinpath("schemas/rate_report.schema.json").read_text()
    return json.loads(text)


def asymptotic_report(protocol: str, inputs: dict[str, Any], rate: float,
                      hmin: float | None = None, hmax: float | None = None) -> RateReport:
    return RateReport(protocol, inputs, hmin=hmin, hmax=hmax, leak=hmax, rate=rate)
