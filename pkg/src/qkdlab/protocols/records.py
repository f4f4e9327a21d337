"""Round records stored column-wise, with CSV round trips."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

import numpy as np

CSV_COLUMNS = ("round", "alice_bit", "alice_basis", "bob_bit", "bob_basis", "detected", "sifted")
NO_BIT = -1


@dataclass(frozen=True)
class RoundRecord:
    round: int
    alice_bit: int
    alice_basis: int
    bob_bit: int | None
    bob_basis: int
    detected: bool
    sifted: bool


@dataclass
class RoundRecords:
    """Column arrays, one entry per round; ``bob_bit`` is -1 when Bob has none."""

    alice_bit: np.ndarray
    alice_basis: np.ndarray
    bob_bit: np.ndarray
    bob_basis: np.ndarray
    detected: np.ndarray
    sifted: np.ndarray
    extra: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.alice_bit)
        for name in ("alice_basis", "bob_bit", "bob_basis", "detected", "sifted"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} has the wrong length")
        if np.any(self.sifted & ~self.detected):
            raise ValueError("a sifted round must be detected")

    def __len__(self) -> int:
        return len(self.alice_bit)

    def __getitem__(self, i: int) -> RoundRecord:
        b = int(self.bob_bit[i])
        return RoundRecord(
            int(i), int(self.alice_bit[i]), int(self.alice_basis[i]),
            None if b == NO_BIT else b, int(self.bob_basis[i]),
            bool(self.detected[i]), bool(self.sifted[i]),
        )

    def __iter__(self) -> Iterator[RoundRecord]:
        return (self[i] for i in range(len(self)))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, RoundRecords):
            return NotImplemented
        cols = ("alice_bit", "alice_basis", "bob_bit", "bob_basis", "detected", "sifted")
        return all(np.array_equal(getattr(self, c), getattr(other, c)) for c in cols)

    def sifted_keys(self) -> tuple[np.ndarray, np.ndarray]:
        """Alice's and Bob's sifted bits in round order."""
        m = self.sifted
        return self.alice_bit[m].astype(np.uint8), self.bob_bit[m].astype(np.uint8)

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(CSV_COLUMNS)
        for i in range(len(self)):
            b = int(self.bob_bit[i])
            w.writerow([
                i, int(self.alice_bit[i]), int(self.alice_basis[i]),
                "" if b == NO_BIT else b, int(self.bob_basis[i]),
                int(self.detected[i]), int(self.sifted[i]),
            ])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> "RoundRecords":
        return cls.from_csv_text(Path(path).read_text())

    @classmethod
    def from_csv_text(cls, text: str) -> "RoundRecords":
        rows = list(csv.DictReader(io.StringIO(text)))
        if rows and tuple(rows[0].keys()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {tuple(rows[0].keys())}")
        if [int(r["round"]) for r in rows] != list(range(len(rows))):
            raise ValueError("rounds must be listed in order starting at 0")

        def col(name, conv=int, dtype=np.int8):
            return np.array([conv(r[name]) for r in rows], dtype=dtype)

        return cls(
            alice_bit=col("alice_bit"),
            alice_basis=col("alice_basis"),
            bob_bit=col("bob_bit", lambda s: NO_BIT if s == "" else int(s)),
            bob_basis=col("bob_basis"),
            detected=col("detected", lambda s: bool(int(s)), bool),
            sifted=col("sifted", lambda s: bool(int(s)), bool),
        )


@dataclass
class SimulationResult:
    records: RoundRecords
    summary: dict[str, Any]
