"""Decoy-state bounds on single-photon yield and error by exhaustive vertex enumeration.

For each intensity mu the observed gain obeys
    Q_mu = sum_{j<=c} p_j(mu) Y_j + T_mu,   p_j(mu) = e^-mu mu^j / j!,
with yields Y_j in [0, 1] and a tail T_mu in [0, 1 - sum_{j<=c} p_j(mu)] for
photon numbers above the cutoff c.  The error yields Z_j = e_j Y_j satisfy
the same system with E_mu Q_mu on the left.  Both are tiny LPs: one equality
per intensity plus box bounds, so every vertex has at most as many
coordinates off their bounds as there are intensities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

FEAS_TOL = 1e-9
MAX_INTENSITIES = 3
MAX_CUTOFF = 10


@dataclass(frozen=True)
class DecoyData:
    intensities: tuple[float, ...]
    gains: tuple[float, ...]
    error_rates: tuple[float, ...] | None = None
    cutoff: int = 8

    def __post_init__(self):
        object.__setattr__(self, "intensities", tuple(float(x) for x in self.intensities))
        object.__setattr__(self, "gains", tuple(float(x) for x in self.gains))
        if self.error_rates is not None:
            object.__setattr__(self, "error_rates", tuple(float(x) for x in self.error_rates))
        mu = self.intensities
        if not 1 <= len(mu) <= MAX_INTENSITIES:
            raise ValueError(f"need between 1 and {MAX_INTENSITIES} intensities")
        if len(set(mu)) != len(mu) or min(mu) < 0:
            raise ValueError("intensities must be distinct and non-negative")
        if len(self.gains) != len(mu):
            raise ValueError("one gain per intensity")
        if self.error_rates is not None and len(self.error_rates) != len(mu):
            raise ValueError("one error rate per intensity")
        for v in self.gains + (self.error_rates or ()):
            if not 0 <= v <= 1:
                raise ValueError("observed quantities must lie in [0, 1]")
        if not 1 <= self.cutoff <= MAX_CUTOFF:
            raise ValueError(f"cutoff must lie in [1, {MAX_CUTOFF}]")

    def to_dict(self) -> dict:
        return {"intensities": list(self.intensities), "gains": list(self.gains),
                "error_rates": None if self.error_rates is None else list(self.error_rates),
                "cutoff": self.cutoff}

    @classmethod
    def from_dict(cls, data: dict) -> "DecoyData":
        unknown = set(data) - {"intensities", "gains", "error_rates", "cutoff"}
        if unknown:
            raise ValueError(f"unknown decoy fields {sorted(unknown)}")
        return cls(tuple(data["intensities"]), tuple(data["gains"]),
                   None if data.get("error_rates") is None else tuple(data["error_rates"]),
                   int(data.get("cutoff", 8)))


def poisson_weights(mu: float, cutoff: int) -> np.ndarray:
    j = np.arange(cutoff + 1)
    log_fact = np.array([math.lgamma(k + 1) for k in j])
    with np.errstate(divide="ignore"):
        logs = -mu + j * np.log(mu) - log_fact if mu > 0 else np.where(j == 0, 0.0, -np.inf)
    return np.exp(logs)


def constraint_system(intensities: Sequence[float], cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Equality matrix over (Y_0..Y_c, T_1..T_m) and the variables' upper bounds."""
    m = len(intensities)
    weights = np.array([poisson_weights(mu, cutoff) for mu in intensities])
    a = np.hstack([weights, np.eye(m)])
    upper = np.concatenate([np.ones(cutoff + 1), np.maximum(0.0, 1 - weights.sum(axis=1))])
    return a, upper


@dataclass(frozen=True)
class LpInterval:
    feasible: bool
    lower: float | None
    upper: float | None
    argmin: np.ndarray | None
    argmax: np.ndarray | None
    residual: float
    vertices: int


def vertices(a: np.ndarray, b: np.ndarray, upper: np.ndarray, tol: float = FEAS_TOL) -> np.ndarray:
    """All basic feasible points of {a x = b, 0 <= x <= upper}; ``a`` must have full row rank."""
    m, n = a.shape
    found = []
    patterns = np.array(list(itertools.product((0.0, 1.0), repeat=n - m)))
    for basis in itertools.combinations(range(n), m):
        a_b = a[:, basis]
        if abs(np.linalg.det(a_b)) < 1e-12:
            continue
        inv = np.linalg.inv(a_b)
        rest = [j for j in range(n) if j not in basis]
        x_rest = patterns * upper[rest]
        x_basis = (b - x_rest @ a[:, rest].T) @ inv.T
        ok = np.all((x_basis >= -tol) & (x_basis <= upper[list(basis)] + tol), axis=1)
        if not ok.any():
            continue
        pts = np.zeros((int(ok.sum()), n))
        pts[:, list(basis)] = np.clip(x_basis[ok], 0, upper[list(basis)])
        pts[:, rest] = x_rest[ok]
        found.append(pts)
    if not found:
        return np.zeros((0, n))
    pts = np.vstack(found)
    resid = np.max(np.abs(pts @ a.T - b), axis=1)
    return pts[resid <= tol]


def lp_interval(a: np.ndarray, b: np.ndarray, upper: np.ndarray, index: int) -> LpInterval:
    """[min, max] of x[index] over the polytope, or an explicit infeasible result."""
    pts = vertices(a, b, upper)
    if len(pts) == 0:
        return LpInterval(False, None, None, None, None, float("nan"), 0)
    values = pts[:, index]
    lo, hi = int(np.argmin(values)), int(np.argmax(values))
    resid = float(max(np.max(np.abs(a @ pts[lo] - b)), np.max(np.abs(a @ pts[hi] - b))))
    return LpInterval(True, float(values[lo]), float(values[hi]), pts[lo], pts[hi], resid, len(pts))


@dataclass(frozen=True)
class DecoyBounds:
    feasible: bool
    y1: tuple[float, float] | None
    e1_upper: float | None
    yield_lp: LpInterval
    error_lp: LpInterval | None
    message: str

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "y1": None if self.y1 is None else list(self.y1),
            "e1_upper": self.e1_upper,
            "residual": self.yield_lp.residual if self.feasible else None,
            "vertices": self.yield_lp.vertices,
            "message": self.message,
        }


def decoy_bounds(data: DecoyData) -> DecoyBounds:
    """Interval for the single-photon yield Y_1 and an upper bound on its error rate e_1."""
    a, upper = constraint_system(data.intensities, data.cutoff)
    gains = np.array(data.gains)
    y_lp = lp_interval(a, gains, upper, 1)
    if not y_lp.feasible:
        return DecoyBounds(False, None, None, y_lp, None,
                           "no photon-number yields reproduce the observed gains")
    if data.error_rates is None:
        return DecoyBounds(True, (y_lp.lower, y_lp.upper), None, y_lp, None, "ok")
    err_gains = gains * np.array(data.error_rates)
    e_lp = lp_interval(a, err_gains, upper, 1)
    if not e_lp.feasible:
        return DecoyBounds(False, (y_lp.lower, y_lp.upper), None, y_lp, e_lp,
                           "no error yields reproduce the observed error gains")
    if y_lp.lower <= 0:
        e1 = 1.0 if e_lp.upper > 0 else 0.0
    else:
        e1 = min(1.0, e_lp.upper / y_lp.lower)
    return DecoyBounds(True, (y_lp.lower, y_lp.upper), e1, y_lp, e_lp, "ok")


def synthesize(intensities: Sequence[float], yields: Sequence[float], cutoff: int,
               errors: Sequence[float] | None = None) -> DecoyData:
    """Observed data generated by given photon-number yields (zero above ``cutoff``)."""
    y = np.asarray(yields, dtype=float)
    if len(y) != cutoff + 1:
        raise ValueError("need one yield per photon number up to the cutoff")
    gains, rates = [], []
    for mu in intensities:
        p = poisson_weights(mu, cutoff)
        g = float(p @ y)
        gains.append(g)
        if errors is not None:
            rates.append(float(p @ (np.asarray(errors) * y)) / g if g > 0 else 0.0)
    return DecoyData(tuple(intensities), tuple(gains), tuple(rates) if errors is not None else None, cutoff)
