"""Synthetic scores and Bernoulli responses with a known calibration function."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import ValidationError
from .metrics import Dataset


class GridKind(str, enum.Enum):
    EQUISPACED = "equispaced"
    SQUARED = "squared"
    SQRT = "sqrt"


class CalibrationKind(str, enum.Enum):
    PERFECT = "perfect"
    SINE = "sine"


@dataclass(frozen=True)
class ScoreGrid:
    kind: GridKind
    n: int

    def __post_init__(self):
        object.__setattr__(self, "kind", GridKind(self.kind))
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"grid size must be a positive integer, got {self.n!r}")


@dataclass(frozen=True)
class CalibrationFunction:
    """Probability of success r(s) as a function of the score s.

    ``SINE`` is r(s) = s + amplitude * sin(2 pi frequency s).
    """

    kind: CalibrationKind = CalibrationKind.PERFECT
    amplitude: float = 0.0
    frequency: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", CalibrationKind(self.kind))
        if self.amplitude < 0 or not math.isfinite(self.amplitude):
            raise ValidationError("amplitude must be finite and nonnegative")
        if int(self.frequency) != self.frequency or self.frequency < 1:
            raise ValidationError("frequency must be a positive integer")
        r = self(np.linspace(0.0, 1.0, 10_001))
        if r.min() < 0 or r.max() > 1:
            raise ValidationError(f"{self.label} does not map [0, 1] into [0, 1]")

    @classmethod
    def perfect(cls) -> CalibrationFunction:
        return cls(CalibrationKind.PERFECT)

    @classmethod
    def sine(cls, amplitude: float = 0.1, frequency: int = 2) -> CalibrationFunction:
        return cls(CalibrationKind.SINE, amplitude, frequency)

    @property
    def label(self) -> str:
        if self.kind is CalibrationKind.PERFECT:
            return "perfect"
        return f"sine:amp={self.amplitude:g},freq={self.frequency:d}"

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        if self.kind is CalibrationKind.PERFECT:
            return s.copy()
        return s + self.amplitude * np.sin(2 * np.pi * self.frequency * s)


@dataclass(frozen=True)
class SynthConfig:
    grid: ScoreGrid
    calibration: CalibrationFunction
    seed: int


def make_scores(grid: ScoreGrid) -> np.ndarray:
    base = np.arange(1, grid.n + 1) / grid.n
    if grid.kind is GridKind.SQUARED:
        return base**2
    if grid.kind is GridKind.SQRT:
        return np.sqrt(base)
    return base


def draw_responses(scores, cal: CalibrationFunction, seed: int) -> Dataset:
    """Pair each score with an independent Bernoulli(r(score)) response.

    Uses the counter-based Philox generator, so the k-th response depends
    only on (seed, k).
    """
    scores = np.asarray(scores, dtype=np.float64)
    prob = cal(scores)
    if prob.size and (prob.min() < 0 or prob.max() > 1):
        raise ValidationError("calibration function leaves [0, 1] on these scores")
    u = np.random.Generator(np.random.Philox(seed)).random(scores.size)
    return Dataset(scores, (u < prob).astype(np.int8))


def generate(cfg: SynthConfig) -> Dataset:
    return draw_responses(make_scores(cfg.grid), cfg.calibration, cfg.seed)


@dataclass(frozen=True)
class AlternativeLimits:
    ece2_limit: float
    ecce_mad_limit: float
    ecce_r_limit: float
    draws_per_bin: int


_QUAD = dict(epsabs=1e-13, epsrel=1e-12, limit=200)


def alternative_limits(cal: CalibrationFunction, grid_kind=GridKind.EQUISPACED,
                       draws_per_bin: int = 16) -> AlternativeLimits:
    """Large-n limits of ECE^2 and of the ECCEs for uniformly spread scores.

    With ``draws_per_bin`` responses per bin, E[ECE^2] tends to
    int (r - s)^2 ds + int r (1 - r) / draws_per_bin ds, while the ECCEs
    tend to the maximum absolute value and the range of
    G(t) = int_0^t (r(s) - s) ds.  Everything is computed by adaptive
    quadrature; the extremes of G sit at the zeros of r(s) - s, located by
    a sign scan followed by root polishing.
    """
    if GridKind(grid_kind) is not GridKind.EQUISPACED:
        raise ValidationError("limits are only available for the equispaced grid")
    if draws_per_bin < 1:
        raise ValidationError("draws_per_bin must be positive")

    def gap(s):
        return float(cal(s)) - s

    def var(s):
        r = float(cal(s))
        return r * (1 - r)

    breaks = _zeros_of(gap)
    pts = list(breaks) or None
    bias = integrate.quad(lambda s: gap(s) ** 2, 0, 1, points=pts, **_QUAD)[0]
    noise = integrate.quad(var, 0, 1, points=pts, **_QUAD)[0]

    knots = [0.0, *breaks, 1.0]
    g = [0.0]
    for a, b in zip(knots[:-1], knots[1:]):
        g.append(g[-1] + integrate.quad(gap, a, b, **_QUAD)[0])
    g = np.array(g)
    return AlternativeLimits(
        ece2_limit=bias + noise / draws_per_bin,
        ecce_mad_limit=float(np.abs(g).max()),
        ecce_r_limit=float(g.max() - g.min()),
        draws_per_bin=draws_per_bin,
    )


def _zeros_of(f, samples: int = 4096) -> list[float]:
    t = np.linspace(0.0, 1.0, samples + 1)
    v = np.array([f(x) for x in t])
    if not np.any(v):
        return []
    zeros = []
    for i in range(samples):
        a, b = t[i], t[i + 1]
        if v[i] == 0 and 0 < a < 1:
            zeros.append(a)
        elif v[i] * v[i + 1] < 0:
            zeros.append(optimize.brentq(f, a, b, xtol=1e-15))
    return zeros
