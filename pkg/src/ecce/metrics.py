"""Binned and cumulative calibration statistics.

The binned errors (ECE^1, ECE^2) are Riemann sums of per-bin gaps between the
average response and the average score.  The cumulative errors (ECCE-MAD,
ECCE-R) are the maximum absolute value and the range of the cumulative
differences

    C_k = (1/n) * sum_{j <= k} (R_j - S_j),    C_0 = 0,

over scores sorted in strictly increasing order.  Dividing either one by
``sigma_n`` (the null standard deviation of C_n) gives a statistic whose
large-n distribution is a functional of standard Brownian motion.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from numba import njit

from .errors import DegenerateScoresError, ValidationError

TIE_JITTER = 1e-8


class Sample(NamedTuple):
    score: float
    response: int


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Scores in strictly increasing order, each paired with a 0/1 response.

    Build one with :func:`canonicalize` when the raw scores may be unsorted
    or tied; the constructor only validates.
    """

    scores: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=np.float64)
        r = np.asarray(self.responses)
        if s.ndim != 1 or r.shape != s.shape:
            raise ValidationError("scores and responses must be 1-d and of equal length")
        if s.size == 0:
            raise ValidationError("empty dataset")
        if not np.all(np.isfinite(s)) or s[0] < 0 or s[-1] > 1:
            raise ValidationError("scores must lie in [0, 1]")
        if s.size > 1 and not np.all(np.diff(s) > 0):
            raise ValidationError("scores must be strictly increasing")
        if not np.all((r == 0) | (r == 1)):
            raise ValidationError("responses must be 0 or 1")
        object.__setattr__(self, "scores", _frozen(s))
        object.__setattr__(self, "responses", _frozen(r.astype(np.int8)))

    @property
    def n(self) -> int:
        return int(self.scores.size)

    def __len__(self) -> int:
        return self.n

    @property
    def samples(self) -> list[Sample]:
        return [Sample(float(s), int(r)) for s, r in zip(self.scores, self.responses)]

    def pairs(self) -> list[tuple[float, int]]:
        return [tuple(x) for x in self.samples]


def _check_pairs(raw_pairs) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(raw_pairs, np.ndarray):
        table = raw_pairs
    else:
        table = list(raw_pairs)
        if any(isinstance(v, (str, bytes)) for row in table for v in np.atleast_1d(row)):
            raise ValidationError("scores and responses must be numbers, not strings")
    if len(table) == 0:
        raise ValidationError("empty dataset")
    try:
        table = np.asarray(table, dtype=np.float64)
    except (TypeError, ValueError):
        raise ValidationError("expected a sequence of (score, response) pairs")
    if table.ndim != 2 or table.shape[1] != 2:
        raise ValidationError("expected a sequence of (score, response) pairs")
    scores, responses = table[:, 0].copy(), table[:, 1]
    bad = np.flatnonzero(~((scores >= 0) & (scores <= 1)))
    if bad.size:
        i = bad[0]
        raise ValidationError(f"row {i}: score {scores[i]!r} outside [0, 1]")
    bad = np.flatnonzero((responses != 0) & (responses != 1))
    if bad.size:
        i = bad[0]
        raise ValidationError(f"row {i}: response {responses[i]!r} not in {{0, 1}}")
    return scores, responses.astype(np.int8)


def canonicalize(raw_pairs, seed=None) -> Dataset:
    """Sort (score, response) pairs by score and break ties at random.

    Each group of tied scores is shuffled with a generator seeded by `seed`
    and then spread evenly over a window of relative half-width ``1e-8``
    around the shared value.  The window is clipped to [0, 1] and to the
    midpoints with the neighbouring distinct scores, so the global order is
    preserved.  Distinct scores are returned unchanged.
    """
    scores, responses = _check_pairs(raw_pairs)
    order = np.argsort(scores, kind="stable")
    scores = scores[order]
    responses = responses[order]

    n = scores.size
    if n > 1 and not np.all(np.diff(scores) > 0):
        rng = np.random.default_rng(seed)
        starts = np.flatnonzero(np.r_[True, np.diff(scores) > 0])
        ends = np.r_[starts[1:], n]
        for a, b in zip(starts, ends):
            g = b - a
            if g == 1:
                continue
            v = scores[a]
            w = TIE_JITTER * max(abs(v), TIE_JITTER)
            lo = max(v - w, 0.0)
            hi = min(v + w, 1.0)
            if a > 0:
                lo = max(lo, 0.5 * (scores[a - 1] + v))
            if b < n:
                hi = min(hi, 0.5 * (v + scores[b]))
            spread = lo + (hi - lo) * np.arange(1, g + 1) / (g + 1)
            if not np.all(np.diff(spread) > 0):
                raise ValidationError(f"cannot separate {g} tied scores at {v!r}")
            responses[a:b] = responses[a:b][rng.permutation(g)]
            scores[a:b] = spread
    return Dataset(scores, responses)


class Strategy(str, enum.Enum):
    EQUISPACED = "equispaced"
    EQUAL_COUNT = "equal-count"


@dataclass(frozen=True)
class BinningSpec:
    strategy: Strategy
    m: int

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise ValidationError(f"number of bins must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))


@dataclass(frozen=True)
class BinSummary:
    left_score: float
    weight: float
    avg_score: float
    avg_response: float
    count: int


@dataclass(frozen=True)
class EceReport:
    ece1: float
    ece2: float
    spec: BinningSpec
    bins: tuple[BinSummary, ...] = field(repr=False)


@dataclass(frozen=True)
class CumulativeCurve:
    values: np.ndarray
    abscissas: np.ndarray

    @property
    def n(self) -> int:
        return self.values.size - 1


@dataclass(frozen=True)
class EcceReport:
    ecce_mad: float
    ecce_r: float
    sigma_n: float
    mad_normalized: float
    r_normalized: float
    p_mad: float
    p_r: float


def _bin_starts(ds: Dataset, spec: BinningSpec) -> np.ndarray:
    n, m = ds.n, spec.m
    if spec.strategy is Strategy.EQUAL_COUNT:
        return np.arange(m) * (n // m)
    # bin j holds [j/m, (j+1)/m); the top bin is closed at 1
    idx = np.minimum(np.floor(ds.scores * m), m - 1).astype(np.int64)
    return np.flatnonzero(np.r_[True, np.diff(idx) > 0])


def assign_bins(ds: Dataset, spec: BinningSpec) -> list[BinSummary]:
    """Partition the sorted samples into bins and average each bin.

    Equispaced bins cover [(j-1)/m, j/m), drop empty bins, and carry weight
    1/m.  Equal-count bins hold ``n // m`` consecutive samples, except the
    last, which takes the remainder; their weight is the gap between the
    smallest score of the bin and that of the next bin (1 after the last).
    """
    if spec.m > ds.n:
        raise ValidationError(f"more bins than samples ({spec.m} > {ds.n})")
    starts = _bin_starts(ds, spec)
    counts = np.diff(np.r_[starts, ds.n])
    avg_s = np.add.reduceat(ds.scores, starts) / counts
    avg_r = np.add.reduceat(ds.responses.astype(np.float64), starts) / counts
    left = ds.scores[starts]
    if spec.strategy is Strategy.EQUAL_COUNT:
        weights = np.diff(np.r_[left, 1.0])
    else:
        weights = np.full(starts.size, 1.0 / spec.m)
    return [
        BinSummary(float(a), float(w), float(s), float(r), int(c))
        for a, w, s, r, c in zip(left, weights, avg_s, avg_r, counts)
    ]


def ece(ds: Dataset, spec: BinningSpec) -> EceReport:
    bins = assign_bins(ds, spec)
    w = np.array([b.weight for b in bins])
    gap = np.array([b.avg_response - b.avg_score for b in bins])
    return EceReport(
        ece1=math.fsum(w * np.abs(gap)),
        ece2=math.fsum(w * gap**2),
        spec=spec,
        bins=tuple(bins),
    )


@njit(cache=True)
def _compensated_cumsum(x):
    # Neumaier summation, one running total per prefix
    out = np.empty(x.size + 1)
    out[0] = 0.0
    total = 0.0
    comp = 0.0
    for i in range(x.size):
        t = total + x[i]
        if abs(total) >= abs(x[i]):
            comp += (total - t) + x[i]
        else:
            comp += (x[i] - t) + total
        total = t
        out[i + 1] = total + comp
    return out


def cumulative_curve(ds: Dataset) -> CumulativeCurve:
    n = ds.n
    hits = np.r_[0, np.cumsum(ds.responses, dtype=np.int64)]
    expected = _compensated_cumsum(ds.scores)
    values = (hits - expected) / n
    return CumulativeCurve(_frozen(values), _frozen(np.arange(n + 1) / n))


def sigma_n(ds: Dataset) -> float:
    """Standard deviation of C_n under perfect calibration."""
    var = math.fsum(ds.scores * (1.0 - ds.scores))
    if var <= 0:
        raise DegenerateScoresError("degenerate scores: sigma_n is zero")
    return math.sqrt(var) / ds.n


TailFn = Callable[[float], object]


def _as_p(result) -> float:
    return float(getattr(result, "p", result))


def ecce(ds: Dataset, pvalue_provider: tuple[TailFn, TailFn] | None = None) -> EcceReport:
    """ECCE-MAD and ECCE-R with their normalized values and P-values.

    `pvalue_provider` is a pair of tail functions (max-abs, range) taking
    the normalized statistic; it defaults to the Brownian-motion tails in
    :mod:`ecce.pvalues`.
    """
    if pvalue_provider is None:
        from .pvalues import tail_maxabs, tail_range

        pvalue_provider = (tail_maxabs, tail_range)
    tail_mad, tail_r = pvalue_provider
    sigma = sigma_n(ds)
    c = cumulative_curve(ds).values
    mad = float(np.max(np.abs(c[1:])))
    rng = float(c.max() - c.min())
    return EcceReport(
        ecce_mad=mad,
        ecce_r=rng,
        sigma_n=sigma,
        mad_normalized=mad / sigma,
        r_normalized=rng / sigma,
        p_mad=_as_p(tail_mad(mad / sigma)),
        p_r=_as_p(tail_r(rng / sigma)),
    )


def max_interval_miscalibration(ds: Dataset) -> float:
    """Largest |sum of (R_j - S_j)/n| over contiguous index intervals.

    Brute force over all O(n^2) intervals; equals ECCE-R and serves as an
    independent check of it.
    """
    d = (ds.responses - ds.scores) / ds.n
    best = 0.0
    for i in range(d.size):
        partial = np.cumsum(d[i:])
        best = max(best, float(np.max(np.abs(partial))))
    return best

