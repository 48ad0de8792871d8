"""Sweeps over bin counts and sample sizes, and bootstrap reliability bands."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .metrics import BinningSpec, Dataset, Strategy, canonicalize, assign_bins, ece, ecce
from .synth import CalibrationFunction, GridKind, ScoreGrid, draw_responses, make_scores

DEFAULT_SIZES = (8192, 16384, 32768, 65536, 131072)


@dataclass
class SweepResult:
    """Metric series over a common axis of bin counts or sample sizes.

    Series keys are slash-joined names: ``metric/strategy`` for bin sweeps
    and ``metric/calibration/grid`` for sample-size sweeps.
    """

    axis: list[int]
    axis_name: str
    series: dict[str, list[float]]
    realizations: int = 1

    def __post_init__(self):
        if self.realizations < 1:
            raise ValidationError("realizations must be at least 1")
        for key, values in self.series.items():
            if len(values) != len(self.axis):
                raise ValidationError(f"series {key!r} does not match the axis length")


@dataclass(frozen=True)
class BootstrapBand:
    curves: tuple[tuple[tuple[float, float], ...], ...]
    spec: BinningSpec
    confidence_note: str = "~95%"


def realization_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1)[0])


def sweep_bins(ds: Dataset, bin_counts) -> SweepResult:
    bin_counts = [int(m) for m in bin_counts]
    if not bin_counts:
        raise ValidationError("no bin counts given")
    series: dict[str, list[float]] = {}
    for strategy in Strategy:
        for m in bin_counts:
            rep = ece(ds, BinningSpec(strategy, m))
            series.setdefault(f"ece1/{strategy.value}", []).append(rep.ece1)
            series.setdefault(f"ece2/{strategy.value}", []).append(rep.ece2)
    return SweepResult(bin_counts, "bins", series)


@dataclass(frozen=True)
class SizeSweepConfig:
    sizes: tuple[int, ...] = DEFAULT_SIZES
    realizations: int = 9
    draws_per_bin: int = 16
    master_seed: int = 0
    grids: tuple[GridKind, ...] = tuple(GridKind)
    calibrations: tuple[CalibrationFunction, ...] = field(
        default_factory=lambda: (CalibrationFunction.perfect(), CalibrationFunction.sine())
    )

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        if not sizes or list(sizes) != sorted(sizes):
            raise ValidationError("sizes must be a nonempty ascending list")
        if self.realizations < 1 or self.draws_per_bin < 1:
            raise ValidationError("realizations and draws_per_bin must be positive")
        for n in sizes:
            if n % self.draws_per_bin:
                raise ValidationError(f"draws_per_bin {self.draws_per_bin} does not divide {n}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "grids", tuple(GridKind(g) for g in self.grids))


def _metrics(ds: Dataset, m: int) -> dict[str, float]:
    binned = ece(ds, BinningSpec(Strategy.EQUAL_COUNT, m))
    cum = ecce(ds)
    return {
        "ece1": binned.ece1,
        "ece2": binned.ece2,
        "ecce_mad": cum.ecce_mad,
        "ecce_r": cum.ecce_r,
        "ecce_mad_normalized": cum.mad_normalized,
        "ecce_r_normalized": cum.r_normalized,
    }


def sweep_n(cfg: SizeSweepConfig = SizeSweepConfig()) -> SweepResult:
    """Realization-averaged metrics as the sample size grows.

    ECEs use equal-count bins of ``cfg.draws_per_bin`` samples each.
    Realization i draws its responses with ``realization_seed(master, i)``,
    shared across sizes, grids and calibration functions.
    """
    seeds = [realization_seed(cfg.master_seed, i) for i in range(cfg.realizations)]
    series: dict[str, list[float]] = {}
    for cal in cfg.calibrations:
        for grid in cfg.grids:
            for n in cfg.sizes:
                scores = make_scores(ScoreGrid(grid, n))
                runs = [_metrics(draw_responses(scores, cal, s), n // cfg.draws_per_bin) for s in seeds]
                for metric in runs[0]:
                    mean = float(np.mean([r[metric] for r in runs]))
                    series.setdefault(f"{metric}/{cal.label}/{grid.value}", []).append(mean)
    return SweepResult(list(cfg.sizes), "n", series, cfg.realizations)


def reliability_points(bins) -> tuple[tuple[float, float], ...]:
    return tuple((b.avg_score, b.avg_response) for b in bins)


def bootstrap_band(ds: Dataset, spec: BinningSpec, curves: int = 20, seed: int = 0) -> BootstrapBand:
    """Reliability diagrams of `curves` resamples drawn with replacement.

    Resampling duplicates scores, so each resample is re-canonicalized,
    which jitters the ties apart before binning with the same `spec`.
    """
    if curves < 1:
        raise ValidationError("need at least one bootstrap curve")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(curves):
        idx = rng.integers(0, ds.n, size=ds.n)
        pairs = np.column_stack([ds.scores[idx], ds.responses[idx]])
        resampled = canonicalize(pairs, seed=int(rng.integers(2**63)))
        out.append(reliability_points(assign_bins(resampled, spec)))
    return BootstrapBand(tuple(out), spec)
