"""Composite scores and tuning-parameter selection under a DBRL threshold."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Sequence

import numpy as np

from .baselines import MaskSpec, apply_mask
from .core import ArrayLike, InvalidInputError, InvalidParameterError, as_array, derive_seed
from .metrics import MetricBundle, evaluate

DEFAULT_THRESHOLD = 0.2


@dataclass(frozen=True)
class ScoreBundle:
    avg_il: float
    avg_dr: float
    overall: float


def compute_scores(m: MetricBundle) -> ScoreBundle:
    for name in MetricBundle.BOUNDED:
        v = getattr(m, name)
        if not 0.0 <= v <= 1.0:
            raise InvalidInputError(f"{name}={v} is outside [0, 1]")
    avg_il = m.ps_scaled / 3 + m.pil / 3 + m.brmae / 6 + m.brmse / 6
    avg_dr = m.dbrl / 3 + m.rid / 3 + m.sdid / 3
    overall = (
        m.dbrl / 6 + m.rid / 6 + m.sdid / 6 + m.ps_scaled / 6 + m.pil / 6 + m.brmae / 12 + m.brmse / 12
    )
    return ScoreBundle(avg_il, avg_dr, overall)


def median_bundle(bundles: Sequence[MetricBundle]) -> MetricBundle:
    return MetricBundle(**{f.name: float(np.median([getattr(b, f.name) for b in bundles])) for f in fields(MetricBundle)})


@dataclass
class GridPoint:
    param: float
    replications: list[MetricBundle]
    median: MetricBundle
    scores: ScoreBundle

    @property
    def dbrl(self) -> float:
        return self.median.dbrl

    def as_dict(self) -> dict:
        return {
            "param": self.param,
            "median": self.median.as_dict(),
            "scores": asdict(self.scores),
            "replications": [b.as_dict() for b in self.replications],
        }


@dataclass
class TuningResult:
    grid: list[GridPoint]
    threshold: float
    feasible_set: list[float] = field(default_factory=list)
    selected: float | None = None

    @property
    def feasible(self) -> bool:
        return self.selected is not None

    def selected_point(self) -> GridPoint | None:
        for g in self.grid:
            if g.param == self.selected:
                return g
        return None

    def curves(self) -> dict[str, list[float]]:
        """Plot-ready columns: parameter, average IL, average DR, overall score and DBRL."""
        return {
            "param": [g.param for g in self.grid],
            "avg_il": [g.scores.avg_il for g in self.grid],
            "avg_dr": [g.scores.avg_dr for g in self.grid],
            "overall": [g.scores.overall for g in self.grid],
            "dbrl": [g.dbrl for g in self.grid],
        }

    def as_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "feasible": self.feasible,
            "feasible_set": self.feasible_set,
            "selected": self.selected,
            "curves": self.curves(),
            "grid": [g.as_dict() for g in self.grid],
        }


def select_from_grid(
    points: Sequence[tuple[float, float, float, float]], threshold: float
) -> tuple[list[float], float | None]:
    """Pick the best parameter from (param, dbrl, overall, avg_dr) rows.

    Feasible rows have dbrl < threshold. Among them the lowest overall score
    wins; ties go to the lower avg_dr, then the smaller parameter.
    Returns (feasible params, selected param or None).
    """
    feasible = [pt for pt in points if pt[1] < threshold]
    if not feasible:
        return [], None
    best = min(feasible, key=lambda pt: (pt[2], pt[3], pt[0]))
    return [pt[0] for pt in feasible], best[0]


def _run_one(args) -> MetricBundle:
    x, spec, sorted_metrics = args
    masked = apply_mask(spec, x)
    return evaluate(x, masked, sorted_metrics=sorted_metrics, seed=derive_seed(spec.seed, 1))


def select_best_parameter(
    original: ArrayLike,
    spec_grid: Sequence[MaskSpec],
    threshold: float = DEFAULT_THRESHOLD,
    replications: int = 30,
    seed: int = 0,
    sorted_metrics: bool | None = None,
    workers: int = 1,
) -> TuningResult:
    """Evaluate every grid point over seeded replications and select a parameter.

    Replication r of grid point g masks with seed ``derive_seed(seed, g, r)``.
    Deterministic methods run once. Metrics are medians over replications;
    SJPPDS methods use averaged-sorted metrics unless ``sorted_metrics`` says
    otherwise.
    """
    if not spec_grid:
        raise InvalidParameterError("empty tuning grid")
    if replications < 1:
        raise InvalidParameterError(f"replications must be >= 1, got {replications}")
    if not 0 < threshold <= 1:
        raise InvalidParameterError(f"threshold must be in (0, 1], got {threshold}")
    x = as_array(original)

    jobs = []
    owners = []
    for g, spec in enumerate(spec_grid):
        reps = 1 if spec.method.is_deterministic else replications
        use_sorted = spec.method.is_sjppds if sorted_metrics is None else sorted_metrics
        for r in range(reps):
            rep_spec = MaskSpec(spec.method, spec.param, derive_seed(seed, g, r))
            jobs.append((x, rep_spec, use_sorted))
            owners.append(g)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            bundles = list(pool.map(_run_one, jobs))
    else:
        bundles = [_run_one(j) for j in jobs]

    per_point: list[list[MetricBundle]] = [[] for _ in spec_grid]
    for g, b in zip(owners, bundles):
        per_point[g].append(b)

    grid = []
    for spec, reps in zip(spec_grid, per_point):
        med = median_bundle(reps)
        grid.append(GridPoint(float(spec.param), reps, med, compute_scores(med)))

    rows = [(g.param, g.dbrl, g.scores.overall, g.scores.avg_dr) for g in grid]
    feasible, selected = select_from_grid(rows, threshold)
    return TuningResult(grid, threshold, feasible, selected)


def parse_grid(text: str) -> list[float]:
    """Parse ``start:step:end`` (inclusive end) or a comma-separated list."""
    if ":" in text:
        try:
            start, step, end = (float(t) for t in text.split(":"))
        except ValueError as exc:
            raise InvalidParameterError(f"bad grid {text!r}; expected start:step:end") from exc
        if step <= 0 or end < start:
            raise InvalidParameterError(f"bad grid {text!r}; need step > 0 and end >= start")
        count = int(math.floor((end - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(count)]
    else:
        try:
            values = [float(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise InvalidParameterError(f"bad grid {text!r}") from exc
    if not values:
        raise InvalidParameterError("empty grid")
    return [int(v) if float(v).is_integer() else v for v in values]
