"""Aggregate evaluation records into the standard analyses.

All windowed series pool instance-level outcomes (sum of numerators over sum
of denominators across the window), not means of per-alpha means, so uneven
per-alpha supports are weighted faithfully.  Accuracy counts unparseable and
transport-error records as incorrect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .counter import default_ratio_edges, ratio_bins
from .generator import Instance
from .harness import VERDICT_CORRECT, EvalRecord

REGION_SPLIT = "split"


class EmptyJoin(ValueError):
    pass


class MissingCounts(ValueError):
    pass


class EmptyProfile(ValueError):
    pass


@dataclass(frozen=True)
class MetricSeries:
    """An x/y series with per-point support and window metadata (window=1
    means no smoothing)."""

    label: str
    window: int
    points: tuple[tuple[float, float, int], ...]  # (x, y, support)

    @property
    def xs(self) -> list[float]:
        return [p[0] for p in self.points]

    @property
    def ys(self) -> list[float]:
        return [p[1] for p in self.points]


def _join(records: Sequence[EvalRecord], dataset: Sequence[Instance]) -> list[tuple[EvalRecord, Instance]]:
    by_id = {inst.id: inst for inst in dataset}
    pairs = [(rec, by_id[rec.instance_id]) for rec in records if rec.instance_id in by_id]
    if not pairs:
        raise EmptyJoin("no records join to the dataset by instance_id")
    return pairs


def _windowed_series(
    label: str, groups: dict[float, tuple[float, int]], window: int
) -> MetricSeries:
    """Slide a window of `window` consecutive x values (step 1) over sorted
    groups of (sum, count); y is the pooled mean.  If there are fewer groups
    than the window size, a single pooled point is emitted."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    xs = sorted(groups)
    if len(xs) >= window:
        starts = range(len(xs) - window + 1)
        spans = [xs[i : i + window] for i in starts]
    else:
        spans = [xs]
    points = []
    for span in spans:
        total = sum(groups[x][0] for x in span)
        count = sum(groups[x][1] for x in span)
        points.append((sum(span) / len(span), total / count, count))
    return MetricSeries(label=label, window=window, points=tuple(points))


def accuracy_vs_alpha(
    records: Sequence[EvalRecord],
    dataset: Sequence[Instance],
    window: int = 4,
    label: str = "accuracy_vs_alpha",
) -> MetricSeries:
    """Pooled accuracy against alpha under a moving window over the distinct
    grid alpha values."""
    groups: dict[float, tuple[float, int]] = {}
    for rec, inst in _join(records, dataset):
        total, count = groups.get(inst.alpha, (0.0, 0))
        groups[inst.alpha] = (total + (1.0 if rec.verdict == VERDICT_CORRECT else 0.0), count + 1)
    return _windowed_series(label, groups, window)


def tokens_vs_alpha(
    records: Sequence[EvalRecord],
    dataset: Sequence[Instance],
    window: int = 4,
    label: str = "tokens_vs_alpha",
) -> MetricSeries:
    """Mean completion tokens against alpha under the same moving window."""
    groups: dict[float, tuple[float, int]] = {}
    for rec, inst in _join(records, dataset):
        total, count = groups.get(inst.alpha, (0.0, 0))
        groups[inst.alpha] = (total + rec.completion_tokens, count + 1)
    return _windowed_series(label, groups, window)


def accuracy_vs_ratio(
    records: Sequence[EvalRecord],
    dataset: Sequence[Instance],
    region_filter: object = None,
    edges: Sequence[Fraction] | None = None,
) -> list[MetricSeries]:
    """Accuracy against the satisfiability ratio over log-scale bins.

    Only SAT instances participate.  region_filter may be None (one pooled
    series), a Region (that region only), or "split" (one series per region
    present).  Raises MissingCounts if a joined SAT instance has no count.
    """
    pairs = [(rec, inst) for rec, inst in _join(records, dataset) if inst.label == "SAT"]
    if not pairs:
        raise EmptyJoin("no SAT-labeled records join to the dataset")
    for _, inst in pairs:
        if inst.model_count is None:
            raise MissingCounts(f"instance {inst.id} has no model count")
    if region_filter == REGION_SPLIT:
        regions = sorted({inst.region for _, inst in pairs})
    elif region_filter is None:
        regions = [None]
    else:
        regions = [region_filter]
    if edges is None:
        edges = default_ratio_edges(max(inst.n for _, inst in pairs))
    series = []
    for region in regions:
        selected = [p for p in pairs if region is None or p[1].region == region]
        label = "accuracy_vs_ratio" if region is None else f"accuracy_vs_ratio_{region.label}"
        outcomes: dict[str, list[float]] = {}
        unique: dict[str, Instance] = {}
        for rec, inst in selected:
            outcomes.setdefault(inst.id, []).append(1.0 if rec.verdict == VERDICT_CORRECT else 0.0)
            unique[inst.id] = inst
        bins = ratio_bins(list(unique.values()), edges)
        points = []
        for bin_ in bins:
            values = [v for inst in bin_.instances for v in outcomes[inst.id]]
            if not values:
                continue
            x = math.sqrt(float(bin_.lo) * float(bin_.hi))  # geometric bin midpoint
            points.append((x, sum(values) / len(values), len(values)))
        series.append(MetricSeries(label=label, window=1, points=tuple(points)))
    return series


_PREDICTED = ("sat", "unsat", "unparseable")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Decision-variant confusion counts: true label x predicted
    (sat / unsat / unparseable), plus true-normalized rates."""

    counts: dict[str, dict[str, int]]

    def normalized(self) -> dict[str, dict[str, float]]:
        out: dict[str, dict[str, float]] = {}
        for true_label, row in self.counts.items():
            total = sum(row.values())
            if total:
                out[true_label] = {pred: row[pred] / total for pred in _PREDICTED}
        return out

    @property
    def unsat_accuracy(self) -> float:
        """Rate of correctly predicting unsatisfiable instances."""
        return self.normalized().get("UNSAT", {}).get("unsat", 0.0)


def confusion(records: Sequence[EvalRecord], dataset: Sequence[Instance]) -> ConfusionMatrix:
    """Confusion matrix over decision-variant records, normalized over the
    true counts."""
    pairs = [(rec, inst) for rec, inst in _join(records, dataset) if rec.variant == "decision"]
    if not pairs:
        raise EmptyJoin("no decision-variant records join to the dataset")
    counts = {"SAT": dict.fromkeys(_PREDICTED, 0), "UNSAT": dict.fromkeys(_PREDICTED, 0)}
    for rec, inst in pairs:
        if rec.parsed.kind == "yes":
            predicted = "sat"
        elif rec.parsed.kind == "no":
            predicted = "unsat"
        else:
            predicted = "unparseable"
        counts[inst.label][predicted] += 1
    return ConfusionMatrix(counts=counts)


# --- CSV emission ------------------------------------------------------------


def series_to_csv(series: MetricSeries) -> str:
    """Stable CSV form: two metadata rows, then x,y,support rows; floats use
    repr so parsing reproduces the series exactly."""
    if "," in series.label or "\n" in series.label:
        raise ValueError("series label must not contain commas or newlines")
    lines = [f"label,{series.label}", f"window,{series.window}", "x,y,support"]
    for x, y, support in series.points:
        lines.append(f"{x!r},{y!r},{support}")
    return "\n".join(lines) + "\n"


def series_from_csv(text: str) -> MetricSeries:
    lines = [line for line in text.splitlines() if line]
    if len(lines) < 3 or not lines[0].startswith("label,") or not lines[1].startswith("window,"):
        raise ValueError("not a series CSV")
    label = lines[0].split(",", 1)[1]
    window = int(lines[1].split(",", 1)[1])
    points = []
    for line in lines[3:]:
        x, y, support = line.split(",")
        points.append((float(x), float(y), int(support)))
    return MetricSeries(label=label, window=window, points=tuple(points))


def confusion_to_csv(matrix: ConfusionMatrix) -> str:
    normalized = matrix.normalized()
    lines = ["true,predicted,count,rate"]
    for true_label in ("SAT", "UNSAT"):
        row = matrix.counts.get(true_label, {})
        for pred in _PREDICTED:
            count = row.get(pred, 0)
            rate = normalized.get(true_label, {}).get(pred, 0.0)
            lines.append(f"{true_label},{pred},{count},{rate!r}")
    return "\n".join(lines) + "\n"


def profile_to_csv(rows: Sequence, with_time: bool = False) -> str:
    """CSV for a hardness profile.  Wall-time is excluded by default so the
    output is byte-stable across runs."""
    header = "n,alpha,p_sat,mean_decisions,support"
    if with_time:
        header += ",mean_wall_time"
    lines = [header]
    for row in rows:
        line = f"{row.n},{row.alpha!r},{row.p_sat!r},{row.mean_decisions!r},{row.support}"
        if with_time:
            line += f",{row.mean_wall_time!r}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def find_crossing(points: Sequence[tuple[float, float]], level: float = 0.5) -> float | None:
    """x where a piecewise-linear curve first descends through `level`."""
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if y0 >= level > y1:
            return x0 + (y0 - level) * (x1 - x0) / (y0 - y1)
    return None


def phase_chart(profile: Sequence, with_time: bool = False) -> tuple[str, str]:
    """Dual-axis phase-transition chart from a hardness profile: P(SAT) on the
    left axis, mean decisions on the right, the critical density 4.267 marked,
    and the first 0.5 crossing annotated when present.

    Returns (svg_text, csv_text)."""
    from .charts import ChartSeries, line_chart
    from .generator import CRITICAL_ALPHA

    if not profile:
        raise EmptyProfile("profile has no rows")
    by_n: dict[int, list] = {}
    for row in profile:
        by_n.setdefault(row.n, []).append(row)
    series = []
    vlines = [(CRITICAL_ALPHA, "critical 4.267")]
    for n, rows in sorted(by_n.items()):
        rows = sorted(rows, key=lambda r: r.alpha)
        p_points = [(r.alpha, r.p_sat) for r in rows]
        series.append(ChartSeries(label=f"P(SAT) n={n}", points=p_points))
        series.append(
            ChartSeries(
                label=f"mean decisions n={n}",
                points=[(r.alpha, r.mean_decisions) for r in rows],
                axis="right",
            )
        )
        if len(p_points) > 1:
            crossing = find_crossing(p_points)
            if crossing is not None:
                vlines.append((crossing, f"0.5 @ {crossing:.2f}"))
    svg = line_chart(
        series,
        title="Random 3-SAT phase transition",
        x_label="clause density (m/n)",
        y_label="P(SAT)",
        y2_label="mean decisions",
        vlines=vlines,
        y_range=(0.0, 1.0),
    )
    return svg, profile_to_csv(profile, with_time=with_time)


def profile_from_csv(text: str):
    from .solver import ProfileRow

    lines = [line for line in text.splitlines() if line]
    if not lines or not lines[0].startswith("n,alpha,p_sat,mean_decisions"):
        raise ValueError("not a profile CSV")
    with_time = lines[0].endswith(",mean_wall_time")
    rows = []
    for line in lines[1:]:
        fields = line.split(",")
        rows.append(
            ProfileRow(
                n=int(fields[0]),
                alpha=float(fields[1]),
                p_sat=float(fields[2]),
                mean_decisions=float(fields[3]),
                support=int(fields[4]),
                mean_wall_time=float(fields[5]) if with_time else 0.0,
            )
        )
    return rows
