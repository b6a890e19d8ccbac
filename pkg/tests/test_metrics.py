"""Metrics tests: windowing fixtures, ratio curves, confusion, CSV, charts."""

import math

import pytest

from satlab.charts import series_chart
from satlab.cnf import CnfFormula
from satlab.encoding import ParsedAnswer
from satlab.generator import GenSpec, Instance, Region, generate
from satlab.counter import add_counts
from satlab.harness import EvalRecord, make_adapter, run_eval
from satlab.metrics import (
    REGION_SPLIT,
    ConfusionMatrix,
    EmptyJoin,
    EmptyProfile,
    MissingCounts,
    MetricSeries,
    accuracy_vs_alpha,
    accuracy_vs_ratio,
    confusion,
    confusion_to_csv,
    find_crossing,
    phase_chart,
    profile_from_csv,
    profile_to_csv,
    series_from_csv,
    series_to_csv,
    tokens_vs_alpha,
)
from satlab.solver import ProfileRow, hardness_profile


def _instance(alpha: float, index: int, label="SAT", n=3, count=None, region=Region.EASY_UNDER):
    return Instance(
        id=f"i{alpha}-{index}",
        formula=CnfFormula(n, [[1, 2, 3]]),
        n=n,
        m=int(alpha * n),
        alpha=alpha,
        label=label,
        region=region,
        seed=0,
        model_count=count,
    )


def _record(inst: Instance, verdict: str, tokens: int = 5, variant="search", parsed=None):
    return EvalRecord(
        instance_id=inst.id,
        adapter="synthetic",
        format="sat-cnf",
        variant=variant,
        shots=0,
        prompt_text="",
        raw_response="",
        parsed=parsed or ParsedAnswer.of_unsat(),
        verdict=verdict,
        prompt_tokens=10,
        completion_tokens=tokens,
        latency=0.0,
    )


def _fixture(per_alpha_accuracy: dict[float, float], support: int = 10):
    dataset, records = [], []
    for alpha, accuracy in per_alpha_accuracy.items():
        correct = round(accuracy * support)
        for i in range(support):
            inst = _instance(alpha, i)
            dataset.append(inst)
            records.append(_record(inst, "correct" if i < correct else "incorrect"))
    return records, dataset


class TestAccuracyVsAlpha:
    def test_window_four_pools_to_single_point(self):
        records, dataset = _fixture({1.0: 1.0, 2.0: 1.0, 3.0: 0.0, 4.0: 0.0})
        series = accuracy_vs_alpha(records, dataset, window=4)
        assert series.points == ((2.5, 0.5, 40),)

    def test_window_one_preserves_per_alpha(self):
        records, dataset = _fixture({1.0: 1.0, 2.0: 0.5, 3.0: 0.0})
        series = accuracy_vs_alpha(records, dataset, window=1)
        assert series.points == ((1.0, 1.0, 10), (2.0, 0.5, 10), (3.0, 0.0, 10))

    def test_sliding_windows_pool_not_average(self):
        # unequal supports: pooling and averaging disagree
        dataset, records = [], []
        for alpha, correct, total in [(1.0, 10, 10), (2.0, 0, 30)]:
            for i in range(total):
                inst = _instance(alpha, i)
                dataset.append(inst)
                records.append(_record(inst, "correct" if i < correct else "incorrect"))
        series = accuracy_vs_alpha(records, dataset, window=2)
        assert series.points == ((1.5, 0.25, 40),)  # pooled 10/40, not mean(1.0, 0.0)

    def test_oracle_records_flat_at_one(self):
        dataset = generate(GenSpec(n=6, alpha=3.0, count=30, seed=2))
        records = run_eval(dataset, make_adapter("scripted_oracle"), "sat-cnf", "search")
        series = accuracy_vs_alpha(records, dataset, window=4)
        assert all(y == 1.0 for _, y, _ in series.points)

    def test_unparseable_counts_as_incorrect(self):
        inst = _instance(1.0, 0)
        records = [_record(inst, "unparseable")]
        series = accuracy_vs_alpha(records, [inst], window=1)
        assert series.points == ((1.0, 0.0, 1),)

    def test_empty_join(self):
        inst = _instance(1.0, 0)
        with pytest.raises(EmptyJoin):
            accuracy_vs_alpha([_record(_instance(2.0, 99), "correct")], [inst])

    def test_supports_bookkeeping(self):
        records, dataset = _fixture({1.0: 1.0, 2.0: 1.0, 3.0: 0.0, 4.0: 0.5, 5.0: 0.5})
        per_alpha = accuracy_vs_alpha(records, dataset, window=1)
        assert sum(s for _, _, s in per_alpha.points) == len(records)
        windowed = accuracy_vs_alpha(records, dataset, window=4)
        assert [s for _, _, s in windowed.points] == [40, 40]


class TestTokensVsAlpha:
    def test_hand_computed_single_window(self):
        dataset, records = [], []
        for alpha, tokens in [(1.0, 10), (2.0, 20), (3.0, 30), (4.0, 40)]:
            inst = _instance(alpha, 0)
            dataset.append(inst)
            records.append(_record(inst, "correct", tokens=tokens))
        series = tokens_vs_alpha(records, dataset, window=4)
        assert series.points == ((2.5, 25.0, 4),)

    def test_window_one_preserves_means(self):
        dataset, records = [], []
        for alpha, tokens in [(1.0, 10), (2.0, 20)]:
            inst = _instance(alpha, 0)
            dataset.append(inst)
            records.append(_record(inst, "correct", tokens=tokens))
        series = tokens_vs_alpha(records, dataset, window=1)
        assert series.points == ((1.0, 10.0, 1), (2.0, 20.0, 1))

    def test_fixed_length_answers_flat_series(self):
        records, dataset = _fixture({1.0: 1.0, 2.0: 1.0, 3.0: 1.0})
        series = tokens_vs_alpha(records, dataset, window=2)
        assert all(y == 5.0 for _, y, _ in series.points)


class TestAccuracyVsRatio:
    def _counted_dataset(self):
        dataset = generate(GenSpec(n=8, alpha=3.0, count=40, seed=6))
        return add_counts(dataset)

    def test_oracle_flat_at_one(self):
        dataset = self._counted_dataset()
        records = run_eval(dataset, make_adapter("scripted_oracle"), "sat-cnf", "search")
        for series in accuracy_vs_ratio(records, dataset):
            assert all(y == 1.0 for _, y, _ in series.points)
            assert sum(s for _, _, s in series.points) == sum(
                1 for i in dataset if i.label == "SAT"
            )

    def test_missing_counts(self):
        dataset = generate(GenSpec(n=6, alpha=2.0, count=5, seed=1))
        records = run_eval(dataset, make_adapter("scripted_oracle"), "sat-cnf", "search")
        with pytest.raises(MissingCounts):
            accuracy_vs_ratio(records, dataset)

    def test_region_split_produces_one_series_per_region(self):
        sat_hard = _instance(4.0, 0, count=2, region=Region.HARD)
        sat_easy = _instance(1.0, 1, count=4, region=Region.EASY_UNDER)
        records = [_record(sat_hard, "correct"), _record(sat_easy, "incorrect")]
        series = accuracy_vs_ratio(records, [sat_hard, sat_easy], region_filter=REGION_SPLIT)
        assert [s.label for s in series] == [
            "accuracy_vs_ratio_easy_under",
            "accuracy_vs_ratio_hard",
        ]

    def test_noisy_accuracy_within_binomial_ci(self):
        dataset = self._counted_dataset()
        noisy = make_adapter("scripted_noisy", p=0.5, seed=3)
        records = run_eval(dataset, noisy, "sat-cnf", "search")
        for series in accuracy_vs_ratio(records, dataset):
            for _, y, support in series.points:
                half_width = 2.576 * math.sqrt(0.25 / support)
                assert abs(y - 0.5) <= max(half_width, 0.5)


class TestConfusion:
    def _decision_records(self, adapter_name="scripted_oracle", **kwargs):
        dataset = generate(GenSpec(n=8, alpha=5.0, count=60, seed=12))
        adapter = make_adapter(adapter_name, **kwargs)
        return run_eval(dataset, adapter, "sat-cnf", "decision"), dataset

    def test_oracle_identity_matrix(self):
        records, dataset = self._decision_records()
        matrix = confusion(records, dataset)
        normalized = matrix.normalized()
        assert normalized["SAT"]["sat"] == 1.0
        assert normalized["UNSAT"]["unsat"] == 1.0
        assert matrix.unsat_accuracy == 1.0

    def test_constant_yes_has_zero_unsat_accuracy(self):
        records, dataset = self._decision_records("scripted_constant", answer="yes")
        matrix = confusion(records, dataset)
        assert matrix.unsat_accuracy == 0.0
        assert matrix.normalized()["SAT"]["sat"] == 1.0

    def test_rows_normalize_to_one(self):
        records, dataset = self._decision_records("scripted_noisy", p=0.8, seed=5)
        normalized = confusion(records, dataset).normalized()
        for row in normalized.values():
            assert abs(sum(row.values()) - 1.0) <= 1e-12

    def test_requires_decision_records(self):
        dataset = generate(GenSpec(n=6, alpha=3.0, count=5, seed=1))
        records = run_eval(dataset, make_adapter("scripted_oracle"), "sat-cnf", "search")
        with pytest.raises(EmptyJoin):
            confusion(records, dataset)


class TestCsv:
    def test_series_round_trip_bytes(self):
        series = MetricSeries("demo", 4, ((1.0, 0.3333333333333333, 12), (2.5, 1.0, 7)))
        text = series_to_csv(series)
        assert series_from_csv(text) == series
        assert series_to_csv(series_from_csv(text)) == text

    def test_confusion_csv_shape(self):
        matrix = ConfusionMatrix({"SAT": {"sat": 3, "unsat": 1, "unparseable": 0},
                                  "UNSAT": {"sat": 0, "unsat": 2, "unparseable": 2}})
        text = confusion_to_csv(matrix)
        lines = text.strip().splitlines()
        assert lines[0] == "true,predicted,count,rate"
        assert len(lines) == 7

    def test_profile_round_trip(self):
        rows = [ProfileRow(10, 2.0, 1.0, 3.5, 0.0, 100), ProfileRow(10, 4.3, 0.55, 9.25, 0.0, 100)]
        text = profile_to_csv(rows)
        assert profile_from_csv(text) == rows


class TestPhaseChart:
    def test_crossing_interpolation(self):
        assert find_crossing([(4.0, 0.9), (5.0, 0.1)]) == pytest.approx(4.5)
        assert find_crossing([(1.0, 1.0), (2.0, 0.98)]) is None

    def test_chart_and_csv(self):
        profile = hardness_profile([(8, a) for a in (2.0, 4.25, 6.0, 8.0)], per_cell=40, seed=3)
        svg, csv_text = phase_chart(profile)
        assert svg.startswith("<svg")
        assert "critical 4.267" in svg
        assert profile_from_csv(csv_text) == [
            ProfileRow(r.n, r.alpha, r.p_sat, r.mean_decisions, 0.0, r.support) for r in profile
        ]

    def test_single_point_profile_has_no_crossing_annotation(self):
        profile = [ProfileRow(10, 4.0, 0.6, 5.0, 0.0, 50)]
        svg, _ = phase_chart(profile)
        assert "0.5 @" not in svg

    def test_empty_profile(self):
        with pytest.raises(EmptyProfile):
            phase_chart([])

    def test_svg_is_deterministic(self):
        profile = [ProfileRow(10, 2.0, 1.0, 3.0, 0.123, 50), ProfileRow(10, 6.0, 0.2, 8.0, 0.456, 50)]
        assert phase_chart(profile) == phase_chart(profile)


def test_series_chart_renders():
    series = MetricSeries("acc", 4, ((1.0, 0.9, 10), (2.0, 0.8, 10), (3.0, 0.4, 10)))
    svg = series_chart([series], "demo", "alpha", "accuracy")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
