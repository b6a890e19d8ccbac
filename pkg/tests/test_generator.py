"""Generator tests: sampling model, determinism, grids, regions, persistence."""

import json
from fractions import Fraction

import pytest

from satlab.cnf import Status, evaluate_formula
from satlab.generator import (
    CorruptLine,
    GenSpec,
    InsufficientSamples,
    InvalidBounds,
    InvalidSpec,
    Instance,
    Region,
    SchemaVersionMismatch,
    build_dataset,
    classify_region,
    dataset_stats,
    estimate_bounds,
    generate,
    grid_row,
    read_dataset,
    reference_grid,
    sample_formulas,
    write_dataset,
)

from oracles import is_sat_bitset


class TestSampling:
    def test_deterministic_for_fixed_seed(self):
        spec = GenSpec(n=10, alpha=4.3, count=300, seed=7)
        assert generate(spec) == generate(spec)

    def test_m_and_clause_shape(self):
        for inst in generate(GenSpec(n=3, alpha=1.0, count=100, seed=1)):
            assert inst.m == 3
            assert len(inst.formula.clauses) == 3
            for clause in inst.formula.clauses:
                assert len(clause) == 3
                assert len({abs(l) for l in clause}) == 3

    def test_clauses_have_three_distinct_variables_at_scale(self):
        total = 0
        for seed in range(20):
            spec = GenSpec(n=9, alpha=1.0, count=500, seed=seed)
            for formula in sample_formulas(spec):
                for clause in formula.clauses:
                    assert len(clause) == 3
                    assert len({abs(l) for l in clause}) == 3
                total += 1
        assert total == 10_000

    def test_under_constrained_mostly_sat(self):
        # brute-force labels, independent of the solver used inside generate
        spec = GenSpec(n=10, alpha=2.0, count=300, seed=123)
        sat = sum(1 for f in sample_formulas(spec) if is_sat_bitset(f))
        assert sat / 300 >= 0.95

    def test_labels_and_witnesses_sound(self):
        for inst in generate(GenSpec(n=8, alpha=4.25, count=200, seed=5)):
            assert (inst.label == "SAT") == is_sat_bitset(inst.formula)
            if inst.label == "SAT":
                assert evaluate_formula(inst.formula, inst.witness) is Status.SATISFIED
            else:
                assert inst.witness is None

    def test_rounding_ties_to_even(self):
        assert GenSpec(n=10, alpha="4.25", count=1, seed=0).m == 42
        assert GenSpec(n=10, alpha="4.35", count=1, seed=0).m == 44
        assert GenSpec(n=10, alpha=4.3, count=1, seed=0).m == 43

    def test_invalid_specs(self):
        with pytest.raises(InvalidSpec):
            generate(GenSpec(n=2, alpha=3.0, count=1, seed=0))
        with pytest.raises(InvalidSpec):
            generate(GenSpec(n=5, alpha="0.05", count=1, seed=0))

    def test_alpha_recorded_exactly(self):
        spec = GenSpec(n=10, alpha=4.3, count=1, seed=0)
        assert spec.alpha == Fraction(43, 10)


class TestGrid:
    def test_row_counts_with_alpha_one(self):
        assert len(grid_row(3)) == 11
        assert len(grid_row(4)) == 26
        assert len(grid_row(10)) == 56

    def test_reference_grid_is_sixty_thousand_at_300(self):
        grid = reference_grid()
        assert len(grid) == 200
        assert len(grid) * 300 == 60000

    def test_full_table_has_208_cells(self):
        assert len(reference_grid(include_alpha_one=True)) == 208

    def test_per_n_distribution(self):
        grid = reference_grid()
        per_n = {}
        for n, _ in grid:
            per_n[n] = per_n.get(n, 0) + 300
        assert per_n == {
            3: 3000, 4: 7500, 5: 9000, 6: 4500,
            7: 3000, 8: 13500, 9: 3000, 10: 16500,
        }

    def test_grid_alphas_give_integral_m(self):
        for n, alpha in reference_grid(include_alpha_one=True):
            assert (alpha * n).denominator == 1

    def test_mean_n_and_m_of_reference_grid(self):
        grid = reference_grid()
        mean_n = sum(n for n, _ in grid) / len(grid)
        mean_m = sum(round(a * n) for n, a in grid) / len(grid)
        assert mean_n == 7.2
        assert mean_m == 33.0


class TestRegions:
    def test_critical_alpha_is_hard(self):
        assert classify_region(4.267, (3.0, 5.5)) is Region.HARD

    def test_extremes(self):
        assert classify_region(1.0) is Region.EASY_UNDER
        assert classify_region(11.0) is Region.EASY_OVER

    def test_inclusive_upper_bound(self):
        assert classify_region(5.5, (3.0, 5.5)) is Region.HARD

    def test_invalid_bounds(self):
        with pytest.raises(InvalidBounds):
            classify_region(2.0, (5.0, 3.0))
        with pytest.raises(InvalidBounds):
            classify_region(2.0, (4.5, 5.5))

    def test_region_ordering(self):
        assert Region.EASY_UNDER < Region.HARD < Region.EASY_OVER


def _synthetic(alpha: float, label: str, index: int) -> Instance:
    from satlab.cnf import CnfFormula

    return Instance(
        id=f"s{alpha}-{index}",
        formula=CnfFormula(3, [[1, 2, 3]]),
        n=3,
        m=3,
        alpha=alpha,
        label=label,
        region=Region.EASY_UNDER,
        seed=0,
    )


class TestEstimateBounds:
    def test_forced_bounds(self):
        samples = []
        for alpha, p in [(1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (4.3, 0.5), (6.0, 0.0), (7.0, 0.0)]:
            sat = int(round(p * 40))
            samples += [_synthetic(alpha, "SAT", i) for i in range(sat)]
            samples += [_synthetic(alpha, "UNSAT", 100 + i) for i in range(40 - sat)]
        assert estimate_bounds(samples) == (3.0, 6.0)

    def test_too_few_per_alpha(self):
        samples = [_synthetic(1.0, "SAT", i) for i in range(10)]
        with pytest.raises(InsufficientSamples):
            estimate_bounds(samples)

    def test_all_sat_has_no_upper_bound(self):
        samples = [_synthetic(a, "SAT", i) for a in (1.0, 2.0) for i in range(40)]
        with pytest.raises(InsufficientSamples):
            estimate_bounds(samples)


class TestDatasetIO:
    def test_round_trip(self, tmp_path):
        instances = build_dataset([(6, Fraction(2)), (6, Fraction(5))], per_alpha=50, seed=9)
        path = tmp_path / "ds.jsonl"
        write_dataset(instances, path)
        assert read_dataset(path) == instances

    def test_round_trip_is_byte_stable(self, tmp_path):
        instances = generate(GenSpec(n=5, alpha=3.0, count=30, seed=2))
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_dataset(instances, p1)
        write_dataset(read_dataset(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_truncated_final_line(self, tmp_path):
        instances = generate(GenSpec(n=4, alpha=2.0, count=3, seed=1))
        path = tmp_path / "ds.jsonl"
        write_dataset(instances, path)
        raw = path.read_bytes()
        path.write_bytes(raw[:-20])
        with pytest.raises(CorruptLine):
            read_dataset(path)

    def test_schema_version_mismatch(self, tmp_path):
        path = tmp_path / "ds.jsonl"
        record = {"schema_version": 99, "id": "x"}
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(SchemaVersionMismatch):
            read_dataset(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "ds.jsonl"
        path.write_text("")
        assert read_dataset(path) == []

    def test_build_dataset_order_independent_of_parallelism(self):
        grid = [(5, Fraction(2)), (5, Fraction(4)), (6, Fraction(3))]
        serial = build_dataset(grid, per_alpha=20, seed=3, parallelism=1)
        parallel = build_dataset(grid, per_alpha=20, seed=3, parallelism=2)
        assert serial == parallel


def test_dataset_stats_shapes():
    instances = build_dataset([(5, Fraction(2)), (5, Fraction(8))], per_alpha=40, seed=4)
    stats = dataset_stats(instances)
    assert stats["total"] == 80
    assert stats["sat"] + stats["unsat"] == 80
    assert 0.0 <= stats["sat_fraction"] <= 1.0
    assert stats["mean_n"] == 5.0
    m_total = sum(sat + unsat for _, sat, unsat in stats["m_histogram"])
    assert m_total == 80
