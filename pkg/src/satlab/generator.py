"""Seeded random 3-SAT generation over an (n, alpha) grid, labeling, region
tagging, and JSON Lines dataset persistence.

The sampling model is the standard uniform random 3-SAT distribution: each
clause picks 3 distinct variables uniformly without replacement and negates
each independently with probability 1/2; duplicate clauses across a formula
are permitted.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cnf import Assignment, CnfFormula
from .solver import SAT, solve
from .util import derive_seed, stable_id

CRITICAL_ALPHA = 4.267
DEFAULT_HARD_BOUNDS = (3.0, 5.5)
DEFAULT_DATASET_SEED = 1  # default master seed for dataset generation
DATASET_SCHEMA_VERSION = 1

LABEL_SAT = "SAT"
LABEL_UNSAT = "UNSAT"


class InvalidSpec(ValueError):
    pass


class InvalidBounds(ValueError):
    pass


class InsufficientSamples(ValueError):
    pass


class SchemaVersionMismatch(ValueError):
    pass


class CorruptLine(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class Region(enum.IntEnum):
    """Hardness band of an alpha value: below, inside, or above the critical
    window.  Ordered EASY_UNDER < HARD < EASY_OVER."""

    EASY_UNDER = 0
    HARD = 1
    EASY_OVER = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "Region":
        return cls[label.upper()]


def _as_fraction(alpha: object) -> Fraction:
    """Normalize an alpha given as int/float/str/Fraction to an exact rational.
    Floats are read through their shortest decimal repr, so 4.3 means 43/10."""
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, int):
        return Fraction(alpha)
    if isinstance(alpha, float):
        return Fraction(str(alpha))
    if isinstance(alpha, str):
        return Fraction(alpha)
    raise InvalidSpec(f"cannot interpret alpha {alpha!r}")


@dataclass(frozen=True)
class GenSpec:
    """One generation cell: draw `count` instances with `n` variables and
    m = round(alpha * n) clauses (ties to even) from RNG seed `seed`."""

    n: int
    alpha: Fraction
    count: int
    seed: int

    def __init__(self, n: int, alpha: object, count: int, seed: int):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "alpha", _as_fraction(alpha))
        object.__setattr__(self, "count", int(count))
        object.__setattr__(self, "seed", int(seed))

    @property
    def m(self) -> int:
        return round(self.alpha * self.n)

    def validate(self) -> None:
        if self.n < 3:
            raise InvalidSpec(f"n must be at least 3 for width-3 clauses, got {self.n}")
        if self.m < 1:
            raise InvalidSpec(f"alpha {self.alpha} gives m={self.m}; need at least 1 clause")
        if self.count < 0:
            raise InvalidSpec(f"count must be non-negative, got {self.count}")


@dataclass(frozen=True)
class Instance:
    """A generated, labeled, region-tagged 3-SAT problem with provenance."""

    id: str
    formula: CnfFormula
    n: int
    m: int
    alpha: float  # exactly m / n
    label: str  # SAT or UNSAT
    region: Region
    seed: int
    model_count: int | None = None
    witness: Assignment | None = None


def _random_clause(rng: random.Random, n: int) -> tuple[int, ...]:
    variables = rng.sample(range(1, n + 1), 3)
    return tuple(-v if rng.getrandbits(1) else v for v in variables)


def sample_formulas(spec: GenSpec) -> list[CnfFormula]:
    """Draw the raw formulas for a spec without labeling them."""
    spec.validate()
    rng = random.Random(spec.seed)
    m = spec.m
    return [
        CnfFormula(spec.n, [_random_clause(rng, spec.n) for _ in range(m)])
        for _ in range(spec.count)
    ]


def generate(
    spec: GenSpec, bounds: tuple[float, float] = DEFAULT_HARD_BOUNDS
) -> list[Instance]:
    """Generate, label (via the internal solver), and region-tag instances.

    Deterministic for a fixed spec: identical instances, labels, witnesses.
    """
    formulas = sample_formulas(spec)
    alpha = Fraction(spec.m, spec.n)
    region = classify_region(alpha, bounds)
    out: list[Instance] = []
    for index, formula in enumerate(formulas):
        result = solve(formula)
        out.append(
            Instance(
                id=stable_id(spec.seed, spec.n, float(alpha), index),
                formula=formula,
                n=spec.n,
                m=spec.m,
                alpha=float(alpha),
                label=LABEL_SAT if result.verdict == SAT else LABEL_UNSAT,
                region=region,
                seed=spec.seed,
                witness=result.witness,
            )
        )
    return out


_GRID_STEPS = {
    3: Fraction(1),
    4: Fraction(1, 4),
    5: Fraction(1, 5),
    6: Fraction(1, 2),
    7: Fraction(1),
    8: Fraction(1, 8),
    9: Fraction(1),
    10: Fraction(1, 10),
}


def grid_row(n: int, include_alpha_one: bool = True) -> list[Fraction]:
    """Alpha values for one n of the reference grid: a fine step from 1 to 6
    (the smallest increment that keeps m integral), then integers to 11."""
    if n not in _GRID_STEPS:
        raise InvalidSpec(f"no reference grid row for n={n} (have n in 3..10)")
    step = _GRID_STEPS[n]
    alphas: list[Fraction] = []
    alpha = Fraction(1)
    while alpha <= 6:
        alphas.append(alpha)
        alpha += step
    alphas.extend(Fraction(v) for v in range(7, 12))
    if not include_alpha_one:
        alphas = [a for a in alphas if a != 1]
    return alphas


def reference_grid(include_alpha_one: bool = False) -> list[tuple[int, Fraction]]:
    """The built-in benchmark grid of (n, alpha) cells for n in 3..10.

    The default 200-cell grid (alpha from just above 1 up to 11) is the one
    used for dataset generation: at 300 instances per cell it yields exactly
    60,000 instances.  With include_alpha_one=True the alpha=1.0 column is
    added to every row (208 cells)."""
    pairs: list[tuple[int, Fraction]] = []
    for n in sorted(_GRID_STEPS):
        pairs.extend((n, alpha) for alpha in grid_row(n, include_alpha_one))
    return pairs


def classify_region(
    alpha: object, bounds: tuple[float, float] = DEFAULT_HARD_BOUNDS
) -> Region:
    """Band an alpha value against the hard window [lo, hi] (inclusive).

    The bounds must bracket the critical density 4.267."""
    lo, hi = bounds
    if not (lo < hi):
        raise InvalidBounds(f"bounds must satisfy lo < hi, got {bounds}")
    if not (lo < CRITICAL_ALPHA < hi):
        raise InvalidBounds(f"bounds {bounds} do not bracket the critical alpha 4.267")
    value = float(_as_fraction(alpha)) if not isinstance(alpha, float) else alpha
    if value < lo:
        return Region.EASY_UNDER
    if value > hi:
        return Region.EASY_OVER
    return Region.HARD


def estimate_bounds(
    samples: Sequence[Instance], min_per_alpha: int = 30
) -> tuple[float, float]:
    """Empirical hard-region bounds from labeled samples spanning an alpha grid.

    lo is the largest grid alpha where P(SAT) is still >= 0.99, hi the
    smallest where it has dropped to <= 0.01 (where satisfiability stops being
    essentially deterministic on either side)."""
    groups: dict[float, list[Instance]] = {}
    for inst in samples:
        groups.setdefault(inst.alpha, []).append(inst)
    if not groups:
        raise InsufficientSamples("no samples given")
    for alpha, members in groups.items():
        if len(members) < min_per_alpha:
            raise InsufficientSamples(
                f"alpha {alpha} has {len(members)} samples; need at least {min_per_alpha}"
            )
    p_sat = {
        alpha: sum(1 for inst in members if inst.label == LABEL_SAT) / len(members)
        for alpha, members in groups.items()
    }
    los = [alpha for alpha, p in p_sat.items() if p >= 0.99]
    his = [alpha for alpha, p in p_sat.items() if p <= 0.01]
    if not los:
        raise InsufficientSamples("no alpha with P(SAT) >= 0.99; grid does not reach the easy side")
    if not his:
        raise InsufficientSamples("no alpha with P(SAT) <= 0.01; grid does not reach the over-constrained side")
    lo, hi = max(los), min(his)
    if not lo < hi:
        raise InsufficientSamples(f"estimated bounds are degenerate: lo={lo}, hi={hi}")
    return lo, hi


def cell_seed(master_seed: int, n: int, alpha: object) -> int:
    """Per-cell RNG seed derived from a master seed; stable across runs."""
    return derive_seed(master_seed, n, float(_as_fraction(alpha)))


def _instance_to_record(inst: Instance) -> dict:
    return {
        "schema_version": DATASET_SCHEMA_VERSION,
        "id": inst.id,
        "n": inst.n,
        "m": inst.m,
        "alpha": inst.alpha,
        "seed": inst.seed,
        "label": inst.label,
        "region": inst.region.label,
        "model_count": inst.model_count,
        "witness": None
        if inst.witness is None
        else {str(var): value for var, value in inst.witness.items()},
        "clauses": [list(clause) for clause in inst.formula.clauses],
    }


def _instance_from_record(record: dict) -> Instance:
    witness = record.get("witness")
    return Instance(
        id=record["id"],
        formula=CnfFormula(record["n"], record["clauses"]),
        n=record["n"],
        m=record["m"],
        alpha=record["alpha"],
        label=record["label"],
        region=Region.from_label(record["region"]),
        seed=record["seed"],
        model_count=record.get("model_count"),
        witness=None if witness is None else {int(k): v for k, v in witness.items()},
    )


def write_dataset(instances: Iterable[Instance], path) -> None:
    """Write one JSON object per line; round-trips bit-exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(_instance_to_record(inst), separators=(",", ":")))
            fh.write("\n")


def read_dataset(path) -> list[Instance]:
    """Read a JSON Lines dataset written by write_dataset.

    Raises CorruptLine (with the line number) on undecodable lines and
    SchemaVersionMismatch on records from an unknown schema."""
    instances: list[Instance] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptLine(lineno, f"undecodable JSON: {exc}") from None
            version = record.get("schema_version")
            if version != DATASET_SCHEMA_VERSION:
                raise SchemaVersionMismatch(
                    f"line {lineno}: schema_version {version!r}, expected {DATASET_SCHEMA_VERSION}"
                )
            try:
                instances.append(_instance_from_record(record))
            except (KeyError, TypeError, ValueError) as exc:
                raise CorruptLine(lineno, f"bad record: {exc}") from None
    return instances


def _build_cell(args: tuple) -> list[Instance]:
    n, alpha, per_alpha, master_seed, bounds, with_counts, max_vars = args
    spec = GenSpec(n=n, alpha=alpha, count=per_alpha, seed=cell_seed(master_seed, n, alpha))
    instances = generate(spec, bounds=bounds)
    if with_counts:
        from .counter import add_counts

        instances = add_counts(instances, max_vars=max_vars)
    return instances


def build_dataset(
    grid: Sequence[tuple[int, object]],
    per_alpha: int,
    seed: int = DEFAULT_DATASET_SEED,
    *,
    bounds: tuple[float, float] = DEFAULT_HARD_BOUNDS,
    with_counts: bool = True,
    parallelism: int = 1,
    max_count_vars: int = 26,
) -> list[Instance]:
    """Generate a full dataset over a grid: one derived seed per cell, cells
    emitted in grid order, so output is byte-reproducible regardless of
    parallelism."""
    jobs = [
        (n, _as_fraction(alpha), per_alpha, seed, bounds, with_counts, max_count_vars)
        for n, alpha in grid
    ]
    if parallelism > 1 and len(jobs) > 1:
        import multiprocessing

        with multiprocessing.Pool(parallelism) as pool:
            cell_lists = pool.map(_build_cell, jobs)
    else:
        cell_lists = [_build_cell(job) for job in jobs]
    return [inst for cell in cell_lists for inst in cell]


def dataset_stats(instances: Sequence[Instance]) -> dict:
    """Summary statistics mirroring the dataset report: totals, SAT fraction,
    and m / alpha histograms split by label."""
    total = len(instances)
    sat = [inst for inst in instances if inst.label == LABEL_SAT]
    unsat = [inst for inst in instances if inst.label == LABEL_UNSAT]

    def histogram(key) -> list[list]:
        buckets: dict[object, list[int]] = {}
        for inst in instances:
            entry = buckets.setdefault(key(inst), [0, 0])
            entry[0 if inst.label == LABEL_SAT else 1] += 1
        return [[value, counts[0], counts[1]] for value, counts in sorted(buckets.items())]

    def span(insts: Sequence[Instance], key) -> list:
        return [min(key(i) for i in insts), max(key(i) for i in insts)] if insts else [None, None]

    return {
        "total": total,
        "sat": len(sat),
        "unsat": len(unsat),
        "sat_fraction": len(sat) / total if total else 0.0,
        "mean_n": sum(i.n for i in instances) / total if total else 0.0,
        "mean_m": sum(i.m for i in instances) / total if total else 0.0,
        "mean_alpha": sum(i.alpha for i in instances) / total if total else 0.0,
        "m_range_sat": span(sat, lambda i: i.m),
        "m_range_unsat": span(unsat, lambda i: i.m),
        "alpha_range_sat": span(sat, lambda i: i.alpha),
        "alpha_range_unsat": span(unsat, lambda i: i.alpha),
        "m_histogram": histogram(lambda i: i.m),
        "alpha_histogram": histogram(lambda i: i.alpha),
    }
