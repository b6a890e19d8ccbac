"""Exact #SAT via counting DPLL with free-variable multiplication.

A subtree whose clause set empties with k variables still unassigned
contributes 2**k models.  Unit propagation is applied (it is forced), but
pure-literal elimination is not, since it is unsound for counting.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .cnf import CnfFormula

DEFAULT_MAX_VARS = 26


class TooManyVariables(ValueError):
    pass


class UncountedInstance(ValueError):
    pass


@dataclass(frozen=True)
class CountResult:
    model_count: int
    sat_ratio: Fraction  # model_count / 2**n, exact


def _simplify(clauses: list[tuple[int, ...]], true_lit: int) -> list[tuple[int, ...]] | None:
    false_lit = -true_lit
    out: list[tuple[int, ...]] = []
    for clause in clauses:
        if true_lit in clause:
            continue
        if false_lit in clause:
            clause = tuple(lit for lit in clause if lit != false_lit)
            if not clause:
                return None
        out.append(clause)
    return out


def _pick_branch_var(clauses: Sequence[tuple[int, ...]]) -> int:
    min_len = min(len(c) for c in clauses)
    counts: dict[int, int] = {}
    for clause in clauses:
        if len(clause) != min_len:
            continue
        for lit in clause:
            counts[abs(lit)] = counts.get(abs(lit), 0) + 1
    return max(counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]


def _count(clauses: list[tuple[int, ...]], unassigned: int) -> int:
    while True:
        unit = None
        for clause in clauses:
            if not clause:
                return 0
            if len(clause) == 1:
                unit = clause[0]
                break
        if unit is None:
            break
        simplified = _simplify(clauses, unit)
        if simplified is None:
            return 0
        clauses = simplified
        unassigned -= 1
    if not clauses:
        return 1 << unassigned
    var = _pick_branch_var(clauses)
    total = 0
    for value in (True, False):
        branch = _simplify(clauses, var if value else -var)
        if branch is not None:
            total += _count(branch, unassigned - 1)
    return total


def count_models(formula: CnfFormula, max_vars: int = DEFAULT_MAX_VARS) -> CountResult:
    """Exact model count and satisfiability ratio of a formula.

    Raises TooManyVariables above the configured ceiling (counting is
    exponential; the ceiling guards against accidental huge inputs).
    """
    n = formula.num_vars
    if n > max_vars:
        raise TooManyVariables(f"{n} variables exceeds the ceiling of {max_vars}")
    count = _count([tuple(c) for c in formula.clauses], n)
    return CountResult(model_count=count, sat_ratio=Fraction(count, 1 << n))


def add_counts(instances: Iterable, max_vars: int = DEFAULT_MAX_VARS) -> list:
    """Return copies of the given instances with model_count filled in."""
    out = []
    for inst in instances:
        result = count_models(inst.formula, max_vars=max_vars)
        out.append(replace(inst, model_count=result.model_count))
    return out


@dataclass(frozen=True)
class RatioBin:
    lo: Fraction  # exclusive
    hi: Fraction  # inclusive
    instances: tuple


def default_ratio_edges(max_n: int) -> list[Fraction]:
    """Log-scale (powers of two) bin edges covering every positive ratio a
    SAT instance with up to max_n variables can have."""
    return [Fraction(1, 1 << i) for i in range(max_n + 1, -1, -1)]


def ratio_bins(instances: Sequence, edges: Sequence[Fraction] | None = None) -> list[RatioBin]:
    """Group SAT instances into log-scale satisfiability-ratio bins.

    Only SAT-labeled instances participate (unSAT ones are filtered out).
    Each instance lands in exactly one bin (lo < ratio <= hi); empty bins are
    preserved.  Raises UncountedInstance if a SAT instance has no count.
    """
    sat_instances = [inst for inst in instances if inst.label == "SAT"]
    for inst in sat_instances:
        if inst.model_count is None:
            raise UncountedInstance(f"instance {inst.id} has no model count")
    if edges is None:
        max_n = max((inst.n for inst in sat_instances), default=1)
        edges = default_ratio_edges(max_n)
    edges = sorted(Fraction(e) for e in edges)
    if len(edges) < 2:
        raise ValueError("need at least two bin edges")
    bins: list[list] = [[] for _ in range(len(edges) - 1)]
    for inst in sat_instances:
        ratio = Fraction(inst.model_count, 1 << inst.n)
        if ratio <= edges[0] or ratio > edges[-1]:
            raise ValueError(f"ratio {ratio} outside bin edges for instance {inst.id}")
        # rightmost bin whose lower edge is below the ratio
        for k in range(len(bins) - 1, -1, -1):
            if edges[k] < ratio:
                bins[k].append(inst)
                break
    return [
        RatioBin(lo=edges[k], hi=edges[k + 1], instances=tuple(bins[k]))
        for k in range(len(bins))
    ]
