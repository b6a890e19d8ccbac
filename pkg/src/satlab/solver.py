"""Backtracking DPLL solver with unit propagation and pure-literal elimination.

Complete and sound at desk scale (n up to ~30).  Branching is deterministic:
the most frequent unassigned variable among the shortest active clauses,
positive polarity first, ties broken by lowest variable index.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

from .cnf import Assignment, CnfFormula

SAT = "SAT"
UNSAT = "UNSAT"


@dataclass
class SolveStats:
    decisions: int = 0
    unit_propagations: int = 0
    pure_eliminations: int = 0
    backtracks: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class SolveResult:
    verdict: str  # SAT or UNSAT
    witness: Assignment | None  # present iff SAT; total over 1..num_vars
    stats: SolveStats


class BudgetExhausted(Exception):
    """Raised when the decision budget runs out; carries partial stats."""

    def __init__(self, stats: SolveStats):
        super().__init__(f"decision budget exhausted after {stats.decisions} decisions")
        self.stats = stats


def _simplify(clauses: list[tuple[int, ...]], var: int, value: bool) -> list[tuple[int, ...]] | None:
    """Apply var=value: drop satisfied clauses, strip false literals.
    Returns None on an empty (falsified) clause."""
    true_lit = var if value else -var
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


def _propagate(
    clauses: list[tuple[int, ...]], assignment: Assignment, stats: SolveStats
) -> list[tuple[int, ...]] | None:
    """Unit propagation and pure-literal elimination to fixpoint.
    Mutates `assignment`; returns the simplified clause list or None on conflict."""
    while True:
        unit = None
        for clause in clauses:
            if not clause:
                return None
            if len(clause) == 1:
                unit = clause[0]
                break
        if unit is not None:
            assignment[abs(unit)] = unit > 0
            stats.unit_propagations += 1
            clauses = _simplify(clauses, abs(unit), unit > 0)
            if clauses is None:
                return None
            continue
        # no units left: look for pure literals (bit 1 = positive seen, bit 2 = negative)
        polarity: dict[int, int] = {}
        for clause in clauses:
            for lit in clause:
                polarity[abs(lit)] = polarity.get(abs(lit), 0) | (1 if lit > 0 else 2)
        pures = [var for var, mask in polarity.items() if mask != 3]
        if not pures:
            return clauses
        for var in sorted(pures):
            if var in assignment:
                continue
            value = polarity[var] == 1
            assignment[var] = value
            stats.pure_eliminations += 1
            clauses = _simplify(clauses, var, value)
            # a pure assignment only removes clauses, never empties one
            assert clauses is not None


def _pick_branch_var(clauses: Sequence[tuple[int, ...]]) -> int:
    """Most frequent variable in the shortest clauses; ties to lowest index."""
    min_len = min(len(c) for c in clauses)
    counts: dict[int, int] = {}
    for clause in clauses:
        if len(clause) != min_len:
            continue
        for lit in clause:
            var = abs(lit)
            counts[var] = counts.get(var, 0) + 1
    return max(counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]


def _search(
    clauses: list[tuple[int, ...]],
    assignment: Assignment,
    stats: SolveStats,
    budget: int | None,
) -> Assignment | None:
    clauses = _propagate(clauses, assignment, stats)
    if clauses is None:
        return None
    if not clauses:
        return assignment
    if budget is not None and stats.decisions >= budget:
        raise BudgetExhausted(stats)
    # one decision per branch point; the forced second polarity after a failed
    # subtree is accounted as a backtrack, not a new choice
    stats.decisions += 1
    var = _pick_branch_var(clauses)
    for value in (True, False):
        branch = _simplify(clauses, var, value)
        if branch is not None:
            result = _search(branch, {**assignment, var: value}, stats, budget)
            if result is not None:
                return result
        stats.backtracks += 1
    return None


def solve(formula: CnfFormula, budget: int | None = None) -> SolveResult:
    """Decide satisfiability and return a witness on SAT.

    Witnesses are completed to total assignments (unconstrained variables set
    to False).  `budget` caps the number of decisions; exceeding it raises
    BudgetExhausted with partial stats.
    """
    stats = SolveStats()
    start = time.perf_counter()
    try:
        found = _search([tuple(c) for c in formula.clauses], {}, stats, budget)
    finally:
        stats.wall_time = time.perf_counter() - start
    if found is None:
        return SolveResult(UNSAT, None, stats)
    witness = {var: found.get(var, False) for var in range(1, formula.num_vars + 1)}
    return SolveResult(SAT, witness, stats)


@dataclass(frozen=True)
class ProfileRow:
    """One cell of a hardness sweep."""

    n: int
    alpha: float
    p_sat: float
    mean_decisions: float
    mean_wall_time: float
    support: int


def hardness_profile(
    grid: Sequence[tuple[int, object]], per_cell: int, seed: int
) -> list[ProfileRow]:
    """Solve `per_cell` fresh random instances for every (n, alpha) cell and
    report P(SAT), mean decisions, and mean wall time per cell.

    The instance set is deterministic for a fixed seed (one derived seed per
    cell)."""
    from . import generator  # deferred: generator imports this module

    rows: list[ProfileRow] = []
    for n, alpha in grid:
        spec = generator.GenSpec(n=n, alpha=alpha, count=per_cell, seed=generator.cell_seed(seed, n, alpha))
        sat = 0
        decisions = 0
        wall = 0.0
        for formula in generator.sample_formulas(spec):
            result = solve(formula)
            if result.verdict == SAT:
                sat += 1
            decisions += result.stats.decisions
            wall += result.stats.wall_time
        rows.append(
            ProfileRow(
                n=n,
                alpha=float(spec.m) / n,
                p_sat=sat / per_cell if per_cell else 0.0,
                mean_decisions=decisions / per_cell if per_cell else 0.0,
                mean_wall_time=wall / per_cell if per_cell else 0.0,
                support=per_cell,
            )
        )
    return rows
