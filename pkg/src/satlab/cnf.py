"""CNF formulas, partial assignments, three-valued evaluation, and DIMACS I/O.

Literals are signed integers: the magnitude is a 1-based variable index and
the sign is the polarity (negative means negated).  Clauses are tuples of
literals, formulas are tuples of clauses.  This is the one representation
used everywhere else in the package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

Literal = int
Clause = tuple[int, ...]
Assignment = dict[int, bool]


class Status(enum.Enum):
    """Three-valued outcome of evaluating a clause or formula."""

    SATISFIED = "satisfied"
    FALSIFIED = "falsified"
    UNDETERMINED = "undetermined"


class DimacsError(ValueError):
    """Malformed DIMACS input; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MalformedHeader(DimacsError):
    pass


class LiteralOutOfRange(DimacsError):
    pass


class ClauseCountMismatch(DimacsError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    """A CNF formula over variables 1..num_vars.

    Immutable after construction; safe to share across threads.
    """

    num_vars: int
    clauses: tuple[Clause, ...]

    def __init__(self, num_vars: int, clauses: Iterable[Iterable[int]] = ()):
        if num_vars < 1:
            raise ValueError(f"num_vars must be positive, got {num_vars}")
        normalized = tuple(tuple(int(lit) for lit in clause) for clause in clauses)
        for clause in normalized:
            for lit in clause:
                if lit == 0:
                    raise ValueError("literal 0 is not allowed")
                if abs(lit) > num_vars:
                    raise ValueError(
                        f"literal {lit} out of range for {num_vars} variables"
                    )
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "clauses", normalized)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def alpha(self) -> float:
        """Clause density m/n."""
        return len(self.clauses) / self.num_vars


def literal_value(lit: int, assignment: Assignment) -> bool | None:
    """Truth value of a literal under a partial assignment (None if unassigned)."""
    value = assignment.get(abs(lit))
    if value is None:
        return None
    return value if lit > 0 else not value


def evaluate_clause(clause: Iterable[int], assignment: Assignment) -> Status:
    """Evaluate a disjunction: satisfied by any true literal, falsified only
    when every literal is assigned and false.  Duplicate literals behave as a
    set."""
    undetermined = False
    for lit in clause:
        value = literal_value(lit, assignment)
        if value is True:
            return Status.SATISFIED
        if value is None:
            undetermined = True
    return Status.UNDETERMINED if undetermined else Status.FALSIFIED


def evaluate_formula(formula: CnfFormula, assignment: Assignment) -> Status:
    """Evaluate a conjunction of clauses.

    A partial assignment may already certify SATISFIED (every clause has a
    true literal) or FALSIFIED (some clause is fully false).
    """
    undetermined = False
    for clause in formula.clauses:
        status = evaluate_clause(clause, assignment)
        if status is Status.FALSIFIED:
            return Status.FALSIFIED
        if status is Status.UNDETERMINED:
            undetermined = True
    return Status.UNDETERMINED if undetermined else Status.SATISFIED


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF ("p cnf n m" header, 0-terminated clauses, "c" comments).

    Clauses may span lines or share a line.  A non-empty trailing clause
    without its terminating 0 is accepted.  The clause count must match the
    header.
    """
    num_vars: int | None = None
    declared_clauses = 0
    header_line = 0
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise MalformedHeader(lineno, "duplicate header")
            fields = line.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise MalformedHeader(lineno, f"expected 'p cnf <vars> <clauses>', got {line!r}")
            try:
                num_vars = int(fields[2])
                declared_clauses = int(fields[3])
            except ValueError:
                raise MalformedHeader(lineno, f"non-integer header fields in {line!r}") from None
            if num_vars < 1 or declared_clauses < 0:
                raise MalformedHeader(lineno, f"invalid header counts in {line!r}")
            header_line = lineno
            continue
        if num_vars is None:
            raise MalformedHeader(lineno, "clause data before 'p cnf' header")
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise LiteralOutOfRange(lineno, f"not a literal: {token!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > num_vars:
                    raise LiteralOutOfRange(
                        lineno, f"literal {lit} exceeds declared {num_vars} variables"
                    )
                current.append(lit)

    if num_vars is None:
        raise MalformedHeader(1, "missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    if len(clauses) != declared_clauses:
        raise ClauseCountMismatch(
            header_line,
            f"header declares {declared_clauses} clauses but file has {len(clauses)}",
        )
    return CnfFormula(num_vars, clauses)


def emit_dimacs(formula: CnfFormula) -> str:
    """Serialize to DIMACS CNF; parse_dimacs(emit_dimacs(f)) == f."""
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    for clause in formula.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"
