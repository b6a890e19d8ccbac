"""Shared fixtures: well-known formulas reused across test modules."""

from __future__ import annotations

import pytest

from satlab.cnf import CnfFormula

# A 5-variable, 11-clause satisfiable formula used as a worked example in the
# prompt templates; {1,2,4,5: True, 3: False} satisfies it.
EXAMPLE_5VAR_CLAUSES = [
    [-3, 1, -4],
    [-4, -2, 1],
    [-1, -4, 5],
    [5, 1, 2],
    [-5, 4, 2],
    [-4, 3, 1],
    [1, 5, -3],
    [-2, 1, 3],
    [1, -5, -4],
    [4, -3, -1],
    [-2, 5, -3],
]

EXAMPLE_5VAR_ASSIGNMENT = {1: True, 2: True, 3: False, 4: True, 5: True}


@pytest.fixture
def example_5var() -> CnfFormula:
    return CnfFormula(5, EXAMPLE_5VAR_CLAUSES)


@pytest.fixture
def contradiction() -> CnfFormula:
    return CnfFormula(1, [[1], [-1]])
