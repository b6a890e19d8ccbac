"""satlab: a random 3-SAT phase-transition laboratory.

Generates seeded random 3-SAT instances across the hardness spectrum
alpha = m/n, decides and counts them with an internal DPLL engine, renders
them as text prompts in several encodings, evaluates model responses (real
or scripted) on decision/search variants, runs a translate-then-solve
pipeline, and emits the standard analyses (accuracy vs. alpha, satisfiability
ratio curves, confusion matrices, token counts, phase charts).
"""

from .cnf import (
    Assignment,
    Clause,
    CnfFormula,
    Literal,
    Status,
    emit_dimacs,
    evaluate_clause,
    evaluate_formula,
    parse_dimacs,
)
from .counter import CountResult, count_models, ratio_bins
from .encoding import (
    FORMATS,
    VARIANTS,
    ParsedAnswer,
    Rendering,
    VocabMapping,
    parse_cnf_answer,
    parse_decision_answer,
    parse_latex_cnf,
    parse_menu_answer,
    render_cnf,
    render_menu,
    render_translate,
)
from .generator import (
    CRITICAL_ALPHA,
    GenSpec,
    Instance,
    Region,
    build_dataset,
    classify_region,
    estimate_bounds,
    generate,
    read_dataset,
    reference_grid,
    write_dataset,
)
from .harness import (
    CompletionResult,
    EvalRecord,
    builtin_adapters,
    make_adapter,
    read_records,
    run_eval,
    run_translate_pipeline,
    score,
    write_records,
)
from .metrics import (
    ConfusionMatrix,
    MetricSeries,
    accuracy_vs_alpha,
    accuracy_vs_ratio,
    confusion,
    phase_chart,
    tokens_vs_alpha,
)
from .solver import BudgetExhausted, SolveResult, SolveStats, hardness_profile, solve

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BudgetExhausted",
    "Clause",
    "CnfFormula",
    "CompletionResult",
    "ConfusionMatrix",
    "CountResult",
    "CRITICAL_ALPHA",
    "EvalRecord",
    "FORMATS",
    "GenSpec",
    "Instance",
    "Literal",
    "MetricSeries",
    "ParsedAnswer",
    "Region",
    "Rendering",
    "SolveResult",
    "SolveStats",
    "Status",
    "VARIANTS",
    "VocabMapping",
    "accuracy_vs_alpha",
    "accuracy_vs_ratio",
    "build_dataset",
    "builtin_adapters",
    "classify_region",
    "confusion",
    "count_models",
    "emit_dimacs",
    "estimate_bounds",
    "evaluate_clause",
    "evaluate_formula",
    "generate",
    "hardness_profile",
    "make_adapter",
    "parse_cnf_answer",
    "parse_decision_answer",
    "parse_dimacs",
    "parse_latex_cnf",
    "parse_menu_answer",
    "phase_chart",
    "ratio_bins",
    "read_dataset",
    "read_records",
    "reference_grid",
    "render_cnf",
    "render_menu",
    "render_translate",
    "run_eval",
    "run_translate_pipeline",
    "score",
    "solve",
    "tokens_vs_alpha",
    "write_dataset",
    "write_records",
]
