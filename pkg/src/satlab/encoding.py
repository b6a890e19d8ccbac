"""Render instances as text prompts and parse model answers back.

Three prompt formats are supported:

* ``sat-cnf``: the formula as a bracketed list of signed-integer triples;
  answers are Python-style dictionaries ``output: {1: True, ...}``.
* ``sat-menu``: variables become food items, each clause becomes one person's
  likes/dislikes line; answers are ``orderable=[...]``/``not_orderable=[...]``
  lists.
* ``sat-translate``: the menu preferences plus an instruction to translate
  them into a CNF expression in LaTeX, to be solved externally.

Every answer parser is total: any string maps to a ParsedAnswer (Unparseable
is a value, not an exception).  The LaTeX CNF parser is the one exception,
with typed errors, since its output feeds a solver rather than a scorer.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .cnf import Assignment, CnfFormula
from .generator import Instance
from .util import derive_seed
from .words import FOOD_ITEMS, PERSON_NAMES

FORMAT_CNF = "sat-cnf"
FORMAT_MENU = "sat-menu"
FORMAT_TRANSLATE = "sat-translate"
FORMATS = (FORMAT_CNF, FORMAT_MENU, FORMAT_TRANSLATE)

VARIANT_DECISION = "decision"
VARIANT_SEARCH = "search"
VARIANTS = (VARIANT_DECISION, VARIANT_SEARCH)

DEFAULT_SHOTS = 3  # when few-shot prompting is enabled


class VocabularyExhausted(ValueError):
    pass


class LatexParseError(ValueError):
    def __init__(self, position: int, message: str):
        super().__init__(f"position {position}: {message}")
        self.position = position


class UnknownItem(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown item: {name!r}")
        self.name = name


@dataclass(frozen=True)
class VocabMapping:
    """Bijection between variables and food items, plus one person per clause."""

    var_to_item: dict[int, str]
    clause_to_person: tuple[str, ...]

    @property
    def item_to_var(self) -> dict[str, int]:
        return {item: var for var, item in self.var_to_item.items()}


@dataclass(frozen=True)
class Rendering:
    """One instance expressed in a concrete prompt encoding."""

    instance_id: str
    format: str
    variant: str
    shots: int
    prompt_text: str
    mapping: VocabMapping | None  # present iff format != sat-cnf


@dataclass(frozen=True)
class ParsedAnswer:
    """Decoded model output: an assignment, an unsat claim, a yes/no verdict,
    or Unparseable with a reason."""

    kind: str  # assignment | unsat | yes | no | unparseable
    assignment: Assignment | None = None
    reason: str | None = None

    @classmethod
    def of_assignment(cls, assignment: Assignment) -> "ParsedAnswer":
        return cls(kind="assignment", assignment=dict(assignment))

    @classmethod
    def of_unsat(cls) -> "ParsedAnswer":
        return cls(kind="unsat")

    @classmethod
    def of_decision(cls, yes: bool) -> "ParsedAnswer":
        return cls(kind="yes" if yes else "no")

    @classmethod
    def of_unparseable(cls, reason: str) -> "ParsedAnswer":
        return cls(kind="unparseable", reason=reason)


# --- system messages -------------------------------------------------------

MENU_SEARCH_SYSTEM = (
    "Your task is to output two distinct lists of food items, one denoting what "
    "can be ordered ('orderable') and the other what cannot ('not_orderable'), "
    "to meet the preferences of a group of individuals. Each person must find "
    "the selection satisfactory based on their likes and dislikes. The "
    "satisfaction criteria are: 1. A person is satisfied if at least one liked "
    "item is in 'orderable' list or one disliked item is in 'not_orderable' "
    "list. 2. No item can appear on both lists. 3. All participants must be "
    "satisfied by the combination of the two lists. 4. If no such combination "
    "exists that satisfies all, output empty lists for both. You always think "
    "step-by-step and show all your work in the explanation. Output your final "
    "solution as a comma-separated list of strings in Python code "
    "<orderable=[...], not_orderable=[...]>."
)

MENU_DECISION_SYSTEM = (
    "You are given the preferences of a group of individuals about food items "
    "they like and dislike. Your task is to decide whether there exist two "
    "distinct lists of food items, one denoting what can be ordered "
    "('orderable') and the other what cannot ('not_orderable'), such that "
    "every person is satisfied. A person is satisfied if at least one liked "
    "item is in the 'orderable' list or one disliked item is in the "
    "'not_orderable' list. No item can appear on both lists. You always think "
    "step-by-step and show all your work in the explanation. If such a "
    "combination exists, answer \"yes\"; if no such combination exists, answer "
    "\"no\". Output your final answer as a single word: yes or no."
)

CNF_SEARCH_SYSTEM = (
    "Let's play the SAT (satisfiability) game. The input is a list of clauses, "
    "where each clause is represented as a disjunction of literals (variables "
    "or their negation connected by logical OR). Your task is to find "
    "valuation of Boolean variables such that a Boolean CNF formula evaluates "
    "to True. The solution should be in form of a dictionary where keys are "
    "variables and values are Boolean (True or False). The satisfaction "
    "criteria are: 1. At least one literal in each clause should be True. 2. A "
    "variable can't be both True and False in the dictionary. 3. If no "
    "satisfying assignment exists, you should output an empty dictionary. You "
    "always think step-by-step and show all your work in the explanation. "
    "Output the solution in Python code dictionary, enclosed within "
    "<output: {...}>."
)

CNF_DECISION_SYSTEM = (
    "Let's play the SAT (satisfiability) game. The input is a list of clauses, "
    "where each clause is represented as a disjunction of literals (variables "
    "or their negation connected by logical OR). Your task is to determine "
    "whether there exists a valuation of Boolean variables such that the "
    "Boolean CNF formula evaluates to True, meaning at least one literal in "
    "each clause is True. You always think step-by-step and show all your work "
    "in the explanation. If a satisfying assignment exists, answer \"yes\"; if "
    "the formula is unsatisfiable, answer \"no\". Output your final answer as "
    "a single word: yes or no."
)

TRANSLATE_SYSTEM = (
    "You are provided with a list of preferences from different individuals, "
    "each specifying items they like and dislike. Create a logical expression "
    "in Conjunctive Normal Form (CNF) that satisfies a set of individual "
    "preferences regarding likes and dislikes of certain items. The condition "
    "for an individual's satisfaction is that either at least one item they "
    "like is included, or at least one item they dislike is excluded in your "
    "selection. Format the final CNF expression in LaTeX. Ensure all item "
    "names are retained in the final output. Do not include any explanation."
)


# --- prompt assembly -------------------------------------------------------


@lru_cache(maxsize=1)
def _fewshot_pool() -> list[dict]:
    data = resources.files("satlab").joinpath("assets/fewshot.json").read_text("utf-8")
    return json.loads(data)


def fewshot_examples(fmt: str, variant: str, shots: int) -> list[dict]:
    """The first `shots` curated solved examples for a format/variant."""
    pool = [e for e in _fewshot_pool() if e["format"] == fmt and e["variant"] == variant]
    if shots > len(pool):
        raise ValueError(f"only {len(pool)} few-shot examples for {fmt}/{variant}")
    return pool[:shots]


def _assemble(system: str, fmt: str, variant: str, shots: int, input_label: str, input_text: str) -> str:
    parts = [f"# System Message\n{system}"]
    if shots:
        pair_label = "Preferences" if input_label == "Preferences" else "Formulas"
        pairs = "\n\n".join(
            f"{input_label}: {ex['input']}\n\nSolution: {ex['solution']}"
            for ex in fewshot_examples(fmt, variant, shots)
        )
        parts.append(f"# Pairs of {pair_label} and Solutions for in-context learning\n{pairs}")
    parts.append(f"# Input for a new problem\n{input_label}: {input_text}")
    return "\n\n".join(parts)


def format_clause_list(formula: CnfFormula) -> str:
    """Bracketed list-of-lists form, e.g. ``[[-3, 1, -4], [5, 1, 2]]``."""
    return "[" + ", ".join("[" + ", ".join(str(l) for l in c) + "]" for c in formula.clauses) + "]"


def render_cnf(inst: Instance, variant: str = VARIANT_SEARCH, shots: int = 0) -> Rendering:
    """Render the raw clause-list prompt."""
    _check_variant(variant)
    system = CNF_SEARCH_SYSTEM if variant == VARIANT_SEARCH else CNF_DECISION_SYSTEM
    prompt = _assemble(system, FORMAT_CNF, variant, shots, "Formula", format_clause_list(inst.formula))
    return Rendering(inst.id, FORMAT_CNF, variant, shots, prompt, None)


def draw_vocab(
    inst: Instance,
    vocab_seed: int = 0,
    items: tuple[str, ...] = FOOD_ITEMS,
    names: tuple[str, ...] = PERSON_NAMES,
) -> VocabMapping:
    """Deterministically sample an item per variable (without replacement) and
    a unique person name per clause."""
    if inst.n > len(items):
        raise VocabularyExhausted(f"need {inst.n} food items, have {len(items)}")
    if inst.m > len(names):
        raise VocabularyExhausted(f"need {inst.m} person names, have {len(names)}")
    rng = random.Random(derive_seed(vocab_seed, inst.id, "vocab"))
    chosen_items = rng.sample(items, inst.n)
    chosen_names = rng.sample(names, inst.m)
    return VocabMapping(
        var_to_item={var: chosen_items[var - 1] for var in range(1, inst.n + 1)},
        clause_to_person=tuple(chosen_names),
    )


def preferences_text(formula: CnfFormula, mapping: VocabMapping) -> str:
    """One person per clause: positive literals under Likes, negated under
    Dislikes, e.g. ``Jay: Likes nachos, ratatouille. Dislikes pie.``"""
    lines = []
    for clause, person in zip(formula.clauses, mapping.clause_to_person):
        likes = [mapping.var_to_item[lit] for lit in clause if lit > 0]
        dislikes = [mapping.var_to_item[-lit] for lit in clause if lit < 0]
        sentence = person + ":"
        if likes:
            sentence += " Likes " + ", ".join(likes) + "."
        if dislikes:
            sentence += " Dislikes " + ", ".join(dislikes) + "."
        lines.append(sentence)
    return " ".join(lines)


def render_menu(
    inst: Instance,
    variant: str = VARIANT_SEARCH,
    shots: int = 0,
    vocab_seed: int = 0,
    items: tuple[str, ...] = FOOD_ITEMS,
    names: tuple[str, ...] = PERSON_NAMES,
) -> Rendering:
    """Render the menu-selection prompt; deterministic under vocab_seed."""
    _check_variant(variant)
    mapping = draw_vocab(inst, vocab_seed, items, names)
    system = MENU_SEARCH_SYSTEM if variant == VARIANT_SEARCH else MENU_DECISION_SYSTEM
    prompt = _assemble(
        system, FORMAT_MENU, variant, shots, "Preferences", preferences_text(inst.formula, mapping)
    )
    return Rendering(inst.id, FORMAT_MENU, variant, shots, prompt, mapping)


def render_translate(
    inst: Instance,
    vocab_seed: int = 0,
    items: tuple[str, ...] = FOOD_ITEMS,
    names: tuple[str, ...] = PERSON_NAMES,
) -> Rendering:
    """Render the translate-to-CNF prompt (menu preferences in, LaTeX out)."""
    mapping = draw_vocab(inst, vocab_seed, items, names)
    prompt = _assemble(
        TRANSLATE_SYSTEM, FORMAT_TRANSLATE, VARIANT_SEARCH, 0,
        "Preferences", preferences_text(inst.formula, mapping),
    )
    return Rendering(inst.id, FORMAT_TRANSLATE, VARIANT_SEARCH, 0, prompt, mapping)


def reference_translation(formula: CnfFormula, mapping: VocabMapping) -> str:
    """The canonical LaTeX translation of a formula under a mapping; every
    clause becomes a parenthesized disjunction over item names."""
    clauses = []
    for clause in formula.clauses:
        lits = [
            ("\\neg " if lit < 0 else "") + mapping.var_to_item[abs(lit)]
            for lit in clause
        ]
        clauses.append("(" + " \\lor ".join(lits) + ")")
    return " \\land ".join(clauses)


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")


# --- answer parsing --------------------------------------------------------

_FENCE_RE = re.compile(r"```[a-zA-Z]*\n(.*?)```", re.DOTALL)


def _last_fenced_block(text: str) -> str | None:
    blocks = _FENCE_RE.findall(text)
    return blocks[-1] if blocks else None


def _clean_item(token: str) -> str:
    return token.strip().strip("'\"`")


_ORDERABLE_RE = re.compile(r"(?<![\w.])orderable\s*=\s*\[([^\]]*)\]")
_NOT_ORDERABLE_RE = re.compile(r"not_orderable\s*=\s*\[([^\]]*)\]")


def parse_menu_answer(text: str, mapping: VocabMapping) -> ParsedAnswer:
    """Decode orderable/not_orderable lists into a partial assignment.

    Empty lists on both sides are an unsat claim; an unknown item or an item
    on both lists makes the answer Unparseable.  Never raises.
    """
    scope = _last_fenced_block(text)
    if scope is None or not (_ORDERABLE_RE.search(scope) or _NOT_ORDERABLE_RE.search(scope)):
        scope = text
    orderable_matches = _ORDERABLE_RE.findall(scope)
    not_orderable_matches = _NOT_ORDERABLE_RE.findall(scope)
    if not orderable_matches or not not_orderable_matches:
        return ParsedAnswer.of_unparseable("missing orderable/not_orderable lists")
    orderable = [_clean_item(t) for t in orderable_matches[-1].split(",") if _clean_item(t)]
    not_orderable = [_clean_item(t) for t in not_orderable_matches[-1].split(",") if _clean_item(t)]
    if not orderable and not not_orderable:
        return ParsedAnswer.of_unsat()
    overlap = set(orderable) & set(not_orderable)
    if overlap:
        return ParsedAnswer.of_unparseable("item on both lists: " + ", ".join(sorted(overlap)))
    item_to_var = mapping.item_to_var
    assignment: Assignment = {}
    for value, items in ((True, orderable), (False, not_orderable)):
        for item in items:
            var = item_to_var.get(item.lower())
            if var is None:
                return ParsedAnswer.of_unparseable(f"unknown item: {item}")
            assignment[var] = value
    return ParsedAnswer.of_assignment(assignment)


_OUTPUT_DICT_RE = re.compile(r"output\s*:?\s*\{([^{}]*)\}")
_BARE_DICT_RE = re.compile(r"\{([^{}]*)\}")
_DICT_ENTRY_RE = re.compile(r"^['\"]?(-?\d+)['\"]?\s*:\s*(true|false)$", re.IGNORECASE)


def parse_cnf_answer(text: str, num_vars: int) -> ParsedAnswer:
    """Decode an ``output: {var: Bool, ...}`` dictionary.

    An empty dictionary is an unsat claim; keys outside [1, num_vars] or
    malformed entries are Unparseable.  Never raises.
    """
    scope = _last_fenced_block(text)
    if scope is None or not _BARE_DICT_RE.search(scope):
        scope = text
    matches = _OUTPUT_DICT_RE.findall(scope) or _BARE_DICT_RE.findall(scope)
    if not matches:
        return ParsedAnswer.of_unparseable("no output dictionary found")
    body = matches[-1].strip()
    if not body:
        return ParsedAnswer.of_unsat()
    assignment: Assignment = {}
    for entry in body.split(","):
        entry = entry.strip()
        if not entry:
            continue
        match = _DICT_ENTRY_RE.match(entry)
        if not match:
            return ParsedAnswer.of_unparseable(f"malformed dictionary entry: {entry!r}")
        var = int(match.group(1))
        value = match.group(2).lower() == "true"
        if not 1 <= var <= num_vars:
            return ParsedAnswer.of_unparseable(f"variable {var} out of range 1..{num_vars}")
        if assignment.get(var, value) != value:
            return ParsedAnswer.of_unparseable(f"variable {var} assigned both values")
        assignment[var] = value
    if not assignment:
        return ParsedAnswer.of_unsat()
    return ParsedAnswer.of_assignment(assignment)


_VERDICT_RE = re.compile(r"\b(yes|no)\b", re.IGNORECASE)


def parse_decision_answer(text: str) -> ParsedAnswer:
    """Find the final yes/no verdict: the last line containing a verdict token
    decides; a line with both tokens is ambiguous.  Never raises."""
    for line in reversed(text.splitlines()):
        tokens = {t.lower() for t in _VERDICT_RE.findall(line)}
        if tokens:
            if len(tokens) > 1:
                return ParsedAnswer.of_unparseable("ambiguous verdict: both yes and no")
            return ParsedAnswer.of_decision(tokens.pop() == "yes")
    return ParsedAnswer.of_unparseable("no yes/no verdict found")


# --- LaTeX CNF parsing (for the translate pipeline) ------------------------

_LATEX_TOKENS = [
    ("OR", re.compile(r"\\(?:lor|vee)\b|\u2228")),
    ("AND", re.compile(r"\\(?:land|wedge)\b|\u2227")),
    ("NOT", re.compile(r"\\(?:neg|lnot)\b|\u00ac")),
    ("LP", re.compile(r"\(")),
    ("RP", re.compile(r"\)")),
    ("TEXT", re.compile(r"\\text\s*\{\s*([A-Za-z][A-Za-z0-9_\-]*)\s*\}")),
    ("ITEM", re.compile(r"[A-Za-z][A-Za-z0-9_\-]*")),
    (
        "SKIP",
        re.compile(
            r"\s+|\\\\|\\left\b|\\right\b|\\big\w*\b|\\quad\b|\\qquad\b"
            r"|\\[,;!]|[&$.{}]|\\\[|\\\]"
        ),
    ),
]


def _tokenize_latex(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        for name, pattern in _LATEX_TOKENS:
            match = pattern.match(text, pos)
            if match:
                if name == "TEXT":
                    tokens.append(("ITEM", match.group(1), pos))
                elif name != "SKIP":
                    tokens.append((name, match.group(0), pos))
                pos = match.end()
                break
        else:
            raise LatexParseError(pos, f"unexpected character {text[pos]!r}")
    return tokens


def parse_latex_cnf(text: str, mapping: VocabMapping) -> CnfFormula:
    """Parse a LaTeX CNF expression over item names into a formula.

    Accepts \\lor/\\vee/\\land/\\wedge/\\neg/\\lnot and the rendered symbols,
    optional \\text{...} wrappers, and math-mode junk (&, \\\\, $, braces).
    Clauses with more than one literal must be parenthesized.  Raises
    LatexParseError or UnknownItem.
    """
    scope = _last_fenced_block(text) or text
    item_to_var = mapping.item_to_var
    tokens = _tokenize_latex(scope)
    if not tokens:
        raise LatexParseError(0, "empty expression")
    cursor = 0

    def peek() -> tuple[str, str, int] | None:
        return tokens[cursor] if cursor < len(tokens) else None

    def take(kind: str) -> tuple[str, str, int]:
        nonlocal cursor
        token = peek()
        if token is None or token[0] != kind:
            got = "end of input" if token is None else f"{token[1]!r}"
            pos = token[2] if token else len(scope)
            raise LatexParseError(pos, f"expected {kind}, got {got}")
        cursor += 1
        return token

    def parse_literal() -> int:
        negated = False
        while peek() and peek()[0] == "NOT":
            take("NOT")
            negated = not negated
        _, name, pos = take("ITEM")
        var = item_to_var.get(name) or item_to_var.get(name.lower())
        if var is None:
            raise UnknownItem(name)
        return -var if negated else var

    def parse_clause() -> tuple[int, ...]:
        if peek() and peek()[0] == "LP":
            take("LP")
            lits = [parse_literal()]
            while peek() and peek()[0] == "OR":
                take("OR")
                lits.append(parse_literal())
            take("RP")
            return tuple(lits)
        return (parse_literal(),)

    clauses = [parse_clause()]
    while peek() is not None:
        take("AND")
        clauses.append(parse_clause())
    return CnfFormula(len(mapping.var_to_item), clauses)
