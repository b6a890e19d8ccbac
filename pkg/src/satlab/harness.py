"""Model-vs-instance evaluation: adapters, scoring, and resumable run loops.

Adapters expose ``complete(prompt) -> CompletionResult`` and either work (the
scripted family, which answers by actually reading the prompt text) or raise a
typed TransportError (the HTTP family, after retries).  The run loop renders
each instance, calls the adapter, parses the raw response with the format's
answer grammar, scores it against ground truth, and appends the record to a
JSON Lines file as it is produced.  Runs are resumable: instances that already
have a persisted record are skipped.
"""

from __future__ import annotations

import ast
import json
import os
import random
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from . import encoding
from .cnf import CnfFormula, Status, evaluate_formula
from .encoding import (
    FORMAT_CNF,
    FORMAT_MENU,
    FORMAT_TRANSLATE,
    VARIANT_DECISION,
    VARIANT_SEARCH,
    ParsedAnswer,
    Rendering,
)
from .generator import Instance
from .solver import SAT, solve
from .util import derive_seed

RECORD_SCHEMA_VERSION = 1

VERDICT_CORRECT = "correct"
VERDICT_INCORRECT = "incorrect"
VERDICT_UNPARSEABLE = "unparseable"
VERDICT_TRANSPORT_ERROR = "transport_error"


class TransportError(Exception):
    """A completion could not be obtained (network, HTTP, timeout)."""


class EndpointUnreachable(TransportError):
    """The endpoint kept failing after all retries."""


class MissingCredential(ValueError):
    """The API credential environment variable is unset or empty."""


class CorruptRecords(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class CompletionResult:
    text: str
    prompt_tokens: int
    completion_tokens: int
    latency: float
    tokens_approximate: bool = False


@dataclass(frozen=True)
class EvalRecord:
    instance_id: str
    adapter: str
    format: str
    variant: str
    shots: int
    prompt_text: str
    raw_response: str
    parsed: ParsedAnswer
    verdict: str
    prompt_tokens: int
    completion_tokens: int
    latency: float
    tokens_approximate: bool = False


def _approx_tokens(text: str) -> int:
    return len(text.split())


def score(inst: Instance, parsed: ParsedAnswer, variant: str) -> str:
    """Pure scoring of a parsed answer against an instance's ground truth.

    Decision: a yes/no verdict must match the label.  Search: an assignment
    must actually satisfy the formula (partial assignments may), or an unsat
    claim must match an UNSAT label.  Unparseable stays unparseable; any other
    mismatch is incorrect.
    """
    if parsed.kind == "unparseable":
        return VERDICT_UNPARSEABLE
    if variant == VARIANT_DECISION:
        if parsed.kind == "yes":
            return VERDICT_CORRECT if inst.label == "SAT" else VERDICT_INCORRECT
        if parsed.kind == "no":
            return VERDICT_CORRECT if inst.label == "UNSAT" else VERDICT_INCORRECT
        return VERDICT_INCORRECT
    if parsed.kind == "assignment":
        satisfied = evaluate_formula(inst.formula, parsed.assignment) is Status.SATISFIED
        return VERDICT_CORRECT if satisfied else VERDICT_INCORRECT
    if parsed.kind == "unsat":
        return VERDICT_CORRECT if inst.label == "UNSAT" else VERDICT_INCORRECT
    return VERDICT_INCORRECT


# --- prompt sniffing shared by the scripted adapters ------------------------

_INPUT_SPLIT = "# Input for a new problem"
_FORMULA_RE = re.compile(r"Formula:\s*(\[\[.*?\]\])", re.DOTALL)
_PERSON_RE = re.compile(r"([A-Z][a-zA-Z]*):\s+(.*?)(?=\s+[A-Z][a-zA-Z]*:\s+|$)", re.DOTALL)
_LIKES_RE = re.compile(r"Likes ([^.]*)\.")
_DISLIKES_RE = re.compile(r"Dislikes ([^.]*)\.")


def _input_block(prompt: str) -> str:
    return prompt.rsplit(_INPUT_SPLIT, 1)[-1].strip()


def _parse_prompt_formula(prompt: str) -> CnfFormula:
    match = _FORMULA_RE.search(_input_block(prompt))
    if not match:
        raise ValueError("no clause list found in prompt")
    clauses = ast.literal_eval(match.group(1))
    num_vars = max(abs(l) for clause in clauses for l in clause)
    return CnfFormula(num_vars, clauses)


def _parse_prompt_preferences(prompt: str) -> tuple[CnfFormula, list[str]]:
    """Reconstruct an item-indexed formula from the preferences text; returns
    the formula and the item list in order of first appearance."""
    block = _input_block(prompt)
    text = block.split("Preferences:", 1)[-1].strip()
    items: list[str] = []
    index: dict[str, int] = {}
    clauses: list[list[int]] = []
    for match in _PERSON_RE.finditer(text):
        body = match.group(2)
        clause: list[int] = []
        for regex, sign in ((_LIKES_RE, 1), (_DISLIKES_RE, -1)):
            found = regex.search(body)
            if not found:
                continue
            for raw in found.group(1).split(","):
                item = raw.strip()
                if not item:
                    continue
                if item not in index:
                    items.append(item)
                    index[item] = len(items)
                clause.append(sign * index[item])
        if clause:
            clauses.append(clause)
    if not clauses:
        raise ValueError("no preferences found in prompt")
    return CnfFormula(len(items), clauses), items


def _classify_prompt(prompt: str) -> tuple[str, str]:
    if "Format the final CNF expression in LaTeX" in prompt:
        return FORMAT_TRANSLATE, VARIANT_SEARCH
    variant = VARIANT_DECISION if "single word" in prompt else VARIANT_SEARCH
    fmt = FORMAT_MENU if "Preferences:" in prompt else FORMAT_CNF
    return fmt, variant


def _oracle_answer(prompt: str) -> str:
    """A correct answer to any of our prompts, in the format's output grammar."""
    fmt, variant = _classify_prompt(prompt)
    if fmt == FORMAT_CNF:
        formula = _parse_prompt_formula(prompt)
        result = solve(formula)
        if variant == VARIANT_DECISION:
            verdict = "satisfiable" if result.verdict == SAT else "unsatisfiable"
            answer = "yes" if result.verdict == SAT else "no"
            return f"The formula is {verdict}.\n{answer}"
        if result.verdict == SAT:
            body = ", ".join(f"{v}: {result.witness[v]}" for v in sorted(result.witness))
            return f"Working through the clauses yields an assignment.\n\n```python\noutput: {{{body}}}\n```"
        return "Every branch ends in a contradiction, so the formula is unsatisfiable.\n\n```python\noutput: {}\n```"
    formula, items = _parse_prompt_preferences(prompt)
    result = solve(formula)
    if fmt == FORMAT_TRANSLATE:
        mapping = encoding.VocabMapping(
            var_to_item={i + 1: items[i] for i in range(len(items))},
            clause_to_person=tuple(str(i) for i in range(len(formula.clauses))),
        )
        return encoding.reference_translation(formula, mapping)
    if variant == VARIANT_DECISION:
        answer = "yes" if result.verdict == SAT else "no"
        return f"Checking the preferences for a consistent selection.\n{answer}"
    if result.verdict == SAT:
        orderable = [items[v - 1] for v in sorted(result.witness) if result.witness[v]]
        not_orderable = [items[v - 1] for v in sorted(result.witness) if not result.witness[v]]
        return (
            "Assigning items to the two lists so that everyone is satisfied.\n\n"
            f"```python\norderable=[{', '.join(orderable)}]\nnot_orderable=[{', '.join(not_orderable)}]\n```"
        )
    return (
        "The preferences are contradictory; no selection satisfies everyone.\n\n"
        "```python\norderable=[]\nnot_orderable=[]\n```"
    )


def _wrong_answer(prompt: str) -> str:
    """A well-formed but guaranteed-incorrect answer to any of our prompts."""
    fmt, variant = _classify_prompt(prompt)
    if fmt == FORMAT_CNF:
        formula = _parse_prompt_formula(prompt)
        sat = solve(formula).verdict == SAT
        if variant == VARIANT_DECISION:
            return "no" if sat else "yes"
        if sat:
            return "This looks unsatisfiable.\n\n```python\noutput: {}\n```"
        body = ", ".join(f"{v}: True" for v in range(1, formula.num_vars + 1))
        return f"Here is an assignment.\n\n```python\noutput: {{{body}}}\n```"
    formula, items = _parse_prompt_preferences(prompt)
    sat = solve(formula).verdict == SAT
    if fmt == FORMAT_TRANSLATE:
        mapping = encoding.VocabMapping(
            var_to_item={i + 1: items[i] for i in range(len(items))},
            clause_to_person=tuple(str(i) for i in range(len(formula.clauses))),
        )
        if sat:
            # append a contradiction so the translated formula flips to UNSAT
            faithful = encoding.reference_translation(formula, mapping)
            return f"{faithful} \\land ({items[0]}) \\land (\\neg {items[0]})"
        # keep only the first clause so the translation flips to SAT
        first = CnfFormula(formula.num_vars, [formula.clauses[0]])
        return encoding.reference_translation(first, mapping)
    if variant == VARIANT_DECISION:
        return "no" if sat else "yes"
    if sat:
        return "```python\norderable=[]\nnot_orderable=[]\n```"
    return f"```python\norderable=[{', '.join(items)}]\nnot_orderable=[]\n```"


def _completion(prompt: str, text: str) -> CompletionResult:
    # scripted adapters report zero latency and whitespace token counts so
    # that run outputs are byte-reproducible
    return CompletionResult(
        text=text,
        prompt_tokens=_approx_tokens(prompt),
        completion_tokens=_approx_tokens(text),
        latency=0.0,
        tokens_approximate=True,
    )


class ScriptedOracleAdapter:
    """Answers every prompt correctly by re-solving the problem it describes."""

    single_flight = False

    def __init__(self):
        self.name = "scripted_oracle"
        self.config = {"kind": "scripted"}

    def complete(self, prompt: str) -> CompletionResult:
        return _completion(prompt, _oracle_answer(prompt))


class ScriptedConstantAdapter:
    """Returns the same fixed text for every prompt."""

    single_flight = False

    def __init__(self, answer: str):
        self.name = f"scripted_constant_{answer}"
        self.config = {"kind": "scripted", "answer": answer}
        self.answer = answer

    def complete(self, prompt: str) -> CompletionResult:
        return _completion(prompt, self.answer)


class ScriptedNoisyAdapter:
    """Correct with probability p, deliberately wrong otherwise.

    The coin depends only on (seed, problem input), so the same instance gets
    a consistent treatment across variants of the same format: whenever the
    search answer is correct, the decision answer is too.
    """

    single_flight = False

    def __init__(self, p: float, seed: int = 0):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {p}")
        self.name = f"scripted_noisy_p{p}"
        self.config = {"kind": "scripted", "p": p, "seed": seed}
        self.p = p
        self.seed = seed

    def complete(self, prompt: str) -> CompletionResult:
        rng = random.Random(derive_seed(self.seed, _input_block(prompt)))
        correct = rng.random() < self.p
        text = _oracle_answer(prompt) if correct else _wrong_answer(prompt)
        return _completion(prompt, text)


class HttpChatAdapter:
    """Chat-completion HTTP client with retry-and-backoff and a per-request
    timeout.  Generation defaults: temperature 1, max_tokens 4096, top_p 1,
    zero penalties."""

    single_flight = False

    RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "SATLAB_API_KEY",
        temperature: float = 1.0,
        max_tokens: int = 4096,
        top_p: float = 1.0,
        frequency_penalty: float = 0.0,
        presence_penalty: float = 0.0,
        timeout: float = 120.0,
        max_retries: int = 3,
        backoff: float = 1.0,
        auth_scheme: str = "Bearer",
    ):
        key = os.environ.get(api_key_env, "").strip()
        if not key:
            raise MissingCredential(f"environment variable {api_key_env} is not set")
        self._key = key
        self.endpoint = endpoint
        self.model = model
        self.name = f"http_chat_{model}"
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.auth_scheme = auth_scheme
        self.config = {
            "kind": "http_chat",
            "endpoint": endpoint,
            "model": model,
            "temperature": temperature,
            "max_tokens": max_tokens,
            "top_p": top_p,
            "frequency_penalty": frequency_penalty,
            "presence_penalty": presence_penalty,
            "timeout": timeout,
        }

    def _payload(self, prompt: str) -> dict:
        return {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config["temperature"],
            "max_tokens": self.config["max_tokens"],
            "top_p": self.config["top_p"],
            "frequency_penalty": self.config["frequency_penalty"],
            "presence_penalty": self.config["presence_penalty"],
        }

    def complete(self, prompt: str) -> CompletionResult:
        import requests

        headers = {"Authorization": f"{self.auth_scheme} {self._key}"}
        start = time.perf_counter()
        last_error = None
        for attempt in range(self.max_retries):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                response = requests.post(
                    self.endpoint, json=self._payload(prompt), headers=headers, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if response.status_code in self.RETRYABLE_STATUS:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.status_code != 200:
                raise TransportError(f"HTTP {response.status_code}: {response.text[:200]}")
            latency = time.perf_counter() - start
            try:
                body = response.json()
                text = body["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise TransportError(f"malformed response body: {exc}") from None
            usage = body.get("usage") or {}
            approx = "completion_tokens" not in usage
            return CompletionResult(
                text=text,
                prompt_tokens=usage.get("prompt_tokens", _approx_tokens(prompt)),
                completion_tokens=usage.get("completion_tokens", _approx_tokens(text)),
                latency=latency,
                tokens_approximate=approx,
            )
        raise EndpointUnreachable(
            f"{self.endpoint} unreachable after {self.max_retries} attempts: {last_error}"
        )


def builtin_adapters() -> dict[str, Callable]:
    return {
        "scripted_oracle": ScriptedOracleAdapter,
        "scripted_constant": ScriptedConstantAdapter,
        "scripted_noisy": ScriptedNoisyAdapter,
        "http_chat": HttpChatAdapter,
    }


def make_adapter(name: str, **config):
    factories = builtin_adapters()
    if name not in factories:
        raise ValueError(f"unknown adapter {name!r}; have {sorted(factories)}")
    return factories[name](**config)


# --- record persistence ------------------------------------------------------


def _record_to_json(record: EvalRecord) -> dict:
    parsed: dict = {"kind": record.parsed.kind}
    if record.parsed.assignment is not None:
        parsed["assignment"] = {str(k): v for k, v in record.parsed.assignment.items()}
    if record.parsed.reason is not None:
        parsed["reason"] = record.parsed.reason
    return {
        "schema_version": RECORD_SCHEMA_VERSION,
        "instance_id": record.instance_id,
        "adapter": record.adapter,
        "format": record.format,
        "variant": record.variant,
        "shots": record.shots,
        "prompt_text": record.prompt_text,
        "raw_response": record.raw_response,
        "parsed": parsed,
        "verdict": record.verdict,
        "prompt_tokens": record.prompt_tokens,
        "completion_tokens": record.completion_tokens,
        "latency": record.latency,
        "tokens_approximate": record.tokens_approximate,
    }


def _record_from_json(data: dict) -> EvalRecord:
    parsed_data = data["parsed"]
    assignment = parsed_data.get("assignment")
    parsed = ParsedAnswer(
        kind=parsed_data["kind"],
        assignment=None if assignment is None else {int(k): v for k, v in assignment.items()},
        reason=parsed_data.get("reason"),
    )
    return EvalRecord(
        instance_id=data["instance_id"],
        adapter=data["adapter"],
        format=data["format"],
        variant=data["variant"],
        shots=data["shots"],
        prompt_text=data["prompt_text"],
        raw_response=data["raw_response"],
        parsed=parsed,
        verdict=data["verdict"],
        prompt_tokens=data["prompt_tokens"],
        completion_tokens=data["completion_tokens"],
        latency=data["latency"],
        tokens_approximate=data.get("tokens_approximate", False),
    )


def write_records(records: Sequence[EvalRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(_record_to_json(record), separators=(",", ":")) + "\n")


def read_records(path, repair_tail: bool = False) -> list[EvalRecord]:
    """Read an EvalRecord JSON Lines file.

    With repair_tail=True a truncated final line (interrupted run) is dropped
    and the file is trimmed back to the last complete record."""
    records: list[EvalRecord] = []
    good_bytes = 0
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = raw.split(b"\n")
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            good_bytes += len(line) + 1
            continue
        try:
            data = json.loads(line.decode("utf-8"))
            if data.get("schema_version") != RECORD_SCHEMA_VERSION:
                raise ValueError(f"schema_version {data.get('schema_version')!r}")
            records.append(_record_from_json(data))
        except (ValueError, KeyError) as exc:
            is_tail = lineno == len(lines) or all(not l.strip() for l in lines[lineno:])
            if repair_tail and is_tail:
                with open(path, "wb") as fh:
                    fh.write(raw[:good_bytes])
                return records
            raise CorruptRecords(lineno, str(exc)) from None
        good_bytes += len(line) + 1
    return records


# --- run loops ---------------------------------------------------------------


def _render(inst: Instance, fmt: str, variant: str, shots: int, vocab_seed: int) -> Rendering:
    if fmt == FORMAT_CNF:
        return encoding.render_cnf(inst, variant, shots)
    if fmt == FORMAT_MENU:
        return encoding.render_menu(inst, variant, shots, vocab_seed)
    if fmt == FORMAT_TRANSLATE:
        return encoding.render_translate(inst, vocab_seed)
    raise ValueError(f"unknown format {fmt!r}")


def _parse_answer(rendering: Rendering, inst: Instance, variant: str, text: str) -> ParsedAnswer:
    if variant == VARIANT_DECISION:
        return encoding.parse_decision_answer(text)
    if rendering.format == FORMAT_CNF:
        return encoding.parse_cnf_answer(text, inst.n)
    return encoding.parse_menu_answer(text, rendering.mapping)


def _translate_parsed(rendering: Rendering, variant: str, text: str) -> ParsedAnswer:
    """Translate pipeline: parse the LaTeX CNF, solve it, and express the
    solver's outcome as a parsed answer in the requested variant."""
    try:
        formula = encoding.parse_latex_cnf(text, rendering.mapping)
    except (encoding.LatexParseError, encoding.UnknownItem) as exc:
        return ParsedAnswer.of_unparseable(str(exc))
    result = solve(formula)
    if variant == VARIANT_DECISION:
        return ParsedAnswer.of_decision(result.verdict == SAT)
    if result.verdict == SAT:
        return ParsedAnswer.of_assignment(result.witness)
    return ParsedAnswer.of_unsat()


def _run(
    dataset: Sequence[Instance],
    adapter,
    fmt: str,
    variant: str,
    shots: int,
    parallelism: int,
    out_path,
    vocab_seed: int,
    translate: bool,
) -> list[EvalRecord]:
    existing: list[EvalRecord] = []
    if out_path is not None and os.path.exists(out_path):
        existing = read_records(out_path, repair_tail=True)
    # a record is identified by its full run coordinates, so one file can
    # hold several runs (e.g. both variants) and still resume correctly
    done = {
        (r.instance_id, r.adapter, r.format, r.variant, r.shots) for r in existing
    }
    pending = [
        inst
        for inst in dataset
        if (inst.id, adapter.name, fmt, variant, shots) not in done
    ]

    def work(inst: Instance) -> EvalRecord:
        rendering = _render(inst, fmt, variant, shots, vocab_seed)
        try:
            completion = adapter.complete(rendering.prompt_text)
        except TransportError as exc:
            return EvalRecord(
                instance_id=inst.id,
                adapter=adapter.name,
                format=fmt,
                variant=variant,
                shots=shots,
                prompt_text=rendering.prompt_text,
                raw_response="",
                parsed=ParsedAnswer.of_unparseable(f"transport error: {exc}"),
                verdict=VERDICT_TRANSPORT_ERROR,
                prompt_tokens=0,
                completion_tokens=0,
                latency=0.0,
                tokens_approximate=True,
            )
        if translate:
            parsed = _translate_parsed(rendering, variant, completion.text)
        else:
            parsed = _parse_answer(rendering, inst, variant, completion.text)
        return EvalRecord(
            instance_id=inst.id,
            adapter=adapter.name,
            format=fmt,
            variant=variant,
            shots=shots,
            prompt_text=rendering.prompt_text,
            raw_response=completion.text,
            parsed=parsed,
            verdict=score(inst, parsed, variant),
            prompt_tokens=completion.prompt_tokens,
            completion_tokens=completion.completion_tokens,
            latency=completion.latency,
            tokens_approximate=completion.tokens_approximate,
        )

    workers = 1 if getattr(adapter, "single_flight", False) else max(1, parallelism)
    out_fh = open(out_path, "a", encoding="utf-8") if out_path is not None else None
    # return only this run's records, even if the file holds other runs too
    records = [
        r
        for r in existing
        if (r.adapter, r.format, r.variant, r.shots) == (adapter.name, fmt, variant, shots)
    ]
    try:
        if workers == 1:
            produced = map(work, pending)
            for record in produced:
                records.append(record)
                if out_fh:
                    out_fh.write(json.dumps(_record_to_json(record), separators=(",", ":")) + "\n")
                    out_fh.flush()
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(work, inst) for inst in pending]
                # results are written in dataset order so output files are
                # byte-reproducible regardless of completion order
                for future in futures:
                    record = future.result()
                    records.append(record)
                    if out_fh:
                        out_fh.write(json.dumps(_record_to_json(record), separators=(",", ":")) + "\n")
                        out_fh.flush()
    finally:
        if out_fh:
            out_fh.close()
    return records


def run_eval(
    dataset: Sequence[Instance],
    adapter,
    fmt: str,
    variant: str = VARIANT_SEARCH,
    shots: int = 0,
    parallelism: int = 1,
    out_path=None,
    vocab_seed: int = 0,
) -> list[EvalRecord]:
    """Evaluate an adapter over a labeled dataset in one format/variant.

    One record per instance; transport errors are captured per record and
    never abort the run.  sat-translate delegates to the pipeline flow."""
    if fmt == FORMAT_TRANSLATE:
        return run_translate_pipeline(
            dataset, adapter, parallelism=parallelism, out_path=out_path,
            vocab_seed=vocab_seed, variant=variant,
        )
    return _run(dataset, adapter, fmt, variant, shots, parallelism, out_path, vocab_seed, False)


def run_translate_pipeline(
    dataset: Sequence[Instance],
    adapter,
    parallelism: int = 1,
    out_path=None,
    vocab_seed: int = 0,
    variant: str = VARIANT_SEARCH,
) -> list[EvalRecord]:
    """Translate-then-solve: render preferences, have the adapter emit a LaTeX
    CNF, parse it, run the internal solver on the translation, and score the
    end-to-end outcome against ground truth."""
    return _run(dataset, adapter, FORMAT_TRANSLATE, variant, 0, parallelism, out_path, vocab_seed, True)
