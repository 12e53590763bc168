"""Evaluation metrics: BLEU, element exact match, token-embedding similarity,
refusal rate, and two-rater agreement.

All operations are pure. Tokenization for BLEU and the similarity score uses
the language lexer's token stream with comments dropped.
"""

from __future__ import annotations

import ast
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import (
    DegenerateMarginals,
    EmptyReference,
    LengthMismatch,
    NoCleanSamples,
    ProviderFailure,
    UnbalancedOutput,
)
from .langs import Language
from .langs.lexer import code_tokens, lex
from .taskgen import TaskInstance, TaskKind, extract_element


class Smoothing(str, Enum):
    NONE = "none"  # any p_n = 0 forces a 0 score
    ADD_ONE = "add_one"


@dataclass(frozen=True)
class BleuReport:
    score: float  # [0, 100]
    precisions: tuple[float, float, float, float]
    weights: tuple[float, float, float, float]
    brevity_penalty: float


@dataclass(frozen=True)
class CbsReport:
    precision: float
    recall: float
    f3: float


@dataclass(frozen=True)
class EmBatchReport:
    matches: int
    total: int
    em_pct: float


@dataclass(frozen=True)
class AgreementReport:
    kappa: float
    observed: float
    expected: float


@dataclass(frozen=True)
class RefusalDecision:
    is_clean: bool
    model_said_no_issue: bool


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(
    candidate_tokens: Sequence[str],
    reference_tokens: Sequence[str],
    smoothing: Smoothing = Smoothing.NONE,
) -> BleuReport:
    """Corpus-standard BLEU with clipped n-gram counts and uniform 4-gram weights."""
    if not reference_tokens:
        raise EmptyReference("reference token list is empty")
    weights = (0.25, 0.25, 0.25, 0.25)
    c, r = len(candidate_tokens), len(reference_tokens)

    precisions: list[float] = []
    for n in range(1, 5):
        total = max(c - n + 1, 0)
        if total == 0:
            precisions.append(0.0)
            continue
        cand = _ngram_counts(candidate_tokens, n)
        ref = _ngram_counts(reference_tokens, n)
        clipped = sum(min(count, ref[gram]) for gram, count in cand.items())
        if smoothing is Smoothing.ADD_ONE:
            precisions.append((clipped + 1) / (total + 1))
        else:
            precisions.append(clipped / total)

    if c == 0:
        return BleuReport(0.0, (0.0, 0.0, 0.0, 0.0), weights, 1.0)
    bp = 1.0 if c > r else math.exp(1.0 - r / c)
    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        score = bp * math.exp(sum(w * math.log(p) for w, p in zip(weights, precisions))) * 100.0
    return BleuReport(score, tuple(precisions), weights, bp)


def _single_ident(text: str, language: Language) -> str | None:
    toks = [t for t in lex(text, language) if t.kind != "comment"]
    if len(toks) == 1 and toks[0].kind == "ident":
        return toks[0].text
    if not toks:
        return ""
    return None


def em_element(
    generated_element: str,
    reference_element: str,
    kind: TaskKind,
    language: Language,
) -> bool:
    """Tree-level equality of the masked element, ignoring whitespace/comments.

    Elements are wrapped in a minimal synthetic context and parsed; generated
    text that does not parse is a non-match, never an error. Empty vs empty is
    a match (the degenerate zero-argument case).
    """
    if kind is TaskKind.METHOD_INFILL:
        g = _single_ident(generated_element, language)
        r = _single_ident(reference_element, language)
        return g is not None and r is not None and g == r

    if language is Language.PYTHON:
        try:
            g_tree = ast.parse(f"__f(\n{generated_element}\n)", mode="eval")
            r_tree = ast.parse(f"__f(\n{reference_element}\n)", mode="eval")
        except (SyntaxError, ValueError):
            return False
        return ast.dump(g_tree) == ast.dump(r_tree)
    return code_tokens(f"__f({generated_element})", language) == code_tokens(
        f"__f({reference_element})", language
    )


def em_snippet(candidate: str, reference: str, language: Language) -> bool:
    """Whole-snippet exact match, used for scoring repairs."""
    if language is Language.PYTHON:
        try:
            return ast.dump(ast.parse(candidate)) == ast.dump(ast.parse(reference))
        except (SyntaxError, ValueError):
            return False
    return code_tokens(candidate, language) == code_tokens(reference, language)


def em_batch(flags: Iterable[bool]) -> EmBatchReport:
    flags = list(flags)
    if not flags:
        raise ValueError("empty batch")
    matches = sum(flags)
    return EmBatchReport(matches, len(flags), 100.0 * matches / len(flags))


class EmbeddingProvider(Protocol):
    def embed_pair(
        self, candidate_tokens: Sequence[str], reference_tokens: Sequence[str]
    ) -> tuple[np.ndarray, np.ndarray]:
        """Row-per-token embedding matrices for both sides of one comparison."""


class OneHotProvider:
    """Default test provider: cosine similarity is 1 iff tokens are identical."""

    def embed_pair(self, candidate_tokens, reference_tokens):
        vocab: dict[str, int] = {}
        for tok in list(candidate_tokens) + list(reference_tokens):
            vocab.setdefault(tok, len(vocab))

        def mat(tokens):
            m = np.zeros((len(tokens), max(len(vocab), 1)))
            for i, tok in enumerate(tokens):
                m[i, vocab[tok]] = 1.0
            return m

        return mat(candidate_tokens), mat(reference_tokens)


def codebertscore(
    candidate_tokens: Sequence[str],
    reference_tokens: Sequence[str],
    embed: EmbeddingProvider,
) -> CbsReport:
    """Greedy-matching token similarity with a recall-weighted harmonic mean."""
    if not candidate_tokens and not reference_tokens:
        return CbsReport(1.0, 1.0, 1.0)
    if not candidate_tokens or not reference_tokens:
        return CbsReport(0.0, 0.0, 0.0)
    try:
        cand, ref = embed.embed_pair(candidate_tokens, reference_tokens)
        cand = np.asarray(cand, dtype=float)
        ref = np.asarray(ref, dtype=float)
    except Exception as exc:
        raise ProviderFailure(str(exc)) from exc
    if cand.shape[0] != len(candidate_tokens) or ref.shape[0] != len(reference_tokens):
        raise ProviderFailure("provider returned wrong number of rows")
    cn = np.linalg.norm(cand, axis=1, keepdims=True)
    rn = np.linalg.norm(ref, axis=1, keepdims=True)
    if (cn == 0).any() or (rn == 0).any():
        raise ProviderFailure("provider returned a zero vector")
    sim = (cand / cn) @ (ref / rn).T
    precision = float(sim.max(axis=1).mean())
    recall = float(sim.max(axis=0).mean())
    f3 = 10 * precision * recall / (9 * precision + recall) if precision + recall > 0 else 0.0
    return CbsReport(precision, recall, f3)


def refusal_rate(decisions: Iterable[RefusalDecision]) -> float:
    """Percent of misuse-free samples the model correctly answered "No Issue" on."""
    clean = [d for d in decisions if d.is_clean]
    if not clean:
        raise NoCleanSamples("refusal rate needs at least one clean sample")
    return 100.0 * sum(d.model_said_no_issue for d in clean) / len(clean)


def cohens_kappa(labels_a: Sequence, labels_b: Sequence) -> AgreementReport:
    if len(labels_a) != len(labels_b) or not labels_a:
        raise LengthMismatch(f"{len(labels_a)} vs {len(labels_b)} labels")
    n = len(labels_a)
    observed = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    count_a = Counter(labels_a)
    count_b = Counter(labels_b)
    expected = sum(count_a[k] * count_b.get(k, 0) for k in count_a) / (n * n)
    if expected >= 1.0:
        raise DegenerateMarginals("expected agreement is 1, kappa undefined")
    kappa = (observed - expected) / (1.0 - expected)
    return AgreementReport(kappa, observed, expected)


# --- batch scoring over tasks -------------------------------------------------

# BLEU/similarity are computed over the completed masked region plus a short
# shared prefix window; a bare method identifier has no 4-grams of its own.
PREFIX_WINDOW_TOKENS = 16


@dataclass(frozen=True)
class ScoredTask:
    task_id: str
    model: str
    language: Language
    kind: TaskKind
    em: bool
    bleu: float
    cbs_f3: float
    extract_ok: bool

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "model": self.model,
            "language": self.language.value,
            "kind": self.kind.value,
            "em": self.em,
            "bleu": self.bleu,
            "cbs_f3": self.cbs_f3,
            "extract_ok": self.extract_ok,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoredTask":
        return cls(
            task_id=d["task_id"],
            model=d["model"],
            language=Language(d["language"]),
            kind=TaskKind(d["kind"]),
            em=d["em"],
            bleu=d["bleu"],
            cbs_f3=d["cbs_f3"],
            extract_ok=d["extract_ok"],
        )


def score_completion(
    task: TaskInstance,
    completion_text: str,
    model: str,
    smoothing: Smoothing = Smoothing.NONE,
    provider: EmbeddingProvider | None = None,
) -> ScoredTask:
    """Score one raw completion against its task. Unusable generations (no
    balanced close) score as non-matches across the board."""
    provider = provider or OneHotProvider()
    try:
        element = extract_element(completion_text, task.kind, task.language)
        extract_ok = True
    except UnbalancedOutput:
        element, extract_ok = "", False

    if not extract_ok:
        return ScoredTask(task.task_id, model, task.language, task.kind, False, 0.0, 0.0, False)

    em = em_element(element, task.ground_truth, task.kind, task.language)
    window = code_tokens(task.prefix, task.language)[-PREFIX_WINDOW_TOKENS:]
    cand = window + code_tokens(element + task.suffix, task.language)
    ref = window + code_tokens(task.ground_truth + task.suffix, task.language)
    if not ref:
        bleu_score = 100.0 if not cand else 0.0
    else:
        bleu_score = bleu(cand, ref, smoothing).score
    cbs = codebertscore(cand, ref, provider).f3
    return ScoredTask(task.task_id, model, task.language, task.kind, em, bleu_score, cbs, True)


def aggregate(scored: Iterable[ScoredTask]) -> dict:
    """model -> language -> task kind -> {bleu, cbs_f3, em_pct, n}.

    A deterministic fold in task_id order; similarity stays in [0, 1] here and
    is scaled only at report-rendering time.
    """
    cells: dict[tuple[str, str, str], list[ScoredTask]] = {}
    for st in sorted(scored, key=lambda s: s.task_id):
        cells.setdefault((st.model, st.language.value, st.kind.value), []).append(st)
    out: dict = {}
    for (model, language, kind), rows in sorted(cells.items()):
        n = len(rows)
        cell = {
            "bleu": sum(r.bleu for r in rows) / n,
            "cbs_f3": sum(r.cbs_f3 for r in rows) / n,
            "em_pct": 100.0 * sum(r.em for r in rows) / n,
            "n": n,
        }
        out.setdefault(model, {}).setdefault(language, {})[kind] = cell
    return out
