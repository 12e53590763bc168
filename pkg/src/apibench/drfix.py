"""Staged Detect -> Reason -> Fix repair pipeline with refusal short-circuit.

Classification is folded into the detect stage: its response is parsed for a
category name or the "No Issue" refusal, so a completed staged run costs three
generation requests and a refusal or baseline run exactly one. Prompt text
lives in a versioned plain-text template pack so changes stay diffable.
"""

from __future__ import annotations

import ast
import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .annotate import MISUSE_TYPES, MisuseCategory
from .errors import CategoryParseFailure, MissingContext, RepairExtractionFailure
from .gateway import Gateway, GenMode, GenParams, GenRequest
from .langs import Language
from .langs.javasrc import KEYWORDS as JAVA_KEYWORDS
from .langs.lexer import LexError, lex

NO_ISSUE_SENTENCE = 'Please answer with "No Issue" if there is no obvious API misuse.'


class PipelineVariant(str, Enum):
    BASELINE = "baseline"
    NO_TAXONOMY = "no_taxonomy"
    FULL = "full"


class Stage(str, Enum):
    DETECT = "detect"
    REASON = "reason"
    FIX = "fix"


_PLACEHOLDER_RE = re.compile(r"\{(snippet|detect_output|reason_output|exemplars|definitions)\}")


def _substitute(template: str, mapping: dict[str, str]) -> str:
    # single pass so braces inside snippets are never re-expanded
    return _PLACEHOLDER_RE.sub(lambda m: mapping.get(m.group(1), m.group(0)), template)


class TemplatePack:
    """Prompt templates + category definitions + exemplar pool from a directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.definitions = (self.root / "definitions.txt").read_text(encoding="utf-8").strip()
        self.templates: dict[tuple[str, str], str] = {}
        for variant in (PipelineVariant.FULL, PipelineVariant.NO_TAXONOMY):
            for stage in Stage:
                path = self.root / variant.value / f"{stage.value}.txt"
                self.templates[(variant.value, stage.value)] = path.read_text(encoding="utf-8")
        self.templates[("baseline", "repair")] = (
            self.root / "baseline" / "repair.txt"
        ).read_text(encoding="utf-8")
        self.exemplars = json.loads((self.root / "exemplars.json").read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "TemplatePack":
        return cls(Path(str(resources.files("apibench") / "prompts")))


class ExemplarStore:
    """Two demonstration pairs per stage per misuse category."""

    SHOTS_PER_STAGE = 2

    def __init__(self, data: dict):
        for stage in Stage:
            block = data.get(stage.value, {})
            for cat in MISUSE_TYPES:
                pairs = block.get(cat.value, [])
                if len(pairs) != self.SHOTS_PER_STAGE:
                    raise ValueError(
                        f"exemplar pool needs exactly {self.SHOTS_PER_STAGE} pairs for "
                        f"{stage.value}/{cat.value}, found {len(pairs)}"
                    )
        self.data = data

    @classmethod
    def from_pack(cls, pack: TemplatePack) -> "ExemplarStore":
        return cls(pack.exemplars)

    def select(self, stage: Stage, category: MisuseCategory | None) -> list[dict]:
        if category is not None and category is not MisuseCategory.NONE:
            return self.data[stage.value][category.value]
        # detect runs before any category is known: fixed cross-category pair
        return [
            self.data[stage.value][MISUSE_TYPES[0].value][0],
            self.data[stage.value][MISUSE_TYPES[1].value][0],
        ]

    def render(self, stage: Stage, category: MisuseCategory | None) -> str:
        blocks = [
            f"Input:\n{ex['input']}\nOutput:\n{ex['output']}"
            for ex in self.select(stage, category)
        ]
        return "\n\n".join(blocks)


def render_prompt(
    stage: Stage,
    snippet: str,
    variant: PipelineVariant,
    store: ExemplarStore,
    context: dict | None = None,
    pack: TemplatePack | None = None,
) -> str:
    """Deterministic prompt text for one staged request."""
    if variant is PipelineVariant.BASELINE:
        raise ValueError("the baseline variant renders a single repair prompt")
    pack = pack or TemplatePack.default()
    context = context or {}
    if stage in (Stage.REASON, Stage.FIX) and "detect_output" not in context:
        raise MissingContext(f"{stage.value} prompt needs the detect output")
    if stage is Stage.FIX and "reason_output" not in context:
        raise MissingContext("fix prompt needs the reason output")
    category = context.get("category")
    mapping = {
        "snippet": snippet,
        "detect_output": context.get("detect_output", ""),
        "reason_output": context.get("reason_output", ""),
        "definitions": pack.definitions,
        "exemplars": store.render(stage, category if stage is not Stage.DETECT else None),
    }
    return _substitute(pack.templates[(variant.value, stage.value)], mapping)


def render_baseline_prompt(snippet: str, pack: TemplatePack | None = None) -> str:
    pack = pack or TemplatePack.default()
    return _substitute(pack.templates[("baseline", "repair")], {"snippet": snippet})


_CATEGORY_STEMS = [
    (MisuseCategory.INTENT, "intent"),
    (MisuseCategory.HALLUCINATION, "hallucinat"),
    (MisuseCategory.REDUNDANCY, "redundan"),
    (MisuseCategory.MISSING, "missing"),
]


def parse_detect(detect_raw: str) -> MisuseCategory | None:
    """None means refusal; otherwise the first category keyword in priority order."""
    low = detect_raw.lower()
    if "no issue" in low:
        return None
    for category, stem in _CATEGORY_STEMS:
        if stem in low:
            return category
    raise CategoryParseFailure(detect_raw[:120])


_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_MAX_FALLBACK_LINES = 100


def _fragment_parses(region: str, language: Language) -> bool:
    if language is Language.PYTHON:
        try:
            ast.parse(region)
            return True
        except (SyntaxError, ValueError):
            return False
    try:
        tokens = [t for t in lex(region, Language.JAVA, strict=True) if t.kind != "comment"]
    except LexError:
        return False
    if not tokens:
        return False
    depth = {"(": 0, "[": 0, "{": 0}
    closer = {")": "(", "]": "[", "}": "{"}
    for t in tokens:
        if t.kind != "punct":
            continue
        if t.text in depth:
            depth[t.text] += 1
        elif t.text in closer:
            depth[closer[t.text]] -= 1
            if depth[closer[t.text]] < 0:
                return False
    if any(depth.values()):
        return False
    if not any(t.text in (";", "{", "(") for t in tokens):
        return False
    run = 0  # three bare identifiers in a row reads as prose, not Java
    for t in tokens:
        if t.kind == "ident" and t.text not in JAVA_KEYWORDS:
            run += 1
            if run >= 3:
                return False
        else:
            run = 0
    return True


def extract_repair(fix_raw: str, language: Language) -> str:
    """Repaired code from a fix response: first fenced block, else the longest
    line-contiguous region that parses under the task language."""
    match = _FENCE_RE.search(fix_raw)
    if match:
        return match.group(1).rstrip("\n")
    lines = fix_raw.split("\n")[:_MAX_FALLBACK_LINES]
    n = len(lines)
    for length in range(n, 0, -1):
        for start in range(0, n - length + 1):
            region = "\n".join(lines[start : start + length]).strip("\n")
            if region.strip() and _fragment_parses(region, language):
                return region
    raise RepairExtractionFailure("no code block and no parseable region")


@dataclass(frozen=True)
class RepairTrace:
    task_id: str
    variant: PipelineVariant
    detect_raw: str
    detected_category: MisuseCategory | None
    reason_raw: str
    fix_raw: str
    repaired_code: str
    refused: bool
    requests_made: int

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "variant": self.variant.value,
            "detect_raw": self.detect_raw,
            "detected_category": self.detected_category.value if self.detected_category else None,
            "reason_raw": self.reason_raw,
            "fix_raw": self.fix_raw,
            "repaired_code": self.repaired_code,
            "refused": self.refused,
            "requests_made": self.requests_made,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RepairTrace":
        cat = d.get("detected_category")
        return cls(
            task_id=d["task_id"],
            variant=PipelineVariant(d["variant"]),
            detect_raw=d["detect_raw"],
            detected_category=MisuseCategory(cat) if cat else None,
            reason_raw=d["reason_raw"],
            fix_raw=d["fix_raw"],
            repaired_code=d["repaired_code"],
            refused=d["refused"],
            requests_made=d["requests_made"],
        )


def run_pipeline(
    task_id: str,
    snippet: str,
    variant: PipelineVariant,
    gateway: Gateway,
    params: GenParams,
    model_name: str,
    language: Language = Language.PYTHON,
    store: ExemplarStore | None = None,
    pack: TemplatePack | None = None,
) -> RepairTrace:
    """Run one snippet through the chosen variant. A "No Issue" detect response
    short-circuits: the input comes back untouched after a single request."""
    pack = pack or TemplatePack.default()
    store = store or ExemplarStore.from_pack(pack)

    def ask(prompt: str) -> str:
        req = GenRequest(
            mode=GenMode.CHAT,
            model_name=model_name,
            params=params,
            messages=(("user", prompt),),
        )
        return gateway.generate(req).text

    if variant is PipelineVariant.BASELINE:
        text = ask(render_baseline_prompt(snippet, pack))
        if "no issue" in text.lower():
            return RepairTrace(task_id, variant, "", None, "", text, snippet, True, 1)
        repaired = extract_repair(text, language)
        return RepairTrace(task_id, variant, "", None, "", text, repaired, False, 1)

    detect_raw = ask(render_prompt(Stage.DETECT, snippet, variant, store, pack=pack))
    category = parse_detect(detect_raw)
    if category is None:
        return RepairTrace(task_id, variant, detect_raw, None, "", "", snippet, True, 1)

    context = {"detect_output": detect_raw, "category": category}
    reason_raw = ask(render_prompt(Stage.REASON, snippet, variant, store, context, pack))
    context["reason_output"] = reason_raw
    fix_raw = ask(render_prompt(Stage.FIX, snippet, variant, store, context, pack))
    repaired = extract_repair(fix_raw, language)
    return RepairTrace(task_id, variant, detect_raw, category, reason_raw, fix_raw, repaired, False, 3)
