"""Misuse taxonomy, failure sampling, annotation ingestion, and the
mitigation-set construction that feeds the repair pipeline.

Labels are produced by humans out-of-band and ingested from JSONL; the "none"
category marks completions that failed exact match but were judged acceptable.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import EmptyCell, InsufficientCleanSamples
from .metrics import ScoredTask
from .taskgen import TaskKind


class MisuseCategory(str, Enum):
    INTENT = "intent"
    HALLUCINATION = "hallucination"
    REDUNDANCY = "redundancy"
    MISSING = "missing"
    NONE = "none"


# the four actual misuse types; NONE is "acceptable on inspection"
MISUSE_TYPES = (
    MisuseCategory.INTENT,
    MisuseCategory.HALLUCINATION,
    MisuseCategory.REDUNDANCY,
    MisuseCategory.MISSING,
)


class ElementKind(str, Enum):
    METHOD = "method"
    PARAMETER = "parameter"


def element_kind_for(kind: TaskKind) -> ElementKind:
    return ElementKind.METHOD if kind is TaskKind.METHOD_INFILL else ElementKind.PARAMETER


@dataclass(frozen=True)
class MisuseLabel:
    task_id: str
    annotator: str
    category: MisuseCategory
    element_kind: ElementKind
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "annotator": self.annotator,
            "category": self.category.value,
            "element_kind": self.element_kind.value,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MisuseLabel":
        return cls(
            task_id=d["task_id"],
            annotator=d.get("annotator", ""),
            category=MisuseCategory(d["category"]),
            element_kind=ElementKind(d["element_kind"]),
            note=d.get("note", ""),
        )


def load_labels(path: str | Path) -> list[MisuseLabel]:
    labels = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                labels.append(MisuseLabel.from_dict(json.loads(line)))
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad label record: {exc}") from exc
    return labels


@dataclass(frozen=True)
class MitigationSet:
    misused: tuple[tuple[str, MisuseCategory], ...]  # (task_id, category)
    clean: tuple[str, ...]
    fraction: float
    clean_count: int

    def to_dict(self) -> dict:
        return {
            "misused": [{"task_id": t, "category": c.value} for t, c in self.misused],
            "clean": list(self.clean),
            "fraction": self.fraction,
            "clean_count": self.clean_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MitigationSet":
        return cls(
            misused=tuple((m["task_id"], MisuseCategory(m["category"])) for m in d["misused"]),
            clean=tuple(d["clean"]),
            fraction=d["fraction"],
            clean_count=d["clean_count"],
        )


def sample_failures(
    scored: Iterable[ScoredTask],
    n_per_cell: int,
    seed: int,
) -> dict[tuple[str, str, str], list[str]]:
    """Seeded uniform sample of EM failures, without replacement, per
    (model, element_kind, language) cell. Undersized cells yield what they have.
    """
    cells: dict[tuple[str, str, str], list[str]] = {}
    failures: dict[tuple[str, str, str], list[str]] = {}
    for st in scored:
        key = (st.model, element_kind_for(st.kind).value, st.language.value)
        cells.setdefault(key, [])
        if not st.em:
            failures.setdefault(key, []).append(st.task_id)
    rng = random.Random(seed)
    out: dict[tuple[str, str, str], list[str]] = {}
    for key in sorted(cells):
        pool = sorted(failures.get(key, []))
        if not pool:
            raise EmptyCell(f"no failures in cell {key}")
        out[key] = rng.sample(pool, min(n_per_cell, len(pool)))
    return out


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def build_mitigation_set(
    labels: Iterable[MisuseLabel],
    clean_pool: Iterable[str],
    fraction: float,
    clean_count: int,
    seed: int,
    language_by_task: Mapping[str, str],
) -> MitigationSet:
    """Stratified draw per (language, element_kind, category) plus a seeded
    sample of exact-match snippets as the clean control set."""
    if not (0 < fraction <= 1):
        raise ValueError("fraction must be in (0, 1]")
    strata: dict[tuple[str, str, str], list[tuple[str, MisuseCategory]]] = {}
    for lbl in labels:
        if lbl.category is MisuseCategory.NONE:
            continue
        if lbl.task_id not in language_by_task:
            raise ValueError(f"label for unknown task {lbl.task_id}")
        key = (language_by_task[lbl.task_id], lbl.element_kind.value, lbl.category.value)
        strata.setdefault(key, []).append((lbl.task_id, lbl.category))

    rng = random.Random(seed)
    misused: list[tuple[str, MisuseCategory]] = []
    for key in sorted(strata):
        pool = sorted(strata[key])
        take = _round_half_up(fraction * len(pool))
        misused.extend(rng.sample(pool, take))

    clean_sorted = sorted(set(clean_pool))
    if len(clean_sorted) < clean_count:
        raise InsufficientCleanSamples(
            f"need {clean_count} clean snippets, pool has {len(clean_sorted)}"
        )
    clean = rng.sample(clean_sorted, clean_count)

    overlap = {t for t, _ in misused} & set(clean)
    if overlap:
        raise ValueError(f"misused and clean sets overlap: {sorted(overlap)[:3]}")
    return MitigationSet(tuple(misused), tuple(clean), fraction, clean_count)


def distribution(
    labels: Iterable[MisuseLabel],
    language_by_task: Mapping[str, str],
) -> dict[tuple[str, str], dict[str, float]]:
    """Percentage of each category per (language, element_kind) cell."""
    labels = list(labels)
    if not labels:
        raise ValueError("no labels")
    cells: dict[tuple[str, str], list[MisuseLabel]] = {}
    for lbl in labels:
        if lbl.task_id not in language_by_task:
            raise ValueError(f"label for unknown task {lbl.task_id}")
        cells.setdefault((language_by_task[lbl.task_id], lbl.element_kind.value), []).append(lbl)
    table: dict[tuple[str, str], dict[str, float]] = {}
    for key in sorted(cells):
        group = cells[key]
        table[key] = {
            cat.value: 100.0 * sum(lbl.category is cat for lbl in group) / len(group)
            for cat in MisuseCategory
        }
    return table
