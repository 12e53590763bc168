"""Aggregate scored runs into table renderings and failure-overlap partitions.

Percentages render to one decimal place; the JSON rendering always retains the
raw unrounded values and counts so no information is lost to rounding.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import MissingData

MISSING_CELL = "—"  # em dash rendered for absent cells, never fabricated

CellKey = tuple[str, str, str, str]  # (model, method, language, kind)


@dataclass(frozen=True)
class OverlapPartition:
    only_a: int
    only_b: int
    only_c: int
    ab: int  # in a and b, not c
    ac: int
    bc: int
    abc: int

    def to_dict(self) -> dict:
        return {
            "only_a": self.only_a,
            "only_b": self.only_b,
            "only_c": self.only_c,
            "ab": self.ab,
            "ac": self.ac,
            "bc": self.bc,
            "abc": self.abc,
        }

    @property
    def total(self) -> int:
        return self.only_a + self.only_b + self.only_c + self.ab + self.ac + self.bc + self.abc

    @property
    def size_a(self) -> int:
        return self.only_a + self.ab + self.ac + self.abc

    @property
    def size_b(self) -> int:
        return self.only_b + self.ab + self.bc + self.abc

    @property
    def size_c(self) -> int:
        return self.only_c + self.ac + self.bc + self.abc


def overlap_partition(
    failed_a: Iterable[str], failed_b: Iterable[str], failed_c: Iterable[str]
) -> OverlapPartition:
    """Exact seven-region set algebra over three failure sets."""
    a, b, c = set(failed_a), set(failed_b), set(failed_c)
    return OverlapPartition(
        only_a=len(a - b - c),
        only_b=len(b - a - c),
        only_c=len(c - a - b),
        ab=len((a & b) - c),
        ac=len((a & c) - b),
        bc=len((b & c) - a),
        abc=len(a & b & c),
    )


@dataclass(frozen=True)
class TableSpec:
    groups: tuple[tuple[str, str], ...]  # (language, kind)
    rows: tuple[tuple[str, str], ...]  # (model, method)


def spec_from_data(data: Mapping[CellKey, dict]) -> TableSpec:
    groups = sorted({(lang, kind) for (_, _, lang, kind) in data})
    rows = sorted({(model, method) for (model, method, _, _) in data})
    return TableSpec(tuple(groups), tuple(rows))


def _cell(data: Mapping[CellKey, dict], key: CellKey, strict: bool) -> dict | None:
    cell = data.get(key)
    if cell is None and strict:
        raise MissingData(f"no data for {key}")
    return cell


def _fmt(cell: dict | None) -> tuple[str, str, str]:
    if cell is None:
        return (MISSING_CELL, MISSING_CELL, MISSING_CELL)
    # similarity is stored in [0, 1] and scaled only here
    return (
        f"{cell['bleu']:.1f}",
        f"{cell['cbs_f3'] * 100:.1f}",
        f"{cell['em_pct']:.1f}",
    )


def render(spec: TableSpec, data: Mapping[CellKey, dict], fmt: str, strict: bool = False) -> str:
    if fmt == "json":
        records = []
        for language, kind in spec.groups:
            for model, method in spec.rows:
                cell = _cell(data, (model, method, language, kind), strict)
                rec = {
                    "language": language,
                    "kind": kind,
                    "model": model,
                    "method": method,
                    "bleu": None if cell is None else cell["bleu"],
                    "cbs_f3": None if cell is None else cell["cbs_f3"],
                    "em_pct": None if cell is None else cell["em_pct"],
                    "n": None if cell is None else cell["n"],
                }
                records.append(rec)
        return json.dumps(records, ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["language", "kind", "model", "method", "bleu", "codebertscore", "em"])
        for language, kind in spec.groups:
            for model, method in spec.rows:
                b, s, e = _fmt(_cell(data, (model, method, language, kind), strict))
                writer.writerow([language, kind, model, method, b, s, e])
        return buf.getvalue()

    if fmt == "txt":
        widths = [24, 20, 8, 14, 8]
        lines = []
        for language, kind in spec.groups:
            lines.append(f"== {language} / {kind} ==")
            header = ["model", "method", "BLEU", "CodeBERTScore", "EM"]
            lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
            for model, method in spec.rows:
                b, s, e = _fmt(_cell(data, (model, method, language, kind), strict))
                cells = [model, method, b, s, e]
                lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
            lines.append("")
        return "\n".join(lines)

    raise ValueError(f"unknown format {fmt!r}")


def table_from_report(report: Mapping, method: str) -> dict[CellKey, dict]:
    """Flatten a report.json mapping (model -> language -> kind -> cell) into
    renderable cells under one method/variant label."""
    data: dict[CellKey, dict] = {}
    for model, by_lang in report.items():
        for language, by_kind in by_lang.items():
            for kind, cell in by_kind.items():
                data[(model, method, language, kind)] = dict(cell)
    return data
