"""Turn call sites into masked completion tasks.

Two task kinds: infilling a masked method name given the call's argument list
as suffix, and completing the argument list left-to-right given everything up
to the opening parenthesis. prefix + ground_truth + suffix always reproduces
the source region byte-exactly.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum

from .corpus import SourceFile
from .errors import SpanOutOfBounds, UnbalancedOutput
from .langs import Language
from .langs.lexer import balanced_close
from .locator import ApiCallSite

DEFAULT_PREFIX_CHARS = 6000  # models have bounded context; keep the most recent window


class TaskKind(str, Enum):
    METHOD_INFILL = "method_infill"
    PARAM_COMPLETION = "param_completion"


@dataclass(frozen=True)
class TaskInstance:
    task_id: str
    kind: TaskKind
    file_id: str
    site_id: str
    prefix: str
    ground_truth: str
    suffix: str
    fqn: str
    language: Language

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "kind": self.kind.value,
            "file_id": self.file_id,
            "site_id": self.site_id,
            "prefix": self.prefix,
            "ground_truth": self.ground_truth,
            "suffix": self.suffix,
            "fqn": self.fqn,
            "language": self.language.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskInstance":
        return cls(
            task_id=d["task_id"],
            kind=TaskKind(d["kind"]),
            file_id=d["file_id"],
            site_id=d["site_id"],
            prefix=d["prefix"],
            ground_truth=d["ground_truth"],
            suffix=d["suffix"],
            fqn=d["fqn"],
            language=Language(d["language"]),
        )


def _task_id(site_id: str, kind: TaskKind) -> str:
    return hashlib.sha256(f"{site_id}:{kind.value}".encode()).hexdigest()[:16]


def _slice(data: bytes, start: int, end: int, what: str) -> str:
    if not (0 <= start <= end <= len(data)):
        raise SpanOutOfBounds(f"{what} [{start}, {end}) outside file of {len(data)} bytes")
    try:
        return data[start:end].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SpanOutOfBounds(f"{what} does not fall on character boundaries") from exc


def gen_method_infill(
    site: ApiCallSite,
    file: SourceFile,
    prefix_chars: int = DEFAULT_PREFIX_CHARS,
    extend_suffix_to_eof: bool = False,
) -> TaskInstance:
    """Mask the method identifier; the parenthesized argument list is the suffix."""
    data = file.content.encode("utf-8")
    m_start, m_end = site.method_span
    a_end = site.args_span[1]
    prefix = _slice(data, 0, m_start, "method_span")
    ground_truth = _slice(data, m_start, m_end, "method_span")
    suffix_end = len(data) if extend_suffix_to_eof else a_end
    suffix = _slice(data, m_end, suffix_end, "args_span")
    return TaskInstance(
        task_id=_task_id(site.site_id, TaskKind.METHOD_INFILL),
        kind=TaskKind.METHOD_INFILL,
        file_id=file.file_id,
        site_id=site.site_id,
        prefix=prefix[-prefix_chars:],
        ground_truth=ground_truth,
        suffix=suffix,
        fqn=site.fqn,
        language=site.language,
    )


def gen_param_completion(
    site: ApiCallSite,
    file: SourceFile,
    prefix_chars: int = DEFAULT_PREFIX_CHARS,
) -> TaskInstance:
    """Mask the argument text; the prompt is everything through the opening "("."""
    data = file.content.encode("utf-8")
    a_start, a_end = site.args_span
    prefix = _slice(data, 0, a_start + 1, "args_span")
    ground_truth = _slice(data, a_start + 1, a_end - 1, "args_span")
    suffix = _slice(data, a_end - 1, a_end, "args_span")
    return TaskInstance(
        task_id=_task_id(site.site_id, TaskKind.PARAM_COMPLETION),
        kind=TaskKind.PARAM_COMPLETION,
        file_id=file.file_id,
        site_id=site.site_id,
        prefix=prefix[-prefix_chars:],
        ground_truth=ground_truth,
        suffix=suffix,
        fqn=site.fqn,
        language=site.language,
    )


_IDENT_RE = {
    Language.PYTHON: re.compile(r"[^\W\d]\w*"),
    Language.JAVA: re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*"),
}


def extract_element(raw_completion: str, kind: TaskKind, language: Language) -> str:
    """The masked element a raw model continuation amounts to.

    MethodInfill takes the longest leading identifier token. ParamCompletion
    scans for the parenthesis-balanced close relative to the already-open "("
    (string and char literals respected); trailing content is discarded.
    """
    if kind is TaskKind.METHOD_INFILL:
        m = _IDENT_RE[language].match(raw_completion.lstrip())
        return m.group(0) if m else ""
    close = balanced_close(raw_completion, language)
    if close is None:
        raise UnbalancedOutput("completion never closes the argument list")
    return raw_completion[:close]
