"""Language front ends: lexing, parse gates, and call-site scanning."""

from __future__ import annotations

from enum import Enum


class Language(str, Enum):
    PYTHON = "python"
    JAVA = "java"


EXTENSION_MAP = {
    ".py": Language.PYTHON,
    ".java": Language.JAVA,
}


def language_for_path(path: str) -> Language | None:
    for ext, lang in EXTENSION_MAP.items():
        if path.endswith(ext):
            return lang
    return None
