"""Ingest source trees into a normalized, language-tagged corpus.

Files that fail the language parse gate are excluded rather than partially
analyzed: every downstream mask has to round-trip through a full syntax tree.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fnmatch import fnmatch
from pathlib import Path

from .errors import NoFilesRetained, RootNotFound
from .langs import Language, language_for_path
from .langs import javasrc, pysrc
from .langs.lexer import LexError

MAX_FILE_BYTES = 512 * 1024  # context-window practicality; corpora are snippet-scale


@dataclass(frozen=True)
class SourceFile:
    file_id: str
    repo: str
    path: str
    language: Language
    content: str
    content_hash: str

    def to_dict(self) -> dict:
        return {
            "file_id": self.file_id,
            "repo": self.repo,
            "path": self.path,
            "language": self.language.value,
            "content": self.content,
            "content_hash": self.content_hash,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SourceFile":
        return cls(
            file_id=d["file_id"],
            repo=d["repo"],
            path=d["path"],
            language=Language(d["language"]),
            content=d["content"],
            content_hash=d["content_hash"],
        )


@dataclass(frozen=True)
class CorpusManifest:
    files: tuple[str, ...]  # retained file ids, path order
    counts: dict[str, int]  # per-language retained counts
    seed: int
    discovered: int
    skipped: tuple[tuple[str, str], ...]  # (path, reason)

    def to_dict(self) -> dict:
        return {
            "files": list(self.files),
            "counts": dict(sorted(self.counts.items())),
            "seed": self.seed,
            "discovered": self.discovered,
            "skipped": [{"path": p, "reason": r} for p, r in self.skipped],
        }


def content_digest(content: str) -> str:
    return hashlib.sha256(content.encode("utf-8")).hexdigest()


def _file_id(repo: str, path: str, content_hash: str) -> str:
    return hashlib.sha256(f"{repo}\n{path}\n{content_hash}".encode()).hexdigest()[:16]


def _excluded(relpath: str, patterns: list[str]) -> bool:
    name = relpath.rsplit("/", 1)[-1]
    for pat in patterns:
        candidates = [pat]
        if pat.startswith("**/"):
            candidates.append(pat[3:])
        for p in candidates:
            if fnmatch(relpath, p) or fnmatch(name, p):
                return True
    return False


def _parse_gate(content: str, language: Language) -> str | None:
    """None when the file parses, otherwise a skip reason."""
    try:
        if language is Language.PYTHON:
            pysrc.parse_gate(content)
        else:
            javasrc.parse_gate(content)
    except (SyntaxError, LexError, ValueError) as exc:
        return f"parse-error: {exc}"
    return None


def ingest(
    root: str | Path,
    languages: set[Language] | None = None,
    exclusions: list[str] | None = None,
    seed: int = 0,
    max_bytes: int = MAX_FILE_BYTES,
) -> tuple[CorpusManifest, list[SourceFile]]:
    """Walk `root`, keep parseable files of the requested languages.

    Raises RootNotFound / NoFilesRetained. Deterministic: files are processed
    in sorted relative-path order, so re-ingesting the same tree with the same
    seed and exclusions yields a byte-identical manifest.
    """
    rootp = Path(root)
    if not rootp.is_dir():
        raise RootNotFound(str(root))
    languages = languages or set(Language)
    exclusions = list(exclusions or [])
    repo = rootp.resolve().name

    candidates: list[tuple[str, Path, Language]] = []
    for path in sorted(rootp.rglob("*")):
        if not path.is_file():
            continue
        lang = language_for_path(path.name)
        if lang is None or lang not in languages:
            continue
        candidates.append((path.relative_to(rootp).as_posix(), path, lang))

    retained: list[SourceFile] = []
    skipped: list[tuple[str, str]] = []
    discovered = 0
    for relpath, path, lang in candidates:
        discovered += 1
        if _excluded(relpath, exclusions):
            skipped.append((relpath, "excluded"))
            continue
        raw = path.read_bytes()
        if len(raw) > max_bytes:
            skipped.append((relpath, f"too-large: {len(raw)} bytes"))
            continue
        try:
            content = raw.decode("utf-8")
        except UnicodeDecodeError:
            skipped.append((relpath, "not-utf8"))
            continue
        reason = _parse_gate(content, lang)
        if reason is not None:
            skipped.append((relpath, reason))
            continue
        digest = content_digest(content)
        retained.append(
            SourceFile(
                file_id=_file_id(repo, relpath, digest),
                repo=repo,
                path=relpath,
                language=lang,
                content=content,
                content_hash=digest,
            )
        )

    if not retained:
        raise NoFilesRetained(f"no files retained under {root}")

    counts: dict[str, int] = {}
    for sf in retained:
        counts[sf.language.value] = counts.get(sf.language.value, 0) + 1
    manifest = CorpusManifest(
        files=tuple(sf.file_id for sf in retained),
        counts=counts,
        seed=seed,
        discovered=discovered,
        skipped=tuple(skipped),
    )
    return manifest, retained


def write_corpus(files: list[SourceFile], out: str | Path) -> None:
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for sf in files:
            fh.write(json.dumps(sf.to_dict(), ensure_ascii=False) + "\n")


def write_manifest(manifest: CorpusManifest, out: str | Path) -> None:
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(manifest.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n")


def load_corpus(path: str | Path) -> list[SourceFile]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(SourceFile.from_dict(json.loads(line)))
    return out
