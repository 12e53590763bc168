"""Find library-API call sites and resolve them to fully-qualified names.

Resolution tiers: (1) module/alias attribute calls, (2) imported static class
calls, (3) Java receivers whose declared type is imported. Everything else is
kept in the record stream as Unresolved but excluded from sampling, because a
task needs a ground-truth fqn.
"""

from __future__ import annotations

import hashlib
import random
import sys
from dataclasses import dataclass
from enum import Enum

from .corpus import SourceFile
from .errors import ParseFailure
from .langs import Language, javasrc, pysrc
from .langs.lexer import LexError


class ReceiverKind(str, Enum):
    IMPORT_ALIAS = "import_alias"
    STATIC_CLASS = "static_class"
    TYPED_RECEIVER = "typed_receiver"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class ApiCallSite:
    site_id: str
    file_id: str
    fqn: str  # "" iff receiver_kind is UNRESOLVED
    receiver_kind: ReceiverKind
    method_span: tuple[int, int]
    args_span: tuple[int, int]
    imports: tuple[str, ...]
    arity: int
    language: Language

    def to_dict(self) -> dict:
        return {
            "site_id": self.site_id,
            "file_id": self.file_id,
            "fqn": self.fqn,
            "receiver_kind": self.receiver_kind.value,
            "method_span": list(self.method_span),
            "args_span": list(self.args_span),
            "imports": list(self.imports),
            "arity": self.arity,
            "language": self.language.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ApiCallSite":
        return cls(
            site_id=d["site_id"],
            file_id=d["file_id"],
            fqn=d["fqn"],
            receiver_kind=ReceiverKind(d["receiver_kind"]),
            method_span=tuple(d["method_span"]),
            args_span=tuple(d["args_span"]),
            imports=tuple(d["imports"]),
            arity=d["arity"],
            language=Language(d["language"]),
        )


@dataclass(frozen=True)
class SignatureKey:
    file_id: str
    fqn: str
    arity: int


def signature_key(site: ApiCallSite) -> SignatureKey:
    return SignatureKey(site.file_id, site.fqn, site.arity)


def _site_id(file_id: str, method_span: tuple[int, int], args_span: tuple[int, int]) -> str:
    key = f"{file_id}:{method_span[0]}-{method_span[1]}:{args_span[0]}-{args_span[1]}"
    return hashlib.sha256(key.encode()).hexdigest()[:16]


def locate(file: SourceFile) -> list[ApiCallSite]:
    """All call sites of a corpus file, document order, resolved where possible."""
    try:
        if file.language is Language.PYTHON:
            imports, calls = pysrc.scan(file.content)
            typed_vars: dict[str, str] = {}
        else:
            imports, typed_vars, calls = javasrc.scan(file.content)
    except (SyntaxError, LexError) as exc:
        raise ParseFailure(f"{file.path}: {exc}") from exc

    stmts: list[str] = []
    for b in imports:
        if b.stmt and b.stmt not in stmts:
            stmts.append(b.stmt)
    import_stmts = tuple(stmts)

    module_aliases = {b.name: b.target for b in imports if b.origin == "module"}
    member_aliases = {b.name: b.target for b in imports if b.origin == "member"}
    class_targets = {b.name: b.target for b in imports if b.origin == "class"}
    static_members = {b.name: b.target for b in imports if b.origin == "static_member"}

    sites = []
    for call in calls:
        fqn = ""
        kind = ReceiverKind.UNRESOLVED
        dotted = ".".join(call.parts)
        if call.root_name is not None:
            root = call.root_name
            if file.language is Language.PYTHON:
                if not call.parts:
                    if root in member_aliases:
                        fqn, kind = member_aliases[root], ReceiverKind.IMPORT_ALIAS
                elif root in module_aliases:
                    fqn, kind = f"{module_aliases[root]}.{dotted}", ReceiverKind.IMPORT_ALIAS
                elif root in member_aliases:
                    fqn, kind = f"{member_aliases[root]}.{dotted}", ReceiverKind.STATIC_CLASS
            else:
                if not call.parts:
                    if root in static_members:
                        fqn, kind = static_members[root], ReceiverKind.IMPORT_ALIAS
                elif root in class_targets:
                    fqn, kind = f"{class_targets[root]}.{dotted}", ReceiverKind.STATIC_CLASS
                elif root in typed_vars:
                    fqn, kind = f"{typed_vars[root]}.{dotted}", ReceiverKind.TYPED_RECEIVER
        sites.append(
            ApiCallSite(
                site_id=_site_id(file.file_id, call.method_span, call.args_span),
                file_id=file.file_id,
                fqn=fqn,
                receiver_kind=kind,
                method_span=call.method_span,
                args_span=call.args_span,
                imports=import_stmts,
                arity=call.arity,
                language=file.language,
            )
        )
    return sites


_JAVA_STDLIB_PREFIXES = ("java.", "javax.")


def is_stdlib(fqn: str, language: Language) -> bool:
    if not fqn:
        return False
    if language is Language.JAVA:
        return fqn.startswith(_JAVA_STDLIB_PREFIXES)
    return fqn.split(".", 1)[0] in sys.stdlib_module_names


def drop_stdlib(sites: list[ApiCallSite]) -> list[ApiCallSite]:
    return [s for s in sites if not is_stdlib(s.fqn, s.language)]


def dedup_sample(sites: list[ApiCallSite], per_language_cap: int, seed: int) -> list[ApiCallSite]:
    """At most one site per signature, a seeded uniform draw over distinct fqns.

    Input must come from one language. Unresolved sites are excluded. Within a
    SignatureKey the first occurrence in document order wins; a drawn fqn then
    contributes one site per distinct arity (first file wins) until the cap.
    """
    if per_language_cap < 1:
        raise ValueError("per_language_cap must be >= 1")
    langs = {s.language for s in sites}
    if len(langs) > 1:
        raise ValueError("dedup_sample expects sites from a single language")

    per_key: dict[SignatureKey, ApiCallSite] = {}
    for site in sites:
        if site.receiver_kind is ReceiverKind.UNRESOLVED or not site.fqn:
            continue
        key = signature_key(site)
        per_key.setdefault(key, site)

    per_signature: dict[tuple[str, int], ApiCallSite] = {}
    for site in sorted(per_key.values(), key=lambda s: (s.file_id, s.method_span)):
        per_signature.setdefault((site.fqn, site.arity), site)

    by_fqn: dict[str, list[ApiCallSite]] = {}
    for (fqn, _), site in sorted(per_signature.items()):
        by_fqn.setdefault(fqn, []).append(site)

    fqns = sorted(by_fqn)
    random.Random(seed).shuffle(fqns)

    picked: list[ApiCallSite] = []
    for fqn in fqns:
        for site in by_fqn[fqn]:
            if len(picked) >= per_language_cap:
                return sorted(picked, key=lambda s: (s.file_id, s.method_span))
            picked.append(site)
    return sorted(picked, key=lambda s: (s.file_id, s.method_span))
