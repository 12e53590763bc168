"""Python front end: parse gate and call-site scanning via the stdlib ast."""

from __future__ import annotations

import ast
from dataclasses import dataclass

from . import Language
from .lexer import lex


@dataclass(frozen=True)
class ImportBinding:
    name: str  # identifier the import binds in the file
    target: str  # dotted path it resolves to
    origin: str  # "module" (import x [as y]) | "member" (from m import x) | "class" | "static_member"
    stmt: str  # statement source text


@dataclass(frozen=True)
class RawCall:
    method_name: str
    method_span: tuple[int, int]  # byte range of the method identifier
    args_span: tuple[int, int]  # byte range "(" .. ")" inclusive
    arity: int
    root_name: str | None  # leading identifier of the receiver chain; None for expression receivers
    parts: tuple[str, ...]  # dotted path after the root incl. the method name; () for bare calls


def parse_gate(content: str) -> None:
    """Raise SyntaxError when the file does not parse."""
    ast.parse(content)


def _line_starts(content: str) -> list[int]:
    starts = [0]
    for line in content.split("\n")[:-1]:
        starts.append(starts[-1] + len(line.encode("utf-8")) + 1)
    return starts


def scan(content: str) -> tuple[list[ImportBinding], list[RawCall]]:
    """Imports and call sites of a parseable Python file, in document order."""
    tree = ast.parse(content)
    starts = _line_starts(content)

    def bpos(lineno: int, col: int) -> int:
        return starts[lineno - 1] + col  # col_offset is already a UTF-8 byte offset

    imports: list[ImportBinding] = []
    import_nodes = [
        node for node in ast.walk(tree) if isinstance(node, (ast.Import, ast.ImportFrom))
    ]
    import_nodes.sort(key=lambda nd: (nd.lineno, nd.col_offset))
    for node in import_nodes:
        stmt = ast.get_source_segment(content, node) or ""
        if isinstance(node, ast.Import):
            for alias in node.names:
                if alias.asname:
                    imports.append(ImportBinding(alias.asname, alias.name, "module", stmt))
                else:
                    head = alias.name.split(".")[0]
                    imports.append(ImportBinding(head, head, "module", stmt))
        else:
            if node.level > 0 or node.module is None:
                continue  # relative imports are project-local, not library APIs
            for alias in node.names:
                if alias.name == "*":
                    continue
                bound = alias.asname or alias.name
                imports.append(ImportBinding(bound, f"{node.module}.{alias.name}", "member", stmt))

    calls: list[RawCall] = []
    for node in ast.walk(tree):
        if not isinstance(node, ast.Call):
            continue
        func = node.func
        parts: list[str] = []
        base = func
        while isinstance(base, ast.Attribute):
            parts.append(base.attr)
            base = base.value
        parts.reverse()

        if isinstance(base, ast.Name):
            root: str | None = base.id
        else:
            root = None
        if not parts and root is None:
            continue  # no maskable method identifier (e.g. f()() or lambda call)

        func_end = bpos(func.end_lineno, func.end_col_offset)
        if parts:
            method_name = parts[-1]
            method_span = (func_end - len(method_name.encode("utf-8")), func_end)
        else:
            method_name = root  # bare call
            method_span = (bpos(base.lineno, base.col_offset), func_end)

        call_end = bpos(node.end_lineno, node.end_col_offset)
        open_pos = _args_open(content, language=Language.PYTHON, lo=func_end, hi=call_end)
        if open_pos is None:
            continue
        calls.append(
            RawCall(
                method_name=method_name,
                method_span=method_span,
                args_span=(open_pos, call_end),
                arity=len(node.args) + len(node.keywords),
                root_name=root,
                parts=tuple(parts),
            )
        )

    calls.sort(key=lambda c: c.method_span)
    return imports, calls


def _args_open(content: str, language: Language, lo: int, hi: int) -> int | None:
    """Byte offset of the "(" opening the argument list that closes at hi-1.

    Matched backward from the final ")" so that parenthesized callees like
    ``(a.b)(x)`` resolve to the correct opener.
    """
    data = content.encode("utf-8")
    region = data[lo:hi].decode("utf-8")
    depth = 0
    for tok in reversed(lex(region, language)):
        if tok.kind != "punct":
            continue
        if tok.text == ")":
            depth += 1
        elif tok.text == "(":
            depth -= 1
            if depth == 0:
                return lo + tok.start
    return None
