"""Tolerant code lexer shared by both languages.

Produces a flat token stream with byte and character spans. It is not a
validating lexer: in non-strict mode unterminated literals and comments are
consumed to end of input, which lets the same scanner tokenize model output
fragments. Strict mode raises LexError instead and backs the Java parse gate.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import Language


class LexError(ValueError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | string | char | punct | comment
    text: str
    start: int  # byte offset, inclusive
    end: int  # byte offset, exclusive
    cstart: int  # character offset, inclusive
    cend: int  # character offset, exclusive


_PY_OPERATORS = [
    "**=", "//=", ">>=", "<<=", "...", ":=", "->", "==", "!=", ">=", "<=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "**", "//", ">>",
    "<<",
]
_JAVA_OPERATORS = [
    ">>>=", ">>>", "<<=", ">>=", "==", "!=", "<=", ">=", "&&", "||", "++",
    "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "->", "::",
]

_STRING_PREFIXES = {"r", "b", "u", "f", "rb", "br", "fr", "rf", "bf", "fb"}


def _is_ident_start(ch: str, language: Language) -> bool:
    if ch == "_" or ch.isalpha():
        return True
    return language is Language.JAVA and ch == "$"


def _is_ident_part(ch: str, language: Language) -> bool:
    if ch == "_" or ch.isalnum():
        return True
    return language is Language.JAVA and ch == "$"


def lex(text: str, language: Language, strict: bool = False) -> list[Token]:
    """Tokenize source text, returning comments as tokens of kind "comment"."""
    operators = _PY_OPERATORS if language is Language.PYTHON else _JAVA_OPERATORS
    # byte offset of each character
    offs = [0] * (len(text) + 1)
    for idx, ch in enumerate(text):
        offs[idx + 1] = offs[idx] + len(ch.encode("utf-8"))

    tokens: list[Token] = []
    i = 0
    n = len(text)

    def emit(kind: str, start_c: int, end_c: int) -> None:
        tokens.append(Token(kind, text[start_c:end_c], offs[start_c], offs[end_c], start_c, end_c))

    def scan_quoted(start_c: int, quote: str, allow_newline: bool) -> int:
        """Return the char index just past the closing quote; -1 if unterminated."""
        j = start_c
        qlen = len(quote)
        while j < n:
            ch = text[j]
            if ch == "\\" and j + 1 < n:
                j += 2
                continue
            if text.startswith(quote, j):
                return j + qlen
            if ch == "\n" and not allow_newline:
                return -1
            j += 1
        return -1

    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue

        # comments
        if language is Language.PYTHON and ch == "#":
            j = text.find("\n", i)
            j = n if j == -1 else j
            emit("comment", i, j)
            i = j
            continue
        if language is Language.JAVA and text.startswith("//", i):
            j = text.find("\n", i)
            j = n if j == -1 else j
            emit("comment", i, j)
            i = j
            continue
        if language is Language.JAVA and text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j == -1:
                if strict:
                    raise LexError(f"unterminated block comment at byte {offs[i]}")
                j = n
            else:
                j += 2
            emit("comment", i, j)
            i = j
            continue

        # string and char literals
        if language is Language.PYTHON:
            prefix_end = i
            while prefix_end < n and text[prefix_end].isalpha() and prefix_end - i < 2:
                prefix_end += 1
            has_prefix = (
                prefix_end > i
                and prefix_end < n
                and text[prefix_end] in "'\""
                and text[i:prefix_end].lower() in _STRING_PREFIXES
            )
            qpos = prefix_end if has_prefix else i
            if qpos < n and text[qpos] in "'\"" and (has_prefix or qpos == i):
                q = text[qpos]
                triple = text.startswith(q * 3, qpos)
                quote = q * 3 if triple else q
                j = scan_quoted(qpos + len(quote), quote, allow_newline=triple)
                if j == -1:
                    if strict:
                        raise LexError(f"unterminated string at byte {offs[i]}")
                    j = n
                emit("string", i, j)
                i = j
                continue
        else:
            if text.startswith('"""', i):
                j = scan_quoted(i + 3, '"""', allow_newline=True)
                if j == -1:
                    if strict:
                        raise LexError(f"unterminated text block at byte {offs[i]}")
                    j = n
                emit("string", i, j)
                i = j
                continue
            if ch == '"':
                j = scan_quoted(i + 1, '"', allow_newline=False)
                if j == -1:
                    if strict:
                        raise LexError(f"unterminated string at byte {offs[i]}")
                    j = n
                emit("string", i, j)
                i = j
                continue
            if ch == "'":
                j = scan_quoted(i + 1, "'", allow_newline=False)
                if j == -1:
                    if strict:
                        raise LexError(f"unterminated char literal at byte {offs[i]}")
                    j = n
                emit("char", i, j)
                i = j
                continue

        # numbers
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n:
                c = text[j]
                if c.isalnum() or c in "._":
                    j += 1
                elif c in "+-" and text[j - 1] in "eEpP" and text[i].isdigit():
                    j += 1
                else:
                    break
            emit("number", i, j)
            i = j
            continue

        # identifiers and keywords
        if _is_ident_start(ch, language):
            j = i + 1
            while j < n and _is_ident_part(text[j], language):
                j += 1
            emit("ident", i, j)
            i = j
            continue

        # multi-char operators, then single punctuation
        for op in operators:
            if text.startswith(op, i):
                emit("punct", i, i + len(op))
                i += len(op)
                break
        else:
            emit("punct", i, i + 1)
            i += 1

    return tokens


def code_tokens(text: str, language: Language) -> list[str]:
    """Token texts with comments dropped; the stream used for BLEU and similarity."""
    return [t.text for t in lex(text, language) if t.kind != "comment"]


def balanced_close(text: str, language: Language) -> int | None:
    """Character index of the ")" that closes an argument list already open
    before `text` starts. String/char literals and comments are skipped.
    Returns None when the completion never balances."""
    depth = 1
    for tok in lex(text, language):
        if tok.kind != "punct":
            continue
        if tok.text == "(":
            depth += 1
        elif tok.text == ")":
            depth -= 1
            if depth == 0:
                return tok.cstart
    return None
