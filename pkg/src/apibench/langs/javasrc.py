"""Java front end: token-level structural gate, imports, typed locals, calls.

There is no full Java grammar here. The scanner works on the lexer's token
stream, which is enough to localize call sites with exact byte spans, resolve
receivers through imports and declared types, and gate out files that are not
structurally sound.
"""

from __future__ import annotations

from . import Language
from .lexer import LexError, Token, lex
from .pysrc import ImportBinding, RawCall

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public record return sealed short static strictfp super switch
    synchronized this throw throws transient try var void volatile while
    yield""".split()
)

_STRUCT_KEYWORDS = frozenset({"package", "import", "class", "interface", "enum", "record"})

# keywords followed by "(" that are not method calls
_CALL_EXCLUDE = frozenset(
    {"if", "for", "while", "switch", "catch", "synchronized", "return", "new",
     "assert", "throw", "this", "super", "do", "else", "case", "instanceof",
     "yield", "try"}
)

# a bare ident( preceded by one of these keywords is still a call; any other
# preceding identifier means we are looking at a method declaration
_EXPR_PRECEDERS = frozenset(
    {"return", "throw", "else", "do", "case", "yield", "assert", "new", "instanceof"}
)

_PAIRS = {")": "(", "]": "[", "}": "{"}

# token texts that may appear inside a type-argument list
_GENERIC_BODY = frozenset({".", ",", "?", "[", "]", "&", "<", ">", ">>", ">>>"})


def parse_gate(content: str) -> None:
    """Raise LexError when the file fails the structural well-formedness gate."""
    tokens = lex(content, Language.JAVA, strict=True)
    stack: list[str] = []
    for t in tokens:
        if t.kind != "punct":
            continue
        if t.text in "([{":
            stack.append(t.text)
        elif t.text in ")]}":
            if not stack or stack.pop() != _PAIRS[t.text]:
                raise LexError(f"unbalanced {t.text!r} at byte {t.start}")
    if stack:
        raise LexError(f"unclosed {stack[-1]!r}")
    idents = {t.text for t in tokens if t.kind == "ident"}
    if not idents & _STRUCT_KEYWORDS:
        raise LexError("no package, import, or type declaration")


def scan(content: str) -> tuple[list[ImportBinding], dict[str, str], list[RawCall]]:
    """Imports, declared variable types, and call sites in document order."""
    tokens = [t for t in lex(content, Language.JAVA) if t.kind != "comment"]
    imports = _scan_imports(content, tokens)
    class_targets = {b.name: b.target for b in imports if b.origin == "class"}
    typed_vars = _scan_typed_vars(tokens, class_targets)
    calls = _scan_calls(tokens)
    return imports, typed_vars, calls


def _scan_imports(content: str, tokens: list[Token]) -> list[ImportBinding]:
    imports: list[ImportBinding] = []
    n = len(tokens)
    i = 0
    while i < n:
        t = tokens[i]
        if not (t.kind == "ident" and t.text == "import"):
            i += 1
            continue
        j = i + 1
        static = j < n and tokens[j].text == "static"
        if static:
            j += 1
        parts: list[str] = []
        wildcard = False
        while j < n and tokens[j].text != ";":
            tk = tokens[j]
            if tk.kind == "ident":
                parts.append(tk.text)
            elif tk.text == "*":
                wildcard = True
            elif tk.text != ".":
                break
            j += 1
        end = tokens[j].cend if j < n else len(content)
        stmt = content[t.cstart:end]
        if parts and not wildcard:
            origin = "static_member" if static else "class"
            imports.append(ImportBinding(parts[-1], ".".join(parts), origin, stmt))
        i = j + 1
    return imports


def _skip_generic(tokens: list[Token], i: int, limit: int = 120) -> int | None:
    """Index just past a balanced type-argument list opening at tokens[i]."""
    depth = 0
    j = i
    while j < len(tokens) and j - i < limit:
        t = tokens[j]
        if t.text == "<":
            depth += 1
        elif t.text in (">", ">>", ">>>"):
            depth -= len(t.text)
            if depth <= 0:
                return j + 1
        elif t.kind == "ident":
            if t.text in KEYWORDS and t.text not in ("extends", "super"):
                return None
        elif t.kind != "punct" or t.text not in _GENERIC_BODY:
            return None
        j += 1
    return None


def _scan_typed_vars(tokens: list[Token], class_targets: dict[str, str]) -> dict[str, str]:
    typed: dict[str, str] = {}
    n = len(tokens)
    for k, tok in enumerate(tokens):
        if tok.kind != "ident" or tok.text not in class_targets:
            continue
        if k > 0 and tokens[k - 1].text in (".", "import"):
            continue
        j = k + 1
        if j < n and tokens[j].text == "<":
            skipped = _skip_generic(tokens, j)
            if skipped is None:
                continue
            j = skipped
        while j + 1 < n and tokens[j].text == "[" and tokens[j + 1].text == "]":
            j += 2
        if j < n and tokens[j].kind == "ident" and tokens[j].text not in KEYWORDS:
            nxt = tokens[j + 1].text if j + 1 < n else ""
            if nxt in ("=", ";", ",", ")", ":"):
                typed[tokens[j].text] = class_targets[tok.text]
    return typed


def _match_paren(tokens: list[Token], open_idx: int) -> int | None:
    depth = 0
    for j in range(open_idx, len(tokens)):
        text = tokens[j].text
        if tokens[j].kind != "punct":
            continue
        if text == "(":
            depth += 1
        elif text == ")":
            depth -= 1
            if depth == 0:
                return j
    return None


def _arity(tokens: list[Token], open_idx: int, close_idx: int) -> int:
    if close_idx == open_idx + 1:
        return 0
    count = 1
    depth = 0
    j = open_idx + 1
    while j < close_idx:
        t = tokens[j]
        if t.kind == "punct":
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                depth -= 1
            elif t.text == "<":
                skipped = _skip_generic(tokens, j)
                if skipped is not None and skipped <= close_idx:
                    j = skipped
                    continue
            elif t.text == "," and depth == 0:
                count += 1
        j += 1
    return count


def _scan_calls(tokens: list[Token]) -> list[RawCall]:
    calls: list[RawCall] = []
    n = len(tokens)
    for idx in range(n - 1):
        t = tokens[idx]
        nxt = tokens[idx + 1]
        if t.kind != "ident" or not (nxt.kind == "punct" and nxt.text == "("):
            continue
        if t.text in _CALL_EXCLUDE:
            continue

        chain = [idx]
        k = idx - 1
        while k >= 1 and tokens[k].kind == "punct" and tokens[k].text == "." \
                and tokens[k - 1].kind == "ident":
            chain.insert(0, k - 1)
            k -= 2
        boundary = tokens[k] if k >= 0 else None
        expr_receiver = boundary is not None and boundary.kind == "punct" and boundary.text == "."

        if boundary is not None and boundary.kind == "ident" and boundary.text == "new":
            continue  # constructor invocation
        if boundary is not None and boundary.kind == "punct" and boundary.text == "@":
            continue  # annotation
        if len(chain) == 1 and not expr_receiver and boundary is not None:
            if boundary.kind == "ident" and boundary.text not in _EXPR_PRECEDERS:
                continue  # declaration: ident preceded by a type name or modifier
            if boundary.text in (">", "]", ">>", ">>>"):
                continue  # declaration with generic or array return type

        close = _match_paren(tokens, idx + 1)
        if close is None:
            continue
        chain_texts = [tokens[c].text for c in chain]
        if expr_receiver:
            root: str | None = None
            parts = tuple(chain_texts)
        elif len(chain) == 1:
            root = chain_texts[0]
            parts = ()
        else:
            root = chain_texts[0]
            parts = tuple(chain_texts[1:])
        calls.append(
            RawCall(
                method_name=t.text,
                method_span=(t.start, t.end),
                args_span=(nxt.start, tokens[close].end),
                arity=_arity(tokens, idx + 1, close),
                root_name=root,
                parts=parts,
            )
        )
    calls.sort(key=lambda c: c.method_span)
    return calls
