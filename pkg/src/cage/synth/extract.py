"""Lexical extraction of text labels from generated diagram source code.

Labels are the string arguments of the text-rendering constructs in each
target language: ``text(...)`` / ``annotate(...)`` calls in matplotlib
scripts, ``\\node ... {...}`` bodies in TikZ, and ``<text>...</text>``
elements in SVG. Extraction is purely lexical so it works on code we have
not executed yet; the scanners skip comments and respect string escapes
rather than tripping over them.
"""

from __future__ import annotations

import re

from cage.errors import ExtractionError
from cage.synth.artifacts import RenderLanguage

_PY_CALL_NAMES = ("text", "annotate")


def extract_labels(source: str, language: RenderLanguage | str) -> list[str]:
    """Return label strings in source order, one entry per rendering call."""
    language = RenderLanguage(language)
    if language is RenderLanguage.PYTHON_MATPLOTLIB:
        return _extract_python(source)
    if language is RenderLanguage.LATEX_TIKZ:
        return _extract_tikz(source)
    return _extract_svg(source)


def _extract_python(source: str) -> list[str]:
    """First string literal among the arguments of each text()/annotate() call."""
    labels: list[str] = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "#":
            nl = source.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if ch in "\"'":
            _, i = _read_python_string(source, i)
            continue
        if ch.isidentifier() and (i == 0 or not (source[i - 1].isalnum() or source[i - 1] == "_")):
            m = re.match(r"[A-Za-z_][A-Za-z0-9_]*", source[i:])
            name = m.group(0)
            after = i + len(name)
            if name in _PY_CALL_NAMES and after < n and source[after] == "(":
                label, i = _first_string_in_call(source, after)
                if label is not None:
                    labels.append(label)
                continue
            i = after
            continue
        i += 1
    return labels


def _first_string_in_call(source: str, open_paren: int) -> tuple[str | None, int]:
    """Scan a balanced call's arguments for the first string literal."""
    depth = 0
    i, n = open_paren, len(source)
    found: str | None = None
    while i < n:
        ch = source[i]
        if ch == "#":
            nl = source.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if ch in "\"'":
            value, i = _read_python_string(source, i)
            if found is None:
                found = value
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return found, i + 1
        i += 1
    raise ExtractionError("unbalanced parentheses in call", offset=open_paren)


def _read_python_string(source: str, start: int) -> tuple[str, int]:
    """Decode a quoted literal starting at start; returns (value, index past it)."""
    quote = source[start]
    triple = source.startswith(quote * 3, start)
    delim = quote * 3 if triple else quote
    i = start + len(delim)
    out: list[str] = []
    n = len(source)
    while i < n:
        if source.startswith(delim, i):
            return "".join(out), i + len(delim)
        ch = source[i]
        if ch == "\\" and i + 1 < n:
            esc = source[i + 1]
            out.append({"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}.get(esc, "\\" + esc))
            i += 2
            continue
        if ch == "\n" and not triple:
            raise ExtractionError("unterminated string literal", offset=start)
        out.append(ch)
        i += 1
    raise ExtractionError("unterminated string literal", offset=start)


_NODE_RE = re.compile(r"\\node\b")


def _extract_tikz(source: str) -> list[str]:
    """First balanced brace group after each \\node command; TeX comments skipped."""
    text = _strip_tex_comments(source)
    labels: list[str] = []
    for m in _NODE_RE.finditer(text):
        i, n = m.end(), len(text)
        while i < n and text[i] != "{":
            if text[i] == ";":
                break
            i += 1
        if i >= n or text[i] != "{":
            continue
        body, _ = _read_brace_group(text, i)
        labels.append(body.strip())
    return labels


def _strip_tex_comments(source: str) -> str:
    out: list[str] = []
    for line in source.splitlines(keepends=True):
        i = 0
        while i < len(line):
            if line[i] == "%" and (i == 0 or line[i - 1] != "\\"):
                out.append("\n" if line.endswith("\n") else "")
                break
            out.append(line[i])
            i += 1
    return "".join(out)


def _read_brace_group(text: str, open_brace: int) -> tuple[str, int]:
    depth = 0
    for i in range(open_brace, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return text[open_brace + 1:i], i + 1
    raise ExtractionError("unbalanced braces in node body", offset=open_brace)


_SVG_TEXT_RE = re.compile(r"<text\b[^>]*>(.*?)</text>", re.DOTALL | re.IGNORECASE)
_TAG_RE = re.compile(r"<[^>]+>")


def _extract_svg(source: str) -> list[str]:
    """Inner text of each <text> element, nested tspan markup stripped."""
    labels: list[str] = []
    open_tag = re.compile(r"<text\b", re.IGNORECASE)
    for m in open_tag.finditer(source):
        elem = _SVG_TEXT_RE.match(source, m.start())
        if elem is None:
            raise ExtractionError("unterminated <text> element", offset=m.start())
        inner = _TAG_RE.sub(" ", elem.group(1))
        labels.append(" ".join(inner.split()))
    return labels
