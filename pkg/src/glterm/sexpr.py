"""Lisp-like values, the s-expression reader, and the printer.

A Value is one of:

* ``Sym``  -- an interned, case-sensitive symbol (``NIL``, ``T``, ``:KW``)
* ``int``  -- an arbitrary-precision integer (never a Python ``bool``)
* ``str``  -- a string
* ``Cons`` -- an immutable pair of Values

``NIL`` doubles as the empty list and the false value.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Union


class Sym:
    """Interned symbol. Two symbols are equal iff they are the same object."""

    __slots__ = ("name", "__weakref__")
    _table: dict[str, "Sym"] = {}
    _lock = threading.Lock()

    def __new__(cls, name: str) -> "Sym":
        sym = cls._table.get(name)
        if sym is not None:
            return sym
        with cls._lock:
            sym = cls._table.get(name)
            if sym is None:
                sym = object.__new__(cls)
                sym.name = name
                cls._table[name] = sym
            return sym

    def __reduce__(self):
        return (Sym, (self.name,))

    @property
    def is_keyword(self) -> bool:
        return self.name.startswith(":")

    def __repr__(self) -> str:
        return f"Sym({self.name!r})"

    def __str__(self) -> str:
        return print_value(self)


class Cons:
    __slots__ = ("car", "cdr", "_h")

    def __init__(self, car: "Value", cdr: "Value"):
        object.__setattr__(self, "car", car)
        object.__setattr__(self, "cdr", cdr)
        object.__setattr__(self, "_h", hash((car, cdr)))

    def __setattr__(self, name, value):
        raise AttributeError("Cons is immutable")

    def __hash__(self) -> int:
        return self._h

    def __eq__(self, other) -> bool:
        a, b = self, other
        # iterate down the cdr chain so long lists don't recurse
        while True:
            if a is b:
                return True
            if type(a) is not Cons or type(b) is not Cons:
                return type(a) is type(b) and a == b
            if a._h != b._h or a.car != b.car:
                return False
            a, b = a.cdr, b.cdr

    def __reduce__(self):
        return (Cons, (self.car, self.cdr))

    def __repr__(self) -> str:
        return f"Cons({print_value(self)})"

    def __str__(self) -> str:
        return print_value(self)


Value = Union[Sym, int, str, Cons]

NIL = Sym("NIL")
T = Sym("T")
QUOTE = Sym("QUOTE")
QUASIQUOTE = Sym("QUASIQUOTE")
UNQUOTE = Sym("UNQUOTE")
UNQUOTE_SPLICING = Sym("UNQUOTE-SPLICING")


def kw(name: str) -> Sym:
    """Keyword symbol ``:NAME`` (upcased)."""
    return Sym(":" + name.upper())


def sym(name: str) -> Sym:
    """Ordinary symbol as the reader would intern a bare token."""
    return Sym(name.upper())


def truthy(v: Value) -> bool:
    return v is not NIL


def lisp_bool(b: bool) -> Sym:
    return T if b else NIL


def is_integer(v) -> bool:
    return type(v) is int


def lisp_list(*items: Value, tail: Value = NIL) -> Value:
    out = tail
    for x in reversed(items):
        out = Cons(x, out)
    return out


def from_iter(items: Iterable[Value]) -> Value:
    return lisp_list(*list(items))


def iter_list(v: Value) -> Iterator[Value]:
    """Yield the elements of the proper prefix of ``v``."""
    while type(v) is Cons:
        yield v.car
        v = v.cdr


def to_pylist(v: Value) -> list[Value]:
    return list(iter_list(v))


def is_proper_list(v: Value) -> bool:
    while type(v) is Cons:
        v = v.cdr
    return v is NIL


# ---------------------------------------------------------------------------
# Reader


class ReadError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<block>\#\|.*?\|\#)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<quote>')
  | (?P<backquote>`)
  | (?P<splice>,@)
  | (?P<comma>,)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<atom>(?:[^\s()'`,";|]|\|[^|]*\|)+)
    """,
    re.VERBOSE | re.DOTALL,
)

_INT_RE = re.compile(r"[+-]?\d+\.?$")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ReadError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment", "block"):
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return toks


def _parse_atom(tok: _Tok) -> Value:
    text = tok.text
    if "|" not in text and _INT_RE.match(text):
        return int(text.rstrip("."))
    # strip package prefixes such as gl:: or bitops::
    if "::" in text and not text.startswith("|"):
        text = text.rsplit("::", 1)[1]
    name = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise ReadError("unterminated |symbol|", tok.line, tok.col)
            name.append(text[i + 1 : j])
            i = j + 1
        elif c == "\\" and i + 1 < len(text):
            name.append(text[i + 1])
            i += 2
        else:
            name.append(c.upper())
            i += 1
    name = "".join(name)
    if name == "":
        raise ReadError("empty symbol", tok.line, tok.col)
    if name == ".":
        raise ReadError("misplaced dot", tok.line, tok.col)
    return Sym(name)


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1], flags=re.DOTALL)


class _Reader:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def read(self) -> Value:
        if self.at_end():
            last = self.toks[-1] if self.toks else _Tok("", "", 1, 1)
            raise ReadError("unexpected end of input", last.line, last.col)
        tok = self.toks[self.i]
        self.i += 1
        match tok.kind:
            case "lparen":
                return self._read_list(tok)
            case "rparen":
                raise ReadError("unexpected ')'", tok.line, tok.col)
            case "quote":
                return lisp_list(QUOTE, self.read())
            case "backquote":
                return lisp_list(QUASIQUOTE, self.read())
            case "comma":
                return lisp_list(UNQUOTE, self.read())
            case "splice":
                return lisp_list(UNQUOTE_SPLICING, self.read())
            case "string":
                return _unescape(tok.text)
            case _:
                return _parse_atom(tok)

    def _read_list(self, open_tok: _Tok) -> Value:
        items: list[Value] = []
        tail: Value = NIL
        while True:
            if self.at_end():
                raise ReadError("unclosed '('", open_tok.line, open_tok.col)
            tok = self.toks[self.i]
            if tok.kind == "rparen":
                self.i += 1
                return lisp_list(*items, tail=tail)
            if tok.kind == "atom" and tok.text == ".":
                if not items:
                    raise ReadError("dot at start of list", tok.line, tok.col)
                self.i += 1
                tail = self.read()
                if self.at_end() or self.toks[self.i].kind != "rparen":
                    raise ReadError("expected ')' after dotted tail", tok.line, tok.col)
                continue
            items.append(self.read())


def read_all(text: str) -> list[tuple[Value, int]]:
    """Read every top-level form; returns ``(form, line)`` pairs."""
    r = _Reader(text)
    out = []
    while not r.at_end():
        line = r.toks[r.i].line
        out.append((r.read(), line))
    return out


def read_one(text: str) -> Value:
    forms = read_all(text)
    if len(forms) != 1:
        raise ReadError(f"expected exactly one form, got {len(forms)}", 1, 1)
    return forms[0][0]


# ---------------------------------------------------------------------------
# Printer

_BARE_SYM_RE = re.compile(r"[A-Z0-9*+\-/<>=!?&%$^_~.:@\[\]{}]+$")


def _print_sym(s: Sym) -> str:
    name = s.name
    body = name[1:] if name.startswith(":") else name
    prefix = ":" if name.startswith(":") else ""
    if (
        body
        and _BARE_SYM_RE.match(body)
        and not _INT_RE.match(body)
        and body != "."
        and ":" not in body
    ):
        return prefix + body
    escaped = body.replace("\\", "\\\\").replace("|", "\\|")
    return f"{prefix}|{escaped}|"


def print_value(v: Value) -> str:
    out: list[str] = []
    _print_into(v, out)
    return "".join(out)


def _print_into(v: Value, out: list[str]) -> None:
    t = type(v)
    if t is Sym:
        out.append(_print_sym(v))
    elif t is int:
        out.append(str(v))
    elif t is str:
        out.append('"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif t is Cons:
        out.append("(")
        first = True
        while type(v) is Cons:
            if not first:
                out.append(" ")
            _print_into(v.car, out)
            first = False
            v = v.cdr
        if v is not NIL:
            out.append(" . ")
            _print_into(v, out)
        out.append(")")
    else:
        raise TypeError(f"not a Value: {v!r}")


# ---------------------------------------------------------------------------
# Total order used by ``<<``: integers < symbols < strings < conses.

_KIND_RANK = {int: 0, Sym: 1, str: 2, Cons: 3}


def compare_values(a: Value, b: Value) -> int:
    """Three-way comparison under the ``<<`` total order."""
    while True:
        ta, tb = type(a), type(b)
        if ta is not tb:
            return -1 if _KIND_RANK[ta] < _KIND_RANK[tb] else 1
        if ta is Cons:
            c = compare_values(a.car, b.car)
            if c:
                return c
            a, b = a.cdr, b.cdr
            continue
        if ta is Sym:
            a, b = a.name, b.name
        if a == b:
            return 0
        return -1 if a < b else 1


def lexorder_lt(a: Value, b: Value) -> bool:
    return compare_values(a, b) < 0
