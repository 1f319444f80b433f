"""Terms: the input language of conjectures, definitions, and rules.

Raw s-expressions are turned into Terms by :func:`translate`, which also
expands a fixed set of abbreviations (``and``, ``let*``, ``+``, ...) into
calls of primitives and prelude functions. User macros are not supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .sexpr import (
    NIL,
    QUOTE,
    T,
    Cons,
    Sym,
    Value,
    is_proper_list,
    lisp_list,
    print_value,
    to_pylist,
)


@dataclass(frozen=True)
class Var:
    name: Sym

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class Quote:
    value: Value

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class Call:
    fn: Sym
    args: tuple["Term", ...]

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class LambdaCall:
    formals: tuple[Sym, ...]
    body: "Term"
    args: tuple["Term", ...]

    def __str__(self):
        return term_str(self)


Term = Union[Var, Quote, Call, LambdaCall]


@dataclass(frozen=True)
class Lambda:
    """A closed one-or-more-argument lambda, used as an inverse function."""

    formals: tuple[Sym, ...]
    body: Term


@dataclass(frozen=True)
class Defn:
    name: Sym
    formals: tuple[Sym, ...]
    body: Term


class TranslateError(ValueError):
    pass


S = Sym
IF = S("IF")
LAMBDA = S("LAMBDA")
NOT = S("NOT")
EQUAL = S("EQUAL")
CONS = S("CONS")
CAR = S("CAR")
CDR = S("CDR")
CONSP = S("CONSP")
INTEGERP = S("INTEGERP")
BINARY_PLUS = S("BINARY-+")
BINARY_TIMES = S("BINARY-*")
UNARY_MINUS = S("UNARY--")
LESSP = S("<")

TRUE_TERM = Quote(T)
FALSE_TERM = Quote(NIL)


def qint(n: int) -> Quote:
    return Quote(n)


def call(fn: str | Sym, *args: Term) -> Call:
    return Call(fn if isinstance(fn, Sym) else S(fn.upper()), tuple(args))


def mk_if(c: Term, a: Term, b: Term) -> Call:
    return Call(IF, (c, a, b))


def conjoin(terms: list[Term]) -> Term:
    if not terms:
        return TRUE_TERM
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = mk_if(t, out, FALSE_TERM)
    return out


# ---------------------------------------------------------------------------
# Free variables and structural helpers


def free_vars(t: Term) -> set[Sym]:
    out: set[Sym] = set()
    _free_into(t, out)
    return out


def free_vars_ordered(t: Term) -> list[Sym]:
    """Free variables in first-occurrence order."""
    seen: dict[Sym, None] = {}

    def walk(x):
        match x:
            case Var(name):
                seen.setdefault(name, None)
            case Call(_, args) | LambdaCall(_, _, args):
                for a in args:
                    walk(a)

    walk(t)
    return list(seen)


def _free_into(t: Term, out: set[Sym]) -> None:
    match t:
        case Var(name):
            out.add(name)
        case Quote():
            pass
        case Call(_, args) | LambdaCall(_, _, args):
            # lambda bodies are closed, so only the actuals contribute
            for a in args:
                _free_into(a, out)


def fn_symbols(t: Term) -> set[Sym]:
    out: set[Sym] = set()

    def walk(x):
        match x:
            case Call(fn, args):
                out.add(fn)
                for a in args:
                    walk(a)
            case LambdaCall(_, body, args):
                walk(body)
                for a in args:
                    walk(a)

    walk(t)
    return out


def subst_term(t: Term, sub: Mapping[Sym, Term]) -> Term:
    match t:
        case Var(name):
            return sub.get(name, t)
        case Quote():
            return t
        case Call(fn, args):
            return Call(fn, tuple(subst_term(a, sub) for a in args))
        case LambdaCall(formals, body, args):
            return LambdaCall(formals, body, tuple(subst_term(a, sub) for a in args))
    raise TypeError(t)


def term_to_value(t: Term) -> Value:
    """Render a term back to an s-expression (quotes become ``(quote x)``)."""
    match t:
        case Var(name):
            return name
        case Quote(v):
            if type(v) is int or v is T or v is NIL or (type(v) is Sym and v.is_keyword):
                return v
            return lisp_list(QUOTE, v)
        case Call(fn, args):
            return lisp_list(fn, *(term_to_value(a) for a in args))
        case LambdaCall(formals, body, args):
            lam = lisp_list(LAMBDA, lisp_list(*formals), term_to_value(body))
            return lisp_list(lam, *(term_to_value(a) for a in args))
    raise TypeError(t)


def term_str(t: Term) -> str:
    return print_value(term_to_value(t))


# ---------------------------------------------------------------------------
# Translation from s-expressions


def _is_var_sym(x) -> bool:
    return type(x) is Sym and x is not T and x is not NIL and not x.is_keyword


def translate(x: Value) -> Term:
    """Translate an s-expression into a Term, expanding abbreviations."""
    t = type(x)
    if t is Sym:
        if x is T or x is NIL or x.is_keyword:
            return Quote(x)
        return Var(x)
    if t is int or t is str:
        return Quote(x)
    if t is not Cons:
        raise TranslateError(f"cannot translate {x!r}")
    if not is_proper_list(x):
        raise TranslateError(f"improper argument list in {print_value(x)}")
    head = x.car
    items = to_pylist(x.cdr)
    if type(head) is Cons:
        if head.car is LAMBDA:
            lam = translate_lambda(head)
            args = tuple(translate(a) for a in items)
            if len(args) != len(lam.formals):
                raise TranslateError(f"lambda arity mismatch in {print_value(x)}")
            return LambdaCall(lam.formals, lam.body, args)
        raise TranslateError(f"non-symbol function position in {print_value(x)}")
    if type(head) is not Sym or head is T or head is NIL:
        raise TranslateError(f"non-symbol function position in {print_value(x)}")
    if head is QUOTE:
        if len(items) != 1:
            raise TranslateError(f"malformed quote {print_value(x)}")
        return Quote(items[0])
    if head is IF and len(items) != 3:
        raise TranslateError(f"if takes exactly three arguments: {print_value(x)}")
    if head is LAMBDA:
        raise TranslateError(f"lambda in function position must be applied: {print_value(x)}")
    expander = _ABBREVIATIONS.get(head.name)
    if expander is not None:
        return expander(items, x)
    return Call(head, tuple(translate(a) for a in items))


def translate_lambda(form: Value) -> Lambda:
    parts = to_pylist(form)
    if len(parts) < 3 or parts[0] is not LAMBDA or not is_proper_list(parts[1]):
        raise TranslateError(f"malformed lambda {print_value(form)}")
    formals = tuple(to_pylist(parts[1]))
    if not all(_is_var_sym(f) for f in formals) or len(set(formals)) != len(formals):
        raise TranslateError(f"bad lambda formals in {print_value(form)}")
    body = translate(parts[-1])
    extra = free_vars(body) - set(formals)
    if extra:
        names = " ".join(sorted(s.name for s in extra))
        raise TranslateError(f"lambda body mentions non-formals: {names}")
    return Lambda(formals, body)


def _need(items, n, form, at_least=False):
    if (len(items) < n) if at_least else (len(items) != n):
        raise TranslateError(f"wrong number of arguments in {print_value(form)}")


def _and(items, form):
    return conjoin([translate(a) for a in items])


def _or(items, form):
    if not items:
        return FALSE_TERM
    out = translate(items[-1])
    for a in reversed(items[:-1]):
        ta = translate(a)
        out = mk_if(ta, ta, out)
    return out


def _implies(items, form):
    _need(items, 2, form)
    a, b = translate(items[0]), translate(items[1])
    return mk_if(a, mk_if(b, TRUE_TERM, FALSE_TERM), TRUE_TERM)


def _plus(items, form):
    args = [translate(a) for a in items]
    if not args:
        return qint(0)
    if len(args) == 1:
        return Call(BINARY_PLUS, (qint(0), args[0]))
    out = args[-1]
    for a in reversed(args[:-1]):
        out = Call(BINARY_PLUS, (a, out))
    return out


def _times(items, form):
    args = [translate(a) for a in items]
    if not args:
        return qint(1)
    if len(args) == 1:
        return Call(BINARY_TIMES, (qint(1), args[0]))
    out = args[-1]
    for a in reversed(args[:-1]):
        out = Call(BINARY_TIMES, (a, out))
    return out


def _minus(items, form):
    _need(items, 1, form, at_least=True)
    if len(items) == 1:
        return Call(UNARY_MINUS, (translate(items[0]),))
    _need(items, 2, form)
    return Call(BINARY_PLUS, (translate(items[0]), Call(UNARY_MINUS, (translate(items[1]),))))


def _list(items, form):
    out: Term = FALSE_TERM
    for a in reversed(items):
        out = Call(CONS, (translate(a), out))
    return out


def _list_star(items, form):
    _need(items, 1, form, at_least=True)
    out = translate(items[-1])
    for a in reversed(items[:-1]):
        out = Call(CONS, (translate(a), out))
    return out


def _let(items, form):
    _need(items, 2, form, at_least=True)
    bindings = items[0]
    if not is_proper_list(bindings):
        raise TranslateError(f"malformed let bindings in {print_value(form)}")
    names, actuals = [], []
    for b in to_pylist(bindings):
        parts = to_pylist(b) if type(b) is Cons else [b]
        if len(parts) not in (1, 2) or not _is_var_sym(parts[0]):
            raise TranslateError(f"malformed let binding {print_value(b)}")
        names.append(parts[0])
        actuals.append(translate(parts[1]) if len(parts) == 2 else FALSE_TERM)
    if len(set(names)) != len(names):
        raise TranslateError(f"duplicate let variable in {print_value(form)}")
    body = translate(items[-1])
    # close the lambda over the body's other free variables
    extra = [v for v in free_vars_ordered(body) if v not in names]
    formals = tuple(names) + tuple(extra)
    return LambdaCall(formals, body, tuple(actuals) + tuple(Var(v) for v in extra))


def _let_star(items, form):
    _need(items, 2, form, at_least=True)
    bindings = to_pylist(items[0])
    if not bindings:
        return translate(items[-1])
    inner = lisp_list(S("LET*"), lisp_list(*bindings[1:]), items[-1])
    return _let([lisp_list(bindings[0]), inner], form)


def _cond(items, form):
    out: Term = FALSE_TERM
    for clause in reversed(items):
        parts = to_pylist(clause)
        if not parts:
            raise TranslateError(f"empty cond clause in {print_value(form)}")
        test = translate(parts[0])
        if len(parts) == 1:
            out = mk_if(test, test, out)
        else:
            out = mk_if(test, translate(parts[-1]), out)
    return out


def _binary(fn: Sym, swap=False, negate=False):
    def expand(items, form):
        _need(items, 2, form)
        a, b = translate(items[0]), translate(items[1])
        if swap:
            a, b = b, a
        out = Call(fn, (a, b))
        return Call(NOT, (out,)) if negate else out

    return expand


def _unary(builder):
    def expand(items, form):
        _need(items, 1, form)
        return builder(translate(items[0]))

    return expand


_ABBREVIATIONS = {
    "AND": _and,
    "OR": _or,
    "IMPLIES": _implies,
    "+": _plus,
    "*": _times,
    "-": _minus,
    "LIST": _list,
    "LIST*": _list_star,
    "LET": _let,
    "LET*": _let_star,
    "COND": _cond,
    ">": _binary(LESSP, swap=True),
    "<=": _binary(LESSP, swap=True, negate=True),
    ">=": _binary(LESSP, negate=True),
    "=": _binary(EQUAL),
    "EQ": _binary(EQUAL),
    "EQL": _binary(EQUAL),
    "/=": _binary(EQUAL, negate=True),
    "1+": _unary(lambda a: Call(BINARY_PLUS, (qint(1), a))),
    "1-": _unary(lambda a: Call(BINARY_PLUS, (qint(-1), a))),
    "ATOM": _unary(lambda a: Call(NOT, (Call(CONSP, (a,)),))),
    "ENDP": _unary(lambda a: Call(NOT, (Call(CONSP, (a,)),))),
    "NULL": _unary(lambda a: Call(NOT, (a,))),
    "CAAR": _unary(lambda a: Call(CAR, (Call(CAR, (a,)),))),
    "CADR": _unary(lambda a: Call(CAR, (Call(CDR, (a,)),))),
    "CDAR": _unary(lambda a: Call(CDR, (Call(CAR, (a,)),))),
    "CDDR": _unary(lambda a: Call(CDR, (Call(CDR, (a,)),))),
    "FIRST": _unary(lambda a: Call(CAR, (a,))),
    "SECOND": _unary(lambda a: Call(CAR, (Call(CDR, (a,)),))),
    "THIRD": _unary(lambda a: Call(CAR, (Call(CDR, (Call(CDR, (a,)),)),))),
}


def parse_term(text: str) -> Term:
    """Read and translate a single term from text."""
    from .sexpr import read_one

    return translate(read_one(text))
