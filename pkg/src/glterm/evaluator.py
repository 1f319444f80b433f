"""Guard-free concrete evaluator, the ground-truth semantics for terms."""

from __future__ import annotations

import sys
from typing import Callable, Mapping

from .sexpr import NIL, T, Cons, Sym, Value, lexorder_lt, lisp_bool
from .terms import IF, Call, Defn, LambdaCall, Quote, Term, Var

DEFAULT_MAX_DEPTH = 2000


class EvalError(RuntimeError):
    pass


class DepthExceeded(EvalError):
    """Raised when evaluation nests too deeply; signals probable nontermination."""


def ensure_recursion_limit(n: int = 10000) -> None:
    # Above roughly this many frames the default 8 MiB C stack overflows;
    # deeper work goes through util.deep_call.
    if sys.getrecursionlimit() < n:
        sys.setrecursionlimit(n)


def ifix(x: Value) -> int:
    return x if type(x) is int else 0


def _car(x):
    return x.car if type(x) is Cons else NIL


def _cdr(x):
    return x.cdr if type(x) is Cons else NIL


def _floor(a, b):
    a, b = ifix(a), ifix(b)
    return 0 if b == 0 else a // b


def _mod(a, b):
    a, b = ifix(a), ifix(b)
    return a if b == 0 else a % b


def _obj_in_range(spec, target):
    from .shapespec import obj_in_range_value

    return lisp_bool(obj_in_range_value(spec, target))


PRIMITIVES: dict[Sym, tuple[int, Callable[..., Value]]] = {
    Sym("CONS"): (2, Cons),
    Sym("CAR"): (1, _car),
    Sym("CDR"): (1, _cdr),
    Sym("CONSP"): (1, lambda x: lisp_bool(type(x) is Cons)),
    Sym("EQUAL"): (2, lambda a, b: lisp_bool(a == b)),
    Sym("NOT"): (1, lambda x: lisp_bool(x is NIL)),
    Sym("INTEGERP"): (1, lambda x: lisp_bool(type(x) is int)),
    Sym("ACL2-NUMBERP"): (1, lambda x: lisp_bool(type(x) is int)),
    Sym("SYMBOLP"): (1, lambda x: lisp_bool(type(x) is Sym)),
    Sym("BOOLEANP"): (1, lambda x: lisp_bool(x is T or x is NIL)),
    Sym("STRINGP"): (1, lambda x: lisp_bool(type(x) is str)),
    Sym("BINARY-+"): (2, lambda a, b: ifix(a) + ifix(b)),
    Sym("BINARY-*"): (2, lambda a, b: ifix(a) * ifix(b)),
    Sym("UNARY--"): (1, lambda a: -ifix(a)),
    Sym("<"): (2, lambda a, b: lisp_bool(ifix(a) < ifix(b))),
    Sym("FLOOR"): (2, _floor),
    Sym("MOD"): (2, _mod),
    Sym("<<"): (2, lambda a, b: lisp_bool(lexorder_lt(a, b))),
    Sym("SHAPE-SPEC-OBJ-IN-RANGE"): (2, _obj_in_range),
}

# ``if`` is a primitive too, but it is special-cased (lazy in its branches).
PRIMITIVE_ARITY = {name: arity for name, (arity, _) in PRIMITIVES.items()}
PRIMITIVE_ARITY[IF] = 3


def is_primitive(fn: Sym) -> bool:
    return fn in PRIMITIVE_ARITY


def apply_primitive(fn: Sym, args: list[Value]) -> Value:
    arity, impl = PRIMITIVES[fn]
    if len(args) != arity:
        raise EvalError(f"{fn.name} expects {arity} arguments, got {len(args)}")
    return impl(*args)


class Evaluator:
    """Call-by-value evaluation with ``if`` lazy in its branches."""

    def __init__(self, defs: Mapping[Sym, Defn], max_depth: int = DEFAULT_MAX_DEPTH):
        self.defs = defs
        self.max_depth = max_depth
        self.depth = 0
        ensure_recursion_limit()

    def eval(self, t: Term, env: Mapping[Sym, Value]) -> Value:
        match t:
            case Quote(v):
                return v
            case Var(name):
                try:
                    return env[name]
                except KeyError:
                    raise EvalError(f"unbound variable {name.name}") from None
            case Call(fn, args):
                if fn is IF:
                    if self.eval(args[0], env) is not NIL:
                        return self.eval(args[1], env)
                    return self.eval(args[2], env)
                vals = [self.eval(a, env) for a in args]
                return self.apply(fn, vals)
            case LambdaCall(formals, body, args):
                vals = [self.eval(a, env) for a in args]
                return self._enter(body, dict(zip(formals, vals)))
        raise TypeError(f"not a term: {t!r}")

    def apply(self, fn: Sym, vals: list[Value]) -> Value:
        prim = PRIMITIVES.get(fn)
        if prim is not None:
            return apply_primitive(fn, vals)
        defn = self.defs.get(fn)
        if defn is None:
            raise EvalError(f"undefined function {fn.name}")
        if len(vals) != len(defn.formals):
            raise EvalError(f"{fn.name} expects {len(defn.formals)} arguments, got {len(vals)}")
        return self._enter(defn.body, dict(zip(defn.formals, vals)))

    def _enter(self, body: Term, env: dict) -> Value:
        self.depth += 1
        try:
            if self.depth > self.max_depth:
                raise DepthExceeded(f"evaluation depth exceeded {self.max_depth}")
            return self.eval(body, env)
        finally:
            self.depth -= 1


def eval_term(
    t: Term,
    bindings: Mapping[Sym, Value],
    defs: Mapping[Sym, Defn],
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Value:
    try:
        return Evaluator(defs, max_depth).eval(t, bindings)
    except RecursionError:
        raise DepthExceeded("evaluation exhausted the Python stack") from None


def eval_call(fn: Sym, args: list[Value], defs: Mapping[Sym, Defn], max_depth: int = DEFAULT_MAX_DEPTH) -> Value:
    try:
        return Evaluator(defs, max_depth).apply(fn, list(args))
    except RecursionError:
        raise DepthExceeded("evaluation exhausted the Python stack") from None
