"""Shape specifiers: how theorem variables are bound to symbolic objects,
and the coverage obligations those bindings incur."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .bfr import AigMan
from .evaluator import EvalError, eval_call, eval_term
from .sexpr import (
    NIL,
    QUASIQUOTE,
    QUOTE,
    T,
    UNQUOTE,
    UNQUOTE_SPLICING,
    Cons,
    Sym,
    Value,
    is_proper_list,
    kw,
    lisp_list,
    print_value,
    to_pylist,
)
from .sobj import GApply, GBool, GConcrete, GCons, GInt, GVar, SObj
from .terms import (
    Call,
    Lambda,
    LambdaCall,
    Quote,
    Term,
    TranslateError,
    Var,
    conjoin,
    free_vars_ordered,
    term_str,
    translate,
    translate_lambda,
)

K_CONCRETE = kw("g-concrete")
K_BOOLEAN = kw("g-boolean")
K_INT = kw("g-int")
K_VAR = kw("g-var")
K_CALL = kw("g-call")
SPEC_TAGS = frozenset({K_CONCRETE, K_BOOLEAN, K_INT, K_VAR, K_CALL})

OBJ_IN_RANGE = Sym("SHAPE-SPEC-OBJ-IN-RANGE")
NTH = Sym("NTH")
EQUAL = Sym("EQUAL")


class ShapeSpecError(ValueError):
    pass


class ShapeSpec:
    __slots__ = ()


@dataclass(frozen=True)
class SConcrete(ShapeSpec):
    value: Value


@dataclass(frozen=True)
class SBool(ShapeSpec):
    index: int


@dataclass(frozen=True)
class SInt(ShapeSpec):
    start: int
    by: int
    n: int

    def __post_init__(self):
        if self.n < 1 or self.by < 1 or self.start < 0:
            raise ShapeSpecError(f"bad g-int: start {self.start}, by {self.by}, n {self.n}")

    @property
    def indices(self) -> list[int]:
        return [self.start + k * self.by for k in range(self.n)]


@dataclass(frozen=True)
class SCons(ShapeSpec):
    car: ShapeSpec
    cdr: ShapeSpec


@dataclass(frozen=True)
class SVar(ShapeSpec):
    name: Sym


@dataclass(frozen=True)
class SCall(ShapeSpec):
    fn: Sym
    args: tuple[ShapeSpec, ...]
    inverse: Sym | Lambda
    inverse_form: Value = field(default=NIL, compare=False)


# ---------------------------------------------------------------------------
# Value encoding (the form shape specs take inside :g-bindings and quoted terms)


def decode_spec(v: Value) -> ShapeSpec:
    if type(v) is not Cons:
        return SConcrete(v)
    head = v.car
    if head is K_CONCRETE:
        return SConcrete(v.cdr)
    if head is K_BOOLEAN:
        if type(v.cdr) is not int or v.cdr < 0:
            raise ShapeSpecError(f"bad g-boolean {print_value(v)}")
        return SBool(v.cdr)
    if head is K_INT:
        parts = to_pylist(v.cdr) if is_proper_list(v.cdr) else []
        if len(parts) != 3 or not all(type(p) is int for p in parts):
            raise ShapeSpecError(f"bad g-int {print_value(v)}")
        return SInt(*parts)
    if head is K_VAR:
        if type(v.cdr) is not Sym:
            raise ShapeSpecError(f"bad g-var {print_value(v)}")
        return SVar(v.cdr)
    if head is K_CALL:
        parts = to_pylist(v.cdr) if is_proper_list(v.cdr) else []
        if len(parts) != 3 or type(parts[0]) is not Sym or not is_proper_list(parts[1]):
            raise ShapeSpecError(f"bad g-call {print_value(v)}")
        fn, args, inv = parts
        return SCall(fn, tuple(decode_spec(a) for a in to_pylist(args)), _decode_inverse(inv), inv)
    return SCons(decode_spec(v.car), decode_spec(v.cdr))


def _decode_inverse(inv: Value) -> Sym | Lambda:
    if type(inv) is Sym and inv is not NIL and inv is not T:
        return inv
    if type(inv) is Cons and inv.car is Sym("LAMBDA"):
        try:
            lam = translate_lambda(inv)
        except TranslateError as exc:
            raise ShapeSpecError(f"bad inverse function: {exc}") from None
        if len(lam.formals) != 1:
            raise ShapeSpecError("inverse lambdas take exactly one argument")
        return lam
    raise ShapeSpecError(f"inverse must be a function symbol or lambda: {print_value(inv)}")


def encode_spec(s: ShapeSpec) -> Value:
    match s:
        case SConcrete(v):
            if type(v) is Cons:
                return Cons(K_CONCRETE, v)
            return v
        case SBool(i):
            return Cons(K_BOOLEAN, i)
        case SInt(a, b, n):
            return lisp_list(K_INT, a, b, n)
        case SVar(name):
            return Cons(K_VAR, name)
        case SCons(a, d):
            return Cons(encode_spec(a), encode_spec(d))
        case SCall(fn, args, inv, form):
            if form is NIL:
                form = inv if isinstance(inv, Sym) else lisp_list(
                    Sym("LAMBDA"), lisp_list(*inv.formals), _term_value(inv.body)
                )
            return lisp_list(K_CALL, fn, lisp_list(*(encode_spec(a) for a in args)), form)
    raise TypeError(s)


def _term_value(t: Term) -> Value:
    from .terms import term_to_value

    return term_to_value(t)


# ---------------------------------------------------------------------------
# :g-bindings


def eval_binding_form(form: Value, defs) -> Value:
    """Evaluate a :g-bindings form: quoted, backquoted, or an ordinary term."""
    if form is NIL:
        return NIL
    if type(form) is Cons and form.car is QUASIQUOTE:
        return _quasi(to_pylist(form)[1], defs)
    if type(form) is Cons and form.car is QUOTE:
        return to_pylist(form)[1]
    if type(form) is Cons and type(form.car) is Cons:
        # a bare list of (var spec) pairs
        return form
    return eval_term(translate(form), {}, defs)


def _quasi(x: Value, defs) -> Value:
    if type(x) is not Cons:
        return x
    if x.car is UNQUOTE:
        return eval_term(translate(to_pylist(x)[1]), {}, defs)
    if x.car is QUASIQUOTE:
        return x
    items = []
    tail: Value = NIL
    while type(x) is Cons:
        if x.car is UNQUOTE:  # dotted unquote: `(a . ,b)
            tail = eval_term(translate(to_pylist(x)[1]), {}, defs)
            break
        item = x.car
        if type(item) is Cons and item.car is UNQUOTE_SPLICING:
            items.extend(to_pylist(eval_term(translate(to_pylist(item)[1]), {}, defs)))
        else:
            items.append(_quasi(item, defs))
        x = x.cdr
    else:
        tail = x
    return lisp_list(*items, tail=tail)


def parse_g_bindings(form: Value, defs) -> dict[Sym, ShapeSpec]:
    try:
        v = eval_binding_form(form, defs)
    except (EvalError, TranslateError) as exc:
        raise ShapeSpecError(f"cannot evaluate g-bindings: {exc}") from None
    if not is_proper_list(v):
        raise ShapeSpecError(f"g-bindings must be a list: {print_value(v)}")
    out: dict[Sym, ShapeSpec] = {}
    for b in to_pylist(v):
        parts = to_pylist(b) if is_proper_list(b) else []
        if len(parts) != 2 or type(parts[0]) is not Sym:
            raise ShapeSpecError(f"g-binding must be (var spec): {print_value(b)}")
        if parts[0] in out:
            raise ShapeSpecError(f"variable {parts[0].name} bound twice")
        out[parts[0]] = decode_spec(parts[1])
    check_indices(out.values())
    check_var_names(out.values())
    return out


def spec_indices(s: ShapeSpec) -> list[int]:
    match s:
        case SBool(i):
            return [i]
        case SInt():
            return s.indices
        case SCons(a, d):
            return spec_indices(a) + spec_indices(d)
        case SCall(_, args, _):
            return [i for a in args for i in spec_indices(a)]
    return []


def spec_var_names(s: ShapeSpec) -> list[Sym]:
    match s:
        case SVar(name):
            return [name]
        case SCons(a, d):
            return spec_var_names(a) + spec_var_names(d)
        case SCall(_, args, _):
            return [n for a in args for n in spec_var_names(a)]
    return []


def check_var_names(specs, reserved=()) -> None:
    """Each g-var name may appear once; a shared name would tie two values
    together while their coverage obligations are checked independently."""
    seen = set(reserved)
    for s in specs:
        for n in spec_var_names(s):
            if n in seen:
                raise ShapeSpecError(f"g-var name {n.name} used more than once in g-bindings")
            seen.add(n)


def check_indices(specs) -> int:
    """Verify Boolean indices are distinct; returns the first free index."""
    seen: set[int] = set()
    for s in specs:
        for i in spec_indices(s):
            if i in seen:
                raise ShapeSpecError(f"Boolean index {i} used more than once in g-bindings")
            seen.add(i)
    return max(seen) + 1 if seen else 0


def spec_to_sobj(s: ShapeSpec, man: AigMan) -> SObj:
    match s:
        case SConcrete(v):
            return GConcrete(v)
        case SBool(i):
            return GBool(man.var(i))
        case SInt():
            return GInt(tuple(man.var(i) for i in s.indices))
        case SCons(a, d):
            return GCons(spec_to_sobj(a, man), spec_to_sobj(d, man))
        case SVar(name):
            return GVar(name)
        case SCall(fn, args, _):
            return GApply(fn, tuple(spec_to_sobj(a, man) for a in args))
    raise TypeError(s)


# ---------------------------------------------------------------------------
# Coverage


def obj_in_range(s: ShapeSpec, target: Value) -> bool:
    match s:
        case SConcrete(v):
            return target == v
        case SBool():
            return target is T or target is NIL
        case SInt(_, _, n):
            return type(target) is int and -(1 << (n - 1)) <= target < (1 << (n - 1))
        case SCons(a, d):
            return type(target) is Cons and obj_in_range(a, target.car) and obj_in_range(d, target.cdr)
        case SVar():
            return True
        case SCall():
            raise ShapeSpecError("g-call specs are covered through oblig_term, not obj_in_range")
    raise TypeError(s)


def obj_in_range_value(spec: Value, target: Value) -> bool:
    """Total version over encoded specs: malformed specs and g-calls cover nothing."""
    try:
        return obj_in_range(decode_spec(spec), target)
    except ShapeSpecError:
        return False


def _inverse_call(inv: Sym | Lambda, target: Term) -> Term:
    if isinstance(inv, Lambda):
        return LambdaCall(inv.formals, inv.body, (target,))
    return Call(inv, (target,))


def oblig_term(s: ShapeSpec, target: Term, depth: int = 0) -> Term:
    """Term that is true when ``s`` covers the value of ``target``."""
    if not isinstance(s, SCall):
        return Call(OBJ_IN_RANGE, (Quote(encode_spec(s)), target))
    inv_args = Sym("INV-ARGS" if depth == 0 else f"INV-ARGS{depth}")
    ia = Var(inv_args)
    nths = [Call(NTH, (Quote(i), ia)) for i in range(len(s.args))]
    # the let is closed over the target's own variables
    outer = [v for v in free_vars_ordered(target) if v is not inv_args]
    rebuilt = Call(EQUAL, (Call(s.fn, tuple(nths)), target))
    parts = [rebuilt] + [oblig_term(a, nth, depth + 1) for a, nth in zip(s.args, nths)]
    body = conjoin(parts)
    return LambdaCall(
        (inv_args, *outer),
        body,
        (_inverse_call(s.inverse, target), *(Var(v) for v in outer)),
    )


def contains_call(s: ShapeSpec) -> bool:
    match s:
        case SCall():
            return True
        case SCons(a, d):
            return contains_call(a) or contains_call(d)
    return False


@dataclass
class CoverageReport:
    variable: Sym
    obligation: Term
    passed: int = 0
    failed: list[dict] = field(default_factory=list)
    errors: list[tuple[dict, str]] = field(default_factory=list)
    skipped: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed and not self.errors

    def summary(self) -> str:
        status = "ok" if self.ok else "FAIL"
        return (
            f"{self.variable.name}: {status} passed={self.passed} failed={len(self.failed)} "
            f"errors={len(self.errors)} skipped={self.skipped}"
        )


def check_oblig_on(
    s: ShapeSpec,
    var: Sym,
    hyp: Term,
    samples: list[Mapping[Sym, Value]],
    defs,
) -> CoverageReport:
    """Evaluate the coverage obligation for ``var`` on each sample satisfying ``hyp``."""
    term = oblig_term(s, Var(var))
    rep = CoverageReport(var, term)
    if not samples:
        rep.warnings.append("no samples: coverage check is vacuous")
        return rep
    for smp in samples:
        env = dict(smp)
        try:
            if eval_term(hyp, env, defs) is NIL:
                rep.skipped += 1
                continue
            ok = eval_term(term, env, defs) is not NIL
        except EvalError as exc:
            rep.errors.append((env, str(exc)))
            continue
        if ok:
            rep.passed += 1
        else:
            rep.failed.append(env)
    return rep


def witness_env(
    s: ShapeSpec, target: Value, defs=None, bools: dict | None = None, vars_: dict | None = None
) -> tuple[dict[int, bool], dict[Sym, Value]] | None:
    """An environment making the spec's object evaluate to ``target``, if one is found."""
    bools = {} if bools is None else bools
    vars_ = {} if vars_ is None else vars_
    ok = _witness(s, target, defs, bools, vars_)
    return (bools, vars_) if ok else None


def _witness(s, target, defs, bools, vars_) -> bool:
    match s:
        case SConcrete(v):
            return target == v
        case SBool(i):
            if target is not T and target is not NIL:
                return False
            bools[i] = target is T
            return True
        case SInt():
            if not obj_in_range(s, target):
                return False
            for k, i in enumerate(s.indices):
                bools[i] = bool((target >> k) & 1)
            return True
        case SCons(a, d):
            return (
                type(target) is Cons
                and _witness(a, target.car, defs, bools, vars_)
                and _witness(d, target.cdr, defs, bools, vars_)
            )
        case SVar(name):
            if name in vars_ and vars_[name] != target:
                return False
            vars_[name] = target
            return True
        case SCall(fn, args, inv):
            try:
                inv_args = eval_term(_inverse_call(inv, Quote(target)), {}, defs)
                vals = []
                cur = inv_args
                for _ in args:
                    vals.append(cur.car if type(cur) is Cons else NIL)
                    cur = cur.cdr if type(cur) is Cons else NIL
                if eval_call(fn, vals, defs) != target:
                    return False
            except EvalError:
                return False
            return all(_witness(a, v, defs, bools, vars_) for a, v in zip(args, vals))
    return False


def describe_spec(s: ShapeSpec) -> str:
    return print_value(encode_spec(s))


def describe_oblig(t: Term) -> str:
    return term_str(t)
