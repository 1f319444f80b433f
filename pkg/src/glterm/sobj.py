"""Symbolic objects, their evaluation, concreteness, unification and reflection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .bfr import FALSE, TRUE, AigMan, Bfr
from .evaluator import eval_call
from .sexpr import NIL, T, Cons, Sym, Value, kw, lisp_list
from .terms import CONS, IF, Call, LambdaCall, Quote, Term, Var


class SObj:
    """Base of all symbolic objects; equality is structural, hashes cached."""

    __slots__ = ()

    def _key(self) -> tuple:
        return tuple(getattr(self, f) for f in self.__match_args__)

    def __hash__(self) -> int:
        return self._h

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return type(other) is type(self) and self._h == other._h and self._key() == other._key()

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"<{print_obj(self)}>"


def _cache_hash(obj, *parts) -> None:
    object.__setattr__(obj, "_h", hash((type(obj).__name__,) + parts))


@dataclass(frozen=True, eq=False, repr=False)
class GConcrete(SObj):
    value: Value

    def __post_init__(self):
        _cache_hash(self, self.value)


@dataclass(frozen=True, eq=False, repr=False)
class GBool(SObj):
    bfr: Bfr

    def __post_init__(self):
        _cache_hash(self, self.bfr)


@dataclass(frozen=True, eq=False, repr=False)
class GInt(SObj):
    bits: tuple[Bfr, ...]  # least significant first; last bit is the sign

    def __post_init__(self):
        if not self.bits:
            raise ValueError("symbolic integers need at least one bit")
        _cache_hash(self, self.bits)


@dataclass(frozen=True, eq=False, repr=False)
class GCons(SObj):
    car: SObj
    cdr: SObj

    def __post_init__(self):
        _cache_hash(self, self.car, self.cdr)


@dataclass(frozen=True, eq=False, repr=False)
class GIte(SObj):
    test: SObj
    then: SObj
    els: SObj

    def __post_init__(self):
        _cache_hash(self, self.test, self.then, self.els)


@dataclass(frozen=True, eq=False, repr=False)
class GApply(SObj):
    fn: Sym
    args: tuple[SObj, ...]

    def __post_init__(self):
        _cache_hash(self, self.fn, self.args)


@dataclass(frozen=True, eq=False, repr=False)
class GVar(SObj):
    name: Sym

    def __post_init__(self):
        _cache_hash(self, self.name)


C_NIL = GConcrete(NIL)
C_T = GConcrete(T)
G_TRUE = GBool(TRUE)
G_FALSE = GBool(FALSE)


def concrete(v: Value) -> GConcrete:
    return GConcrete(v)


# ---------------------------------------------------------------------------
# Integer bit vectors


def int_to_bits(n: int) -> list[Bfr]:
    """Minimal two's-complement constant bits, least significant first."""
    bits = []
    while True:
        b = n & 1
        bits.append(TRUE if b else FALSE)
        n >>= 1
        if (n == 0 and not b) or (n == -1 and b):
            return bits


def bits_to_int(vals: list[bool]) -> int:
    n = 0
    for i, b in enumerate(vals):
        if b:
            n |= 1 << i
    if vals and vals[-1]:
        n -= 1 << len(vals)
    return n


def extend_bits(bits, width: int) -> list[Bfr]:
    bits = list(bits)
    if len(bits) < width:
        bits.extend([bits[-1]] * (width - len(bits)))
    return bits


def trim_bits(bits) -> tuple[Bfr, ...]:
    bits = list(bits)
    while len(bits) > 1 and bits[-1] == bits[-2]:
        bits.pop()
    return tuple(bits)


def const_bits_value(bits) -> int | None:
    if all(b < 2 for b in bits):
        return bits_to_int([b == TRUE for b in bits])
    return None


def make_int(bits) -> SObj:
    """Int object, collapsed to a concrete integer when all bits are constant."""
    bits = trim_bits(bits)
    v = const_bits_value(bits)
    if v is not None:
        return GConcrete(v)
    return GInt(bits)


def make_bool(b: Bfr) -> SObj:
    if b == TRUE:
        return C_T
    if b == FALSE:
        return C_NIL
    return GBool(b)


# ---------------------------------------------------------------------------
# Evaluation


class NodeEval:
    """Memoized evaluation of AIG literals under one Boolean environment."""

    def __init__(self, man: AigMan, bools: Mapping[int, bool] | Callable[[int], bool]):
        self.man = man
        self.look = bools if callable(bools) else (lambda v: bool(bools.get(v, False)))
        self.memo: dict[int, bool] = {0: False}

    def __call__(self, a: Bfr) -> bool:
        n = a >> 1
        memo = self.memo
        if n not in memo:
            man = self.man
            stack = [n]
            while stack:
                x = stack[-1]
                if x in memo:
                    stack.pop()
                    continue
                l = man.left[x]
                if l < 0:
                    memo[x] = self.look(man.right[x])
                    stack.pop()
                    continue
                r = man.right[x]
                ln, rn = l >> 1, r >> 1
                if ln in memo and rn in memo:
                    memo[x] = (memo[ln] ^ bool(l & 1)) and (memo[rn] ^ bool(r & 1))
                    stack.pop()
                else:
                    if ln not in memo:
                        stack.append(ln)
                    if rn not in memo:
                        stack.append(rn)
        return memo[n] ^ bool(a & 1)


@dataclass
class SymEnv:
    bools: Mapping[int, bool]
    vars: Mapping[Sym, Value]


def sym_eval(man: AigMan, obj: SObj, env: SymEnv, defs, bool_eval: NodeEval | None = None) -> Value:
    """Concrete value of ``obj`` under ``env`` (missing bools false, vars nil)."""
    be = bool_eval or NodeEval(man, env.bools)
    memo: dict[int, Value] = {}

    def ev(o: SObj) -> Value:
        k = id(o)
        if k in memo:
            return memo[k]
        match o:
            case GConcrete(v):
                out = v
            case GBool(b):
                out = T if be(b) else NIL
            case GInt(bits):
                out = bits_to_int([be(b) for b in bits])
            case GCons(a, d):
                out = Cons(ev(a), ev(d))
            case GIte(t, a, b):
                out = ev(a) if ev(t) is not NIL else ev(b)
            case GApply(fn, args):
                out = eval_call(fn, [ev(x) for x in args], defs)
            case GVar(name):
                out = env.vars.get(name, NIL)
            case _:
                raise TypeError(f"not a symbolic object: {o!r}")
        memo[k] = out
        return out

    return ev(obj)


# ---------------------------------------------------------------------------
# Syntactic concreteness


def general_concretep(o: SObj) -> bool:
    match o:
        case GConcrete():
            return True
        case GBool(b):
            return b < 2
        case GInt(bits):
            return all(b < 2 for b in bits)
        case GCons(a, d):
            return general_concretep(a) and general_concretep(d)
    return False


def general_concrete_obj(o: SObj) -> Value:
    match o:
        case GConcrete(v):
            return v
        case GBool(b) if b < 2:
            return T if b == TRUE else NIL
        case GInt(bits) if all(b < 2 for b in bits):
            return const_bits_value(bits)
        case GCons(a, d):
            return Cons(general_concrete_obj(a), general_concrete_obj(d))
    raise ValueError(f"object is not syntactically concrete: {print_obj(o)}")


def max_bool_var(man: AigMan, o: SObj) -> int:
    """Largest AIG input variable mentioned anywhere in ``o``; -1 if none."""
    best = -1
    stack = [o]
    while stack:
        x = stack.pop()
        match x:
            case GBool(b):
                best = max(best, man.max_var_of(b))
            case GInt(bits):
                for b in bits:
                    best = max(best, man.max_var_of(b))
            case GCons(a, d):
                stack += [a, d]
            case GIte(t, a, b):
                stack += [t, a, b]
            case GApply(_, args):
                stack.extend(args)
    return best


# ---------------------------------------------------------------------------
# Unification of term patterns with objects

Subst = dict


def _same_object(a: SObj, b: SObj) -> bool:
    if a == b:
        return True
    return general_concretep(a) and general_concretep(b) and (
        general_concrete_obj(a) == general_concrete_obj(b)
    )


def unify(pattern: Term, obj: SObj, subst: Subst | None = None) -> Subst | None:
    """Match ``pattern`` against ``obj``, extending ``subst``; None on failure.

    Sound but incomplete: only the syntactic cases below are recognized.
    """
    out = dict(subst) if subst else {}
    return out if _unify(pattern, obj, out) else None


def _unify(p: Term, o: SObj, s: dict) -> bool:
    match p:
        case Var(name):
            prev = s.get(name)
            if prev is None:
                s[name] = o
                return True
            return _same_object(prev, o)
        case Quote(v):
            return general_concretep(o) and general_concrete_obj(o) == v
        case Call(fn, pargs):
            match o:
                case GApply(ofn, oargs) if ofn is fn and len(oargs) == len(pargs):
                    return all(_unify(a, b, s) for a, b in zip(pargs, oargs))
                case GCons(a, d) if fn is CONS and len(pargs) == 2:
                    return _unify(pargs[0], a, s) and _unify(pargs[1], d, s)
                case GIte(t, a, b) if fn is IF:
                    return _unify(pargs[0], t, s) and _unify(pargs[1], a, s) and _unify(pargs[2], b, s)
            if fn is CONS and len(pargs) == 2 and general_concretep(o):
                v = general_concrete_obj(o)
                if type(v) is Cons:
                    return _unify(pargs[0], GConcrete(v.car), s) and _unify(
                        pargs[1], GConcrete(v.cdr), s
                    )
            return False
        case LambdaCall():
            raise ValueError("patterns may not contain lambda applications")
    return False


@dataclass(frozen=True)
class Instance:
    """A term waiting to be interpreted under a substitution (lazy instantiation)."""

    term: Term
    subst: Mapping[Sym, SObj]


def instantiate(t: Term, subst: Mapping[Sym, SObj]) -> Instance:
    from .terms import free_vars

    missing = free_vars(t) - set(subst)
    if missing:
        raise KeyError("unbound rule variable " + " ".join(sorted(v.name for v in missing)))
    return Instance(t, dict(subst))


# ---------------------------------------------------------------------------
# Reflection: objects as tagged values, seen by syntaxp hypotheses and printers

TAG_CONCRETE = kw("g-concrete")
TAG_BOOLEAN = kw("g-boolean")
TAG_INTEGER = kw("g-integer")
TAG_ITE = kw("g-ite")
TAG_APPLY = kw("g-apply")
TAG_VAR = kw("g-var")
RESERVED_TAGS = frozenset({TAG_CONCRETE, TAG_BOOLEAN, TAG_INTEGER, TAG_ITE, TAG_APPLY, TAG_VAR})


def escape_value(v: Value) -> Value:
    """Tagged form of a concrete value; conses headed by a tag are wrapped."""
    if type(v) is not Cons:
        return v
    if type(v.car) is Sym and v.car in RESERVED_TAGS:
        return Cons(TAG_CONCRETE, v)
    return Cons(escape_value(v.car), escape_value(v.cdr))


def reflect(o: SObj) -> Value:
    if general_concretep(o):
        return escape_value(general_concrete_obj(o))
    match o:
        case GBool(b):
            return Cons(TAG_BOOLEAN, b)
        case GInt(bits):
            return Cons(TAG_INTEGER, lisp_list(*bits))
        case GCons(a, d):
            ra = reflect(a)
            if type(ra) is Sym and ra in RESERVED_TAGS:
                ra = Cons(TAG_CONCRETE, ra)
            return Cons(ra, reflect(d))
        case GIte(t, a, b):
            return Cons(TAG_ITE, Cons(reflect(t), Cons(reflect(a), reflect(b))))
        case GApply(fn, args):
            return Cons(TAG_APPLY, Cons(fn, lisp_list(*(reflect(x) for x in args))))
        case GVar(name):
            return Cons(TAG_VAR, name)
    raise TypeError(o)


def print_obj(o: SObj) -> str:
    from .sexpr import print_value

    return print_value(reflect(o))


def obj_size(o: SObj) -> int:
    n = 0
    stack = [o]
    while stack:
        x = stack.pop()
        n += 1
        match x:
            case GCons(a, d):
                stack += [a, d]
            case GIte(t, a, b):
                stack += [t, a, b]
            case GApply(_, args):
                stack.extend(args)
    return n
