"""Built-in symbolic counterparts.

Each counterpart takes the interpreter (for the AIG and if-test coercion)
and the argument objects, and returns an object or None to decline.
Declining lets the function-call reduction fall through to its next step.
"""

from __future__ import annotations

from typing import Callable

from .bfr import FALSE, TRUE, Bfr
from .evaluator import ifix
from .sexpr import NIL, T, Cons, Sym, Value
from .sobj import (
    GApply,
    GBool,
    GConcrete,
    GCons,
    GInt,
    GIte,
    GVar,
    SObj,
    extend_bits,
    general_concrete_obj,
    general_concretep,
    int_to_bits,
    make_int,
)

S = Sym


def _nfix(v: Value) -> int:
    return v if type(v) is int and v > 0 else 0


def _concrete_arg(o: SObj):
    """(True, value) when ``o`` is syntactically concrete."""
    if general_concretep(o):
        return True, general_concrete_obj(o)
    return False, None


def int_bits(ip, o: SObj) -> list[Bfr] | None:
    """Bits of the integer fix of ``o``, or None when not bit-blastable."""
    match o:
        case GInt(bits):
            return list(bits)
        case GConcrete(v):
            return int_to_bits(v if type(v) is int else 0)
        case GBool() | GCons():
            return [FALSE]
        case GIte(t, a, b):
            ba = int_bits(ip, a)
            if ba is None:
                return None
            bb = int_bits(ip, b)
            if bb is None:
                return None
            c = ip.simplify_if_test(t)
            if c == TRUE:
                return ba
            if c == FALSE:
                return bb
            w = max(len(ba), len(bb))
            m = ip.man
            return [m.ite(c, x, y) for x, y in zip(extend_bits(ba, w), extend_bits(bb, w))]
    return None


# ---------------------------------------------------------------------------
# bit-vector arithmetic


def add_bits(m, a, b, carry=FALSE):
    w = max(len(a), len(b)) + 1
    a, b = extend_bits(a, w), extend_bits(b, w)
    out = []
    for x, y in zip(a, b):
        s = m.xor(m.xor(x, y), carry)
        carry = m.or_(m.and_(x, y), m.and_(carry, m.xor(x, y)))
        out.append(s)
    return out


def neg_bits(m, a):
    inv = [x ^ 1 for x in a]
    return add_bits(m, inv, [FALSE], TRUE)


def lt_bits(m, a, b) -> Bfr:
    """a < b: the sign of a - b computed one bit wider than both."""
    w = max(len(a), len(b)) + 1
    a, b = extend_bits(a, w), extend_bits(b, w)
    diff = add_bits(m, a, [x ^ 1 for x in b], TRUE)
    return diff[w - 1]


def eq_bits(m, a, b) -> Bfr:
    w = max(len(a), len(b))
    a, b = extend_bits(a, w), extend_bits(b, w)
    return m.and_all(m.iff(x, y) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# equal


def _kind_bfr(ip, o: SObj, pred: Callable[[Value], bool], kinds: dict) -> Bfr | None:
    """Bfr for a type predicate over ``o``; ``kinds`` gives the answer per object kind."""
    match o:
        case GConcrete(v):
            return TRUE if pred(v) else FALSE
        case GBool():
            return kinds["bool"]
        case GInt():
            return kinds["int"]
        case GCons():
            return kinds["cons"]
        case GIte(t, a, b):
            x = _kind_bfr(ip, a, pred, kinds)
            if x is None:
                return None
            y = _kind_bfr(ip, b, pred, kinds)
            if y is None:
                return None
            return ip.man.ite(ip.simplify_if_test(t), x, y)
    return None


def equal_bfr(ip, a: SObj, b: SObj) -> Bfr | None:
    if a == b:
        return TRUE
    m = ip.man
    ca, va = _concrete_arg(a)
    cb, vb = _concrete_arg(b)
    if ca and cb:
        return TRUE if va == vb else FALSE
    if isinstance(a, (GApply, GVar)) or isinstance(b, (GApply, GVar)):
        return None
    if isinstance(a, GIte) or isinstance(b, GIte):
        ite, other = (a, b) if isinstance(a, GIte) else (b, a)
        x = equal_bfr(ip, ite.then, other)
        if x is None:
            return None
        y = equal_bfr(ip, ite.els, other)
        if y is None:
            return None
        return m.ite(ip.simplify_if_test(ite.test), x, y)
    if cb and not ca:
        a, b, va, vb, ca, cb = b, a, vb, va, cb, ca
    # now b is non-concrete (Bool, Int or Cons); a may be concrete
    match b:
        case GBool(bb):
            match a:
                case GBool(ba):
                    return m.iff(ba, bb)
                case GConcrete(v):
                    if v is T:
                        return bb
                    if v is NIL:
                        return bb ^ 1
                    return FALSE
            if ca:
                return FALSE
            return FALSE  # Int or Cons never equals a Boolean
        case GInt(bits):
            if ca:
                return eq_bits(m, int_to_bits(va), list(bits)) if type(va) is int else FALSE
            match a:
                case GInt(abits):
                    return eq_bits(m, list(abits), list(bits))
            return FALSE
        case GCons(bcar, bcdr):
            if ca:
                if type(va) is not Cons:
                    return FALSE
                acar, acdr = GConcrete(va.car), GConcrete(va.cdr)
            else:
                match a:
                    case GCons(acar, acdr):
                        pass
                    case _:
                        return FALSE
            x = equal_bfr(ip, acar, bcar)
            if x is None:
                return None
            if x == FALSE:
                return FALSE
            y = equal_bfr(ip, acdr, bcdr)
            if y is None:
                return None
            return m.and_(x, y)
    return None


def cp_equal(ip, args):
    b = equal_bfr(ip, args[0], args[1])
    return None if b is None else GBool(b)


def cp_not(ip, args):
    return GBool(ip.simplify_if_test(args[0]) ^ 1)


def _pred(pred, bool_, int_, cons_):
    kinds = {"bool": bool_, "int": int_, "cons": cons_}

    def cp(ip, args):
        b = _kind_bfr(ip, args[0], pred, kinds)
        return None if b is None else GBool(b)

    return cp


cp_consp = _pred(lambda v: type(v) is Cons, FALSE, FALSE, TRUE)
cp_integerp = _pred(lambda v: type(v) is int, FALSE, TRUE, FALSE)
cp_booleanp = _pred(lambda v: v is T or v is NIL, TRUE, FALSE, FALSE)
cp_symbolp = _pred(lambda v: type(v) is Sym, TRUE, FALSE, FALSE)
cp_stringp = _pred(lambda v: type(v) is str, FALSE, FALSE, FALSE)


def _accessor(take_car: bool):
    def access(ip, o):
        match o:
            case GCons(a, d):
                return a if take_car else d
            case GConcrete(v):
                if type(v) is Cons:
                    return GConcrete(v.car if take_car else v.cdr)
                return GConcrete(NIL)
            case GBool() | GInt():
                return GConcrete(NIL)
            case GIte(t, a, b):
                x = access(ip, a)
                if x is None:
                    return None
                y = access(ip, b)
                if y is None:
                    return None
                return x if x == y else GIte(t, x, y)
        return None

    return lambda ip, args: access(ip, args[0])


cp_car = _accessor(True)
cp_cdr = _accessor(False)


def cp_cons(ip, args):
    return GCons(args[0], args[1])


def cp_plus(ip, args):
    a = int_bits(ip, args[0])
    b = int_bits(ip, args[1])
    if a is None or b is None:
        return None
    return make_int(add_bits(ip.man, a, b))


def cp_minus(ip, args):
    a = int_bits(ip, args[0])
    if a is None:
        return None
    return make_int(neg_bits(ip.man, a))


def cp_lt(ip, args):
    a = int_bits(ip, args[0])
    b = int_bits(ip, args[1])
    if a is None or b is None:
        return None
    return GBool(lt_bits(ip.man, a, b))


def cp_lognot(ip, args):
    a = int_bits(ip, args[0])
    if a is None:
        return None
    return make_int([x ^ 1 for x in a])


def cp_logcons(ip, args):
    b, i = args
    ib = int_bits(ip, i)
    if ib is None:
        return None
    # bfix: the bit is set exactly when the argument equals 1
    cb, vb = _concrete_arg(b)
    if cb:
        bit = TRUE if vb == 1 else FALSE
    else:
        bb = int_bits(ip, b)
        if bb is None:
            return None
        bit = eq_bits(ip.man, bb, int_to_bits(1))
    return make_int([bit, *ib])


def cp_logbitp(ip, args):
    ok, n = _concrete_arg(args[0])
    if not ok:
        return None
    bits = int_bits(ip, args[1])
    if bits is None:
        return None
    k = _nfix(n)
    return GBool(bits[min(k, len(bits) - 1)])


def cp_loghead(ip, args):
    ok, n = _concrete_arg(args[0])
    if not ok:
        return None
    bits = int_bits(ip, args[1])
    if bits is None:
        return None
    k = _nfix(n)
    return make_int(extend_bits(bits, k)[:k] + [FALSE])


def cp_logext(ip, args):
    ok, n = _concrete_arg(args[0])
    if not ok:
        return None
    bits = int_bits(ip, args[1])
    if bits is None:
        return None
    k = _nfix(n) or 1
    return make_int(extend_bits(bits, k)[:k])


def cp_ash(ip, args):
    ok, c = _concrete_arg(args[1])
    if not ok:
        return None
    bits = int_bits(ip, args[0])
    if bits is None:
        return None
    c = ifix(c)
    if c >= 0:
        return make_int([FALSE] * c + bits)
    drop = -c
    return make_int(bits[drop:] if drop < len(bits) else [bits[-1]])


def cp_bool_to_bit(ip, args):
    return make_int([ip.simplify_if_test(args[0]), FALSE])


COUNTERPARTS: dict[Sym, Callable] = {
    S("EQUAL"): cp_equal,
    S("NOT"): cp_not,
    S("CONSP"): cp_consp,
    S("INTEGERP"): cp_integerp,
    S("ACL2-NUMBERP"): cp_integerp,
    S("BOOLEANP"): cp_booleanp,
    S("SYMBOLP"): cp_symbolp,
    S("STRINGP"): cp_stringp,
    S("CAR"): cp_car,
    S("CDR"): cp_cdr,
    S("CONS"): cp_cons,
    S("BINARY-+"): cp_plus,
    S("UNARY--"): cp_minus,
    S("<"): cp_lt,
    S("LOGNOT"): cp_lognot,
    S("LOGCONS"): cp_logcons,
    S("LOGBITP"): cp_logbitp,
    S("LOGHEAD"): cp_loghead,
    S("LOGEXT"): cp_logext,
    S("ASH"): cp_ash,
    S("BOOL->BIT"): cp_bool_to_bit,
}
