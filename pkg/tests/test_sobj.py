
from hypothesis import given
from hypothesis import strategies as st

from glterm.bfr import AigMan
from glterm.sexpr import NIL, Cons, Sym, kw, lisp_list
from glterm.sobj import (
    GApply,
    GBool,
    GConcrete,
    GCons,
    GInt,
    GIte,
    GVar,
    SymEnv,
    bits_to_int,
    general_concrete_obj,
    general_concretep,
    instantiate,
    int_to_bits,
    make_int,
    reflect,
    sym_eval,
    unify,
)
from glterm.terms import parse_term

X, K = Sym("X"), Sym("K")


@given(st.integers(-(2**70), 2**70))
def test_int_bits_round_trip(n):
    bits = int_to_bits(n)
    assert bits_to_int([b == 1 for b in bits]) == n


def test_make_int_collapses_constants():
    assert make_int(int_to_bits(-5)) == GConcrete(-5)


def test_sym_eval_examples(defs):
    m = AigMan()
    a, b = m.var(0), m.var(1)
    env = SymEnv({0: True, 1: False}, {X: 7})
    assert sym_eval(m, GInt((a, b, a)), env, defs) == -3
    assert sym_eval(m, GBool(m.and_(a, b)), env, defs) is NIL
    assert sym_eval(m, GCons(GVar(X), GConcrete(NIL)), env, defs) == lisp_list(7)
    assert sym_eval(m, GIte(GBool(a), GVar(X), GConcrete(1)), env, defs) == 7
    assert sym_eval(m, GApply(Sym("BINARY-+"), (GVar(X), GConcrete(1))), env, defs) == 8
    assert sym_eval(m, GVar(Sym("UNSET")), env, defs) is NIL


def test_general_concrete():
    m = AigMan()
    o = GCons(GConcrete(1), GCons(GConcrete(kw("a")), GConcrete(NIL)))
    assert general_concretep(o) and general_concrete_obj(o) == lisp_list(1, kw("a"))
    assert not general_concretep(GCons(GConcrete(1), GBool(m.var(0))))
    assert not general_concretep(GVar(X))


def test_unify_cases():
    pat = parse_term("(logbitp n (ash x '-1))")
    obj = GApply(Sym("LOGBITP"), (GConcrete(3), GApply(Sym("ASH"), (GVar(X), GConcrete(-1)))))
    s = unify(pat, obj)
    assert s == {Sym("N"): GConcrete(3), X: GVar(X)}
    assert unify(parse_term("(logbitp n (ash x '-2))"), obj) is None
    # repeated variables must agree
    assert unify(parse_term("(equal x x)"), GApply(Sym("EQUAL"), (GVar(X), GVar(X)))) is not None
    assert unify(parse_term("(equal x x)"), GApply(Sym("EQUAL"), (GVar(X), GVar(K)))) is None
    # cons patterns see both cons objects and concrete conses
    assert unify(parse_term("(cons a b)"), GConcrete(Cons(1, 2))) == {Sym("A"): GConcrete(1), Sym("B"): GConcrete(2)}
    assert unify(parse_term("(cons a b)"), GCons(GVar(X), GVar(K))) is not None
    assert unify(parse_term("(foo x)"), GApply(Sym("BAR"), (GVar(X),))) is None


def test_instantiate_requires_bindings():
    import pytest

    t = parse_term("(g k x)")
    inst = instantiate(t, {K: GConcrete(1), X: GVar(X)})
    assert inst.term == t
    with pytest.raises(KeyError):
        instantiate(t, {K: GConcrete(1)})


def test_reflection_encoding():
    m = AigMan()
    assert reflect(GConcrete(5)) == 5
    assert reflect(GVar(X)) == Cons(kw("g-var"), X)
    app = reflect(GApply(Sym("S"), (GConcrete(kw("a")), GVar(X))))
    assert app.car is kw("g-apply") and app.cdr.car is Sym("S")
    # a concrete cons that looks like a tag is escaped
    tricky = Cons(kw("g-var"), X)
    assert reflect(GConcrete(tricky)) == Cons(kw("g-concrete"), tricky)
    assert reflect(GBool(m.var(0))).car is kw("g-boolean")


def test_structural_equality_and_hash():
    a = GApply(Sym("F"), (GConcrete(1), GVar(X)))
    b = GApply(Sym("F"), (GConcrete(1), GVar(X)))
    assert a == b and hash(a) == hash(b) and a is not b
    assert {a: 1}[b] == 1
