import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import theory_db
from glterm.bfr import AigMan
from glterm.evaluator import eval_term
from glterm.sampling import random_record, random_value
from glterm.sexpr import NIL, T, Cons, Sym, kw, read_one
from glterm.shapespec import (
    OBJ_IN_RANGE, SBool, SCall, SConcrete, SCons, SInt, ShapeSpecError, SVar, check_indices,
    check_oblig_on, encode_spec, obj_in_range, obj_in_range_value, oblig_term,
    parse_g_bindings, spec_to_sobj, witness_env,
)
from glterm.sobj import GBool, GConcrete, GInt, GVar, SymEnv, sym_eval
from glterm.terms import Call, LambdaCall, Var, parse_term, translate_lambda

X = Sym("X")

INVERSE_DB = """
(include-book "records")
(defun s-inverse (key obj) (list key (g key obj) obj))
"""


@pytest.fixture(scope="module")
def inv_db():
    return theory_db(INVERSE_DB)


def covers(spec, value, defs):
    return eval_term(oblig_term(spec, Var(X)), {X: value}, defs) is not NIL


def test_range_examples(defs):
    assert covers(SInt(0, 1, 10), 511, defs)
    assert not covers(SInt(0, 1, 10), 512, defs)
    assert covers(SInt(0, 1, 10), -512, defs)
    assert not covers(SInt(0, 1, 10), -513, defs)
    assert not covers(SInt(0, 1, 10), NIL, defs)
    assert covers(SVar(Sym("Q")), Cons(1, kw("a")), defs)
    assert not covers(SBool(3), 7, defs)
    assert covers(SBool(3), T, defs) and covers(SBool(3), NIL, defs)
    assert covers(SConcrete(kw("a")), kw("a"), defs)
    assert not covers(SConcrete(kw("a")), kw("b"), defs)
    cons = SCons(SInt(0, 1, 3), SBool(5))
    assert covers(cons, Cons(3, T), defs)
    assert not covers(cons, Cons(4, T), defs)


def test_plain_oblig_is_range_call():
    t = oblig_term(SInt(0, 2, 4), Var(X))
    assert isinstance(t, Call) and t.fn is OBJ_IN_RANGE


def test_narrow_int_fails_on_sample(defs):
    hyp = parse_term("(unsigned-byte-p 8 x)")
    rep = check_oblig_on(SInt(0, 1, 4), X, hyp, [{X: 3}, {X: 200}, {X: -1}], defs)
    assert not rep.ok
    assert rep.failed == [{X: 200}]
    assert rep.passed == 1 and rep.skipped == 1
    rep8 = check_oblig_on(SInt(0, 1, 9), X, hyp, [{X: 3}, {X: 200}], defs)
    assert rep8.ok and rep8.passed == 2


def test_empty_samples_warn(defs):
    rep = check_oblig_on(SInt(0, 1, 4), X, parse_term("t"), [], defs)
    assert rep.warnings and rep.passed == 0


def test_call_obligation_structure(inv_db):
    inner = SCall(Sym("S"), (SConcrete(kw("b")), SInt(10, 1, 10), SVar(Sym("REST"))),
                  translate_lambda(read_one("(lambda (x) (s-inverse ':b x))")))
    outer = SCall(Sym("S"), (SConcrete(kw("a")), SInt(0, 1, 10), inner),
                  translate_lambda(read_one("(lambda (x) (s-inverse ':a x))")))
    t = oblig_term(outer, Var(Sym("ST")))
    assert isinstance(t, LambdaCall) and t.formals[0] is Sym("INV-ARGS")
    text = str(t.body)
    assert "INV-ARGS1" in repr(t) and "NTH" in repr(t)
    defs = inv_db.defs
    st_ok = read_one("((:a . 5) (:b . 7) (:z . 1))")
    assert eval_term(t, {Sym("ST"): st_ok}, defs) is T
    st_bad = read_one("((:a . 5000) (:b . 7))")
    assert eval_term(t, {Sym("ST"): st_bad}, defs) is NIL
    assert text


def test_call_spec_rejected_by_direct_range():
    with pytest.raises(ShapeSpecError):
        obj_in_range(SCall(Sym("S"), (), Sym("F")), 1)
    assert obj_in_range_value(encode_spec(SCall(Sym("S"), (), Sym("F"))), 1) is False


def test_parse_g_bindings(defs):
    specs = parse_g_bindings(read_one("`((x ,(gl::g-int 0 1 4)) (b (:g-boolean . 4)) (v (:g-var . v)))"), defs)
    assert specs == {X: SInt(0, 1, 4), Sym("B"): SBool(4), Sym("V"): SVar(Sym("V"))}
    assert check_indices(specs.values()) == 5
    with pytest.raises(ShapeSpecError):
        parse_g_bindings(read_one("'((x (:g-int 0 1 4)) (y (:g-boolean . 2)))"), defs)
    with pytest.raises(ShapeSpecError):
        parse_g_bindings(read_one("'((x (:g-boolean . 1)) (x (:g-boolean . 2)))"), defs)
    with pytest.raises(ShapeSpecError):
        parse_g_bindings(read_one("'((x (:g-int 0 0 4)))"), defs)
    # a shared g-var name would tie x and y together unnoticed by coverage
    with pytest.raises(ShapeSpecError):
        parse_g_bindings(read_one("'((x (:g-var . v)) (y (:g-var . v)))"), defs)


def test_spec_to_sobj():
    m = AigMan()
    assert spec_to_sobj(SInt(2, 1, 2), m) == GInt((m.var(2), m.var(3)))
    assert spec_to_sobj(SBool(1), m) == GBool(m.var(1))
    assert spec_to_sobj(SVar(X), m) == GVar(X)
    assert spec_to_sobj(SConcrete(5), m) == GConcrete(5)


# -- properties ------------------------------------------------------------


def random_spec(rng, next_index, depth=2):
    r = rng.random()
    if r < 0.2:
        return SConcrete(rng.choice([0, 1, NIL, T, kw("a")]))
    if r < 0.4:
        i = next_index[0]
        next_index[0] += 1
        return SBool(i)
    if r < 0.65:
        n = rng.randint(1, 6)
        by = rng.randint(1, 2)
        s = SInt(next_index[0], by, n)
        next_index[0] += by * n
        return s
    if r < 0.8 or depth == 0:
        next_index[0] += 1
        return SVar(Sym(f"V{next_index[0]}"))
    return SCons(random_spec(rng, next_index, depth - 1), random_spec(rng, next_index, depth - 1))


def target_for(rng, spec):
    """A value that is usually, but not always, in range."""
    if rng.random() < 0.25:
        return random_value(rng)
    match spec:
        case SConcrete(v):
            return v
        case SBool():
            return rng.choice([T, NIL])
        case SInt(_, _, n):
            return rng.randint(-(1 << (n - 1)) - 1, 1 << (n - 1))
        case SCons(a, d):
            return Cons(target_for(rng, a), target_for(rng, d))
    return random_value(rng)


@settings(max_examples=400, deadline=None)
@given(st.integers(0, 2**32))
def test_witness_soundness_and_oblig_conservative(defs, seed):
    rng = random.Random(seed)
    spec = random_spec(rng, [0])
    target = target_for(rng, spec)
    in_range = covers(spec, target, defs)
    assert in_range == obj_in_range(spec, target)
    w = witness_env(spec, target, defs)
    # the obligation holds exactly when the object can reach the value
    assert (w is not None) == in_range
    if w is not None:
        bools, vars_ = w
        m = AigMan()
        got = sym_eval(m, spec_to_sobj(spec, m), SymEnv(bools, vars_), defs)
        assert got == target


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_call_witness_soundness(inv_db, seed):
    rng = random.Random(seed)
    defs = inv_db.defs
    spec = SCall(Sym("S"), (SConcrete(kw("a")), SInt(0, 1, 6), SVar(Sym("REST"))),
                 translate_lambda(read_one("(lambda (x) (s-inverse ':a x))")))
    rec = random_record(rng) if rng.random() < 0.8 else random_value(rng)
    ok = covers(spec, rec, defs)
    w = witness_env(spec, rec, defs)
    if ok:
        assert w is not None
    if w is not None:
        m = AigMan()
        assert sym_eval(m, spec_to_sobj(spec, m), SymEnv(*w), defs) == rec


def test_default_variable_name_collision(prelude):
    from glterm.events import parse_events
    from glterm.prover import ERROR, prove

    (thm,) = parse_events("(gl::def-gl-thm tied :concl (equal x y) :g-bindings '((x (:g-var . y))))")
    assert prove(thm, prelude).verdict == ERROR
