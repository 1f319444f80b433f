import random

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, theory_db
from glterm.bfr import AigMan
from glterm.bvardb import BvarDb
from glterm.ctrex import Assignment, PendingEq, apply_ctrex_rules, match_pattern, render, verify_ctrex
from glterm.evaluator import eval_term
from glterm.prover import FAILED, FAILED_UNVERIFIED, ProveConfig, run_file
from glterm.sexpr import NIL, T, Cons, Sym, kw, read_one
from glterm.sobj import GApply, GBool, GConcrete, GCons, GInt, GIte, GVar, NodeEval, SymEnv, sym_eval
from glterm.terms import Quote, Var, parse_term

X = Sym("X")


def resolve(db, src, value):
    asg = Assignment(env_vars={X: NIL})
    return apply_ctrex_rules(PendingEq(parse_term(src), value), asg, db.ctrex_rules, db.defs)


def test_install_bit_rule(bitops_db):
    asg = resolve(bitops_db, "(logbitp 4 x)", T)
    assert asg.env_vars[X] == 16 and not asg.unresolved


def test_without_rules_value_stays_nil(prelude):
    asg = resolve(prelude, "(logbitp 4 x)", T)
    assert asg.env_vars[X] is NIL
    assert asg.unresolved and "no counterexample rule" in asg.unresolved[0][2]


def test_rules_chain_through_record_read():
    db = theory_db('(include-book "records") (include-book "bitops") (include-book "bitops-ctrex")')
    asg = resolve(db, "(logbitp 4 (g :fld x))", T)
    assert asg.env_vars[X] == read_one("((:fld . 16))")


def test_variable_set_directly(prelude):
    asg = resolve(prelude, "x", 42)
    assert asg.env_vars[X] == 42


def test_fuel_is_bounded():
    db = theory_db("(gl::def-glcp-ctrex-rewrite ((lognot x) v) (x (lognot v)))")
    deep = "x"
    for _ in range(30):
        deep = f"(lognot {deep})"
    asg = Assignment(env_vars={X: NIL})
    apply_ctrex_rules(PendingEq(parse_term(deep), 5), asg, db.ctrex_rules, db.defs, fuel=5)
    assert asg.unresolved and "fuel" in asg.unresolved[0][2]
    ok = Assignment(env_vars={X: NIL})
    apply_ctrex_rules(PendingEq(parse_term(deep), 5), ok, db.ctrex_rules, db.defs, fuel=40)
    assert ok.env_vars[X] == 5 and not ok.unresolved


def test_match_pattern():
    s = match_pattern(parse_term("(logbitp n (g k x))"), parse_term("(logbitp 3 (g :a y))"))
    assert s == {Sym("N"): Quote(3), Sym("K"): Quote(kw("a")), X: Var(Sym("Y"))}
    assert match_pattern(parse_term("(f x x)"), parse_term("(f a b)")) is None
    assert match_pattern(parse_term("(f '1)"), parse_term("(f 2)")) is None


def test_verify_verdicts(prelude):
    hyp, concl = parse_term("(integerp x)"), parse_term("(< x 10)")
    bv = BvarDb(AigMan(), 0)
    assert verify_ctrex(Assignment({X: 12}), hyp, concl, bv, prelude.defs).real
    v = verify_ctrex(Assignment({X: 3}), hyp, concl, bv, prelude.defs)
    assert not v.real and "conclusion holds" in v.reason
    v = verify_ctrex(Assignment({X: NIL}), hyp, concl, bv, prelude.defs)
    assert not v.real and "hypothesis is false" in v.reason


def test_corpus_counterexamples():
    rep = run_file(f"{CORPUS}/logext-ctrex.gl", ProveConfig())
    (r,) = rep.results
    assert r.verdict == FAILED and r.assignment.vars[X] == 16 and r.check.real
    rep = run_file(f"{CORPUS}/records-ctrex.gl", ProveConfig())
    (r,) = rep.results
    assert r.verdict == FAILED and r.assignment.vars[X] == read_one("((:fld . 16))")
    rep = run_file(f"{CORPUS}/logext-no-ctrex.gl", ProveConfig())
    (r,) = rep.results
    assert r.verdict == FAILED_UNVERIFIED and r.assignment.vars[X] is NIL


def test_disagreement_reported():
    rep = run_file(f"{CORPUS}/integerp-no-constraint.gl", ProveConfig())
    (r,) = rep.results
    assert r.verdict == FAILED_UNVERIFIED
    lines = "\n".join(r.report_lines())
    assert "(INTEGERP X): model NIL, evaluates to T" in lines


def test_deterministic():
    a = run_file(f"{CORPUS}/records-ctrex.gl", ProveConfig(seed=3)).results[0]
    b = run_file(f"{CORPUS}/records-ctrex.gl", ProveConfig(seed=3)).results[0]
    assert a.assignment.vars == b.assignment.vars and a.assignment.log == b.assignment.log


# -- rendering is exact: the rendered term evaluates like the object -------


def random_obj(rng, m, depth=3):
    lit = lambda: m.var(rng.randrange(4)) ^ rng.randrange(2)
    r = rng.random()
    if r < 0.15:
        return GConcrete(rng.choice([0, 3, NIL, T, kw("a"), Cons(1, 2)]))
    if r < 0.3:
        return GInt(tuple(lit() for _ in range(rng.randint(1, 5))))
    if r < 0.42:
        return GBool(lit())
    if r < 0.52:
        return GVar(rng.choice([X, Sym("Y")]))
    if depth == 0:
        return GBool(lit())
    d = depth - 1
    if r < 0.67:
        return GCons(random_obj(rng, m, d), random_obj(rng, m, d))
    if r < 0.82:
        return GIte(random_obj(rng, m, d), random_obj(rng, m, d), random_obj(rng, m, d))
    fn, n = rng.choice([("LOGHEAD", 2), ("CONSP", 1), ("BINARY-+", 2), ("EQUAL", 2), ("CAR", 1)])
    return GApply(Sym(fn), tuple(random_obj(rng, m, d) for _ in range(n)))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_render_exact(defs, seed):
    rng = random.Random(seed)
    m = AigMan()
    o = random_obj(rng, m)
    model = {i: rng.random() < 0.5 for i in range(4)}
    env_vars = {X: rng.choice([0, 7, NIL, Cons(1, 2)]), Sym("Y"): rng.choice([-1, T, kw("b")])}
    term = render(o, NodeEval(m, model))
    assert eval_term(term, env_vars, defs) == sym_eval(m, o, SymEnv(model, env_vars), defs)
