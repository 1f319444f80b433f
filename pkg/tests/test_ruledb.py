import random

import pytest

from glterm.events import EventError, parse_events
from glterm.ruledb import Mode, RuleError, check_rule_soundness
from glterm.sampling import value_for_name
from glterm.sexpr import Sym
from conftest import theory_db


def add(db, text):
    for ev in parse_events(text):
        db.add_event(ev)
    return db


def test_rules_for_orders_by_declaration(prelude):
    db = add(
        prelude.copy(),
        """
        (def-gl-rewrite r1 (equal (loghead n x) (loghead n x)))
        (def-gl-rewrite r2 (equal (loghead n (ash x '-1)) (loghead n x)))
        (def-gl-boolean-constraint c1 :bindings ((a (logbitp n x)) (b (integerp x))) :body (implies a b))
        """,
    )
    rs = db.rules_for(Sym("LOGHEAD"))
    assert [r.name.name for r in rs.rewrites] == ["R1", "R2"]
    assert [c.name.name for c in db.rules_for(Sym("INTEGERP")).constraints] == ["C1"]
    assert [c.name.name for c in db.rules_for(Sym("LOGBITP")).constraints] == ["C1"]


def test_modes(prelude):
    assert prelude.mode(Sym("LOGBITP")) is Mode.CONCRETE_ONLY
    assert prelude.mode(Sym("NFIX")) is Mode.INTERPRETED
    db = add(prelude.copy(), "(gl-set-uninterpreted nfix)")
    assert db.mode(Sym("NFIX")) is Mode.UNINTERPRETED


@pytest.mark.parametrize(
    "text",
    [
        "(defun car (x) x)",
        "(defun f (x) y)",
        "(defun f (x) (undefined-fn x))",
        "(gl-set-uninterpreted no-such-fn)",
        "(def-gl-rewrite r (equal (loghead n) 0))",
        "(def-gl-rewrite r (equal (loghead n x) y))",
        "(def-gl-rewrite r (equal (if a b c) b))",
    ],
)
def test_rejected_events(prelude, text):
    with pytest.raises((RuleError, EventError)):
        add(prelude.copy(), text)


def test_copy_is_independent(prelude):
    db = prelude.copy()
    add(db, "(def-gl-rewrite r1 (equal (loghead n x) (loghead n x)))")
    assert Sym("LOGHEAD") not in prelude.rewrites


def test_dump_lists_rules(records_db):
    text = records_db.dump()
    assert "G-OF-S-CASESPLIT" in text and "MERGE-IF-OF-S" in text and "mode S concrete-only" in text


@pytest.mark.parametrize("theory", ["records", "bitops", "bitops-ctrex"])
def test_shipped_rules_hold_on_random_instances(theory):
    db = theory_db(f'(include-book "{theory}")')
    rules = db.all_rewrites() + db.all_merges() + db.constraints
    rng = random.Random(3)
    fails = []
    for r in rules:
        fails += check_rule_soundness(db, r, value_for_name, rng, samples=150)
    assert not fails, fails[:3]


def test_soundness_harness_catches_a_bad_rule(prelude):
    db = add(prelude.copy(), "(def-gl-rewrite bogus (equal (loghead n x) x))")
    fails = check_rule_soundness(db, db.rewrites[Sym("LOGHEAD")][0], value_for_name, random.Random(0))
    assert fails


def test_forward_chain_constraints_hold():
    db = theory_db(open("tests/corpus/integerp-forward-chain.gl").read().split("(gl::def-gl-thm")[0])
    fails = []
    for r in db.constraints:
        fails += check_rule_soundness(db, r, value_for_name, random.Random(1))
    assert not fails
