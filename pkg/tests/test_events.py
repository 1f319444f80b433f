import pytest

from glterm.events import (
    DefunEvent,
    EventError,
    IncludeEvent,
    RuleEvent,
    TheoremEvent,
    UninterpretedEvent,
    parse_events,
)
from glterm.ruledb import BranchMergeRule, ConstraintRule, CtrexRule, Mode, RewriteRule
from glterm.sexpr import Sym
from glterm.terms import Quote, Var


def one(text):
    evs = parse_events(text)
    assert len(evs) == 1
    return evs[0]


def test_defun():
    ev = one("(defun nfix (n) (if (integerp n) (if (< n '0) '0 n) '0))")
    assert isinstance(ev, DefunEvent)
    assert ev.defn.name is Sym("NFIX") and ev.defn.formals == (Sym("N"),)


def test_defun_skips_doc_and_declare():
    ev = one('(defun f (x y) "doc" (declare (ignore y)) x)')
    assert ev.defn.body == Var(Sym("X"))


def test_uninterpreted_modes():
    assert one("(gl::gl-set-uninterpreted g :concrete-only)") == UninterpretedEvent(Sym("G"), Mode.CONCRETE_ONLY, 1)
    assert one("(gl-set-uninterpreted g)").mode is Mode.UNINTERPRETED
    assert one("(gl-set-uninterpreted g nil)").mode is Mode.INTERPRETED


def test_smallest_theorem():
    ev = one("(def-gl-thm foo :hyp t :concl (equal x x) :g-bindings nil)")
    assert isinstance(ev, TheoremEvent)
    assert ev.hyp == Quote(Sym("T"))
    assert ev.variables == (Sym("X"),)
    assert ev.expect == "prove"


def test_rule_events():
    evs = parse_events(
        """
        (def-gl-rewrite r1 (implies (and (syntaxp (integerp n)) (natp n)) (equal (loghead n x) x)))
        (def-gl-branch-merge m1 (equal (if c (s k v x) y) (s k v y)))
        (def-gl-boolean-constraint c1 :bindings ((b (logbitp n x))) :body (implies b (integerp x)))
        (def-glcp-ctrex-rewrite ((logbitp n i) v) (i (install-bit n (bool->bit v) i)))
        (include-book "records")
        """
    )
    r, m, c, x, inc = evs
    assert isinstance(r.rule, RewriteRule) and [h.syntaxp for h in r.rule.hyps] == [True, False]
    assert isinstance(m.rule, BranchMergeRule) and m.rule.fn is Sym("S")
    assert isinstance(c.rule, ConstraintRule) and c.rule.bindings[0][0] is Sym("B")
    assert isinstance(x.rule, CtrexRule) and x.rule.target is Sym("I")
    assert inc == IncludeEvent("records", inc.line)
    assert all(isinstance(e, RuleEvent) for e in (r, m, c, x))


@pytest.mark.parametrize(
    "text",
    [
        "(frobnicate x)",
        "(defun f)",
        "(def-gl-thm t1 :hyp t)",
        "(def-gl-thm t1 :concl t :bogus 1)",
        "(def-gl-branch-merge m (equal (if c d (s k v x)) y))",
        "(def-gl-rewrite r (foo x))",
        "(defun f (x) (g x",
    ],
)
def test_malformed_events(text):
    with pytest.raises(EventError):
        parse_events(text)


def test_error_carries_line():
    with pytest.raises(EventError) as e:
        parse_events("(defun f (x) x)\n\n(bogus)")
    assert e.value.line == 3
