"""The symbolic interpreter.

Terms are interpreted into symbolic objects. Function calls are reduced by,
in order: concrete evaluation, rewrite rules, built-in counterparts,
uninterpreted call objects, and finally the definition body. ``if`` tests
are coerced to Boolean functions (generating fresh Boolean variables for
call and variable objects), and live branches are merged.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .bfr import FALSE, TRUE, AigMan, Bfr
from .bvardb import BvarDb
from .counterparts import COUNTERPARTS
from .evaluator import EvalError, eval_call, eval_term
from .ruledb import BranchMergeRule, EventDB, Mode, RewriteRule
from .sat import Status, sat_check
from .sexpr import NIL, Cons, Sym
from .sobj import (
    G_TRUE,
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
    print_obj,
    reflect,
    unify,
)
from .terms import CONS, EQUAL, IF, NOT, Call, LambdaCall, Quote, Term, Var, term_str

EQUAL_CTX = "equal"
IFF_CTX = "iff"
FORCE_CHECK = Sym("GL-FORCE-CHECK")


class InterpError(RuntimeError):
    """Interpretation failed; the proof must be aborted."""


@dataclass
class Limits:
    max_depth: int = 1000
    backchain_depth: int = 100
    sat_budget: int = 1000
    rewrite_steps: int = 10000


@dataclass
class InterpStats:
    rewrites: int = 0
    rewrite_attempts: int = 0
    counterpart_calls: int = 0
    concrete_evals: int = 0
    merges: int = 0
    merge_rule_hits: int = 0
    pathcond_queries: int = 0
    constraint_instances: int = 0


@dataclass
class Interp:
    db: EventDB
    man: AigMan
    bvars: BvarDb
    limits: Limits = field(default_factory=Limits)
    trace: Callable[[str], None] | None = None
    rng: random.Random = field(default_factory=lambda: random.Random(0))
    pathcond: Bfr = TRUE
    stats: InterpStats = field(default_factory=InterpStats)
    depth: int = 0
    backchain: int = 0
    steps: int = 0

    # -- entry points -----------------------------------------------------

    def interp_top(self, t: Term, bindings: dict, ctx: str = IFF_CTX) -> SObj:
        """Interpret a whole conjecture part with a fresh rewrite-step budget."""
        self.steps = 0
        return self.interp_term(t, bindings, ctx)

    def test_of(self, t: Term, bindings: dict) -> Bfr:
        """Interpret ``t`` as a Boolean and coerce it to a Bfr."""
        return self.simplify_if_test(self.interp_top(t, bindings, IFF_CTX))

    # -- term walk ------------------------------------------------------

    def interp_term(self, t: Term, bindings: dict, ctx: str = EQUAL_CTX) -> SObj:
        match t:
            case Var(name):
                try:
                    out = bindings[name]
                except KeyError:
                    raise InterpError(f"unbound variable {name.name}") from None
            case Quote(v):
                out = GConcrete(v)
            case Call(fn, args) if fn is IF:
                out = self.interp_if(args[0], args[1], args[2], bindings, ctx)
            case Call(fn, args):
                objs = [self.interp_term(a, bindings, EQUAL_CTX) for a in args]
                out = self.interp_fncall(fn, objs, ctx)
            case LambdaCall(formals, body, args):
                objs = [self.interp_term(a, bindings, EQUAL_CTX) for a in args]
                out = self.interp_term(body, dict(zip(formals, objs)), ctx)
            case _:
                raise InterpError(f"not a term: {t!r}")
        if ctx == IFF_CTX and isinstance(out, (GInt, GCons)):
            return G_TRUE
        return out

    def _enter(self):
        self.depth += 1
        if self.depth > self.limits.max_depth:
            self.depth -= 1
            raise InterpError(
                f"interpretation depth exceeded {self.limits.max_depth} (probable nontermination)"
            )

    def interp_fncall(self, fn: Sym, args: list[SObj], ctx: str = EQUAL_CTX) -> SObj:
        if fn is IF:
            raise InterpError("if is handled by interp_if")
        arity = self.db.arity(fn)
        if arity is None:
            raise InterpError(f"undefined function {fn.name}")
        if arity != len(args):
            raise InterpError(f"{fn.name} expects {arity} arguments, got {len(args)}")
        self._enter()
        try:
            mode = self.db.mode(fn)
            # (1) concrete evaluation
            if mode is not Mode.UNINTERPRETED and all(general_concretep(a) for a in args):
                self.stats.concrete_evals += 1
                try:
                    v = eval_call(fn, [general_concrete_obj(a) for a in args], self.db.defs)
                except EvalError as exc:
                    raise InterpError(f"concrete evaluation of {fn.name} failed: {exc}") from None
                return GConcrete(v)
            # (2) rewrite rules in declaration order
            for rule in self.db.rewrites.get(fn, ()):
                if rule.equiv == "iff" and ctx != IFF_CTX:
                    continue
                subst = self.try_rewrite(rule, args)
                if subst is not None:
                    self.stats.rewrites += 1
                    self.steps += 1
                    if self.steps > self.limits.rewrite_steps:
                        raise InterpError(
                            f"rewrite step limit {self.limits.rewrite_steps} exceeded "
                            f"(last rule {rule.name.name}; probable rewrite loop)"
                        )
                    return self.interp_term(rule.rhs, subst, ctx)
            # (3) built-in counterpart
            cp = COUNTERPARTS.get(fn)
            if cp is not None:
                self.stats.counterpart_calls += 1
                out = cp(self, args)
                if out is not None:
                    return out
            # (4) uninterpreted: a call object
            if mode is not Mode.INTERPRETED:
                return GApply(fn, tuple(args))
            # (5) the definition body
            defn = self.db.defs.get(fn)
            if defn is None:
                # a primitive whose counterpart declined
                return GApply(fn, tuple(args))
            return self.interp_term(defn.body, dict(zip(defn.formals, args)), ctx)
        finally:
            self.depth -= 1

    # -- rewriting -------------------------------------------------------

    def _trace(self, msg: str) -> None:
        if self.trace is not None:
            self.trace(msg)

    def try_rewrite(self, rule: RewriteRule, args: list[SObj]) -> dict | None:
        """Substitution under which ``rule`` applies to the call, or None."""
        self.stats.rewrite_attempts += 1
        subst: dict | None = {}
        for p, a in zip(rule.lhs.args, args):
            subst = unify(p, a, subst)
            if subst is None:
                self._trace(f"rewrite {rule.name.name}: unify failed")
                return None
        shown = " ".join(f"{k.name}={print_obj(v)}" for k, v in subst.items())
        for i, h in enumerate(rule.hyps):
            if h.syntaxp:
                env = {k: reflect(v) for k, v in subst.items()}
                try:
                    ok = eval_term(h.term, env, self.db.defs) is not NIL
                except EvalError as exc:
                    self._trace(f"rewrite {rule.name.name}: syntaxp hyp {i} error {exc}")
                    return None
                if not ok:
                    self._trace(f"rewrite {rule.name.name}: unify {shown}; syntaxp hyp {i} failed")
                    return None
            else:
                if self.backchain >= self.limits.backchain_depth:
                    self._trace(f"rewrite {rule.name.name}: backchain limit at hyp {i}")
                    return None
                self.backchain += 1
                try:
                    obj = self.interp_term(h.term, subst, IFF_CTX)
                finally:
                    self.backchain -= 1
                b = self.bool_of_existing(obj)
                if b is None or (b != TRUE and self.pathcond_implies(b) is not True):
                    self._trace(f"rewrite {rule.name.name}: unify {shown}; hyp {i} not relieved")
                    return None
        self._trace(f"rewrite {rule.name.name}: unify {shown}; applied")
        return subst

    def bool_of_existing(self, o: SObj) -> Bfr | None:
        """Boolean function of ``o`` without generating new variables."""
        match o:
            case GBool(b):
                return b
            case GInt() | GCons():
                return TRUE
            case GConcrete(v):
                return FALSE if v is NIL else TRUE
            case GIte(t, a, b):
                c = self.bool_of_existing(t)
                if c is None:
                    return None
                if c == TRUE:
                    return self.bool_of_existing(a)
                if c == FALSE:
                    return self.bool_of_existing(b)
                x, y = self.bool_of_existing(a), self.bool_of_existing(b)
                if x is None or y is None:
                    return None
                return self.man.ite(c, x, y)
        if general_concretep(o):
            return FALSE if general_concrete_obj(o) is NIL else TRUE
        neg = self._negated_arg(o)
        if neg is not None:
            x = self.bool_of_existing(neg)
            return None if x is None else x ^ 1
        idx = self.bvars.index_of(o)
        return None if idx is None else self.man.var(idx)

    # -- if handling -----------------------------------------------------

    def interp_if(self, test: Term, then: Term, els: Term, bindings: dict, ctx: str) -> SObj:
        tobj = self.interp_term(test, bindings, IFF_CTX)
        c = self.simplify_if_test(tobj)
        if c == TRUE:
            return self.interp_term(then, bindings, ctx)
        if c == FALSE:
            return self.interp_term(els, bindings, ctx)
        known = self.pathcond_implies(c)
        if known is True:
            return self.interp_term(then, bindings, ctx)
        if known is False:
            return self.interp_term(els, bindings, ctx)
        saved = self.pathcond
        try:
            self.pathcond = self.man.and_(saved, c)
            a = self.interp_term(then, bindings, ctx)
            self.pathcond = self.man.and_(saved, c ^ 1)
            b = self.interp_term(els, bindings, ctx)
        finally:
            self.pathcond = saved
        return self.merge_branches(c, a, b, ctx)

    @staticmethod
    def _negated_arg(o: SObj) -> SObj | None:
        """x when ``o`` is a call (not x), (equal x nil) or (equal nil x)."""
        if not isinstance(o, GApply):
            return None
        if o.fn is NOT and len(o.args) == 1:
            return o.args[0]
        if o.fn is EQUAL and len(o.args) == 2:
            a, b = o.args
            if general_concretep(b) and general_concrete_obj(b) is NIL:
                return a
            if general_concretep(a) and general_concrete_obj(a) is NIL:
                return b
        return None

    def simplify_if_test(self, o: SObj) -> Bfr:
        match o:
            case GBool(b):
                return b
            case GInt():
                return TRUE
            case GCons():
                return TRUE
            case GConcrete(v):
                return FALSE if v is NIL else TRUE
            case GIte(t, a, b):
                c = self.simplify_if_test(t)
                if c == TRUE:
                    return self.simplify_if_test(a)
                if c == FALSE:
                    return self.simplify_if_test(b)
                return self.man.ite(c, self.simplify_if_test(a), self.simplify_if_test(b))
            case GVar():
                b, _ = self.bvars.lookup_or_add(o)
                return b
            case GApply(fn, args):
                neg = self._negated_arg(o)
                if neg is not None:
                    return self.simplify_if_test(neg) ^ 1
                if fn is FORCE_CHECK and len(args) == 3:
                    b = self.simplify_if_test(args[0])
                    if b < 2:
                        return b
                    known = self.pathcond_implies(b)
                    if known is True:
                        return TRUE
                    if known is False:
                        return FALSE
                    return b
                b, new = self.bvars.lookup_or_add(o)
                if new:
                    self._instantiate_constraints(o, b >> 1)
                return b
        raise InterpError(f"not a symbolic object: {o!r}")

    def _instantiate_constraints(self, o: GApply, node: int) -> None:
        rules = self.db.constraint_index.get(o.fn, ())
        if not rules:
            return
        idx = self.bvars.index_of(o)
        self.stats.constraint_instances += self.bvars.instantiate_constraints(
            list(rules), idx, self._constraint_body
        )

    def _constraint_body(self, rule, bindings: dict) -> Bfr:
        saved = self.pathcond
        self.pathcond = TRUE
        try:
            obj = self.interp_term(rule.body, bindings, IFF_CTX)
            return self.simplify_if_test(obj)
        finally:
            self.pathcond = saved

    def pathcond_implies(self, b: Bfr) -> bool | None:
        """True/False when the path condition decides ``b``; None if unknown."""
        pc = self.pathcond
        if b == TRUE:
            return True
        if b == FALSE:
            return False if pc != FALSE else True
        if pc == TRUE:
            # a lone input variable is never decided by an empty path condition
            if self.man.is_input(b >> 1):
                return None
        if b == pc:
            return True
        if b == pc ^ 1:
            return False
        m = self.man
        if pc != TRUE and not (m.support(b) & m.support(pc)):
            return None
        self.stats.pathcond_queries += 1
        can_false, can_true = self._simulate(pc, b)
        if not can_false:
            r = sat_check(m, m.and_(pc, b ^ 1), limit=self.limits.sat_budget)
            if r.status is Status.UNSAT:
                return True
        if not can_true:
            r = sat_check(m, m.and_(pc, b), limit=self.limits.sat_budget)
            if r.status is Status.UNSAT:
                return False
        return None

    def _simulate(self, pc: Bfr, b: Bfr) -> tuple[bool, bool]:
        """Random simulation: can pc∧¬b, pc∧b be observed true?"""
        m = self.man
        width = 64
        words = {v: self.rng.getrandbits(width) for v in m.support(m.and_(pc, b)) | m.support(pc)}
        pv, bv = m.simulate([pc, b], words, width)
        return bool(pv & ~bv & ((1 << width) - 1)), bool(pv & bv)

    # -- merging -----------------------------------------------------------

    def merge_branches(self, c: Bfr, a: SObj, b: SObj, ctx: str = EQUAL_CTX) -> SObj:
        self.stats.merges += 1
        if c == TRUE:
            return a
        if c == FALSE:
            return b
        # (1) identical branches
        if a == b:
            return a
        # (2) merge rules keyed by the then branch's function
        out = self._try_merge_rules(c, a, b, ctx)
        if out is not None:
            return out
        # (3) the same with the test negated and branches swapped
        out = self._try_merge_rules(c ^ 1, b, a, ctx)
        if out is not None:
            return out
        # (4) calls of the same function, or two conses
        if isinstance(a, GApply) and isinstance(b, GApply) and a.fn is b.fn and len(a.args) == len(b.args):
            merged = [self.merge_branches(c, x, y) for x, y in zip(a.args, b.args)]
            return self.interp_fncall(a.fn, merged, ctx)
        if isinstance(a, GCons) and isinstance(b, GCons):
            return GCons(self.merge_branches(c, a.car, b.car), self.merge_branches(c, a.cdr, b.cdr))
        # (5) kind-wise merge without further interpretation
        return self.merge_typed(c, a, b)

    def _try_merge_rules(self, c: Bfr, a: SObj, b: SObj, ctx: str) -> SObj | None:
        if isinstance(a, GApply):
            head = a.fn
        elif isinstance(a, GCons):
            head = CONS
        else:
            return None
        for rule in self.db.merges.get(head, ()):
            subst = self._unify_merge(rule, c, a, b)
            if subst is None:
                self._trace(f"merge {rule.name.name}: unify failed")
                continue
            self._trace(f"merge {rule.name.name}: applied")
            self.stats.merge_rule_hits += 1
            self.steps += 1
            if self.steps > self.limits.rewrite_steps:
                raise InterpError(f"rewrite step limit exceeded in merge rule {rule.name.name}")
            return self.interp_term(rule.rhs, subst, ctx)
        return None

    @staticmethod
    def _unify_merge(rule: BranchMergeRule, c: Bfr, a: SObj, b: SObj) -> dict | None:
        subst = unify(rule.then_pattern, a, {})
        if subst is None:
            return None
        subst = unify(Var(rule.test_var), GBool(c), subst)
        if subst is None:
            return None
        return unify(Var(rule.else_var), b, subst)

    def merge_typed(self, c: Bfr, a: SObj, b: SObj) -> SObj:
        m = self.man
        if a == b:
            return a
        ba, bb = _bool_view(a), _bool_view(b)
        if ba is not None and bb is not None:
            return GBool(m.ite(c, ba, bb))
        ia, ib = _int_view(a), _int_view(b)
        if ia is not None and ib is not None:
            w = max(len(ia), len(ib))
            return make_int([m.ite(c, x, y) for x, y in zip(extend_bits(ia, w), extend_bits(ib, w))])
        ca, cb = _cons_view(a), _cons_view(b)
        if ca is not None and cb is not None:
            return GCons(self.merge_typed(c, ca[0], cb[0]), self.merge_typed(c, ca[1], cb[1]))
        return GIte(GBool(c), a, b)


def _bool_view(o: SObj) -> Bfr | None:
    match o:
        case GBool(b):
            return b
        case GConcrete(v):
            if v is NIL:
                return FALSE
            if v is Sym("T"):
                return TRUE
    return None


def _int_view(o: SObj):
    match o:
        case GInt(bits):
            return list(bits)
        case GConcrete(v) if type(v) is int:
            return int_to_bits(v)
    return None


def _cons_view(o: SObj):
    match o:
        case GCons(a, d):
            return a, d
        case GConcrete(v) if type(v) is Cons:
            return GConcrete(v.car), GConcrete(v.cdr)
    return None


def describe_term(t: Term) -> str:
    return term_str(t)
