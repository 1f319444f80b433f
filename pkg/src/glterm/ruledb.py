"""Event database: definitions, uninterpreted flags, and the four rule classes.

Rules are indexed by the function symbol they fire on and are retrieved in
declaration order.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .evaluator import PRIMITIVE_ARITY, EvalError, eval_term
from .sexpr import NIL, T, Sym, Value
from .terms import (
    IF,
    Call,
    Defn,
    LambdaCall,
    Term,
    Var,
    fn_symbols,
    free_vars,
    term_str,
)


class Mode(enum.Enum):
    INTERPRETED = "interpreted"
    UNINTERPRETED = "uninterpreted"
    CONCRETE_ONLY = "concrete-only"


class RuleError(ValueError):
    """A rule or event violates a structural requirement."""


@dataclass(frozen=True)
class Hyp:
    term: Term
    syntaxp: bool = False


@dataclass(frozen=True)
class RewriteRule:
    name: Sym
    equiv: str  # "equal" | "iff"
    lhs: Call
    rhs: Term
    hyps: tuple[Hyp, ...] = ()

    @property
    def fn(self) -> Sym:
        return self.lhs.fn


@dataclass(frozen=True)
class BranchMergeRule:
    name: Sym
    test_var: Sym
    then_pattern: Call
    else_var: Sym
    rhs: Term

    @property
    def fn(self) -> Sym:
        return self.then_pattern.fn

    @property
    def lhs(self) -> Call:
        return Call(IF, (Var(self.test_var), self.then_pattern, Var(self.else_var)))


@dataclass(frozen=True)
class ConstraintRule:
    name: Sym
    bindings: tuple[tuple[Sym, Call], ...]
    body: Term


@dataclass(frozen=True)
class CtrexRule:
    name: Sym
    lhs: Term
    value_var: Sym
    target: Sym
    update: Term


@dataclass(frozen=True)
class RuleSet:
    rewrites: tuple[RewriteRule, ...] = ()
    merges: tuple[BranchMergeRule, ...] = ()
    constraints: tuple[ConstraintRule, ...] = ()


def _pattern_vars(t: Term) -> set[Sym]:
    return free_vars(t)


def _check_no_lambda(t: Term, what: str, name: Sym) -> None:
    match t:
        case LambdaCall():
            raise RuleError(f"{name.name}: {what} may not contain lambda applications")
        case Call(_, args):
            for a in args:
                _check_no_lambda(a, what, name)


@dataclass
class EventDB:
    defs: dict[Sym, Defn] = field(default_factory=dict)
    modes: dict[Sym, Mode] = field(default_factory=dict)
    rewrites: dict[Sym, list[RewriteRule]] = field(default_factory=dict)
    merges: dict[Sym, list[BranchMergeRule]] = field(default_factory=dict)
    constraints: list[ConstraintRule] = field(default_factory=list)
    constraint_index: dict[Sym, list[ConstraintRule]] = field(default_factory=dict)
    ctrex_rules: list[CtrexRule] = field(default_factory=list)

    def copy(self) -> "EventDB":
        return EventDB(
            dict(self.defs),
            dict(self.modes),
            {k: list(v) for k, v in self.rewrites.items()},
            {k: list(v) for k, v in self.merges.items()},
            list(self.constraints),
            {k: list(v) for k, v in self.constraint_index.items()},
            list(self.ctrex_rules),
        )

    # -- queries ------------------------------------------------------------

    def arity(self, fn: Sym) -> int | None:
        if fn in PRIMITIVE_ARITY:
            return PRIMITIVE_ARITY[fn]
        d = self.defs.get(fn)
        return None if d is None else len(d.formals)

    def mode(self, fn: Sym) -> Mode:
        return self.modes.get(fn, Mode.INTERPRETED)

    def rules_for(self, fn: Sym) -> RuleSet:
        return RuleSet(
            tuple(self.rewrites.get(fn, ())),
            tuple(self.merges.get(fn, ())),
            tuple(self.constraint_index.get(fn, ())),
        )

    def all_rewrites(self) -> list[RewriteRule]:
        return [r for rules in self.rewrites.values() for r in rules]

    def all_merges(self) -> list[BranchMergeRule]:
        return [r for rules in self.merges.values() for r in rules]

    # -- updates ------------------------------------------------------------

    def check_term(self, t: Term, where: str, allow: Iterable[tuple[Sym, int]] = ()) -> None:
        """Every function symbol must be known, with matching arity."""
        extra = dict(allow)

        def walk(x):
            match x:
                case Call(fn, args):
                    n = extra.get(fn, self.arity(fn))
                    if n is None:
                        raise RuleError(f"{where}: undefined function {fn.name}")
                    if n != len(args):
                        raise RuleError(
                            f"{where}: {fn.name} expects {n} arguments, got {len(args)}"
                        )
                    for a in args:
                        walk(a)
                case LambdaCall(_, body, args):
                    walk(body)
                    for a in args:
                        walk(a)

        walk(t)

    def add_defn(self, d: Defn) -> None:
        if d.name in PRIMITIVE_ARITY:
            raise RuleError(f"cannot redefine primitive {d.name.name}")
        extra = free_vars(d.body) - set(d.formals)
        if extra:
            raise RuleError(
                f"defun {d.name.name}: body mentions non-formals "
                + " ".join(sorted(v.name for v in extra))
            )
        self.check_term(d.body, f"defun {d.name.name}", allow=[(d.name, len(d.formals))])
        self.defs[d.name] = d

    def set_mode(self, fn: Sym, mode: Mode) -> None:
        if self.arity(fn) is None:
            raise RuleError(f"gl-set-uninterpreted: undefined function {fn.name}")
        self.modes[fn] = mode

    def add_rewrite(self, r: RewriteRule) -> None:
        where = f"rewrite rule {r.name.name}"
        if not isinstance(r.lhs, Call) or r.lhs.fn in (IF,):
            raise RuleError(f"{where}: left-hand side must be a function call other than if")
        if r.equiv not in ("equal", "iff"):
            raise RuleError(f"{where}: unknown equivalence {r.equiv}")
        _check_no_lambda(r.lhs, "left-hand side", r.name)
        lhs_vars = _pattern_vars(r.lhs)
        for t, what in [(r.rhs, "right-hand side")] + [(h.term, "hypothesis") for h in r.hyps]:
            missing = free_vars(t) - lhs_vars
            if missing:
                raise RuleError(
                    f"{where}: {what} has free variables not bound by the left-hand side: "
                    + " ".join(sorted(v.name for v in missing))
                )
        for t in [r.lhs, r.rhs] + [h.term for h in r.hyps]:
            self.check_term(t, where)
        self.rewrites.setdefault(r.fn, []).append(r)

    def add_merge(self, r: BranchMergeRule) -> None:
        where = f"branch merge rule {r.name.name}"
        if r.test_var == r.else_var:
            raise RuleError(f"{where}: test and else branch must be distinct variables")
        if not isinstance(r.then_pattern, Call) or r.then_pattern.fn is IF:
            raise RuleError(f"{where}: then branch must be a function call")
        _check_no_lambda(r.then_pattern, "then branch", r.name)
        lhs_vars = _pattern_vars(r.lhs)
        missing = free_vars(r.rhs) - lhs_vars
        if missing:
            raise RuleError(
                f"{where}: right-hand side has unbound variables "
                + " ".join(sorted(v.name for v in missing))
            )
        self.check_term(r.then_pattern, where)
        self.check_term(r.rhs, where)
        self.merges.setdefault(r.fn, []).append(r)

    def add_constraint(self, r: ConstraintRule) -> None:
        where = f"constraint rule {r.name.name}"
        names = [v for v, _ in r.bindings]
        if not names:
            raise RuleError(f"{where}: needs at least one binding")
        if len(set(names)) != len(names):
            raise RuleError(f"{where}: binding variables must be distinct")
        pattern_vars: set[Sym] = set()
        for v, pat in r.bindings:
            if not isinstance(pat, Call) or pat.fn is IF:
                raise RuleError(f"{where}: binding pattern for {v.name} must be a function call")
            _check_no_lambda(pat, "binding pattern", r.name)
            self.check_term(pat, where)
            pattern_vars |= _pattern_vars(pat)
        if set(names) & pattern_vars:
            raise RuleError(f"{where}: binding variables may not occur in patterns")
        body_vars = free_vars(r.body)
        unused = set(names) - body_vars
        if unused:
            raise RuleError(
                f"{where}: binding variables unused in body: "
                + " ".join(sorted(v.name for v in unused))
            )
        missing = body_vars - set(names) - pattern_vars
        if missing:
            raise RuleError(
                f"{where}: body has unbound variables " + " ".join(sorted(v.name for v in missing))
            )
        self.check_term(r.body, where)
        self.constraints.append(r)
        heads = []
        for _, pat in r.bindings:
            if pat.fn not in heads:
                heads.append(pat.fn)
        for fn in heads:
            self.constraint_index.setdefault(fn, []).append(r)

    def add_ctrex(self, r: CtrexRule) -> None:
        where = f"counterexample rule {r.name.name}"
        lhs_vars = _pattern_vars(r.lhs)
        if r.target not in lhs_vars:
            raise RuleError(f"{where}: target {r.target.name} does not occur in the pattern")
        if r.value_var in lhs_vars:
            raise RuleError(f"{where}: value variable may not occur in the pattern")
        missing = free_vars(r.update) - lhs_vars - {r.value_var}
        if missing:
            raise RuleError(
                f"{where}: update has unbound variables "
                + " ".join(sorted(v.name for v in missing))
            )
        self.check_term(r.lhs, where)
        self.check_term(r.update, where)
        self.ctrex_rules.append(r)

    def add_event(self, ev) -> "EventDB":
        """Add one parsed event (theorems and includes are not handled here)."""
        from .events import DefunEvent, RuleEvent, UninterpretedEvent

        match ev:
            case DefunEvent(defn=d):
                self.add_defn(d)
            case UninterpretedEvent(fn=fn, mode=mode):
                self.set_mode(fn, mode)
            case RuleEvent(rule=r):
                self.add_event(r)
            case RewriteRule():
                self.add_rewrite(ev)
            case BranchMergeRule():
                self.add_merge(ev)
            case ConstraintRule():
                self.add_constraint(ev)
            case CtrexRule():
                self.add_ctrex(ev)
            case _:
                raise RuleError(f"not a database event: {ev!r}")
        return self

    def dump(self) -> str:
        lines = []
        for fn in sorted(self.rewrites, key=lambda s: s.name):
            for r in self.rewrites[fn]:
                hyps = " ".join(
                    ("(syntaxp " + term_str(h.term) + ")") if h.syntaxp else term_str(h.term)
                    for h in r.hyps
                )
                lines.append(
                    f"rewrite {fn.name} {r.name.name} [{r.equiv}] {term_str(r.lhs)} -> "
                    f"{term_str(r.rhs)}" + (f" when {hyps}" if hyps else "")
                )
        for fn in sorted(self.merges, key=lambda s: s.name):
            for r in self.merges[fn]:
                lines.append(f"merge {fn.name} {r.name.name} {term_str(r.lhs)} -> {term_str(r.rhs)}")
        for r in self.constraints:
            binds = " ".join(f"({v.name} {term_str(p)})" for v, p in r.bindings)
            lines.append(f"constraint {r.name.name} ({binds}) {term_str(r.body)}")
        for r in self.ctrex_rules:
            lines.append(
                f"ctrex {r.name.name} ({term_str(r.lhs)} {r.value_var.name}) "
                f"-> ({r.target.name} {term_str(r.update)})"
            )
        for fn in sorted(self.modes, key=lambda s: s.name):
            if self.modes[fn] is not Mode.INTERPRETED:
                lines.append(f"mode {fn.name} {self.modes[fn].value}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Dynamic soundness harness: random-assignment checks of rule validity.

ValueGen = Callable[[random.Random, Sym], Value]


@dataclass
class SoundnessFailure:
    rule: Sym
    assignment: dict[Sym, Value]
    detail: str


def _equiv_holds(equiv: str, a: Value, b: Value) -> bool:
    if equiv == "iff":
        return (a is NIL) == (b is NIL)
    return a == b


def check_rule_soundness(
    db: EventDB,
    rule: RewriteRule | BranchMergeRule | ConstraintRule,
    gen: ValueGen,
    rng: random.Random,
    samples: int = 200,
) -> list[SoundnessFailure]:
    """Evaluate a rule's logical content under random assignments.

    syntaxp hypotheses are logically true and are skipped; rewrite rules
    whose ordinary hypotheses fail on a sample are vacuously satisfied.
    """
    failures: list[SoundnessFailure] = []
    if isinstance(rule, ConstraintRule):
        pvars: set[Sym] = set()
        for _, pat in rule.bindings:
            pvars |= free_vars(pat)
        variables = sorted(pvars, key=lambda s: s.name)
    elif isinstance(rule, BranchMergeRule):
        variables = sorted(free_vars(rule.lhs), key=lambda s: s.name)
    else:
        variables = sorted(free_vars(rule.lhs), key=lambda s: s.name)
    for _ in range(samples):
        env = {v: gen(rng, v) for v in variables}
        try:
            if isinstance(rule, RewriteRule):
                if all(
                    h.syntaxp or eval_term(h.term, env, db.defs) is not NIL for h in rule.hyps
                ):
                    lhs = eval_term(rule.lhs, env, db.defs)
                    rhs = eval_term(rule.rhs, env, db.defs)
                    if not _equiv_holds(rule.equiv, lhs, rhs):
                        failures.append(SoundnessFailure(rule.name, env, f"lhs={lhs} rhs={rhs}"))
            elif isinstance(rule, BranchMergeRule):
                lhs = eval_term(rule.lhs, env, db.defs)
                rhs = eval_term(rule.rhs, env, db.defs)
                if lhs != rhs:
                    failures.append(SoundnessFailure(rule.name, env, f"lhs={lhs} rhs={rhs}"))
            else:
                benv = dict(env)
                for v, pat in rule.bindings:
                    benv[v] = T if eval_term(pat, env, db.defs) is not NIL else NIL
                if eval_term(rule.body, benv, db.defs) is NIL:
                    failures.append(SoundnessFailure(rule.name, env, "body evaluated to nil"))
        except EvalError as exc:
            failures.append(SoundnessFailure(rule.name, env, f"evaluation error: {exc}"))
    return failures


def term_mentions(t: Term, fn: Sym) -> bool:
    return fn in fn_symbols(t)


__all__ = [
    "BranchMergeRule",
    "ConstraintRule",
    "CtrexRule",
    "EventDB",
    "Hyp",
    "Mode",
    "RewriteRule",
    "RuleError",
    "RuleSet",
    "check_rule_soundness",
]
