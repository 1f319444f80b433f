"""Turning SAT models into concrete counterexamples.

A model assigns values to generated Boolean variables. Each variable stands
for a term-level object; rendering that object yields a term, and the pair
(term, value) is pushed down onto the theorem's variables by counterexample
rules. The result is always re-checked against the original conjecture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .bfr import AigMan
from .bvardb import BvarDb
from .evaluator import EvalError, eval_term
from .ruledb import CtrexRule
from .sexpr import NIL, T, Cons, Sym, Value, print_value
from .sobj import GApply, GBool, GConcrete, GCons, GInt, GIte, GVar, NodeEval, SObj, SymEnv, bits_to_int, print_obj, sym_eval
from .terms import CONS, Call, Quote, Term, Var, term_str

DEFAULT_FUEL = 20


def render(o: SObj, be: NodeEval) -> Term:
    """A term for ``o`` with Boolean leaves fixed by ``be`` and variables kept."""
    match o:
        case GConcrete(v):
            return Quote(v)
        case GBool(b):
            return Quote(T if be(b) else NIL)
        case GInt(bits):
            return Quote(bits_to_int([be(b) for b in bits]))
        case GCons(a, d):
            ra, rd = render(a, be), render(d, be)
            if isinstance(ra, Quote) and isinstance(rd, Quote):
                return Quote(Cons(ra.value, rd.value))
            return Call(CONS, (ra, rd))
        case GIte(t, a, b):
            rt = render(t, be)
            if isinstance(rt, Quote):
                return render(a, be) if rt.value is not NIL else render(b, be)
            return Call(Sym("IF"), (rt, render(a, be), render(b, be)))
        case GApply(fn, args):
            return Call(fn, tuple(render(x, be) for x in args))
        case GVar(name):
            return Var(name)
    raise TypeError(f"not a symbolic object: {o!r}")


@dataclass(frozen=True)
class PendingEq:
    term: Term
    value: Value


@dataclass
class Assignment:
    vars: dict[Sym, Value] = field(default_factory=dict)  # theorem variables
    env_vars: dict[Sym, Value] = field(default_factory=dict)  # term-level variable objects
    log: list[tuple[str, str, str]] = field(default_factory=list)
    unresolved: list[tuple[str, str, str]] = field(default_factory=list)

    def show(self) -> str:
        return " ".join(f"{k.name}={print_value(v)}" for k, v in self.vars.items())


def _match(p: Term, t: Term, s: dict[Sym, Term]) -> bool:
    """First-order matching of a rule pattern against a rendered term."""
    match p:
        case Var(name):
            have = s.get(name)
            if have is None:
                s[name] = t
                return True
            return have == t
        case Quote(v):
            return isinstance(t, Quote) and t.value == v
        case Call(fn, args):
            if not isinstance(t, Call) or t.fn is not fn or len(t.args) != len(args):
                return False
            return all(_match(a, b, s) for a, b in zip(args, t.args))
    return False


def match_pattern(p: Term, t: Term) -> dict[Sym, Term] | None:
    s: dict[Sym, Term] = {}
    return s if _match(p, t, s) else None


def apply_ctrex_rules(
    eq: PendingEq,
    asg: Assignment,
    rules: list[CtrexRule],
    defs,
    fuel: int = DEFAULT_FUEL,
) -> Assignment:
    """Resolve one equation, updating ``asg`` in place (also returned)."""
    shown = (term_str(eq.term), print_value(eq.value))
    while True:
        if isinstance(eq.term, Var):
            asg.env_vars[eq.term.name] = eq.value
            asg.log.append((*shown, f"{eq.term.name.name} := {print_value(eq.value)}"))
            return asg
        if fuel <= 0:
            asg.unresolved.append((*shown, "fuel exhausted (possible rule loop)"))
            return asg
        for rule in rules:
            s = match_pattern(rule.lhs, eq.term)
            if s is None:
                continue
            target = s.get(rule.target)
            if target is None:
                continue
            try:
                env = dict(asg.env_vars)
                for k, sub in s.items():
                    env[k] = eval_term(sub, asg.env_vars, defs)
                env[rule.value_var] = eq.value
                new_val = eval_term(rule.update, env, defs)
            except EvalError as exc:
                asg.unresolved.append((*shown, f"{rule.name.name}: evaluation failed: {exc}"))
                return asg
            asg.log.append((*shown, f"{rule.name.name}: {term_str(target)} <- {print_value(new_val)}"))
            eq = PendingEq(target, new_val)
            fuel -= 1
            break
        else:
            asg.unresolved.append((*shown, "no counterexample rule matches"))
            return asg


def model_to_assignment(
    man: AigMan,
    model: Mapping[int, bool],
    bvars: BvarDb,
    bindings: Mapping[Sym, SObj],
    rules: list[CtrexRule],
    defs,
    fuel: int = DEFAULT_FUEL,
) -> Assignment:
    """Concrete theorem-variable values suggested by a SAT model."""
    be = NodeEval(man, model)
    asg = Assignment()
    names: list[Sym] = []
    for o in bindings.values():
        _var_names(o, names)
    for n in names:
        asg.env_vars[n] = NIL
    for i, o in enumerate(bvars.entries):
        val = T if model.get(bvars.base + i, False) else NIL
        try:
            term = render(o, be)
        except EvalError as exc:
            asg.unresolved.append((print_obj(o), print_value(val), f"render failed: {exc}"))
            continue
        apply_ctrex_rules(PendingEq(term, val), asg, rules, defs, fuel)
    env = SymEnv(model, asg.env_vars)
    for v, o in bindings.items():
        try:
            asg.vars[v] = sym_eval(man, o, env, defs, be)
        except EvalError as exc:
            asg.vars[v] = NIL
            asg.unresolved.append((v.name, "", f"binding evaluation failed: {exc}"))
    return asg


def _var_names(o: SObj, out: list[Sym]) -> None:
    match o:
        case GVar(name):
            if name not in out:
                out.append(name)
        case GCons(a, d):
            _var_names(a, out)
            _var_names(d, out)
        case GIte(t, a, b):
            for x in (t, a, b):
                _var_names(x, out)
        case GApply(_, args):
            for x in args:
                _var_names(x, out)


@dataclass
class Verdict:
    real: bool
    reason: str
    hyp_value: Value = NIL
    concl_value: Value = NIL
    disagreements: list[tuple[int, str, bool, bool]] = field(default_factory=list)

    def report_lines(self) -> list[str]:
        lines = [f"verdict: {'real counterexample' if self.real else 'false counterexample'} ({self.reason})"]
        for var, obj, model_val, eval_val in self.disagreements:
            lines.append(
                f"  bvar {var} {obj}: model {'T' if model_val else 'NIL'}, "
                f"evaluates to {'T' if eval_val else 'NIL'}"
            )
        return lines


def verify_ctrex(
    asg: Assignment,
    hyp: Term,
    concl: Term,
    bvars: BvarDb,
    defs,
    model: Mapping[int, bool] | None = None,
) -> Verdict:
    """Check the candidate against the conjecture and compare it with the model."""
    diffs: list[tuple[int, str, bool, bool]] = []
    if model is not None:
        try:
            shape_bits = {k: v for k, v in model.items() if k < bvars.base}
            ext = bvars.extend_env_consistent(SymEnv(shape_bits, asg.env_vars), defs)
            for i, o in enumerate(bvars.entries):
                k = bvars.base + i
                m, e = bool(model.get(k, False)), bool(ext.bools.get(k, False))
                if m != e:
                    diffs.append((k, term_str(render(o, NodeEval(bvars.man, model))), m, e))
        except EvalError as exc:
            diffs.append((-1, f"evaluation failed: {exc}", False, False))
    try:
        h = eval_term(hyp, asg.vars, defs)
        c = eval_term(concl, asg.vars, defs) if h is not NIL else T
    except EvalError as exc:
        return Verdict(False, f"evaluation failed: {exc}", disagreements=diffs)
    if h is NIL:
        return Verdict(False, "hypothesis is false under the assignment", h, NIL, diffs)
    if c is not NIL:
        return Verdict(False, "conclusion holds under the assignment", h, c, diffs)
    return Verdict(True, "hypothesis true, conclusion false", h, c, diffs)

