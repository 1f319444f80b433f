"""Parsing event files into typed events."""

from __future__ import annotations

from dataclasses import dataclass, field

from .ruledb import BranchMergeRule, ConstraintRule, CtrexRule, Hyp, Mode, RewriteRule
from .sexpr import NIL, T, Cons, ReadError, Sym, Value, is_proper_list, print_value, read_all, to_pylist
from .terms import (
    IF,
    Call,
    Defn,
    Term,
    TranslateError,
    free_vars_ordered,
    translate,
)

S = Sym


class EventError(ValueError):
    def __init__(self, msg: str, line: int = 0, path: str | None = None):
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {msg}")
        self.msg = msg
        self.line = line
        self.path = path


@dataclass(frozen=True)
class DefunEvent:
    defn: Defn
    line: int = 0


@dataclass(frozen=True)
class UninterpretedEvent:
    fn: Sym
    mode: Mode
    line: int = 0


@dataclass(frozen=True)
class RuleEvent:
    rule: RewriteRule | BranchMergeRule | ConstraintRule | CtrexRule
    line: int = 0


@dataclass(frozen=True)
class IncludeEvent:
    path: str
    line: int = 0


@dataclass(frozen=True)
class TheoremEvent:
    name: Sym
    hyp: Term
    concl: Term
    g_bindings: Value = NIL  # the raw form, evaluated when the proof starts
    expect: str = "prove"  # prove | fail | unverified
    cov_samples: int | None = None
    line: int = 0
    variables: tuple[Sym, ...] = field(default=())


Event = DefunEvent | UninterpretedEvent | RuleEvent | IncludeEvent | TheoremEvent

DEFUN = S("DEFUN")
DECLARE = S("DECLARE")
SYNTAXP = S("SYNTAXP")
IMPLIES = S("IMPLIES")
AND = S("AND")
EQUAL = S("EQUAL")
IFF = S("IFF")
LAMBDA = S("LAMBDA")

_IGNORED_THM_KEYS = {
    ":RULE-CLASSES",
    ":COV-THEORY-ADD",
    ":HYP-CLK",
    ":CONCL-CLK",
    ":TEST-SIDE-GOALS",
    ":DO-NOT-EXPAND",
    ":COV-HINTS",
}


def _keyword_args(items: list[Value], line: int, what: str) -> dict[str, Value]:
    if len(items) % 2:
        raise EventError(f"{what}: odd number of keyword arguments", line)
    out = {}
    for k, v in zip(items[::2], items[1::2]):
        if type(k) is not Sym or not k.is_keyword:
            raise EventError(f"{what}: expected a keyword, got {print_value(k)}", line)
        out[k.name] = v
    return out


def _name(x: Value, line: int, what: str) -> Sym:
    if type(x) is not Sym or x is T or x is NIL or x.is_keyword:
        raise EventError(f"{what}: expected a name, got {print_value(x)}", line)
    return x


def _tr(x: Value, line: int) -> Term:
    try:
        return translate(x)
    except TranslateError as exc:
        raise EventError(str(exc), line) from None


def _list(x: Value, line: int, what: str) -> list[Value]:
    if not is_proper_list(x):
        raise EventError(f"malformed {what}: {print_value(x)}", line)
    return to_pylist(x)


def _parse_defun(items, line) -> DefunEvent:
    if len(items) < 3:
        raise EventError("defun needs a name, formals and a body", line)
    name = _name(items[0], line, "defun")
    formals = _list(items[1], line, "formals")
    formals = tuple(_name(f, line, "defun formal") for f in formals)
    if len(set(formals)) != len(formals):
        raise EventError(f"defun {name.name}: duplicate formals", line)
    rest = items[2:]
    # skip doc strings and declare forms
    body_forms = [
        x for x in rest[:-1] if not (type(x) is str or (type(x) is Cons and x.car is DECLARE))
    ]
    if body_forms:
        raise EventError(f"defun {name.name}: unexpected forms before the body", line)
    body = _tr(rest[-1], line)
    return DefunEvent(Defn(name, formals, body), line)


def _parse_uninterpreted(items, line) -> UninterpretedEvent:
    if not items or len(items) > 2:
        raise EventError("gl-set-uninterpreted takes a function and an optional mode", line)
    fn = _name(items[0], line, "gl-set-uninterpreted")
    mode = Mode.UNINTERPRETED
    if len(items) == 2:
        m = items[1]
        if m is NIL:
            mode = Mode.INTERPRETED
        elif m is T:
            mode = Mode.UNINTERPRETED
        elif m == S(":CONCRETE-ONLY"):
            mode = Mode.CONCRETE_ONLY
        else:
            raise EventError(f"unknown uninterpreted mode {print_value(m)}", line)
    return UninterpretedEvent(fn, mode, line)


def _split_equiv(x: Value, line: int, what: str) -> tuple[str, Value, Value]:
    parts = _list(x, line, what)
    if len(parts) == 3 and parts[0] in (EQUAL, IFF):
        return ("equal" if parts[0] is EQUAL else "iff"), parts[1], parts[2]
    raise EventError(f"{what}: expected (equal lhs rhs) or (iff lhs rhs)", line)


def _parse_hyps(x: Value, line: int) -> tuple[Hyp, ...]:
    parts = _list(x, line, "hypothesis")
    if parts and parts[0] is AND:
        forms = parts[1:]
    else:
        forms = [x]
    hyps = []
    for h in forms:
        if type(h) is Cons and h.car is SYNTAXP:
            inner = _list(h, line, "syntaxp")
            if len(inner) != 2:
                raise EventError("syntaxp takes one argument", line)
            hyps.append(Hyp(_tr(inner[1], line), True))
        else:
            hyps.append(Hyp(_tr(h, line), False))
    return tuple(hyps)


def _parse_rewrite(items, line) -> RuleEvent:
    if len(items) < 2:
        raise EventError("def-gl-rewrite needs a name and a theorem", line)
    name = _name(items[0], line, "def-gl-rewrite")
    thm = items[1]
    parts = _list(thm, line, "rewrite theorem")
    hyps: tuple[Hyp, ...] = ()
    if parts and parts[0] is IMPLIES:
        if len(parts) != 3:
            raise EventError(f"{name.name}: implies takes two arguments", line)
        hyps = _parse_hyps(parts[1], line)
        thm = parts[2]
    equiv, lhs, rhs = _split_equiv(thm, line, f"rewrite rule {name.name}")
    lhs_t = _tr(lhs, line)
    if not isinstance(lhs_t, Call) or lhs_t.fn is IF:
        raise EventError(f"{name.name}: left-hand side must be a function call", line)
    return RuleEvent(RewriteRule(name, equiv, lhs_t, _tr(rhs, line), hyps), line)


def _parse_merge(items, line) -> RuleEvent:
    if len(items) < 2:
        raise EventError("def-gl-branch-merge needs a name and a theorem", line)
    name = _name(items[0], line, "def-gl-branch-merge")
    equiv, lhs, rhs = _split_equiv(items[1], line, f"branch merge rule {name.name}")
    if equiv != "equal":
        raise EventError(f"{name.name}: branch merge rules must use equal", line)
    parts = _list(lhs, line, "branch merge left-hand side")
    if len(parts) != 4 or parts[0] is not IF:
        raise EventError(f"{name.name}: left-hand side must be (if test then else)", line)
    test = _name(parts[1], line, f"{name.name} test")
    els = _name(parts[3], line, f"{name.name} else branch")
    then = _tr(parts[2], line)
    if not isinstance(then, Call):
        raise EventError(f"{name.name}: then branch must be a function call", line)
    return RuleEvent(BranchMergeRule(name, test, then, els, _tr(rhs, line)), line)


def _parse_constraint(items, line) -> RuleEvent:
    if not items:
        raise EventError("def-gl-boolean-constraint needs a name", line)
    name = _name(items[0], line, "def-gl-boolean-constraint")
    kws = _keyword_args(items[1:], line, name.name)
    if ":BINDINGS" not in kws or ":BODY" not in kws:
        raise EventError(f"{name.name}: needs :bindings and :body", line)
    bindings = []
    for b in _list(kws[":BINDINGS"], line, "bindings"):
        pair = _list(b, line, "binding")
        if len(pair) != 2:
            raise EventError(f"{name.name}: binding must be (var pattern)", line)
        pat = _tr(pair[1], line)
        if not isinstance(pat, Call):
            raise EventError(f"{name.name}: binding pattern must be a function call", line)
        bindings.append((_name(pair[0], line, "binding variable"), pat))
    return RuleEvent(ConstraintRule(name, tuple(bindings), _tr(kws[":BODY"], line)), line)


def _parse_ctrex(items, line, counter: list[int]) -> RuleEvent:
    if len(items) < 2:
        raise EventError("def-glcp-ctrex-rewrite needs (pattern var) and (target update)", line)
    lhs = _list(items[0], line, "counterexample rule left-hand side")
    rhs = _list(items[1], line, "counterexample rule update")
    if len(lhs) != 2 or len(rhs) != 2:
        raise EventError("counterexample rule parts must be two-element lists", line)
    pattern = _tr(lhs[0], line)
    value_var = _name(lhs[1], line, "counterexample value variable")
    target = _name(rhs[0], line, "counterexample target")
    update = _tr(rhs[1], line)
    counter[0] += 1
    head = pattern.fn.name if isinstance(pattern, Call) else "VAR"
    name = S(f"CTREX-{head}-{counter[0]}")
    return RuleEvent(CtrexRule(name, pattern, value_var, target, update), line)


def _parse_thm(items, line) -> TheoremEvent:
    if not items:
        raise EventError("def-gl-thm needs a name", line)
    name = _name(items[0], line, "def-gl-thm")
    kws = _keyword_args(items[1:], line, name.name)
    for k in kws:
        if k not in (":HYP", ":CONCL", ":G-BINDINGS", ":EXPECT", ":COV-SAMPLES") and (
            k not in _IGNORED_THM_KEYS
        ):
            raise EventError(f"{name.name}: unknown keyword {k}", line)
    if ":CONCL" not in kws:
        raise EventError(f"{name.name}: missing :concl", line)
    hyp = _tr(kws.get(":HYP", T), line)
    concl = _tr(kws[":CONCL"], line)
    expect = kws.get(":EXPECT", NIL)
    expect = "prove" if expect is NIL else (expect.name.lstrip(":").lower() if type(expect) is Sym else "")
    if expect not in ("prove", "fail", "unverified"):
        raise EventError(f"{name.name}: :expect must be prove, fail or unverified", line)
    cov = kws.get(":COV-SAMPLES")
    if cov is not None and (type(cov) is not int or cov < 0):
        raise EventError(f"{name.name}: :cov-samples must be a natural number", line)
    variables = []
    for t in (hyp, concl):
        for v in free_vars_ordered(t):
            if v not in variables:
                variables.append(v)
    return TheoremEvent(
        name,
        hyp,
        concl,
        kws.get(":G-BINDINGS", NIL),
        expect,
        cov,
        line,
        tuple(variables),
    )


def parse_events(text: str, path: str | None = None) -> list[Event]:
    """Parse event-file text into events, in source order."""
    try:
        forms = read_all(text)
    except ReadError as exc:
        raise EventError(f"read error at column {exc.col}: {exc}", exc.line, path) from None
    out: list[Event] = []
    counter = [0]
    for form, line in forms:
        try:
            ev = _parse_form(form, line, counter)
        except EventError as exc:
            if path and exc.path is None:
                raise EventError(exc.msg, exc.line or line, path) from None
            raise
        if ev is not None:
            out.append(ev)
    return out


def _parse_form(form: Value, line: int, counter: list[int]) -> Event | None:
    if type(form) is not Cons or type(form.car) is not Sym:
        raise EventError(f"not an event: {print_value(form)}", line)
    items = _list(form.cdr, line, "event")
    head = form.car.name
    match head:
        case "DEFUN":
            return _parse_defun(items, line)
        case "GL-SET-UNINTERPRETED":
            return _parse_uninterpreted(items, line)
        case "DEF-GL-REWRITE":
            return _parse_rewrite(items, line)
        case "DEF-GL-BRANCH-MERGE":
            return _parse_merge(items, line)
        case "DEF-GL-BOOLEAN-CONSTRAINT":
            return _parse_constraint(items, line)
        case "DEF-GLCP-CTREX-REWRITE":
            return _parse_ctrex(items, line, counter)
        case "DEF-GL-THM":
            return _parse_thm(items, line)
        case "INCLUDE-BOOK":
            if not items or type(items[0]) is not str:
                raise EventError("include-book needs a file name string", line)
            return IncludeEvent(items[0], line)
        case "IN-PACKAGE":
            return None
    raise EventError(f"unknown event {head}", line)
