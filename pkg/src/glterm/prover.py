"""End-to-end proofs: load event files, run def-gl-thm events, report."""

from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

from .bfr import AigMan
from .bvardb import BvarDb
from .ctrex import Assignment, Verdict, model_to_assignment, verify_ctrex
from .evaluator import EvalError, eval_term
from .events import DefunEvent, EventError, IncludeEvent, RuleEvent, TheoremEvent, UninterpretedEvent, parse_events
from .interp import Interp, InterpError, Limits
from .ruledb import EventDB, RuleError
from .sat import Status, sat_check, to_dimacs
from .sexpr import NIL, Sym
from .shapespec import (
    CoverageReport,
    ShapeSpec,
    ShapeSpecError,
    check_indices,
    check_var_names,
    check_oblig_on,
    oblig_term,
    parse_g_bindings,
    spec_to_sobj,
)
from .sampling import pools_of, random_value, record_vars, sample_env
from .sobj import GApply, GCons, GIte, GVar, SObj, SymEnv
from .terms import Term, Var, term_str


PROVED = "PROVED"
FAILED = "FAILED"
FAILED_UNVERIFIED = "FAILED-UNVERIFIED"
UNKNOWN = "UNKNOWN"
EXPORTED = "EXPORTED"
ERROR = "ERROR"


@dataclass
class ProveConfig:
    sat_budget: int = 0  # conflicts for the final query; 0 means unlimited
    pathcond_budget: int = 1000
    max_depth: int = 1000
    backchain_depth: int = 100
    rewrite_steps: int = 10000
    seed: int = 0
    cov_samples: int = 64
    cov_attempts_per_sample: int = 400
    trace_rewrites: bool = False
    dump_bvar_db: bool = False
    print_rules: bool = False
    dimacs_dir: str | None = None
    export_only: bool = False
    ctrex_fuel: int = 20
    check_invariants: bool = True

    def limits(self) -> Limits:
        return Limits(self.max_depth, self.backchain_depth, self.pathcond_budget, self.rewrite_steps)


@dataclass
class ProofStats:
    aig_nodes: int = 0
    bvars: int = 0
    constraints: int = 0
    sat_conflicts: int = 0
    seconds: float = 0.0
    appends_checked: int = 0
    env_checks: int = 0


@dataclass
class ProofResult:
    name: Sym
    verdict: str
    detail: str = ""
    assignment: Assignment | None = None
    check: Verdict | None = None
    obligations: list[tuple[Sym, Term]] = field(default_factory=list)
    coverage: list[CoverageReport] = field(default_factory=list)
    stats: ProofStats = field(default_factory=ProofStats)
    expect: str = "prove"
    trace: list[str] = field(default_factory=list)
    bvar_dump: str = ""
    dimacs_path: str | None = None
    bindings: dict[Sym, SObj] = field(default_factory=dict)
    bvar_db: BvarDb | None = None

    @property
    def coverage_ok(self) -> bool:
        return all(r.ok for r in self.coverage)

    @property
    def success(self) -> bool:
        """Whether this result counts as success for the exit status."""
        if self.expect == "fail":
            return self.verdict == FAILED
        if self.expect == "unverified":
            return self.verdict == FAILED_UNVERIFIED
        return self.verdict == PROVED and self.coverage_ok or self.verdict == EXPORTED

    def report_lines(self) -> list[str]:
        lines = [f"theorem {self.name.name}: {self.verdict}" + (f" ({self.detail})" if self.detail else "")]
        if self.expect != "prove":
            lines.append(f"  expected {self.expect}: {'yes' if self.success else 'NOT MET'}")
        if self.assignment is not None:
            lines.append(f"  counterexample: {self.assignment.show() or '(no variables)'}")
            for term, val, why in self.assignment.unresolved:
                lines.append(f"  unresolved: {term} = {val}: {why}")
        if self.check is not None:
            lines.extend("  " + ln for ln in self.check.report_lines())
        for var, t in self.obligations:
            lines.append(f"  COVERAGE OBLIGATION for {var.name}:")
            lines.append(f"    {term_str(t)}")
        for r in self.coverage:
            lines.append(f"  coverage check {r.summary()}")
            for w in r.warnings:
                lines.append(f"    warning: {w}")
        if self.bvar_dump:
            lines.extend("  " + ln for ln in self.bvar_dump.splitlines())
        lines.extend("  trace: " + ln for ln in self.trace)
        return lines

    def summary(self) -> str:
        s = self.stats
        return (
            f"name={self.name.name} verdict={self.verdict} aig_nodes={s.aig_nodes} bvars={s.bvars} "
            f"constraints={s.constraints} sat_conflicts={s.sat_conflicts} seconds={s.seconds:.3f} "
            f"coverage={'ok' if self.coverage_ok else 'fail'}"
        )


# ---------------------------------------------------------------------------
# Proving


def theorem_bindings(thm: TheoremEvent, db: EventDB, man: AigMan) -> tuple[dict[Sym, ShapeSpec], dict[Sym, SObj], int]:
    """Shape specs, the objects they denote, and the first free Boolean index."""
    specs = parse_g_bindings(thm.g_bindings, db.defs) if thm.g_bindings is not NIL else {}
    base = check_indices(specs.values())
    check_var_names(specs.values(), [v for v in thm.variables if v not in specs])
    objs: dict[Sym, SObj] = {v: spec_to_sobj(s, man) for v, s in specs.items()}
    for v in thm.variables:
        objs.setdefault(v, GVar(v))
    return specs, objs, base


def prove(thm: TheoremEvent, db: EventDB, config: ProveConfig | None = None) -> ProofResult:
    config = config or ProveConfig()
    t0 = time.perf_counter()
    res = ProofResult(thm.name, ERROR, expect=thm.expect)
    try:
        _prove(thm, db, config, res)
    except (InterpError, EvalError, ShapeSpecError, RuleError, RecursionError) as exc:
        res.verdict = ERROR
        res.detail = f"{type(exc).__name__}: {exc}"
    res.stats.seconds = time.perf_counter() - t0
    return res


def _prove(thm: TheoremEvent, db: EventDB, config: ProveConfig, res: ProofResult) -> None:
    man = AigMan()
    specs, bindings, base = theorem_bindings(thm, db, man)
    res.bindings = bindings
    bvars = BvarDb(man, base)
    res.bvar_db = bvars
    rng = random.Random(config.seed)
    tracer: Callable[[str], None] | None = res.trace.append if config.trace_rewrites else None
    ip = Interp(db, man, bvars, config.limits(), tracer, rng)

    hyp = ip.test_of(thm.hyp, bindings)
    ip.pathcond = hyp
    concl = ip.test_of(thm.concl, bindings)
    query = man.and_(man.and_(hyp, bvars.constraints), concl ^ 1)

    st = res.stats
    st.aig_nodes = man.num_ands
    st.bvars = len(bvars.entries)
    st.constraints = ip.stats.constraint_instances
    st.appends_checked = bvars.appends_checked
    if config.dump_bvar_db:
        res.bvar_dump = bvars.dump()
    if config.check_invariants:
        _check_consistency(bvars, db, rng, res)

    if config.dimacs_dir:
        os.makedirs(config.dimacs_dir, exist_ok=True)
        text, _ = to_dimacs(man, [query])
        path = os.path.join(config.dimacs_dir, f"{thm.name.name.lower()}.cnf")
        with open(path, "w") as f:
            f.write(text)
        res.dimacs_path = path
    _coverage(thm, specs, db, config, res)
    if config.export_only:
        res.verdict = EXPORTED
        res.detail = res.dimacs_path or "no DIMACS directory given"
        return

    r = sat_check(man, query, limit=config.sat_budget)
    st.sat_conflicts = r.conflicts
    if r.status is Status.UNSAT:
        res.verdict = PROVED
        return
    if r.status is Status.UNKNOWN:
        res.verdict = UNKNOWN
        res.detail = f"SAT budget of {config.sat_budget} conflicts exhausted"
        return
    model = {v: bool(b) for v, b in r.model.items()}
    asg = model_to_assignment(man, model, bvars, bindings, db.ctrex_rules, db.defs, config.ctrex_fuel)
    verdict = verify_ctrex(asg, thm.hyp, thm.concl, bvars, db.defs, model)
    res.assignment = asg
    res.check = verdict
    res.verdict = FAILED if verdict.real else FAILED_UNVERIFIED


def _check_consistency(bvars: BvarDb, db: EventDB, rng: random.Random, res: ProofResult) -> None:
    """Extend a few random environments and confirm each is consistent."""
    for _ in range(3):
        shape = {i: rng.random() < 0.5 for i in range(bvars.base)}
        vars_ = {}
        for o in res.bindings.values():
            _collect_var_names(o, vars_, rng)
        try:
            env = bvars.extend_env_consistent(SymEnv(shape, vars_), db.defs)
        except EvalError:
            continue
        res.stats.env_checks += 1
        if not bvars.check_env_consistent(env, db.defs):
            raise InterpError("extended environment is not consistent (internal invariant violated)")


def _collect_var_names(o: SObj, out: dict, rng: random.Random) -> None:
    match o:
        case GVar(name):
            out.setdefault(name, random_value(rng))
        case GCons(a, d):
            _collect_var_names(a, out, rng)
            _collect_var_names(d, out, rng)
        case GIte(t, a, b):
            for x in (t, a, b):
                _collect_var_names(x, out, rng)
        case GApply(_, args):
            for x in args:
                _collect_var_names(x, out, rng)


def _coverage(thm: TheoremEvent, specs: dict[Sym, ShapeSpec], db: EventDB, config: ProveConfig, res: ProofResult) -> None:
    if not specs:
        return
    n = thm.cov_samples if thm.cov_samples is not None else config.cov_samples
    samples = coverage_samples(thm, db, n, config.seed, config.cov_attempts_per_sample)
    for var, s in specs.items():
        res.obligations.append((var, oblig_term(s, Var(var))))
        res.coverage.append(check_oblig_on(s, var, thm.hyp, samples, db.defs))


def coverage_samples(thm: TheoremEvent, db: EventDB, n: int, seed: int, attempts_per: int = 400) -> list[dict]:
    """Rejection-sample ``n`` assignments satisfying the hypothesis."""
    rng = random.Random(seed ^ 0x5EED)
    pools = pools_of(thm.hyp, thm.concl)
    recs = record_vars(thm.hyp, thm.concl)
    out: list[dict] = []
    for _ in range(max(n, 0) * attempts_per):
        if len(out) >= n:
            break
        env = sample_env(rng, thm.variables, pools, recs)
        try:
            if eval_term(thm.hyp, env, db.defs) is NIL:
                continue
        except EvalError:
            continue
        out.append(env)
    return out


# ---------------------------------------------------------------------------
# Loading files


class LoadError(RuntimeError):
    def __init__(self, msg: str, path: str | None = None, line: int = 0):
        where = f"{path or '<input>'}:{line}" if line else (path or "<input>")
        super().__init__(f"{where}: {msg}")
        self.path = path
        self.line = line


THEORIES_DIR = os.path.join(os.path.dirname(__file__), "theories")
_prelude_cache: EventDB | None = None


def prelude_db() -> EventDB:
    """A fresh copy of the database holding the prelude definitions."""
    global _prelude_cache
    if _prelude_cache is None:
        text = resources.files(__package__).joinpath("prelude.gl").read_text()
        db = EventDB()
        for ev in parse_events(text, "prelude.gl"):
            _apply(ev, db, "prelude.gl")
        _prelude_cache = db
    return _prelude_cache.copy()


def _apply(ev, db: EventDB, path: str | None) -> None:
    try:
        db.add_event(ev)
    except RuleError as exc:
        raise LoadError(str(exc), path, getattr(ev, "line", 0)) from None


def resolve_include(name: str, from_path: str | None) -> str:
    cands = [name] if name.endswith(".gl") else [name + ".gl", name]
    dirs = [os.path.dirname(os.path.abspath(from_path))] if from_path else [os.getcwd()]
    dirs.append(THEORIES_DIR)
    for d in dirs:
        for c in cands:
            p = os.path.join(d, c)
            if os.path.isfile(p):
                return p
    raise FileNotFoundError(f"include-book: cannot find {name}")


@dataclass
class FileReport:
    path: str
    results: list[ProofResult] = field(default_factory=list)
    error: str | None = None
    db: EventDB | None = None

    @property
    def status(self) -> int:
        if self.error is not None:
            return 2
        if any(r.verdict == ERROR for r in self.results):
            return 2
        return 0 if all(r.success for r in self.results) else 1


def load_text(
    text: str,
    db: EventDB,
    config: ProveConfig | None = None,
    path: str | None = None,
    on_result: Callable[[ProofResult], None] | None = None,
    _seen: set[str] | None = None,
) -> list[ProofResult]:
    """Process events in order; theorems are proved as they are reached."""
    config = config or ProveConfig()
    seen = _seen if _seen is not None else set()
    try:
        events = parse_events(text, path)
    except EventError as exc:
        raise LoadError(exc.msg, path, exc.line) from None
    results = []
    for ev in events:
        match ev:
            case IncludeEvent(name, line):
                try:
                    inc = resolve_include(name, path)
                except FileNotFoundError as exc:
                    raise LoadError(str(exc), path, line) from None
                if inc in seen:
                    continue
                seen.add(inc)
                with open(inc) as f:
                    results += load_text(f.read(), db, config, inc, on_result, seen)
            case TheoremEvent():
                r = prove(ev, db, config)
                results.append(r)
                if on_result:
                    on_result(r)
            case DefunEvent() | UninterpretedEvent() | RuleEvent():
                _apply(ev, db, path)
    return results


def load_file(path: str, db: EventDB | None = None, config: ProveConfig | None = None, on_result=None):
    db = db if db is not None else prelude_db()
    with open(path) as f:
        text = f.read()
    return db, load_text(text, db, config, path, on_result, {os.path.abspath(path)})


def run_file(path: str, config: ProveConfig | None = None, on_result=None) -> FileReport:
    rep = FileReport(path)
    try:
        def keep(r):
            rep.results.append(r)
            if on_result:
                on_result(r)

        rep.db = prelude_db()
        load_file(path, rep.db, config, keep)
    except (LoadError, OSError, UnicodeDecodeError) as exc:
        rep.error = str(exc)
    return rep

