"""CDCL SAT solver and AIG-to-CNF conversion.

The solver uses two watched literals, first-UIP clause learning, Luby
restarts, phase saving and an activity-ordered decision heap. Literals
are DIMACS-style signed integers on the public interface.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field

from .bfr import FALSE, TRUE, AigMan, Bfr


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class Solver:
    """CDCL over variables 1..n. Clauses use DIMACS signed literals."""

    def __init__(self, nvars: int = 0):
        self.n = 0
        self.value: list[int] = [-1]  # per var: -1 unassigned, else 0/1
        self.level: list[int] = [0]
        self.reason: list[list[int] | None] = [None]
        self.activity: list[float] = [0.0]
        self.phase: list[int] = [0]
        self.watches: dict[int, list[list[int]]] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.ensure_vars(nvars)

    def ensure_vars(self, n: int) -> None:
        while self.n < n:
            self.n += 1
            v = self.n
            self.value.append(-1)
            self.level.append(0)
            self.reason.append(None)
            self.activity.append(0.0)
            self.phase.append(0)
            self.watches[v] = []
            self.watches[-v] = []
            heapq.heappush(self.heap, (0.0, v))

    def lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        if v < 0:
            return -1
        return v if lit > 0 else 1 - v

    def add_clause(self, lits) -> bool:
        if not self.ok:
            return False
        assert not self.trail_lim, "clauses are added at decision level 0"
        seen = set()
        out = []
        for lit in lits:
            if lit == 0:
                raise ValueError("0 is not a literal")
            self.ensure_vars(abs(lit))
            if -lit in seen:
                return True  # tautology
            if lit in seen:
                continue
            val = self.lit_value(lit)
            if val == 1:
                return True
            if val == 0:
                continue  # false at level 0
            seen.add(lit)
            out.append(lit)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self.clauses.append(out)
        self._watch(out)
        return True

    def _watch(self, c: list[int]) -> None:
        self.watches[-c[0]].append(c)
        self.watches[-c[1]].append(c)

    def _enqueue(self, lit: int, reason) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else 0
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        value = self.value
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            # clauses watching -lit (now false) are stored under key lit
            ws = self.watches[lit]
            i = j = 0
            n = len(ws)
            false_lit = -lit
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)]
                if fv >= 0 and (fv if first > 0 else 1 - fv) == 1:
                    ws[j] = c
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    q = c[k]
                    qv = value[abs(q)]
                    if qv < 0 or (qv if q > 0 else 1 - qv) == 1:
                        c[1], c[k] = q, false_lit
                        self.watches[-q].append(c)
                        found = True
                        break
                if found:
                    continue
                ws[j] = c
                j += 1
                if fv >= 0:  # first is false too: conflict
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    self.qhead = len(self.trail)
                    return c
                self._enqueue(first, c)
            del ws[j:]
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.n + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1) if self.value[u] < 0]
            heapq.heapify(self.heap)
        elif self.value[v] < 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = [False] * (self.n + 1)
        learnt = [0]
        counter = 0
        cur_level = len(self.trail_lim)
        idx = len(self.trail) - 1
        p = None
        clause = confl
        while True:
            for q in clause:
                if p is not None and q == p:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(p)]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        # second watch goes to the literal with the highest level
        best = max(range(1, len(learnt)), key=lambda k: self.level[abs(learnt[k])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        for k in range(len(self.trail) - 1, stop - 1, -1):
            lit = self.trail[k]
            v = abs(lit)
            self.phase[v] = 1 if lit > 0 else 0
            self.value[v] = -1
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.value[v] < 0:
                return v
        return 0

    def solve(self, assumptions=(), conflict_limit: int = 0) -> Status:
        """Search for a model; conflict_limit 0 means unlimited."""
        if not self.ok:
            return Status.UNSAT
        for a in assumptions:
            self.ensure_vars(abs(a))
        if self._propagate() is not None:
            self.ok = False
            return Status.UNSAT
        budget_start = self.conflicts
        restart_no = 1
        restart_left = 100 * luby(restart_no)
        assumptions = list(assumptions)
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                restart_left -= 1
                if not self.trail_lim:
                    self.ok = False
                    return Status.UNSAT
                learnt, back = self._analyze(confl)
                # never backjump into the middle of the assumption prefix
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self._watch(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= 0.95
                if conflict_limit and self.conflicts - budget_start >= conflict_limit:
                    self._cancel_until(0)
                    return Status.UNKNOWN
                continue
            if restart_left <= 0:
                restart_no += 1
                restart_left = 100 * luby(restart_no)
                self._cancel_until(0)
                continue
            # assumptions occupy the first decision levels
            lvl = len(self.trail_lim)
            if lvl < len(assumptions):
                a = assumptions[lvl]
                val = self.lit_value(a)
                if val == 0:
                    self._cancel_until(0)
                    return Status.UNSAT
                self.trail_lim.append(len(self.trail))
                if val < 0:
                    self._enqueue(a, None)
                continue
            v = self._pick()
            if v == 0:
                return Status.SAT
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(v if self.phase[v] else -v, None)

    def model(self) -> dict[int, bool]:
        return {v: self.value[v] == 1 for v in range(1, self.n + 1)}


# ---------------------------------------------------------------------------
# AIG to CNF


@dataclass
class Cnf:
    nvars: int
    clauses: list[list[int]]
    node_var: dict[int, int]  # AIG node -> CNF variable
    input_var: dict[int, int] = field(default_factory=dict)  # AIG input index -> CNF variable

    def lit(self, a: Bfr) -> int:
        v = self.node_var[a >> 1]
        return -v if a & 1 else v


def tseitin(m: AigMan, roots: list[Bfr]) -> Cnf:
    """Encode the cones of ``roots``; roots are not asserted."""
    node_var: dict[int, int] = {}
    input_var: dict[int, int] = {}
    clauses: list[list[int]] = []
    seen_clauses: set[tuple[int, ...]] = set()

    def add(c):
        key = tuple(sorted(c))
        if key not in seen_clauses:
            seen_clauses.add(key)
            clauses.append(c)

    for n in m.cone(roots):
        node_var[n] = len(node_var) + 1
        if n == 0:
            add([-node_var[0]])  # the constant node is false
        elif m.is_input(n):
            input_var[m.input_var(n)] = node_var[n]
        else:
            x = node_var[n]
            l, r = m.left[n], m.right[n]
            lv = -node_var[l >> 1] if l & 1 else node_var[l >> 1]
            rv = -node_var[r >> 1] if r & 1 else node_var[r >> 1]
            add([-x, lv])
            add([-x, rv])
            add([x, -lv, -rv])
    return Cnf(len(node_var), clauses, node_var, input_var)


@dataclass
class SatResult:
    status: Status
    model: dict[int, bool] = field(default_factory=dict)  # AIG input index -> value
    conflicts: int = 0

    def value(self, v: int) -> bool:
        return self.model.get(v, False)


def sat_check(m: AigMan, a: Bfr, assumptions: list[Bfr] = (), limit: int = 0) -> SatResult:
    """Is ``a`` satisfiable together with all ``assumptions``?

    Unassigned and unmentioned inputs are false in the returned model.
    """
    roots = [a, *assumptions]
    if FALSE in roots:
        return SatResult(Status.UNSAT)
    live = [r for r in roots if r != TRUE]
    if not live:
        return SatResult(Status.SAT, {})
    cnf = tseitin(m, live)
    s = Solver(cnf.nvars)
    for c in cnf.clauses:
        s.add_clause(c)
    for r in live:
        s.add_clause([cnf.lit(r)])
    st = s.solve(conflict_limit=limit)
    if st is not Status.SAT:
        return SatResult(st, {}, s.conflicts)
    values = s.value
    model = {inp: values[v] == 1 for inp, v in cnf.input_var.items()}
    return SatResult(Status.SAT, model, s.conflicts)


def to_dimacs(m: AigMan, roots: list[Bfr]) -> tuple[str, dict[int, str]]:
    """DIMACS CNF asserting every root, plus a map from DIMACS var to AIG entity.

    Map values are ``"input <k>"`` for AIG input variable k and ``"node <n>"``
    for internal nodes.
    """
    cnf = tseitin(m, list(roots))
    clauses = [list(c) for c in cnf.clauses]
    present = {tuple(sorted(c)) for c in clauses}
    for r in roots:
        unit = [cnf.lit(r)]
        if tuple(unit) not in present:
            present.add(tuple(unit))
            clauses.append(unit)
    varmap = {}
    for n, v in cnf.node_var.items():
        varmap[v] = f"input {m.input_var(n)}" if m.is_input(n) else f"node {n}"
    lines = [f"p cnf {cnf.nvars} {len(clauses)}"]
    for inp in sorted(cnf.input_var):
        lines.insert(len(lines) - 1, f"c input {inp} = {cnf.input_var[inp]}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in clauses)
    return "\n".join(lines) + "\n", varmap


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    nvars = 0
    clauses: list[list[int]] = []
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            nvars = int(line.split()[2])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(x)
    return nvars, clauses
