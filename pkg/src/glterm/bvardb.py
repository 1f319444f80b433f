"""Generated Boolean variables: which object each one stands for, and the
constraints accumulated among them."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

from .bfr import TRUE, AigMan, Bfr
from .ruledb import ConstraintRule
from .sexpr import NIL, Sym
from .sobj import GApply, GBool, GVar, NodeEval, SObj, SymEnv, max_bool_var, print_obj, sym_eval, unify

log = logging.getLogger(__name__)

DEFAULT_TUPLE_CAP = 10000


class OrderingViolation(AssertionError):
    """An entry mentions a Boolean variable that is not lower than its own."""


@dataclass
class BvarDb:
    man: AigMan
    base: int
    entries: list[SObj] = field(default_factory=list)
    reverse: dict[SObj, int] = field(default_factory=dict)
    constraints: Bfr = TRUE
    instantiated: dict[Sym, set[tuple[int, ...]]] = field(default_factory=dict)
    tuple_cap: int = DEFAULT_TUPLE_CAP
    truncated: set[Sym] = field(default_factory=set)
    appends_checked: int = 0

    @property
    def next_index(self) -> int:
        return self.base + len(self.entries)

    def index_of(self, o: SObj) -> int | None:
        i = self.reverse.get(o)
        return None if i is None else self.base + i

    def entry(self, var: int) -> SObj:
        return self.entries[var - self.base]

    def lookup_or_add(self, o: SObj) -> tuple[Bfr, bool]:
        """Variable literal standing for ``o``; second result tells if it is new."""
        if not isinstance(o, (GApply, GVar)):
            raise TypeError(f"only call and variable objects get Boolean variables: {print_obj(o)}")
        i = self.reverse.get(o)
        if i is not None:
            return self.man.var(self.base + i), False
        v = self.next_index
        mx = max_bool_var(self.man, o)
        self.appends_checked += 1
        if mx >= v:
            raise OrderingViolation(
                f"object for variable {v} mentions variable {mx}: {print_obj(o)}"
            )
        self.reverse[o] = len(self.entries)
        self.entries.append(o)
        return self.man.var(v), True

    def add_constraint(self, b: Bfr) -> None:
        self.constraints = self.man.and_(self.constraints, b)

    def instantiate_constraints(
        self,
        rules: list[ConstraintRule],
        new_index: int,
        interp_body: Callable[[ConstraintRule, dict], Bfr],
    ) -> int:
        """Instantiate every rule with the new entry in some binding position.

        ``interp_body`` interprets a rule body under a substitution (binding
        variables mapped to their Boolean objects) and returns its Bfr. Returns
        the number of instances added.
        """
        added = 0
        new_obj = self.entry(new_index)
        for rule in rules:
            done = self.instantiated.setdefault(rule.name, set())
            n = len(rule.bindings)
            for pos in range(n):
                s0 = unify(rule.bindings[pos][1], new_obj)
                if s0 is None:
                    continue
                # entries that exist now; later additions trigger their own pass
                limit = self.next_index
                for tup, subst in self._extend(rule, pos, new_index, s0, 0, [None] * n, limit):
                    if tup in done:
                        continue
                    if len(done) >= self.tuple_cap:
                        if rule.name not in self.truncated:
                            self.truncated.add(rule.name)
                            log.warning(
                                "constraint rule %s: tuple cap %d reached, instances truncated",
                                rule.name.name,
                                self.tuple_cap,
                            )
                        break
                    done.add(tup)
                    bind = dict(subst)
                    for (bv, _), idx in zip(rule.bindings, tup):
                        bind[bv] = GBool(self.man.var(idx))
                    self.add_constraint(interp_body(rule, bind))
                    added += 1
        return added

    def _extend(self, rule, pos, new_index, subst, k, tup, limit):
        if k == len(rule.bindings):
            yield tuple(tup), subst
            return
        if k == pos:
            tup[k] = new_index
            yield from self._extend(rule, pos, new_index, subst, k + 1, tup, limit)
            return
        pat = rule.bindings[k][1]
        for idx in range(self.base, limit):
            s = unify(pat, self.entry(idx), subst)
            if s is not None:
                tup[k] = idx
                yield from self._extend(rule, pos, new_index, s, k + 1, tup, limit)

    # -- environments ----------------------------------------------------

    def extend_env_consistent(self, env: SymEnv, defs) -> SymEnv:
        """Set each generated variable, lowest first, to the truth of its object."""
        bools = {k: v for k, v in env.bools.items() if k < self.base}
        out = SymEnv(bools, dict(env.vars))
        for i, o in enumerate(self.entries):
            # fresh node evaluator each step: earlier entries just changed
            val = sym_eval(self.man, o, out, defs)
            bools[self.base + i] = val is not NIL
        return out

    def check_env_consistent(self, env: SymEnv, defs) -> bool:
        return not self.disagreements(env, defs)

    def disagreements(self, env: SymEnv, defs) -> list[tuple[int, SObj, bool, bool]]:
        """Entries whose variable differs from the truth of their object."""
        out = []
        be = NodeEval(self.man, env.bools)
        for i, o in enumerate(self.entries):
            want = sym_eval(self.man, o, env, defs, be) is not NIL
            have = bool(env.bools.get(self.base + i, False))
            if want != have:
                out.append((self.base + i, o, have, want))
        return out

    def dump(self) -> str:
        lines = [f"bvar-db base={self.base} entries={len(self.entries)}"]
        for i, o in enumerate(self.entries):
            lines.append(f"  {self.base + i}: {print_obj(o)}")
        size = len(self.man.cone([self.constraints])) if self.constraints > 1 else 0
        lines.append(f"  constraint nodes: {size}")
        return "\n".join(lines)
