"""Random generators: concrete values, well-formed records, and typed
conjectures over the shipped bit-operation and record theories."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cmp_to_key

from .sexpr import NIL, T, Cons, Sym, Value, compare_values, kw, lisp_list
from .terms import Call, Quote, Term, Var, call, mk_if, qint

DEFAULT_KEYS = (kw("a"), kw("b"), kw("c"), kw("fld"))


@dataclass
class Pools:
    """Constants harvested from a conjecture, mixed into generated values."""

    ints: list[int] = field(default_factory=lambda: [0, 1, -1, 2, 16])
    keys: list[Sym] = field(default_factory=lambda: list(DEFAULT_KEYS))
    syms: list[Sym] = field(default_factory=lambda: [NIL, T])


def pools_of(*terms: Term) -> Pools:
    p = Pools()

    def walk(t):
        match t:
            case Quote(v):
                take(v)
            case Call(_, args):
                for a in args:
                    walk(a)
            case _ if hasattr(t, "body"):
                walk(t.body)
                for a in t.args:
                    walk(a)

    def take(v):
        if type(v) is int:
            for k in (v, v - 1, v + 1, -v):
                if k not in p.ints:
                    p.ints.append(k)
        elif type(v) is Sym:
            if v.is_keyword and v not in p.keys:
                p.keys.append(v)
            elif v not in p.syms:
                p.syms.append(v)
        elif type(v) is Cons:
            take(v.car)
            take(v.cdr)

    for t in terms:
        walk(t)
    return p


def random_int(rng: random.Random, pools: Pools | None = None) -> int:
    r = rng.random()
    if pools is not None and r < 0.3:
        return rng.choice(pools.ints)
    width = rng.randint(1, 12)
    if r < 0.65:
        return rng.randrange(0, 1 << width)
    return rng.randrange(-(1 << width), 1 << width)


def sort_record(pairs: dict[Value, Value]) -> Value:
    keys = sorted(pairs, key=cmp_to_key(compare_values))
    return lisp_list(*(Cons(k, pairs[k]) for k in keys if pairs[k] is not NIL))


def random_record(
    rng: random.Random, pools: Pools | None = None, value=None, p_present: float = 0.7
) -> Value:
    """A well-formed record: keys in << order, no nil values."""
    keys = (pools or Pools()).keys
    value = value or (lambda r: random_int(r, pools))
    pairs = {}
    for k in keys:
        if rng.random() < p_present:
            v = value(rng)
            if v is not NIL:
                pairs[k] = v
    return sort_record(pairs)


def random_value(rng: random.Random, pools: Pools | None = None, depth: int = 3) -> Value:
    """Any value, weighted toward integers and records."""
    pools = pools or Pools()
    r = rng.random()
    if r < 0.35:
        return random_int(rng, pools)
    if r < 0.5:
        return rng.choice(pools.syms + pools.keys)
    if r < 0.55:
        return rng.choice(["", "ab", "x"])
    if r < 0.8:
        return random_record(rng, pools)
    if depth <= 0:
        return NIL
    return Cons(random_value(rng, pools, depth - 1), random_value(rng, pools, depth - 1))


def record_vars(*terms: Term) -> set[Sym]:
    """Variables used in the record position of g or s."""
    out: set[Sym] = set()
    g, s_ = Sym("G"), Sym("S")

    def walk(t):
        match t:
            case Call(fn, args):
                if fn is g and isinstance(args[1], Var):
                    out.add(args[1].name)
                if fn is s_ and isinstance(args[2], Var):
                    out.add(args[2].name)
                for a in args:
                    walk(a)
            case _ if hasattr(t, "body"):
                walk(t.body)
                for a in t.args:
                    walk(a)

    for t in terms:
        walk(t)
    return out


def sample_env(rng: random.Random, variables, pools: Pools, records: set[Sym]) -> dict[Sym, Value]:
    return {
        v: random_record(rng, pools) if v in records else random_value(rng, pools) for v in variables
    }


# ---------------------------------------------------------------------------
# Values chosen by variable name, for checking rules on random instances

_KEY_NAMES = {"K", "K1", "K2", "KEY", "FIELD", "DEST", "SRC1", "SRC2"}
_REC_NAMES = {"X", "Y", "R", "REC", "REC1", "REC2", "ST", "RECORD"}
_NAT_NAMES = {"N", "M", "C"}
_BOOL_NAMES = {"TEST", "B", "BIT0", "INTP", "ISZERO"}
_LIST_NAMES = {"LST", "KEYS"}


def value_for_name(rng: random.Random, name: Sym, pools: Pools | None = None) -> Value:
    """A value typed by the variable's conventional name."""
    pools = pools or Pools()
    n = name.name
    if n in _KEY_NAMES:
        return rng.choice(pools.keys)
    if n in _REC_NAMES:
        return random_record(rng, pools)
    if n in _NAT_NAMES:
        return rng.randrange(0, 12) if rng.random() < 0.9 else rng.choice([NIL, -3, T])
    if n in _BOOL_NAMES:
        return rng.choice([T, NIL])
    if n in _LIST_NAMES:
        return lisp_list(*rng.sample(pools.keys, rng.randint(0, len(pools.keys))))
    return random_value(rng, pools)


# ---------------------------------------------------------------------------
# Typed conjecture grammar

INT, BOOL, REC = "int", "bool", "rec"


@dataclass
class Conjecture:
    term: Term
    kind: str
    var_types: dict[Sym, str]


@dataclass
class ConjectureGen:
    """Random typed terms over the bit-operation and record vocabularies.

    ``bitops`` and ``records`` choose which function families appear.
    """

    rng: random.Random
    bitops: bool = True
    records: bool = True
    int_vars: tuple[Sym, ...] = (Sym("X"), Sym("Y"))
    bool_vars: tuple[Sym, ...] = (Sym("P"),)
    rec_vars: tuple[Sym, ...] = (Sym("R"), Sym("Q"))
    keys: tuple[Sym, ...] = (kw("a"), kw("b"), kw("c"))

    def conjecture(self, depth: int = 3) -> Conjecture:
        kinds = [BOOL, INT] + ([REC] if self.records else [])
        kind = self.rng.choice(kinds)
        t = self.gen(kind, depth)
        types: dict[Sym, str] = {}
        self._collect(t, types)
        return Conjecture(t, kind, types)

    def _collect(self, t: Term, types: dict[Sym, str]) -> None:
        match t:
            case Var(name):
                if name in self.int_vars:
                    types[name] = INT
                elif name in self.bool_vars:
                    types[name] = BOOL
                else:
                    types[name] = REC
            case Call(_, args):
                for a in args:
                    self._collect(a, types)

    def gen(self, kind: str, depth: int) -> Term:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.2:
            return self._leaf(kind)
        d = depth - 1
        if kind == INT:
            opts = [lambda: mk_if(self.gen(BOOL, d), self.gen(INT, d), self.gen(INT, d))]
            if self.bitops:
                opts += [
                    lambda: call("LOGHEAD", qint(rng.randint(0, 6)), self.gen(INT, d)),
                    lambda: call("LOGEXT", qint(rng.randint(1, 6)), self.gen(INT, d)),
                    lambda: call("LOGNOT", self.gen(INT, d)),
                    lambda: call("ASH", self.gen(INT, d), qint(rng.choice([-2, -1, 1]))),
                    lambda: call("BINARY-+", self.gen(INT, d), self.gen(INT, d)),
                    lambda: call("UNARY--", self.gen(INT, d)),
                    lambda: call("LOGCONS", qint(rng.randint(0, 1)), self.gen(INT, d)),
                    lambda: call("BOOL->BIT", self.gen(BOOL, d)),
                ]
            if self.records:
                opts.append(lambda: call("G", self._key(), self.gen(REC, d)))
            return rng.choice(opts)()
        if kind == BOOL:
            opts = [
                lambda: call("NOT", self.gen(BOOL, d)),
                lambda: mk_if(self.gen(BOOL, d), self.gen(BOOL, d), self.gen(BOOL, d)),
                lambda: call("EQUAL", self.gen(INT, d), self.gen(INT, d)),
                lambda: call("INTEGERP", self.gen(INT, d)),
            ]
            if self.bitops:
                opts += [
                    lambda: call("LOGBITP", qint(rng.randint(0, 5)), self.gen(INT, d)),
                    lambda: call("<", self.gen(INT, d), self.gen(INT, d)),
                ]
            if self.records:
                opts.append(lambda: call("EQUAL", self.gen(REC, d), self.gen(REC, d)))
            return rng.choice(opts)()
        # records
        opts = [
            lambda: call("S", self._key(), self.gen(INT, d), self.gen(REC, d)),
            lambda: mk_if(self.gen(BOOL, d), self.gen(REC, d), self.gen(REC, d)),
        ]
        return rng.choice(opts)()

    def _key(self) -> Term:
        return Quote(self.rng.choice(self.keys))

    def _leaf(self, kind: str) -> Term:
        rng = self.rng
        if kind == INT:
            if rng.random() < 0.25:
                return qint(rng.randint(-8, 20))
            return Var(rng.choice(self.int_vars))
        if kind == BOOL:
            if rng.random() < 0.2:
                return Quote(rng.choice([T, NIL]))
            if self.bitops and rng.random() < 0.5:
                return call("LOGBITP", qint(rng.randint(0, 5)), Var(rng.choice(self.int_vars)))
            return Var(rng.choice(self.bool_vars))
        if rng.random() < 0.15:
            return Quote(NIL)
        return Var(rng.choice(self.rec_vars))

    def assignment(self, types: dict[Sym, str], int_range: int | None = None) -> dict[Sym, Value]:
        """Values for each variable; integer variables sometimes get non-integers."""
        rng = self.rng
        pools = Pools(keys=list(self.keys))
        out: dict[Sym, Value] = {}
        for v, k in types.items():
            if k == INT:
                if int_range is not None:
                    out[v] = rng.randrange(-int_range, int_range)
                elif rng.random() < 0.15:
                    out[v] = rng.choice([NIL, T, kw("a"), Cons(1, 2)])
                else:
                    out[v] = random_int(rng, pools)
            elif k == BOOL:
                out[v] = rng.choice([T, NIL])
            else:
                out[v] = random_record(rng, pools)
        return out
