"""Hash-consed AND-inverter graph.

A Bfr is an integer literal ``2*node + negated``. Node 0 is the constant
node, so literal 0 is false and literal 1 is true. Input nodes carry a
Boolean variable index; AND nodes carry two child literals whose nodes
always have smaller indices than the parent.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

FALSE = 0
TRUE = 1

Bfr = int
BoolEnv = Mapping[int, bool]


def is_const(a: Bfr) -> bool:
    return a < 2


def node_of(a: Bfr) -> int:
    return a >> 1


def is_neg(a: Bfr) -> bool:
    return bool(a & 1)


def bfr_not(a: Bfr) -> Bfr:
    return a ^ 1


class AigMan:
    def __init__(self):
        # per node: left/right child literal, or (-1, var) for inputs
        self.left: list[int] = [-1]
        self.right: list[int] = [-1]
        self.max_var: list[int] = [-1]
        self.unique: dict[tuple[int, int], int] = {}
        self.inputs: dict[int, int] = {}
        self.hits = 0

    def __len__(self) -> int:
        return len(self.left)

    @property
    def num_ands(self) -> int:
        return len(self.unique)

    def is_input(self, node: int) -> bool:
        return node > 0 and self.left[node] < 0

    def input_var(self, node: int) -> int:
        return self.right[node]

    def var(self, v: int) -> Bfr:
        """Literal of the input node for Boolean variable ``v``."""
        node = self.inputs.get(v)
        if node is None:
            if v < 0:
                raise ValueError("variable indices are nonnegative")
            node = len(self.left)
            self.left.append(-1)
            self.right.append(v)
            self.max_var.append(v)
            self.inputs[v] = node
        return node << 1

    def valid(self, a: Bfr) -> bool:
        return type(a) is int and 0 <= (a >> 1) < len(self.left)

    # -- construction ---------------------------------------------------

    def and_(self, a: Bfr, b: Bfr) -> Bfr:
        if a > b:
            a, b = b, a
        if a == FALSE:
            return FALSE
        if a == TRUE:
            return b
        if a == b:
            return a
        if a ^ 1 == b:
            return FALSE
        key = (a, b)
        node = self.unique.get(key)
        if node is not None:
            self.hits += 1
            return node << 1
        node = len(self.left)
        self.left.append(a)
        self.right.append(b)
        self.max_var.append(max(self.max_var[a >> 1], self.max_var[b >> 1]))
        self.unique[key] = node
        return node << 1

    def not_(self, a: Bfr) -> Bfr:
        return a ^ 1

    def or_(self, a: Bfr, b: Bfr) -> Bfr:
        return self.and_(a ^ 1, b ^ 1) ^ 1

    def xor(self, a: Bfr, b: Bfr) -> Bfr:
        if a == b:
            return FALSE
        if a ^ 1 == b:
            return TRUE
        return self.or_(self.and_(a, b ^ 1), self.and_(a ^ 1, b))

    def iff(self, a: Bfr, b: Bfr) -> Bfr:
        return self.xor(a, b) ^ 1

    def implies(self, a: Bfr, b: Bfr) -> Bfr:
        return self.or_(a ^ 1, b)

    def ite(self, c: Bfr, t: Bfr, e: Bfr) -> Bfr:
        if c == TRUE or t == e:
            return t
        if c == FALSE:
            return e
        if t == TRUE:
            return self.or_(c, e)
        if t == FALSE:
            return self.and_(c ^ 1, e)
        if e == TRUE:
            return self.or_(c ^ 1, t)
        if e == FALSE:
            return self.and_(c, t)
        if t == c:
            return self.or_(c, e)
        if e == c:
            return self.and_(c, t)
        return self.or_(self.and_(c, t), self.and_(c ^ 1, e))

    def and_all(self, lits: Iterable[Bfr]) -> Bfr:
        out = TRUE
        for a in lits:
            out = self.and_(out, a)
            if out == FALSE:
                break
        return out

    def or_all(self, lits: Iterable[Bfr]) -> Bfr:
        return self.and_all(a ^ 1 for a in lits) ^ 1

    # -- analysis -------------------------------------------------------

    def cone(self, roots: Iterable[Bfr]) -> list[int]:
        """Nodes reachable from ``roots``, in ascending (topological) order."""
        seen = set()
        stack = [r >> 1 for r in roots]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            if n > 0 and self.left[n] >= 0:
                stack.append(self.left[n] >> 1)
                stack.append(self.right[n] >> 1)
        return sorted(seen)

    def support(self, a: Bfr) -> set[int]:
        return {self.right[n] for n in self.cone([a]) if self.is_input(n)}

    def max_var_of(self, a: Bfr) -> int:
        """Largest input variable in the cone of ``a``; -1 when there is none."""
        return self.max_var[a >> 1]

    def eval_many(self, roots: list[Bfr], env: BoolEnv | Callable[[int], bool]) -> list[bool]:
        look = env if callable(env) else (lambda v: bool(env.get(v, False)))
        val: dict[int, bool] = {0: False}
        left, right = self.left, self.right
        for n in self.cone(roots):
            if n == 0:
                continue
            l = left[n]
            if l < 0:
                val[n] = look(right[n])
            else:
                r = right[n]
                val[n] = (val[l >> 1] ^ bool(l & 1)) and (val[r >> 1] ^ bool(r & 1))
        return [val[r >> 1] ^ bool(r & 1) for r in roots]

    def eval(self, a: Bfr, env: BoolEnv | Callable[[int], bool]) -> bool:
        if a < 2:
            return a == TRUE
        return self.eval_many([a], env)[0]

    def simulate(self, roots: list[Bfr], words: Mapping[int, int], width: int) -> list[int]:
        """Bit-parallel evaluation: each input gets a ``width``-bit pattern."""
        mask = (1 << width) - 1
        val: dict[int, int] = {0: 0}
        left, right = self.left, self.right
        for n in self.cone(roots):
            if n == 0:
                continue
            l = left[n]
            if l < 0:
                val[n] = words.get(right[n], 0) & mask
            else:
                r = right[n]
                lv = val[l >> 1] ^ (mask if l & 1 else 0)
                rv = val[r >> 1] ^ (mask if r & 1 else 0)
                val[n] = lv & rv
        return [val[r >> 1] ^ (mask if r & 1 else 0) for r in roots]

    def describe(self, a: Bfr) -> str:
        if a == TRUE:
            return "T"
        if a == FALSE:
            return "NIL"
        n = a >> 1
        body = f"x{self.right[n]}" if self.is_input(n) else f"n{n}"
        return ("~" if a & 1 else "") + body
