import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from aig_gen import random_aig, truth_table_sat
from glterm.bfr import FALSE, TRUE, AigMan, bfr_not, is_const, is_neg, node_of
from glterm.sat import Solver, Status, luby, parse_dimacs, sat_check, to_dimacs, tseitin


def test_constant_folding():
    m = AigMan()
    a = m.var(0)
    assert m.and_(a, FALSE) == FALSE
    assert m.and_(a, TRUE) == a
    assert m.and_(a, a) == a
    assert m.and_(a, bfr_not(a)) == FALSE
    assert m.or_(a, bfr_not(a)) == TRUE
    assert m.num_ands == 0


def test_structural_hashing():
    m = AigMan()
    a, b = m.var(0), m.var(1)
    x = m.and_(a, b)
    assert m.and_(b, a) == x
    assert m.num_ands == 1
    keys = [(m.left[i], m.right[i]) for i in range(len(m)) if m.left[i] >= 0]
    assert len(keys) == len(set(keys))


def test_literal_encoding():
    m = AigMan()
    a = m.var(3)
    assert not is_const(a) and is_const(TRUE) and is_const(FALSE)
    assert is_neg(bfr_not(a)) and node_of(bfr_not(a)) == node_of(a)
    assert m.input_var(node_of(a)) == 3
    assert m.var(3) == a


def test_children_precede_parents():
    rng = random.Random(1)
    m, _ = random_aig(rng, 6, 200)
    for i in range(len(m)):
        if m.left[i] >= 0:
            assert node_of(m.left[i]) < i and node_of(m.right[i]) < i


@given(st.integers(0, 2**32), st.integers(1, 6))
def test_derived_ops_match_truth_tables(seed, n):
    rng = random.Random(seed)
    m = AigMan()
    vs = [m.var(i) for i in range(n)]
    a, b, c = (rng.choice(vs) ^ rng.randrange(2) for _ in range(3))
    ops = {
        "or": (m.or_(a, b), lambda x, y, z: x or y),
        "xor": (m.xor(a, b), lambda x, y, z: x != y),
        "iff": (m.iff(a, b), lambda x, y, z: x == y),
        "implies": (m.implies(a, b), lambda x, y, z: (not x) or y),
        "ite": (m.ite(a, b, c), lambda x, y, z: y if x else z),
    }
    for bits in itertools.product([False, True], repeat=n):
        env = dict(enumerate(bits))
        x, y, z = (m.eval(l, env) for l in (a, b, c))
        for name, (r, f) in ops.items():
            assert m.eval(r, env) == f(x, y, z), name


def test_simulation_agrees_with_eval():
    rng = random.Random(5)
    m, root = random_aig(rng, 6, 60)
    words = {v: rng.getrandbits(64) for v in range(6)}
    (sim,) = m.simulate([root], words, 64)
    for k in range(64):
        env = {v: bool((w >> k) & 1) for v, w in words.items()}
        assert bool((sim >> k) & 1) == m.eval(root, env)


@settings(max_examples=200)
@given(st.integers(0, 2**32), st.integers(1, 8), st.integers(1, 40))
def test_sat_check_matches_truth_table(seed, nvars, nops):
    m, root = random_aig(random.Random(seed), nvars, nops)
    r = sat_check(m, root)
    assert (r.status is Status.SAT) == truth_table_sat(m, root, nvars)
    if r.status is Status.SAT:
        assert m.eval(root, r.model)


def test_assumptions():
    m = AigMan()
    a, b = m.var(0), m.var(1)
    f = m.or_(a, b)
    assert sat_check(m, f, [bfr_not(a)]).value(1) is True
    assert sat_check(m, f, [bfr_not(a), bfr_not(b)]).status is Status.UNSAT


def pigeonhole(n_pigeons, n_holes):
    s = Solver(n_pigeons * n_holes)
    v = lambda p, h: p * n_holes + h + 1
    for p in range(n_pigeons):
        s.add_clause([v(p, h) for h in range(n_holes)])
    for h in range(n_holes):
        for p in range(n_pigeons):
            for q in range(p + 1, n_pigeons):
                s.add_clause([-v(p, h), -v(q, h)])
    return s


def test_pigeonhole_unsat_and_budget():
    assert pigeonhole(6, 5).solve() is Status.UNSAT
    assert pigeonhole(7, 6).solve(conflict_limit=10) is Status.UNKNOWN


def test_luby_sequence():
    assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_tseitin_is_equisatisfiable():
    rng = random.Random(11)
    for _ in range(50):
        m, root = random_aig(rng, 5, 25)
        cnf = tseitin(m, [root])
        s = Solver(cnf.nvars)
        for c in cnf.clauses:
            s.add_clause(c)
        s.add_clause([cnf.lit(root)])
        assert (s.solve() is Status.SAT) == truth_table_sat(m, root, 5)


def test_dimacs_round_trip_and_header():
    m = AigMan()
    a, b = m.var(0), m.var(1)
    text, varmap = to_dimacs(m, [m.and_(a, bfr_not(b))])
    nvars, clauses = parse_dimacs(text)
    assert text.splitlines()[-1 - len(clauses)].startswith("p cnf")
    assert nvars >= 3 and any(v.startswith("input") for v in varmap.values())
    assert to_dimacs(m, [TRUE])[0].endswith("p cnf 1 1\n-1 0\n")


def test_dimacs_agrees_with_external_solver():
    from pysat.solvers import Minisat22

    rng = random.Random(7)
    for _ in range(120):
        nvars = rng.randint(1, 10)
        m, root = random_aig(rng, nvars, rng.randint(1, 40))
        _, clauses = parse_dimacs(to_dimacs(m, [root])[0])
        with Minisat22(bootstrap_with=clauses) as ext:
            assert ext.solve() == (sat_check(m, root).status is Status.SAT)
