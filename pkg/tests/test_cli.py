import glob
import json
import os
import random

import pytest
from pysat.formula import CNF
from pysat.solvers import Minisat22

from conftest import CORPUS
from glterm.cli import main
from glterm.evaluator import EvalError, eval_term
from glterm.events import TheoremEvent, parse_events
from glterm.prover import PROVED, ProveConfig, run_file
from glterm.sampling import pools_of, record_vars, sample_env
from glterm.sexpr import NIL

CORPUS_FILES = sorted(glob.glob(os.path.join(CORPUS, "*.gl")))


def corpus(name):
    return os.path.join(CORPUS, name)


@pytest.mark.parametrize("path", CORPUS_FILES, ids=os.path.basename)
def test_corpus_files_succeed(path):
    rep = run_file(path, ProveConfig())
    assert rep.error is None
    assert rep.status == 0, [r.report_lines() for r in rep.results]


def test_error_reports_file_and_line(tmp_path, capsys):
    p = tmp_path / "bad.gl"
    p.write_text("(defun f (x) x)\n\n(defun g (x) (no-such-fn x))\n")
    assert main(["prove", str(p)]) == 2
    out = capsys.readouterr().out
    assert f"{p}:3" in out


def test_missing_include(tmp_path, capsys):
    p = tmp_path / "inc.gl"
    p.write_text('(include-book "nowhere")\n')
    assert main(["prove", str(p)]) == 2


def test_expectation_not_met_gives_status_1(tmp_path, capsys):
    p = tmp_path / "false.gl"
    p.write_text("(gl::def-gl-thm wrong :hyp t :concl (equal (loghead 2 x) 0))\n")
    assert main(["prove", str(p)]) == 1
    assert "FAILED" in capsys.readouterr().out


def test_summary_and_dump_flags(capsys):
    assert main(["prove", "--summary", "--dump-bvar-db", corpus("loghead-lognot.gl")]) == 0
    out = capsys.readouterr().out
    assert "verdict=PROVED" in out and "bvars=5" in out
    assert "bvar-db base=" in out


def test_print_rules_and_trace(capsys):
    assert main(["prove", "--print-rules", "--trace-rewrites", corpus("records-thms.gl")]) == 0
    out = capsys.readouterr().out
    assert "G-OF-S-CASESPLIT" in out
    assert "trace:" in out


def test_dimacs_export_agrees_with_external_solver(tmp_path, capsys):
    d = tmp_path / "cnf"
    assert main(["prove", "--dimacs-dir", str(d), corpus("loghead-lognot.gl"), corpus("logext-ctrex.gl")]) == 0
    expected = {"lognot-lognot-loghead.cnf": False, "minus-logext-minus-loghead-is-logext-loghead.cnf": True}
    assert sorted(os.listdir(d)) == sorted(expected)
    for name, sat in expected.items():
        with Minisat22(bootstrap_with=CNF(from_file=str(d / name)).clauses) as s:
            assert s.solve() == sat


def test_export_only(tmp_path, capsys):
    d = tmp_path / "cnf"
    assert main(["prove", "--export-only", "--dimacs-dir", str(d), corpus("loghead-lognot.gl")]) == 0
    assert "EXPORTED" in capsys.readouterr().out
    assert os.listdir(d)


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"cov_samples": 8, "seed": 7}))
    assert main(["prove", "--config", str(cfg), corpus("plus-c-a-b.gl")]) == 0
    assert "passed=8" in capsys.readouterr().out
    cfg.write_text(json.dumps({"no_such_key": 1}))
    assert main(["prove", "--config", str(cfg), corpus("empty.gl")]) == 2


def test_sat_budget_gives_unknown(capsys):
    assert main(["prove", "--sat-budget", "1", "--summary", corpus("integerp-forward-chain.gl")]) == 1
    assert "verdict=UNKNOWN" in capsys.readouterr().out
    assert main(["prove", "--sat-budget", "0", "--summary", corpus("integerp-forward-chain.gl")]) == 0


def test_jobs_matches_serial(capsys):
    files = [corpus("loghead-lognot.gl"), corpus("records-thms.gl"), corpus("empty.gl")]
    assert main(["prove", "--summary", *files]) == 0
    serial = [ln.split(" seconds=")[0] for ln in capsys.readouterr().out.splitlines()]
    assert main(["prove", "--summary", "--jobs", "2", *files]) == 0
    par = [ln.split(" seconds=")[0] for ln in capsys.readouterr().out.splitlines()]
    assert serial == par


def test_proved_theorems_hold_on_random_assignments():
    rng = random.Random(11)
    checked = 0
    for path in CORPUS_FILES:
        rep = run_file(path, ProveConfig())
        with open(path) as f:
            thms = [e for e in parse_events(f.read(), path) if isinstance(e, TheoremEvent)]
        for r, thm in zip(rep.results, thms):
            assert r.name is thm.name
            if r.verdict != PROVED:
                continue
            pools = pools_of(thm.hyp, thm.concl)
            recs = record_vars(thm.hyp, thm.concl)
            for _ in range(100):
                env = sample_env(rng, thm.variables, pools, recs)
                try:
                    if eval_term(thm.hyp, env, rep.db.defs) is NIL:
                        continue
                    assert eval_term(thm.concl, env, rep.db.defs) is not NIL, (thm.name, env)
                except EvalError:
                    continue
                checked += 1
    assert checked > 200
