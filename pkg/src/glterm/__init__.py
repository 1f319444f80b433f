"""A term-level bit-blasting prover for a small Lisp-like term language."""

from .prover import ProofResult, ProveConfig, prelude_db, prove, run_file

__all__ = ["ProofResult", "ProveConfig", "prelude_db", "prove", "run_file"]
