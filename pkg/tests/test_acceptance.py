"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Criteria 1-7 run the deterministic battery from mismatchkl.selftest at the
default seed; criterion 8 drives the CLI end to end.
"""

import subprocess
import sys
import time

import pytest

from mismatchkl.selftest import (
    DEFAULT_SEED,
    criterion_lemma_binomial,
    criterion_lemma_negbinomial,
    criterion_mc_cross_validation,
    criterion_monotonicity,
    criterion_theorem_binomial,
    criterion_theorem_negbinomial,
    criterion_worked_example,
)


def _report(result, elapsed, budget):
    status = "PASS" if result.passed else "FAIL"
    print(
        f"\ncriterion {result.index} [{result.name}]: {status} "
        f"({result.detail}; {elapsed:.1f}s / budget {budget:.0f}s)"
    )
    assert result.passed, result.detail
    assert elapsed < budget, f"runtime {elapsed:.1f}s exceeds budget {budget}s"


def test_criterion_1_lemma_binomial_200_instances():
    t0 = time.time()
    res = criterion_lemma_binomial(DEFAULT_SEED, 200)
    _report(res, time.time() - t0, 5.0)


def test_criterion_2_lemma_negbinomial_200_instances():
    t0 = time.time()
    res = criterion_lemma_negbinomial(DEFAULT_SEED, 200)
    _report(res, time.time() - t0, 10.0)


def test_criterion_3_theorem_binomial_200_pairs():
    t0 = time.time()
    res = criterion_theorem_binomial(DEFAULT_SEED, 200)
    _report(res, time.time() - t0, 10.0)


def test_criterion_4_theorem_negbinomial_200_pairs():
    t0 = time.time()
    res = criterion_theorem_negbinomial(DEFAULT_SEED, 200)
    _report(res, time.time() - t0, 20.0)


def test_criterion_5_worked_value_regression():
    t0 = time.time()
    res = criterion_worked_example(DEFAULT_SEED)
    _report(res, time.time() - t0, 5.0)


def test_criterion_6_monotonicity_50_pairs():
    t0 = time.time()
    res = criterion_monotonicity(DEFAULT_SEED, 50)
    _report(res, time.time() - t0, 30.0)


def test_criterion_7_mc_cross_validation_20_instances():
    t0 = time.time()
    res = criterion_mc_cross_validation(DEFAULT_SEED, 20)
    _report(res, time.time() - t0, 60.0)


def test_criterion_8_selftest_cli_under_60s():
    t0 = time.time()
    proc = subprocess.run(
        [sys.executable, "-m", "mismatchkl.cli", "selftest", "--seed", str(DEFAULT_SEED)],
        capture_output=True,
        text=True,
        timeout=120,
    )
    elapsed = time.time() - t0
    print(f"\ncriterion 8 [selftest-cli]: exit {proc.returncode} in {elapsed:.1f}s")
    print(proc.stdout)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert elapsed < 60.0
    assert proc.stdout.count("PASS") >= 7

    # determinism: a repeat with the same seed is byte-identical
    proc2 = subprocess.run(
        [sys.executable, "-m", "mismatchkl.cli", "selftest", "--seed", str(DEFAULT_SEED)],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc2.stdout == proc.stdout
