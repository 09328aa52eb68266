"""Compiled and pure-Python kernels must agree call for call."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_count, brute_models, random_cnf
from xorsmc import _kernels
from xorsmc._kernels import SAT, UNSAT, _pycore

MODS = _kernels.backends()
needs_compiled = pytest.mark.skipif("compiled" not in MODS, reason="extension not built")


@pytest.mark.parametrize("name", list(MODS))
def test_small_cases(name):
    mod = MODS[name]
    assert mod.solve_cnf(1, [[1]])[0] == SAT
    assert mod.solve_cnf(1, [[1], [-1]])[0] == UNSAT
    assert mod.solve_cnf(2, [[]])[0] == UNSAT
    assert mod.solve_cnf(3, [])[0] == SAT
    assert mod.count_projected(4, [], [1, 2, 3, 4]) == 16
    assert mod.count_projected(2, [[1], [2]], [1, 2]) == 1
    assert mod.count_projected(2, [[1], [-1]], [1, 2]) == 0
    assert mod.count_projected(3, [[1, 2, 3]], []) == 1


@pytest.mark.parametrize("name", list(MODS))
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 12), ratio=st.floats(0.5, 6.0))
def test_solver_against_enumeration(name, seed, n, ratio):
    rng = random.Random(seed)
    clauses = random_cnf(rng, n, int(n * ratio), width=rng.randint(1, 3))
    status, model, _ = MODS[name].solve_cnf(n, clauses)
    models = brute_models(n, clauses)
    assert status == (SAT if models else UNSAT)
    if status == SAT:
        assert tuple(model) in set(models)


@pytest.mark.parametrize("name", list(MODS))
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 11), ratio=st.floats(0.3, 4.0))
def test_projected_count_against_enumeration(name, seed, n, ratio):
    rng = random.Random(seed)
    clauses = random_cnf(rng, n, int(n * ratio))
    over = sorted(rng.sample(range(1, n + 1), rng.randint(0, n)))
    assert MODS[name].count_projected(n, clauses, over) == brute_count(n, clauses, over)


@needs_compiled
def test_backends_identical_on_hard_instances():
    rng = random.Random(7)
    c, p = MODS["compiled"], MODS["python"]
    for _ in range(10):
        n = 40
        clauses = random_cnf(rng, n, int(4.26 * n))
        rc, rp = c.solve_cnf(n, clauses), p.solve_cnf(n, clauses)
        assert rc[0] == rp[0] and rc[2] == rp[2]  # same search: same conflict count
        if rc[0] == SAT:
            assert list(rc[1]) == list(rp[1])
        over = list(range(1, 15))
        assert c.count_projected(n, clauses, over) == p.count_projected(n, clauses, over)


def test_deadline_gives_unknown():
    rng = random.Random(3)
    n = 200
    clauses = random_cnf(rng, n, int(4.26 * n))
    status, _, _ = _pycore.solve_cnf(n, clauses, 1e-9)
    assert status == _kernels.UNKNOWN


def test_backend_names():
    assert _kernels.BACKEND in MODS
    assert list(MODS)[-1] == "python"


def test_env_forces_pure_python():
    import os
    import subprocess
    import sys
    env = dict(os.environ, XORSMC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from xorsmc import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
