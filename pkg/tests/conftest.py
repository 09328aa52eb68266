import itertools
import random

import pytest

from xorsmc.formula import Circuit
from xorsmc.smc import CountingTerm, SmcInstance


def brute_models(num_vars, clauses):
    """All models by plain enumeration; slow on purpose, independent of the kernels."""
    out = []
    for bits in itertools.product((0, 1), repeat=num_vars):
        if all(any((bits[abs(l) - 1] == 1) == (l > 0) for l in c) for c in clauses):
            out.append(bits)
    return out


def brute_count(num_vars, clauses, over):
    over = sorted(over)
    return len({tuple(m[v - 1] for v in over) for m in brute_models(num_vars, clauses)})


def random_cnf(rng, n, m, width=3):
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), min(width, n))
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return clauses


@pytest.fixture
def rng():
    return random.Random(12345)


def random_instance(rng, n, k, d, q=None):
    """Random circuits for phi and k terms over d y-bits; q random unless given."""
    def rand_circ(names, gates):
        c = Circuit()
        nodes = [c.input(nm) for nm in names]
        for _ in range(gates):
            a, b = rng.choice(nodes), rng.choice(nodes)
            op = rng.choice([c.and_, c.or_, c.xor])
            node = op(a, b)
            nodes.append(c.not_(node) if rng.random() < 0.3 else node)
        c.set_output(nodes[-1])
        return c

    phi = rand_circ([f"x{j}" for j in range(n)] + [f"b{j}" for j in range(k)], 4)
    terms = []
    for _ in range(k):
        f = rand_circ([f"x{j}" for j in range(n)] + [f"y{j}" for j in range(d)], 8)
        terms.append(CountingTerm(f, d, rng.randint(0, d) if q is None else q))
    return SmcInstance(n, k, phi, terms)
