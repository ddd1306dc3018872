from fractions import Fraction as F

import pytest

from lozitree.lozi import make_params
from lozitree.manifold import grow_stable
from lozitree.treemodel import FiniteTree, gamma_arcs

A, B = F(7, 4), F(9, 20)


@pytest.fixture(scope="session")
def P():
    return make_params(A, B)


@pytest.fixture(scope="session")
def stable12(P):
    return grow_stable(P, 12)


@pytest.fixture(scope="session")
def family(P, stable12):
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = gamma_arcs(P, n, stable=stable12.truncate(n))
        return cache[n]

    return get


@pytest.fixture(scope="session")
def tree(family):
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = FiniteTree.from_family(family(n))
        return cache[n]

    return get


def misiurewicz_grid(count=20):
    """Rational (a, b) in the Misiurewicz region, deterministic."""
    from lozitree.lozi import in_misiurewicz

    out = []
    for bn in range(1, 20):
        b = F(bn, 40)
        for an in range(140, 200):
            a = F(an, 100)
            if in_misiurewicz(a, b):
                out.append((a, b))
    step = max(1, len(out) // count)
    return out[::step][:count]


ACCEPTANCE = {}


def record(criterion, ok, detail):
    """Store a criterion outcome for the summary printed at the end of the run."""
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
