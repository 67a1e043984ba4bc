import random
from fractions import Fraction

import pytest

from ruminbgg.algebra import builtin


def dense_rank(rows):
    """Independent dense Gaussian elimination over Fraction; the rank oracle.

    Deliberately separate from the package's sparse kernel.
    """
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        for r in range(row + 1, nrows):
            f = m[r][col] * inv
            if f:
                for c in range(col, ncols):
                    m[r][c] -= f * m[row][c]
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def sparse_to_dense(matrix):
    """SparseMatrix (column-major dicts) to a dense list of rows."""
    out = [[Fraction(0)] * matrix.ncols for _ in range(matrix.nrows)]
    for j, col in matrix.cols.items():
        for i, v in col.items():
            out[i][j] = v
    return out


def random_fraction(rng, span=9, den=6):
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


@pytest.fixture(scope="session")
def h2():
    return builtin("heisenberg", 2)


@pytest.fixture(scope="session")
def h3():
    return builtin("heisenberg", 3)


@pytest.fixture(scope="session")
def q2():
    return builtin("quaternionic", 2)


@pytest.fixture(scope="session")
def octo():
    return builtin("octonionic")


@pytest.fixture()
def rng():
    return random.Random(20260809)
