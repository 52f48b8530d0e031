from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trak.perron import NonPrimitive, collatz_wielandt, is_irreducible, is_primitive, perron_root


def test_primitivity():
    assert is_primitive([[1, 1], [1, 0]])
    assert not is_primitive([[0, 1], [1, 0]])
    assert is_irreducible([[0, 1], [1, 0]])
    assert not is_irreducible([[1, 0], [1, 1]])
    # Wielandt's extremal matrix needs the full exponent (n-1)^2 + 1
    n = 5
    w = np.zeros((n, n), dtype=int)
    for i in range(n - 1):
        w[i, i + 1] = 1
    w[n - 1, 0] = w[n - 1, 1] = 1
    assert is_primitive(w.tolist())
    assert (np.linalg.matrix_power(w, (n - 1) ** 2) == 0).any()


def test_non_primitive_raises():
    with pytest.raises(NonPrimitive):
        perron_root([[0, 1], [1, 0]])


def test_collatz_wielandt_exact():
    lo, hi = collatz_wielandt([[2, 1], [1, 1]], [1, 1])
    assert (lo, hi) == (Fraction(2), Fraction(3))


@given(st.lists(st.integers(0, 9), min_size=9, max_size=9), st.integers(1, 3))
def test_perron_root_matches_eigenvalues(entries, bump):
    m = np.array(entries).reshape(3, 3) + bump * np.eye(3, dtype=int)
    m = m.tolist()
    if not is_primitive(m):
        return
    root = perron_root(m)
    expected = max(abs(np.linalg.eigvals(np.array(m, dtype=float))))
    assert abs(root.value - expected) <= 1e-9 * expected
    assert root.lower <= Fraction(root.value) <= root.upper
    assert root.gap <= 1e-9 * expected
