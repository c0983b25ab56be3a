import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from silentqec import gf2
from silentqec.pauli import (
    DimensionError,
    InvalidGroupError,
    PauliOperator,
    check_group,
    commutes,
    in_group,
    pauli_mul,
    residual_logicals,
    symplectic_product,
)

N = 3


def paulis(n=N):
    return st.builds(
        PauliOperator,
        st.just(n),
        st.integers(0, (1 << n) - 1),
        st.integers(0, (1 << n) - 1),
        st.integers(0, 3),
    )


@given(paulis(), paulis())
def test_product_matches_matrices(a, b):
    np.testing.assert_allclose((a * b).to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-12)


@given(paulis(), paulis(), paulis())
def test_product_associative(a, b, c):
    assert pauli_mul(pauli_mul(a, b), c) == pauli_mul(a, pauli_mul(b, c))


@given(paulis(), paulis())
def test_commutation_matches_matrices(a, b):
    ma, mb = a.to_matrix(), b.to_matrix()
    assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)
    assert symplectic_product(a, b) == symplectic_product(b, a)


@given(paulis())
def test_label_roundtrip(a):
    assert PauliOperator.from_label(a.label) == a


def test_y_is_i_x_z():
    y = PauliOperator.from_label("Y")
    np.testing.assert_allclose(y.to_matrix(), np.array([[0, -1j], [1j, 0]]))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        pauli_mul(PauliOperator.from_label("X"), PauliOperator.from_label("XX"))


def test_in_group_phase():
    gens = [PauliOperator.from_label("ZZI"), PauliOperator.from_label("IZZ")]
    m = in_group(PauliOperator.from_label("ZIZ"), gens)
    assert m is not None and set(m.indices) == {0, 1} and m.phase == 0
    assert in_group(PauliOperator.from_label("XII"), gens) is None


def test_check_group_rejects():
    with pytest.raises(InvalidGroupError):
        check_group([PauliOperator.from_label("XI"), PauliOperator.from_label("ZI")])
    with pytest.raises(InvalidGroupError):
        check_group([PauliOperator.from_label("ZZ"), PauliOperator.from_label("ZZ")])


def test_residual_logicals_repetition():
    gens = [PauliOperator.from_label("ZZI"), PauliOperator.from_label("IZZ")]
    pairs = residual_logicals(3, gens)
    assert len(pairs) == 1
    xl, zl = pairs[0]
    assert not commutes(xl, zl)
    assert all(commutes(xl, g) and commutes(zl, g) for g in gens)
    assert zl.weight == 1 and xl.weight == 3


def _span_size(rows):
    seen = {0}
    for r in rows:
        seen |= {s ^ r for s in seen}
    return len(seen)


@settings(max_examples=60)
@given(st.lists(st.integers(0, 255), max_size=7))
def test_rank_matches_span(rows):
    assert 2 ** gf2.rank(rows) == _span_size(rows)


@settings(max_examples=60)
@given(st.lists(st.integers(0, 255), max_size=6))
def test_nullspace_orthogonal_and_complete(rows):
    ns = gf2.nullspace(rows, 8)
    assert all(gf2.popcount(r & v) % 2 == 0 for r in rows for v in ns)
    assert len(ns) == 8 - gf2.rank(rows)


@settings(max_examples=60)
@given(st.lists(st.integers(1, 63), min_size=1, max_size=5), st.integers(0, 63))
def test_solve_combination(rows, target):
    combo = gf2.solve_combination(rows, target)
    in_span = any(
        np.bitwise_xor.reduce([rows[i] for i in sub] or [0]) == target
        for k in range(len(rows) + 1)
        for sub in itertools.combinations(range(len(rows)), k)
    )
    assert (combo is not None) == in_span
    if combo is not None:
        acc = 0
        for i in combo:
            acc ^= rows[i]
        assert acc == target
