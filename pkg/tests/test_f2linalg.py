import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqhit import f2linalg
from sqhit.f2linalg import BitMatrix, BitVector, Subspace


def mat(rows, cols=None):
    return BitMatrix.from_rows(rows, cols)


def test_rref_identity_fixed():
    m = BitMatrix.identity(3)
    assert f2linalg.rref(m) == m


def test_rref_prunes_zero_rows():
    m = mat([[1, 1], [0, 0]])
    assert f2linalg.rref(m) == mat([[1, 1]])


def test_rref_hand_elimination():
    m = mat([[1, 1], [1, 0]])
    assert set(f2linalg.rref(m).data) == {0b01, 0b10}


def test_kernel_zero_map_is_full():
    k = f2linalg.kernel_basis(BitMatrix.zero(2, 2))
    assert k.dim == 2


def test_kernel_hand_case():
    # Two domain vectors both mapping to (1): kernel is their sum.
    k = f2linalg.kernel_basis(mat([[1], [1]]))
    assert k.basis == (0b11,)


def test_kernel_of_identity_is_zero():
    assert f2linalg.kernel_basis(BitMatrix.identity(4)).dim == 0


def test_image_identity_full():
    assert f2linalg.image_basis(BitMatrix.identity(2)).dim == 2


def test_image_zero_matrix():
    assert f2linalg.image_basis(BitMatrix.zero(3, 2)).dim == 0


def test_image_repeated_rows():
    im = f2linalg.image_basis(mat([[1, 1], [1, 1]]))
    assert im.basis == (0b11,)


def test_intersect_with_full_space():
    full = f2linalg.full_space(2)
    other = f2linalg.subspace_from_rows(2, [0b11])
    assert f2linalg.intersect(full, other).basis == other.basis


def test_intersect_transverse_lines():
    a = f2linalg.subspace_from_rows(2, [0b01])
    b = f2linalg.subspace_from_rows(2, [0b10])
    assert f2linalg.intersect(a, b).dim == 0


def test_intersect_plane_with_line():
    a = f2linalg.subspace_from_rows(2, [0b01, 0b10])
    b = f2linalg.subspace_from_rows(2, [0b11])
    assert f2linalg.intersect(a, b).basis == (0b11,)


def test_intersect_dimension_mismatch():
    with pytest.raises(ValueError):
        f2linalg.intersect(f2linalg.full_space(2), f2linalg.full_space(3))


def test_contains_zero_and_members():
    s = f2linalg.subspace_from_rows(2, [0b11])
    assert f2linalg.contains(s, BitVector(2, 0))
    assert f2linalg.contains(s, BitVector(2, 0b11))
    assert not f2linalg.contains(s, BitVector(2, 0b01))


def test_contains_length_mismatch():
    with pytest.raises(ValueError):
        f2linalg.contains(f2linalg.full_space(2), BitVector(3, 0))


def test_solve_identity():
    v = f2linalg.solve(BitMatrix.identity(3), BitVector(3, 0b101))
    assert v.bits == 0b101


def test_solve_zero_matrix_no_solution():
    assert f2linalg.solve(BitMatrix.zero(2, 2), BitVector(2, 0b1)) is None


def test_solve_single_row():
    v = f2linalg.solve(mat([[1, 1]]), BitVector(2, 0b11))
    assert v.bits == 0b1
    assert mat([[1, 1]]).apply(v).bits == 0b11


matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.integers(0, (1 << c) - 1), min_size=r, max_size=r).map(
            lambda rows: BitMatrix(r, c, tuple(rows)))))


@given(matrices)
def test_rank_nullity(m):
    assert f2linalg.rank(m) + f2linalg.kernel_basis(m).dim == m.rows


@given(matrices)
def test_kernel_rows_annihilate(m):
    for r in f2linalg.kernel_basis(m).basis:
        assert m.apply(BitVector(m.rows, r)).is_zero()


@given(matrices)
def test_rref_idempotent(m):
    once = f2linalg.rref(m)
    assert f2linalg.rref(once) == once


@given(matrices, matrices)
def test_intersect_contained_and_commutative(a, b):
    sa = f2linalg.image_basis(a)
    n = a.cols
    sb = f2linalg.subspace_from_rows(n, [r & ((1 << n) - 1) for r in b.data])
    inter = f2linalg.intersect(sa, sb)
    assert f2linalg.contains_subspace(sa, inter)
    assert f2linalg.contains_subspace(sb, inter)
    swapped = f2linalg.intersect(sb, sa)
    assert inter.basis == swapped.basis
    assert f2linalg.intersect(sa, sa).basis == sa.basis


@given(matrices, st.integers(0, 63))
def test_solve_is_exact_when_present(m, vbits):
    v = BitVector(m.rows, vbits & ((1 << m.rows) - 1))
    b = m.apply(v)
    got = f2linalg.solve(m, b)
    assert got is not None
    assert m.apply(got) == b


@given(matrices)
def test_intersect_exhaustive_small(m):
    # Brute-force oracle: membership in both subspaces, vector by vector.
    sa = f2linalg.image_basis(m)
    sb = f2linalg.subspace_from_rows(m.cols, list(m.data)[: max(1, m.rows // 2)])
    inter = f2linalg.intersect(sa, sb)
    members = {v.bits for v in sa.vectors()} & {v.bits for v in sb.vectors()}
    assert {v.bits for v in inter.vectors()} == members
