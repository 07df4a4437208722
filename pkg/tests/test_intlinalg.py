from math import gcd

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from fanstalk.errors import ZeroVector
from fanstalk.intlinalg import (
    det,
    hnf,
    hnf_with_transform,
    integer_kernel,
    lattice_coefficients,
    minors_gcd,
    primitive,
    rank,
    rank_mod,
    relations,
)

small = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def test_primitive_examples():
    assert primitive((10, 0, 4, 12)) == (5, 0, 2, 6)
    assert primitive((3, 2)) == (3, 2)
    assert primitive((-4, 6)) == (-2, 3)
    with pytest.raises(ZeroVector):
        primitive((0, 0, 0))


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_hnf_transform_is_unimodular_and_consistent(rows):
    H, U = hnf_with_transform(rows)
    assert abs(det(U)) == 1
    ncols = len(rows[0])
    for h, u in zip(H, U):
        assert tuple(sum(u[i] * rows[i][c] for i in range(len(rows))) for c in range(ncols)) == h


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_rank_and_det_match_sympy(rows):
    assert rank(rows) == Matrix(rows).rank()
    if len(rows) == len(rows[0]):
        assert det(rows) == Matrix(rows).det()


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_minor_gcd_matches_smith_form(rows):
    k = rank(rows)
    if k == 0:
        return
    snf = smith_normal_form(Matrix(rows), domain=ZZ)
    prod = 1
    for i in range(k):
        prod *= abs(snf[i, i])
    assert minors_gcd(rows, k) == prod


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_kernel_is_saturated_basis(rows):
    n = len(rows[0])
    basis = integer_kernel(rows, n)
    assert len(basis) == n - rank(rows)
    for b in basis:
        assert all(sum(r[j] * b[j] for j in range(n)) == 0 for r in rows)
    if basis:
        # saturated: maximal minors of the basis are coprime
        assert minors_gcd(basis, len(basis)) == 1


@given(matrices(), st.lists(small, min_size=4, max_size=4))
@settings(max_examples=100, deadline=None)
def test_lattice_coefficients_roundtrip(rows, coeffs):
    coeffs = coeffs[: len(rows)] + [0] * max(0, len(rows) - len(coeffs))
    target = tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) for j in range(len(rows[0])))
    c = lattice_coefficients(rows, target)
    assert c is not None
    assert tuple(sum(x * r[j] for x, r in zip(c, rows)) for j in range(len(rows[0]))) == target


def test_lattice_membership_rejects_non_members():
    assert lattice_coefficients([(2, 2)], (1, 1)) is None
    assert lattice_coefficients([(2, 2)], (4, 4)) == (2,)
    assert lattice_coefficients([(1, 0)], (0, 1)) is None


def test_rank_mod_p():
    rows = [(1, 0), (1, 2)]
    assert rank_mod(rows, 0) == 2
    assert rank_mod(rows, 2) == 1
    assert rank_mod(rows, 3) == 2


def test_relations_of_dependent_vectors():
    rel = relations([(2, 0), (1, 0)])
    assert len(rel) == 1
    a, b = rel[0]
    assert 2 * a + b == 0 and gcd(a, b) == 1


def test_hnf_canonical_lattice_equality():
    assert hnf([(-3, 0, -2, 1, 0), (0, -3, -2, 0, 1)], 5) == hnf(
        [(-3, 3, 0, 1, -1), (0, -3, -2, 0, 1)], 5
    )
