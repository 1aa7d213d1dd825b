from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagcodes.galois import (
    FieldError,
    PrimitivityError,
    build_tower,
    companion_matrix,
    is_irreducible,
    is_primitive,
    monic_polynomials,
    primitivity_failure,
    smallest_primitive,
)
from flagcodes.groups import matrix_order
from flagcodes.matspace import Matrix
from oracles import OracleField, oracle_smallest_primitive, oracle_tower

# default polynomials per level, found by the brute-force scan in oracles.py
DEFAULT_POLYS = {
    (2, 1, 2): ((1, 1), (1, 1, 1), (2, 1, 1)),
    (3, 1, 2): ((1, 1), (2, 1, 1), (3, 3, 1)),
    (2, 1, 3): ((1, 1), (1, 0, 1, 1), (2, 1, 1)),
    (2, 2, 2): ((1, 1, 1), (2, 1, 1), (4, 2, 1)),
    (5, 1, 2): ((2, 1), (2, 1, 1), (5, 1, 1)),
}


@pytest.mark.parametrize("pek", sorted(DEFAULT_POLYS))
def test_default_polynomials(pek, towers):
    assert towers(*pek).polys == DEFAULT_POLYS[pek]


@pytest.mark.parametrize("pek", [(2, 1, 2), (3, 1, 2), (2, 2, 2)])
def test_default_polynomials_match_bruteforce_scan(pek, towers):
    polys, _ = oracle_tower(*pek)
    assert list(towers(*pek).polys) == polys


@pytest.mark.parametrize("pek", [(2, 1, 2), (3, 1, 2), (2, 2, 2), (2, 1, 3)])
def test_arithmetic_matches_oracle(pek, towers):
    T = towers(*pek)
    _, oracle_levels = oracle_tower(*pek)
    for F, O in zip([T.prime, T.base, T.ext], oracle_levels):
        assert F.size == O.size
        for a in range(F.size):
            for b in range(F.size):
                assert F.mul(a, b) == O.mul(a, b)
                assert F.add(a, b) == O.add(a, b)


@pytest.mark.parametrize("pek", [(2, 1, 2), (3, 1, 2), (2, 1, 3), (2, 2, 2), (5, 1, 2)])
def test_level_generators_are_primitive(pek, towers):
    T = towers(*pek)
    for F in T.levels:
        assert F.element_order(F.alpha) == F.size - 1
    assert T.omega.order() == T.top.size - 1


def test_subfield_codes_embed_unchanged(towers):
    T = towers(2, 2, 2)
    q = T.q
    for a in range(q):
        for b in range(q):
            assert T.ext.mul(a, b) == T.base.mul(a, b)
            assert T.top.mul(a, b) == T.base.mul(a, b)


def test_field_element_operators(towers):
    F = towers(3, 1, 2).ext
    x, y = F(5), F(7)
    assert int(x * y / y) == 5
    assert int(x - x) == 0
    assert int(x ** (F.size - 1)) == 1
    assert int(x * x.inverse()) == 1
    with pytest.raises(ZeroDivisionError):
        F(0).inverse()


def test_companion_matrix_annihilates_its_polynomial(towers):
    T = towers(3, 1, 2)
    P, F = T.P, T.base
    poly = T.ext.poly
    acc = Matrix.zeros(F, 2, 2)
    for i, c in enumerate(poly):
        acc = acc + (P ** i).scale(c)
    assert acc == Matrix.zeros(F, 2, 2)


def test_companion_matrix_q2_k2(towers):
    assert towers(2, 1, 2).P.tolist() == [[0, 1], [1, 1]]


@pytest.mark.parametrize("pek", [(2, 1, 2), (3, 1, 2), (2, 1, 3), (2, 2, 2), (5, 1, 2)])
def test_companion_matrix_order(pek, towers):
    T = towers(*pek)
    assert matrix_order(T.P, T.qk - 1) == T.qk - 1


@pytest.mark.parametrize("pek", [(2, 1, 2), (3, 1, 2), (2, 2, 2)])
def test_field_iso_is_injective(pek, towers):
    T = towers(*pek)
    images = {T.field_iso(x) for x in range(T.qk)}
    assert len(images) == T.qk
    assert T.field_iso(0) == Matrix.zeros(T.base, T.k, T.k)
    assert T.field_iso(1) == Matrix.identity(T.base, T.k)
    assert T.field_iso(T.alpha) == T.P


@settings(max_examples=200, deadline=None)
@given(pek=st.sampled_from([(2, 1, 2), (3, 1, 2), (2, 1, 3), (2, 2, 2)]), data=st.data())
def test_field_iso_is_ring_homomorphism(pek, data):
    T = build_tower(*pek)
    x = data.draw(st.integers(0, T.qk - 1))
    y = data.draw(st.integers(0, T.qk - 1))
    F = T.ext
    assert T.field_iso(F.add(x, y)) == T.field_iso(x) + T.field_iso(y)
    assert T.field_iso(F.mul(x, y)) == T.field_iso(x) @ T.field_iso(y)


@settings(max_examples=100, deadline=None)
@given(p=st.sampled_from([2, 3, 5]), data=st.data())
def test_element_order_divides_group_order(p, data):
    F = build_tower(p, 1, 2).ext
    a = data.draw(st.integers(1, F.size - 1))
    n = F.element_order(a)
    assert (F.size - 1) % n == 0
    assert F.pow(a, n) == 1
    assert all(F.pow(a, d) != 1 for d in range(1, n))


def test_primitivity_failures(towers):
    F2 = towers(2, 1, 2).prime
    assert primitivity_failure((1, 0, 1), F2)[0] == "reducible"      # (x + 1)^2
    assert primitivity_failure((1, 1, 1, 1, 1), F2)[0] == "order"    # x^5 = 1
    assert primitivity_failure((1, 1, 0), F2)[0] == "not monic"
    assert primitivity_failure((1, 1, 1), F2) is None
    with pytest.raises(ValueError):
        is_primitive((1, 1, 0), F2)


def test_monic_polynomials_are_ordered_constant_first(towers):
    F3 = towers(3, 1, 2).prime
    polys = list(monic_polynomials(F3, 2))
    assert len(polys) == 9
    assert polys == sorted(polys)
    assert polys[:4] == [(0, 0, 1), (0, 1, 1), (0, 2, 1), (1, 0, 1)]


def test_irreducible_count_degree_four_over_gf2(towers):
    F2 = towers(2, 1, 2).prime
    irr = [f for f in monic_polynomials(F2, 4) if is_irreducible(f, F2)]
    # x^4+x+1, x^4+x^3+1, x^4+x^3+x^2+x+1
    assert len(irr) == 3
    assert smallest_primitive(F2, 4) == oracle_smallest_primitive(OracleField(2), 4) == (1, 0, 0, 1, 1)


def test_build_tower_rejects_bad_input():
    with pytest.raises(FieldError):
        build_tower(4, 1, 2)
    with pytest.raises(FieldError):
        build_tower(2, 0, 2)
    with pytest.raises(FieldError):
        build_tower(2, 1, 2, [None, (1, 1)])
    with pytest.raises(PrimitivityError) as exc:
        build_tower(2, 1, 4, [None, (1, 1, 1, 1, 1)])
    assert exc.value.reason == "order"


def test_build_tower_with_override():
    T = build_tower(2, 1, 2, [None, None, (3, 1, 1)])
    assert T.polys[2] == (3, 1, 1)
    assert T.omega.order() == 15


def test_descriptor_roundtrip(towers):
    T = towers(3, 1, 2)
    again = type(T).from_descriptor(T.descriptor())
    assert again.polys == T.polys


def test_companion_matrix_rejects_non_monic(towers):
    with pytest.raises(ValueError):
        companion_matrix((1, 1, 0), towers(2, 1, 2).prime)
