"""Acceptance criteria, one marker per criterion.

Run ``pytest tests/test_acceptance.py`` (or this file directly); the terminal
summary prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import itertools
import random
import sys
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagcodes.channel import ChannelConfig, simulate, transmit
from flagcodes.flags import (
    Flag,
    FlagCode,
    build_odfc,
    complete_to_full_flag,
    flag_distance,
    is_disjoint,
    is_optimum_distance,
    max_flag_distance,
    max_size_check,
    optimum_distance_routes,
    orbit_flag_code,
    reproduce_nondisjoint_example,
)
from flagcodes.galois import build_tower
from flagcodes.groups import (
    G_generators,
    build_G,
    build_Gbar,
    build_SL2,
    build_singer,
    close_group,
    matrix_order,
    orbit_of,
    partition_into_orbits,
    search_transitive_subgroups,
    singer_stabilizer_checks,
    sl2_by_determinant,
    sl2_order,
)
from flagcodes.matspace import CapExceeded, Matrix, Subspace, SubspaceCode, intersect_dim, is_spread
from flagcodes.spread import U, build_segre_spread, field_reduction, line, lines

criterion = pytest.mark.criterion

SPREAD_PARAMS = [(2, 1, 2), (3, 1, 2), (2, 1, 3), (2, 2, 2), (5, 1, 2)]


# 1


@criterion(1)
@pytest.mark.parametrize("pek", SPREAD_PARAMS)
def test_spread_correctness(pek):
    t0 = time.perf_counter()
    T = build_tower(*pek)
    S = build_segre_spread(T)
    assert len(S) == T.qk + 1
    assert all(intersect_dim(a, b) == 0 for a, b in itertools.combinations(S, 2))
    assert S.min_distance() == 2 * T.k
    assert is_spread(S)
    orbit = SubspaceCode(orbit_of_generators(T))
    assert orbit == S
    assert SubspaceCode(field_reduction(T, l) for l in lines(T)) == S
    assert time.perf_counter() - t0 < 5


def orbit_of_generators(T):
    from flagcodes.groups import orbit_under_generators
    return orbit_under_generators(G_generators(T), U(T))


# 2


GROUP_PARAMS = [(2, 1, 1), (2, 1, 2), (2, 1, 3), (2, 1, 4), (2, 2, 2), (3, 1, 1), (3, 1, 2), (5, 1, 1), (5, 1, 2)]


@criterion(2)
def test_group_structure():
    t0 = time.perf_counter()
    for pek in GROUP_PARAMS:
        T = build_tower(*pek)
        factor = 1 if T.p == 2 else 2
        SL2 = build_SL2(T)
        assert SL2.order == sl2_order(T.qk)
        assert build_Gbar(T).order == factor * SL2.order
        if T.qk <= 25:
            assert set(SL2) == sl2_by_determinant(T.ext)
    assert time.perf_counter() - t0 < 30


# 3


@criterion(3)
@pytest.mark.parametrize("pek", SPREAD_PARAMS)
def test_singer_subgroup(pek):
    T = build_tower(*pek)
    singer = build_singer(T)
    assert matrix_order(singer.M, T.qk ** 2 - 1) == T.qk ** 2 - 1
    assert singer.Hbar.order == T.qk + 1
    assert all(m.det() == 1 for m in singer.Hbar)
    r = singer_stabilizer_checks(T, singer)
    assert r.ok, r.violations
    assert r.data["hbar_stabilizer_size"] == (1 if T.p == 2 else 2)


# 4


@criterion(4)
@pytest.mark.parametrize("pek,sizes", [((2, 1, 2), [5]), ((2, 1, 3), [9])])
def test_hbar_regular_in_characteristic_two(pek, sizes):
    T = build_tower(*pek)
    Hbar = build_singer(T).Hbar
    parts = partition_into_orbits(Hbar, lines(T))
    assert [len(p) for p in parts] == sizes
    assert all(p.stabilizer.order == 1 for p in parts)


@criterion(4)
@pytest.mark.parametrize("pek", [(3, 1, 2), (5, 1, 2)])
def test_hbar_two_orbits_in_odd_characteristic(pek):
    T = build_tower(*pek)
    Hbar = build_singer(T).Hbar
    parts = partition_into_orbits(Hbar, lines(T))
    assert sorted(len(p) for p in parts) == [(T.qk + 1) // 2] * 2
    x, y = line(T, 1, 0), line(T, 0, 1)
    (px,) = [p for p in parts if x in p.orbit_set]
    assert y not in px.orbit_set


# 5


@criterion(5)
@pytest.mark.parametrize("pek", SPREAD_PARAMS)
def test_odfc_construction(pek):
    t0 = time.perf_counter()
    T = build_tower(*pek)
    code = build_odfc(T)
    k = T.k
    assert len(code) == T.qk + 1
    assert code.min_distance == 2 * k * k
    assert code.pairwise_distances() == {2 * k * k}
    assert code.projected_of_dim(k) == build_segre_spread(T)
    assert optimum_distance_routes(code) == (True, True)
    assert is_optimum_distance(code) and is_disjoint(code)
    assert time.perf_counter() - t0 < 10


# 6


@criterion(6)
def test_nondisjoint_example():
    T = build_tower(2, 1, 2)
    r = reproduce_nondisjoint_example(T)
    assert r.ok, r.violations
    G = build_G(T)
    code = orbit_flag_code(G, Flag.standard(T.base, 4))
    assert not is_disjoint(code)
    assert [len(c) for c in code.projected] == [15, 5, 15]


# 7 and 8: a seeded corpus of flag codes


def _random_full_flag(F, n, rng):
    while True:
        m = Matrix(F, [[rng.randrange(F.size) for _ in range(n)] for _ in range(n)])
        if m.det():
            return Flag.from_matrix(m)


def _mutate_first_subspace(f: Flag, rng) -> Flag:
    """Swap F_1 for another line inside F_2, keeping the flag valid."""
    F = f.field
    a, b = f[1].rows
    while True:
        c1, c2 = rng.randrange(F.size), rng.randrange(F.size)
        if c1 or c2:
            v = [F.add(F.mul(c1, x), F.mul(c2, y)) for x, y in zip(a, b)]
            return Flag([Subspace(F, f.n, [v])] + list(f.subspaces[1:]))


def generate_codes(seed: int = 2024):
    """(label, q, code) triples: constructed, random orbit, and adversarial codes."""
    rng = random.Random(seed)
    out = []
    towers = {pek: build_tower(*pek) for pek in [(2, 1, 2), (3, 1, 2), (2, 1, 3), (2, 2, 2)]}
    groups = {pek: build_G(T) for pek, T in towers.items() if pek != (2, 2, 2)}
    odfcs = {pek: build_odfc(T) for pek, T in towers.items()}
    for pek, code in odfcs.items():
        out.append(("constructed", towers[pek].q, code))
        T = towers[pek]
        H = build_singer(T).H
        out.append(("constructed-half", T.q, orbit_flag_code(H, complete_to_full_flag(U(T)))))
    for pek, G in groups.items():
        T = towers[pek]
        out.append(("orbit-G-standard", T.q, orbit_flag_code(G, Flag.standard(T.base, 2 * T.k))))
    # random subgroups of G acting on random full flags
    for i in range(120):
        pek = rng.choice(list(groups))
        T, G = towers[pek], groups[pek]
        # subgroups of at most 256 elements keep the pairwise scans quick
        while True:
            try:
                N = close_group([rng.choice(G.elements) for _ in range(rng.randint(1, 2))], cap=256)
                break
            except CapExceeded:
                pass
        f = _random_full_flag(T.base, 2 * T.k, rng) if rng.random() < 0.6 else \
            complete_to_full_flag(rng.choice(build_segre_spread(T).members))
        out.append(("random-orbit", T.q, orbit_flag_code(N, f)))
    # adversarial edits of optimum codes
    for i in range(90):
        pek = rng.choice(list(odfcs))
        T, code = towers[pek], odfcs[pek]
        flags = list(code.flags)
        kind = i % 3
        if kind == 0:
            j = rng.randrange(len(flags))
            flags[j] = _mutate_first_subspace(flags[j], rng)
            label = "mutated-line"
        elif kind == 1:
            flags = rng.sample(flags, rng.randint(1, len(flags)))
            label = "subset"
        else:
            flags = rng.sample(flags, rng.randint(1, len(flags) - 1))
            flags.append(_random_full_flag(T.base, 2 * T.k, rng))
            label = "random-extra"
        out.append((label, T.q, FlagCode(flags)))
    return out


@pytest.fixture(scope="module")
def corpus():
    t0 = time.perf_counter()
    codes = generate_codes()
    return codes, time.perf_counter() - t0


@criterion(7)
def test_optimum_routes_agree_on_generated_codes(corpus):
    codes, gen_time = corpus
    t0 = time.perf_counter()
    assert len(codes) >= 200
    verdicts = []
    for label, q, code in codes:
        a, b = optimum_distance_routes(code)
        assert a == b, f"{label}: distance route {a}, projection route {b}"
        verdicts.append(a)
    # both outcomes are represented, so the agreement is not vacuous
    assert any(verdicts) and not all(verdicts)
    assert any(not is_disjoint(c) for _, _, c in codes)
    assert gen_time + time.perf_counter() - t0 < 60


@criterion(7)
@settings(max_examples=60, deadline=None)
@given(q=st.sampled_from([2, 3]), seed=st.integers(0, 10 ** 9), size=st.integers(1, 6))
def test_optimum_routes_agree_on_random_codes(q, seed, size):
    T = build_tower(q, 1, 2)
    rng = random.Random(seed)
    base = list(build_odfc(T).flags)
    flags = rng.sample(base, min(size, len(base)))
    if rng.random() < 0.5:
        flags.append(_random_full_flag(T.base, 4, rng))
    code = FlagCode(flags)
    a, b = optimum_distance_routes(code)
    assert a == b
    assert code.min_distance <= max_flag_distance(code.type, code.n) or len(code) == 1


@criterion(8)
def test_max_size_bound(corpus):
    codes, _ = corpus
    optimum = [(q, c) for _, q, c in codes if is_optimum_distance(c)]
    assert optimum
    at_max = 0
    for q, c in optimum:
        k = c.n // 2
        r = max_size_check(c, q)
        assert r.ok, r.violations
        assert len(c) <= q ** k + 1
        if len(c) == q ** k + 1:
            at_max += 1
            assert is_spread(c.projected_of_dim(k))
    assert at_max >= 4


# 9


@criterion(9)
def test_no_transitive_order_ten_subgroup_q3():
    T = build_tower(3, 1, 2)
    Gbar = build_Gbar(T)
    assert Gbar.order == 1440
    t0 = time.perf_counter()
    assert search_transitive_subgroups(Gbar, 10, lines(T)) == []
    assert time.perf_counter() - t0 < 600


# 10


@criterion(10)
@pytest.mark.parametrize("pek", [(2, 1, 2), (3, 1, 2), (2, 1, 3)])
def test_noiseless_round_trip(pek):
    code = build_odfc(build_tower(*pek))
    summary = list(simulate(code, ChannelConfig(seed=0), 3 * len(code)))[-1]
    assert summary["success_rate"] == 1.0
    for f in code:
        assert transmit(f, ChannelConfig(seed=1)).subspaces == f.subspaces


@criterion(10)
@pytest.mark.parametrize("erasures", [1, (0, 1, 0), (0, 0, 1), (0, 1, 1)])
def test_single_erasure_decodes(erasures):
    code = build_odfc(build_tower(2, 1, 2))
    records = list(simulate(code, ChannelConfig(erasures=erasures, seed=42), 1000))
    summary = records[-1]
    assert summary["successes"] == 1000
    again = list(simulate(code, ChannelConfig(erasures=erasures, seed=42), 1000))
    assert again == records


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
