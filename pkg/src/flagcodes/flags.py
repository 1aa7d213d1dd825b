"""Flags, flag codes, and the optimum-distance machinery.

A flag of type ``(t_1 < ... < t_r)`` on F^n is a strictly increasing chain of
subspaces with ``dim F_i = t_i``.  Flag codes keep their projected codes
``C_i`` (the sets of i-th subspaces) alongside the flags.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Sequence

from flagcodes._report import Report
from flagcodes.galois import FieldTower
from flagcodes.groups import (
    MatrixGroup,
    _closure,
    build_singer,
    orbit_of,
    stabilizer,
)
from flagcodes.matspace import (
    CapExceeded,
    Matrix,
    Subspace,
    SubspaceCode,
    is_spread,
    subspace_distance,
)
from flagcodes.spread import U, V, build_segre_spread


class RouteDisagreement(AssertionError):
    """The two optimum-distance computations disagree, which signals a bug."""


class Flag:
    __slots__ = ("n", "type", "subspaces", "_hash")

    def __init__(self, subspaces: Sequence[Subspace], check: bool = True):
        subs = tuple(subspaces)
        if not subs:
            raise ValueError("a flag has at least one subspace")
        n = subs[0].n
        if check:
            for s in subs:
                if s.n != n:
                    raise ValueError("subspaces of a flag share the ambient space")
                if not 0 < s.k < n:
                    raise ValueError(f"flag subspaces are proper and nonzero (got dim {s.k})")
            for a, b in zip(subs, subs[1:]):
                if not a.k < b.k or not b.contains(a):
                    raise ValueError("flag subspaces must be strictly nested")
        self.n = n
        self.type = tuple(s.k for s in subs)
        self.subspaces = subs
        self._hash = hash(subs)

    @classmethod
    def from_matrix(cls, m: Matrix, type_vector: Sequence[int] | None = None) -> Flag:
        """Flag whose i-th subspace is spanned by the first ``t_i`` rows of ``m``."""
        t = list(type_vector) if type_vector is not None else list(range(1, m.ncols))
        return cls([Subspace(m.field, m.ncols, m.rows[:d]) for d in t])

    @classmethod
    def standard(cls, field, n: int, type_vector: Sequence[int] | None = None) -> Flag:
        return cls.from_matrix(Matrix.identity(field, n), type_vector)

    @property
    def field(self):
        return self.subspaces[0].field

    @property
    def key(self) -> tuple:
        return tuple(s.key for s in self.subspaces)

    @property
    def is_full(self) -> bool:
        return self.type == tuple(range(1, self.n))

    def __getitem__(self, i: int) -> Subspace:
        return self.subspaces[i]

    def __len__(self):
        return len(self.subspaces)

    def __iter__(self):
        return iter(self.subspaces)

    def __eq__(self, other):
        if not isinstance(other, Flag):
            return NotImplemented
        return self.subspaces == other.subspaces

    def __hash__(self):
        return self._hash

    def __lt__(self, other: Flag) -> bool:
        return self.key < other.key

    def __repr__(self):
        return f"Flag(n={self.n}, type={self.type}, subspaces={[[list(r) for r in s.rows] for s in self]})"

    def act(self, A: Matrix) -> Flag:
        return Flag([s.act(A) for s in self.subspaces], check=False)

    def subspace_of_dim(self, d: int) -> Subspace:
        return self.subspaces[self.type.index(d)]

    def to_json(self) -> dict:
        return {"n": self.n, "type": list(self.type), "subspaces": [s.to_json() for s in self]}

    @classmethod
    def from_json(cls, field, d: dict) -> Flag:
        f = cls([Subspace.from_json(field, s) for s in d["subspaces"]])
        if list(f.type) != list(d["type"]) or f.n != d["n"]:
            raise ValueError("flag header does not match its subspaces")
        return f


def _check_type(type_vector: Sequence[int], n: int):
    t = list(type_vector)
    if not t or any(not 0 < x < n for x in t) or any(a >= b for a, b in zip(t, t[1:])):
        raise ValueError(f"invalid type vector {t} for n={n}")


def flag_distance(f: Flag, g: Flag) -> int:
    if f.n != g.n or f.type != g.type:
        raise ValueError("flags of different ambient or type")
    return sum(subspace_distance(a, b) for a, b in zip(f, g))


def grassmann_max_distance(t: int, n: int) -> int:
    return min(2 * t, 2 * (n - t))


def max_flag_distance(type_vector: Sequence[int], n: int) -> int:
    _check_type(type_vector, n)
    h = n // 2
    return 2 * (sum(t for t in type_vector if t <= h) + sum(n - t for t in type_vector if t > h))


class FlagCode:
    """A non-empty set of same-type flags, sorted canonically."""

    def __init__(self, flags: Iterable[Flag]):
        fs = sorted(set(flags), key=lambda f: f.key)
        if not fs:
            raise ValueError("a flag code is non-empty")
        n, t = fs[0].n, fs[0].type
        if any(f.n != n or f.type != t for f in fs):
            raise ValueError("flags of a code share ambient and type")
        self.n = n
        self.type = t
        self.flags = tuple(fs)
        self._set = frozenset(fs)

    @property
    def field(self):
        return self.flags[0].field

    def __len__(self):
        return len(self.flags)

    def __iter__(self):
        return iter(self.flags)

    def __contains__(self, f):
        return f in self._set

    def __eq__(self, other):
        if isinstance(other, FlagCode):
            return self.flags == other.flags
        return NotImplemented

    def __hash__(self):
        return hash(self.flags)

    def __repr__(self):
        return f"FlagCode(n={self.n}, type={self.type}, size={len(self)})"

    def __or__(self, other: FlagCode) -> FlagCode:
        return FlagCode(self.flags + other.flags)

    @cached_property
    def projected(self) -> tuple[SubspaceCode, ...]:
        """The projected codes C_1, ..., C_r."""
        return tuple(SubspaceCode((f[i] for f in self.flags), self.field) for i in range(len(self.type)))

    def projected_of_dim(self, d: int) -> SubspaceCode:
        return self.projected[self.type.index(d)]

    @cached_property
    def min_distance(self) -> int:
        if len(self.flags) < 2:
            return 0
        best = None
        for f, g in itertools.combinations(self.flags, 2):
            d = flag_distance(f, g)
            if best is None or d < best:
                best = d
                if d == 2:
                    break  # distinct flags differ in some subspace, so 2 is the floor
        return best

    def pairwise_distances(self) -> set[int]:
        return {flag_distance(f, g) for f, g in itertools.combinations(self.flags, 2)}

    def to_json(self) -> dict:
        return {
            "q": self.field.size,
            "n": self.n,
            "type": list(self.type),
            "size": len(self),
            "min_distance": self.min_distance,
            "optimum": is_optimum_distance(self),
            "flags": [f.to_json() for f in self.flags],
        }

    @classmethod
    def from_json(cls, field, d: dict) -> FlagCode:
        code = cls(Flag.from_json(field, f) for f in d["flags"])
        if code.n != d["n"] or list(code.type) != list(d["type"]) or len(code) != d["size"]:
            raise ValueError("flag code header does not match its flags")
        if code.min_distance != d["min_distance"]:
            raise ValueError(f"stored min_distance {d['min_distance']} != recomputed {code.min_distance}")
        return code


def is_disjoint(c: FlagCode) -> bool:
    return all(len(ci) == len(c) for ci in c.projected)


def optimum_distance_routes(c: FlagCode) -> tuple[bool, bool]:
    """(distance attains the bound, disjoint with every projected code at its maximum)."""
    by_distance = c.min_distance == max_flag_distance(c.type, c.n)
    by_projection = is_disjoint(c) and all(
        ci.min_distance() == grassmann_max_distance(t, c.n) for t, ci in zip(c.type, c.projected))
    return by_distance, by_projection


def is_optimum_distance(c: FlagCode) -> bool:
    a, b = optimum_distance_routes(c)
    if a != b:
        raise RouteDisagreement(
            f"optimum-distance routes disagree on {c!r}: distance route {a}, projection route {b}")
    return a


def orbit_flag_code(group: MatrixGroup, flag: Flag) -> FlagCode:
    return FlagCode(orbit_of(group, flag).orbit)


def _middle(flag: Flag) -> int:
    if flag.n % 2 or not flag.is_full:
        raise ValueError("expected a full flag on an even-dimensional space")
    return flag.n // 2


def _orbit_has_max_distance(orbit: Sequence[Subspace], k: int) -> bool:
    # vacuous for a single point: no two distinct members to compare
    return all(subspace_distance(a, b) == 2 * k for a, b in itertools.combinations(orbit, 2))


def stabilizer_containment_check(group: MatrixGroup, flag: Flag) -> Report:
    """Stab(F_i) <= Stab(F_k) for all i, given that Orb(F_k) has distance 2k."""
    report = Report("stabilizer_containment")
    k = _middle(flag)
    Fk = flag.subspace_of_dim(k)
    res_k = orbit_of(group, Fk)
    if not _orbit_has_max_distance(res_k.orbit, k):
        report.fail(f"precondition: orbit of F_{k} does not have distance {2 * k}")
        return report
    stab_k = set(res_k.stabilizer)
    sizes = []
    for s in flag:
        st = set(stabilizer(group, s))
        sizes.append(len(st))
        report.require(st <= stab_k, f"Stab(F_{s.k}) not inside Stab(F_{k})")
    report.data["stabilizer_sizes"] = sizes
    return report


def disjointness_equivalence_check(group: MatrixGroup, flag: Flag) -> Report:
    """Orbit code disjoint <=> all subspace stabilizers equal <=> equal to Stab(F)."""
    report = Report("orbit_disjointness_equivalence")
    code = orbit_flag_code(group, flag)
    stab_f = set(stabilizer(group, flag))
    stabs = [set(stabilizer(group, s)) for s in flag]
    a = is_disjoint(code)
    b = all(st == stab_f for st in stabs)
    c = all(st == stabs[0] for st in stabs)
    report.require(a == b == c, f"disjoint={a}, all equal Stab(F)={b}, all equal={c}")
    for i, ci in enumerate(code.projected):
        report.require(set(ci) == set(orbit_of(group, flag[i]).orbit),
                       f"projected code {i + 1} differs from the orbit of F_{flag.type[i]}")
    report.require(len(code) * len(stab_f) == group.order, "orbit-stabilizer fails for the flag")
    report.data["disjoint"] = a
    return report


def complete_to_full_flag(s: Subspace) -> Flag:
    """Full flag through ``s``: its RREF rows first, then standard basis vectors.

    Standard vectors already inside the running span are skipped.
    """
    n, F = s.n, s.field
    rows = [list(r) for r in s.rows]
    span = Subspace(F, n, rows) if rows else Subspace.zero(F, n)
    for j in range(n):
        if len(rows) == n:
            break
        e = [int(i == j) for i in range(n)]
        e_sub = Subspace(F, n, [e])
        if not span.contains(e_sub):
            rows.append(e)
            span = Subspace(F, n, rows)
    return Flag.from_matrix(Matrix(F, rows))


def build_odfc(tower: FieldTower, singer=None) -> FlagCode:
    """Optimum distance full flag code of size q^k + 1 from one or two H-orbits."""
    H = (singer or build_singer(tower)).H
    code = orbit_flag_code(H, complete_to_full_flag(U(tower)))
    if tower.p != 2:
        code = code | orbit_flag_code(H, complete_to_full_flag(V(tower)))
    return code


def union_theorem_check(group: MatrixGroup, flags: Sequence[Flag]) -> Report:
    """Union of flag orbits whose middle subspaces sit in distinct orbits."""
    report = Report("orbit_union")
    if not flags:
        raise ValueError("need at least one flag")
    k = _middle(flags[0])
    mids = [f.subspace_of_dim(k) for f in flags]
    mid_orbits = [orbit_of(group, m) for m in mids]
    for (i, a), (j, b) in itertools.combinations(enumerate(mid_orbits), 2):
        report.require(not (a.orbit_set & b.orbit_set), f"precondition: F_k of flags {i} and {j} share an orbit")
    union = [s for r in mid_orbits for s in r.orbit]
    report.require(_orbit_has_max_distance(union, k), f"precondition: union of orbits lacks distance {2 * k}")
    for j, (f, r) in enumerate(zip(flags, mid_orbits)):
        sk = set(r.stabilizer)
        for s in f:
            if not sk <= set(stabilizer(group, s)):
                report.fail(f"precondition: Stab(F_k) of flag {j} does not fix F_{s.k}")
    if not report.ok:
        return report
    code = FlagCode(x for f in flags for x in orbit_of(group, f).orbit)
    expected = sum(len(r) for r in mid_orbits)
    report.require(len(code) == expected, f"size {len(code)} != {expected}")
    report.require(is_optimum_distance(code), "union is not an optimum distance code")
    report.data["size"] = len(code)
    report.data["min_distance"] = code.min_distance
    return report


def max_size_check(code: FlagCode, q: int) -> Report:
    """Optimum full flag codes on F^2k have at most q^k + 1 flags, with a spread at the middle when equal."""
    report = Report("max_size_bound")
    if not (code.n % 2 == 0 and code.type == tuple(range(1, code.n)) and is_optimum_distance(code)):
        report.data["applicable"] = False
        return report
    k = code.n // 2
    report.require(len(code) <= q ** k + 1, f"size {len(code)} exceeds {q ** k + 1}")
    if len(code) == q ** k + 1:
        report.require(is_spread(code.projected_of_dim(k)), "maximum size code without a spread at C_k")
    report.data["applicable"] = True
    return report


def reproduce_nondisjoint_example(tower: FieldTower, G: MatrixGroup | None = None) -> Report:
    """The q=2, k=2 element of G fixing F_2 but moving F_1 in the standard flag."""
    report = Report("nondisjoint_example")
    if (tower.q, tower.k) != (2, 2) or tuple(tower.ext.poly) != (1, 1, 1):
        raise ValueError("the example lives over GF(2) with p(x) = x^2 + x + 1")
    from flagcodes.groups import build_G

    F = tower.base
    I = Matrix.identity(F, 2)
    Z = Matrix.zeros(F, 2, 2)
    P = tower.P
    S = Matrix.block([[Z, I], [I, Z]])

    def X(B):
        return Matrix.block([[I, B], [Z, I]])

    A = S @ X(P ** 2) @ S @ X(P) @ S @ X(P ** 2)
    report.require(A == Matrix.block([[P, Z], [Z, P ** 2]]), "A is not diag(P, P^2)")
    G = G or build_G(tower)
    report.require(A in G, "A is not in G")
    flag = Flag.standard(F, 4)
    F1, F2 = flag[0], flag[1]
    report.require(F1.act(A) == Subspace(F, 4, [[0, 1, 0, 0]]), "F_1 A != rowsp(0 1 0 0)")
    report.require(F1.act(A) != F1, "A fixes F_1")
    report.require(F2.act(A) == F2, "A moves F_2")
    report.require(SubspaceCode(orbit_of(G, F2).orbit) == build_segre_spread(tower), "Orb_G(F_2) is not the spread")
    code = orbit_flag_code(G, flag)
    for t, ci in zip(code.type, code.projected):
        report.require(ci.min_distance() == grassmann_max_distance(t, 4), f"C_{t} below its maximum distance")
    report.require(not is_disjoint(code), "Orb_G(F) is disjoint")
    report.require(not is_optimum_distance(code), "Orb_G(F) is optimum")
    report.data["orbit_size"] = len(code)
    report.data["projected_sizes"] = [len(ci) for ci in code.projected]
    return report


def search_single_orbit_odfc(group: MatrixGroup, flag: Flag, cap: int = 10 ** 6) -> list[MatrixGroup]:
    """Subgroups N whose orbit of ``flag`` is an optimum code with Orb_N(F_k) = Orb_group(F_k).

    Such an N is transitive on the middle orbit and Stab_N(F_k) lies inside
    K = Stab_group(F).  The search grows N from the identity: while some
    member L of the middle orbit is unreached, N must contain one of the
    elements sending F_k to L, so each of them is tried in turn.  Branches
    whose F_k-stabilizer escapes K, or whose order exceeds |orbit| * |K|, are
    dropped.  Returns the minimal valid subgroups found (empty when none).
    """
    k = _middle(flag)
    Fk = flag.subspace_of_dim(k)
    movers: dict[Subspace, list[Matrix]] = {}
    for A in group:
        movers.setdefault(Fk.act(A), []).append(A)
    target = frozenset(movers)
    stab_fk = frozenset(movers[Fk])
    K = stabilizer(group, flag)._set
    bound = len(target) * len(K)
    found: dict[frozenset, MatrixGroup] = {}
    seen: set[frozenset] = set()
    joins = 0

    def extend(gens: list[Matrix], els: frozenset):
        nonlocal joins
        reached = {Fk.act(A) for A in els}
        if len(reached) == len(target):
            found.setdefault(els, MatrixGroup(gens, els))
            return
        L = min(target - reached, key=lambda x: x.key)
        for A in movers[L]:
            joins += 1
            if joins > cap:
                raise CapExceeded(f"subgroup search exceeded {cap} joins")
            new = _closure(gens + [A], bound)
            if new is None:
                continue
            key = frozenset(new)
            if key in seen:
                continue
            seen.add(key)
            if (key & stab_fk) <= K:
                extend(gens + [A], key)

    extend([], frozenset([group.identity]))
    out = [g for g in found.values() if not any(o._set < g._set for o in found.values())]
    return sorted(out, key=lambda g: (g.order, g.element_key()))
