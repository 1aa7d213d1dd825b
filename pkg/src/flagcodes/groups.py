"""Finite matrix groups as explicit element sets: closure, orbits, stabilizers.

Also builds the concrete groups of the construction:

* ``G``: generated by the block swap and ``[[I, P^i], [0, I]]`` in GL(2k, q);
* ``Gbar``: its 2x2 preimage in GL(2, q^k);
* ``SL2``: generated by the elementary transvections with entries ``alpha^i``;
* the Singer cycle ``M``, ``Hbar = <M^(q^k - 1)>`` and ``H = psi(Hbar)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, NamedTuple, Sequence

from flagcodes._report import Report
from flagcodes.galois import Field, FieldTower, companion_matrix, order_dividing
from flagcodes.matspace import CapExceeded, Matrix, Subspace, default_cap
from flagcodes.spread import lines, psi

DEFAULT_GROUP_CAP = 10 ** 7


class MatrixGroup:
    """An enumerated subgroup of GL(n, F), elements sorted by their entry tuples."""

    def __init__(self, generators: Iterable[Matrix], elements: Iterable[Matrix], name: str = ""):
        self.generators = tuple(generators)
        self.elements = tuple(sorted(set(elements), key=lambda m: m.key))
        if not self.elements:
            raise ValueError("a group has at least the identity")
        self._set = frozenset(self.elements)
        self.name = name
        first = self.elements[0]
        self.n = first.nrows
        self.field = first.field

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, m) -> bool:
        return m in self._set

    def __eq__(self, other):
        if isinstance(other, MatrixGroup):
            return self._set == other._set
        return NotImplemented

    def __hash__(self):
        return hash(self._set)

    def __repr__(self):
        label = f"{self.name} " if self.name else ""
        return f"<MatrixGroup {label}order={self.order} in GL({self.n},{self.field.size})>"

    @property
    def identity(self) -> Matrix:
        return Matrix.identity(self.field, self.n)

    def element_key(self) -> tuple:
        """Hashable fingerprint: the sorted concatenation of element encodings."""
        return tuple(v for m in self.elements for v in m.data)

    def is_subgroup_of(self, other: MatrixGroup) -> bool:
        return self._set <= other._set

    def is_closed(self) -> bool:
        if self.identity not in self:
            return False
        gens = self.generators or self.elements
        return all((a @ g) in self._set for a in self.elements for g in gens)

    def map(self, f, name: str = "") -> MatrixGroup:
        return MatrixGroup((f(g) for g in self.generators), (f(m) for m in self.elements), name)

    def to_json(self, dump_elements: bool = False) -> dict:
        out: dict[str, Any] = {
            "name": self.name,
            "n": self.n,
            "q": self.field.size,
            "order": self.order,
            "generators": [g.tolist() for g in self.generators],
        }
        if dump_elements:
            out["elements"] = [m.tolist() for m in self.elements]
        return out


def _closure(generators: Sequence[Matrix], limit: int) -> set[Matrix] | None:
    """Closure under right multiplication; ``None`` once it outgrows ``limit``.

    Generators already inside the running closure are skipped, which keeps the
    work near |G| times the number of genuinely needed generators.
    """
    if not generators:
        raise ValueError("need at least one generator")
    ident = Matrix.identity(generators[0].field, generators[0].nrows)
    elements = {ident}
    essential: list[Matrix] = []
    for g in generators:
        if g in elements:
            continue
        essential.append(g)
        frontier = list(elements)
        while frontier:
            fresh = []
            for x in frontier:
                for s in essential:
                    y = x @ s
                    if y not in elements:
                        elements.add(y)
                        fresh.append(y)
            if len(elements) > limit:
                return None
            frontier = fresh
    return elements


def close_group(generators: Iterable[Matrix], cap: int | None = None, name: str = "") -> MatrixGroup:
    gens = list(generators)
    for g in gens:
        if g.nrows != g.ncols or g.shape != gens[0].shape:
            raise ValueError("generators must be square and of equal size")
        if g.det() == 0:
            raise ValueError("generators must be invertible")
    cap = default_cap(DEFAULT_GROUP_CAP) if cap is None else cap
    elements = _closure(gens, cap)
    if elements is None:
        raise CapExceeded(f"group closure exceeded {cap} elements")
    return MatrixGroup(gens, elements, name)


def cyclic_elements(m: Matrix) -> list[Matrix]:
    out = [Matrix.identity(m.field, m.nrows)]
    x = m
    while not x.is_identity():
        out.append(x)
        x = x @ m
    return out


def matrix_order(m: Matrix, exponent: int | None = None) -> int:
    """Multiplicative order; ``exponent`` is a known multiple of it, if any."""
    if exponent is None:
        return len(cyclic_elements(m))
    return order_dividing(m, exponent, lambda a, e: a ** e, lambda a: a.is_identity())


def trivial_group(field: Field, n: int) -> MatrixGroup:
    I = Matrix.identity(field, n)
    return MatrixGroup([I], [I], "trivial")


# the concrete groups


def _swap(F: Field) -> Matrix:
    return Matrix(F, [[0, 1], [1, 0]])


def G_generators(tower: FieldTower) -> list[Matrix]:
    F, k = tower.base, tower.k
    I = Matrix.identity(F, k)
    Z = Matrix.zeros(F, k, k)
    gens = [Matrix.block([[Z, I], [I, Z]])]
    Pi = I
    for _ in range(tower.qk - 1):
        gens.append(Matrix.block([[I, Pi], [Z, I]]))
        Pi = Pi @ tower.P
    return gens


def Gbar_generators(tower: FieldTower) -> list[Matrix]:
    F = tower.ext
    return [_swap(F)] + [Matrix(F, [[1, F.pow(F.alpha, i)], [0, 1]]) for i in range(F.size - 1)]


def build_G(tower: FieldTower, cap: int | None = None) -> MatrixGroup:
    return close_group(G_generators(tower), cap, "G")


def build_Gbar(tower: FieldTower, cap: int | None = None) -> MatrixGroup:
    return close_group(Gbar_generators(tower), cap, "Gbar")


def build_SL2(tower: FieldTower, cap: int | None = None) -> MatrixGroup:
    F = tower.ext
    gens = []
    for i in range(F.size - 1):
        a = F.pow(F.alpha, i)
        gens.append(Matrix(F, [[1, a], [0, 1]]))
        gens.append(Matrix(F, [[1, 0], [a, 1]]))
    return close_group(gens, cap, "SL2")


def gl2_elements(F: Field, cap: int | None = None) -> list[Matrix]:
    """Every invertible 2x2 matrix over F, by exhaustive enumeration."""
    cap = default_cap() if cap is None else cap
    if F.size ** 4 > cap:
        raise CapExceeded(f"GL(2,{F.size}) enumeration scans {F.size ** 4} matrices, cap is {cap}")
    out = []
    for data in itertools.product(range(F.size), repeat=4):
        a, b, c, d = data
        if F.sub(F.mul(a, d), F.mul(b, c)):
            out.append(Matrix._raw(F, 2, 2, data))
    return out


def sl2_by_determinant(F: Field, cap: int | None = None) -> set[Matrix]:
    return {m for m in gl2_elements(F, cap) if m.det() == 1}


def sl2_order(Q: int) -> int:
    return Q * (Q * Q - 1)


class Singer(NamedTuple):
    M: Matrix
    Hbar: MatrixGroup
    H: MatrixGroup


def singer_cycle(tower: FieldTower) -> Matrix:
    """Companion matrix over GF(q^k) of the minimal polynomial of omega."""
    return companion_matrix(tower.top.poly, tower.ext)


def singer_cycle_group(tower: FieldTower) -> MatrixGroup:
    M = singer_cycle(tower)
    return MatrixGroup([M], cyclic_elements(M), "<M>")


def build_singer(tower: FieldTower) -> Singer:
    M = singer_cycle(tower)
    h = M ** (tower.qk - 1)
    Hbar = MatrixGroup([h], cyclic_elements(h), "Hbar")
    H = Hbar.map(lambda m: psi(tower, m), "H")
    return Singer(M, Hbar, H)


# orbits and stabilizers


@dataclass(frozen=True)
class OrbitResult:
    point: Any
    group: MatrixGroup
    orbit: tuple
    stabilizer: MatrixGroup

    def __len__(self):
        return len(self.orbit)

    @property
    def orbit_set(self) -> frozenset:
        return frozenset(self.orbit)


def _act(point, A: Matrix):
    return point.act(A)


def orbit_of(group: MatrixGroup, point) -> OrbitResult:
    """Orbit and stabilizer of a subspace or flag by running over every element."""
    if point.n != group.n:
        raise ValueError(f"group on F^{group.n} cannot act on a point of F^{point.n}")
    images = set()
    stab = []
    for A in group:
        img = _act(point, A)
        images.add(img)
        if img == point:
            stab.append(A)
    orbit = tuple(sorted(images, key=lambda x: x.key))
    return OrbitResult(point, group, orbit, MatrixGroup([], stab, f"Stab_{group.name}"))


def stabilizer(group: MatrixGroup, point) -> MatrixGroup:
    return orbit_of(group, point).stabilizer


def orbit_under_generators(generators: Sequence[Matrix], point) -> list:
    """Orbit by breadth-first search over generator images (no group enumeration)."""
    seen = {point}
    frontier = [point]
    while frontier:
        fresh = []
        for x in frontier:
            for g in generators:
                y = _act(x, g)
                if y not in seen:
                    seen.add(y)
                    fresh.append(y)
        frontier = fresh
    return sorted(seen, key=lambda x: x.key)


def partition_into_orbits(group: MatrixGroup, points: Iterable) -> list[OrbitResult]:
    """Split a point set into orbits; raises if the set is not group-invariant."""
    remaining = sorted(set(points), key=lambda x: x.key)
    pending = set(remaining)
    out = []
    for x in remaining:
        if x not in pending:
            continue
        res = orbit_of(group, x)
        if not res.orbit_set <= pending:
            raise ValueError("point set is not invariant under the group")
        pending -= res.orbit_set
        out.append(res)
    return out


def stabilizer_flag_decomposition_check(group: MatrixGroup, flag) -> Report:
    """Stab(F) equals the intersection of the stabilizers of its subspaces."""
    report = Report("flag_stabilizer_intersection")
    direct = set(stabilizer(group, flag))
    parts = [set(stabilizer(group, s)) for s in flag.subspaces]
    inter = set.intersection(*parts)
    report.require(direct == inter, f"|Stab(F)| = {len(direct)} but intersection has {len(inter)}")
    report.data["stab_flag"] = len(direct)
    report.data["stab_subspaces"] = [len(s) for s in parts]
    return report


def scalar_matrices(F: Field, n: int) -> set[Matrix]:
    return {Matrix.identity(F, n).scale(a) for a in range(1, F.size)}


def singer_stabilizer_checks(tower: FieldTower, singer: Singer | None = None) -> Report:
    """Line stabilizers: scalars under <M>, and {I} or {I, -I} under Hbar."""
    report = Report("singer_line_stabilizers")
    singer = singer or build_singer(tower)
    Mgroup = singer_cycle_group(tower)
    F = tower.ext
    scalars = scalar_matrices(F, 2)
    I = Matrix.identity(F, 2)
    expected_h = {I} if tower.p == 2 else {I, -I}
    for l in lines(tower):
        sm = set(stabilizer(Mgroup, l))
        report.require(sm == scalars, f"Stab_<M>({l.rows[0]}) has {len(sm)} elements, not the scalars")
        sh = set(stabilizer(singer.Hbar, l))
        report.require(sh == expected_h, f"Stab_Hbar({l.rows[0]}) has {len(sh)} elements")
    report.data["scalar_count"] = len(scalars)
    report.data["hbar_stabilizer_size"] = len(expected_h)
    return report


def search_transitive_subgroups(group: MatrixGroup, order: int, points: Sequence,
                                cap: int = 10 ** 7) -> list[MatrixGroup]:
    """Subgroups of a given order acting transitively on ``points``.

    Only cyclic and 2-generated subgroups are enumerated; that covers every
    group of order at most 15.  ``cap`` bounds the number of pair closures.
    """
    if group.order % order:
        raise ValueError(f"{order} does not divide |group| = {group.order}")
    points = list(points)
    target = len(points)

    def transitive(elements) -> bool:
        x0 = points[0]
        return len({_act(x0, A) for A in elements}) == target

    found: dict[frozenset, MatrixGroup] = {}
    if order == group.order and transitive(group):
        found[group._set] = group
    candidates = [m for m in group if order % matrix_order(m, group.order) == 0]
    cyclic: dict[frozenset, Matrix] = {}
    for a in candidates:
        c = frozenset(cyclic_elements(a))
        cyclic.setdefault(c, a)
    reps = sorted(cyclic.items(), key=lambda kv: (len(kv[0]), kv[1].key))
    for c, a in reps:
        if len(c) == order and c not in found and transitive(c):
            found[c] = MatrixGroup([a], c)
    pairs = 0
    for (c1, a), (c2, b) in itertools.combinations(reps, 2):
        if c1 <= c2 or c2 <= c1:
            continue
        pairs += 1
        if pairs > cap:
            raise CapExceeded(f"subgroup search exceeded {cap} generator pairs")
        els = _closure([a, b], order)
        if els is None or len(els) != order:
            continue
        key = frozenset(els)
        if key not in found and transitive(key):
            found[key] = MatrixGroup([a, b], els)
    return sorted(found.values(), key=lambda g: g.element_key())
