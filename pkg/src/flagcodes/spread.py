"""The Segre planar spread of F_q^2k, field reduction of lines, and the embedding psi.

Lines of GF(q^k)^2 are :class:`~flagcodes.matspace.Subspace` values of
dimension 1 over the GF(q^k) level; their canonical bases are ``(0, 1)`` or
``(1, x)``.
"""

from __future__ import annotations

import random
from typing import Iterable

from flagcodes._report import Report
from flagcodes.galois import FieldTower
from flagcodes.matspace import Matrix, Subspace, SubspaceCode, enumerate_grassmannian


def lines(tower: FieldTower) -> list[Subspace]:
    """All q^k + 1 lines of GF(q^k)^2, canonically sorted."""
    return enumerate_grassmannian(tower.ext, 1, 2)


def U(tower: FieldTower) -> Subspace:
    """rowsp(I_k | 0_k)."""
    k = tower.k
    I = Matrix.identity(tower.base, k)
    return Subspace(tower.base, 2 * k, I.hstack(Matrix.zeros(tower.base, k, k)).rows)


def V(tower: FieldTower) -> Subspace:
    """rowsp(0_k | I_k)."""
    k = tower.k
    I = Matrix.identity(tower.base, k)
    return Subspace(tower.base, 2 * k, Matrix.zeros(tower.base, k, k).hstack(I).rows)


def build_segre_spread(tower: FieldTower) -> SubspaceCode:
    """{rowsp(0|I), rowsp(I|0), rowsp(I|P^i) : 0 <= i <= q^k - 2}."""
    F, k = tower.base, tower.k
    I = Matrix.identity(F, k)
    members = [U(tower), V(tower)]
    Pi = I
    for _ in range(tower.qk - 1):
        members.append(Subspace(F, 2 * k, I.hstack(Pi).rows))
        Pi = Pi @ tower.P
    return SubspaceCode(members, F)


def field_reduction(tower: FieldTower, line: Subspace) -> Subspace:
    """rowsp(x1, x2) -> rowsp(phi(x1) | phi(x2))."""
    if line.field is not tower.ext or line.n != 2 or line.k != 1:
        raise ValueError("field reduction expects a line of GF(q^k)^2")
    x1, x2 = line.rows[0]
    if not x1 and not x2:
        raise ValueError("zero vector does not span a line")
    return Subspace(tower.base, 2 * tower.k, tower.field_iso(x1).hstack(tower.field_iso(x2)).rows)


def line(tower: FieldTower, x1: int, x2: int) -> Subspace:
    if not x1 and not x2:
        raise ValueError("zero vector does not span a line")
    return Subspace(tower.ext, 2, [[x1, x2]])


def psi(tower: FieldTower, m: Matrix) -> Matrix:
    """Blockwise field_iso: GL(2, q^k) -> GL(2k, q)."""
    if m.field is not tower.ext or m.shape != (2, 2):
        raise ValueError("psi expects a 2x2 matrix over GF(q^k)")
    if m.det() == 0:
        raise ValueError("psi is applied to invertible matrices only")
    a, b, c, d = (tower.field_iso(x) for x in m.data)
    return Matrix.block([[a, b], [c, d]])


def random_gl2(tower: FieldTower, rng: random.Random) -> Matrix:
    F = tower.ext
    while True:
        m = Matrix(F, [[rng.randrange(F.size) for _ in range(2)] for _ in range(2)])
        if m.det():
            return m


def action_equivalence_check(tower: FieldTower, sample_size: int | None = None,
                             group: Iterable[Matrix] | None = None, seed: int = 0) -> Report:
    """Check phi(l . A) = phi(l) . psi(A) for every line l.

    With ``sample_size=None`` every element of ``group`` is tried (the group
    defaults to Gbar); otherwise ``sample_size`` random elements of GL(2, q^k)
    are drawn, or of ``group`` when one is given.
    """
    report = Report("action_equivalence")
    if sample_size is None:
        if group is None:
            from flagcodes.groups import build_Gbar
            group = build_Gbar(tower)
        mats = list(group)
    else:
        rng = random.Random(seed)
        if group is not None:
            pool = list(group)
            mats = [rng.choice(pool) for _ in range(sample_size)]
        else:
            mats = [random_gl2(tower, rng) for _ in range(sample_size)]
    ls = lines(tower)
    images = {l: field_reduction(tower, l) for l in ls}
    for A in mats:
        psiA = psi(tower, A)
        for l in ls:
            lhs = images[l.act(A)]
            rhs = images[l].act(psiA)
            if lhs != rhs:
                report.fail(f"line {l.rows[0]} under {A.tolist()}")
    report.data["matrices"] = len(mats)
    report.data["lines"] = len(ls)
    return report


def spread_to_json(tower: FieldTower, code: SubspaceCode) -> dict:
    return code.to_json(construction="segre", tower=tower.descriptor())
