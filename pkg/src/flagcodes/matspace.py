"""Dense exact matrices over a tower level, canonical subspaces and subspace codes.

Matrices hold element codes (ints) of one :class:`~flagcodes.galois.Field`.
A :class:`Subspace` is stored by its reduced row echelon basis, which is unique
per row space, so equality and hashing are plain tuple comparisons.
"""

from __future__ import annotations

import itertools
import os
from operator import mul as _imul
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

if TYPE_CHECKING:
    from flagcodes.galois import Field

DEFAULT_CAP = 10 ** 6


class CapExceeded(RuntimeError):
    """An enumeration or closure would exceed its configured size cap."""


def default_cap(fallback: int = DEFAULT_CAP) -> int:
    env = os.environ.get("FLAGCODES_CAP")
    return int(env) if env else fallback


class Matrix:
    """Immutable dense matrix, entries stored row-major in a flat tuple."""

    __slots__ = ("field", "nrows", "ncols", "data", "_hash")

    def __init__(self, field: Field, rows: Sequence[Sequence[int]]):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix dimensions must be positive")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        data = tuple(v for r in rows for v in r)
        if any(not 0 <= v < field.size for v in data):
            raise ValueError(f"entry out of range for {field}")
        self._set(field, len(rows), ncols, data)

    def _set(self, field, nrows, ncols, data):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.data = data
        self._hash = hash((nrows, ncols, data))

    @classmethod
    def _raw(cls, field: Field, nrows: int, ncols: int, data: tuple) -> Matrix:
        m = cls.__new__(cls)
        m._set(field, nrows, ncols, data)
        return m

    @classmethod
    def identity(cls, field: Field, n: int) -> Matrix:
        return cls._raw(field, n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, field: Field, m: int, n: int) -> Matrix:
        return cls._raw(field, m, n, (0,) * (m * n))

    @classmethod
    def block(cls, blocks: Sequence[Sequence[Matrix]]) -> Matrix:
        """Assemble a block matrix from a grid of equally-shaped-per-row/col blocks."""
        field = blocks[0][0].field
        rows: list[list[int]] = []
        for brow in blocks:
            h = brow[0].nrows
            for i in range(h):
                row: list[int] = []
                for b in brow:
                    row.extend(b.data[i * b.ncols:(i + 1) * b.ncols])
                rows.append(row)
        return cls(field, rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        c = self.ncols
        return tuple(self.data[i * c:(i + 1) * c] for i in range(self.nrows))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.data[i * self.ncols + j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.data) == (other.nrows, other.ncols, other.data)

    def __hash__(self):
        return self._hash

    @property
    def key(self) -> tuple:
        return (self.nrows, self.ncols, self.data)

    def __lt__(self, other: Matrix) -> bool:
        return self.key < other.key

    def __repr__(self):
        return f"Matrix({self.field}, {self.tolist()})"

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix._raw(self.field, self.nrows, other.ncols,
                           _matmul(self.field, self.data, other.data, self.nrows, self.ncols, other.ncols))

    __mul__ = __matmul__

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        add = self.field.add
        return Matrix._raw(self.field, self.nrows, self.ncols,
                           tuple(add(a, b) for a, b in zip(self.data, other.data)))

    def __neg__(self) -> Matrix:
        neg = self.field.neg_table
        return Matrix._raw(self.field, self.nrows, self.ncols, tuple(neg[a] for a in self.data))

    def __sub__(self, other: Matrix) -> Matrix:
        return self + (-other)

    def scale(self, c: int) -> Matrix:
        mul = self.field.mul
        return Matrix._raw(self.field, self.nrows, self.ncols, tuple(mul(c, a) for a in self.data))

    def __pow__(self, m: int) -> Matrix:
        if self.nrows != self.ncols:
            raise ValueError("power of a non-square matrix")
        base = self if m >= 0 else self.inverse()
        m = abs(m)
        result = Matrix.identity(self.field, self.nrows)
        while m:
            if m & 1:
                result = result @ base
            base = base @ base
            m >>= 1
        return result

    def is_identity(self) -> bool:
        n = self.nrows
        return n == self.ncols and self.data == tuple(int(i == j) for i in range(n) for j in range(n))

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        F = self.field
        n = self.nrows
        if n == 1:
            return self.data[0]
        if n == 2:
            a, b, c, d = self.data
            return F.sub(F.mul(a, d), F.mul(b, c))
        rows = [list(r) for r in self.rows]
        det = 1
        for col in range(n):
            piv = next((r for r in range(col, n) if rows[r][col]), None)
            if piv is None:
                return 0
            if piv != col:
                rows[col], rows[piv] = rows[piv], rows[col]
                det = F.neg(det)
            pv = rows[col][col]
            det = F.mul(det, pv)
            inv = F.inv(pv)
            for r in range(col + 1, n):
                f = rows[r][col]
                if f:
                    c = F.mul(f, inv)
                    rows[r] = [F.sub(x, F.mul(c, y)) for x, y in zip(rows[r], rows[col])]
        return det

    def inverse(self) -> Matrix:
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        ident = Matrix.identity(self.field, n).rows
        aug = [list(r) + list(e) for r, e in zip(self.rows, ident)]
        red, pivots = _rref_rows(self.field, aug, 2 * n)
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return Matrix(self.field, [r[n:] for r in red])

    def transpose(self) -> Matrix:
        return Matrix(self.field, list(zip(*self.rows)))

    def hstack(self, other: Matrix) -> Matrix:
        return Matrix(self.field, [a + b for a, b in zip(self.rows, other.rows)])


def _matmul(F, a: tuple, b: tuple, m: int, l: int, n: int) -> tuple:
    cols = [b[j::n] for j in range(n)]
    out = []
    if F.is_prime_field:
        p = F.p
        for i in range(m):
            row = a[i * l:(i + 1) * l]
            for col in cols:
                out.append(sum(map(_imul, row, col)) % p)
        return tuple(out)
    add, mult = F.add_table, F.mul_table
    if add is None:
        raise ValueError(f"matrices over {F} are not supported (level too large)")
    for i in range(m):
        row = a[i * l:(i + 1) * l]
        for col in cols:
            s = 0
            for x, y in zip(row, col):
                if x and y:
                    s = add[s][mult[x][y]]
            out.append(s)
    return tuple(out)


def _rref_rows(F, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Row-reduce in place; returns (all rows, pivot columns)."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    pivots: list[int] = []
    prime = F.is_prime_field
    p = F.p
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        if prime:
            prow = [x * inv % p for x in rows[r]]
        else:
            prow = [F.mul(inv, x) for x in rows[r]]
        rows[r] = prow
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    if prime:
                        rows[i] = [(x - f * y) % p for x, y in zip(rows[i], prow)]
                    else:
                        rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: Matrix) -> tuple[Matrix, int]:
    """Reduced row echelon form and rank."""
    red, pivots = _rref_rows(m.field, [list(r) for r in m.rows], m.ncols)
    return Matrix(m.field, red), len(pivots)


def rank(m: Matrix) -> int:
    return rref(m)[1]


class Subspace:
    """A point of a Grassmannian, stored as its RREF basis.

    ``k = 0`` is allowed and means the zero subspace (no rows).
    """

    __slots__ = ("field", "n", "rows", "_hash")

    def __init__(self, field: Field, n: int, rows: Iterable[Sequence[int]]):
        red, pivots = _rref_rows(field, [list(r) for r in rows], n)
        self._set(field, n, tuple(tuple(r) for r in red[:len(pivots)]))

    def _set(self, field, n, rows):
        self.field = field
        self.n = n
        self.rows = rows
        self._hash = hash((n, rows))

    @classmethod
    def _canonical(cls, field, n, rows) -> Subspace:
        s = cls.__new__(cls)
        s._set(field, n, rows)
        return s

    @classmethod
    def zero(cls, field: Field, n: int) -> Subspace:
        return cls._canonical(field, n, ())

    @classmethod
    def full(cls, field: Field, n: int) -> Subspace:
        return cls._canonical(field, n, Matrix.identity(field, n).rows)

    @property
    def k(self) -> int:
        return len(self.rows)

    dim = k

    @property
    def basis(self) -> Matrix:
        if not self.rows:
            raise ValueError("zero subspace has no basis matrix")
        return Matrix(self.field, self.rows)

    @property
    def key(self) -> tuple:
        return (self.k, self.rows)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return self._hash

    def __lt__(self, other: Subspace) -> bool:
        return self.key < other.key

    def __repr__(self):
        return f"Subspace(n={self.n}, k={self.k}, rows={[list(r) for r in self.rows]})"

    def act(self, A: Matrix) -> Subspace:
        """Image ``rowsp(U A)`` under a matrix acting on the right."""
        if A.nrows != self.n:
            raise ValueError(f"matrix of size {A.nrows} cannot act on F^{self.n}")
        if not self.rows:
            return self
        k, n = self.k, self.n
        flat = tuple(v for r in self.rows for v in r)
        prod = _matmul(self.field, flat, A.data, k, n, A.ncols)
        return Subspace(self.field, A.ncols, [prod[i * n:(i + 1) * n] for i in range(k)])

    def contains(self, other: Subspace) -> bool:
        return intersect_dim(self, other) == other.k

    def __le__(self, other: Subspace) -> bool:
        return other.contains(self)

    def __and__(self, other: Subspace) -> Subspace:
        return intersect(self, other)

    def __add__(self, other: Subspace) -> Subspace:
        return subspace_sum(self, other)

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, field: Field, d: dict) -> Subspace:
        s = cls(field, d["n"], d["rows"])
        if s.k != d.get("k", s.k) or [list(r) for r in s.rows] != d["rows"]:
            raise ValueError("subspace rows are not a canonical basis")
        return s


def subspace_from(m: Matrix) -> Subspace:
    return Subspace(m.field, m.ncols, m.rows)


def _check_ambient(u: Subspace, v: Subspace):
    if u.n != v.n:
        raise ValueError(f"ambient mismatch: {u.n} vs {v.n}")


def sum_dim(u: Subspace, v: Subspace) -> int:
    _check_ambient(u, v)
    if not u.rows:
        return v.k
    if not v.rows:
        return u.k
    return len(_rref_rows(u.field, list(u.rows) + list(v.rows), u.n)[1])


def intersect_dim(u: Subspace, v: Subspace) -> int:
    return u.k + v.k - sum_dim(u, v)


def subspace_distance(u: Subspace, v: Subspace) -> int:
    """``dim U + dim V - 2 dim(U & V)``."""
    return 2 * sum_dim(u, v) - u.k - v.k


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    _check_ambient(u, v)
    return Subspace(u.field, u.n, list(u.rows) + list(v.rows))


def intersect(u: Subspace, v: Subspace) -> Subspace:
    _check_ambient(u, v)
    F, n = u.field, u.n
    if not u.rows or not v.rows:
        return Subspace.zero(F, n)
    # left kernel of [U; V]: rows (a | b) with aU + bV = 0, so aU lies in both
    stacked = list(u.rows) + list(v.rows)
    m = len(stacked)
    aug = [list(r) + [int(i == j) for j in range(m)] for i, r in enumerate(stacked)]
    red, pivots = _rref_rows(F, aug, n + m)
    kernel = [r[n:] for r in red if not any(r[:n])]
    vecs = []
    for coeff in kernel:
        a = coeff[:u.k]
        vec = [0] * n
        for c, row in zip(a, u.rows):
            if c:
                vec = [F.add(x, F.mul(c, y)) for x, y in zip(vec, row)]
        vecs.append(vec)
    return Subspace(F, n, vecs) if vecs else Subspace.zero(F, n)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def iter_grassmannian(field: Field, k: int, n: int) -> Iterator[Subspace]:
    """All k-subspaces of F^n, by pivot pattern and free entries (unsorted)."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 0:
        yield Subspace.zero(field, n)
        return
    q = field.size
    for pivots in itertools.combinations(range(n), k):
        # free slots: row i, column c > pivots[i] that is not a pivot column
        free = [(i, c) for i in range(k) for c in range(pivots[i] + 1, n) if c not in pivots]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, c in enumerate(pivots):
                rows[i][c] = 1
            for (i, c), v in zip(free, vals):
                rows[i][c] = v
            yield Subspace._canonical(field, n, tuple(tuple(r) for r in rows))


def enumerate_grassmannian(field: Field, k: int, n: int, cap: int | None = None) -> list[Subspace]:
    """Sorted list of all k-dimensional subspaces of F^n."""
    cap = default_cap() if cap is None else cap
    count = gaussian_binomial(n, k, field.size)
    if count > cap:
        raise CapExceeded(f"G_{field.size}({k},{n}) has {count} points, cap is {cap}")
    return sorted(iter_grassmannian(field, k, n), key=lambda s: s.key)


class SubspaceCode:
    """A constant dimension code: a sorted set of same-dimension subspaces."""

    def __init__(self, members: Iterable[Subspace], field: Field | None = None):
        ms = sorted(set(members), key=lambda s: s.key)
        if not ms:
            raise ValueError("a subspace code is non-empty")
        n, k = ms[0].n, ms[0].k
        if any(s.n != n or s.k != k for s in ms):
            raise ValueError("members must share ambient and dimension")
        self.field = field or ms[0].field
        self.n = n
        self.k = k
        self.members = tuple(ms)
        self._set = frozenset(ms)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, s):
        return s in self._set

    def __eq__(self, other):
        if isinstance(other, SubspaceCode):
            return self.members == other.members
        return NotImplemented

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return f"SubspaceCode(n={self.n}, k={self.k}, size={len(self)})"

    def min_distance(self) -> int:
        return code_min_distance(self)

    def to_json(self, **extra) -> dict:
        out = {"q": self.field.size, "n": self.n, "k": self.k}
        out.update(extra)
        out["subspaces"] = [s.to_json() for s in self.members]
        return out

    @classmethod
    def from_json(cls, field: Field, d: dict) -> SubspaceCode:
        code = cls((Subspace.from_json(field, s) for s in d["subspaces"]), field)
        if (code.n, code.k) != (d["n"], d["k"]):
            raise ValueError("header does not match members")
        return code


def code_min_distance(c: Iterable[Subspace]) -> int:
    """Minimum pairwise distance; 0 for a single codeword."""
    ms = list(c)
    if len(ms) < 2:
        return 0
    best = None
    for u, v in itertools.combinations(ms, 2):
        d = subspace_distance(u, v)
        if best is None or d < best:
            best = d
            if d <= 2 and u.k == v.k:
                break  # distinct subspaces of equal dimension are at least 2 apart
    return best


def is_spread(c: SubspaceCode) -> bool:
    q = c.field.size
    if c.k == 0 or c.n % c.k:
        return False
    if len(c) != (q ** c.n - 1) // (q ** c.k - 1):
        return False
    return all(intersect_dim(u, v) == 0 for u, v in itertools.combinations(c.members, 2))
