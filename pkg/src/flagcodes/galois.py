"""Finite-field tower GF(p) < GF(q) < GF(q^k) < GF(q^2k).

Every element of every level is a plain ``int``: an element ``sum a_i b^i`` of a
level built over a sub-level ``S`` encodes as ``sum enc(a_i) * |S|**i``.  Unrolled,
this is the base-``p`` positional encoding of the flattened coefficient vector,
so addition at any level is digitwise addition mod ``p`` and a sub-level
element has the same integer code at every level above it.

Polynomials are coefficient lists, constant term first, with coefficients
encoded in the level they live over.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

from flagcodes.matspace import Matrix

# 2D add/mul tables are built for levels up to this size; bigger levels fall
# back to log tables and cannot carry matrices.
TABLE_LIMIT = 1024
MAX_LEVEL_SIZE = 1 << 16


class FieldError(ValueError):
    pass


class PrimitivityError(FieldError):
    """An override polynomial failed the primitivity test.

    ``reason`` is one of ``"not monic"``, ``"reducible"`` or ``"order"``.
    """

    def __init__(self, poly, reason: str, detail: str = ""):
        self.poly = tuple(poly)
        self.reason = reason
        msg = f"polynomial {list(poly)} is not primitive: {reason}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def order_dividing(x, exponent: int, power: Callable, is_one: Callable) -> int:
    """Multiplicative order of ``x`` given that ``x**exponent`` is the identity.

    Strips prime factors off ``exponent`` while the power stays trivial.
    """
    if not is_one(power(x, exponent)):
        raise ValueError(f"element does not satisfy x^{exponent} = 1")
    order = exponent
    for r in factorize(exponent):
        while order % r == 0 and is_one(power(x, order // r)):
            order //= r
    return order


class Field:
    """One level of the tower.

    ``base`` is the level this one extends (``None`` for the prime field) and
    ``poly`` the monic defining polynomial over ``base``.  ``alpha`` is the
    class of ``x``, checked to be primitive on construction.
    """

    def __init__(self, p: int, base: Field | None = None, poly: Sequence[int] | None = None,
                 level: int = 0):
        self.p = p
        self.base = base
        self.level = level
        if base is None:
            if not is_prime(p):
                raise FieldError(f"p={p} is not prime")
            self.poly = None
            self.degree = 1
            self.size = p
        else:
            reason = primitivity_failure(poly, base)
            if reason is not None:
                raise PrimitivityError(poly, *reason)
            self.poly = tuple(poly)
            self.degree = len(self.poly) - 1
            self.size = base.size ** self.degree
        if self.size > MAX_LEVEL_SIZE:
            raise FieldError(f"level of size {self.size} exceeds {MAX_LEVEL_SIZE}")
        self._build()

    def __repr__(self):
        return f"GF({self.size})"

    # construction

    def _build(self):
        n = self.size
        p = self.p
        digits = []
        w = 1
        while w < n:
            digits.append(w)
            w *= p
        self._pw = digits
        self.neg_table = [self._neg_digits(a) for a in range(n)]
        if n <= TABLE_LIMIT:
            self.add_table = [[self._add_digits(a, b) for b in range(n)] for a in range(n)]
        else:
            self.add_table = None

        exp = [0] * (n - 1)
        if self.base is None:
            g = next(g for g in range(1, p)
                     if order_dividing(g, p - 1, lambda a, m: pow(a, m, p), lambda a: a == 1) == p - 1)
            v = 1
            for i in range(n - 1):
                exp[i] = v
                v = v * g % p
        else:
            S, d = self.base, self.degree
            cs = [1] + [0] * (d - 1)
            for i in range(n - 1):
                exp[i] = self.encode(cs)
                cs = _times_x(cs, self.poly, S)
        log = [0] * n
        for i, v in enumerate(exp):
            log[v] = i
        self.exp_table = exp
        self.log_table = log
        self.alpha = exp[1] if n > 2 else 1
        self.inv_table = [0] + [exp[(-log[a]) % (n - 1)] for a in range(1, n)]
        if n <= TABLE_LIMIT:
            m = n - 1
            self.mul_table = [[0] * n] + [
                [0] + [exp[(log[a] + log[b]) % m] for b in range(1, n)] for a in range(1, n)
            ]
        else:
            self.mul_table = None

    def _add_digits(self, a: int, b: int) -> int:
        p, out = self.p, 0
        for w in self._pw:
            out += ((a // w + b // w) % p) * w
        return out

    def _neg_digits(self, a: int) -> int:
        p, out = self.p, 0
        for w in self._pw:
            out += ((-(a // w)) % p) * w
        return out

    # encoding

    def coeffs(self, v: int) -> list[int]:
        """Coefficient vector of ``v`` over the base level (constant first)."""
        if self.base is None:
            return [v]
        s = self.base.size
        return [(v // s ** i) % s for i in range(self.degree)]

    def encode(self, cs: Sequence[int]) -> int:
        if self.base is None:
            return cs[0] % self.p
        s = self.base.size
        return sum(c * s ** i for i, c in enumerate(cs))

    # arithmetic on codes

    @property
    def is_prime_field(self) -> bool:
        return self.size == self.p

    def add(self, a: int, b: int) -> int:
        if self.add_table is not None:
            return self.add_table[a][b]
        return self._add_digits(a, b)

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg_table[b])

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        if self.mul_table is not None:
            return self.mul_table[a][b]
        return self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.size - 1)]

    def inv(self, a: int) -> int:
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return self.inv_table[a]

    def pow(self, a: int, m: int) -> int:
        if a == 0:
            if m < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if m == 0 else 0
        return self.exp_table[(self.log_table[a] * m) % (self.size - 1)]

    def element_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        return order_dividing(a, self.size - 1, self.pow, lambda v: v == 1)

    def elements(self) -> range:
        return range(self.size)

    def __call__(self, v: int) -> FieldElement:
        if not 0 <= v < self.size:
            raise ValueError(f"{v} is not an element code of {self}")
        return FieldElement(self, v)


@dataclass(frozen=True)
class FieldElement:
    """Value wrapper around a level and an element code."""

    field: Field
    value: int

    @property
    def coeffs(self) -> list[int]:
        return self.field.coeffs(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements live in different levels")
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self.field.inv(self._other(other))))

    def __pow__(self, m: int):
        return FieldElement(self.field, self.field.pow(self.value, m))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def order(self) -> int:
        return self.field.element_order(self.value)

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.field}({self.value})"


def element_order(x: FieldElement) -> int:
    return x.order()


# polynomials over a level, as lists of codes with the constant term first


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _times_x(cs: list[int], poly: Sequence[int], F: Field) -> list[int]:
    # multiply a reduced residue by x modulo the monic poly
    top = cs[-1]
    out = [0] + cs[:-1]
    if top:
        for i in range(len(out)):
            out[i] = F.sub(out[i], F.mul(top, poly[i]))
    return out


def poly_divmod(a: Sequence[int], b: Sequence[int], F: Field) -> tuple[list[int], list[int]]:
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = F.inv(b[-1])
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = F.mul(a[-1], inv_lead)
        shift = len(a) - len(b)
        quot[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, bi))
        _trim(a)
    return quot, a


def poly_mul(a: Sequence[int], b: Sequence[int], F: Field) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return _trim(out)


def _poly_powmod_x(m: int, poly: Sequence[int], F: Field) -> list[int]:
    result = [1]
    base = [0, 1]
    while m:
        if m & 1:
            result = poly_divmod(poly_mul(result, base, F), poly, F)[1]
        base = poly_divmod(poly_mul(base, base, F), poly, F)[1]
        m >>= 1
    return result


def monic_polynomials(F: Field, degree: int) -> Iterable[tuple[int, ...]]:
    """All monic polynomials of a degree, in lexicographic constant-first order."""
    for cs in itertools.product(range(F.size), repeat=degree):
        yield cs + (1,)


def is_irreducible(poly: Sequence[int], F: Field) -> bool:
    poly = list(poly)
    d = len(poly) - 1
    if d < 1:
        return False
    for j in range(1, d // 2 + 1):
        for f in monic_polynomials(F, j):
            if not poly_divmod(poly, f, F)[1]:
                return False
    return True


def primitivity_failure(poly: Sequence[int] | None, F: Field) -> tuple[str, str] | None:
    """Return ``(reason, detail)`` if ``poly`` is not primitive over ``F``."""
    if poly is None or len(poly) < 2:
        return ("not monic", "degree must be at least 1")
    poly = list(poly)
    if poly[-1] != 1 or any(not 0 <= c < F.size for c in poly):
        return ("not monic", "leading coefficient must be 1")
    if not is_irreducible(poly, F):
        return ("reducible", "")
    if poly[0] == 0:
        return ("order", "root is zero")
    n = F.size ** (len(poly) - 1) - 1

    def power(_, m):
        return _poly_powmod_x(m, poly, F)

    o = order_dividing(None, n, power, lambda r: r == [1])
    if o != n:
        return ("order", f"root has order {o}, expected {n}")
    return None


def is_primitive(poly: Sequence[int], F: Field) -> bool:
    if not poly or poly[-1] != 1:
        raise ValueError(f"polynomial {list(poly)} is not monic")
    return primitivity_failure(poly, F) is None


def smallest_primitive(F: Field, degree: int) -> tuple[int, ...]:
    for cand in monic_polynomials(F, degree):
        if primitivity_failure(cand, F) is None:
            return cand
    raise FieldError(f"no primitive polynomial of degree {degree} over {F}")  # pragma: no cover


def companion_matrix(poly: Sequence[int], F: Field) -> Matrix:
    """Superdiagonal ones, last row ``-p_0, ..., -p_{d-1}``."""
    poly = list(poly)
    if len(poly) < 2 or poly[-1] != 1:
        raise ValueError(f"polynomial {poly} is not monic")
    d = len(poly) - 1
    rows = [[0] * d for _ in range(d)]
    for i in range(d - 1):
        rows[i][i + 1] = 1
    rows[d - 1] = [F.neg(c) for c in poly[:d]]
    return Matrix(F, rows)


class FieldTower:
    """The four levels GF(p), GF(q), GF(q^k), GF(q^2k).

    The top level is a quadratic extension of GF(q^k), so its defining
    polynomial is the minimal polynomial of ``omega`` over GF(q^k).
    """

    def __init__(self, p: int, e: int, k: int, levels: Sequence[Field]):
        self.p, self.e, self.k = p, e, k
        self.levels = tuple(levels)

    @property
    def prime(self) -> Field:
        return self.levels[0]

    @property
    def base(self) -> Field:
        """GF(q)."""
        return self.levels[1]

    @property
    def ext(self) -> Field:
        """GF(q^k)."""
        return self.levels[2]

    @property
    def top(self) -> Field:
        """GF(q^2k)."""
        return self.levels[3]

    @property
    def q(self) -> int:
        return self.base.size

    @property
    def qk(self) -> int:
        return self.ext.size

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def alpha(self) -> FieldElement:
        return FieldElement(self.ext, self.ext.alpha)

    @property
    def omega(self) -> FieldElement:
        return FieldElement(self.top, self.top.alpha)

    @property
    def polys(self) -> tuple[tuple[int, ...], ...]:
        return tuple(f.poly for f in self.levels[1:])

    @cached_property
    def P(self) -> Matrix:
        """Companion matrix of the GF(q^k) polynomial, over GF(q)."""
        return companion_matrix(self.ext.poly, self.base)

    @cached_property
    def _iso_table(self) -> list[Matrix]:
        k = self.k
        P = self.P
        powers = [Matrix.identity(self.base, k)]
        for _ in range(1, k):
            powers.append(powers[-1] @ P)
        out = []
        for v in range(self.qk):
            acc = Matrix.zeros(self.base, k, k)
            for a, Pi in zip(self.ext.coeffs(v), powers):
                if a:
                    acc = acc + Pi.scale(a)
            out.append(acc)
        return out

    def field_iso(self, x: FieldElement | int) -> Matrix:
        """Map ``sum a_i alpha^i`` to ``sum a_i P^i``."""
        if isinstance(x, FieldElement):
            if x.field is not self.ext:
                raise ValueError("field_iso expects an element of GF(q^k)")
            x = x.value
        return self._iso_table[x]

    def descriptor(self) -> dict:
        return {"p": self.p, "e": self.e, "k": self.k, "polys": [list(f) for f in self.polys]}

    @classmethod
    def from_descriptor(cls, d: dict) -> FieldTower:
        return build_tower(d["p"], d["e"], d["k"], d.get("polys"))

    def __repr__(self):
        return f"FieldTower(p={self.p}, e={self.e}, k={self.k}, polys={[list(f) for f in self.polys]})"


def build_tower(p: int, e: int, k: int,
                overrides: Sequence[Sequence[int] | None] | None = None) -> FieldTower:
    """Build the tower, picking the smallest primitive polynomial where no override is given."""
    if not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if e < 1 or k < 1:
        raise FieldError("e and k must be positive")
    overrides = list(overrides or [])
    overrides += [None] * (3 - len(overrides))
    if len(overrides) > 3:
        raise FieldError("at most three polynomials (one per extension level)")
    levels = [Field(p)]
    for poly, deg, lvl in zip(overrides, (e, k, 2), (1, 2, 3)):
        below = levels[-1]
        if poly is None:
            poly = smallest_primitive(below, deg)
        elif len(poly) - 1 != deg:
            raise FieldError(f"level {lvl} polynomial must have degree {deg}")
        levels.append(Field(p, below, poly, level=lvl))
    return FieldTower(p, e, k, levels)
