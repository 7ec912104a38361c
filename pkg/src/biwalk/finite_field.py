"""Small finite fields GF(p^k) built by exhaustive search.

Elements are encoded as integers ``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``
holding the coefficients of a polynomial in the generator ``x`` modulo a
monic irreducible polynomial. Only desk-scale fields (``p^k <= 64``) are
supported; all tables are precomputed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NotPrimeError, NotPrimePowerError

MAX_ORDER = 64


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def prime_power(n: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``n = p**k``, or raise NotPrimePowerError."""
    for p in range(2, n + 1):
        if n % p == 0:
            k, m = 0, n
            while m % p == 0:
                m //= p
                k += 1
            if m == 1 and is_prime(p):
                return p, k
            break
    raise NotPrimePowerError(f"{n} is not a prime power")


def _poly_mod(num: list[int], den: list[int], p: int) -> list[int]:
    # coefficient lists, lowest degree first; den monic
    num = list(num)
    while len(num) >= len(den):
        c = num[-1] % p
        shift = len(num) - len(den)
        if c:
            for i, d in enumerate(den):
                num[shift + i] = (num[shift + i] - c * d) % p
        num.pop()
    return [x % p for x in num]


def _is_irreducible(poly: list[int], p: int) -> bool:
    k = len(poly) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            div = list(tail) + [1]
            if not any(_poly_mod(poly, div, p)):
                return False
    return True


def find_irreducible(p: int, k: int) -> tuple[int, ...]:
    """First monic irreducible polynomial of degree k (lowest coefficient first)."""
    for tail in itertools.product(range(p), repeat=k):
        poly = list(reversed(tail)) + [1]
        if k == 1 or (poly[0] != 0 and _is_irreducible(poly, p)):
            return tuple(poly)
    raise AssertionError("no irreducible polynomial found")  # cannot happen


@dataclass(frozen=True, eq=False)
class GaloisField:
    p: int
    k: int
    modulus: tuple
    _mul: tuple = field(repr=False)
    primitive: int = 0

    @property
    def order(self) -> int:
        return self.p**self.k

    def digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def from_digits(self, ds) -> int:
        return sum((d % self.p) * self.p**i for i, d in enumerate(ds))

    def add(self, a: int, b: int) -> int:
        return self.from_digits(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def neg(self, a: int) -> int:
        return self.from_digits(-x for x in self.digits(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        out = 1
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return next(b for b in range(1, self.order) if self._mul[a][b] == 1)

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative order")
        x, n = a, 1
        while x != 1:
            x = self.mul(x, a)
            n += 1
        return n

    def element(self, a: int) -> "FieldElement":
        if not 0 <= a < self.order:
            raise ValueError(f"{a} does not encode an element of GF({self.order})")
        return FieldElement(self, a)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, a) for a in range(self.order)]

    @property
    def generator(self) -> "FieldElement":
        return FieldElement(self, self.primitive)

    def primitive_elements(self) -> list[int]:
        return [a for a in range(1, self.order) if self.mult_order(a) == self.order - 1]


@dataclass(frozen=True)
class FieldElement:
    field: GaloisField = field(compare=False, repr=False)
    value: int

    @property
    def coefficients(self) -> list[int]:
        return self.field.digits(self.value)

    def _lift(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other.value
        return self.field.from_digits([int(other)] + [0] * (self.field.k - 1))

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._lift(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._lift(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._lift(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._lift(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self.field.inv(self._lift(other))))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"GF({self.field.p}^{self.field.k})[{self.value}]"


@lru_cache(maxsize=None)
def gf(p: int, k: int = 1) -> GaloisField:
    """GF(p^k) with the first irreducible modulus and smallest primitive element."""
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    if k < 1 or p**k > MAX_ORDER:
        raise NotPrimePowerError(f"GF({p}^{k}) outside the supported range (order <= {MAX_ORDER})")
    modulus = find_irreducible(p, k)
    q = p**k

    def digits(a):
        return [(a // p**i) % p for i in range(k)]

    table = []
    for a in range(q):
        da = digits(a)
        row = []
        for b in range(q):
            db = digits(b)
            prod = [0] * (2 * k - 1)
            for i, x in enumerate(da):
                for j, y in enumerate(db):
                    prod[i + j] += x * y
            r = _poly_mod(prod, list(modulus), p)
            r += [0] * (k - len(r))
            row.append(sum(c * p**i for i, c in enumerate(r)))
        table.append(tuple(row))
    field_ = GaloisField(p, k, modulus, tuple(table))
    prim = next(a for a in range(1, q) if field_.mult_order(a) == q - 1)
    object.__setattr__(field_, "primitive", prim)
    return field_


def gf_order(n: int) -> GaloisField:
    p, k = prime_power(n)
    return gf(p, k)
