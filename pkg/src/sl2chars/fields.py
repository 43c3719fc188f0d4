"""Binary finite fields F_{2^f}: the residue fields of every supported ring.

Elements are integers 0..2^f-1 encoding coefficient vectors in the
polynomial basis (bit k = coefficient of x^k), so addition is XOR.  The
defining polynomial is the monic irreducible of degree f with smallest
integer encoding among those making x a generator of the unit group; this
pins down multiplication tables, generator powers and hence all digit
conventions reproducibly.

The external integer-index encoding of field elements orders them as
0, 1, g, g^2, ... (index 0 is zero, index i >= 1 is g^(i-1)).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, InvariantViolation


def poly_mul_gf2(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials in bitmask encoding."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod_gf2(a: int, m: int) -> int:
    """Remainder of a modulo m in GF(2)[x]."""
    dm = m.bit_length() - 1
    while a.bit_length() - 1 >= dm and a:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _poly_powmod(a: int, e: int, m: int) -> int:
    out = 1
    while e:
        if e & 1:
            out = poly_mod_gf2(poly_mul_gf2(out, a), m)
        a = poly_mod_gf2(poly_mul_gf2(a, a), m)
        e >>= 1
    return out


def _is_irreducible(m: int, f: int) -> bool:
    # x^(2^f) == x mod m, and x^(2^(f/p)) != x for every prime p | f.
    if _poly_powmod(2, 1 << f, m) != poly_mod_gf2(2, m):
        return False
    p = 2
    ff = f
    checked = set()
    while ff > 1:
        while ff % p:
            p += 1
        if p not in checked:
            checked.add(p)
            if _poly_powmod(2, 1 << (f // p), m) == 2:
                return False
        ff //= p
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _find_field_poly(f: int) -> int:
    """Smallest-encoding monic degree-f polynomial with x a unit-group generator."""
    if f == 1:
        return 0b11  # x + 1
    q1 = (1 << f) - 1
    for m in range(1 << f, 1 << (f + 1)):
        if not (m & 1):
            continue
        if not _is_irreducible(m, f):
            continue
        # primitivity of x
        if all(_poly_powmod(2, q1 // p, m) != 1 for p in _prime_factors(q1)):
            return m
    raise InvariantViolation(f"no primitive polynomial of degree {f}")


class BinaryField:
    """F_{2^f} with bitmask element encoding and table-driven arithmetic."""

    def __init__(self, f: int):
        if f < 1 or f > 8:
            raise ConfigurationError(f"unsupported field degree f={f}")
        self.f = f
        self.q = 1 << f
        self.poly = _find_field_poly(f)
        self.gen = 2 if f > 1 else 1
        # exp/log tables for the cyclic unit group
        exp = [1]
        for _ in range(self.q - 2):
            exp.append(poly_mod_gf2(poly_mul_gf2(exp[-1], self.gen), self.poly))
        if len(set(exp)) != self.q - 1:
            raise InvariantViolation("generator does not have full order")
        self.exp = exp
        self.log = {v: k for k, v in enumerate(exp)}
        mt = np.zeros((self.q, self.q), dtype=np.int64)
        for a in range(1, self.q):
            for b in range(1, self.q):
                mt[a, b] = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        self.mul_t = mt
        self.sqrt_t = np.zeros(self.q, dtype=np.int64)
        for a in range(self.q):
            self.sqrt_t[int(mt[a, a])] = a
        self.trace_t = np.array([self._trace(a) for a in range(self.q)], dtype=np.int64)

    def _trace(self, a: int) -> int:
        acc, x = 0, a
        for _ in range(self.f):
            acc ^= x
            x = int(self.mul_t[x, x])
        if acc not in (0, 1):
            raise InvariantViolation("trace left the prime field")
        return acc

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_t[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("field inverse of zero")
        return self.exp[(-self.log[a]) % (self.q - 1)] if a != 1 else 1

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e else 1
        return self.exp[(self.log[a] * e) % (self.q - 1)]

    def sqrt(self, a: int) -> int:
        """The unique square root (squaring is a bijection in characteristic 2)."""
        return int(self.sqrt_t[a])

    def trace(self, a: int) -> int:
        return int(self.trace_t[a])

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> list[int]:
        """Units in generator-power order: 1, g, g^2, ..."""
        return list(self.exp)

    def index_of(self, a: int) -> int:
        return 0 if a == 0 else self.log[a] + 1

    def from_index(self, i: int) -> int:
        if i == 0:
            return 0
        if not 1 <= i <= self.q - 1:
            raise ValueError(f"field index {i} out of range for q={self.q}")
        return self.exp[i - 1]

    def nontrivial_characters(self):
        """All q-1 nontrivial additive characters as exponent tables mod 2.

        Character c is x -> (-1)^Tr(c*x); they are listed with c running
        through the units in generator-power order.
        """
        out = []
        for c in self.units():
            tbl = np.array([self.trace(self.mul(c, x)) for x in self.elements()],
                           dtype=np.int64)
            out.append((c, tbl))
        return out

    def __repr__(self):
        return f"BinaryField(q={self.q})"


@lru_cache(maxsize=None)
def binary_field(f: int) -> BinaryField:
    return BinaryField(f)
