"""Exact arithmetic in truncated discrete valuation rings of residue characteristic 2.

Supported families, all of size q^r with maximal ideal (pi), pi^r = 0:

  * ``char0-unramified``: Z/2^r for q = 2; for q = 2^f the Galois ring
    (Z/2^r)[x]/(h(x)), h the smallest-encoding monic lift of the field
    polynomial of F_q.  Uniformizer pi = 2.
  * ``char0-eisenstein``: the ramified quadratic truncation with pi^2 = 2.
    Elements are pairs a0 + a1*pi with a0 mod 2^ceil(r/2), a1 mod 2^floor(r/2).
  * ``char2``: F_q[t]/(t^r) with pi = t.

Every ring enumerates its elements in a fixed deterministic order and exposes
integer element codes 0..q^r-1.  Arithmetic is table-driven so that bulk
operations vectorise with numpy.  Digit expansions v = sum (v)_i pi^i use
Teichmueller representatives (binary digits when q = 2), and equality of
codes is equality of elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, ConfigurationError, DomainError, InvariantViolation
from .fields import BinaryField, binary_field

KIND_UNRAMIFIED = "char0-unramified"
KIND_EISENSTEIN = "char0-eisenstein"
KIND_CHAR2 = "char2"

_TABLE_CAP = 4096  # largest ring size for which n x n tables are built


@dataclass(frozen=True)
class RootOfUnity:
    """exp(2*pi*i * exponent / modulus), stored as a reduced exact fraction."""

    modulus: int
    exponent: int

    @staticmethod
    def make(modulus: int, exponent: int) -> "RootOfUnity":
        exponent %= modulus
        if exponent == 0:
            return RootOfUnity(1, 0)
        import math

        g = math.gcd(exponent, modulus)
        return RootOfUnity(modulus // g, exponent // g)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        import math

        m = self.modulus * other.modulus // math.gcd(self.modulus, other.modulus)
        return RootOfUnity.make(
            m, self.exponent * (m // self.modulus) + other.exponent * (m // other.modulus)
        )

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity.make(self.modulus, -self.exponent)

    @property
    def is_one(self) -> bool:
        return self.exponent == 0

    def scaled_exponent(self, modulus: int) -> int:
        """Exponent after rescaling to the given modulus (must be a multiple)."""
        if modulus % self.modulus:
            raise DomainError(f"order {self.modulus} does not divide {modulus}")
        return self.exponent * (modulus // self.modulus)

    def __repr__(self):
        if self.modulus == 1:
            return "1"
        if self.modulus == 2:
            return "-1"
        return f"zeta({self.modulus})^{self.exponent}"


class TruncatedRing:
    """Base class: subclasses fill in the raw tables, this wires up digits."""

    kind: str

    def __init__(self, q: int, r: int, e: int):
        self.q = q
        self.r = r
        self.e = e
        self.f = q.bit_length() - 1
        self.field: BinaryField = binary_field(self.f)
        self.n = q**r
        self.ell = (r + 1) // 2
        self.ellp = r // 2
        self.eps = 1 if r % 2 == 0 else 0
        if self.n > _TABLE_CAP:
            raise CapacityError(f"ring of size {self.n} exceeds table capacity {_TABLE_CAP}")

    # subclasses set: add_t, mul_t, neg_t (arrays), pi (code), one (code),
    # teich (array of q ring codes indexed by field bitmask)

    def _finish(self):
        n, r, q = self.n, self.r, self.q
        self.zero = 0
        pw = [self.one]
        for _ in range(r):
            pw.append(int(self.mul_t[pw[-1], self.pi]))
        if pw[r] != 0 or (r >= 1 and pw[r - 1] == 0):
            raise InvariantViolation("pi^r != 0 or pi^(r-1) == 0")
        self.pi_pows = pw
        # digit tables: enumerate all digit tuples, map through Teichmueller lifts
        digs = np.zeros((n, r), dtype=np.int64)
        idx = np.arange(n)
        for i in range(r):
            digs[:, i] = (idx // q**i) % q
        acc = np.zeros(n, dtype=np.int64)
        for i in range(r):
            term = self.mul_t[self.teich[digs[:, i]], pw[i]]
            acc = self.add_t[acc, term]
        if len(np.unique(acc)) != n:
            raise InvariantViolation("digit expansion is not a bijection")
        self._code_of_digits = acc
        self.digit_t = np.zeros((n, r), dtype=np.int64)
        self.digit_t[acc] = digs
        self.val_t = np.where(
            self.digit_t.any(axis=1), (self.digit_t != 0).argmax(axis=1), r
        ).astype(np.int64)
        one_t = self.mul_t[np.arange(n), :] == self.one
        rows, cols = np.nonzero(one_t)
        self.inv_t = np.full(n, -1, dtype=np.int64)
        self.inv_t[rows] = cols
        self.two = int(self.add_t[self.one, self.one])

    # -- scalar operations ------------------------------------------------

    def add(self, u: int, v: int) -> int:
        return int(self.add_t[u, v])

    def sub(self, u: int, v: int) -> int:
        return int(self.add_t[u, self.neg_t[v]])

    def mul(self, u: int, v: int) -> int:
        return int(self.mul_t[u, v])

    def neg(self, u: int) -> int:
        return int(self.neg_t[u])

    def inv(self, u: int) -> int:
        w = int(self.inv_t[u])
        if w < 0:
            raise DomainError(f"element {u} is not a unit")
        return w

    def is_unit(self, u: int) -> bool:
        return int(self.val_t[u]) == 0

    def val(self, u: int) -> int:
        return int(self.val_t[u])

    def pi_pow(self, i: int) -> int:
        return self.pi_pows[i] if i <= self.r else 0

    def elements(self) -> np.ndarray:
        return np.arange(self.n)

    def units(self) -> np.ndarray:
        return np.nonzero(self.val_t == 0)[0]

    def digits(self, v: int) -> tuple[int, ...]:
        return tuple(int(d) for d in self.digit_t[v])

    def from_digits(self, ds) -> int:
        ds = list(ds)
        if len(ds) > self.r:
            raise DomainError("too many digits")
        ds += [0] * (self.r - len(ds))
        code = 0
        for i, d in enumerate(ds):
            code += d * self.q**i
        return int(self._code_of_digits[code])

    @lru_cache(maxsize=None)
    def subring(self, i: int) -> "TruncatedRing":
        if not 1 <= i <= self.r:
            raise DomainError(f"truncation level {i} out of range")
        if i == self.r:
            return self
        return ring_make(self.kind, self.q, i, self.e)

    @lru_cache(maxsize=None)
    def reduce_map(self, i: int) -> np.ndarray:
        """Codes of the canonical images in the level-i quotient (digit truncation)."""
        sub = self.subring(i)
        if i == self.r:
            return np.arange(self.n)
        out = np.zeros(self.n, dtype=np.int64)
        base = self.q**i
        for code in range(self.n):
            out[code] = sub._code_of_digits[int(np.dot(
                self.digit_t[code, :i], [self.q**k for k in range(i)]))]
        return out

    def reduce(self, v: int, i: int) -> int:
        return int(self.reduce_map(i)[v])

    @lru_cache(maxsize=None)
    def lift_map(self, i: int) -> np.ndarray:
        """Zero-extension section of reduce_map(i), indexed by subring codes."""
        sub = self.subring(i)
        out = np.zeros(sub.n, dtype=np.int64)
        for code in range(sub.n):
            out[code] = self.from_digits(sub.digits(code))
        return out

    def lift(self, v_sub: int, i: int) -> int:
        return int(self.lift_map(i)[v_sub])

    @lru_cache(maxsize=None)
    def div_pi_map(self, k: int) -> np.ndarray:
        """Canonical preimages under multiplication by pi^k (digit shift)."""
        out = np.zeros(self.n, dtype=np.int64)
        for code in range(self.n):
            out[code] = self.from_digits(self.digits(code)[k:])
        return out

    def div_pi(self, v: int, k: int) -> int:
        if self.val(v) < k:
            raise DomainError(f"valuation {self.val(v)} < {k}, not divisible")
        return int(self.div_pi_map(k)[v])

    @lru_cache(maxsize=None)
    def squares(self) -> frozenset:
        diag = self.mul_t[np.arange(self.n), np.arange(self.n)]
        return frozenset(int(x) for x in np.unique(diag))

    def is_square(self, v: int) -> bool:
        if self.kind == KIND_CHAR2:
            return all(d == 0 for d in self.digits(v)[1::2])
        return v in self.squares()

    def embed_residue(self, x: int) -> int:
        """Teichmueller lift of a residue-field element (bitmask encoding)."""
        return int(self.teich[x])

    # -- text encoding ----------------------------------------------------

    def element_to_text(self, v: int) -> str:
        return ",".join(str(self.field.index_of(d)) for d in self.digits(v))

    def element_from_text(self, s: str) -> int:
        parts = [p.strip() for p in s.split(",")] if s.strip() else []
        ds = [self.field.from_index(int(p)) for p in parts]
        return self.from_digits(ds)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "q": self.q,
            "r": self.r,
            "e": self.e,
            "size": self.n,
            "ell": self.ell,
            "ell_prime": self.ellp,
        }

    def __repr__(self):
        return f"TruncatedRing({self.kind}, q={self.q}, r={self.r}, e={self.e})"


class _UnramifiedRing(TruncatedRing):
    kind = KIND_UNRAMIFIED

    def __init__(self, q: int, r: int):
        super().__init__(q, r, 1)
        n, f, m = self.n, self.f, 1 << r
        idx = np.arange(n)
        coeffs = np.stack([(idx // m**k) % m for k in range(f)], axis=1)
        if f == 1:
            self.add_t = (idx[:, None] + idx[None, :]) % m
            self.mul_t = (idx[:, None] * idx[None, :]) % m
            self.neg_t = (-idx) % m
        else:
            # reduction data: coefficient vectors of x^k mod h for k < 2f-1
            hbits = [(binary_field(f).poly >> k) & 1 for k in range(f)]
            xpow = [[1 if j == k else 0 for j in range(f)] for k in range(f)]
            for k in range(f, 2 * f - 1):
                prev = xpow[k - 1]
                shifted = [0] + prev[:-1]
                lead = prev[f - 1]
                xpow.append([(shifted[j] - lead * hbits[j]) % m for j in range(f)])
            enc = m ** np.arange(f)
            self.add_t = (((coeffs[:, None, :] + coeffs[None, :, :]) % m) @ enc) % (m**f)
            prod = np.zeros((n, n, f), dtype=np.int64)
            for i in range(f):
                for j in range(f):
                    cij = (coeffs[:, None, i] * coeffs[None, :, j]) % m
                    for k in range(f):
                        c = xpow[i + j][k]
                        if c:
                            prod[:, :, k] = (prod[:, :, k] + c * cij) % m
            self.mul_t = (prod @ enc) % (m**f)
            self.neg_t = (((-coeffs) % m) @ enc) % (m**f)
        self.one = 1
        self.pi = 2 if f == 1 else 2
        # Teichmueller lifts: v -> v^q stabilises after r+1 rounds
        t = np.arange(n)
        for _ in range(r + 1):
            for _ in range(f):
                t = self.mul_t[t, t]
        res = (coeffs % 2) @ (1 << np.arange(f))
        teich = np.zeros(self.q, dtype=np.int64)
        teich[res] = t
        self.teich = teich
        self._coeffs = coeffs
        self._finish()
        # Frobenius and trace down to Z/2^r (used by the additive characters)
        sig = np.zeros(n, dtype=np.int64)
        for code in range(n):
            sig[code] = self.from_digits(
                [self.field.mul(d, d) for d in self.digits(code)]
            )
        self._frob = sig
        tr = np.arange(n)
        cur = np.arange(n)
        for _ in range(f - 1):
            cur = sig[cur]
            tr = self.add_t[tr, cur]
        self._trace = tr

    def trace_to_base(self, v: int) -> int:
        """Galois-ring trace as an integer mod 2^r."""
        w = int(self._trace[v])
        c = self._coeffs[w]
        if any(int(x) for x in c[1:]):
            raise InvariantViolation("trace did not land in the base ring")
        return int(c[0])


class _EisensteinRing(TruncatedRing):
    kind = KIND_EISENSTEIN

    def __init__(self, q: int, r: int, e: int):
        if q != 2 or e != 2:
            raise ConfigurationError("eisenstein rings are supported only for q=2, e=2")
        if r < 2:
            raise ConfigurationError("eisenstein truncation needs r >= 2")
        super().__init__(q, r, e)
        la, lb = self.ell, self.ellp  # moduli exponents for the two coordinates
        ma, mb = 1 << la, 1 << lb
        idx = np.arange(self.n)
        a0, a1 = idx % ma, idx // ma
        enc = lambda x0, x1: (x0 % ma) + (x1 % mb) * ma
        self.add_t = enc(a0[:, None] + a0[None, :], a1[:, None] + a1[None, :])
        self.mul_t = enc(
            a0[:, None] * a0[None, :] + 2 * a1[:, None] * a1[None, :],
            a0[:, None] * a1[None, :] + a1[:, None] * a0[None, :],
        )
        self.neg_t = enc(-a0, -a1)
        self.one = 1
        self.pi = ma  # (a0, a1) = (0, 1)
        self.teich = np.array([0, 1], dtype=np.int64)
        self._finish()


class _LaurentRing(TruncatedRing):
    kind = KIND_CHAR2

    def __init__(self, q: int, r: int):
        super().__init__(q, r, 1)
        n, f = self.n, self.f
        idx = np.arange(n)
        self.add_t = idx[:, None] ^ idx[None, :]
        digs = np.stack([(idx // q**i) % q for i in range(r)], axis=1)
        mul = np.zeros((n, n), dtype=np.int64)
        fmul = self.field.mul_t
        for i in range(r):
            for j in range(r - i):
                term = fmul[digs[:, None, i], digs[None, :, j]]
                mul ^= term * q ** (i + j)
        self.mul_t = mul
        self.neg_t = idx.copy()
        self.one = 1
        self.pi = q
        self.teich = np.arange(q, dtype=np.int64)
        self._finish()


@lru_cache(maxsize=None)
def ring_make(kind: str, q: int, r: int, e: int = 1) -> TruncatedRing:
    """Construct (and cache) a truncated ring; see the module docstring."""
    if r < 1:
        raise ConfigurationError(f"truncation length r={r} must be >= 1")
    if q < 2 or q & (q - 1):
        raise ConfigurationError(f"residue field size q={q} must be a power of 2")
    if kind == KIND_UNRAMIFIED:
        if e != 1:
            raise ConfigurationError("unramified rings have e=1")
        return _UnramifiedRing(q, r)
    if kind == KIND_EISENSTEIN:
        return _EisensteinRing(q, r, e)
    if kind == KIND_CHAR2:
        if e != 1:
            raise ConfigurationError("char2 rings have e=1")
        return _LaurentRing(q, r)
    raise ConfigurationError(f"unknown ring kind {kind!r}")


def val(ring: TruncatedRing, v: int) -> int:
    """Largest i with v in pi^i * ring; val(0) = r by convention."""
    return ring.val(v)


def reduce(ring: TruncatedRing, v: int, i: int) -> int:
    """Canonical image of v in the level-i quotient ring."""
    return ring.reduce(v, i)


def alpha_decompose(ring: TruncatedRing, alpha: int, k: int) -> tuple[int, int, int]:
    """Split alpha = w1^2 + pi^s * w2^2 exactly (char2 rings).

    s is the least odd digit position of alpha below k when one exists,
    otherwise 2*floor(k/2)+1; when s < k the witness w2 is a unit.  Since
    squares occupy exactly the even digit positions, the split is plain
    digit surgery plus field square roots.
    """
    if ring.kind != KIND_CHAR2:
        raise DomainError("alpha decomposition applies to char2 rings only")
    if not 0 <= k <= ring.r:
        raise DomainError(f"k={k} out of range")
    digs = ring.digits(alpha)
    odd_nonzero = [i for i in range(1, ring.r, 2) if digs[i]]
    below = [i for i in odd_nonzero if i < k]
    s = below[0] if below else 2 * (k // 2) + 1
    sqrt = ring.field.sqrt
    w1 = ring.from_digits(
        [sqrt(digs[2 * i]) if 2 * i < ring.r else 0 for i in range((ring.r + 1) // 2)]
    )
    w2_digits = []
    pos = s
    while pos < ring.r:
        w2_digits.append(sqrt(digs[pos]))
        pos += 2
    w2 = ring.from_digits(w2_digits)
    lhs = ring.add(ring.mul(w1, w1), ring.mul(ring.pi_pow(s) if s <= ring.r else 0,
                                              ring.mul(w2, w2)))
    if lhs != alpha:
        raise InvariantViolation("alpha decomposition identity failed")
    if s < k and not ring.is_unit(w2):
        raise InvariantViolation("w2 must be a unit when s < k")
    return w1, w2, s


class AdditiveCharacter:
    """An additive character of the ring, valued in 2-power roots of unity."""

    def __init__(self, ring: TruncatedRing, modulus: int, exps: np.ndarray, label: str):
        self.ring = ring
        self.modulus = modulus
        self.exps = exps.astype(np.int64) % modulus
        self.label = label
        self._verify()

    def _verify(self):
        ring, N = self.ring, self.modulus
        if self.exps[ring.pi_pow(ring.r - 1)] % N == 0:
            raise InvariantViolation("character is trivial on pi^(r-1)")
        if ring.n <= 4096:
            want = (self.exps[:, None] + self.exps[None, :]) % N
            got = self.exps[ring.add_t] % N
            if not np.array_equal(want, got):
                raise InvariantViolation("character is not additive")

    def __call__(self, v: int) -> RootOfUnity:
        return RootOfUnity.make(self.modulus, int(self.exps[v]))

    def exp_of(self, v: int) -> int:
        return int(self.exps[v])

    def is_one_at(self, v: int) -> bool:
        return int(self.exps[v]) % self.modulus == 0

    def residue_character(self) -> np.ndarray:
        """Exponent table mod 2 of x -> psi(pi^(r-1) * lift(x)) on the residue field."""
        ring, N = self.ring, self.modulus
        top = ring.pi_pow(ring.r - 1)
        out = np.zeros(ring.q, dtype=np.int64)
        for x in range(ring.q):
            e = int(self.exps[ring.mul(top, ring.embed_residue(x))]) % N
            if e == 0:
                out[x] = 0
            elif 2 * e == N:
                out[x] = 1
            else:
                raise InvariantViolation("residue character value is not +-1")
        return out

    def __repr__(self):
        return f"AdditiveCharacter({self.label}, N={self.modulus})"


def psi_candidates(ring: TruncatedRing):
    """Deterministic stream of valid additive characters (nontrivial on pi^(r-1))."""
    seen = []
    if ring.kind == KIND_CHAR2:
        cs = [c for c in ring.field.units() if ring.field.trace(c) == 1]
        top_digit = ring.digit_t[:, ring.r - 1]
        for c in cs:
            for u in [ring.one] + [int(x) for x in ring.units() if int(x) != ring.one]:
                scaled = ring.mul_t[u, np.arange(ring.n)]
                exps = ring.field.trace_t[ring.field.mul_t[c, top_digit[scaled]]]
                if exps[ring.pi_pow(ring.r - 1)] % 2 == 0:
                    continue
                key = exps.tobytes()
                if key in seen:
                    continue
                seen.append(key)
                yield AdditiveCharacter(ring, 2, exps, f"char2[c={c},u={u}]")
    elif ring.kind == KIND_UNRAMIFIED:
        halfpi = ring.pi_pow(ring.r - 1)
        for lam in ring.units():
            lam = int(lam)
            if ring.trace_to_base(ring.mul(lam, halfpi)) == 0:
                continue
            exps = np.array(
                [ring.trace_to_base(ring.mul(lam, v)) for v in range(ring.n)],
                dtype=np.int64,
            )
            key = exps.tobytes()
            if key in seen:
                continue
            seen.append(key)
            yield AdditiveCharacter(ring, 1 << ring.r, exps, f"unram[lam={lam}]")
    elif ring.kind == KIND_EISENSTEIN:
        ma = 1 << ring.ell
        idx = np.arange(ring.n)
        a0, a1 = idx % ma, idx // ma
        shift = 1 << (ring.ell - ring.ellp)
        for ccode in range(1, ring.n):
            c0, c1 = ccode % ma, ccode // ma
            exps = (c0 * a0 + c1 * a1 * shift) % ma
            if exps[ring.pi_pow(ring.r - 1)] % ma == 0:
                continue
            key = exps.tobytes()
            if key in seen:
                continue
            seen.append(key)
            yield AdditiveCharacter(ring, ma, exps, f"eis[c=({c0},{c1})]")
    else:  # pragma: no cover
        raise ConfigurationError(ring.kind)


@lru_cache(maxsize=None)
def psi_alternatives(ring: TruncatedRing, count: int = 2) -> tuple[AdditiveCharacter, ...]:
    out = []
    for psi in psi_candidates(ring):
        out.append(psi)
        if len(out) == count:
            break
    if not out:
        raise InvariantViolation("no valid additive character found")
    return tuple(out)


def psi_make(ring: TruncatedRing) -> AdditiveCharacter:
    """The canonical additive character (first in the deterministic search)."""
    return psi_alternatives(ring, 1)[0]


def xi_compute(field: BinaryField, bpsi: np.ndarray) -> int:
    """The unique xi with ker(bpsi) = { xi*x^2 + x : x in F_q }.

    bpsi is the exponent table mod 2 of a nontrivial additive character of
    the residue field.  Exhausts xi over the units and insists on a unique
    match; zero or several matches violate the construction.
    """
    if not bpsi.any():
        raise DomainError("residue character must be nontrivial")
    kernel = frozenset(int(x) for x in np.nonzero(bpsi == 0)[0])
    hits = []
    for xi in field.units():
        image = frozenset(
            field.add(field.mul(xi, field.mul(x, x)), x) for x in field.elements()
        )
        if image == kernel:
            hits.append(xi)
    if len(hits) != 1:
        raise InvariantViolation(f"expected exactly one xi, found {hits}")
    return hits[0]
