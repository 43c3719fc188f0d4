"""2x2 matrices over a truncated ring and enumerated subgroups of GL2.

A matrix [[a,b],[c,d]] is packed into a single integer code with four
bit-fields of width log2(q^r), so whole groups live in numpy arrays and
products reduce to table gathers.  GroupSets are immutable sorted code
arrays with log-time membership.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError, InvariantViolation
from .rings import TruncatedRing

ENUM_GUARD = 1 << 30  # largest q^(4r) we are willing to scan


class MatrixSpace:
    """Packed-code arithmetic for M_2 over one ring."""

    def __init__(self, ring: TruncatedRing):
        self.ring = ring
        self.n = ring.n
        self.bits = (ring.n - 1).bit_length()
        self.mask = ring.n - 1
        self.code_bound = ring.n**4
        self.identity = self.encode(ring.one, 0, 0, ring.one)

    def encode(self, a, b, c, d):
        s = self.bits
        return (((np.int64(a) << s | b) << s | c) << s) | d

    def decode(self, m):
        s, k = self.bits, self.mask
        m = np.asarray(m, dtype=np.int64) if not np.isscalar(m) else np.int64(m)
        return (m >> 3 * s) & k, (m >> 2 * s) & k, (m >> s) & k, m & k

    def mul(self, x, y):
        """Matrix product; broadcasts over numpy arrays of codes."""
        a1, b1, c1, d1 = self.decode(x)
        a2, b2, c2, d2 = self.decode(y)
        A, M = self.ring.add_t, self.ring.mul_t
        return self.encode(
            A[M[a1, a2], M[b1, c2]],
            A[M[a1, b2], M[b1, d2]],
            A[M[c1, a2], M[d1, c2]],
            A[M[c1, b2], M[d1, d2]],
        )

    def det(self, x):
        a, b, c, d = self.decode(x)
        R = self.ring
        return R.add_t[R.mul_t[a, d], R.neg_t[R.mul_t[b, c]]]

    def trace(self, x):
        a, _, _, d = self.decode(x)
        return self.ring.add_t[a, d]

    def inverse(self, x):
        """Inverse of an invertible matrix (adjugate over det)."""
        a, b, c, d = self.decode(x)
        R = self.ring
        dv = self.det(x)
        di = R.inv_t[dv]
        if np.any(np.asarray(di) < 0):
            raise DomainError("matrix is not invertible")
        M, N = R.mul_t, R.neg_t
        return self.encode(M[di, d], M[di, N[b]], M[di, N[c]], M[di, a])

    def conj(self, g, x):
        """g x g^{-1}; g is a single code, x may be an array."""
        return self.mul(self.mul(g, x), self.inverse(g))

    def add_scalar(self, x, s):
        a, b, c, d = self.decode(x)
        A = self.ring.add_t
        return self.encode(A[a, s], b, c, A[d, s])

    def pow(self, x, k: int):
        out = self.identity
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def order_of(self, x) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul(y, x)
            k += 1
            if k > 4 * self.code_bound:  # pragma: no cover
                raise InvariantViolation("element order runaway")
        return k

    def reduce_codes(self, codes, i: int) -> np.ndarray:
        """Entrywise reduction to the level-i matrix space."""
        sub = matrix_space(self.ring.subring(i))
        rm = self.ring.reduce_map(i)
        a, b, c, d = self.decode(np.asarray(codes))
        return sub.encode(rm[a], rm[b], rm[c], rm[d])

    def lift_code(self, sub_space: "MatrixSpace", code) -> np.ndarray:
        lm = self.ring.lift_map(sub_space.ring.r)
        a, b, c, d = sub_space.decode(code)
        return self.encode(lm[a], lm[b], lm[c], lm[d])

    def to_text(self, code) -> str:
        a, b, c, d = self.decode(int(code))
        t = self.ring.element_to_text
        return f"[[{t(int(a))},{t(int(b))}],[{t(int(c))},{t(int(d))}]]"


@lru_cache(maxsize=None)
def matrix_space(ring: TruncatedRing) -> MatrixSpace:
    return MatrixSpace(ring)


class GroupSet:
    """An enumerated subgroup (or subset) of GL2 over one ring level."""

    def __init__(self, space: MatrixSpace, codes, gens=None, name: str = ""):
        self.space = space
        self.codes = np.unique(np.asarray(codes, dtype=np.int64))
        self.gens = None if gens is None else np.asarray(gens, dtype=np.int64)
        self.name = name

    def __len__(self):
        return len(self.codes)

    def __contains__(self, code):
        i = np.searchsorted(self.codes, code)
        return i < len(self.codes) and self.codes[i] == code

    def contains_all(self, codes) -> bool:
        codes = np.asarray(codes, dtype=np.int64)
        idx = np.searchsorted(self.codes, codes)
        idx = np.clip(idx, 0, len(self.codes) - 1)
        return bool(np.all(self.codes[idx] == codes))

    def positions(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        idx = np.searchsorted(self.codes, codes)
        if np.any(idx >= len(self.codes)) or np.any(self.codes[np.minimum(idx, len(self.codes) - 1)] != codes):
            raise DomainError("code outside the group")
        return idx

    def is_subset_of(self, other: "GroupSet") -> bool:
        return other.contains_all(self.codes)

    def key(self) -> bytes:
        return self.codes.tobytes()

    def __repr__(self):
        return f"GroupSet({self.name or 'anon'}, order={len(self)})"


def mulclose(space: MatrixSpace, gens, start=None, cap: int | None = None) -> np.ndarray:
    """Closure of the set generated by gens (breadth-first, right multiplication)."""
    gens = np.unique(np.asarray(gens, dtype=np.int64))
    known = {int(space.identity)}
    if start is not None:
        known.update(int(x) for x in np.asarray(start).ravel())
    frontier = np.array(sorted(known), dtype=np.int64)
    while len(frontier):
        new = []
        for g in gens:
            prods = space.mul(frontier, int(g))
            new.append(prods)
        cand = np.unique(np.concatenate(new))
        fresh = np.array([c for c in cand if int(c) not in known], dtype=np.int64)
        known.update(int(c) for c in fresh)
        if cap is not None and len(known) > cap:
            raise CapacityError(f"closure exceeded cap {cap}")
        frontier = fresh
    return np.array(sorted(known), dtype=np.int64)


def subgroup_generators(G: GroupSet) -> np.ndarray:
    """A small generating set, chosen greedily in code order."""
    if G.gens is not None:
        return G.gens
    gens: list[int] = []
    known = np.array([G.space.identity], dtype=np.int64)
    for code in G.codes:
        code = int(code)
        i = np.searchsorted(known, code)
        if i < len(known) and known[i] == code:
            continue
        gens.append(code)
        known = mulclose(G.space, gens)
        if len(known) == len(G):
            break
    G.gens = np.array(gens, dtype=np.int64)
    return G.gens


def set_product(space: MatrixSpace, A, B, name="") -> np.ndarray:
    """All products ab, a in A, b in B."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if len(A) > len(B):
        out = [space.mul(A, int(b)) for b in B]
    else:
        out = [space.mul(int(a), B) for a in A]
    return np.unique(np.concatenate(out)) if out else np.array([], dtype=np.int64)


@lru_cache(maxsize=None)
def group_enumerate(ring: TruncatedRing, which: str) -> GroupSet:
    """Full GL2 or SL2 over the ring, by scanning all q^(4r) packed codes."""
    space = matrix_space(ring)
    if space.code_bound > ENUM_GUARD:
        raise CapacityError(f"{which} enumeration over {ring} needs {space.code_bound} codes")
    if which not in ("GL2", "SL2"):
        raise DomainError(f"unknown group family {which!r}")
    chunks = []
    step = 1 << 20
    for lo in range(0, space.code_bound, step):
        block = np.arange(lo, min(lo + step, space.code_bound), dtype=np.int64)
        dets = space.det(block)
        keep = (ring.val_t[dets] == 0) if which == "GL2" else (dets == ring.one)
        chunks.append(block[keep])
    codes = np.concatenate(chunks)
    # elementary matrices generate SL2 over these local rings
    gens = None
    if which == "SL2":
        gens = []
        for x in range(1, ring.n):
            gens.append(int(space.encode(ring.one, x, 0, ring.one)))
            gens.append(int(space.encode(ring.one, 0, x, ring.one)))
        gens = np.array(gens, dtype=np.int64)
    return GroupSet(space, codes, gens=gens, name=f"{which}({ring.kind},q={ring.q},r={ring.r})")


def congruence_subgroup(G: GroupSet, i: int) -> GroupSet:
    """Kernel of entrywise reduction to level i, as a subset of G."""
    ring = G.space.ring
    if not 0 <= i <= ring.r:
        raise DomainError(f"congruence level {i} out of range")
    if i == 0:
        return G
    space = G.space
    reduced = space.reduce_codes(G.codes, i)
    sub_id = matrix_space(ring.subring(i)).identity
    codes = G.codes[reduced == sub_id]
    return GroupSet(space, codes, name=f"{G.name}^({i})")


def is_cyclic(space: MatrixSpace, code) -> bool:
    """True iff the residue of the matrix is non-scalar."""
    ring = space.ring
    rm = ring.reduce_map(1)
    a, b, c, d = space.decode(int(code))
    ab, bb, cb, db = int(rm[a]), int(rm[b]), int(rm[c]), int(rm[d])
    return not (bb == 0 and cb == 0 and ab == db)


def centralizer_gl(space: MatrixSpace, code) -> GroupSet:
    """Centralizer of a cyclic matrix in GL2: the invertible xI + yA."""
    if not is_cyclic(space, code):
        raise DomainError("centralizer formula requires a cyclic matrix")
    ring = space.ring
    a, b, c, d = space.decode(int(code))
    x = np.repeat(np.arange(ring.n), ring.n)
    y = np.tile(np.arange(ring.n), ring.n)
    A, M = ring.add_t, ring.mul_t
    codes = space.encode(A[x, M[y, a]], M[y, b], M[y, c], A[x, M[y, d]])
    keep = ring.val_t[space.det(codes)] == 0
    return GroupSet(space, codes[keep], name="C_GL(A)")


def brute_centralizer_in(G: GroupSet, code) -> np.ndarray:
    """Elements of G commuting with the given matrix (independent check)."""
    left = G.space.mul(G.codes, int(code))
    right = G.space.mul(int(code), G.codes)
    return G.codes[left == right]


def commutator_data(G: GroupSet, H: GroupSet) -> GroupSet:
    """Subgroup generated by all commutators [g,h]."""
    space = G.space
    gens = set()
    Hi = space.inverse(H.codes)
    for g in G.codes:
        g = int(g)
        gi = int(space.inverse(g))
        comms = space.mul(space.mul(g, H.codes), space.mul(gi, Hi))
        gens.update(int(c) for c in np.unique(comms))
    gens.discard(int(space.identity))
    if not gens:
        return GroupSet(space, [space.identity], name="[G,H]")
    codes = mulclose(space, sorted(gens))
    return GroupSet(space, codes, name="[G,H]")


def normalize_cyclic(space: MatrixSpace, code):
    """First SL2 conjugator + scalar shift bringing A to [[0, a^-1 alpha],[a, beta]].

    Returns (g, x, a, alpha, beta) with g A g^-1 + x I in normalized form.
    """
    if not is_cyclic(space, code):
        raise DomainError("normalization requires a cyclic matrix")
    ring = space.ring
    sl2 = group_enumerate(ring, "SL2")
    conj_all = space.mul(space.mul(sl2.codes, int(code)), space.inverse(sl2.codes))
    a11, a12, a21, a22 = space.decode(conj_all)
    ok = ring.val_t[a21] == 0
    idx = int(np.nonzero(ok)[0][0])
    g = int(sl2.codes[idx])
    x = ring.neg(int(a11[idx]))
    a = int(a21[idx])
    alpha = ring.mul(a, int(a12[idx]))
    beta = ring.add(int(a22[idx]), x)
    b = space.add_scalar(int(conj_all[idx]), x)
    want = space.encode(0, ring.mul(ring.inv(a), alpha), a, beta)
    if int(b) != int(want):
        raise InvariantViolation("normalized form mismatch")
    return g, x, a, alpha, beta


def group_order_sl2(ring: TruncatedRing) -> int:
    q, r = ring.q, ring.r
    return (q * q - 1) * q ** (3 * r - 2)


def group_order_gl2(ring: TruncatedRing) -> int:
    q, r = ring.q, ring.r
    return (q * q - 1) * (q * q - q) * q ** (4 * (r - 1))
