"""The Steinberg module St(W) over F_q with its unipotent (PBW) basis.

A PBW index of a d-dimensional subspace W is a unit upper triangular
d x d matrix g; the corresponding apartment class is [B_W g], the columns
of the canonical basis B_W multiplied by g.  It is stored as the tuple of
its strictly-upper entries, column by column: (g01, g02, g12, g03, ...).

Straightening rewrites an arbitrary apartment symbol in this basis using
only the three defining relations.  Coefficients are computed over the
integers and reduced into the coefficient field at the end, since every
relation has coefficients +-1.
"""
from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from itertools import combinations, product
from math import factorial
from typing import Mapping, NamedTuple, Sequence

from .exactla import CoefficientField, Eliminator, SparseMatrix, rank
from .subspaces import (
    Subspace,
    canonical_subspace,
    det_mod,
    direct_sum,
    enumerate_lines,
    full_space,
    gl_order,
    is_basis,
    level,
    matmul_vec,
    normalize_line,
    vector_rank,
)

__all__ = [
    "InvalidApartment",
    "NotABasis",
    "Singular",
    "TooLarge",
    "PBWIndex",
    "ApartmentSymbol",
    "SteinbergElement",
    "FrameClass",
    "StraightenCache",
    "pbw_basis",
    "pbw_vectors",
    "straighten",
    "straighten_coords",
    "st_multiply",
    "gl_act",
    "presentation_dim_oracle",
    "PresentationQuotient",
    "frame_canonicalize",
    "apartment_product",
    "enumerate_frames",
    "ordered_bases",
    "parse_symbol",
    "format_vectors",
    "format_element",
    "oracle_mismatches",
    "random_symbol",
    "basis_element",
    "shared_cache",
]


class InvalidApartment(ValueError):
    pass


class NotABasis(ValueError):
    pass


class Singular(ValueError):
    pass


class TooLarge(RuntimeError):
    pass


class PBWIndex(NamedTuple):
    dim: int
    entries: tuple

    def matrix(self, q: int | None = None):
        d = self.dim
        g = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        t = 0
        for j in range(1, d):
            for i in range(j):
                g[i][j] = self.entries[t]
                t += 1
        return g


def _perm_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def pbw_entries(d: int, q: int):
    return product(range(q), repeat=d * (d - 1) // 2)


def pbw_basis(W: Subspace) -> list:
    """All q^(d(d-1)/2) PBW indices of W, in lexicographic order of entries."""
    d = W.dim
    return [PBWIndex(d, e) for e in pbw_entries(d, W.q)]


def _unipotent_columns(d: int, entries: Sequence[int]) -> tuple:
    """Columns of the unit upper triangular matrix with the given entries."""
    cols = []
    t = 0
    for j in range(d):
        col = [0] * d
        col[j] = 1
        for i in range(j):
            col[i] = entries[t]
            t += 1
        cols.append(tuple(col))
    return tuple(cols)


def pbw_vectors(W: Subspace, entries: Sequence[int]) -> tuple:
    """The vectors B_W g of the PBW apartment with the given entries."""
    if isinstance(entries, PBWIndex):
        entries = entries.entries
    d = W.dim
    return tuple(W.from_coordinates(c) for c in _unipotent_columns(d, entries))


class StraightenCache:
    """Shared memo for straightening; many readers, one writer at a time."""
    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def get(self, key):
        return self._data.get(key)

    def put(self, key, value):
        with self._lock:
            self._data.setdefault(key, value)

    __setitem__ = put

    def __len__(self):
        return len(self._data)


_SHARED = StraightenCache()


def shared_cache() -> StraightenCache:
    return _SHARED


def _canon(cols, q):
    """Normalize each column at its level and sort by (level, column).

    Returns (key, sign) where sign is the sign of the sorting permutation.
    """
    norm = [normalize_line(c, q) for c in cols]
    order = sorted(range(len(norm)), key=lambda i: (level(norm[i]), norm[i]))
    return tuple(norm[i] for i in order), _perm_sign(order)


def _straighten_sorted(key: tuple, q: int, cache) -> dict:
    d = len(key)
    levels = [level(c) for c in key]
    if all(levels[i] == i for i in range(d)):
        return {tuple(key[j][i] for j in range(1, d) for i in range(j)): 1}
    hit = cache.get((q, key))
    if hit is not None:
        return hit
    # largest colliding level; its two smallest positions
    lv = max(l for i, l in enumerate(levels) if levels.count(l) > 1)
    a = levels.index(lv)
    b = levels.index(lv, a + 1)
    wa, wb = key[a], key[b]
    u = tuple((x - y) % q for x, y in zip(wa, wb))
    t1 = list(key)
    t1[a] = u
    t2 = list(t1)
    t2[b] = wa
    out: dict = {}
    for cols, coeff in ((t1, 1), (t2, -1)):
        k2, s = _canon(cols, q)
        for g, c in _straighten_sorted(k2, q, cache).items():
            v = out.get(g, 0) + coeff * s * c
            if v:
                out[g] = v
            else:
                out.pop(g, None)
    cache[(q, key)] = out
    return out


def straighten_coords(cols: Sequence[Sequence[int]], q: int, cache=None) -> dict:
    """Expand the apartment symbol whose vectors have coordinates ``cols``
    (a basis of F_q^d) in the PBW basis of F_q^d.

    Returns ``{pbw entries: integer coefficient}``.
    """
    if not cols:
        return {(): 1}
    if cache is None:
        cache = {}
    key, sign = _canon(cols, q)
    res = _straighten_sorted(key, q, cache)
    if sign == 1:
        return res
    return {g: -c for g, c in res.items()}


@dataclass(frozen=True)
class ApartmentSymbol:
    W: Subspace
    vectors: tuple


@dataclass
class SteinbergElement:
    """Sparse k-combination of PBW apartments of ``W``."""

    W: Subspace
    coeffs: dict = field(default_factory=dict)
    k: CoefficientField | None = None

    def __post_init__(self):
        self.coeffs = {g: c for g, c in self.coeffs.items() if c}

    def __eq__(self, other):
        return isinstance(other, SteinbergElement) and self.W == other.W and self.coeffs == other.coeffs

    def __add__(self, other):
        if self.W != other.W:
            raise ValueError("elements live on different subspaces")
        k = self.k
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = k.add(out.get(g, k.zero()), c)
        return SteinbergElement(self.W, out, k)

    def __neg__(self):
        return SteinbergElement(self.W, {g: self.k.neg(c) for g, c in self.coeffs.items()}, self.k)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.k(c)
        return SteinbergElement(self.W, {g: self.k.mul(c, v) for g, v in self.coeffs.items()}, self.k)

    def is_zero(self):
        return not self.coeffs

    def __str__(self):
        return format_element(self)


def _to_element(W: Subspace, raw: Mapping, k: CoefficientField) -> SteinbergElement:
    d = W.dim
    return SteinbergElement(W, {PBWIndex(d, g): k(c) for g, c in raw.items() if k(c)}, k)


def straighten(sym: ApartmentSymbol, k: CoefficientField, cache=None) -> SteinbergElement:
    W = sym.W
    vecs = [tuple(x % W.q for x in v) for v in sym.vectors]
    if len(vecs) != W.dim or not all(W.contains(v) for v in vecs) or vector_rank(vecs, W.q) != W.dim:
        raise InvalidApartment("vectors do not form a basis of W")
    coords = [W.coordinates(v) for v in vecs]
    return _to_element(W, straighten_coords(coords, W.q, cache), k)


def st_multiply(x: SteinbergElement, y: SteinbergElement, cache=None) -> SteinbergElement:
    W = direct_sum([x.W, y.W])
    k = x.k or y.k
    q = W.q
    out: dict = {}
    for g1, c1 in x.coeffs.items():
        v1 = pbw_vectors(x.W, g1)
        for g2, c2 in y.coeffs.items():
            v2 = pbw_vectors(y.W, g2)
            coords = [W.coordinates(v) for v in v1 + v2]
            c = k.mul(c1, c2)
            for g, s in straighten_coords(coords, q, cache).items():
                out[g] = k.add(out.get(g, k.zero()), k.mul(c, k(s)))
    return SteinbergElement(W, {PBWIndex(W.dim, g): c for g, c in out.items()}, k)


def _apply(g, v, q):
    return tuple(sum(g[i][j] * v[j] for j in range(len(v))) % q for i in range(len(g)))


def gl_act(g: Sequence[Sequence[int]], x: SteinbergElement, cache=None) -> SteinbergElement:
    """Action of an invertible matrix (given by rows) on an element of St(F_q^n)."""
    W = x.W
    q = W.q
    if W.dim != W.n:
        raise ValueError("gl_act needs an element of the full space")
    if det_mod([tuple(row[j] for row in g) for j in range(W.n)], q) == 0:
        raise Singular("matrix is not invertible")
    k = x.k
    out: dict = {}
    for idx, c in x.coeffs.items():
        vecs = [_apply(g, v, q) for v in pbw_vectors(W, idx)]
        for h, s in straighten_coords(vecs, q, cache).items():
            out[h] = k.add(out.get(h, k.zero()), k.mul(c, k(s)))
    return SteinbergElement(W, {PBWIndex(W.dim, h): c for h, c in out.items()}, k)


def basis_element(W: Subspace, entries, k: CoefficientField) -> SteinbergElement:
    if isinstance(entries, PBWIndex):
        entries = entries.entries
    return SteinbergElement(W, {PBWIndex(W.dim, tuple(entries)): k.one()}, k)


# --------------------------------------------------------------------------
# frames (the apartment monoid) and the presentation oracle


@dataclass(frozen=True)
class FrameClass:
    W: Subspace
    lines: tuple
    sign: int


def frame_canonicalize(vectors: Sequence[Sequence[int]], q: int) -> FrameClass:
    vecs = [tuple(x % q for x in v) for v in vectors]
    if not vecs:
        raise NotABasis("empty frame")
    n = len(vecs[0])
    if vector_rank(vecs, q) != len(vecs):
        raise NotABasis("vectors are linearly dependent")
    lines = [normalize_line(v, q) for v in vecs]
    order = sorted(range(len(lines)), key=lambda i: _line_key(lines[i]))
    return FrameClass(canonical_subspace(vecs, q, n), tuple(lines[i] for i in order), _perm_sign(order))


def apartment_product(f1: FrameClass, f2: FrameClass) -> FrameClass:
    W = direct_sum([f1.W, f2.W])
    q = W.q
    f = frame_canonicalize(f1.lines + f2.lines, q)
    return FrameClass(W, f.lines, f.sign * f1.sign * f2.sign)


def _line_key(line):
    return level(line), line


def enumerate_frames(n: int, q: int) -> list:
    """All unordered frames of F_q^n, each a tuple of lines sorted by (level, line)."""
    lines = sorted(enumerate_lines(n, q), key=_line_key)
    out = []

    def rec(start, chosen):
        if len(chosen) == n:
            out.append(tuple(chosen))
            return
        for i in range(start, len(lines)):
            cand = chosen + [lines[i]]
            if vector_rank(cand, q) == len(cand):
                rec(i + 1, cand)

    if n == 0:
        return [()]
    rec(0, [])
    return out


def ordered_bases(n: int, q: int):
    """Every ordered basis of F_q^n (i.e. every element of GL_n(F_q), by columns)."""
    vecs = [v for v in product(range(q), repeat=n) if any(v)]

    def rec(chosen):
        if len(chosen) == n:
            yield tuple(chosen)
            return
        for v in vecs:
            cand = chosen + [v]
            if vector_rank(cand, q) == len(cand):
                yield from rec(cand)

    yield from rec([])


_ORACLE_LIMITS = {2: 4, 3: 3, 5: 2, 7: 2}


class PresentationQuotient:
    """Quotient of the free module on frames by every three-term relation.

    The quotient basis consists of the frames that are not pivots of the
    relation space; :meth:`coordinates` maps any apartment symbol there.
    """

    def __init__(self, n, q, k, frames, elim):
        self.n = n
        self.q = q
        self.k = k
        self.frames = frames
        self.index = {f: i for i, f in enumerate(frames)}
        self._elim = elim
        self.basis = [i for i in range(len(frames)) if not elim.is_pivot_row(i)]
        self._pos = {i: t for t, i in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, vectors) -> tuple:
        f = frame_canonicalize(vectors, self.q)
        rem = self._elim.reduce({self.index[f.lines]: f.sign})
        out = [self.k.zero()] * self.dim
        for r, v in rem.items():
            out[self._pos[r]] = self.k.mul(self.k(v), self.k(1))
        return tuple(out)


def _relation_terms(v1, v2, rest, q):
    v0 = tuple((x + y) % q for x, y in zip(v1, v2))
    return ((1, (v1, v2) + rest), (-1, (v0, v2) + rest), (1, (v0, v1) + rest))


def presentation_dim_oracle(n: int, q: int, k: CoefficientField):
    """Dimension of the presented module and its coordinate map.

    Independent of the straightening code: it imposes every instance of the
    three-term relation on the free module spanned by frame symbols.
    """
    if n > _ORACLE_LIMITS.get(q, 1):
        raise TooLarge(f"presentation oracle refuses n={n}, q={q}")
    frames = enumerate_frames(n, q)
    index = {f: i for i, f in enumerate(frames)}
    elim = Eliminator(k)
    if n >= 2:
        lines = enumerate_lines(n, q)
        scalars = range(1, q)
        seen = set()
        for rest_frame in (enumerate_frames_complementary(n, q, 2)):
            for v1, v2 in product((tuple(c * x % q for x in L) for L in lines for c in scalars), repeat=2):
                vecs = [v1, v2] + list(rest_frame)
                if vector_rank(vecs, q) != n:
                    continue
                col: dict = {}
                for c, sym in _relation_terms(v1, v2, tuple(rest_frame), q):
                    f = frame_canonicalize(sym, q)
                    i = index[f.lines]
                    col[i] = col.get(i, 0) + c * f.sign
                col = {i: v for i, v in col.items() if v}
                key = tuple(sorted(col.items()))
                neg = tuple(sorted((i, -v) for i, v in col.items()))
                if key in seen or neg in seen:
                    continue
                seen.add(key)
                elim.add(col)
    return PresentationQuotient(n, q, k, frames, elim)


def enumerate_frames_complementary(n: int, q: int, m: int):
    """Unordered independent sets of n-m lines (the "rest" of a relation)."""
    lines = enumerate_lines(n, q)
    out = []
    for combo in combinations(lines, n - m):
        if vector_rank(list(combo), q) == n - m:
            out.append(combo)
    if n - m == 0:
        return [()]
    return out


# --------------------------------------------------------------------------
# text formats


def parse_symbol(text: str, q: int) -> tuple:
    """Parse ``[a,b;c,d]`` into vectors ((a,b),(c,d)) mod q."""
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise ValueError(f"symbol must be bracketed: {text!r}")
    body = t[1:-1].strip()
    if not body:
        return ()
    vecs = tuple(tuple(int(x) % q for x in part.split(",")) for part in body.split(";"))
    if len({len(v) for v in vecs}) != 1:
        raise ValueError("vectors of unequal length")
    return vecs


def format_vectors(vecs) -> str:
    return "[" + ";".join(",".join(str(x) for x in v) for v in vecs) + "]"


def _signed(c, k: CoefficientField):
    if k.char:
        c = int(c)
        return c - k.char if c > k.char // 2 else c
    return c


def format_element(x: SteinbergElement) -> str:
    k = x.k
    terms = []
    for g, c in x.coeffs.items():
        vecs = pbw_vectors(x.W, g.entries)
        terms.append((_signed(c, k), vecs))
    terms.sort(key=lambda t: (t[0] < 0, t[1]), reverse=False)
    if not terms:
        return "0"
    out = []
    for c, vecs in terms:
        sign = "-" if c < 0 else "+"
        out.append(f"{sign}{abs(c)}*{format_vectors(vecs)}")
    return " ".join(out)


def random_symbol(n: int, q: int, rng: random.Random) -> tuple:
    while True:
        vecs = tuple(tuple(rng.randrange(q) for _ in range(n)) for _ in range(n))
        if is_basis(vecs, q):
            return vecs


def pbw_count(d: int, q: int) -> int:
    return q ** (d * (d - 1) // 2)


def frame_count(n: int, q: int) -> int:
    return gl_order(n, q) // ((q - 1) ** n * factorial(n))


def full(n: int, q: int) -> Subspace:
    return full_space(n, q)


def matmul_cols(cols, coeffs, q):
    return matmul_vec(cols, coeffs, q)


def oracle_mismatches(n: int, q: int, k: CoefficientField, symbols, quotient=None) -> list:
    """Symbols whose straightened form disagrees with the presentation quotient.

    Compares, inside the quotient, the image of each symbol with the image
    of its straightened expansion.  Also requires the PBW images to form a
    basis of the quotient.
    """

    Q = quotient or presentation_dim_oracle(n, q, k)
    W = full_space(n, q)
    images = {}
    cols = []
    for e in pbw_entries(n, q):
        img = Q.coordinates(pbw_vectors(W, e))
        images[e] = img
        cols.append({i: v for i, v in enumerate(img) if v})
    if rank(SparseMatrix.from_columns(Q.dim, cols, k), k) != Q.dim or len(cols) != Q.dim:
        raise AssertionError("PBW apartments do not map to a basis of the quotient")
    cache: dict = {}
    bad = []
    for sym in symbols:
        want = Q.coordinates(sym)
        got = [k.zero()] * Q.dim
        for g, c in straighten_coords(sym, q, cache).items():
            for i, v in enumerate(images[g]):
                if v:
                    got[i] = k.add(got[i], k.mul(k(c), v))
        if tuple(got) != tuple(want):
            bad.append(sym)
    return bad
