"""Lines, subspaces and direct-sum decompositions of F_q^n.

Vectors are plain tuples of ints in ``range(q)``.  Two normalizations are
used on purpose:

* a *line* is stored by the representative whose bottom-most nonzero entry
  (its *level*) is 1;
* a *subspace* is stored by the reduced column echelon form of any spanning
  set taken from the bottom: the bottom-most nonzero entry of every column
  is 1, the pivot rows increase left to right and are zero in the other
  columns.  A line is then the same thing as a 1-dimensional subspace.

Bottom pivots are what make unit upper triangular changes of B_W compatible
with direct sums: if S_{W1} lies entirely below S_{W2}, concatenating the
canonical bases of W1 and W2 is block upper triangular in the canonical
basis of the sum.

Row indices are 0-based throughout.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

__all__ = [
    "ZeroSpan",
    "NotDirect",
    "Subspace",
    "canonical_subspace",
    "precedes",
    "direct_sum",
    "level",
    "normalize_line",
    "enumerate_lines",
    "enumerate_subspaces",
    "complements",
    "enumerate_decompositions",
    "gl_order",
    "gaussian_binomial",
    "full_space",
    "zero_subspace",
    "vector_rank",
    "is_basis",
    "matmul_vec",
    "det_mod",
]


class ZeroSpan(ValueError):
    pass


class NotDirect(ValueError):
    pass


def _inv(a: int, q: int) -> int:
    return pow(a, q - 2, q)


def level(v: Sequence[int]) -> int:
    """Index of the bottom-most nonzero coordinate (-1 for the zero vector)."""
    for i in range(len(v) - 1, -1, -1):
        if v[i]:
            return i
    return -1


def normalize_line(v: Sequence[int], q: int) -> tuple:
    lv = level(v)
    if lv < 0:
        raise ZeroSpan("the zero vector spans no line")
    c = v[lv]
    if c == 1:
        return tuple(v)
    inv = _inv(c, q)
    return tuple(x * inv % q for x in v)


def _rref_rows(vectors: Iterable[Sequence[int]], n: int, q: int):
    """Row-reduce the matrix whose rows are ``vectors``; returns (rows, pivots)."""
    rows = [list(v) for v in vectors]
    pivots = []
    lead = 0
    nr = len(rows)
    for c in range(n):
        if lead == nr:
            break
        piv = None
        for i in range(lead, nr):
            if rows[i][c] % q:
                piv = i
                break
        if piv is None:
            continue
        rows[lead], rows[piv] = rows[piv], rows[lead]
        prow = rows[lead]
        inv = _inv(prow[c] % q, q)
        if inv != 1:
            prow = [x * inv % q for x in prow]
        else:
            prow = [x % q for x in prow]
        rows[lead] = prow
        for i in range(nr):
            if i != lead:
                f = rows[i][c] % q
                if f:
                    row = rows[i]
                    rows[i] = [(x - f * y) % q for x, y in zip(row, prow)]
        pivots.append(c)
        lead += 1
    return [tuple(r) for r in rows[:lead]], tuple(pivots)


def vector_rank(vectors: Sequence[Sequence[int]], q: int) -> int:
    if not vectors:
        return 0
    return len(_rref_rows(vectors, len(vectors[0]), q)[1])


def is_basis(vectors: Sequence[Sequence[int]], q: int) -> bool:
    return bool(vectors) and len(vectors) == len(vectors[0]) and vector_rank(vectors, q) == len(vectors)


def det_mod(cols: Sequence[Sequence[int]], q: int) -> int:
    """Determinant mod q of the square matrix with the given columns."""
    m = [list(c) for c in cols]
    d = len(m)
    det = 1
    for c in range(d):
        piv = next((i for i in range(c, d) if m[i][c] % q), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        pv = m[c][c] % q
        det = det * pv % q
        inv = _inv(pv, q)
        for i in range(c + 1, d):
            f = m[i][c] * inv % q
            if f:
                m[i] = [(x - f * y) % q for x, y in zip(m[i], m[c])]
    return det % q


def matmul_vec(cols: Sequence[Sequence[int]], coeffs: Sequence[int], q: int) -> tuple:
    """Linear combination sum_j coeffs[j] * cols[j] mod q."""
    n = len(cols[0])
    out = [0] * n
    for c, col in zip(coeffs, cols):
        if c:
            for i in range(n):
                out[i] += c * col[i]
    return tuple(x % q for x in out)


class Subspace:
    """A subspace of F_q^n in canonical (bottom-pivot reduced column echelon) form."""

    __slots__ = ("n", "q", "basis", "pivots", "_hash")

    def __init__(self, n: int, q: int, basis: tuple, pivots: tuple):
        self.n = n
        self.q = q
        self.basis = basis
        self.pivots = pivots
        self._hash = hash((n, q, basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.n == other.n and self.q == other.q
                and self.basis == other.basis)

    def __lt__(self, other):
        return (self.pivots, self.basis) < (other.pivots, other.basis)

    def __repr__(self):
        return f"Subspace(n={self.n}, q={self.q}, pivots={self.pivots}, basis={self.basis})"

    def coordinates(self, v: Sequence[int]) -> tuple:
        """Coordinates of ``v`` (assumed to lie in the subspace) in the canonical basis."""
        return tuple(v[i] for i in self.pivots)

    def contains(self, v: Sequence[int]) -> bool:
        v = tuple(x % self.q for x in v)
        if not self.basis:
            return not any(v)
        return matmul_vec(self.basis, self.coordinates(v), self.q) == v

    def from_coordinates(self, coords: Sequence[int]) -> tuple:
        if not self.basis:
            return (0,) * self.n
        return matmul_vec(self.basis, coords, self.q)

    def coordinate_complement(self) -> tuple:
        """Standard basis vectors at the non-pivot rows."""
        piv = set(self.pivots)
        return tuple(tuple(1 if i == j else 0 for i in range(self.n)) for j in range(self.n) if j not in piv)


@lru_cache(maxsize=None)
def _canonical(vectors: tuple, n: int, q: int) -> Subspace:
    # top-pivot reduction of the coordinate-reversed vectors, reversed back
    rows, pivots = _rref_rows([v[::-1] for v in vectors], n, q)
    basis = tuple(r[::-1] for r in reversed(rows))
    return Subspace(n, q, basis, tuple(n - 1 - p for p in reversed(pivots)))


def canonical_subspace(vectors: Iterable[Sequence[int]], q: int, n: int | None = None) -> Subspace:
    """The subspace spanned by ``vectors``, in canonical form."""
    vectors = tuple(tuple(int(x) % q for x in v) for v in vectors)
    if n is None:
        if not vectors:
            raise ZeroSpan("no vectors given and ambient dimension unknown")
        n = len(vectors[0])
    sub = _canonical(vectors, n, q)
    if sub.dim == 0 and vectors:
        raise ZeroSpan("all vectors are zero")
    return sub


def zero_subspace(n: int, q: int) -> Subspace:
    return Subspace(n, q, (), ())


def full_space(n: int, q: int) -> Subspace:
    return _canonical(tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n)), n, q)


def precedes(s1: Iterable[int], s2: Iterable[int]) -> bool:
    """``max s1 < min s2``; the empty set precedes (and is preceded by) everything."""
    s1 = tuple(s1)
    s2 = tuple(s2)
    if not s1 or not s2:
        return True
    return max(s1) < min(s2)


@lru_cache(maxsize=None)
def _direct_sum2(a: Subspace, b: Subspace) -> Subspace:
    s = _canonical(a.basis + b.basis, a.n, a.q)
    if s.dim != a.dim + b.dim:
        raise NotDirect(f"sum of dims {a.dim}+{b.dim} spans only {s.dim}")
    return s


def direct_sum(parts: Sequence[Subspace]) -> Subspace:
    if not parts:
        raise ValueError("empty list of parts")
    acc = parts[0]
    for p in parts[1:]:
        if p.n != acc.n or p.q != acc.q:
            raise ValueError("parts live in different ambient spaces")
        acc = _direct_sum2(acc, p)
    return acc


@lru_cache(maxsize=None)
def enumerate_lines(n: int, q: int) -> tuple:
    """All (q^n-1)/(q-1) lines, level-normalized, in lexicographic order."""
    out = [v for v in product(range(q), repeat=n) if any(v) and v[level(v)] == 1]
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def enumerate_subspaces(n: int, d: int, q: int) -> tuple:
    """All d-dimensional subspaces of F_q^n (canonical forms)."""
    out = []
    for piv in combinations(range(n), d):
        pivset = set(piv)
        free = [(i, j) for i, p in enumerate(piv) for j in range(p) if j not in pivset]
        for vals in product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(d)]
            for i, p in enumerate(piv):
                rows[i][p] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            out.append(Subspace(n, q, tuple(tuple(r) for r in rows), piv))
    return tuple(out)


@lru_cache(maxsize=None)
def complements(w: Subspace) -> tuple:
    """All complements of ``w``: graphs of linear maps from the coordinate
    complement into ``w``.  There are q^(d(n-d)) of them."""
    q = w.q
    base = w.coordinate_complement()
    d = w.dim
    out = []
    for vals in product(range(q), repeat=d * len(base)):
        vecs = []
        for t, e in enumerate(base):
            coeffs = vals[t * d:(t + 1) * d]
            shift = w.from_coordinates(coeffs) if d else (0,) * w.n
            vecs.append(tuple((x + y) % q for x, y in zip(e, shift)))
        out.append(_canonical(tuple(vecs), w.n, q) if vecs else zero_subspace(w.n, q))
    return tuple(out)


def _push_forward(u: Subspace, part: Subspace) -> Subspace:
    """Image of ``part`` (a subspace of F_q^m) under the basis map of ``u``."""
    vecs = tuple(u.from_coordinates(c) for c in part.basis)
    return _canonical(vecs, u.n, u.q)


@lru_cache(maxsize=None)
def enumerate_decompositions(n: int, shape: tuple, q: int) -> tuple:
    """Ordered tuples (W_1,...,W_s) with dim W_j = shape[j] and W_1+...+W_s = F_q^n direct."""
    shape = tuple(shape)
    if any(d < 1 for d in shape) or sum(shape) != n:
        raise ValueError(f"shape {shape} is not a composition of {n}")
    if len(shape) == 1:
        return ((full_space(n, q),),)
    rest = shape[1:]
    m = n - shape[0]
    inner = enumerate_decompositions(m, rest, q)
    out = []
    for w1 in enumerate_subspaces(n, shape[0], q):
        for u in complements(w1):
            for dec in inner:
                out.append((w1,) + tuple(_push_forward(u, part) for part in dec))
    return tuple(out)


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def gaussian_binomial(n: int, d: int, q: int) -> int:
    """[n choose d]_q from q-factorials."""
    if d < 0 or d > n:
        return 0

    def qfact(m):
        out = 1
        for i in range(1, m + 1):
            out *= (q ** i - 1) // (q - 1)
        return out

    return qfact(n) // (qfact(d) * qfact(n - d))
