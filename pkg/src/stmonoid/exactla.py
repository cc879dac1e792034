"""Exact linear algebra over prime fields F_l (l <= 13) and the rationals.

Matrices are stored sparsely in compressed-column form.  Ranks of small
matrices go through dense elimination (Bareiss over Q); everything else goes
through :class:`Eliminator`, an incremental sparse column reducer that the
chain-complex code also drives directly with streamed columns.
"""
from __future__ import annotations

import hashlib
import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping

__all__ = [
    "CoefficientField",
    "QQ",
    "GF",
    "DivisionByZero",
    "field_arithmetic",
    "SparseMatrix",
    "FFMatrix",
    "Eliminator",
    "rank",
    "sparse_rank",
    "matched_order",
    "column_echelon",
    "write_matrix",
    "read_matrix",
]

DENSE_CUTOFF = 256
_PRIMES = (2, 3, 5, 7, 11, 13)


class DivisionByZero(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class CoefficientField:
    """Either F_l for a prime l <= 13 (``char == l``) or Q (``char == 0``)."""

    char: int

    def __post_init__(self):
        if self.char != 0 and self.char not in _PRIMES:
            raise ValueError(f"unsupported coefficient field characteristic {self.char}")

    @classmethod
    def parse(cls, text: str) -> "CoefficientField":
        t = text.strip().lower()
        if t in ("rat", "q", "qq", "0"):
            return QQ
        for prefix in ("p", "f", "gf"):
            if t.startswith(prefix) and t[len(prefix):].isdigit():
                return cls(int(t[len(prefix):]))
        if t.isdigit():
            return cls(int(t))
        raise ValueError(f"unknown coefficient field {text!r}")

    @property
    def is_rational(self) -> bool:
        return self.char == 0

    @property
    def name(self) -> str:
        return "rat" if self.char == 0 else f"p{self.char}"

    def __str__(self):
        return "Q" if self.char == 0 else f"F{self.char}"

    def __call__(self, x):
        if self.char == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            return self.div(x.numerator, x.denominator)
        return int(x) % self.char

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def add(self, a, b):
        return a + b if self.char == 0 else (a + b) % self.char

    def sub(self, a, b):
        return a - b if self.char == 0 else (a - b) % self.char

    def neg(self, a):
        return -a if self.char == 0 else (-a) % self.char

    def mul(self, a, b):
        return a * b if self.char == 0 else (a * b) % self.char

    def inv(self, a):
        if self.char == 0:
            if a == 0:
                raise DivisionByZero("inverse of 0 in Q")
            return 1 / Fraction(a)
        a %= self.char
        if a == 0:
            raise DivisionByZero(f"inverse of 0 in F{self.char}")
        return pow(a, self.char - 2, self.char)

    def div(self, a, b):
        return self.mul(self(a), self.inv(self(b)))


QQ = CoefficientField(0)


def GF(ell: int) -> CoefficientField:
    return CoefficientField(ell)


def field_arithmetic(a, b, op: str, k: CoefficientField):
    """Single field operation; ``b`` is ignored for the unary ops."""
    a = k(a)
    if op == "add":
        return k.add(a, k(b))
    if op == "mul":
        return k.mul(a, k(b))
    if op == "neg":
        return k.neg(a)
    if op == "inv":
        return k.inv(a)
    raise ValueError(f"unknown op {op!r}")


class SparseMatrix:
    """Immutable sparse matrix over a coefficient field, compressed by column.

    ``indptr``/``indices``/``data`` follow the usual CSC layout; entries are
    canonical field elements and never zero.
    """

    __slots__ = ("nrows", "ncols", "field", "indptr", "indices", "data")

    def __init__(self, nrows, ncols, field, indptr, indices, data):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        self.indptr = tuple(indptr)
        self.indices = tuple(indices)
        self.data = tuple(data)

    @classmethod
    def from_columns(cls, nrows: int, columns: Iterable[Mapping[int, object]], field: CoefficientField):
        indptr = [0]
        indices = []
        data = []
        for col in columns:
            for r in sorted(col):
                v = field(col[r])
                if v:
                    if not 0 <= r < nrows:
                        raise IndexError(f"row {r} out of range for {nrows} rows")
                    indices.append(r)
                    data.append(v)
            indptr.append(len(indices))
        return cls(nrows, len(indptr) - 1, field, indptr, indices, data)

    @classmethod
    def from_dense(cls, rows, field: CoefficientField, ncols: int | None = None):
        rows = [list(r) for r in rows]
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        cols = [{i: rows[i][j] for i in range(nrows) if rows[i][j]} for j in range(ncols)]
        return cls.from_columns(nrows, cols, field)

    @classmethod
    def from_triplets(cls, nrows, ncols, triplets, field: CoefficientField):
        cols = [dict() for _ in range(ncols)]
        for r, c, v in triplets:
            cols[c][r] = field.add(cols[c].get(r, field.zero()), field(v))
        return cls.from_columns(nrows, cols, field)

    @classmethod
    def zeros(cls, nrows, ncols, field):
        return cls(nrows, ncols, field, [0] * (ncols + 1), [], [])

    @classmethod
    def identity(cls, n, field):
        return cls.from_columns(n, ({j: 1} for j in range(n)), field)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self):
        return len(self.indices)

    def column(self, j: int) -> dict:
        lo, hi = self.indptr[j], self.indptr[j + 1]
        return dict(zip(self.indices[lo:hi], self.data[lo:hi]))

    def columns(self) -> Iterator[dict]:
        for j in range(self.ncols):
            yield self.column(j)

    def triplets(self):
        for j in range(self.ncols):
            for t in range(self.indptr[j], self.indptr[j + 1]):
                yield self.indices[t], j, self.data[t]

    def to_dense(self):
        out = [[self.field.zero()] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.triplets():
            out[r][c] = v
        return out

    def transpose(self) -> "SparseMatrix":
        cols = [dict() for _ in range(self.nrows)]
        for r, c, v in self.triplets():
            cols[r][c] = v
        return SparseMatrix.from_columns(self.ncols, cols, self.field)

    def over(self, field: CoefficientField) -> "SparseMatrix":
        """Reduce an integral/rational matrix into another field."""
        if field == self.field:
            return self
        return SparseMatrix.from_columns(self.nrows, self.columns(), field)

    def row_counts(self) -> list[int]:
        counts = [0] * self.nrows
        for r in self.indices:
            counts[r] += 1
        return counts

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.field == other.field
                and self.indptr == other.indptr and self.indices == other.indices
                and self.data == other.data)

    def __hash__(self):
        return hash((self.shape, self.indices, self.data))

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}, over {self.field})"

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        k = self.field
        cols = []
        for j in range(other.ncols):
            acc: dict = {}
            for mid, v in other.column(j).items():
                for t in range(self.indptr[mid], self.indptr[mid + 1]):
                    r = self.indices[t]
                    acc[r] = k.add(acc.get(r, k.zero()), k.mul(self.data[t], v))
            cols.append(acc)
        return SparseMatrix.from_columns(self.nrows, cols, k)

    __matmul__ = matmul

    def is_zero(self):
        return self.nnz == 0


FFMatrix = SparseMatrix


# --------------------------------------------------------------------------
# incremental sparse elimination


class Eliminator:
    """Incremental column reduction over F_l or Q.

    Columns are added one at a time; each is reduced against the pivots
    found so far.  A pivot column never contains the pivot row of an
    earlier pivot, so reduction proceeds in pivot-creation order and
    terminates.  Over Q columns are kept integral (fraction-free updates
    with content removal).

    ``row_weight`` biases the choice of new pivot rows towards rows that
    are rare in the input, which keeps fill-in low.
    """

    def __init__(self, field: CoefficientField, row_weight=None):
        self.field = field
        self._order: dict[int, int] = {}   # pivot row -> creation index
        self._cols: list[dict] = []        # creation index -> pivot column
        self._rows: list[int] = []         # creation index -> pivot row
        self._weight = row_weight

    @property
    def rank(self) -> int:
        return len(self._cols)

    @property
    def pivot_rows(self):
        return list(self._rows)

    def is_pivot_row(self, r) -> bool:
        return r in self._order

    def _prepare(self, col: Mapping[int, object]) -> dict:
        if self.field.char:
            p = self.field.char
            out = {}
            for r, v in col.items():
                v = int(v) % p if not isinstance(v, Fraction) else self.field(v)
                if v:
                    out[r] = v
            return out
        den = 1
        for v in col.values():
            if isinstance(v, Fraction) and v.denominator != 1:
                den = den * v.denominator // math.gcd(den, v.denominator)
        out = {}
        for r, v in col.items():
            v = int(v * den) if den != 1 else int(v)
            if v:
                out[r] = v
        return out

    def _reduce_modp(self, col: dict) -> dict:
        p = self.field.char
        order = self._order
        heap = [order[r] for r in col if r in order]
        heapq.heapify(heap)
        cols = self._cols
        rows = self._rows
        while heap:
            t = heapq.heappop(heap)
            r = rows[t]
            c = col.get(r)
            if not c:
                continue
            for rr, v in cols[t].items():
                old = col.get(rr)
                if old is None:
                    col[rr] = (-c * v) % p
                    o = order.get(rr)
                    if o is not None and o > t:
                        heapq.heappush(heap, o)
                else:
                    nv = (old - c * v) % p
                    if nv:
                        col[rr] = nv
                    else:
                        del col[rr]
        return col

    def _reduce_rat(self, col: dict) -> tuple[dict, int]:
        """Returns (reduced integral column, scale) with true column = result / scale."""
        order = self._order
        heap = [order[r] for r in col if r in order]
        heapq.heapify(heap)
        cols = self._cols
        rows = self._rows
        scale = 1
        while heap:
            t = heapq.heappop(heap)
            r = rows[t]
            c = col.get(r)
            if not c:
                continue
            pcol = cols[t]
            a = pcol[r]
            g = math.gcd(a, c)
            a //= g
            c //= g
            if a != 1:
                if a == -1:
                    for key in col:
                        col[key] = -col[key]
                    scale = -scale
                else:
                    for key in col:
                        col[key] *= a
                    scale *= a
            for rr, v in pcol.items():
                old = col.get(rr)
                if old is None:
                    col[rr] = -c * v
                    o = order.get(rr)
                    if o is not None and o > t:
                        heapq.heappush(heap, o)
                else:
                    nv = old - c * v
                    if nv:
                        col[rr] = nv
                    else:
                        del col[rr]
            if col and abs(next(iter(col.values()))) > (1 << 40):
                g = 0
                for v in col.values():
                    g = math.gcd(g, v)
                    if g == 1:
                        break
                if g > 1:
                    for key in col:
                        col[key] //= g
                    # scale tracks an exact rational multiple
                    scale = Fraction(scale, g)
        return col, scale

    def _choose_pivot(self, col: dict) -> int:
        w = self._weight
        if w is None:
            return min(col)
        return min(col, key=lambda r: (w[r], r))

    def add(self, col: Mapping[int, object]) -> bool:
        """Reduce ``col``; keep it as a new pivot if independent."""
        col = self._prepare(col)
        if not col:
            return False
        if self.field.char:
            col = self._reduce_modp(col)
            if not col:
                return False
            r = self._choose_pivot(col)
            inv = pow(col[r], self.field.char - 2, self.field.char)
            if inv != 1:
                p = self.field.char
                for key in col:
                    col[key] = col[key] * inv % p
        else:
            col, _ = self._reduce_rat(col)
            if not col:
                return False
            g = 0
            for v in col.values():
                g = math.gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                for key in col:
                    col[key] //= g
            r = self._choose_pivot(col)
        self._order[r] = len(self._cols)
        self._cols.append(col)
        self._rows.append(r)
        return True

    def add_pivot(self, col: Mapping[int, object], row: int) -> None:
        """Adopt ``col`` as a pivot at ``row`` without reducing it.

        Valid only if ``col`` is zero at every existing pivot row, which holds
        when columns of an acyclic matching arrive in topological order.
        """
        col = self._prepare(col)
        if not col.get(row):
            raise ValueError(f"pivot entry at row {row} is zero")
        order = self._order
        if row in order or any(r in order for r in col):
            raise ValueError("column meets an existing pivot row")
        if self.field.char:
            p = self.field.char
            inv = pow(col[row], p - 2, p)
            if inv != 1:
                for key in col:
                    col[key] = col[key] * inv % p
        else:
            g = 0
            for v in col.values():
                g = math.gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                for key in col:
                    col[key] //= g
        order[row] = len(self._cols)
        self._cols.append(col)
        self._rows.append(row)

    def schur(self, col: Mapping[int, object]) -> dict:
        """``col`` reduced modulo the pivots, up to a nonzero scalar."""
        col = self._prepare(col)
        if not col:
            return col
        if self.field.char:
            return self._reduce_modp(col)
        return self._reduce_rat(col)[0]

    def reduce(self, vec: Mapping[int, object]) -> dict:
        """Normal form of ``vec`` modulo the span of the pivots.

        The result is supported on non-pivot rows, with canonical field entries.
        """
        col = self._prepare(vec) if self.field.char else None
        if self.field.char:
            return self._reduce_modp(col)
        den = 1
        for v in vec.values():
            if isinstance(v, Fraction):
                den = den * v.denominator // math.gcd(den, v.denominator)
        col = {r: int(Fraction(v) * den) for r, v in vec.items() if v}
        col, scale = self._reduce_rat(col)
        total = Fraction(scale) * den
        return {r: Fraction(v) / total for r, v in col.items()}


def _dense_rank_modp(rows, p) -> int:
    m = [[int(x) % p for x in row] for row in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rank = 0
    for c in range(nc):
        piv = next((i for i in range(rank, nr) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        prow = [x * inv % p for x in m[rank]]
        m[rank] = prow
        for i in range(rank + 1, nr):
            f = m[i][c]
            if f:
                row = m[i]
                m[i] = [(x - f * y) % p for x, y in zip(row, prow)]
        rank += 1
        if rank == nr:
            break
    return rank


def _bareiss_rank(rows) -> int:
    """Fraction-free (Bareiss) elimination on an integer matrix."""
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rank = 0
    prev = 1
    for c in range(nc):
        piv = next((i for i in range(rank, nr) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][c]
        for i in range(rank + 1, nr):
            f = m[i][c]
            row = m[i]
            m[i] = [(pv * x - f * y) // prev for x, y in zip(row, m[rank])]
        prev = pv
        rank += 1
        if rank == nr:
            break
    return rank


def _integral_rows(M: SparseMatrix):
    dense = M.to_dense()
    out = []
    for row in dense:
        den = 1
        for v in row:
            if isinstance(v, Fraction) and v.denominator != 1:
                den = den * v.denominator // math.gcd(den, v.denominator)
        out.append([int(v * den) for v in row])
    return out


def rank(M: SparseMatrix, k: CoefficientField | None = None, *, bound: int | None = None,
         matching=None, last=None) -> int:
    """Exact rank of ``M`` over ``k`` (default: the matrix's own field).

    ``bound`` is a known upper bound on the rank; elimination stops as soon
    as it is reached.  ``matching`` is an optional list of (row, column)
    pairs with nonzero entries, meant to form an acyclic matching; those
    columns become pivots without any elimination (see :func:`matched_order`).
    """
    if k is not None and k != M.field:
        M = M.over(k)
    k = M.field
    if M.nnz == 0:
        return 0
    if max(M.nrows, M.ncols) < DENSE_CUTOFF and bound is None and not matching:
        if k.char:
            rows = M.to_dense() if M.nrows <= M.ncols else M.transpose().to_dense()
            return _dense_rank_modp(rows, k.char)
        return _bareiss_rank(_integral_rows(M))
    return sparse_rank(M, bound=bound, matching=matching, last=last)


def matched_order(M: SparseMatrix, matching) -> list:
    """Topological order of the matched columns.

    Column c points to column c' when c has a nonzero entry in the row
    matched to c'.  Sources come first, so each column is zero on the pivot
    rows of all columns before it.  Pairs with a zero entry, repeated rows or
    repeated columns, and columns on a cycle, are dropped.
    """
    row_of: dict = {}
    col_of: dict = {}
    for r, c in matching:
        if r in col_of or c in row_of:
            continue
        lo, hi = M.indptr[c], M.indptr[c + 1]
        if r not in M.indices[lo:hi]:
            continue
        row_of[c] = r
        col_of[r] = c
    indeg = dict.fromkeys(row_of, 0)
    succ: dict = {c: [] for c in row_of}
    for c in row_of:
        lo, hi = M.indptr[c], M.indptr[c + 1]
        for r in M.indices[lo:hi]:
            c2 = col_of.get(r)
            if c2 is not None and c2 != c:
                succ[c].append(c2)
                indeg[c2] += 1
    ready = sorted(c for c, d in indeg.items() if d == 0)
    out = []
    while ready:
        c = ready.pop()
        out.append((row_of[c], c))
        for c2 in succ[c]:
            indeg[c2] -= 1
            if indeg[c2] == 0:
                ready.append(c2)
    return out


def sparse_rank(M: SparseMatrix, *, bound: int | None = None, matching=None, last=None) -> int:
    """Rank by incremental elimination, stopping at ``bound``.

    With a matching, the matched columns are pivoted first and every other
    column is reduced against them only; the rank of what remains (the Schur
    complement) is found by a second elimination weighted by its own row
    counts.  Columns listed in ``last`` are deferred to the very end.
    """
    limit = min(M.nrows, M.ncols)
    if bound is not None:
        limit = min(limit, bound)
    if limit == 0:
        return 0
    last = last or ()
    if not matching:
        elim = Eliminator(M.field, row_weight=M.row_counts())
        order = sorted(range(M.ncols), key=lambda j: (j in last, M.indptr[j + 1] - M.indptr[j]))
        for j in order:
            elim.add(M.column(j))
            if elim.rank >= limit:
                break
        return elim.rank

    base = Eliminator(M.field)
    done = set()
    for r, c in matched_order(M, matching):
        base.add_pivot(M.column(c), r)
        done.add(c)
    if base.rank >= limit:
        return base.rank
    early = [j for j in range(M.ncols) if j not in done and j not in last]
    late = [j for j in range(M.ncols) if j not in done and j in last]

    schur = [c for c in (base.schur(M.column(j)) for j in early) if c]
    weight: dict = {}
    for c in schur:
        for r in c:
            weight[r] = weight.get(r, 0) + 1
    rest = Eliminator(M.field, row_weight=_Weights(weight))
    for c in sorted(schur, key=len):
        rest.add(c)
        if base.rank + rest.rank >= limit:
            return limit
    for j in late:
        c = base.schur(M.column(j))
        if c:
            rest.add(c)
            if base.rank + rest.rank >= limit:
                break
    return base.rank + rest.rank


class _Weights(dict):
    def __missing__(self, key):
        return 0


def column_echelon(M: SparseMatrix):
    """Reduced column echelon form over a prime field.

    Returns ``(N, pivots)``: each nonzero column of ``N`` has its topmost
    nonzero entry equal to 1, pivot rows strictly increase left to right and
    are zero in every other column; zero columns are dropped.  ``pivots``
    lists the pivot rows (0-based).
    """
    k = M.field
    if not k.char:
        raise ValueError("column_echelon requires a prime field")
    p = k.char
    # column echelon of M = transpose of row echelon of M^T
    rows = [[0] * M.nrows for _ in range(M.ncols)]
    for r, c, v in M.triplets():
        rows[c][r] = v
    pivots = []
    lead = 0
    nr = len(rows)
    for c in range(M.nrows):
        piv = next((i for i in range(lead, nr) if rows[i][c]), None)
        if piv is None:
            continue
        rows[lead], rows[piv] = rows[piv], rows[lead]
        inv = pow(rows[lead][c], p - 2, p)
        rows[lead] = [x * inv % p for x in rows[lead]]
        for i in range(nr):
            if i != lead and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[lead])]
        pivots.append(c)
        lead += 1
        if lead == nr:
            break
    cols = [{r: v for r, v in enumerate(rows[j]) if v} for j in range(lead)]
    return SparseMatrix.from_columns(M.nrows, cols, k), pivots


# --------------------------------------------------------------------------
# text cache format: "nrows ncols nnz modulus" then 1-indexed "row col value"


def _format_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def write_matrix(path, M: SparseMatrix) -> str:
    """Write ``M`` in the ASCII triplet format; returns the sha256 of the file."""
    lines = [f"{M.nrows} {M.ncols} {M.nnz} {M.field.char}"]
    lines.extend(f"{r + 1} {c + 1} {_format_value(v)}" for r, c, v in M.triplets())
    text = "\n".join(lines) + "\n"
    Path(path).write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def read_matrix(path) -> SparseMatrix:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValueError(f"{path}: bad header")
        nrows, ncols, nnz, modulus = map(int, header)
        field = CoefficientField(modulus)
        triplets = []
        for line in fh:
            if not line.strip():
                continue
            r, c, v = line.split()
            triplets.append((int(r) - 1, int(c) - 1, Fraction(v) if "/" in v else int(v)))
    if len(triplets) != nnz:
        raise ValueError(f"{path}: expected {nnz} entries, found {len(triplets)}")
    return SparseMatrix.from_triplets(nrows, ncols, triplets, field)
