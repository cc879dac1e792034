"""Oriented variants over F_p, p odd: only the scalar -1 may rescale a vector.

An orientation of a d-dimensional space is a nonzero determinant class
modulo ±1, stored as its representative in 1..(p-1)/2.  Modules are
presented by generators (ordered bases of the right orientation, modulo
permutation signs and sign changes of single vectors) and, for the
Steinberg variant, the three-term relation.  They have no canonical basis,
so they are represented by elimination coordinates, one quotient per
(dimension, orientation class).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

from .exactla import CoefficientField, Eliminator
from .steinberg import TooLarge, _perm_sign
from .subspaces import det_mod, level, vector_rank

__all__ = [
    "OrientedSpace",
    "OrientedQuotient",
    "orientation_class",
    "pm_normalize",
    "oriented_module",
]

_ORIENTED_LIMITS = {3: 4, 5: 3}


def orientation_class(det: int, p: int) -> int:
    det %= p
    if not det:
        raise ValueError("degenerate basis has no orientation")
    return min(det, p - det)


def pm_normalize(v, p: int) -> tuple:
    """Representative of {v, -v} whose last nonzero entry lies in 1..(p-1)/2."""
    v = tuple(x % p for x in v)
    if v[level(v)] > p // 2:
        v = tuple((-x) % p for x in v)
    return v


@dataclass(frozen=True)
class OrientedSpace:
    p: int
    n: int
    orientation: int

    def __post_init__(self):
        if self.p % 2 == 0 or self.p < 3:
            raise ValueError("orientations need an odd prime")
        if not 1 <= self.orientation <= self.p // 2:
            raise ValueError(f"orientation class must lie in 1..{self.p // 2}")


def _canon(vectors, p):
    vecs = [pm_normalize(v, p) for v in vectors]
    order = sorted(range(len(vecs)), key=lambda i: vecs[i])
    return tuple(vecs[i] for i in order), _perm_sign(order)


class OrientedQuotient:
    """Coordinates of symbols of F_p^d with a fixed orientation class."""

    def __init__(self, space: OrientedSpace, which: str, k: CoefficientField, gens: list, elim: Eliminator):
        self.space = space
        self.which = which
        self.k = k
        self.generators = gens
        self.index = {g: i for i, g in enumerate(gens)}
        self._elim = elim
        self.basis = [i for i in range(len(gens)) if not elim.is_pivot_row(i)]
        self._pos = {i: t for t, i in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def basis_symbols(self) -> list:
        return [self.generators[i] for i in self.basis]

    def coordinates(self, vectors) -> dict:
        """Sparse coordinates ``{basis position: coefficient}`` of a symbol."""
        p = self.space.p
        if self.space.n == 0:
            return {0: self.k.one()} if self.dim else {}
        key, sign = _canon(vectors, p)
        i = self.index.get(key)
        if i is None:
            raise ValueError("symbol is not a basis of the right orientation")
        rem = self._elim.reduce({i: sign})
        k = self.k
        return {self._pos[r]: k(v) for r, v in rem.items() if k(v)}


def _generators(p: int, d: int, o: int) -> list:
    if d == 0:
        return [()] if o == 1 else []
    reps = sorted({pm_normalize(v, p) for v in product(range(p), repeat=d) if any(v)})
    out = []
    for combo in combinations(reps, d):
        det = det_mod(list(combo), p)
        if det and orientation_class(det, p) == o:
            out.append(combo)
    return out


@lru_cache(maxsize=None)
def _quotient(p: int, d: int, o: int, which: str, k: CoefficientField) -> OrientedQuotient:
    gens = _generators(p, d, o)
    index = {g: i for i, g in enumerate(gens)}
    elim = Eliminator(k)
    if which == "steinberg" and d >= 2:
        seen = set()
        for g in gens:
            for i, j in combinations(range(d), 2):
                rest = tuple(g[t] for t in range(d) if t not in (i, j))
                for a, b in ((i, j), (j, i)):
                    for eps in (1, p - 1):
                        v1 = g[a]
                        v2 = tuple(eps * x % p for x in g[b])
                        v0 = tuple((x + y) % p for x, y in zip(v1, v2))
                        col: dict = {}
                        for c, sym in ((1, (v1, v2) + rest), (-1, (v0, v2) + rest), (1, (v0, v1) + rest)):
                            key, s = _canon(sym, p)
                            r = index[key]
                            col[r] = col.get(r, 0) + c * s
                        col = {r: v for r, v in col.items() if v}
                        fp = tuple(sorted(col.items()))
                        neg = tuple(sorted((r, -v) for r, v in col.items()))
                        if not col or fp in seen or neg in seen:
                            continue
                        seen.add(fp)
                        elim.add(col)
    return OrientedQuotient(OrientedSpace(p, d, o), which, k, gens, elim)


def oriented_module(p: int, n: int, orientation: int, which: str, k: CoefficientField) -> OrientedQuotient:
    """The oriented apartment module or oriented Steinberg module of F_p^n.

    ``which`` is "apartment" (permutation and sign relations only) or
    "steinberg" (adds the three-term relation).
    """
    if which not in ("apartment", "steinberg"):
        raise ValueError(f"unknown module {which!r}")
    OrientedSpace(p, max(n, 0), orientation)
    if n > _ORIENTED_LIMITS.get(p, 0):
        raise TooLarge(f"oriented module refused for p={p}, n={n}")
    return _quotient(p, n, orientation, which, k)


def basis_orientation(vectors, p: int) -> int:
    return orientation_class(det_mod(list(vectors), p), p) if vectors else 1


def is_oriented_basis(vectors, p: int, d: int) -> bool:
    return len(vectors) == d and vector_rank(list(vectors), p) == d
