"""Simplicial complexes attached to F_q^n: the Tits building and Y_n.

Homology is reduced throughout: the augmentation C_0 -> C_{-1} = k is part
of the complex, so a point has no homology and a complex with c components
has H~_0 of dimension c - 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .chains import ChainComplex, assemble, homology_dims
from .exactla import CoefficientField
from .steinberg import TooLarge
from .subspaces import enumerate_lines, enumerate_subspaces, vector_rank

__all__ = [
    "SimplicialComplex",
    "reduced_chain_complex",
    "reduced_homology",
    "tits_building",
    "tits_homology",
    "yn_complex",
    "xn_skeleton",
    "skeleta_agree",
    "yn_homology",
    "connectivity_bound",
]


@dataclass
class SimplicialComplex:
    """``simplices[d]`` lists the d-simplices as sorted vertex-index tuples."""

    vertices: list
    simplices: dict

    @classmethod
    def from_facets(cls, vertices, facets) -> "SimplicialComplex":
        faces: dict = {}
        seen = set()
        for f in facets:
            f = tuple(sorted(f))
            for r in range(1, len(f) + 1):
                for face in combinations(f, r):
                    if face not in seen:
                        seen.add(face)
                        faces.setdefault(r - 1, []).append(face)
        return cls(list(vertices), {d: sorted(v) for d, v in faces.items()})

    @property
    def dim(self) -> int:
        return max(self.simplices, default=-1)

    def is_face_closed(self) -> bool:
        present = {s for ss in self.simplices.values() for s in ss}
        for ss in self.simplices.values():
            for s in ss:
                if len(s) > 1 and any(s[:i] + s[i + 1:] not in present for i in range(len(s))):
                    return False
        return True

    def facets(self) -> list:
        present = [s for d in sorted(self.simplices) for s in self.simplices[d]]
        covered = set()
        for s in present:
            for i in range(len(s)):
                covered.add(s[:i] + s[i + 1:])
        return [s for s in present if s not in covered]

    def write_facets(self, path) -> None:
        """Text export: the dimension, then one facet per line."""
        lines = [str(self.dim)] + [" ".join(map(str, f)) for f in self.facets()]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read_facets(cls, path) -> "SimplicialComplex":
        rows = Path(path).read_text().split("\n")
        facets = [tuple(int(x) for x in r.split()) for r in rows[1:] if r.strip()]
        nv = 1 + max((v for f in facets for v in f), default=-1)
        return cls.from_facets(range(nv), facets)


def reduced_chain_complex(K: SimplicialComplex, k: CoefficientField, *, check: bool = True) -> ChainComplex:
    bases = {-1: [()]}
    for d, ss in K.simplices.items():
        bases[d] = list(ss)

    def boundary(d, s):
        if d == 0:
            return {(): 1}
        return {s[:i] + s[i + 1:]: (-1) ** i for i in range(len(s))}

    return assemble(bases, boundary, k, check=check)


def reduced_homology(K: SimplicialComplex, k: CoefficientField) -> list:
    """``[(i, dim H~_i)]`` for i = -1 .. dim K."""
    return homology_dims(reduced_chain_complex(K, k))


# --------------------------------------------------------------------------
# Tits building

_TITS_LIMITS = {2: 4, 3: 3}


def tits_building(n: int, q: int) -> SimplicialComplex:
    """Order complex of the proper nonzero subspaces of F_q^n."""
    if n > _TITS_LIMITS.get(q, 0):
        raise TooLarge(f"Tits building refused for n={n}, q={q}")
    verts = [W for d in range(1, n) for W in enumerate_subspaces(n, d, q)]
    def contains(big, small):
        return all(big.contains(v) for v in small.basis)

    # vertices are listed by dimension, so a chain extended upward stays sorted
    simplices: dict = {}
    frontier = [(i,) for i in range(len(verts))]
    d = 0
    while frontier:
        simplices[d] = frontier
        nxt = []
        for chain in frontier:
            top = verts[chain[-1]]
            for j in range(chain[-1] + 1, len(verts)):
                W = verts[j]
                if W.dim > top.dim and contains(W, top):
                    nxt.append(chain + (j,))
        frontier = sorted(nxt)
        d += 1
    return SimplicialComplex(verts, simplices)


def tits_homology(n: int, q: int, k: CoefficientField) -> list:
    return reduced_homology(tits_building(n, q), k)


# --------------------------------------------------------------------------
# Y_n: line sets that fail to span, or contain a line complementary to the rest

_YN_ALLOWED = {(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)}


def _is_yn_simplex(lines: Sequence, n: int, q: int) -> bool:
    r = vector_rank(list(lines), q)
    if r < n:
        return True
    for i in range(len(lines)):
        rest = list(lines[:i]) + list(lines[i + 1:])
        if vector_rank(rest, q) == n - 1:
            return True
    return False


def yn_complex(n: int, q: int) -> SimplicialComplex:
    if (n, q) not in _YN_ALLOWED:
        raise TooLarge(f"Y_n refused for n={n}, q={q}")
    lines = enumerate_lines(n, q)
    simplices: dict = {0: [(i,) for i in range(len(lines))]}
    current = simplices[0]
    d = 0
    # a simplex's faces are simplices, so extend only simplices by larger vertices
    while current:
        nxt = []
        for s in current:
            for v in range(s[-1] + 1, len(lines)):
                cand = s + (v,)
                if _is_yn_simplex([lines[i] for i in cand], n, q):
                    nxt.append(cand)
        d += 1
        if nxt:
            simplices[d] = nxt
        current = nxt
    K = SimplicialComplex(list(lines), simplices)
    if not K.is_face_closed():
        raise AssertionError("Y_n is not closed under faces")
    return K


def xn_skeleton(n: int, q: int, top: int) -> dict:
    """Simplices of dimension <= top of X_n, the full simplex on all lines."""
    nl = len(enumerate_lines(n, q))
    return {d: list(combinations(range(nl), d + 1)) for d in range(top + 1)}


def skeleta_agree(n: int, q: int, Y: SimplicialComplex | None = None) -> bool:
    """Y_n and X_n share their (n-1)-skeleton."""
    Y = Y or yn_complex(n, q)
    X = xn_skeleton(n, q, n - 1)
    return all(sorted(Y.simplices.get(d, [])) == X[d] for d in X)


def connectivity_bound(n: int) -> int:
    return (3 * n - 5) // 2


def yn_homology(n: int, q: int, k: CoefficientField) -> list:
    return reduced_homology(yn_complex(n, q), k)
