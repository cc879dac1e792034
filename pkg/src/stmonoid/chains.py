"""Finite chain complexes over a coefficient field, with labeled bases.

A complex is stored by its bases ``C_s`` and differentials ``d_s: C_s -> C_{s-1}``
as sparse matrices (rows indexed by ``C_{s-1}``).  Homology is computed
from ranks only, so integral torsion is invisible by design.
"""
from __future__ import annotations

import json
import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .exactla import CoefficientField, SparseMatrix, rank, read_matrix, write_matrix

__all__ = [
    "NotAComplex",
    "CorruptCache",
    "differential_ranks",
    "ChainComplex",
    "assemble",
    "check_d_squared",
    "homology_dims",
    "euler_characteristic",
    "save_complex",
    "load_complex",
]


class NotAComplex(ValueError):
    def __init__(self, degree, witness, message=""):
        self.degree = degree
        self.witness = witness
        super().__init__(message or f"d∘d != 0 on basis element {witness!r} in degree {degree}")


@dataclass
class ChainComplex:
    """``complete`` is False when the complex was cut off above its top
    degree; homology is then only reported below the cut."""

    k: CoefficientField
    bases: dict
    diffs: dict
    complete: bool = True
    ranks: dict = field(default_factory=dict)
    matchings: dict = field(default_factory=dict)

    @property
    def degrees(self) -> list:
        return sorted(self.bases)

    def dim(self, s) -> int:
        return len(self.bases.get(s, ()))

    def differential(self, s) -> SparseMatrix:
        d = self.diffs.get(s)
        if d is None:
            return SparseMatrix.zeros(self.dim(s - 1), self.dim(s), self.k)
        return d

    def dims(self) -> list:
        return [(s, self.dim(s)) for s in self.degrees]


def assemble(bases: Mapping[int, Sequence[Hashable]], generator: Callable, k: CoefficientField,
             *, check: bool = True, complete: bool = True, matching: Callable | None = None) -> ChainComplex:
    """Build a complex from ``generator(s, label) -> {lower label: coefficient}``.

    ``d_s`` is generated for every degree ``s`` whose predecessor ``s-1`` also
    carries a basis.  Raises :class:`NotAComplex` if ``check`` and d∘d != 0.

    ``matching(s, lower label)`` may name a label of C_s paired with the given
    label of C_{s-1}, or return None.  The pairs are hints for rank
    computations and are validated there.
    """
    bases = {s: list(b) for s, b in bases.items()}
    diffs = {}
    matchings: dict = {}
    for s in sorted(bases):
        if s - 1 not in bases:
            continue
        index = {lab: i for i, lab in enumerate(bases[s - 1])}
        cols = []
        for lab in bases[s]:
            col: dict = {}
            for tgt, c in generator(s, lab).items():
                i = index[tgt]
                col[i] = k.add(col.get(i, k.zero()), k(c))
            cols.append(col)
        diffs[s] = SparseMatrix.from_columns(len(bases[s - 1]), cols, k)
        if matching is not None:
            upper = {lab: j for j, lab in enumerate(bases[s])}
            pairs = []
            for i, lab in enumerate(bases[s - 1]):
                c = matching(s, lab)
                j = upper.get(c) if c is not None else None
                if j is not None:
                    pairs.append((i, j))
            matchings[s] = pairs
    C = ChainComplex(k, bases, diffs, complete, matchings=matchings)
    if check:
        check_d_squared(C)
    return C


def _to_scipy(M: SparseMatrix):
    """Integer scipy copy of ``M`` (None if some entry is not integral)."""
    data = M.data
    if any(isinstance(v, Fraction) and v.denominator != 1 for v in data):
        return None
    arr = np.fromiter((int(v) for v in data), dtype=np.int64, count=len(data))
    return sp.csc_matrix((arr, np.asarray(M.indices, dtype=np.int64), np.asarray(M.indptr, dtype=np.int64)),
                         shape=M.shape)


def _first_bad_column(M: SparseMatrix, N: SparseMatrix) -> int | None:
    """Index of the first column where M @ N is nonzero, or None."""
    A = _to_scipy(M)
    B = _to_scipy(N)
    p = M.field.char
    if A is not None and B is not None:
        P = (A @ B).tocsc()
        P.data = P.data % p if p else P.data
        P.eliminate_zeros()
        if P.nnz == 0:
            return None
        return int(np.flatnonzero(np.diff(P.indptr))[0])
    prod = M.matmul(N)
    for j in range(prod.ncols):
        if prod.indptr[j + 1] > prod.indptr[j]:
            return j
    return None


def check_d_squared(C: ChainComplex) -> None:
    for s in C.degrees:
        if s in C.diffs and s - 1 in C.diffs:
            j = _first_bad_column(C.diffs[s - 1], C.diffs[s])
            if j is not None:
                raise NotAComplex(s, C.bases[s][j])


def euler_characteristic(sizes: Mapping[int, int]) -> int:
    return sum((-1) ** s * n for s, n in sizes.items())


def differential_ranks(C: ChainComplex, *, upto: int | None = None) -> dict:
    """Ranks of all differentials, lowest degree first.

    The rank of ``d_{s+1}`` is bounded by ``dim C_s - rank d_s``; elimination
    stops once that bound is met.  Matched pairs recorded on the complex
    become pivots without elimination.
    """
    ranks = C.ranks
    for s in C.degrees:
        if upto is not None and s > upto:
            break
        if s not in C.diffs:
            ranks.setdefault(s, 0)
            continue
        if s not in ranks:
            bound = C.dim(s - 1) - ranks.get(s - 1, 0)
            M = C.diffs[s]
            pairs = C.matchings.get(s)
            if not M.nnz:
                ranks[s] = 0
            elif pairs and s - 1 in C.matchings:
                # On the transpose the unmatched columns are cells of C_{s-1}; those
                # matched downward are mostly dependent, so they go last.
                down = {j for _, j in C.matchings[s - 1]}
                ranks[s] = rank(M.transpose(), C.k, bound=bound, matching=[(j, i) for i, j in pairs], last=down)
            else:
                ranks[s] = rank(M, C.k, bound=bound, matching=pairs)
    return ranks


def homology_dims(C: ChainComplex) -> list:
    """``[(s, dim H_s)]``; for a complete complex the Euler characteristic is asserted."""
    degs = C.degrees
    top = degs[-1] if degs else None
    ranks = differential_ranks(C)
    out = []
    for s in degs:
        if not C.complete and s == top:
            break
        h = C.dim(s) - ranks.get(s, 0) - ranks.get(s + 1, 0)
        if h < 0:
            raise ArithmeticError(f"negative homology in degree {s}")
        out.append((s, h))
    if C.complete:
        chi_c = euler_characteristic({s: C.dim(s) for s in degs})
        chi_h = euler_characteristic(dict(out))
        if chi_c != chi_h:
            raise ArithmeticError(f"Euler characteristic mismatch {chi_c} != {chi_h}")
    return out


# --------------------------------------------------------------------------
# on-disk format: one matrix file per differential plus manifest.json


def save_complex(C: ChainComplex, directory, key: str, *, extra: Mapping | None = None) -> Path:
    d = Path(directory) / key
    d.mkdir(parents=True, exist_ok=True)
    files = {}
    for s, M in sorted(C.diffs.items()):
        name = f"d{s}.mtx"
        files[str(s)] = {"file": name, "sha256": write_matrix(d / name, M)}
    manifest = {
        "key": key,
        "field": C.k.char,
        "complete": C.complete,
        "dims": {str(s): C.dim(s) for s in C.degrees},
        "differentials": files,
        "ranks": {str(s): r for s, r in C.ranks.items()},
    }
    if extra:
        manifest.update(extra)
    (d / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return d


class CorruptCache(RuntimeError):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def load_complex(directory, key: str, *, load_matrices: bool = True) -> tuple:
    """Returns ``(ChainComplex, manifest)``; bases are replaced by ranges.

    Raises :class:`CorruptCache` on a checksum mismatch.
    """
    d = Path(directory) / key
    manifest = json.loads((d / "manifest.json").read_text())
    k = CoefficientField(manifest["field"])
    bases = {int(s): range(n) for s, n in manifest["dims"].items()}
    diffs = {}
    for s, entry in manifest["differentials"].items():
        path = d / entry["file"]
        if not path.exists() or _sha256(path) != entry["sha256"]:
            raise CorruptCache(f"checksum mismatch for {path}")
        if load_matrices:
            diffs[int(s)] = read_matrix(path)
    C = ChainComplex(k, bases, diffs, manifest["complete"],
                     {int(s): r for s, r in manifest.get("ranks", {}).items()})
    return C, manifest
