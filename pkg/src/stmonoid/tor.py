"""Tor over the apartment monoid with coefficients in the Steinberg module.

Two independent complexes compute the same groups:

* the Koszul complex ``Sym^i(triv_1) ⊗ St`` in internal degree n, with basis
  triples (F, X, a): F a set of i independent lines, X a complement of their
  span and a a PBW index of X;
* the Sharbly quotient complex ``W_*``, spanned by multisets of n+i lines of
  full rank in which no line is a coloop.

Also here: the degree-3 Lee–Szczarba cokernel, group coinvariants of St and
Tor over the oriented apartment monoid.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations, product
from math import comb, factorial
from typing import NamedTuple

from .chains import ChainComplex, assemble, homology_dims
from .exactla import CoefficientField, SparseMatrix, rank
from .oriented import oriented_module, orientation_class, pm_normalize
from .steinberg import TooLarge, enumerate_frames, pbw_entries, pbw_vectors, straighten_coords
from .subspaces import (
    Subspace,
    canonical_subspace,
    complements,
    det_mod,
    direct_sum,
    enumerate_lines,
    enumerate_subspaces,
    full_space,
    gaussian_binomial,
    gl_order,
    level,
    normalize_line,
    vector_rank,
    zero_subspace,
)

__all__ = [
    "KoszulBasisElement",
    "TorTable",
    "koszul_complex",
    "koszul_tor",
    "chain_dim",
    "chain_dim_formula",
    "SharblyClass",
    "sharbly_basis",
    "sharbly_generators",
    "sharbly_complex",
    "sharbly_tor",
    "ls_canonical",
    "ls_orbits",
    "ls_raw_count",
    "ls_cokernel",
    "ls_l1_degree3",
    "group_generators",
    "coinvariants_dim",
    "OrientedKoszulElement",
    "oriented_koszul_complex",
    "oriented_tor",
]


class KoszulBasisElement(NamedTuple):
    F: tuple
    X: Subspace
    a: tuple


@dataclass
class TorTable:
    method: str
    q: int
    k: CoefficientField
    entries: dict = field(default_factory=dict)

    def get(self, i: int, n: int):
        return self.entries.get((i, n))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "q", "k", "i", "n", "dim"])
        for (i, n), d in sorted(self.entries.items()):
            w.writerow([self.method, self.q, self.k.name, i, n, d])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TorTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty Tor table")
        t = cls(rows[0]["method"], int(rows[0]["q"]), CoefficientField.parse(rows[0]["k"]))
        for r in rows:
            t.entries[(int(r["i"]), int(r["n"]))] = int(r["dim"])
        return t


# --------------------------------------------------------------------------
# Koszul complex

_KOSZUL_BUDGET = {2: (5, 3), 3: (4, 3), 5: (3, 3)}


def _frames_of(S: Subspace) -> list:
    """Unordered frames of S as sorted tuples of level-normalized lines."""
    q = S.q
    out = []
    for fr in enumerate_frames(S.dim, q):
        lines = sorted(normalize_line(S.from_coordinates(c), q) for c in fr)
        out.append(tuple(lines))
    return sorted(out)


def koszul_basis(n: int, i: int, q: int) -> list:
    if i < 0 or i > n:
        return []
    out = []
    for S in enumerate_subspaces(n, i, q):
        frames = _frames_of(S) if i else [()]
        for X in complements(S):
            entries = list(pbw_entries(n - i, q))
            for F in frames:
                for a in entries:
                    out.append(KoszulBasisElement(F, X, a))
    return out


def chain_dim(i: int, n: int, q: int) -> int:
    """dim Sym^i(triv_1) ⊗ St in internal degree n, by enumeration."""
    if i < 0 or i > n:
        return 0
    frames = len(enumerate_frames(i, q)) if i else 1
    total = 0
    for S in enumerate_subspaces(n, i, q):
        total += len(complements(S))
    return total * frames * q ** ((n - i) * (n - i - 1) // 2)


def chain_dim_formula(i: int, n: int, q: int) -> int:
    """Closed form: [n choose i]_q q^{i(n-i)} #frames(F_q^i) q^{C(n-i,2)}."""
    if i < 0 or i > n:
        return 0
    frames = gl_order(i, q) // ((q - 1) ** i * factorial(i))
    return gaussian_binomial(n, i, q) * q ** (i * (n - i)) * frames * q ** comb(n - i, 2)


def _koszul_generator(q: int, cache: dict):
    def gen(i, el: KoszulBasisElement):
        F, X, a = el
        vecs_a = pbw_vectors(X, a) if X.dim else ()
        out: dict = {}
        for t, L in enumerate(F):
            rest = F[:t] + F[t + 1:]
            Y = direct_sum([canonical_subspace([L], q, X.n), X]) if X.dim else canonical_subspace([L], q, X.n)
            coords = [Y.coordinates(v) for v in (L,) + tuple(vecs_a)]
            for g, c in straighten_coords(coords, q, cache).items():
                key = KoszulBasisElement(rest, Y, g)
                out[key] = out.get(key, 0) + c
        return out

    return gen


def _designated_line(F: tuple, X: Subspace):
    """Smallest line of F (by level, then coordinates) sitting below every pivot of X."""
    lo = min(X.pivots) if X.dim else None
    cand = [(level(L), L) for L in F if lo is None or level(L) < lo]
    return min(cand)[1] if cand else None


def _koszul_matching(q: int, cache: dict):
    """Pairs (F, Y, b) with (F + L, X, a) where B_Y b = L · B_X a splits off
    its first vector.  The entry of d at such a pair is 1, and the pairing is
    an acyclic matching, so matched columns can be pivoted without elimination."""
    def match(i, el: KoszulBasisElement):
        F, Y, b = el
        if Y.dim == 0:
            return None
        w = pbw_vectors(Y, b)
        L = normalize_line(w[0], q)
        if Y.dim > 1:
            X = canonical_subspace(w[1:], q, Y.n)
            res = straighten_coords([X.coordinates(v) for v in w[1:]], q, cache)
            if len(res) != 1:
                return None
            (a, c), = res.items()
            if c != 1:
                return None
        else:
            X, a = zero_subspace(Y.n, q), ()
        Fn = tuple(sorted(F + (L,)))
        if _designated_line(Fn, X) != L:
            return None
        return KoszulBasisElement(Fn, X, a)

    return match


def koszul_complex(n: int, q: int, k: CoefficientField, i_max: int | None = None, *,
                   check: bool = True, cache: dict | None = None) -> ChainComplex:
    """Koszul complex in internal degree n, homological degrees 0..min(n, i_max+1)."""
    top = n if i_max is None else min(n, i_max + 1)
    bases = {i: koszul_basis(n, i, q) for i in range(top + 1)}
    cache = {} if cache is None else cache
    gen = _koszul_generator(q, cache)
    return assemble(bases, gen, k, check=check, complete=(top == n), matching=_koszul_matching(q, cache))


def _check_koszul_budget(n_max: int, i_max: int, q: int):
    lim = _KOSZUL_BUDGET.get(q)
    if lim is None or n_max > lim[0]:
        raise TooLarge(f"Koszul complex over F_{q} refused for n={n_max}")


def koszul_tor(n_max: int, i_max: int, q: int, k: CoefficientField, *, check: bool = True) -> TorTable:
    _check_koszul_budget(n_max, i_max, q)
    table = TorTable("koszul", q, k)
    cache: dict = {}
    for n in range(n_max + 1):
        C = koszul_complex(n, q, k, i_max, check=check, cache=cache)
        for i, h in homology_dims(C):
            if i <= i_max:
                table.entries[(i, n)] = h
    return table


# --------------------------------------------------------------------------
# Sharbly quotient complex W_* = k ⊗_A Sh_*

_SHARBLY_BUDGET = {2: (4, 2)}


class SharblyClass(NamedTuple):
    """A multiset of lines, as a sorted tuple (repeats allowed only in char 2)."""

    lines: tuple

    @property
    def has_repeat(self) -> bool:
        return any(a == b for a, b in zip(self.lines, self.lines[1:]))


def _has_coloop(lines, q: int) -> bool:
    n = len(lines[0])
    for t in range(len(lines)):
        if t and lines[t] == lines[t - 1]:
            continue
        if vector_rank(list(lines[:t] + lines[t + 1:]), q) < n:
            return True
    return False


def _is_sharbly(lines, n: int, q: int) -> bool:
    return vector_rank(list(lines), q) == n and not _has_coloop(lines, q)


def sharbly_generators(n: int, i: int, q: int, char: int) -> list:
    """Nonzero symbol classes of Sh_i(F_q^n): multisets of n+i lines of rank n."""
    lines = enumerate_lines(n, q)
    pick = combinations_with_replacement if char == 2 else combinations
    return [c for c in pick(lines, n + i) if vector_rank(list(c), q) == n]


def sharbly_basis(n: int, i: int, q: int, char: int) -> list:
    """Basis of W_i(F_q^n).  In degree 0 the indecomposables are k at n = 0 only."""
    if n == 0:
        return [SharblyClass(())] if i == 0 else []
    if i <= 0:
        return []
    lines = enumerate_lines(n, q)
    pick = combinations_with_replacement if char == 2 else combinations
    return [SharblyClass(c) for c in pick(lines, n + i) if _is_sharbly(c, n, q)]


def _sharbly_generator(n: int, q: int, members: dict):
    def gen(i, el: SharblyClass):
        lines = el.lines
        out: dict = {}
        target = members.get(i - 1, set())
        for t, L in enumerate(lines):
            face = SharblyClass(lines[:t] + lines[t + 1:])
            if face in target:
                out[face] = out.get(face, 0) + (-1) ** t
        return {f: c for f, c in out.items() if c}

    return gen


def sharbly_complex(n: int, q: int, k: CoefficientField, i_max: int, *, check: bool = True) -> ChainComplex:
    """W_* in internal degree n, degrees 0..i_max+1 (so H_i is exact for i <= i_max)."""
    bases = {i: sharbly_basis(n, i, q, k.char) for i in range(i_max + 2)}
    members = {i: set(b) for i, b in bases.items()}
    return assemble(bases, _sharbly_generator(n, q, members), k, check=check, complete=False)


def sharbly_tor(n_max: int, i_max: int, q: int, k: CoefficientField, *, check: bool = True) -> TorTable:
    lim = _SHARBLY_BUDGET.get(q)
    if lim is None or n_max > lim[0] or i_max > lim[1]:
        raise TooLarge(f"Sharbly complex refused for q={q}, n={n_max}, i={i_max}")
    table = TorTable("sharbly", q, k)
    for n in range(n_max + 1):
        for i, h in homology_dims(sharbly_complex(n, q, k, i_max, check=check)):
            table.entries[(i, n)] = h
    return table


# --------------------------------------------------------------------------
# Lee–Szczarba cokernel in degree 3

def _vectors(n: int, q: int) -> list:
    return [v for v in product(range(q), repeat=n) if any(v)]


def _inverse_cols(cols, q: int):
    """Rows of the inverse of the matrix with the given columns."""
    n = len(cols)
    m = [[cols[j][i] % q for j in range(n)] + [int(i == r) for r in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c])
        m[c], m[piv] = m[piv], m[c]
        inv = pow(m[c][c], q - 2, q)
        m[c] = [x * inv % q for x in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % q for x, y in zip(m[i], m[c])]
    return [row[n:] for row in m]


def ls_canonical(tup, n: int, q: int) -> tuple:
    """Orbit representative: the first index n-tuple forming a basis is sent to e_1..e_n.

    The first n entries of an LS symbol span, so that tuple is always (0..n-1).
    """
    g = _inverse_cols(tup[:n], q)
    return tuple(tuple(sum(g[r][j] * v[j] for j in range(n)) % q for r in range(n)) for v in tup)


def ls_orbits(n: int, i: int, q: int) -> list:
    """Canonical representatives of GL-orbits of (n+i)-tuples of distinct nonzero
    vectors whose first n entries span."""
    e = tuple(tuple(int(r == c) for r in range(n)) for c in range(n))
    rest = [v for v in _vectors(n, q) if v not in e]
    return [e + t for t in permutations(rest, i)]


def ls_raw_count(n: int, i: int, q: int) -> int:
    """Number of LS tuples, by brute-force enumeration."""
    vecs = _vectors(n, q)
    return sum(1 for t in permutations(vecs, n + i) if vector_rank(list(t[:n]), q) == n)


def _ls_killed(tup, n: int, q: int) -> bool:
    # t-decomposable: the first vector lies outside the span of the rest
    return vector_rank(list(tup[1:]), q) < n


def ls_cokernel(n: int, q: int, k: CoefficientField) -> int:
    """dim coker(d_2) on k ⊗_{k[t]} H_0(GL; LS_*) in internal degree n."""
    tgt = [t for t in ls_orbits(n, 1, q) if not _ls_killed(t, n, q)]
    index = {t: j for j, t in enumerate(tgt)}
    cols = []
    for src in ls_orbits(n, 2, q):
        if _ls_killed(src, n, q):
            continue
        col: dict = {}
        for j in range(len(src)):
            face = src[:j] + src[j + 1:]
            if vector_rank(list(face[:n]), q) < n:
                continue
            r = index.get(ls_canonical(face, n, q))
            if r is None:
                continue
            col[r] = col.get(r, 0) + (-1) ** j
        cols.append({r: c for r, c in col.items() if c})
    if not tgt:
        return 0
    return len(tgt) - rank(SparseMatrix.from_columns(len(tgt), cols, k), k)


def ls_l1_degree3(q: int, k: CoefficientField) -> int:
    if q not in (2, 3):
        raise TooLarge(f"Lee–Szczarba check refused for q={q}")
    return ls_cokernel(3, q, k)


# --------------------------------------------------------------------------
# group coinvariants

def group_generators(group: str, n: int, q: int) -> list:
    """Generating matrices (as rows) of SL_n, GL_n or GL_n^± over F_q."""
    def ident():
        return [[int(r == c) for c in range(n)] for r in range(n)]

    gens = []
    for a in range(n):
        for b in range(n):
            if a != b:
                g = ident()
                g[a][b] = 1
                gens.append(g)
    if group == "SL":
        return gens
    if group == "GL":
        unit = next(u for u in range(1, q) if all(pow(u, (q - 1) // f, q) != 1 for f in _prime_factors(q - 1)))
    elif group == "GLpm":
        unit = q - 1
    else:
        raise ValueError(f"unknown group {group!r}")
    if n and unit != 1:
        g = ident()
        g[0][0] = unit
        gens.append(g)
    return gens


def _prime_factors(m: int) -> list:
    out, f = [], 2
    while f * f <= m:
        if m % f == 0:
            out.append(f)
            while m % f == 0:
                m //= f
        f += 1
    if m > 1:
        out.append(m)
    return out


def coinvariants_dim(group: str, n: int, q: int, module: str, k: CoefficientField) -> int:
    """dim of M / span{g·x - x} for generators g of the group and basis elements x.

    ``module`` is "steinberg" (St(F_q^n) in its PBW basis) or "oriented" (the
    oriented Steinberg module, orientation class 1; GL then means GL^±).
    """
    if n > 4:
        raise TooLarge(f"coinvariants refused for n={n}")
    if module == "steinberg":
        W = full_space(n, q)
        basis = list(pbw_entries(n, q))
        index = {b: i for i, b in enumerate(basis)}
        cache: dict = {}

        def act(g, b):
            vecs = [tuple(sum(g[r][j] * v[j] for j in range(n)) % q for r in range(n)) for v in pbw_vectors(W, b)]
            return {index[h]: c for h, c in straighten_coords(vecs, q, cache).items()}

        gens = group_generators(group, n, q)
    elif module == "oriented":
        Q = oriented_module(q, n, 1, "steinberg", k)
        basis = Q.basis_symbols()

        def act(g, sym):
            return Q.coordinates([tuple(sum(g[r][j] * v[j] for j in range(n)) % q for r in range(n)) for v in sym])

        gens = group_generators("GLpm" if group == "GL" else group, n, q)
    else:
        raise ValueError(f"unknown module {module!r}")
    m = len(basis)
    if n == 0:
        return m
    cols = []
    for g in gens:
        for i, b in enumerate(basis):
            col = {r: k(c) for r, c in act(g, b).items()}
            col[i] = k.sub(col.get(i, k.zero()), k.one())
            cols.append({r: c for r, c in col.items() if c})
    return m - rank(SparseMatrix.from_columns(m, cols, k), k)


# --------------------------------------------------------------------------
# oriented Tor

_ORIENTED_TOR_BUDGET = {3: 4, 5: 3}


class OrientedKoszulElement(NamedTuple):
    """F: sorted ±-normalized vectors; X: complement; j: position in the quotient basis."""

    F: tuple
    X: Subspace
    j: int


def _oriented_summands(n: int, i: int, p: int, k: CoefficientField):
    """(F, X, quotient) with total orientation class 1 in F_p^n."""
    out = []
    for S in enumerate_subspaces(n, i, p):
        reps = sorted({pm_normalize(v, p) for v in _vectors(n, p) if S.contains(v)})
        frames = [c for c in combinations(reps, i) if vector_rank(list(c), p) == i] if i else [()]
        for X in complements(S):
            for F in frames:
                det = det_mod(list(F) + list(X.basis), p)
                o = orientation_class(pow(det, p - 2, p), p)
                out.append((F, X, oriented_module(p, n - i, o, "steinberg", k)))
    return out


def oriented_koszul_complex(p: int, n: int, k: CoefficientField, i_max: int, *, check: bool = True) -> ChainComplex:
    top = min(n, i_max + 1)
    bases = {}
    for i in range(top + 1):
        bases[i] = [OrientedKoszulElement(F, X, j) for F, X, Q in _oriented_summands(n, i, p, k) for j in range(Q.dim)]

    def gen(i, el):
        F, X, j = el
        d = X.dim
        o_x = orientation_class(pow(det_mod(list(F) + list(X.basis), p), p - 2, p), p)
        Qx = oriented_module(p, d, o_x, "steinberg", k)
        sym = Qx.basis_symbols()[j]
        vecs = tuple(X.from_coordinates(c) for c in sym)
        out: dict = {}
        for t, v in enumerate(F):
            rest = F[:t] + F[t + 1:]
            L = canonical_subspace([v], p, n)
            Y = direct_sum([L, X]) if d else L
            o_y = orientation_class(pow(det_mod(list(rest) + list(Y.basis), p), p - 2, p), p)
            Qy = oriented_module(p, d + 1, o_y, "steinberg", k)
            for pos, c in Qy.coordinates([Y.coordinates(w) for w in (v,) + vecs]).items():
                key = OrientedKoszulElement(rest, Y, pos)
                out[key] = k.add(out.get(key, k.zero()), c)
        return out

    return assemble(bases, gen, k, check=check, complete=(top == n))


def oriented_tor(p: int, n_max: int, i_max: int, k: CoefficientField, *, check: bool = True) -> TorTable:
    """Tor over the oriented apartment monoid with values in the oriented Steinberg module."""
    if n_max > _ORIENTED_TOR_BUDGET.get(p, -1) or i_max > 1:
        raise TooLarge(f"oriented Tor refused for p={p}, n={n_max}, i={i_max}")
    table = TorTable("oriented", p, k)
    for n in range(n_max + 1):
        for i, h in homology_dims(oriented_koszul_complex(p, n, k, i_max, check=check)):
            if i <= i_max:
                table.entries[(i, n)] = h
    return table
