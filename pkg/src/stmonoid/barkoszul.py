"""Reduced bar complex of the Steinberg monoid in a fixed internal degree.

A degree-s basis element is a bar [a_1 | ... | a_s] of PBW apartments over
an ordered direct-sum decomposition W_1 ⊕ ... ⊕ W_s of F_q^n.  Its word is the
concatenation of the pivot sets S_{W_j}; ordering basis elements by word
first makes filtration arguments plain index comparisons.

``phi`` is the contracting homotopy that certifies Koszulness and
``verify_homotopy`` checks that ∂Φ + Φ∂ - id strictly lowers the word.
"""
from __future__ import annotations

import random
from itertools import product
from typing import NamedTuple

from .chains import ChainComplex, assemble, homology_dims
from .exactla import CoefficientField
from .steinberg import TooLarge, pbw_entries, pbw_vectors, straighten_coords
from .subspaces import Subspace, canonical_subspace, direct_sum, enumerate_decompositions, precedes

__all__ = [
    "BarBasisElement",
    "CounterexampleFound",
    "bar_basis",
    "bar_boundary",
    "build_bar",
    "bar_homology",
    "phi",
    "verify_homotopy",
    "compositions",
]

_BAR_BUDGET = {2: 4, 3: 3, 5: 2}


class CounterexampleFound(AssertionError):
    def __init__(self, witness, message):
        self.witness = witness
        super().__init__(f"{message}: {witness!r}")


class BarBasisElement(NamedTuple):
    """Field order makes tuple comparison the (word, decomposition, indices) order."""

    word: tuple
    decomposition: tuple
    indices: tuple

    @classmethod
    def make(cls, decomposition, indices) -> "BarBasisElement":
        word = tuple(i for W in decomposition for i in W.pivots)
        return cls(word, tuple(decomposition), tuple(indices))

    @property
    def s(self) -> int:
        return len(self.decomposition)


def compositions(n: int, s: int):
    """Ordered tuples of s positive integers summing to n."""
    if s == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - s + 2):
        for rest in compositions(n - first, s - 1):
            yield (first,) + rest


def bar_basis(n: int, s: int, q: int) -> list:
    out = []
    for shape in compositions(n, s):
        pbw = [list(pbw_entries(d, q)) for d in shape]
        for dec in enumerate_decompositions(n, shape, q):
            for idx in product(*pbw):
                out.append(BarBasisElement.make(dec, idx))
    out.sort()
    return out


def _multiply(W1: Subspace, a1, W2: Subspace, a2, cache) -> tuple:
    """(W1 ⊕ W2, {pbw entries: integer coefficient}) for the product a1·a2."""
    W = direct_sum([W1, W2])
    vecs = pbw_vectors(W1, a1) + pbw_vectors(W2, a2)
    return W, straighten_coords([W.coordinates(v) for v in vecs], W.q, cache)


def bar_boundary(x: BarBasisElement, cache=None) -> dict:
    """∂x over the integers: Σ_j (-1)^(j-1) [.. | a_j a_{j+1} | ..] (1-based j)."""
    if cache is None:
        cache = {}
    dec, idx = x.decomposition, x.indices
    out: dict = {}
    for j in range(len(dec) - 1):
        sign = -1 if j % 2 else 1
        W, prod_ = _multiply(dec[j], idx[j], dec[j + 1], idx[j + 1], cache)
        new_dec = dec[:j] + (W,) + dec[j + 2:]
        for g, c in prod_.items():
            y = BarBasisElement.make(new_dec, idx[:j] + (g,) + idx[j + 2:])
            v = out.get(y, 0) + sign * c
            if v:
                out[y] = v
            else:
                out.pop(y, None)
    return out


def _check_budget(n: int, q: int):
    if n > _BAR_BUDGET.get(q, 0):
        raise TooLarge(f"bar complex refused for n={n}, q={q}")


def build_bar(n: int, q: int, k: CoefficientField, *, check: bool = True, cache=None) -> ChainComplex:
    """Degrees 1..n; d_s: B_s -> B_{s-1} merges adjacent blocks."""
    _check_budget(n, q)
    bases = {s: bar_basis(n, s, q) for s in range(1, n + 1)}
    memo = {} if cache is None else cache
    return assemble(bases, lambda s, x: bar_boundary(x, memo), k, check=check,
                    matching=lambda s, x: _phi_partner(x, memo))


def _phi_partner(x: BarBasisElement, cache):
    # Φ(x) = ±y and x appears in ∂y with coefficient ±1, so (x, y) can be pivoted directly
    y = phi(x, cache)
    return next(iter(y)) if y else None


def bar_homology(n: int, q: int, k: CoefficientField, **kw) -> list:
    return homology_dims(build_bar(n, q, k, **kw))


def _split_first(W: Subspace, a, cache) -> tuple:
    """Split the PBW apartment B_W g along {min S_W} ⊔ rest: ((L, ()), (W', g'))."""
    q = W.q
    w = pbw_vectors(W, a)
    L = canonical_subspace(w[:1], q, W.n)
    W2 = canonical_subspace(w[1:], q, W.n)
    res = straighten_coords([W2.coordinates(v) for v in w[1:]], q, cache)
    if len(res) != 1 or next(iter(res.values())) != 1:
        raise CounterexampleFound((W, a), "tail of a PBW apartment is not a PBW apartment")
    return (L, ()), (W2, next(iter(res)))


def phi(x: BarBasisElement, cache=None) -> dict:
    """The contracting homotopy on a basis element, as {basis element: ±1}."""
    if cache is None:
        cache = {}
    dec, idx = x.decomposition, x.indices
    widening = next((j for j, W in enumerate(dec) if W.dim > 1), None)
    if widening is None:
        return {}
    for j in range(widening):
        if precedes(dec[j].pivots, dec[j + 1].pivots):
            return {}
    (L, b), (W2, b2) = _split_first(dec[widening], idx[widening], cache)
    y = BarBasisElement.make(dec[:widening] + (L, W2) + dec[widening + 1:],
                             idx[:widening] + (b, b2) + idx[widening + 1:])
    # widening is 0-based, so the sign (-1)^(k-1) for 1-based k is (-1)^widening
    return {y: -1 if widening % 2 else 1}


def _apply(op, combo: dict, cache) -> dict:
    out: dict = {}
    for x, c in combo.items():
        for y, v in op(x, cache).items():
            t = out.get(y, 0) + c * v
            if t:
                out[y] = t
            else:
                out.pop(y, None)
    return out


def homotopy_defect(x: BarBasisElement, cache=None) -> dict:
    """(∂Φ + Φ∂ - id)(x) over the integers."""
    if cache is None:
        cache = {}
    out = _apply(bar_boundary, phi(x, cache), cache)
    for y, v in _apply(phi, bar_boundary(x, cache), cache).items():
        t = out.get(y, 0) + v
        if t:
            out[y] = t
        else:
            out.pop(y, None)
    t = out.get(x, 0) - 1
    if t:
        out[x] = t
    else:
        out.pop(x, None)
    return out


def verify_homotopy(n: int, q: int, k: CoefficientField | None = None, samples: int | None = None,
                    *, seed: int = 0, order: str = "descending") -> dict:
    """Check the filtration property on all basis elements of degree s < n,
    or on ``samples`` of them drawn uniformly.

    Merging two blocks sorts part of the word, so merges never raise it; the
    property that holds is that ∂Φ + Φ∂ - id is supported on strictly
    smaller words (``order="descending"``).  ``order="ascending"`` checks the
    mirror statement (strictly larger words), which fails already at n=3.

    Coefficients are integers, so the check holds for every coefficient field.
    Raises :class:`CounterexampleFound` on the first violation.
    """
    if order not in ("descending", "ascending"):
        raise ValueError(f"unknown order {order!r}")
    _check_budget(n, q)
    pool = [x for s in range(1, n) for x in bar_basis(n, s, q)]
    size = len(pool)
    if samples is not None and samples < len(pool):
        pool = random.Random(seed).sample(pool, samples)
    beyond = (lambda y, x: y < x) if order == "descending" else (lambda y, x: y > x)
    cache: dict = {}
    for x in pool:
        ph = phi(x, cache)
        if any(y.word != x.word for y in ph):
            raise CounterexampleFound(x, "Φ changes the word")
        for y in homotopy_defect(x, cache):
            if not beyond(y.word, x.word):
                raise CounterexampleFound(x, f"∂Φ + Φ∂ - id is not supported on strictly {'smaller' if order == 'descending' else 'larger'} words")
    return {"n": n, "q": q, "order": order, "checked": len(pool), "pool": size, "pass": True}
