"""Acceptance criteria, one block per criterion.

Each block records its parts through the ``criterion`` fixture; the terminal
summary prints one PASS/FAIL line per criterion.
"""
import random
from functools import lru_cache
from math import comb

import pytest

from stmonoid.barkoszul import CounterexampleFound, bar_homology, build_bar, verify_homotopy
from stmonoid.buildings import (
    connectivity_bound,
    reduced_chain_complex,
    tits_building,
    tits_homology,
    yn_complex,
    yn_homology,
)
from stmonoid.chains import check_d_squared
from stmonoid.exactla import GF, QQ
from stmonoid.oriented import oriented_module
from stmonoid.steinberg import (
    ApartmentSymbol,
    basis_element,
    oracle_mismatches,
    ordered_bases,
    pbw_basis,
    pbw_vectors,
    presentation_dim_oracle,
    random_symbol,
    st_multiply,
    straighten,
    straighten_coords,
)
from stmonoid.subspaces import (
    canonical_subspace,
    direct_sum,
    enumerate_decompositions,
    enumerate_subspaces,
    full_space,
    is_basis,
    precedes,
)
from stmonoid.tor import (
    chain_dim,
    coinvariants_dim,
    koszul_complex,
    koszul_tor,
    ls_l1_degree3,
    oriented_koszul_complex,
    oriented_tor,
    sharbly_complex,
    sharbly_tor,
)

FIELDS = {"rat": QQ, "p2": GF(2), "p3": GF(3)}


@lru_cache(maxsize=None)
def koszul_table(n_max, i_max, q, kname):
    return koszul_tor(n_max, i_max, q, FIELDS[kname]).entries


# 1 -----------------------------------------------------------------------

@pytest.mark.parametrize("n,q", [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_c01_steinberg_dimensions(criterion, n, q):
    with criterion(1, f"({n},{q})"):
        expected = q ** comb(n, 2)
        assert presentation_dim_oracle(n, q, QQ).dim == expected
        assert len(pbw_basis(full_space(n, q))) == expected


# 2 -----------------------------------------------------------------------

@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2)])
def test_c02_straightening_exhaustive(criterion, n, q):
    with criterion(2, f"({n},{q}) exhaustive"):
        assert oracle_mismatches(n, q, QQ, list(ordered_bases(n, q))) == []


def test_c02_straightening_sampled(criterion):
    with criterion(2, "(3,3) 500 random"):
        rng = random.Random(2)
        assert oracle_mismatches(3, 3, QQ, [random_symbol(3, 3, rng) for _ in range(500)]) == []


# 3 -----------------------------------------------------------------------

@pytest.mark.parametrize("kname", ["rat", "p2", "p3"])
@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_c03_koszulness(criterion, n, q, kname):
    with criterion(3, f"({n},{q},{kname})"):
        hom = dict(bar_homology(n, q, FIELDS[kname]))
        assert all(hom[s] == 0 for s in range(1, n))
        assert hom[n] == q ** (n * n - n)


# 4 -----------------------------------------------------------------------

@pytest.mark.parametrize("n,q,samples", [(2, 2, None), (3, 2, None), (3, 3, 1000)])
def test_c04_homotopy(criterion, n, q, samples):
    label = "exhaustive" if samples is None else f"{samples} samples"
    with criterion(4, f"({n},{q}) {label}, descending word order"):
        report = verify_homotopy(n, q, samples=samples, seed=4)
        assert report["pass"]
        if samples:
            # the pool is smaller than the sample count at (3,3), so it is covered exhaustively
            assert report["checked"] == min(samples, report["pool"])
            criterion.note(4, f"({n},{q}) checked {report['checked']} of pool {report['pool']}")


@pytest.mark.xfail(strict=True, raises=CounterexampleFound,
                   reason="merging blocks sorts part of the word, so the filtration runs the other way")
def test_c04_homotopy_ascending_reading(criterion):
    try:
        verify_homotopy(3, 2, order="ascending")
    except CounterexampleFound as exc:
        criterion.note(4, f"ascending word order fails at (3,2) as expected: {exc.witness.word}")
        raise


# 5 -----------------------------------------------------------------------

def test_c05_tor_degree_bounds_q2(criterion):
    with criterion(5, "q=2 n<=5 i<=2"):
        T = koszul_table(5, 2, 2, "rat")
        assert [T[(0, n)] for n in range(6)] == [1, 0, 0, 0, 0, 0]
        assert T[(1, 2)] != 0 and T[(1, 3)] == 0 and T[(1, 4)] == 0
        assert T[(2, 4)] != 0
        assert T[(2, 5)] == 0
        assert all(d == 0 for (i, n), d in T.items() if n > 2 * i)


def test_c05_tor_degree_bounds_q3(criterion):
    with criterion(5, "q=3 n<=4 i<=1"):
        T = koszul_table(4, 1, 3, "rat")
        assert [T[(0, n)] for n in range(5)] == [1, 0, 0, 0, 0]
        assert T[(1, 2)] != 0 and T[(1, 3)] == 0 and T[(1, 4)] == 0


# 6 -----------------------------------------------------------------------

def test_c06_chain_dimension(criterion):
    with criterion(6, "chain_dim(2,4,3)=189540, closed form at q=2,3"):
        assert chain_dim(2, 4, 3) == 189540
        for q in (2, 3):
            assert chain_dim(2, 4, q) == (q ** 4 - 1) * (q ** 3 - 1) * q ** 6 // (2 * (q - 1) ** 2)


# 7 -----------------------------------------------------------------------

@pytest.mark.parametrize("kname", ["rat", "p2"])
def test_c07_sharbly_agrees_with_koszul(criterion, kname):
    with criterion(7, f"q=2 n<=4 i<=2 {kname}"):
        sh = sharbly_tor(4, 2, 2, FIELDS[kname]).entries
        ko = koszul_table(4, 2, 2, kname)
        common = set(sh) & set(ko)
        assert {(i, n) for i in range(3) for n in range(i, 5)} <= common
        assert {c: sh[c] for c in common} == {c: ko[c] for c in common}


# 8 -----------------------------------------------------------------------

@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_c08_yn(criterion, n, q):
    with criterion(8, f"({n},{q})"):
        hom = dict(yn_homology(n, q, QQ))
        assert all(hom.get(i, 0) == 0 for i in range(-1, connectivity_bound(n) + 1))
        tor = koszul_table(n, n, q, "rat")
        for i, h in hom.items():
            j = i - n + 2
            assert h == (tor[(j, n)] if 0 <= j <= n else 0), (i, h)
        if n == 2:
            assert hom[1] == {2: 1, 3: 3}[q]


# 9 -----------------------------------------------------------------------

@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_c09_tits_building(criterion, n, q):
    with criterion(9, f"({n},{q})"):
        hom = {i: h for i, h in tits_homology(n, q, QQ) if h}
        assert hom == {n - 2: q ** comb(n, 2)}


# 10 ----------------------------------------------------------------------

@pytest.mark.parametrize("kname", ["rat", "p3"])
@pytest.mark.parametrize("q", [2, 3])
def test_c10_lee_szczarba(criterion, q, kname):
    with criterion(10, f"q={q} {kname}"):
        assert ls_l1_degree3(q, FIELDS[kname]) == 0


# 11 ----------------------------------------------------------------------

@pytest.mark.parametrize("kname", ["rat", "p2", "p3"])
@pytest.mark.parametrize("q", [2, 3, 5])
def test_c11_coinvariants(criterion, q, kname):
    with criterion(11, f"GL2 q={q} {kname}"):
        assert coinvariants_dim("GL", 2, q, "steinberg", FIELDS[kname]) == 0


# 12 ----------------------------------------------------------------------

def test_c12_oriented_p3_dims(criterion):
    with criterion(12, "p=3 dims n<=3"):
        assert [oriented_module(3, n, 1, "steinberg", QQ).dim for n in range(4)] == [1, 1, 3, 27]


def test_c12_oriented_p5_tor(criterion):
    with criterion(12, "p=5 Tor0 n=1..3, Tor1 n=3"):
        T = oriented_tor(5, 3, 1, QQ).entries
        assert [T[(0, n)] for n in (1, 2, 3)] == [0, 0, 0]
        assert T[(1, 3)] == 0


# 13 ----------------------------------------------------------------------

def test_c13_d_squared(criterion):
    with criterion(13, "d^2=0 on bar, Koszul, Sharbly, oriented Koszul, Y_n, Tits"):
        complexes = [
            build_bar(3, 3, GF(2)),
            koszul_complex(3, 3, QQ),
            sharbly_complex(3, 2, GF(2), 2),
            oriented_koszul_complex(5, 2, QQ, 1),
            reduced_chain_complex(yn_complex(3, 2), GF(3)),
            reduced_chain_complex(tits_building(3, 3), QQ),
        ]
        for C in complexes:
            check_d_squared(C)


def _preceding_pairs(n, q):
    for d in range(1, n):
        for W1, W2 in enumerate_decompositions(n, (d, n - d), q):
            if precedes(W1.pivots, W2.pivots):
                yield W1, W2


def _check_p1_p2(W1, W2, rng, exhaustive):
    assert direct_sum([W1, W2]).pivots == W1.pivots + W2.pivots
    pairs = [(a, b) for a in pbw_basis(W1) for b in pbw_basis(W2)]
    for a, b in pairs if exhaustive else rng.sample(pairs, min(4, len(pairs))):
        prod = st_multiply(basis_element(W1, a, QQ), basis_element(W2, b, QQ))
        assert list(prod.coeffs.values()) == [1]


def _check_p3(W, a, d1):
    q = W.q
    w = pbw_vectors(W, a)
    parts = []
    for vecs, pivots in ((w[:d1], W.pivots[:d1]), (w[d1:], W.pivots[d1:])):
        U = canonical_subspace(vecs, q, W.n)
        assert U.pivots == pivots
        (b, c), = straighten_coords([U.coordinates(v) for v in vecs], q).items()
        assert c == 1
        parts.append(basis_element(U, b, QQ))
    assert st_multiply(*parts) == basis_element(W, a, QQ)


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_c13_p1_p2_p3_exhaustive(criterion, n, q):
    with criterion(13, f"P1-P3 exhaustive ({n},{q})"):
        rng = random.Random(0)
        for W1, W2 in _preceding_pairs(n, q):
            _check_p1_p2(W1, W2, rng, exhaustive=True)
        for d in range(2, n + 1):
            for W in enumerate_subspaces(n, d, q):
                for a in pbw_basis(W):
                    for d1 in range(1, d):
                        _check_p3(W, a.entries, d1)


@pytest.mark.parametrize("n,q", [(4, 3), (5, 2)])
def test_c13_p1_p2_p3_sampled(criterion, n, q):
    with criterion(13, f"P1-P3 sampled ({n},{q})"):
        rng = random.Random(n * q)
        pairs = list(_preceding_pairs(n, q))
        for W1, W2 in rng.sample(pairs, min(60, len(pairs))):
            _check_p1_p2(W1, W2, rng, exhaustive=False)
        for _ in range(200):
            d = rng.randint(2, n)
            W = canonical_subspace(random_symbol(n, q, rng)[:d], q, n)
            a = rng.choice(pbw_basis(W))
            _check_p3(W, a.entries, rng.randint(1, d - 1))


def test_c13_relation_c(criterion):
    with criterion(13, "relation (c) on 300 random triples"):
        rng = random.Random(13)
        checked = 0
        while checked < 300:
            n, q = rng.choice([(2, 3), (3, 2), (3, 3), (4, 2), (3, 5), (4, 3)])
            W = full_space(n, q)
            v1, v2, *rest = random_symbol(n, q, rng)
            v0 = tuple((a + b) % q for a, b in zip(v1, v2))
            if not is_basis([v0, v2] + rest, q):
                continue
            terms = [straighten(ApartmentSymbol(W, tuple(s)), QQ)
                     for s in ([v1, v2] + rest, [v0, v2] + rest, [v0, v1] + rest)]
            assert (terms[0] - terms[1] + terms[2]).is_zero()
            checked += 1
