import random

import pytest
from hypothesis import given, settings, strategies as st

from stmonoid.subspaces import (
    NotDirect,
    ZeroSpan,
    canonical_subspace,
    complements,
    direct_sum,
    enumerate_decompositions,
    enumerate_lines,
    enumerate_subspaces,
    full_space,
    gaussian_binomial,
    gl_order,
    level,
    normalize_line,
    precedes,
)


def test_bottom_pivot_normal_form():
    W = canonical_subspace([(1, 2, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)], 3)
    # the first column's bottom entry sits in row 1, so the pivots are rows 1, 2, 3
    assert W.pivots == (1, 2, 3)
    assert W.basis[0] == (2, 1, 0, 0)


def test_standard_basis_spans_everything():
    W = canonical_subspace([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 5)
    assert W == full_space(3, 5)
    assert W.basis == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_small_full_space_from_other_vectors():
    assert canonical_subspace([(0, 1), (1, 1)], 2) == full_space(2, 2)


def test_zero_span_rejected():
    with pytest.raises(ZeroSpan):
        canonical_subspace([(0, 0)], 2)


def test_precedes():
    assert precedes((0, 1), (2, 3))
    assert not precedes((0, 2), (1, 3))
    assert precedes((), (0,))


def test_direct_sum():
    e1 = canonical_subspace([(1, 0, 0)], 3)
    e2 = canonical_subspace([(0, 1, 0)], 3)
    assert direct_sum([e1, e2]).pivots == (0, 1)
    with pytest.raises(NotDirect):
        direct_sum([e1, canonical_subspace([(2, 0, 0)], 3)])


def test_line_normalization():
    assert normalize_line((2, 2, 0), 3) == (1, 1, 0)
    assert level((1, 1, 0)) == 1


@pytest.mark.parametrize("n,q,count", [(2, 3, 4), (3, 2, 7), (1, 5, 1)])
def test_line_counts(n, q, count):
    lines = enumerate_lines(n, q)
    assert len(lines) == count
    assert list(lines) == sorted(lines)


@pytest.mark.parametrize("n,q", [(3, 2), (4, 2), (3, 3), (4, 3), (2, 5)])
def test_subspace_counts_are_gaussian_binomials(n, q):
    for d in range(n + 1):
        assert len(enumerate_subspaces(n, d, q)) == gaussian_binomial(n, d, q)


def test_gl_orders():
    assert gl_order(2, 2) == 6
    assert gl_order(2, 3) == 48
    assert gl_order(4, 3) == 24261120


@pytest.mark.parametrize("n,shape,q,count", [(2, (1, 1), 2, 6), (2, (1, 1), 3, 12), (4, (2, 2), 3, 10530)])
def test_decomposition_counts(n, shape, q, count):
    decs = enumerate_decompositions(n, shape, q)
    assert len(decs) == count
    prod = 1
    for d in shape:
        prod *= gl_order(d, q)
    assert count * prod == gl_order(n, q)


@pytest.mark.parametrize("n,d,q", [(3, 1, 2), (3, 2, 3), (4, 2, 2)])
def test_complement_counts(n, d, q):
    for W in enumerate_subspaces(n, d, q)[:5]:
        assert len(complements(W)) == q ** (d * (n - d))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5]))
def test_canonical_form_ignores_presentation(seed, q):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    vecs = [tuple(rng.randrange(q) for _ in range(n)) for _ in range(rng.randint(1, 3))]
    if not any(any(v) for v in vecs):
        return
    W = canonical_subspace(vecs, q)
    scaled = []
    for v in vecs:
        c = rng.randrange(1, q)
        scaled.append(tuple(c * x % q for x in v))
    rng.shuffle(scaled)
    assert canonical_subspace(scaled, q) == W
    assert all(W.contains(v) for v in vecs)


def _preceding_pairs(n, q):
    for d in range(1, n):
        for W1, W2 in enumerate_decompositions(n, (d, n - d), q):
            if precedes(W1.pivots, W2.pivots):
                yield W1, W2


@pytest.mark.parametrize("n,q", [(2, 2), (3, 2), (3, 3), (4, 2)])
def test_p1_pivot_sets_concatenate_exhaustive(n, q):
    pairs = list(_preceding_pairs(n, q))
    assert pairs
    for W1, W2 in pairs:
        assert direct_sum([W1, W2]).pivots == W1.pivots + W2.pivots


def test_p1_pivot_sets_concatenate_sampled():
    rng = random.Random(5)
    pairs = list(_preceding_pairs(5, 2)) + list(_preceding_pairs(4, 3))
    for W1, W2 in rng.sample(pairs, 200):
        assert direct_sum([W1, W2]).pivots == W1.pivots + W2.pivots
