import random
import pytest
from hypothesis import given, settings, strategies as st

from stmonoid.exactla import GF, QQ
from stmonoid.steinberg import (
    ApartmentSymbol,
    InvalidApartment,
    NotABasis,
    PBWIndex,
    Singular,
    SteinbergElement,
    StraightenCache,
    TooLarge,
    apartment_product,
    basis_element,
    enumerate_frames,
    format_element,
    frame_canonicalize,
    gl_act,
    oracle_mismatches,
    ordered_bases,
    parse_symbol,
    pbw_basis,
    pbw_vectors,
    presentation_dim_oracle,
    random_symbol,
    st_multiply,
    straighten,
)
from stmonoid.subspaces import (
    canonical_subspace,
    enumerate_decompositions,
    full_space,
    is_basis,
    precedes,
)

E1, E2 = (1, 0), (0, 1)


def sym(vecs, q, k=QQ):
    vecs = tuple(tuple(x % q for x in v) for v in vecs)
    return straighten(ApartmentSymbol(canonical_subspace(vecs, q), vecs), k)


@pytest.mark.parametrize("d,q,count", [(0, 3, 1), (1, 5, 1), (2, 3, 3), (3, 2, 8), (3, 3, 27)])
def test_pbw_basis_size(d, q, count):
    W = full_space(d, q)
    basis = pbw_basis(W)
    assert len(basis) == count
    assert len(set(basis)) == count


def test_pbw_vectors_are_unit_upper_triangular():
    W = full_space(3, 3)
    g = PBWIndex(3, (1, 2, 0))
    assert g.matrix() == [[1, 1, 2], [0, 1, 0], [0, 0, 1]]
    assert pbw_vectors(W, g) == ((1, 0, 0), (1, 1, 0), (2, 0, 1))


def test_straighten_examples():
    W = full_space(2, 2)
    assert sym([E1, E2], 2).coeffs == {PBWIndex(2, (0,)): 1}
    assert sym([E2, E1], 2).coeffs == {PBWIndex(2, (0,)): -1}
    assert sym([E2, (1, 1)], 2).coeffs == {PBWIndex(2, (1,)): 1, PBWIndex(2, (0,)): -1}
    assert sym([E2, (1, 1)], 2, GF(2)).coeffs == {PBWIndex(2, (1,)): 1, PBWIndex(2, (0,)): 1}
    assert sym([E2, (1, 1)], 2).W == W


def test_straighten_rejects_non_bases():
    W = full_space(2, 3)
    with pytest.raises(InvalidApartment):
        straighten(ApartmentSymbol(W, ((1, 0), (2, 0))), QQ)
    with pytest.raises(InvalidApartment):
        straighten(ApartmentSymbol(W, ((1, 0),)), QQ)


def test_scaling_does_not_change_the_class():
    assert sym([(2, 0), (1, 2)], 3) == sym([(1, 0), (2, 1)], 3)


def test_multiply_examples():
    q = 2
    a = basis_element(canonical_subspace([E1], q), (), QQ)
    b = basis_element(canonical_subspace([E2], q), (), QQ)
    assert st_multiply(a, b).coeffs == {PBWIndex(2, (0,)): 1}
    assert st_multiply(b, a).coeffs == {PBWIndex(2, (0,)): -1}


def test_gl_act_examples():
    W = full_space(2, 2)
    x = basis_element(W, (0,), QQ)
    assert gl_act([[1, 0], [0, 1]], x) == x
    assert gl_act([[0, 1], [1, 0]], x).coeffs == {PBWIndex(2, (0,)): -1}
    # [e1, e1+e2] goes to [e2, e1+e2] = [e1, e1+e2] - [e1, e2]
    u = basis_element(W, (1,), QQ)
    assert gl_act([[0, 1], [1, 0]], u).coeffs == {PBWIndex(2, (1,)): 1, PBWIndex(2, (0,)): -1}
    # a diagonal matrix fixes the standard apartment but moves the other PBW lines
    e = basis_element(full_space(3, 3), (0, 0, 0), QQ)
    assert gl_act([[2, 0, 0], [0, 1, 0], [0, 0, 1]], e) == e
    assert gl_act([[1, 0, 0], [0, 2, 0], [0, 0, 2]], e) == e
    y = basis_element(full_space(3, 3), (1, 2, 1), QQ)
    assert gl_act([[1, 0, 0], [0, 1, 0], [0, 0, 2]], y) != y
    with pytest.raises(Singular):
        gl_act([[1, 1], [1, 1]], x)


@pytest.mark.parametrize("n,q,k", [(1, 5, QQ), (2, 3, QQ), (3, 2, GF(2)), (2, 2, GF(3))])
def test_presentation_dims(n, q, k):
    assert presentation_dim_oracle(n, q, k).dim == q ** (n * (n - 1) // 2)


def test_presentation_oracle_refuses_large_inputs():
    with pytest.raises(TooLarge):
        presentation_dim_oracle(4, 3, QQ)


def test_frames():
    f = frame_canonicalize([E2, E1], 2)
    assert f.lines == (E1, E2) and f.sign == -1
    prod = apartment_product(frame_canonicalize([E1], 2), frame_canonicalize([E2], 2))
    assert prod.lines == (E1, E2) and prod.sign == 1
    assert len(enumerate_frames(2, 2)) == 3
    with pytest.raises(NotABasis):
        frame_canonicalize([E1, (2, 0)], 3)


def test_symbol_text_roundtrip():
    assert parse_symbol("[1,0;1,1]", 2) == ((1, 0), (1, 1))
    assert parse_symbol("[4,-1]", 3) == ((1, 2),)
    with pytest.raises(ValueError):
        parse_symbol("1,0", 2)
    x = sym([E2, (1, 1)], 2)
    assert format_element(x) == "+1*[1,0;1,1] -1*[1,0;0,1]"


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2)])
def test_straighten_matches_presentation_exhaustively(n, q):
    assert oracle_mismatches(n, q, QQ, list(ordered_bases(n, q))) == []


def test_straighten_matches_presentation_mod_two():
    assert oracle_mismatches(2, 3, GF(2), list(ordered_bases(2, 3))) == []


def _relation_c_defect(v1, v2, rest, q):
    v0 = tuple((a + b) % q for a, b in zip(v1, v2))
    out = sym([v1, v2] + rest, q) - sym([v0, v2] + rest, q) + sym([v0, v1] + rest, q)
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([(2, 3), (3, 2), (3, 3), (4, 2), (3, 5)]))
def test_relation_c_holds_identically(seed, nq):
    n, q = nq
    rng = random.Random(seed)
    while True:
        vecs = random_symbol(n, q, rng)
        v1, v2, *rest = vecs
        v0 = tuple((a + b) % q for a, b in zip(v1, v2))
        if is_basis([v0, v2] + rest, q):
            break
    assert _relation_c_defect(v1, v2, list(rest), q).is_zero()


def _random_element(W, rng, k=QQ):
    coeffs = {g: rng.randint(-2, 2) for g in rng.sample(pbw_basis(W), min(3, len(pbw_basis(W))))}
    return SteinbergElement(W, coeffs, k)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_multiplication_associative_and_skew_commutative(seed, q):
    rng = random.Random(seed)
    shape = rng.choice([(1, 1, 1), (1, 2, 1), (2, 1, 1)] if q == 2 else [(1, 1, 1)])
    n = sum(shape)
    W1, W2, W3 = rng.choice(enumerate_decompositions(n, shape, q))
    x, y, z = (_random_element(W, rng) for W in (W1, W2, W3))
    assert st_multiply(st_multiply(x, y), z) == st_multiply(x, st_multiply(y, z))
    sign = (-1) ** (W1.dim * W2.dim)
    assert st_multiply(y, x) == st_multiply(x, y).scale(sign)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([(2, 3), (3, 2), (3, 3)]))
def test_p2_products_along_precedence_are_basis_elements(seed, nq):
    n, q = nq
    rng = random.Random(seed)
    d = rng.randint(1, n - 1)
    W1, W2 = rng.choice(enumerate_decompositions(n, (d, n - d), q))
    if precedes(W2.pivots, W1.pivots):
        W1, W2 = W2, W1
    if not precedes(W1.pivots, W2.pivots):
        return
    a = rng.choice(pbw_basis(W1))
    b = rng.choice(pbw_basis(W2))
    prod = st_multiply(basis_element(W1, a, QQ), basis_element(W2, b, QQ))
    assert len(prod.coeffs) == 1 and list(prod.coeffs.values()) == [1]


def _random_invertible(n, q, rng):
    while True:
        g = [[rng.randrange(q) for _ in range(n)] for _ in range(n)]
        if is_basis([tuple(row) for row in g], q):
            return g


def _matmul(g, h, q):
    n = len(g)
    return [[sum(g[i][t] * h[t][j] for t in range(n)) % q for j in range(n)] for i in range(n)]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([(2, 3), (3, 2), (3, 3)]))
def test_gl_act_is_an_action(seed, nq):
    n, q = nq
    rng = random.Random(seed)
    x = _random_element(full_space(n, q), rng)
    g = _random_invertible(n, q, rng)
    h = _random_invertible(n, q, rng)
    assert gl_act(g, gl_act(h, x)) == gl_act(_matmul(g, h, q), x)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_block_diagonal_action_commutes_with_multiplication(seed):
    q = 3
    rng = random.Random(seed)
    W1 = canonical_subspace([(1, 0, 0), (0, 1, 0)], q)
    W2 = canonical_subspace([(0, 0, 1)], q)
    x, y = _random_element(W1, rng), _random_element(W2, rng)
    a = _random_invertible(2, q, rng)
    c = rng.randrange(1, q)
    g = [a[0] + [0], a[1] + [0], [0, 0, c]]
    # W1 is the span of the first two coordinates, so its PBW indices are those of F_q^2
    ax = gl_act(a, SteinbergElement(full_space(2, q), x.coeffs, QQ))
    assert gl_act(g, st_multiply(x, y)) == st_multiply(SteinbergElement(W1, ax.coeffs, QQ), y)


def test_shared_cache_is_consistent():
    cache = StraightenCache()
    q = 3
    vecs = random_symbol(3, q, random.Random(7))
    W = full_space(3, q)
    a = straighten(ApartmentSymbol(W, vecs), QQ, cache)
    assert len(cache) > 0
    b = straighten(ApartmentSymbol(W, vecs), QQ, cache)
    assert a == b == straighten(ApartmentSymbol(W, vecs), QQ)
