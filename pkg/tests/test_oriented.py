import random

import pytest

from stmonoid.exactla import GF, QQ
from stmonoid.oriented import (
    OrientedSpace,
    basis_orientation,
    is_oriented_basis,
    orientation_class,
    oriented_module,
    pm_normalize,
)
from stmonoid.steinberg import TooLarge, ordered_bases


def test_orientation_classes():
    assert orientation_class(4, 5) == 1
    assert orientation_class(3, 5) == 2
    assert orientation_class(-1, 3) == 1
    with pytest.raises(ValueError):
        orientation_class(5, 5)


def test_pm_normalize():
    assert pm_normalize((1, 4), 5) == (4, 1)
    assert pm_normalize((3, 2), 5) == (3, 2)
    assert pm_normalize((0, 3), 5) == (0, 2)


def test_space_validation():
    with pytest.raises(ValueError):
        OrientedSpace(2, 1, 1)
    with pytest.raises(ValueError):
        OrientedSpace(5, 1, 3)


@pytest.mark.parametrize("n,dim", [(0, 1), (1, 1), (2, 3), (3, 27)])
def test_p3_matches_the_unoriented_steinberg_module(n, dim):
    assert oriented_module(3, n, 1, "steinberg", QQ).dim == dim


def test_p5_apartment_line():
    for o in (1, 2):
        assert oriented_module(5, 1, o, "apartment", QQ).dim == 1


def test_p5_rank_two_is_stable_across_fields_and_orientations():
    dims = {oriented_module(5, 2, o, "steinberg", k).dim for o in (1, 2) for k in (QQ, GF(2), GF(3))}
    assert dims == {11}


def test_apartment_module_is_free_on_generators():
    M = oriented_module(5, 2, 1, "apartment", QQ)
    assert M.dim == len(M.generators)


def test_coordinates_respect_relations_a_and_b():
    M = oriented_module(5, 2, 1, "steinberg", QQ)
    v, w = (1, 0), (0, 1)
    a = M.coordinates([v, w])
    assert M.coordinates([w, v]) == {i: -c for i, c in a.items()}
    # scaling by -1 is the only rescaling allowed, and it changes nothing
    assert M.coordinates([(4, 0), w]) == a
    with pytest.raises(ValueError):
        M.coordinates([(2, 0), w])


def test_three_term_relation_holds_in_coordinates():
    p = 5
    M = oriented_module(p, 2, 1, "steinberg", QQ)
    rng = random.Random(0)
    bases = [b for b in ordered_bases(2, p) if basis_orientation(b, p) == 1]
    for v1, v2 in rng.sample(bases, 40):
        v0 = tuple((a + b) % p for a, b in zip(v1, v2))
        total = {}
        for c, sym in ((1, (v1, v2)), (-1, (v0, v2)), (1, (v0, v1))):
            for i, x in M.coordinates(sym).items():
                total[i] = total.get(i, 0) + c * x
        assert not any(total.values())


def test_oriented_bases():
    assert is_oriented_basis([(1, 0), (0, 1)], 3, 2)
    assert not is_oriented_basis([(1, 0), (2, 0)], 3, 2)
    assert basis_orientation([(2, 0), (0, 1)], 5) == 2


def test_budget():
    with pytest.raises(TooLarge):
        oriented_module(5, 4, 1, "steinberg", QQ)
    with pytest.raises(ValueError):
        oriented_module(5, 2, 1, "tits", QQ)
