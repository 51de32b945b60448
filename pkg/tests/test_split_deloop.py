import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from chromalg.acceptance import random_unstable_element
from chromalg.coop_algebra import RelationSet
from chromalg.split_deloop import (
    IdempotentS, Op, StableClass, canonical_pair, deloop_compose, deloop_component,
    deloop_normalize, destabilise, identity_op, minimal_pair, period, restrict_deloop,
    rewrite_word, sigma_power, split_project, stable_equal, valid_pairs, verify_idempotent,
    view_convert,
)


def setup(p=3, n=1, h=1):
    S = IdempotentS(p, n, h)
    return S, S.height_relations()


def test_constructor_guards():
    with pytest.raises(ValueError):
        IdempotentS(2, 1, 1)
    with pytest.raises(ValueError):
        IdempotentS(3, 1, 4)
    with pytest.raises(ValueError):
        IdempotentS(3, 1, 0)


def test_idempotent_k1():
    S, rel = setup()
    assert str(S.element) == "v1^-1*e^4*[v1]"
    assert verify_idempotent(S, rel).ok


def test_without_height_relation():
    S, _ = setup()
    rep = verify_idempotent(S, RelationSet(S.algebra))
    assert "s*s = s" in rep.failed()
    # the commutation check needs no relation: s has bidegree (0, 0)
    assert "e*s = s*e" not in rep.failed()
    assert S.element.bidegree() == (0, 0)


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (5, 2)])
@pytest.mark.parametrize("h", [1, 2])
def test_idempotent_grid(p, n, h):
    S, rel = setup(p, n, h)
    assert verify_idempotent(S, rel).ok


def test_split_project():
    S, rel = setup()
    alg = S.algebra
    eh = alg.e(S.h)
    assert split_project(eh, S, rel) == (eh, alg.zero)
    assert split_project(alg.one, S, rel) == (S.element, alg.one - S.element)


def test_destabilise_examples():
    S, rel = setup()
    alg = S.algebra
    zero = destabilise(StableClass(3, alg.zero), 0, S, rel)
    assert zero.element.is_zero()
    for t in range(0, 9):
        c = StableClass(t, alg.e(t))
        for k in range(-3, 6):
            d = destabilise(c, k, S, rel)
            assert stable_equal(StableClass(k, d.element), c, rel, S.h)
            assert sigma_power(d.preimage, k - S.h, S.h, rel) == d.element


def test_class_level_must_match_label():
    S, _ = setup()
    with pytest.raises(ValueError):
        StableClass(2, S.algebra.e(3))


def test_suspension_sign():
    S, rel = setup()
    alg = S.algebra
    c = StableClass(1, alg.e())
    assert c.suspend().rep == -alg.e(2)
    assert StableClass(0, alg.one).suspend(3).rep == -alg.e(3)


@given(st.integers(0, 2**32 - 1))
def test_projection_properties(seed):
    S, rel = setup(3, 2, 1)
    rng = np.random.default_rng(seed)
    x, _ = random_unstable_element(S.algebra, 2, rng, terms=2)
    y, _ = random_unstable_element(S.algebra, 2, rng)
    sx, rest = split_project(x, S, rel)
    assert split_project(sx, S, rel)[0] == sx
    assert split_project(rest, S, rel)[0].is_zero()
    assert split_project(x * y, S, rel)[0] == rel.reduce(sx * split_project(y, S, rel)[0])


@given(st.integers(0, 2**32 - 1))
def test_delta_is_multiplicative(seed):
    S, rel = setup(5, 1, 1)
    rng = np.random.default_rng(seed)
    x, K = random_unstable_element(S.algebra, 1, rng)
    y, L = random_unstable_element(S.algebra, 1, rng)
    c, c2 = StableClass(K, x), StableClass(L, y)
    lhs = destabilise(c * c2, 0, S, rel).element
    rhs = rel.reduce(destabilise(c, 0, S, rel).element * destabilise(c2, 0, S, rel).element)
    assert lhs == rhs


def test_deloop_examples():
    assert deloop_component(0, 0, 0, 1, 3, 1).to_json() == {"i": 1, "j": 4, "sign": 1}
    assert deloop_component(2, 5, 0, 1, 3, 1).to_json() == {"i": 0, "j": 2, "sign": 1}
    # brute-force congruence search in the oracle
    assert oracle.deloop_brute(0, 3, 1, 4) == (1, 1)
    assert deloop_component(0, 1, 3, 1, 3, 1).to_json() == {"i": 1, "j": 1, "sign": -1}


@given(st.integers(-10, 10), st.integers(-10, 10), st.integers(-10, 10), st.sampled_from([1, 2]),
       st.sampled_from([(3, 1), (3, 2), (5, 1)]))
def test_deloop_constraints(k, l, m, h, pn):
    c = deloop_component(k, l, m, h, *pn)
    assert c.valid()
    assert (c.i, c.j) == oracle.deloop_brute(k, m, h, period(*pn))


def test_deloop_normalize():
    assert deloop_normalize((1, 4), (2, 8), 1, 4)
    assert deloop_normalize((0, 1), (0, 1), 1, 4)
    assert not deloop_normalize((1, 4), (1, 5), 1, 4)
    a = deloop_component(0, 0, 0, 1, 3, 1)
    with pytest.raises(ValueError):
        deloop_normalize(a, deloop_component(1, 0, 0, 1, 3, 1), 1, 4)
    with pytest.raises(ValueError):
        canonical_pair(-1, 3, 1, 4)


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(0, 3), st.integers(0, 3))
def test_well_defined(k, m, a, b):
    pairs = valid_pairs(k, m, 1, 4, 4)
    assert deloop_normalize(pairs[a], pairs[b], 1, 4)


def test_compose_recorded_identity():
    rho = Op("rho", 2, 3, "G", "F")
    sigma = Op("sigma", 5, -1, "F", "E")
    for m in range(-5, 6):
        assert deloop_compose(sigma, rho, m, 1, 4).equal


@given(st.integers(-4, 4), st.integers(-6, 6), st.integers(0, 2), st.integers(0, 2))
def test_compose_random_pairs(k, m, a, b):
    rho = Op("rho", k, 2, "G", "F")
    sigma = Op("sigma", k + 2, 1, "F", "E")
    ip = valid_pairs(k, m, 1, 4, 3)[a]
    op = valid_pairs(k + 2, m + 2, 1, 4, 3)[b]
    assert deloop_compose(sigma, rho, m, 1, 4, op, ip).equal


def test_compose_identity():
    rho = Op("rho", 1, 2, "G", "F")
    one = identity_op("F", 3)
    v = deloop_compose(one, rho, 0, 1, 4)
    assert v.equal
    i, j = minimal_pair(1, 0, 1, 4)
    assert v.rhs[1].j == j


def test_compose_degree_mismatch():
    with pytest.raises(ValueError):
        deloop_compose(Op("s", 9, 0, "F", "E"), Op("r", 1, 2, "G", "F"), 0, 1, 4)


def test_stable_family_restriction():
    fam = Op("r", 3, 2, "F", "E", stable_family=True)
    for m in range(-5, 6):
        i, j = minimal_pair(3, m, 1, 4)
        for pair in [(i, j), (i + 1, j + 4)]:
            (c,) = restrict_deloop(fam, m, 1, 4, pair)
            assert c.m == m


def test_unbased_op_is_projected():
    r = Op("r", 2, 0, "F", "E", based=False)
    w = rewrite_word((), 4).word
    assert w == ()
    v = deloop_compose(Op("s", 2, 0, "E", "D"), r, 0, 1, 4)
    assert "(r)_0" in v.to_json()["lhs"]


def test_view_convert():
    assert view_convert("operation", "class", 1, 1) == -1
    assert view_convert("class", "functional", 2, 0) == 1
    assert view_convert("class", "functional", 3, 0) == -1
    assert view_convert("operation", "operation", 5, 5) == 1
    assert view_convert("operation", "class", 3, 3, tag="loop") == -1
    assert view_convert("operation", "class", 2, 2, tag="loop") == -1
    with pytest.raises(ValueError):
        view_convert("operation", "spectrum", 1, 1)
    with pytest.raises(ValueError):
        view_convert("operation", "class", 1, 1, tag="other")
