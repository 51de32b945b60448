import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chromalg.coop_algebra import (
    CoopAlgebra, DerivationError, RelationSet, RewriteError, additive_loop_height, coop_b_series,
    coop_normalize, derive_relations, expected_relations, hopf_quotient_check, kn_pseries,
    kn_self_relation, pi, rw_check, rw_lhs, rw_rhs, star_quotient, unstable_height_bounds,
)
from chromalg.fgl import fgl_honda, fgl_kn, kn_ring

R1 = kn_ring(3, 1)
ADD = CoopAlgebra(R1, 3, "additive")
UNST = CoopAlgebra(R1, 3, "unstable")


def test_e_powers_and_signs():
    e, b1 = ADD.e(), ADD.b(1)
    assert e * e == ADD.e(2)
    assert b1 * e == e * b1
    assert b1.bidegree() == (2, 2)
    assert coop_normalize(e * b1) == ADD.monomial(e=1, b={1: 1})


def test_chern_images():
    assert ADD.chern_image(ADD.b(1)) == ADD.e(2)
    assert UNST.chern_image(UNST.b(1)) == -UNST.e(2)
    assert ADD.chern_image(ADD.b(0)).is_zero()


def test_bracket_bidegree():
    v = ADD.bracket(1)
    assert v.bidegree() == (0, -4)
    w = ADD.scalar(R1.gen("v1")) * ADD.b(1)
    assert w.bidegree() == (6, 2)


def test_bracket_multiplicativity():
    R2 = kn_ring(3, 2)
    A = CoopAlgebra(R2, 3)
    K2 = fgl_kn(3, 2, 9).base
    v2 = K2.gen("v2")
    assert A.bracket_of(v2 * v2) == A.bracket(2, 2)
    assert A.bracket_of(K2.scalar(2)) == 2
    with pytest.raises(ValueError):
        A.bracket_of(K2.gen("v2", -1))


def test_b_series():
    b = coop_b_series(UNST, 4)
    assert str(b.coefficient((0,))) == "1_2"
    assert b.coefficient((1,)) == UNST.b(1)
    eps = [UNST.augmentation(c) for _, c in b.items()]
    assert eps == [R1.one] + [R1.zero] * 4


def test_rw_sides_k1():
    E = kn_pseries(3, 1, 9)
    lhs, rhs = rw_lhs(E, 9, ADD), rw_rhs(E, 9, ADD)
    assert lhs.order() == 3 and str(lhs.coefficient((3,))) == "v1*b1"
    assert rhs.order() == 3 and str(rhs.coefficient((3,))) == "b1^3*[v1]"


def test_rw_check_specialises_to_p_series():
    E = kn_pseries(3, 1, 9)
    rep = rw_check(E, E, 9, ADD)
    assert rep["ok"] and rep["sides_agree_after_specialising"]
    F = fgl_honda(3, 1, 9).extract_v()
    assert rw_check(E, F, 9, ADD)["ok"]


def test_rw_precision_error():
    E = kn_pseries(3, 2, 27)
    with pytest.raises(ValueError):
        rw_lhs(E, 5, CoopAlgebra(E.p_series.base, 3))


def test_hopf_quotient_small():
    rep = hopf_quotient_check(3, 5)
    assert rep["ok"]
    one = UNST.b(0)
    assert star_quotient([one, one]) == 2 * one
    b = UNST.b(2)
    assert star_quotient([b]) == b


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_final_relation_matches(p, n):
    N = p ** (n + 1) if n < 3 else p**n
    d = derive_relations(p, n, N)
    alg = d.algebra
    inter, final = expected_relations(p, n, alg, alg.ring.gen(f"v{n}"))
    assert [(r.lhs_element(alg), r.rhs) for r in d.intermediate] == inter
    assert (d.final.lhs_element(alg), d.final.rhs) == final
    for r in d.relations:
        assert r.rhs.is_zero() or r.rhs.bidegree() == r.lhs_element(alg).bidegree()
    # both sides of the final relation sit in space label 2 pi_n
    assert d.final.rhs.bidegree()[1] == 2 * pi(p, n)


def test_derive_strings():
    d = derive_relations(3, 2)
    assert d.relations.describe() == ["b1^3*[v1] -> 0", "b1^12*[v2] -> v2*b1^4"]
    assert d.pi_values == {1: 1, 2: 4, 3: 13}


def test_derive_rejects_non_unit():
    E = kn_pseries(3, 1, 9)
    bad = type(E)(E.p_series, {1: E.v_coeffs[1] + 1}, 1, E.search_bound, E.law)
    with pytest.raises(DerivationError):
        derive_relations(3, 1, 9, bad)


def test_relation_validation():
    with pytest.raises(RewriteError):
        RelationSet(ADD, [(ADD.b(1), ADD.e())])  # wrong bidegree
    with pytest.raises(RewriteError):
        RelationSet(ADD, [(ADD.b(1), ADD.b(1) * ADD.b(1) * ADD.scalar(R1.gen("v1", -1)))])
    with pytest.raises(RewriteError):
        RelationSet(ADD, [(ADD.b(1) + ADD.b(2), ADD.zero)])


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1)])
def test_loop_heights(p, n):
    d = derive_relations(p, n)
    h = additive_loop_height(d.relations, None, p, n)
    assert h.h == 2 * pi(p, n) and h.attains_bound
    assert h.certificate
    selfh = additive_loop_height(d.relations, kn_self_relation(d.algebra, n), p, n)
    assert selfh.h == 1
    b = unstable_height_bounds(h.h, p, n)
    assert (b.lo, b.hi, b.global_hi) == (h.h, h.h + 1, 2 * pi(p, n) + 1)


def test_no_smaller_height_in_free_model():
    # exhaustive: every h' < 2 pi_n leaves a nonzero normal form
    p, n = 3, 2
    d = derive_relations(p, n)
    rules = d.relations.in_e_form()
    alg = d.algebra
    v = alg.ring.gen("v2")
    P = 2 * (p**n - 1)
    for h in range(1, 2 * pi(p, n)):
        diff = alg.e(h).map_coefficients(lambda c: c * v) - alg.e(P + h) * alg.bracket(n)
        assert not rules.reduce(diff).is_zero()


def test_unstable_bounds_small():
    assert (unstable_height_bounds(1).lo, unstable_height_bounds(1).hi) == (1, 2)
    with pytest.raises(ValueError):
        unstable_height_bounds(0)


def test_json_round_trip():
    x = ADD.monomial(e=2, b={1: 3}, v={1: 1}, coeff=R1.gen("v1", -1)) + 2 * ADD.b(2)
    assert ADD.element_from_json(x.to_json()) == x


def _random_element(alg, rng, n_terms=4):
    x = alg.zero
    for _ in range(n_terms):
        x = x + alg.monomial(e=int(rng.integers(0, 6)), b={1: int(rng.integers(0, 14)), 2: int(rng.integers(0, 2))},
                             v={1: int(rng.integers(0, 3)), 2: int(rng.integers(0, 3))},
                             coeff=R2.gen("v2", int(rng.integers(-2, 3))) * int(rng.integers(1, 3)))
    return x


R2 = kn_ring(3, 2)


@given(st.integers(0, 2**32 - 1))
def test_confluence(seed):
    d = derive_relations(3, 2)
    rules = d.relations.union(kn_self_relation(d.algebra, 2)).in_e_form().union(d.relations)
    rng = np.random.default_rng(seed)
    x = _random_element(d.algebra, rng)
    a = rules.reduce(x, rng=np.random.default_rng(seed + 1))
    b = rules.reduce(x, rng=np.random.default_rng(seed + 2))
    assert a == b == rules.reduce(x)


@given(st.integers(0, 2**32 - 1))
def test_reduction_is_idempotent_and_linear(seed):
    rules = derive_relations(3, 2).relations
    rng = np.random.default_rng(seed)
    alg = rules.algebra
    x, y = _random_element(alg, rng), _random_element(alg, rng)
    assert rules.reduce(rules.reduce(x)) == rules.reduce(x)
    assert rules.reduce(x + y) == rules.reduce(x) + rules.reduce(y)
