import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from chromalg.fgl import (
    FormalGroupLaw, fgl_additive, fgl_honda, fgl_kn, fgl_multiplicative, honda_mod_p, kn_ring,
    load_law, make_law, prime_field, random_strict_series,
)
from chromalg.power_series import Series

# frozen outputs of tests/oracle.py
HONDA_3_1_9 = {
    (0, 1): 1, (1, 0): 1, (1, 2): 2, (1, 4): 1, (1, 6): 2, (2, 1): 2,
    (3, 4): 2, (4, 1): 1, (4, 3): 2, (4, 5): 1, (5, 4): 1, (6, 1): 2,
}
HONDA_3_2_27 = {(0, 1): 1, (1, 0): 1, (3, 6): 2, (6, 3): 2}
HONDA_5_1_25_NNZ = 46
HONDA_3_1_30_NNZ = 114


def uni(F, N=None, var="s"):
    return Series.var(F.base, (var,), var, F.precision if N is None else N)


def test_oracle_still_gives_frozen_values():
    assert oracle.honda_law(3, 1, 9) == HONDA_3_1_9
    assert oracle.honda_law(3, 2, 27) == HONDA_3_2_27


def test_honda_matches_frozen_oracle():
    assert honda_mod_p(3, 1, 9) == HONDA_3_1_9
    assert honda_mod_p(3, 2, 27) == HONDA_3_2_27
    assert len(honda_mod_p(5, 1, 25)) == HONDA_5_1_25_NNZ


def test_honda_3_1_30():
    F = fgl_honda(3, 1, 30)
    assert len(F.series) == HONDA_3_1_30_NNZ
    s = uni(F)
    assert F.p_series() == s**3


def test_presets_strings():
    assert str(fgl_additive(3, 4).series) == "x1 + x2"
    assert str(fgl_multiplicative(3, 4).series) == "x1 + x2 + x1*x2"


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2)])
@pytest.mark.parametrize("name", ["additive", "mult", "honda"])
def test_axioms(name, p, n):
    assert make_law(name, p, n, p ** (n + 1)).check_axioms().ok


def test_mult_axioms_at_20():
    assert fgl_multiplicative(3, 20).check_axioms().ok


def test_bad_law_fails_unitality():
    F3 = prime_field(3)
    bad = Series(F3, ("x1", "x2"), 6, {(1, 0): 1, (0, 1): 1, (2, 0): 1})
    rep = FormalGroupLaw(bad, check=False).check_axioms()
    assert not rep.unitality.ok
    assert rep.unitality.where == "x1^2"
    with pytest.raises(ValueError):
        FormalGroupLaw(bad)


def test_formal_sums():
    A = fgl_additive(3, 6)
    M = fgl_multiplicative(3, 6)
    s = uni(A)
    assert A.formal_sum([]) == 0
    assert A.formal_sum([s, s**2]) == s + s**2
    assert str(M.formal_sum([s, s])) == "2*s + s^2"
    with pytest.raises(ValueError):
        M.formal_sum([s, 1 + s])


def test_inverses():
    A = fgl_additive(3, 8)
    assert str(A.inverse()) == "2*x"
    M = fgl_multiplicative(3, 8)
    want = Series(M.base, ("x",), 8, oracle.mult_inverse(8))
    assert M.inverse() == want
    H = fgl_honda(3, 1, 9)
    x = uni(H, var="x")
    assert H(Series.var(H.base, ("x",), "x", 9), H.inverse()) == 0
    assert H.n_series(-1, "x") == H.inverse()
    del x


def test_n_series():
    M = fgl_multiplicative(3, 6)
    assert str(M.n_series(2)) == "2*s + s^2"
    assert fgl_additive(3, 6).p_series() == 0
    K = fgl_kn(3, 1, 9)
    assert str(K.p_series()) == "v1*s^3"
    assert K.n_series(0) == 0


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1)])
def test_extract_v(p, n):
    N = p ** (n + 1)
    m = fgl_multiplicative(p, N).extract_v()
    assert m.height == 1 and m.v_coeffs[1] == 1
    h = fgl_honda(p, n, N).extract_v()
    assert h.height == n and h.v_coeffs[n] == 1
    assert all(h.v_coeffs[i] == 0 for i in range(1, n))
    k = fgl_kn(p, n, N).extract_v()
    assert k.v_coeffs[n] == kn_ring(p, n).gen(f"v{n}")
    assert k.v_coeffs[n].degree() == -2 * (p**n - 1)


def test_height_bound_reporting():
    d = fgl_additive(3, 9).extract_v()
    assert d.height is None
    assert d.height_str == ">= 3"


def test_p_series_brute_force():
    # [p] from the oracle's naive iterated substitution
    assert oracle.p_series(HONDA_3_1_9, 3, 9) == {(3,): 1}
    assert oracle.p_series(HONDA_3_2_27, 3, 27) == {(9,): 1}


def test_tail_decompose():
    R1, R2 = fgl_additive(3, 5).tail_decompose()
    assert R1 == 1 and R2 == 1
    R1, R2 = fgl_multiplicative(3, 5).tail_decompose()
    assert str(R1) == "1 + x1"
    H = fgl_honda(3, 1, 9)
    R1, R2 = H.tail_decompose()
    assert R2 == R1.swap()


def test_load_law_round_trip():
    H = fgl_honda(3, 1, 9)
    G = load_law(H.series.to_json())
    assert G.series == H.series


def test_graded_coordinate_change_keeps_shape():
    rng = np.random.default_rng(5)
    K = fgl_kn(3, 1, 9)
    phi = random_strict_series(K.base, 9, rng)
    G = K.coordinate_change(phi)
    assert G.check_axioms().ok
    d = G.extract_v()
    assert G.reassemble(d) == d.p_series


@given(st.integers(-3, 4), st.integers(-3, 4))
def test_n_series_additivity(m, n):
    F = fgl_honda(3, 1, 9)
    assert F.n_series(m + n) == F(F.n_series(m), F.n_series(n))


@given(st.integers(0, 2**32 - 1), st.sampled_from([("mult", 3, 1), ("honda", 3, 1), ("honda", 5, 1)]))
def test_v_round_trip(seed, law):
    name, p, n = law
    N = p ** (n + 1)
    F = make_law(name, p, n, N)
    G = F.coordinate_change(random_strict_series(F.base, N, np.random.default_rng(seed)))
    d = G.extract_v()
    assert G.reassemble(d) == d.p_series


@given(st.integers(0, 2**32 - 1))
def test_linear_term_of_p_series_vanishes(seed):
    F = fgl_multiplicative(5, 25)
    G = F.coordinate_change(random_strict_series(F.base, 25, np.random.default_rng(seed)))
    assert G.p_series().coefficient((1,)) == 0
