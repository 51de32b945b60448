"""The nine acceptance checks, shared by ``verify-all`` and the test suite."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coop_algebra import (
    CoopAlgebra, additive_loop_height, derive_relations, expected_relations,
    hopf_quotient_check, kn_self_relation, pi, unstable_height_bounds,
)
from .fgl import fgl_honda, fgl_kn, fgl_multiplicative, make_law, random_strict_series
from .power_series import Series
from .split_deloop import (
    IdempotentS, Op, StableClass, deloop_compose, deloop_component, deloop_normalize,
    destabilise, minimal_pair, period, restrict_deloop, sigma_power, split_project,
    stable_equal, valid_pairs, verify_idempotent,
)

GRID = [(p, n) for p in (3, 5, 7) for n in (1, 2)]


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool
    details: list = field(default_factory=list)

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.number}. {self.name}"

    def to_json(self):
        return {"criterion": self.number, "name": self.name, "ok": self.ok, "details": self.details}


def _result(number, name, details) -> CriterionResult:
    return CriterionResult(number, name, all(d["ok"] for d in details), details)


def fgl_axioms() -> CriterionResult:
    details = []
    for p, n in GRID:
        N = p ** (n + 1)
        for name in ("additive", "mult", "honda"):
            rep = make_law(name, p, n, N).check_axioms()
            details.append({"law": name, "p": p, "n": n, "N": N, "ok": rep.ok, **rep.to_json()})
    return _result(1, "FGL axioms hold exactly at N = p^(n+1)", details)


def p_series() -> CriterionResult:
    details = []
    for p, n in GRID:
        N = p ** (n + 1)
        m = fgl_multiplicative(p, N).extract_v()
        x_p = Series.monomial(m.p_series.base, ("s",), N, (p,))
        details.append({"law": "mult", "p": p, "ok": m.p_series == x_p and m.height == 1 and m.v_coeffs[1] == 1})
        h = fgl_honda(p, n, N).extract_v()
        want = Series.monomial(h.p_series.base, ("s",), N, (p**n,))
        details.append({"law": "honda", "p": p, "n": n, "ok": h.p_series == want and h.height == n})
        k = fgl_kn(p, n, N).extract_v()
        R = k.p_series.base
        want = Series.monomial(R, ("s",), N, (p**n,), R.gen(f"v{n}"))
        details.append({"law": "kn", "p": p, "n": n, "series": str(k.p_series),
                        "ok": k.p_series == want and str(k.p_series) == f"v{n}*s^{p ** n}"
                        and k.v_coeffs[n] == R.gen(f"v{n}") and k.height == n})
    return _result(2, "p-series of the presets", details)


def v_round_trip(seed: int = 0, count: int = 20) -> CriterionResult:
    rng = np.random.default_rng(seed)
    pool = [("mult", 3, 1), ("honda", 3, 1), ("honda", 3, 2), ("mult", 5, 1), ("honda", 5, 1), ("kn", 3, 1)]
    details = []
    for _ in range(count):
        name, p, n = pool[int(rng.integers(len(pool)))]
        N = p ** (n + 1)
        F = make_law(name, p, n, N)
        G = F.coordinate_change(random_strict_series(F.base, N, rng))
        data = G.extract_v()
        ok = G.reassemble(data) == data.p_series
        details.append({"law": name, "p": p, "n": n, "height": data.height, "ok": ok})
    return _result(3, f"v-extraction round trip on {count} random coordinate changes", details)


def relation_derivation(grid=GRID) -> CriterionResult:
    details = []
    for p, n in grid:
        d = derive_relations(p, n)
        alg = d.algebra
        vE = alg.ring.gen(f"v{n}")
        inter, final = expected_relations(p, n, alg, vE)
        got = [(r.lhs_element(alg), r.rhs) for r in d.intermediate]
        ok = got == inter and (d.final.lhs_element(alg), d.final.rhs) == final
        homog = all(r.rhs.is_zero() or r.rhs.bidegree() == r.lhs_element(alg).bidegree() for r in d.relations)
        details.append({"p": p, "n": n, "relations": d.relations.describe(),
                        "pi": [pi(p, k) for k in range(1, n + 2)], "homogeneous": homog, "ok": ok and homog})
    return _result(4, "relation derivation matches the closed form", details)


def hopf_quotient(N: int = 12) -> CriterionResult:
    details = [hopf_quotient_check(p, N) for p in (3, 5, 7)]
    return _result(5, f"q(b(s)^(*p)) = 0 in characteristic p at N = {N}", details)


def random_unstable_element(alg: CoopAlgebra, n: int, rng, level: int | None = None, terms: int = 1):
    """A sum of random monomials sharing one space label."""
    P = 2 * (alg.p**n - 1)
    if level is None:
        level = int(rng.integers(-P, P + 1))
    out = alg.zero
    for _ in range(terms):
        b = {int(i): int(rng.integers(0, 3)) for i in rng.integers(0, 3, size=2)}
        d = int(rng.integers(0, 3))
        e = level - 2 * sum(b.values()) + P * d
        if e < 0:
            d += -(-(-e) // P)
            e = level - 2 * sum(b.values()) + P * d
        c = alg.ring.gen(f"v{n}", int(rng.integers(-2, 3))) * int(rng.integers(1, alg.p))
        out = out + alg.monomial(e=e, b=b, v={n: d}, coeff=c)
    return out, level


def idempotent_suite(seed: int = 0, samples: int = 100) -> CriterionResult:
    rng = np.random.default_rng(seed)
    details = []
    for p in (3, 5):
        for n in (1, 2):
            S = IdempotentS(p, n, 1)
            rel = S.height_relations()
            rep = verify_idempotent(S, rel)
            proj_ok = mult_ok = True
            for _ in range(samples):
                x, _ = random_unstable_element(S.algebra, n, rng)
                y, _ = random_unstable_element(S.algebra, n, rng)
                sx, _ = split_project(x, S, rel)
                ssx, _ = split_project(sx, S, rel)
                sy, _ = split_project(y, S, rel)
                sxy, _ = split_project(x * y, S, rel)
                proj_ok &= ssx == sx
                mult_ok &= sxy == rel.reduce(sx * sy)
            details.append({"p": p, "n": n, "properties": rep.to_json()["checks"],
                            "projection_idempotent": proj_ok, "projection_multiplicative": mult_ok,
                            "ok": rep.ok and proj_ok and mult_ok})
    return _result(6, "idempotent s and the projection S", details)


def splitting(seed: int = 0, count: int = 50) -> CriterionResult:
    rng = np.random.default_rng(seed)
    details = []
    for p, n in ((3, 1), (5, 1), (3, 2)):
        S = IdempotentS(p, n, 1)
        rel = S.height_relations()
        alg = S.algebra
        right_inverse = image_in = image_out = mult = True
        for _ in range(count):
            x, K = random_unstable_element(alg, n, rng, terms=int(rng.integers(1, 4)))
            c = StableClass(K, x)
            k = K + int(rng.integers(-S.P, S.P + 1))
            d = destabilise(c, k, S, rel)
            right_inverse &= stable_equal(StableClass(k, d.element), c, rel, S.h)
            # delta lands in the image of Sigma^h ...
            image_in &= sigma_power(d.preimage, k - S.h, S.h, rel) == d.element
            # ... and every Sigma^h z is a value of delta
            z, _ = random_unstable_element(alg, n, rng, level=k - S.h)
            w = sigma_power(z, k - S.h, S.h, rel)
            image_out &= destabilise(StableClass(k, w), k, S, rel).element == w
            y, L = random_unstable_element(alg, n, rng)
            c2 = StableClass(L, y)
            lhs = destabilise(c * c2, 0, S, rel).element
            rhs = rel.reduce(destabilise(c, 0, S, rel).element * destabilise(c2, 0, S, rel).element)
            mult &= lhs == rhs
        details.append({"p": p, "n": n, "sigma_delta_is_identity": right_inverse,
                        "delta_image_in_sigma_h_image": image_in,
                        "sigma_h_image_in_delta_image": image_out, "delta_multiplicative": mult,
                        "ok": right_inverse and image_in and image_out and mult})
    return _result(7, f"destabilisation on {count} random stable classes", details)


def delooping() -> CriterionResult:
    details = []
    bad = []
    count = 0
    for p, n in ((3, 1), (3, 2), (5, 1)):
        P = period(p, n)
        for h in (1, 2):
            for k in range(-10, 11):
                for l in range(-10, 11):
                    for m in range(-10, 11):
                        c = deloop_component(k, l, m, h, p, n)
                        count += 1
                        if not c.valid():
                            bad.append((k, l, m, h, p, n))
                        if m == k and (c.i, c.j) != (1, P):
                            bad.append(("m=k", k, m, h, p, n))
                        if m <= k - h and (c.i, c.j) != (0, k - m):
                            bad.append(("m<=k-h", k, m, h, p, n))
                    pairs = valid_pairs(k, m, h, P, 4)
                    if not all(deloop_normalize(pairs[0], q, h, P) for q in pairs):
                        bad.append(("normalize", k, m, h, p, n))
    details.append({"components_checked": count, "failures": bad[:10], "ok": not bad})
    comp_bad = []
    for p, n in ((3, 1), (3, 2), (5, 1)):
        P = period(p, n)
        for h in (1, 2):
            for k in range(-4, 5):
                rho = Op("rho", k, 3, "G", "F")
                sigma = Op("sigma", k + 3, -5, "F", "E")
                for m in range(-6, 7):
                    for ip in valid_pairs(k, m, h, P, 2):
                        for op in valid_pairs(k + 3, m + 3, h, P, 2):
                            if not deloop_compose(sigma, rho, m, h, P, op, ip).equal:
                                comp_bad.append((p, n, h, k, m, ip, op))
                    fam = Op("r", k, 1, "F", "E", stable_family=True)
                    i, j = minimal_pair(k, m, h, P)
                    w = restrict_deloop(fam, m, h, P, (i + 1, j + P))
                    if len(w) != 1 or w[0].m != m:
                        comp_bad.append(("family", p, n, h, k, m))
    details.append({"composition_failures": comp_bad[:10], "ok": not comp_bad})
    return _result(8, "delooping components, periodicity and composition", details)


def loop_heights() -> CriterionResult:
    details = []
    for p, n in GRID:
        d = derive_relations(p, n)
        base = additive_loop_height(d.relations, None, p, n)
        bounds = unstable_height_bounds(base.h, p, n)
        extra = kn_self_relation(d.algebra, n)
        selfh = additive_loop_height(d.relations, extra, p, n)
        ok = (base.h == 2 * pi(p, n) and base.attains_bound and bounds.hi == 2 * pi(p, n) + 1
              and bounds.global_hi == 2 * pi(p, n) + 1 and selfh.h == 1)
        details.append({"p": p, "n": n, "derived_only": base.h, "unstable_hi": bounds.hi,
                        "with_kn_relation": selfh.h, "ok": ok})
    return _result(9, "loop-height bounds", details)


def run_all(seed: int = 0) -> list[CriterionResult]:
    return [
        fgl_axioms(), p_series(), v_round_trip(seed), relation_derivation(), hopf_quotient(),
        idempotent_suite(seed), splitting(seed), delooping(), loop_heights(),
    ]
