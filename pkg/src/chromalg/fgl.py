"""Formal group laws over coefficient rings.

Presets: additive, multiplicative, Honda of height n (built over Q from
its logarithm and reduced mod p) and the graded K(n) law, which is the
Honda law with each coefficient of x^a y^b multiplied by
v_n^((a+b-1)/(p^n-1)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .coeff_ring import CoeffElement, Generator, Ring, RingSpec
from .power_series import Series

X1, X2 = "x1", "x2"

# ~400 MB of int64 for the table of powers F(x,y)^i is the most we allow
_MAX_POW_TABLE = 50_000_000


def prime_field(p: int) -> Ring:
    return Ring(RingSpec(p))


def kn_ring(p: int, n: int) -> Ring:
    return Ring(RingSpec(p, (Generator(f"v{n}", -2 * (p**n - 1), True),)))


def ilog(N: int, p: int) -> int:
    """Largest i with p^i <= N."""
    i = 0
    while p ** (i + 1) <= N:
        i += 1
    return i


def is_power_of(d: int, p: int) -> bool:
    while d > 1 and d % p == 0:
        d //= p
    return d == 1


@dataclass
class AxiomResult:
    ok: bool
    monomial: tuple | None = None
    where: str | None = None

    def to_json(self):
        return {"ok": self.ok, "monomial": list(self.monomial) if self.monomial else None,
                "where": self.where}


@dataclass
class AxiomReport:
    unitality: AxiomResult
    commutativity: AxiomResult
    associativity: AxiomResult

    @property
    def ok(self) -> bool:
        return self.unitality.ok and self.commutativity.ok and self.associativity.ok

    def to_json(self):
        return {"unitality": self.unitality.to_json(),
                "commutativity": self.commutativity.to_json(),
                "associativity": self.associativity.to_json(),
                "ok": self.ok}


def _mono_str(vars, exps) -> str:
    parts = [v if e == 1 else f"{v}^{e}" for v, e in zip(vars, exps) if e]
    return "*".join(parts) or "1"


@dataclass
class PSeriesData:
    p_series: Series
    v_coeffs: dict
    height: int | None
    search_bound: int
    law: "FormalGroupLaw" = field(repr=False, default=None)

    @property
    def height_str(self) -> str:
        return str(self.height) if self.height is not None else f">= {self.search_bound + 1}"

    def to_json(self):
        return {
            "series": str(self.p_series),
            "v_coeffs": {str(i): str(v) for i, v in sorted(self.v_coeffs.items())},
            "height": self.height if self.height is not None else f">= {self.search_bound + 1}",
            "search_bound": self.search_bound,
        }


class FormalGroupLaw:
    """A bivariate series F(x1, x2) satisfying the FGL axioms to precision."""

    def __init__(self, series: Series, name: str = "custom", check: bool = True):
        if len(series.vars) != 2:
            raise ValueError("a formal group law needs exactly two variables")
        self.series = series
        self.name = name
        self.base = series.base
        self.precision = series.precision
        self._inverse = None
        if check:
            report = self.check_axioms()
            if not report.ok:
                raise ValueError(f"not a formal group law: {report.to_json()}")

    def __repr__(self):
        return f"FormalGroupLaw({self.name}, N={self.precision}, F={self.series})"

    @property
    def vars(self):
        return self.series.vars

    @property
    def characteristic(self) -> int:
        return self.base.characteristic

    def __call__(self, a: Series, b: Series) -> Series:
        """F(a, b) for two series in the same variables."""
        v1, v2 = self.vars
        return self.series.substitute({v1: a, v2: b})

    def _uni(self, var: str, N: int | None = None) -> Series:
        return Series.var(self.base, (var,), var, self.precision if N is None else N)

    # axioms -------------------------------------------------------------
    def check_axioms(self) -> AxiomReport:
        return AxiomReport(self._check_unit(), self._check_comm(), self._check_assoc())

    def _check_unit(self) -> AxiomResult:
        F = self.series
        bad = []
        for exps, c in F.terms.items():
            a, b = exps
            if a and b:
                continue
            want = 1 if (a, b) in ((1, 0), (0, 1)) else 0
            if c != want:
                bad.append(exps)
        for exps in ((1, 0), (0, 1)):
            if self.precision >= 1 and F.coefficient(exps) != 1:
                bad.append(exps)
        if not bad:
            return AxiomResult(True)
        first = min(bad, key=lambda e: (sum(e), tuple(-x for x in e)))
        return AxiomResult(False, first, _mono_str(F.vars, first))

    def _check_comm(self) -> AxiomResult:
        F = self.series
        d = F.first_difference(F.swap())
        if d is None:
            return AxiomResult(True)
        return AxiomResult(False, d, _mono_str(F.vars, d))

    def _check_assoc(self) -> AxiomResult:
        F = self.series
        N = self.precision
        names = ("x", "y", "z")
        if F.is_dense:
            A = F.dense_array()
            nz = np.nonzero(A)
            k = int(max(nz[0].max(), nz[1].max())) + 1 if len(nz[0]) else 1
            if k * (N + 1) ** 2 <= _MAX_POW_TABLE:
                gpow = np.zeros((k, N + 1, N + 1), dtype=np.int64)
                gpow[0, 0, 0] = 1
                for i in range(1, k):
                    gpow[i] = kernels.mul2(gpow[i - 1], A, N, self.characteristic)
                bad = kernels.assoc_mismatch(A, gpow, N, self.characteristic)
                if bad is None:
                    return AxiomResult(True)
                return AxiomResult(False, bad, _mono_str(names, bad))
        # generic path in three variables
        base = self.base
        x, y, z = (Series.var(base, names, v, N) for v in names)
        left = self(self(x, y), z)
        right = self(x, self(y, z))
        d = left.first_difference(right)
        if d is None:
            return AxiomResult(True)
        return AxiomResult(False, d, _mono_str(names, d))

    # derived series -----------------------------------------------------
    def inverse(self, var: str = "x") -> Series:
        """iota(x) with F(x, iota(x)) = 0, by Newton iteration."""
        if self._inverse is None:
            N = self.precision
            X = self._uni("x")
            d2 = self.series.derivative(self.vars[1])
            iota = -X
            for _ in range(N.bit_length() + 2):
                val = self(X, iota)
                if val.is_zero():
                    break
                dv = d2.substitute({self.vars[0]: X, self.vars[1]: iota})
                # dv is known to N - 1 but multiplies a series of order >= 2
                dv = Series(self.base, ("x",), N, dv.terms)
                iota = iota - val * dv.reciprocal()
            self._inverse = iota
        return self._inverse if var == "x" else self._inverse.rename((var,))

    def formal_sum(self, terms, vars=None, precision=None) -> Series:
        """Left fold acc -> F(term, acc) starting from 0."""
        terms = list(terms)
        if not terms:
            if vars is None:
                vars = ("s",)
            return Series.zero(self.base, vars, self.precision if precision is None else precision)
        acc = Series.zero(self.base, terms[0].vars, terms[0].precision)
        for t in terms:
            if t.constant_term():
                raise ValueError("formal sum terms must have zero constant term")
            acc = self(t, acc)
        return acc

    def formal_difference(self, a: Series, b: Series) -> Series:
        (v,) = self.inverse().vars
        return self(a, self.inverse().substitute({v: b}))

    def n_series(self, k: int, var: str = "s") -> Series:
        X = self._uni(var)
        if k == 0:
            return Series.zero(self.base, (var,), self.precision)
        if k < 0:
            return self.inverse().substitute({"x": self.n_series(-k, var)})
        acc = X
        for _ in range(k - 1):
            acc = self(X, acc)
        return acc

    def p_series(self, var: str = "s") -> Series:
        if not self.characteristic:
            raise ValueError("the p-series mod p needs a base of prime characteristic")
        return self.n_series(self.characteristic, var)

    def extract_v(self, var: str = "s") -> PSeriesData:
        """Peel [p](x) = sum^F v_i x^(p^i) greedily from the bottom."""
        p = self.characteristic
        if not p:
            raise ValueError("v-coefficients need a base of prime characteristic")
        N = self.precision
        nmax = ilog(N, p)
        pser = self.p_series(var)
        r = pser
        v = {}
        for i in range(1, nmax + 1):
            o = r.order()
            q = p**i
            if o is not None and (o < q or not is_power_of(o, p)):
                raise ValueError(
                    f"residual lowest term at degree {o}, not the expected power {q} of {p}")
            if o == q:
                vi = r.coefficient((q,))
                v[i] = vi
                term = Series.monomial(self.base, (var,), N, (q,), vi)
                r = self.formal_difference(r, term)
            else:
                v[i] = self.base.zero
        if not r.is_zero():
            raise ValueError(f"residual {r} left after peeling; precision too low or not an FGL mod {p}")
        height = next((i for i in sorted(v) if v[i]), None)
        return PSeriesData(pser, v, height, nmax, self)

    def reassemble(self, data: PSeriesData, var: str = "s") -> Series:
        N = self.precision
        p = self.characteristic
        terms = [Series.monomial(self.base, (var,), N, (p**i,), c)
                 for i, c in sorted(data.v_coeffs.items()) if c]
        return self.formal_sum(terms, vars=(var,))

    def tail_decompose(self) -> tuple[Series, Series]:
        """R1, R2 with F = x1 + x2 R1 = x2 + x1 R2; both have precision N - 1."""
        F = self.series
        N = self.precision
        out = []
        for idx in (1, 0):
            shifted = {}
            for exps, c in F.terms.items():
                if exps == ((1, 0) if idx == 1 else (0, 1)):
                    continue
                if exps[idx] == 0:
                    raise ValueError(f"F is not divisible as claimed at {exps}")
                e = list(exps)
                e[idx] -= 1
                shifted[tuple(e)] = c
            out.append(Series(self.base, F.vars, N - 1, shifted))
        return out[0], out[1]

    def coordinate_change(self, phi: Series) -> "FormalGroupLaw":
        """The law phi(F(phi^-1 x1, phi^-1 x2)) for a strict univariate phi."""
        (t,) = phi.vars
        if phi.coefficient((1,)) != 1 or phi.constant_term():
            raise ValueError("coordinate change must be strict: phi(x) = x + ...")
        N = min(self.precision, phi.precision)
        psi = phi.reversion()
        v1, v2 = self.vars
        a = psi.substitute({t: Series.var(self.base, self.vars, v1, N)})
        b = psi.substitute({t: Series.var(self.base, self.vars, v2, N)})
        inner = self.series.truncate(N).substitute({v1: a, v2: b})
        return FormalGroupLaw(phi.substitute({t: inner}), f"{self.name}^phi", check=False)

    def to_json(self):
        return {"name": self.name, "law": self.series.to_json()}


# presets ---------------------------------------------------------------------

def fgl_additive(p: int, N: int) -> FormalGroupLaw:
    F = Series(prime_field(p), (X1, X2), N, {(1, 0): 1, (0, 1): 1})
    return FormalGroupLaw(F, "additive", check=False)


def fgl_multiplicative(p: int, N: int) -> FormalGroupLaw:
    F = Series(prime_field(p), (X1, X2), N, {(1, 0): 1, (0, 1): 1, (1, 1): 1})
    return FormalGroupLaw(F, "mult", check=False)


def honda_logarithm(p: int, n: int, N: int) -> Series:
    Q = Ring(RingSpec(0))
    q = p**n
    terms = {}
    i = 0
    while q**i <= N:
        terms[(q**i,)] = Fraction(1, p**i)
        i += 1
    return Series(Q, ("x",), N, terms)


@lru_cache(maxsize=32)
def _honda_integral(p: int, n: int, N: int) -> tuple:
    """Coefficients of exp(log x + log y) over Q, as ((a, b), Fraction) pairs."""
    log = honda_logarithm(p, n, N)
    exp = log.reversion()
    logt = {k[0]: c.scalar_value() for k, c in log.terms.items()}
    D = max(c.denominator for c in logt.values())
    U = {}
    for d, c in logt.items():
        w = int(c * D)
        U[(d, 0)] = U.get((d, 0), 0) + w
        U[(0, d)] = U.get((0, d), 0) + w
    ek = {k[0]: c.scalar_value() for k, c in exp.terms.items()}
    kmax = max(ek)
    out: dict = {}
    W = {(0, 0): 1}
    Ulist = list(U.items())
    for k in range(1, kmax + 1):
        nxt: dict = {}
        for (a, b), c in W.items():
            room = N - a - b
            for (u, v), w in Ulist:
                if u + v <= room:
                    key = (a + u, b + v)
                    nxt[key] = nxt.get(key, 0) + c * w
        W = nxt
        if k in ek:
            scale = ek[k] / D**k
            for key, c in W.items():
                out[key] = out.get(key, 0) + scale * c
    result = []
    for key, c in sorted(out.items()):
        c = Fraction(c)
        if c:
            if c.denominator % p == 0:
                raise ArithmeticError(f"Honda coefficient {c} at {key} is not {p}-integral")
            result.append((key, c))
    return tuple(result)


def honda_mod_p(p: int, n: int, N: int) -> dict:
    out = {}
    for key, c in _honda_integral(p, n, N):
        r = c.numerator * pow(c.denominator, -1, p) % p
        if r:
            out[key] = r
    return out


def fgl_honda(p: int, n: int, N: int, check: bool = False) -> FormalGroupLaw:
    if N < 1:
        raise ValueError("precision must be at least 1")
    F = Series(prime_field(p), (X1, X2), N, honda_mod_p(p, n, N))
    return FormalGroupLaw(F, f"honda({p},{n})", check=check)


def fgl_kn(p: int, n: int, N: int, check: bool = False) -> FormalGroupLaw:
    """Graded Honda law over F_p[v_n^{+-1}] with [p](x) = v_n x^(p^n)."""
    R = kn_ring(p, n)
    q1 = p**n - 1
    terms = {}
    for (a, b), c in honda_mod_p(p, n, N).items():
        if (a + b - 1) % q1:
            raise ArithmeticError(f"Honda term x^{a} y^{b} does not fit the grading")
        terms[(a, b)] = R.monomial(((a + b - 1) // q1,), c)
    return FormalGroupLaw(Series(R, (X1, X2), N, terms), f"K({n})", check=check)


PRESETS = {
    "additive": lambda p, n, N: fgl_additive(p, N),
    "mult": lambda p, n, N: fgl_multiplicative(p, N),
    "honda": fgl_honda,
    "kn": fgl_kn,
}


def make_law(name: str, p: int, n: int, N: int) -> FormalGroupLaw:
    try:
        return PRESETS[name](p, n, N)
    except KeyError:
        raise ValueError(f"unknown law {name!r}; choose from {sorted(PRESETS)}") from None


def load_law(obj, check: bool = True) -> FormalGroupLaw:
    """Law from series JSON; axioms are checked unless ``check`` is false."""
    return FormalGroupLaw(Series.from_json(obj), "file", check=check)


def random_strict_series(base: Ring, N: int, rng, var: str = "x") -> Series:
    """x + random higher terms.

    Over a prime field the coefficients are random residues.  Over
    F_p[v^+-1] with |v| = -2q the change is kept homogeneous: x^k gets
    c v^((k-1)/q), so a p-typical law stays p-typical.
    """
    p = base.characteristic
    terms = {(1,): base.one}
    q = None
    if base.ngens:
        if base.ngens != 1 or base.gens[0].degree >= 0:
            raise ValueError("random coordinate changes need F_p or F_p[v] with |v| < 0")
        q = -base.gens[0].degree // 2
    for d in range(2, N + 1):
        c = int(rng.integers(0, p))
        if not c:
            continue
        if q is None:
            terms[(d,)] = base.scalar(c)
        elif (d - 1) % q == 0:
            terms[(d,)] = base.monomial(((d - 1) // q,), c)
    return Series(base, (var,), N, terms)


# functional aliases -------------------------------------------------------------

def fgl_check_axioms(F: FormalGroupLaw) -> AxiomReport:
    return F.check_axioms()


def fgl_formal_sum(F: FormalGroupLaw, terms, vars=None) -> Series:
    return F.formal_sum(terms, vars=vars)


def fgl_inverse(F: FormalGroupLaw) -> Series:
    return F.inverse()


def fgl_n_series(F: FormalGroupLaw, n: int) -> Series:
    return F.n_series(n)


def fgl_extract_v(F: FormalGroupLaw) -> PSeriesData:
    return F.extract_v()


def fgl_tail_decompose(F: FormalGroupLaw):
    return F.tail_decompose()


def v_degree(p: int, i: int) -> int:
    return -2 * (p**i - 1)


__all__ = [
    "AxiomReport", "AxiomResult", "CoeffElement", "FormalGroupLaw", "PSeriesData",
    "fgl_additive", "fgl_multiplicative", "fgl_honda", "fgl_kn", "make_law", "load_law",
    "fgl_check_axioms", "fgl_formal_sum", "fgl_inverse", "fgl_n_series", "fgl_extract_v",
    "fgl_tail_decompose", "honda_logarithm", "random_strict_series", "prime_field", "kn_ring",
]
