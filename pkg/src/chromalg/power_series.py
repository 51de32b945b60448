"""Truncated multivariate power series with total-degree precision.

A :class:`Series` knows its variables, its precision N and its terms of
total degree <= N.  Coefficients come from a *base*: either a
:class:`~chromalg.coeff_ring.Ring` or any algebra object exposing ``zero``,
``one``, ``coerce``, ``characteristic``, ``commutative`` and
``is_prime_field`` (the co-operation algebra does).

Series over a prime field in one or two variables are stored as dense
numpy arrays and multiplied by the kernels in :mod:`chromalg.kernels`;
everything else is a sparse dict.
"""
from __future__ import annotations

from math import ceil, log2
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .coeff_ring import Ring


class PrecisionError(ValueError):
    """A coefficient was requested beyond the known precision."""


def _dense_ok(base, nvars: int) -> bool:
    return bool(getattr(base, "is_prime_field", False)) and 1 <= nvars <= 2


class Series:
    __slots__ = ("base", "vars", "precision", "_arr", "_terms")

    def __init__(self, base, vars: Iterable[str], precision: int, terms: Mapping | None = None):
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise ValueError(f"repeated variable in {vars}")
        if precision < 0:
            raise ValueError("precision must be non-negative")
        self.base = base
        self.vars = vars
        self.precision = int(precision)
        self._arr = None
        self._terms = None
        raw = {}
        for exps, c in (terms or {}).items():
            exps = self._norm_exps(exps)
            if sum(exps) > precision:
                continue
            c = base.coerce(c)
            raw[exps] = raw[exps] + c if exps in raw else c
        if _dense_ok(base, len(vars)):
            arr = self._empty_array()
            for exps, c in raw.items():
                arr[exps] = int(c.scalar_value())
            self._arr = arr
        else:
            self._terms = {k: c for k, c in raw.items() if c}

    # construction helpers ----------------------------------------------
    @classmethod
    def _wrap(cls, base, vars, precision, *, arr=None, terms=None) -> "Series":
        s = cls.__new__(cls)
        s.base = base
        s.vars = tuple(vars)
        s.precision = precision
        s._arr = arr
        s._terms = terms
        if arr is None and terms is None:
            if _dense_ok(base, len(vars)):
                s._arr = s._empty_array()
            else:
                s._terms = {}
        return s

    @classmethod
    def zero(cls, base, vars, precision) -> "Series":
        return cls._wrap(base, vars, precision)

    @classmethod
    def constant(cls, base, vars, precision, c=1) -> "Series":
        return cls(base, vars, precision, {(0,) * len(tuple(vars)): c})

    @classmethod
    def var(cls, base, vars, name, precision) -> "Series":
        vars = tuple(vars)
        exps = [0] * len(vars)
        exps[vars.index(name)] = 1
        return cls(base, vars, precision, {tuple(exps): 1})

    @classmethod
    def monomial(cls, base, vars, precision, exps, c=1) -> "Series":
        return cls(base, vars, precision, {tuple(exps): c})

    def _empty_array(self):
        k = len(self.vars)
        return np.zeros((self.precision + 1,) * k, dtype=np.int64)

    def _norm_exps(self, exps) -> tuple:
        if isinstance(exps, Mapping):
            v = [0] * len(self.vars)
            for name, e in exps.items():
                v[self.vars.index(name)] = int(e)
            exps = v
        exps = tuple(int(e) for e in exps)
        if len(exps) != len(self.vars) or any(e < 0 for e in exps):
            raise ValueError(f"bad exponent vector {exps} for variables {self.vars}")
        return exps

    @property
    def is_dense(self) -> bool:
        return self._arr is not None

    @property
    def p(self) -> int:
        return self.base.characteristic

    # inspection ----------------------------------------------------------
    @property
    def terms(self) -> dict:
        if self._terms is not None:
            return self._terms
        return {tuple(int(i) for i in idx): self.base.scalar(int(self._arr[idx]))
                for idx in zip(*np.nonzero(self._arr))}

    def items(self):
        """Nonzero terms sorted by total degree, then exponent vector."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), tuple(-e for e in kv[0])))

    def __len__(self):
        if self._arr is not None:
            return int(np.count_nonzero(self._arr))
        return len(self._terms)

    def is_zero(self) -> bool:
        return len(self) == 0

    def coefficient(self, exps):
        exps = self._norm_exps(exps)
        if sum(exps) > self.precision:
            raise PrecisionError(
                f"coefficient of degree {sum(exps)} is beyond precision {self.precision}")
        if self._arr is not None:
            return self.base.scalar(int(self._arr[exps]))
        return self._terms.get(exps, self.base.zero)

    def constant_term(self):
        return self.coefficient((0,) * len(self.vars))

    def order(self):
        """Lowest total degree of a nonzero term, or None for zero."""
        if self._arr is not None:
            nz = np.nonzero(self._arr)
            if not len(nz[0]):
                return None
            return int(sum(nz).min())
        if not self._terms:
            return None
        return min(sum(k) for k in self._terms)

    def lowest_terms(self) -> dict:
        o = self.order()
        if o is None:
            return {}
        return {k: c for k, c in self.terms.items() if sum(k) == o}

    # compatibility -------------------------------------------------------
    def _check(self, other: "Series"):
        if not isinstance(other, Series):
            raise TypeError(f"expected Series, got {type(other).__name__}")
        if other.vars != self.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
        if other.base != self.base:
            raise ValueError(f"base mismatch: {self.base} vs {other.base}")

    def truncate(self, N: int) -> "Series":
        """Drop terms above degree N; the result has precision min(N, precision)."""
        N = min(int(N), self.precision)
        if N == self.precision:
            return self
        if self._arr is not None:
            sl = (slice(0, N + 1),) * len(self.vars)
            arr = self._arr[sl].copy()
            if len(self.vars) == 2:
                arr[~kernels.triangle_mask(N)] = 0
            return Series._wrap(self.base, self.vars, N, arr=arr)
        return Series._wrap(self.base, self.vars, N,
                            terms={k: c for k, c in self._terms.items() if sum(k) <= N})

    def with_precision(self, N: int) -> "Series":
        """Reinterpret as known to precision N; only lowering is exact."""
        if N > self.precision:
            raise PrecisionError(f"cannot raise precision {self.precision} to {N}")
        return self.truncate(N)

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Series):
            return self + Series.constant(self.base, self.vars, self.precision, other)
        self._check(other)
        N = min(self.precision, other.precision)
        a, b = self.truncate(N), other.truncate(N)
        if a._arr is not None:
            return Series._wrap(self.base, self.vars, N, arr=(a._arr + b._arr) % self.p)
        out = dict(a._terms)
        for k, c in b._terms.items():
            if k in out:
                s = out[k] + c
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = c
        return Series._wrap(self.base, self.vars, N, terms=out)

    __radd__ = __add__

    def __neg__(self):
        if self._arr is not None:
            return Series._wrap(self.base, self.vars, self.precision, arr=(-self._arr) % self.p)
        return Series._wrap(self.base, self.vars, self.precision,
                            terms={k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c, left: bool = True) -> "Series":
        c = self.base.coerce(c)
        if self._arr is not None:
            v = int(c.scalar_value())
            return Series._wrap(self.base, self.vars, self.precision, arr=(self._arr * v) % self.p)
        out = {}
        for k, x in self._terms.items():
            y = c * x if left else x * c
            if y:
                out[k] = y
        return Series._wrap(self.base, self.vars, self.precision, terms=out)

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.scale(other, left=False)
        self._check(other)
        N = min(self.precision, other.precision)
        a, b = self.truncate(N), other.truncate(N)
        if a._arr is not None:
            kern = kernels.mul1 if len(self.vars) == 1 else kernels.mul2
            return Series._wrap(self.base, self.vars, N, arr=kern(a._arr, b._arr, N, self.p))
        out: dict = {}
        bt = [(k, sum(k), c) for k, c in b._terms.items()]
        for k1, c1 in a._terms.items():
            room = N - sum(k1)
            if room < 0:
                continue
            for k2, d2, c2 in bt:
                if d2 > room:
                    continue
                k = tuple(x + y for x, y in zip(k1, k2))
                prod = c1 * c2
                if k in out:
                    out[k] = out[k] + prod
                else:
                    out[k] = prod
        return Series._wrap(self.base, self.vars, N, terms={k: c for k, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other, left=True)

    def __pow__(self, k: int) -> "Series":
        if k < 0:
            return self.reciprocal() ** (-k)
        p = self.base.characteristic
        if k == 0:
            return Series.constant(self.base, self.vars, self.precision, 1)
        if p and k % p == 0 and getattr(self.base, "commutative", False):
            return (self ** (k // p)).frobenius()
        result = None
        sq = self
        while k:
            if k & 1:
                result = sq if result is None else result * sq
            k >>= 1
            if k:
                sq = sq * sq
        return result

    def frobenius(self) -> "Series":
        """The p-th power, computed termwise as sum c^p x^(p a).

        Valid over commutative bases of characteristic p.
        """
        p = self.base.characteristic
        if not p or not getattr(self.base, "commutative", False):
            raise ValueError("Frobenius needs a commutative base of prime characteristic")
        N = self.precision
        if self._arr is not None:
            arr = self._empty_array()
            m = N // p
            src = self._arr[(slice(0, m + 1),) * len(self.vars)]
            arr[(slice(0, p * m + 1, p),) * len(self.vars)] = src
            if len(self.vars) == 2:
                arr[~kernels.triangle_mask(N)] = 0
            return Series._wrap(self.base, self.vars, N, arr=arr)
        out = {}
        for k, c in self.terms.items():
            if p * sum(k) <= N:
                y = c ** p
                if y:
                    out[tuple(p * e for e in k)] = y
        return Series(self.base, self.vars, N, out)

    def derivative(self, var: str) -> "Series":
        i = self.vars.index(var)
        N = max(self.precision - 1, 0)
        out = {}
        for k, c in self.terms.items():
            if k[i] and sum(k) - 1 <= N:
                kk = list(k)
                kk[i] -= 1
                y = c * k[i]
                if y:
                    out[tuple(kk)] = y
        return Series(self.base, self.vars, N, out)

    def reciprocal(self) -> "Series":
        """Multiplicative inverse of a series with unit constant term."""
        c0 = self.constant_term()
        y = Series.constant(self.base, self.vars, self.precision, c0.inverse())
        two = Series.constant(self.base, self.vars, self.precision, 2)
        for _ in range(ceil(log2(self.precision + 2)) + 2):
            nxt = y * (two - self * y)
            if nxt == y:
                break
            y = nxt
        return y

    def reversion(self) -> "Series":
        """Compositional inverse g of a univariate f = c x + ..., c a unit."""
        if len(self.vars) != 1:
            raise ValueError("reversion needs a univariate series")
        (x,) = self.vars
        N = self.precision
        if self.constant_term():
            raise ValueError("reversion needs zero constant term")
        c1 = self.coefficient((1,))
        X = Series.var(self.base, self.vars, x, N)
        g = X.scale(c1.inverse())
        df = self.derivative(x)
        for _ in range(ceil(log2(N + 2)) + 2):
            fg = self.substitute({x: g})
            dfg = df.substitute({x: g})
            # f'(g) is only known to N - 1, but it multiplies a series of
            # order >= 2, so reading it at precision N loses nothing
            nxt = g - (fg - X) * Series(self.base, self.vars, N, dfg.terms).reciprocal()
            if nxt == g:
                break
            g = nxt
        return g

    # substitution --------------------------------------------------------
    def substitute(self, assignment: Mapping[str, "Series"]) -> "Series":
        """Compose: replace each variable by a series with zero constant term.

        All substituted series must share variables and base; variables of
        ``self`` not in ``assignment`` must be among the target variables and
        are left alone.  The result precision is the minimum of all inputs.
        """
        if not assignment:
            return self
        targets = list(assignment.values())
        t0 = targets[0]
        for g in targets[1:]:
            t0._check(g)
        if t0.base != self.base:
            raise ValueError(f"base mismatch: {self.base} vs {t0.base}")
        unknown = set(assignment) - set(self.vars)
        if unknown:
            raise ValueError(f"substituting unknown variables {sorted(unknown)}")
        N = min([self.precision] + [g.precision for g in targets])
        gs = []
        for v in self.vars:
            if v in assignment:
                g = assignment[v]
                if g.constant_term():
                    raise ValueError(f"substituted series for {v} has nonzero constant term")
            elif v in t0.vars:
                g = Series.var(t0.base, t0.vars, v, N)
            else:
                raise ValueError(f"variable {v} is neither substituted nor a target variable")
            gs.append(g.truncate(N))
        return _compose(self, gs, t0.base, t0.vars, N)

    __call__ = substitute

    def change_base(self, base, fn=None) -> "Series":
        fn = fn or base.coerce
        return Series(base, self.vars, self.precision, {k: fn(c) for k, c in self.terms.items()})

    def map_coefficients(self, fn) -> "Series":
        return Series(self.base, self.vars, self.precision, {k: fn(c) for k, c in self.terms.items()})

    def rename(self, vars) -> "Series":
        vars = tuple(vars)
        if len(vars) != len(self.vars):
            raise ValueError("rename needs the same number of variables")
        if self._arr is not None:
            return Series._wrap(self.base, vars, self.precision, arr=self._arr.copy())
        return Series._wrap(self.base, vars, self.precision, terms=dict(self._terms))

    def swap(self) -> "Series":
        """Exchange the two variables of a bivariate series."""
        if len(self.vars) != 2:
            raise ValueError("swap needs two variables")
        if self._arr is not None:
            return Series._wrap(self.base, self.vars, self.precision, arr=self._arr.T.copy())
        return Series._wrap(self.base, self.vars, self.precision,
                            terms={(b, a): c for (a, b), c in self._terms.items()})

    def dense_array(self) -> np.ndarray:
        if self._arr is None:
            raise ValueError("series is not stored densely")
        return self._arr

    @classmethod
    def from_array(cls, base, vars, precision, arr) -> "Series":
        arr = np.asarray(arr, dtype=np.int64) % base.characteristic
        if len(tuple(vars)) == 2:
            arr = arr.copy()
            arr[~kernels.triangle_mask(precision)] = 0
        return cls._wrap(base, vars, precision, arr=arr)

    # comparison ------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Series):
            if other.vars != self.vars or other.base != self.base:
                return False
            N = min(self.precision, other.precision)
            a, b = self.truncate(N), other.truncate(N)
            if a._arr is not None:
                return bool(np.array_equal(a._arr, b._arr))
            return a._terms == b._terms
        try:
            c = self.base.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self == Series.constant(self.base, self.vars, self.precision, c)

    __hash__ = None

    def first_difference(self, other: "Series"):
        """Exponent vector of the lowest term where two series differ, or None."""
        d = self - other
        items = d.items()
        return items[0][0] if items else None

    # display ---------------------------------------------------------------
    def _mono(self, exps) -> str:
        parts = []
        for v, e in zip(self.vars, exps):
            if e == 1:
                parts.append(v)
            elif e:
                parts.append(f"{v}^{e}")
        return "*".join(parts)

    def __str__(self):
        items = self.items()
        if not items:
            return "0"
        out = []
        for exps, c in items:
            m = self._mono(exps)
            cs = str(c)
            if " " in cs:
                cs = f"({cs})"
            if not m:
                out.append(cs)
            elif cs == "1":
                out.append(m)
            else:
                out.append(f"{cs}*{m}")
        return " + ".join(out)

    def __repr__(self):
        return f"Series({self}; N={self.precision})"

    # json ------------------------------------------------------------------
    def to_json(self) -> dict:
        obj = {
            "vars": list(self.vars),
            "precision": self.precision,
            "terms": [{"exps": list(k), "coeff": c.to_json()} for k, c in self.items()],
        }
        if hasattr(self.base, "to_json"):
            obj["ring"] = self.base.to_json()
        return obj

    @classmethod
    def from_json(cls, obj: Mapping, base=None) -> "Series":
        if base is None:
            if "ring" not in obj:
                raise ValueError("series JSON has no ring and none was supplied")
            base = Ring.from_json(obj["ring"])
        vars = tuple(obj["vars"])
        terms = {}
        for t in obj.get("terms", []):
            k = tuple(int(e) for e in t["exps"])
            c = base.element_from_json(t["coeff"])
            terms[k] = terms[k] + c if k in terms else c
        return cls(base, vars, int(obj["precision"]), terms)


class _Powers:
    """Cached powers g^e of one series."""

    def __init__(self, g: Series):
        self.g = g
        self.cache = {1: g}

    def __call__(self, e: int) -> Series:
        if e not in self.cache:
            self.cache[e] = self.g ** e
        return self.cache[e]


def _compose(f: Series, gs: list[Series], base, tvars, N) -> Series:
    k = len(f.vars)
    orders = [g.order() for g in gs]
    powers = [_Powers(g) for g in gs]
    one = Series.constant(base, tvars, N, 1)
    zero = Series.zero(base, tvars, N)
    # group terms by exponent of the last variable, dropping those that
    # cannot reach degree <= N
    groups: dict[int, list] = {}
    for exps, c in f.terms.items():
        low = 0
        dead = False
        for e, o in zip(exps, orders):
            if e:
                if o is None:
                    dead = True
                    break
                low += e * o
        if dead or low > N:
            continue
        groups.setdefault(exps[-1], []).append((exps[:-1], c))
    if not groups:
        return zero
    prefix_cache: dict[tuple, Series] = {(0,) * (k - 1): one}

    def prefix(alpha):
        if alpha not in prefix_cache:
            acc = one
            for i, e in enumerate(alpha):
                if e:
                    acc = acc * powers[i](e)
            prefix_cache[alpha] = acc
        return prefix_cache[alpha]

    coeffs = {}
    for j, lst in groups.items():
        acc = zero
        for alpha, c in lst:
            acc = acc + prefix(alpha).scale(c, left=True)
        coeffs[j] = acc
    # Horner in the last substituted series
    js = sorted(coeffs, reverse=True)
    last = powers[-1]
    res = coeffs[js[0]]
    for prev, j in zip(js, js[1:]):
        res = res * last(prev - j) + coeffs[j]
    if js[-1]:
        res = res * last(js[-1])
    return res


# functional aliases --------------------------------------------------------

def series_add(a: Series, b: Series) -> Series:
    return a + b


def series_mul(a: Series, b: Series) -> Series:
    return a * b


def series_scale(a: Series, c) -> Series:
    return a.scale(c)


def series_substitute(f: Series, assignment: Mapping[str, Series]) -> Series:
    return f.substitute(assignment)


def series_coefficient(f: Series, exps):
    return f.coefficient(exps)


def truncate(f: Series, N: int) -> Series:
    return f.truncate(N)
