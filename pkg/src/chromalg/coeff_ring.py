"""Graded commutative coefficient rings.

A ring is F_p (or Q in characteristic 0) adjoined a list of named graded
generators, some of which may be inverted.  Elements are sparse maps from
exponent vectors to residues.  Degrees are cohomological, so for instance
v_n lives in degree -2(p^n - 1).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

INHOMOGENEOUS = "inhomogeneous"

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    invertible: bool = False


@dataclass(frozen=True)
class RingSpec:
    characteristic: int
    generators: tuple[Generator, ...] = ()

    def __post_init__(self):
        if not isinstance(self.characteristic, int) or self.characteristic < 0:
            raise ValueError(f"characteristic must be 0 or a prime, got {self.characteristic!r}")
        if self.characteristic != 0 and not is_prime(self.characteristic):
            raise ValueError(f"characteristic {self.characteristic} is not prime")
        gens = tuple(g if isinstance(g, Generator) else Generator(*g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        seen = set()
        for g in gens:
            if not _NAME_RE.match(g.name):
                raise ValueError(f"bad generator name {g.name!r}")
            if g.name in seen:
                raise ValueError(f"duplicate generator {g.name!r}")
            seen.add(g.name)

    def to_json(self) -> dict:
        return {
            "characteristic": self.characteristic,
            "generators": [
                {"name": g.name, "degree": g.degree, "invertible": g.invertible}
                for g in self.generators
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "RingSpec":
        gens = tuple(
            Generator(str(g["name"]), int(g["degree"]), bool(g.get("invertible", False)))
            for g in obj.get("generators", [])
        )
        return cls(int(obj["characteristic"]), gens)


class Ring:
    """Ring handle built from a :class:`RingSpec`.

    Two rings compare equal when their specs do, so elements built from
    separately constructed but identical rings interoperate.
    """

    def __init__(self, spec: RingSpec):
        self.spec = spec
        self.characteristic = spec.characteristic
        self.gens = spec.generators
        self.ngens = len(spec.generators)
        self._index = {g.name: i for i, g in enumerate(spec.generators)}
        self.is_prime_field = self.characteristic > 0 and self.ngens == 0
        self.has_odd_generators = any(g.degree % 2 for g in self.gens)
        self.commutative = not self.has_odd_generators
        self._unit_exps = (0,) * self.ngens
        self.zero = CoeffElement(self, {})
        self.one = CoeffElement(self, {self._unit_exps: self._reduce(1)})

    def __eq__(self, other):
        return isinstance(other, Ring) and other.spec == self.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"Ring({self})"

    def __str__(self):
        base = "Q" if self.characteristic == 0 else f"F_{self.characteristic}"
        if not self.gens:
            return base
        parts = []
        for g in self.gens:
            parts.append(f"{g.name}^+-1" if g.invertible else g.name)
        return f"{base}[{', '.join(parts)}]"

    # coefficients -----------------------------------------------------
    def _reduce(self, c):
        if self.characteristic:
            if isinstance(c, Fraction):
                if c.denominator % self.characteristic == 0:
                    raise ZeroDivisionError(f"{c} is not {self.characteristic}-integral")
                return c.numerator * pow(c.denominator, -1, self.characteristic) % self.characteristic
            return int(c) % self.characteristic
        return Fraction(c)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no generator {name!r} in {self}") from None

    # element construction ---------------------------------------------
    def element(self, terms: Mapping | Iterable) -> "CoeffElement":
        """Build an element from ``{exps: coeff}``.

        Exponents may be full tuples or ``{name: exp}`` dicts.
        """
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict[tuple, object] = {}
        for exps, c in items:
            key = self._exps(exps)
            out[key] = out.get(key, 0) + c
        return self._make(out)

    def _exps(self, exps) -> tuple:
        if isinstance(exps, Mapping):
            v = [0] * self.ngens
            for name, e in exps.items():
                v[self.index(name)] += int(e)
            exps = tuple(v)
        else:
            exps = tuple(int(e) for e in exps)
        if len(exps) != self.ngens:
            raise ValueError(f"exponent vector {exps} has wrong length for {self}")
        for g, e in zip(self.gens, exps):
            if e < 0 and not g.invertible:
                raise ValueError(f"negative exponent on non-invertible generator {g.name}")
        return exps

    def _make(self, raw: dict) -> "CoeffElement":
        terms = {}
        for k, c in raw.items():
            c = self._reduce(c)
            if c:
                terms[k] = c
        return CoeffElement(self, terms)

    def scalar(self, c) -> "CoeffElement":
        return self._make({self._unit_exps: c})

    def gen(self, name: str, power: int = 1) -> "CoeffElement":
        exps = [0] * self.ngens
        exps[self.index(name)] = power
        return self.element({tuple(exps): 1})

    def monomial(self, exps, c=1) -> "CoeffElement":
        return self.element([(exps, c)])

    def coerce(self, x) -> "CoeffElement":
        if isinstance(x, CoeffElement):
            if x.ring != self:
                raise ValueError(f"element of {x.ring} used in {self}")
            return x
        if isinstance(x, (int, Fraction)):
            return self.scalar(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self}")

    # json -------------------------------------------------------------
    def to_json(self) -> dict:
        return self.spec.to_json()

    @classmethod
    def from_json(cls, obj) -> "Ring":
        return cls(RingSpec.from_json(obj))

    def element_from_json(self, obj) -> "CoeffElement":
        if isinstance(obj, (int, str)):
            return self.scalar(_parse_number(obj))
        out = {}
        for t in obj:
            exps = t.get("exps", {})
            key = self._exps(exps)
            out[key] = out.get(key, 0) + _parse_number(t["coeff"])
        return self._make(out)


def ring_make(spec: RingSpec | Mapping) -> Ring:
    if not isinstance(spec, RingSpec):
        spec = RingSpec.from_json(spec)
    return Ring(spec)


def _parse_number(c):
    if isinstance(c, int):
        return c
    return Fraction(str(c))


def _num_json(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else str(c)
    return int(c)


class CoeffElement:
    """Immutable sparse element of a :class:`Ring`."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_scalar(self) -> bool:
        return all(k == self.ring._unit_exps for k in self.terms)

    def scalar_value(self):
        if not self.is_scalar():
            raise ValueError(f"{self} is not a scalar")
        return self.terms.get(self.ring._unit_exps, 0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_unit(self) -> bool:
        if len(self.terms) != 1:
            return False
        (exps,) = self.terms
        return all(e == 0 or g.invertible for g, e in zip(self.ring.gens, exps))

    def degree(self):
        """Common cohomological degree, ``None`` for zero, or ``INHOMOGENEOUS``."""
        degs = {self._deg(k) for k in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            return INHOMOGENEOUS
        return degs.pop()

    def _deg(self, exps) -> int:
        return sum(g.degree * e for g, e in zip(self.ring.gens, exps))

    # arithmetic --------------------------------------------------------
    def _other(self, other):
        if isinstance(other, CoeffElement):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return self.ring._make(out)

    __radd__ = __add__

    def __neg__(self):
        return self.ring._make({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + c1 * c2
        return self.ring._make(out)

    __rmul__ = __mul__

    def inverse(self) -> "CoeffElement":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit in {self.ring}")
        ((exps, c),) = self.terms.items()
        p = self.ring.characteristic
        inv = pow(c, -1, p) if p else 1 / c
        return self.ring._make({tuple(-e for e in exps): inv})

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        if not isinstance(other, CoeffElement):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # display -----------------------------------------------------------
    def _mono_str(self, exps) -> str:
        parts = []
        for g, e in zip(self.ring.gens, exps):
            if e == 1:
                parts.append(g.name)
            elif e:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (self._deg(kv[0]), kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for exps, c in self.sorted_terms():
            m = self._mono_str(exps)
            if not m:
                out.append(str(c))
            elif c == 1:
                out.append(m)
            else:
                out.append(f"{c}*{m}")
        return " + ".join(out)

    def __repr__(self):
        return f"CoeffElement({self})"

    def to_json(self) -> list:
        return [
            {"exps": {g.name: e for g, e in zip(self.ring.gens, exps) if e}, "coeff": _num_json(c)}
            for exps, c in self.sorted_terms()
        ]


def coeff_degree(x: CoeffElement):
    d = x.degree()
    return 0 if d is None else d
