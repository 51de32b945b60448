"""The idempotent splitting of unstable co-operations and the delooping calculus.

Everything here works in the unstable realm of the K(n) self model: E and
F both have coefficients F_p[v_n^{+-1}], the height-h identity

    e^(P + h) [v_n] -> v_n e^h,   P = 2(p^n - 1)

is the only imposed relation, and s = v_n^{-1} e^P [v_n].
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .coeff_ring import CoeffElement
from .coop_algebra import CoopAlgebra, CoopElement, RelationSet, key_bidegree
from .fgl import kn_ring

VIEWS = ("operation", "class", "functional")
VIEW_TAGS = ("restriction", "loop")


def period(p: int, n: int) -> int:
    return 2 * (p**n - 1)


def _scaled(x: CoopElement, c: CoeffElement) -> CoopElement:
    return x.map_coefficients(lambda a: c * a)


# the idempotent -------------------------------------------------------------

class IdempotentS:
    """s and its companion s' for unstable loop height h."""

    def __init__(self, p: int, n: int, h: int, algebra: CoopAlgebra | None = None,
                 vE: CoeffElement | None = None):
        if p % 2 == 0:
            raise ValueError("the splitting needs an odd prime")
        P = period(p, n)
        if not 1 <= h < P:
            raise ValueError(f"height must satisfy 1 <= h < {P}, got {h}")
        if algebra is None:
            algebra = CoopAlgebra(kn_ring(p, n), p, "unstable")
        if vE is None:
            vE = algebra.ring.gen(f"v{n}")
        if not vE.is_unit():
            raise ValueError(f"{vE} is not invertible")
        self.p, self.n, self.h, self.P = p, n, h, P
        self.algebra = algebra
        self.vE = vE
        vinv = vE.inverse()
        self.element = _scaled(algebra.e(P) * algebra.bracket(n), vinv)
        self.companion = _scaled(algebra.e(P - h) * algebra.bracket(n), vinv)

    def height_relations(self) -> RelationSet:
        alg = self.algebra
        rel = RelationSet(alg)
        rel.add(alg.e(self.P + self.h) * alg.bracket(self.n), _scaled(alg.e(self.h), self.vE))
        return rel

    def shifted(self, t: int) -> CoopElement:
        """s_t with e^t s_t = s^i, hence = s after rewriting (t >= 0)."""
        alg = self.algebra
        i = max(1, -(-t // self.P))
        return _scaled(alg.e(self.P * i - t) * alg.bracket(self.n, i), self.vE ** (-i))

    def __repr__(self):
        return f"IdempotentS(p={self.p}, n={self.n}, h={self.h}, s={self.element})"


@dataclass
class PropertyCheck:
    name: str
    ok: bool
    difference: str

    def to_json(self):
        return {"property": self.name, "ok": self.ok, "difference": self.difference}


@dataclass
class IdempotentReport:
    checks: list[PropertyCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.ok]

    def to_json(self):
        return {"ok": self.ok, "checks": [c.to_json() for c in self.checks]}


def verify_idempotent(S: IdempotentS, rel: RelationSet) -> IdempotentReport:
    alg = S.algebra
    s, s2 = S.element, S.companion
    eh = alg.e(S.h)
    cases = [
        ("s*s = s", s * s, s),
        ("e*s = s*e", alg.e() * s, s * alg.e()),
        ("e^h*s = e^h", eh * s, eh),
        ("e^h*s' = s", eh * s2, s),
    ]
    checks = []
    for name, a, b in cases:
        d = rel.reduce(a - b)
        checks.append(PropertyCheck(name, d.is_zero(), str(d)))
    return IdempotentReport(checks)


def split_project(x: CoopElement, S: IdempotentS, rel: RelationSet) -> tuple[CoopElement, CoopElement]:
    """(s x, x - s x), both in normal form."""
    sx = rel.reduce(S.element * x)
    return sx, rel.reduce(x - sx)


# the colimit ---------------------------------------------------------------

def label(x: CoopElement):
    """Common space label of the terms of x, or None for zero."""
    labels = {key_bidegree(x.algebra, k)[1] for k in x.terms}
    if not labels:
        return None
    if len(labels) > 1:
        raise ValueError(f"{x} has mixed space labels {sorted(labels)}")
    return labels.pop()


def suspension_sign(k: int, t: int) -> int:
    """Sign of the t-fold suspension starting at level k: prod (-1)^m, m = k..k+t-1."""
    total = sum(range(k, k + t))
    return -1 if total % 2 else 1


@dataclass(frozen=True)
class StableClass:
    level: int
    rep: CoopElement

    def __post_init__(self):
        lab = label(self.rep)
        if lab is not None and lab != self.level:
            raise ValueError(f"representative has label {lab}, not level {self.level}")

    def suspend(self, t: int = 1) -> "StableClass":
        if t < 0:
            raise ValueError("suspension only goes up")
        alg = self.rep.algebra
        y = alg.e(t) * self.rep
        if suspension_sign(self.level, t) < 0:
            y = -y
        return StableClass(self.level + t, y)

    def __mul__(self, other: "StableClass") -> "StableClass":
        K, L = self.level, other.level
        y = self.rep * other.rep
        return StableClass(K + L, -y if (K * L) % 2 else y)


def stable_equal(a: StableClass, b: StableClass, rel: RelationSet, h: int) -> bool:
    """Compare after suspending both to a common level plus h."""
    top = max(a.level, b.level) + h
    x = a.suspend(top - a.level).rep
    y = b.suspend(top - b.level).rep
    return rel.reduce(x - y).is_zero()


@dataclass
class Destabilised:
    level: int
    element: CoopElement
    preimage: CoopElement
    preimage_level: int

    def to_json(self):
        return {"level": self.level, "element": str(self.element),
                "preimage": str(self.preimage), "preimage_level": self.preimage_level}


def destabilise(c: StableClass, k: int, S: IdempotentS, rel: RelationSet) -> Destabilised:
    """delta: a representative at level k lying in the s-ideal.

    Also returns z at level k - h with Sigma^h z equal to the result.
    """
    t = c.level - k
    if t > 0:
        y = S.element * S.shifted(t) * c.rep
        if suspension_sign(k, t) < 0:
            y = -y
    else:
        y = S.element * c.suspend(-t).rep
    y = rel.reduce(y)
    z = S.companion * y
    if suspension_sign(k - S.h, S.h) < 0:
        z = -z
    z = rel.reduce(z)
    return Destabilised(k, y, z, k - S.h)


def sigma_power(z: CoopElement, level: int, t: int, rel: RelationSet) -> CoopElement:
    return rel.reduce(StableClass(level, z).suspend(t).rep)


# delooping -----------------------------------------------------------------

@dataclass(frozen=True)
class DeloopComponent:
    k: int
    l: int
    m: int
    i: int
    j: int
    sign: int
    h: int
    P: int

    def constraints(self) -> dict:
        return {
            "period": self.m - self.k == self.P * self.i - self.j,
            "j>=h": self.j >= self.h,
            "i>=0": self.i >= 0,
            "sign": self.sign == (-1 if (self.l * self.m) % 2 else 1),
        }

    def valid(self) -> bool:
        return all(self.constraints().values())

    def to_json(self):
        return {"i": self.i, "j": self.j, "sign": self.sign}


def minimal_pair(k: int, m: int, h: int, P: int) -> tuple[int, int]:
    lo = max(h, k - m)
    j = lo + (k - m - lo) % P
    return (m - k + j) // P, j


def deloop_component(k: int, l: int, m: int, h: int, p: int, n: int) -> DeloopComponent:
    """Least j >= max(h, k - m) with j = k - m mod P; then i = (m - k + j)/P."""
    if h < 1:
        raise ValueError("h must be positive")
    P = period(p, n)
    i, j = minimal_pair(k, m, h, P)
    sign = -1 if (l * m) % 2 else 1
    return DeloopComponent(k, l, m, i, j, sign, h, P)


def valid_pairs(k: int, m: int, h: int, P: int, count: int) -> list[tuple[int, int]]:
    """The first ``count`` admissible (i, j) for the given degrees."""
    i, j = minimal_pair(k, m, h, P)
    out = []
    while len(out) < count:
        out.append(((m - k + j) // P, j))
        j += P
    return out


def canonical_pair(i: int, j: int, h: int, P: int) -> tuple[int, int]:
    """Undo (i, j) -> (i + 1, j + P) as far as i >= 0 and j >= h allow."""
    if i < 0 or j < h:
        raise ValueError(f"({i}, {j}) is not admissible for h = {h}")
    q = min(i, (j - h) // P)
    return i - q, j - q * P


def deloop_normalize(a, b, h: int, P: int) -> bool:
    """Equality of two (i, j) choices, or of two components, up to periodicity."""
    if isinstance(a, DeloopComponent) and isinstance(b, DeloopComponent):
        if (a.k, a.l, a.m) != (b.k, b.l, b.m):
            raise ValueError("components of different degrees")
        a, b = (a.i, a.j), (b.i, b.j)
    return canonical_pair(*a, h, P) == canonical_pair(*b, h, P)


@dataclass(frozen=True)
class Op:
    """A symbolic unstable operation r_k : src^k -> dst^(k + l)."""

    name: str
    k: int
    l: int
    src: str
    dst: str
    stable_family: bool = False
    based: bool = True

    def based_part(self) -> "Op":
        """r - r(0): looping needs a based map."""
        return self if self.based else replace(self, name=f"({self.name})_0", based=True)


def identity_op(theory: str, k: int) -> Op:
    return Op("1", k, 0, theory, theory, stable_family=True)


def compose_ops(outer: Op, inner: Op) -> Op:
    if outer.src != inner.dst or outer.k != inner.k + inner.l:
        raise ValueError(f"cannot compose {outer} after {inner}")
    if outer.name == "1":
        return inner
    if inner.name == "1":
        return outer
    return Op(f"{outer.name}.{inner.name}", inner.k, outer.l + inner.l, inner.src, outer.dst,
              outer.stable_family and inner.stable_family)


@dataclass(frozen=True)
class Scalar:
    theory: str
    exp: int


@dataclass(frozen=True)
class Looped:
    op: Op
    j: int


@dataclass(frozen=True)
class Component:
    op: Op
    m: int


def component_word(op: Op, m: int, h: int, P: int, pair=None) -> tuple:
    """(v_dst)^(-i) (Omega^j r_k) (v_src)^i as a word of factors."""
    op = op.based_part()
    if pair is None:
        pair = minimal_pair(op.k, m, h, P)
    i, j = pair
    if m - op.k != P * i - j or i < 0 or j < h:
        raise ValueError(f"({i}, {j}) is not admissible for k={op.k}, m={m}")
    return (Scalar(op.dst, -i), Looped(op, j), Scalar(op.src, i))


@dataclass
class WordRewrite:
    word: tuple
    steps: list = field(default_factory=list)


def rewrite_word(word: tuple, P: int) -> WordRewrite:
    """Normal form of a word of scalars, looped operations and components."""
    steps = []
    w = list(word)
    changed = True
    while changed:
        changed = False
        # merge scalars and drop trivial ones
        out = []
        for f in w:
            if isinstance(f, Scalar) and f.exp == 0:
                changed = True
                steps.append("drop v^0")
                continue
            if isinstance(f, Looped) and f.op.name == "1":
                changed = True
                steps.append("absorb identity")
                continue
            if out and isinstance(f, Scalar) and isinstance(out[-1], Scalar) and out[-1].theory == f.theory:
                out[-1] = Scalar(f.theory, out[-1].exp + f.exp)
                changed = True
                steps.append("merge scalars")
                continue
            out.append(f)
        w = out
        for t in range(len(w) - 2):
            a, s, b = w[t], w[t + 1], w[t + 2]
            if isinstance(a, Looped) and isinstance(s, Scalar) and isinstance(b, Looped):
                if s.exp > 0:
                    w[t + 1:t + 3] = [Scalar(s.theory, s.exp - 1), Looped(b.op, b.j + P), Scalar(b.op.src, 1)]
                else:
                    w[t:t + 2] = [Scalar(a.op.dst, -1), Looped(a.op, a.j + P), Scalar(s.theory, s.exp + 1)]
                changed = True
                steps.append("periodicity")
                break
        if changed:
            continue
        for t in range(len(w) - 1):
            a, b = w[t], w[t + 1]
            if isinstance(a, Looped) and isinstance(b, Looped) and a.j == b.j:
                w[t:t + 2] = [Looped(compose_ops(a.op, b.op), a.j)]
                changed = True
                steps.append("merge loops")
                break
        if changed:
            continue
        for t, f in enumerate(w):
            if isinstance(f, Looped) and f.op.stable_family:
                w[t] = Component(f.op, f.op.k - f.j)
                changed = True
                steps.append("loop stable family")
                break
        if changed:
            continue
        for t in range(len(w) - 2):
            a, r, b = w[t], w[t + 1], w[t + 2]
            if (isinstance(a, Scalar) and isinstance(r, Component) and isinstance(b, Scalar)
                    and a.exp == -b.exp and a.theory == r.op.dst and b.theory == r.op.src):
                w[t:t + 3] = [Component(r.op, r.m + P * b.exp)]
                changed = True
                steps.append("periodic family")
                break
    return WordRewrite(tuple(w), steps)


def _canonical_word(word: tuple, h: int, P: int) -> tuple:
    """Pull a single (v^-i, Omega^j r, v^i) pattern back to its minimal pair."""
    if len(word) == 3 and isinstance(word[1], Looped):
        a, r, b = word
        if isinstance(a, Scalar) and isinstance(b, Scalar) and a.exp == -b.exp:
            i, j = canonical_pair(b.exp, r.j, h, P)
            return (Scalar(a.theory, -i), Looped(r.op, j), Scalar(b.theory, i))
    if len(word) == 1 and isinstance(word[0], Looped) and word[0].j >= h:
        return (Scalar(word[0].op.dst, 0), word[0], Scalar(word[0].op.src, 0))
    return word


@dataclass
class ComposeVerdict:
    equal: bool
    lhs: tuple
    rhs: tuple
    steps: list

    def to_json(self):
        return {"equal": self.equal, "lhs": _word_str(self.lhs), "rhs": _word_str(self.rhs),
                "steps": self.steps}


def _factor_str(f) -> str:
    if isinstance(f, Scalar):
        return f"v_{f.theory}^{f.exp}"
    if isinstance(f, Looped):
        return f"Omega^{f.j}({f.op.name})_{f.op.k}"
    return f"{f.op.name}_{f.m}"


def _word_str(w) -> str:
    return " ".join(_factor_str(f) for f in w)


def deloop_compose(outer: Op, inner: Op, m: int, h: int, P: int,
                   outer_pair=None, inner_pair=None) -> ComposeVerdict:
    """Check (Delta sigma)_{m + l} (Delta rho)_m = (Delta (sigma rho))_m.

    Works with the maps themselves, so the view sign (-1)^(lm) plays no part.
    """
    comp = compose_ops(outer, inner)
    word = (component_word(outer, m + inner.l, h, P, outer_pair)
            + component_word(inner, m, h, P, inner_pair))
    left = rewrite_word(word, P)
    right = rewrite_word(component_word(comp, m, h, P), P)
    lw = _canonical_word(_drop_zero(left.word), h, P)
    rw = _canonical_word(_drop_zero(right.word), h, P)
    return ComposeVerdict(lw == rw, lw, rw, left.steps)


def _drop_zero(w: tuple) -> tuple:
    return tuple(f for f in w if not (isinstance(f, Scalar) and f.exp == 0))


def restrict_deloop(family: Op, m: int, h: int, P: int, pair=None) -> tuple:
    """Delta of a stable family, read at component m; reduces to r_m."""
    if not family.stable_family:
        raise ValueError("restriction-then-deloop needs a stable family")
    return rewrite_word(component_word(family, m, h, P, pair), P).word


def view_convert(view_from: str, view_to: str, k: int, l: int, tag: str = "restriction") -> int:
    """Sign relating the same map across the operation, class and functional views."""
    for v in (view_from, view_to):
        if v not in VIEWS:
            raise ValueError(f"unknown view {v!r}; expected one of {VIEWS}")
    if tag not in VIEW_TAGS:
        raise ValueError(f"unknown tag {tag!r}; expected one of {VIEW_TAGS}")
    if view_from == view_to:
        return 1
    if tag == "loop":
        return -1
    a, b = sorted((VIEWS.index(view_from), VIEWS.index(view_to)))
    e = 0
    if a == 0:
        e += k * l
    if b == 2 and a <= 1:
        e += k
    return -1 if e % 2 else 1
