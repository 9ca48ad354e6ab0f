"""Hochschild 1- and 2-chains over a group ring and their class-graded homology.

Chains carry the (possibly phi-twisted) bimodule structure g.m = phi(g) m,
m.g = m g.  The boundary is

    d(m (x) s1 (x) s2) = m s1 (x) s2 - m (x) s1 s2 + phi(s2) m (x) s1
    d(m (x) s)         = m s - phi(s) m

and the complex splits over (semi)conjugacy classes: the class of a basis
term is the class of the ordered product of its words.

The homology of the class-gamma summand in degree one is the abelianization
of the (semi)centralizer of gamma; extract_class_value realizes that
isomorphism.  The convention is combinatorial: a term a (x) b is an edge of
the conjugation groupoid from the vertex phi(b) a to the vertex a b, and with
a witness t_x conjugating each vertex x onto the canonical representative the
edge contributes the centralizer element

    t_{ab}^{-1} . b^{-1} . t_{phi(b) a}.

Edge elements compose along paths, which makes the extracted value of a cycle
independent of the witness choices; the cycle precondition is checked, and
gauge invariance is what the tests exercise in place of an explicit spanning
tree.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .groupring import INT, RAT, GroupRingElement, RingError
from .groups import (
    ClassIndex,
    GroupError,
    GroupSpec,
    Word,
    centralizer_exponent,
    class_of,
    witness_to_canonical,
    word_key,
)
from .novikov import NovikovSeries, PrecisionError
from .rationals import NEG_INF, dmax, dmin, is_neg_inf


class ChainError(ValueError):
    pass


def _merge(acc: dict, key, value) -> None:
    s = acc.get(key, 0) + value
    if s:
        acc[key] = s
    else:
        acc.pop(key, None)


@dataclass
class _ChainBase:
    spec: GroupSpec
    twisted: bool
    coeffs: str
    terms: dict  # word tuple -> nonzero coefficient

    ARITY = None

    def __post_init__(self):
        if self.twisted and self.spec.phi is None:
            # twisted with absent phi is just the identity twist
            object.__setattr__(self, "twisted", False)

    @classmethod
    def zero(cls, spec: GroupSpec, twisted: bool = False, coeffs: str = INT):
        return cls(spec, twisted, coeffs, {})

    @classmethod
    def from_terms(cls, spec: GroupSpec, pairs, twisted: bool = False, coeffs: str = INT):
        acc = {}
        for words, coef in pairs:
            words = tuple(spec.reduce(w) for w in words)
            if len(words) != cls.ARITY:
                raise ChainError(f"expected {cls.ARITY} tensor factors")
            if coeffs == RAT:
                coef = Fraction(coef)
            _merge(acc, words, coef)
        return cls(spec, twisted, coeffs, acc)

    def _like(self, other):
        if self.spec != other.spec or self.twisted != other.twisted:
            raise ChainError("chains over different specs or twists")
        return RAT if RAT in (self.coeffs, other.coeffs) else INT

    def __add__(self, other):
        coeffs = self._like(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            _merge(acc, k, v)
        return type(self)(self.spec, self.twisted, coeffs, acc)

    def __neg__(self):
        return type(self)(
            self.spec, self.twisted, self.coeffs, {k: -v for k, v in self.terms.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if c == 0:
            return type(self)(self.spec, self.twisted, self.coeffs, {})
        coeffs = RAT if isinstance(c, Fraction) else self.coeffs
        return type(self)(
            self.spec, self.twisted, coeffs, {k: v * c for k, v in self.terms.items()}
        )

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, type(self))
            and self.spec == other.spec
            and self.twisted == other.twisted
            and self.terms == other.terms
        )

    def rationalize(self):
        return type(self)(
            self.spec,
            self.twisted,
            RAT,
            {k: Fraction(v) for k, v in self.terms.items()},
        )

    def term_product(self, words) -> Word:
        prod = words[0]
        for w in words[1:]:
            prod = self.spec.mul(prod, w)
        return prod

    def term_class(self, words) -> ClassIndex:
        return class_of(self.spec, self.term_product(words), self.twisted)

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda kv: tuple(word_key(self.spec.kind, w) for w in kv[0]),
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for words, c in self.sorted_terms():
            tens = "(x)".join(self.spec.word_str(w) for w in words)
            parts.append(f"{c}*[{tens}]")
        return " + ".join(parts).replace("+ -", "- ")


class Chain1(_ChainBase):
    ARITY = 2


class Chain2(_ChainBase):
    ARITY = 3


def _act_left(spec: GroupSpec, twisted: bool, s: Word, m: Word) -> Word:
    """Bimodule left action s.m: phi(s) m when twisted, s m otherwise."""
    return spec.mul(spec.apply_phi(s) if twisted else s, m)


def boundary2(c: Chain2) -> Chain1:
    spec = c.spec
    acc = {}
    for (m, s1, s2), n in c.terms.items():
        _merge(acc, (spec.mul(m, s1), s2), n)
        _merge(acc, (m, spec.mul(s1, s2)), -n)
        _merge(acc, (_act_left(spec, c.twisted, s2, m), s1), n)
    return Chain1(spec, c.twisted, c.coeffs, acc)


def boundary1(c: Chain1) -> GroupRingElement:
    spec = c.spec
    acc = {}
    for (m, s), n in c.terms.items():
        _merge(acc, spec.mul(m, s), n)
        _merge(acc, _act_left(spec, c.twisted, s, m), -n)
    return GroupRingElement(spec, c.coeffs, acc)


def project_class(c, cls: ClassIndex):
    """Keep exactly the terms whose ordered product lies in cls."""
    expected = "semiconjugacy" if (c.twisted and not c.spec.phi_is_identity()) else "conjugacy"
    if cls.twist != expected:
        raise ChainError(f"class twist {cls.twist} does not match chain twist")
    kept = {k: v for k, v in c.terms.items() if c.term_class(k) == cls}
    return type(c)(c.spec, c.twisted, c.coeffs, kept)


def split_classes(c) -> dict:
    """Split a chain into its class-homogeneous components."""
    out = {}
    for words, coef in c.terms.items():
        cls = c.term_class(words)
        out.setdefault(cls, {})[words] = coef
    return {
        cls: type(c)(c.spec, c.twisted, c.coeffs, terms) for cls, terms in out.items()
    }


def trace_tensor(a_rows, b_rows, twisted: bool = False) -> Chain1:
    """trace(A (x) B) = sum_{l,m} A_{lm} (x) B_{ml} for an n x k matrix A and
    a k x n matrix B over the group ring, expanded bilinearly over terms."""
    n = len(a_rows)
    k = len(a_rows[0]) if n else 0
    if len(b_rows) != k or (k and any(len(row) != n for row in b_rows)):
        raise ChainError(f"shape mismatch: {n}x{k} against {len(b_rows)}x?")
    spec = a_rows[0][0].spec
    coeffs = INT
    acc = {}
    for l in range(n):
        for m in range(k):
            a = a_rows[l][m]
            b = b_rows[m][l]
            if a.coeffs == RAT or b.coeffs == RAT:
                coeffs = RAT
            if a.spec != spec or b.spec != spec:
                raise ChainError("matrix entries over different specs")
            for w1, c1 in a.terms.items():
                for w2, c2 in b.terms.items():
                    _merge(acc, (w1, w2), c1 * c2)
    return Chain1(spec, twisted, coeffs, acc)


# -- homology-class extraction -------------------------------------------


@dataclass
class HH1ClassValue:
    """Extracted degree-one homology class at one class index: an integer in
    the cyclic centralizer <root>, or an integer/rational vector."""

    cls: ClassIndex
    value: object

    def is_zero(self) -> bool:
        if isinstance(self.value, tuple):
            return all(v == 0 for v in self.value)
        return self.value == 0

    def __repr__(self):
        return f"HH1ClassValue({self.cls!r}, {self.value})"


def _zero_value(cls: ClassIndex):
    spec = cls.spec
    if cls.twist == "semiconjugacy" and spec.kind == "free_abelian" and not spec.phi_is_identity():
        from .groups import _semiconjugacy_data

        return (0,) * len(_semiconjugacy_data(spec)["kernel_indices"])
    if spec.kind == "free_abelian":
        return (0,) * spec.rank
    if cls.is_identity:
        return (0,) * spec.rank
    return 0


def _add_value(acc, inc, coef):
    if isinstance(acc, tuple):
        return tuple(a + coef * b for a, b in zip(acc, inc))
    return acc + coef * inc


def extract_class_value(z: Chain1, cls: ClassIndex, gauge: Optional[dict] = None) -> HH1ClassValue:
    """Extract the class-gamma homology value of a 1-cycle.

    The projection of z onto cls must be a cycle (checked); the class backend
    must have exact canonical forms.  gauge optionally multiplies each vertex
    witness by a centralizer element -- the freedom a different spanning tree
    or basepoint witness would introduce -- and cycles extract to the same
    value under any gauge.
    """
    spec = z.spec
    proj = project_class(z, cls)
    if not boundary1(proj).is_zero():
        raise ChainError(f"projection onto {cls!r} is not a cycle")
    total = _zero_value(cls)
    witnesses: dict = {}

    def witness(x: Word) -> Word:
        t = witnesses.get(x)
        if t is None:
            t = witness_to_canonical(cls, x)
            if gauge and x in gauge:
                t = spec.mul(t, gauge[x])
            witnesses[x] = t
        return t

    for (a, b), coef in proj.terms.items():
        prod = spec.mul(a, b)
        rot = _act_left(spec, proj.twisted, b, a)
        t_prod = witness(prod)
        t_rot = witness(rot)
        edge = spec.mul(spec.mul(spec.inv(t_prod), spec.inv(b)), t_rot)
        total = _add_value(total, centralizer_exponent(cls, edge), coef)
    return HH1ClassValue(cls, total)


# -- completed class-indexed chains ----------------------------------------


@dataclass
class CompletedChain1:
    """Class-indexed 1-chains, exact above the cutoff.

    per_class maps ClassIndex -> homogeneous Chain1; classes at xi <= cutoff
    are absent by fiat (they are unknown), classes above it are complete.
    """

    spec: GroupSpec
    twisted: bool
    per_class: dict
    cutoff: object

    def __post_init__(self):
        for cls, chain in self.per_class.items():
            if not is_neg_inf(self.cutoff) and cls.xi <= self.cutoff:
                raise ChainError(f"class {cls!r} stored at or below the cutoff")
            if chain.is_zero():
                raise ChainError("empty per-class chain stored")

    @classmethod
    def zero(cls, spec: GroupSpec, cutoff, twisted: bool = False) -> "CompletedChain1":
        return cls(spec, twisted, {}, cutoff)

    @classmethod
    def from_chain(cls, chain: Chain1, cutoff) -> "CompletedChain1":
        per_class = {
            c: sub
            for c, sub in split_classes(chain).items()
            if is_neg_inf(cutoff) or c.xi > cutoff
        }
        return cls(chain.spec, chain.twisted, per_class, cutoff)

    def add(self, other: "CompletedChain1") -> "CompletedChain1":
        if self.spec != other.spec or self.twisted != other.twisted:
            raise ChainError("completed chains over different specs or twists")
        cutoff = dmax(self.cutoff, other.cutoff)
        acc = dict(self.per_class)
        for c, chain in other.per_class.items():
            merged = acc[c] + chain if c in acc else chain
            if merged.is_zero():
                acc.pop(c, None)
            else:
                acc[c] = merged
        acc = {c: ch for c, ch in acc.items() if is_neg_inf(cutoff) or c.xi > cutoff}
        return CompletedChain1(self.spec, self.twisted, acc, cutoff)

    def scale(self, k) -> "CompletedChain1":
        if k == 0:
            return CompletedChain1(self.spec, self.twisted, {}, self.cutoff)
        return CompletedChain1(
            self.spec,
            self.twisted,
            {c: ch.scale(k) for c, ch in self.per_class.items()},
            self.cutoff,
        )

    def rationalize(self) -> "CompletedChain1":
        return CompletedChain1(
            self.spec,
            self.twisted,
            {c: ch.rationalize() for c, ch in self.per_class.items()},
            self.cutoff,
        )

    def classes(self):
        return sorted(self.per_class, key=lambda c: c.sort_key())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CompletedChain1)
            and self.spec == other.spec
            and self.twisted == other.twisted
            and self.cutoff == other.cutoff
            and self.per_class == other.per_class
        )


@dataclass
class EtaSeries:
    """Class-indexed exact rationals with a completeness cutoff."""

    spec: GroupSpec
    values: dict  # ClassIndex -> nonzero Fraction
    cutoff: object

    @classmethod
    def zero(cls, spec: GroupSpec, cutoff) -> "EtaSeries":
        return cls(spec, {}, cutoff)

    def add(self, other: "EtaSeries") -> "EtaSeries":
        cutoff = dmax(self.cutoff, other.cutoff)
        acc = dict(self.values)
        for c, v in other.values.items():
            _merge(acc, c, v)
        acc = {c: v for c, v in acc.items() if is_neg_inf(cutoff) or c.xi > cutoff}
        return EtaSeries(self.spec, acc, cutoff)

    def classes(self):
        return sorted(self.values, key=lambda c: c.sort_key())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EtaSeries)
            and self.spec == other.spec
            and self.cutoff == other.cutoff
            and self.values == other.values
        )


def l_hom(c: CompletedChain1) -> EtaSeries:
    """The degree-weight homomorphism: a class gamma with xi(gamma) < 0 picks
    up sum_terms coef * xi(g2) / xi(gamma); classes at xi >= 0 map to zero.
    Kills boundaries, since xi is additive over the three boundary terms."""
    values = {}
    for cls, chain in c.per_class.items():
        if cls.xi >= 0:
            continue
        total = Fraction(0)
        for (_, g2), coef in chain.terms.items():
            total += Fraction(coef) * c.spec.xi_value(g2) / cls.xi
        if total:
            values[cls] = total
    return EtaSeries(c.spec, values, c.cutoff)


def e_hom(cls: ClassIndex, q) -> Chain1:
    """q . (1 (x) canonical): the section of l on classes, rational
    coefficients allowed."""
    spec = cls.spec
    q = Fraction(q)
    if q == 0:
        return Chain1.zero(spec, coeffs=RAT)
    return Chain1(spec, False, RAT, {(spec.identity(), cls.canonical): q})


def rationalize(c):
    """Coefficient embedding Z -> Q for chains or completed chains."""
    return c.rationalize()


def theta_expand(l1: NovikovSeries, l2: NovikovSeries, cls: ClassIndex, level=None) -> Chain1:
    """Class-gamma part of a tensor of Novikov series.

    Both factors are truncated at L = M + T + xi(gamma) with T = min of the
    factor degrees and M any negative rational with degree(l1) + degree(l2)
    <= -M (default: the largest valid choice); the projection of the
    truncated tensor onto the class does not depend on the choice of M.  The
    factors must be exact at and above L, otherwise the class is below the
    provable-exactness level and the call fails.
    """
    if l1.spec != l2.spec:
        raise ChainError("tensor factors over different specs")
    spec = l1.spec
    if (l1.body.is_zero() and l1.is_exact()) or (l2.body.is_zero() and l2.is_exact()):
        return Chain1.zero(spec, coeffs=l1.body.coeffs)
    d1, d2 = l1.reach(), l2.reach()
    if is_neg_inf(d1) or is_neg_inf(d2):
        raise PrecisionError("truncated zero factor: class below provable exactness")
    t = dmin(l1.degree(), l2.degree())
    if is_neg_inf(t):
        raise PrecisionError("truncated zero factor: class below provable exactness")
    m_max = min(Fraction(-1), -(d1 + d2))
    m = m_max if level is None else Fraction(level)
    if m > m_max and m >= 0:
        raise PrecisionError(f"invalid truncation level {m}: must be negative")
    if m > -(d1 + d2):
        raise PrecisionError(f"invalid truncation level {m}: must be <= {-(d1 + d2)}")
    bar_level = m + t + cls.xi
    if not (l1.cutoff < bar_level and l2.cutoff < bar_level):
        raise PrecisionError(
            f"class at xi {cls.xi} is below the provable-exactness level "
            f"of the factors (needs exactness at xi >= {bar_level})"
        )
    coeffs = RAT if RAT in (l1.body.coeffs, l2.body.coeffs) else INT
    acc = {}
    for w1, c1 in l1.body.terms.items():
        if spec.xi_value(w1) < bar_level:
            continue
        for w2, c2 in l2.body.terms.items():
            if spec.xi_value(w2) < bar_level:
                continue
            if class_of(spec, spec.mul(w1, w2), False) == cls:
                _merge(acc, (w1, w2), c1 * c2)
    return Chain1(spec, False, coeffs, acc)
