"""Sparse exact arithmetic in ZG and QG with the xi-degree.

Norms on the group-ring side are handled additively as degrees: degree(a) is
the maximum xi over the support of a (NEG_INF for 0), so the multiplicative
norm of the completion is exp(degree) and "norm < 1" reads "degree < 0".
Everything stays an exact int or Fraction.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import FREE_ABELIAN, GroupSpec, Word, word_key
from .rationals import NEG_INF

INT = "Z"
RAT = "Q"


class RingError(ValueError):
    pass


def _coerce(coeffs: str, value):
    return Fraction(value) if coeffs == RAT else value


@dataclass
class GroupRingElement:
    """Finite formal sum over a GroupSpec; terms maps Word -> nonzero coef.

    Instances are treated as immutable values; no method mutates terms.
    """

    spec: GroupSpec
    coeffs: str
    terms: dict

    def __post_init__(self):
        if self.coeffs not in (INT, RAT):
            raise RingError(f"coefficient ring must be {INT!r} or {RAT!r}")
        if self.coeffs == INT and any(
            not isinstance(c, int) for c in self.terms.values()
        ):
            raise RingError("integer ring element with non-integer coefficient")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, spec: GroupSpec, coeffs: str = INT) -> "GroupRingElement":
        return cls(spec, coeffs, {})

    @classmethod
    def one(cls, spec: GroupSpec, coeffs: str = INT) -> "GroupRingElement":
        return cls(spec, coeffs, {spec.identity(): _coerce(coeffs, 1)})

    @classmethod
    def monomial(cls, spec: GroupSpec, word: Word, coef=1, coeffs: str = INT):
        word = spec.reduce(word)
        if coef == 0:
            return cls.zero(spec, coeffs)
        return cls(spec, coeffs, {word: _coerce(coeffs, coef)})

    @classmethod
    def from_terms(cls, spec: GroupSpec, pairs, coeffs: str = INT):
        acc = {}
        for word, coef in pairs:
            word = spec.reduce(word)
            c = acc.get(word, 0) + _coerce(coeffs, coef)
            if c:
                acc[word] = c
            else:
                acc.pop(word, None)
        return cls(spec, coeffs, acc)

    # -- ring structure --------------------------------------------------

    def _like(self, other: "GroupRingElement") -> str:
        if self.spec != other.spec:
            raise RingError("group ring elements over different specs")
        return RAT if RAT in (self.coeffs, other.coeffs) else INT

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        coeffs = self._like(other)
        acc = dict(self.terms)
        for w, c in other.terms.items():
            s = acc.get(w, 0) + c
            if s:
                acc[w] = s
            else:
                acc.pop(w, None)
        return GroupRingElement(self.spec, coeffs, acc)

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(
            self.spec, self.coeffs, {w: -c for w, c in self.terms.items()}
        )

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        coeffs = self._like(other)
        acc = {}
        mul = self.spec.mul
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = mul(w1, w2)
                s = acc.get(w, 0) + c1 * c2
                if s:
                    acc[w] = s
                else:
                    acc.pop(w, None)
        return GroupRingElement(self.spec, coeffs, acc)

    def scale(self, c) -> "GroupRingElement":
        if c == 0:
            return GroupRingElement.zero(self.spec, self.coeffs)
        coeffs = RAT if isinstance(c, Fraction) else self.coeffs
        return GroupRingElement(
            self.spec, coeffs, {w: _coerce(coeffs, v) * c for w, v in self.terms.items()}
        )

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupRingElement)
            and self.spec == other.spec
            and self.terms == other.terms
        )

    # -- grading ----------------------------------------------------------

    def degree(self):
        """max xi over the support; NEG_INF for 0."""
        if not self.terms:
            return NEG_INF
        return max(self.spec.xi_value(w) for w in self.terms)

    def truncated(self, cutoff) -> "GroupRingElement":
        """Drop all terms with xi <= cutoff (strict survival)."""
        if cutoff == NEG_INF:
            return self
        kept = {
            w: c for w, c in self.terms.items() if self.spec.xi_value(w) > cutoff
        }
        return GroupRingElement(self.spec, self.coeffs, kept)

    # -- homomorphisms ----------------------------------------------------

    def augment(self) -> "GroupRingElement":
        """Push down to the abelianization (identity on abelian specs)."""
        if self.spec.kind == FREE_ABELIAN and self.spec.phi is None:
            return self
        ab = self.spec.abelianized()
        acc = {}
        for w, c in self.terms.items():
            v = self.spec.exponent_vector(w)
            s = acc.get(v, 0) + c
            if s:
                acc[v] = s
            else:
                acc.pop(v, None)
        return GroupRingElement(ab, self.coeffs, acc)

    def rationalize(self) -> "GroupRingElement":
        return GroupRingElement(
            self.spec, RAT, {w: Fraction(c) for w, c in self.terms.items()}
        )

    # -- presentation ------------------------------------------------------

    def sorted_terms(self):
        """Deterministic term order: descending xi, then word order."""
        return sorted(
            self.terms.items(),
            key=lambda wc: (-self.spec.xi_value(wc[0]), word_key(self.spec.kind, wc[0])),
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            ws = self.spec.word_str(w)
            if c == 1:
                parts.append(ws)
            elif c == -1:
                parts.append(f"-{ws}")
            else:
                parts.append(f"{c}*{ws}")
        return " + ".join(parts).replace("+ -", "- ")
