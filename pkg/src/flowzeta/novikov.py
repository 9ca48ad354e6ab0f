"""Truncated elements of the Novikov completion of a graded group ring.

A NovikovSeries is a finite body (GroupRingElement) plus an exact rational
cutoff c: the element is known exactly on xi > c and unknown at or below c
(strictly -- a term at xi == c is already unknown).  Cutoff NEG_INF means the
element is an exact polynomial.  Every operation propagates the sharpest
cutoff derivable from the operands' metadata, so an output cutoff is always a
proven bound on where the result is exact.

On top of the scalar arithmetic: geometric series (the inverse of 1 - a for
degree(a) < 0), matrices, truncated exponentials and determinants of I - B on
the commutative side, and the representatives of torsion units 1 - a / I - A.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groupring import INT, RAT, GroupRingElement, RingError
from .groups import FREE_ABELIAN, GroupSpec
from .rationals import NEG_INF, dmax, dsum, is_neg_inf


class PrecisionError(ValueError):
    pass


@dataclass
class NovikovSeries:
    body: GroupRingElement
    cutoff: object = NEG_INF  # Fraction or NEG_INF

    def __post_init__(self):
        if not is_neg_inf(self.cutoff):
            if not isinstance(self.cutoff, Fraction):
                raise PrecisionError("cutoff must be an exact Fraction or NEG_INF")
            for w in self.body.terms:
                if self.body.spec.xi_value(w) <= self.cutoff:
                    raise PrecisionError(
                        f"term {w} at xi <= cutoff {self.cutoff} stored in body"
                    )

    # -- constructors -----------------------------------------------------

    @classmethod
    def make(cls, body: GroupRingElement, cutoff) -> "NovikovSeries":
        """Truncate body below the cutoff and wrap."""
        return cls(body.truncated(cutoff), cutoff)

    @classmethod
    def exact(cls, body: GroupRingElement) -> "NovikovSeries":
        return cls(body, NEG_INF)

    @classmethod
    def zero(cls, spec: GroupSpec, coeffs: str = INT) -> "NovikovSeries":
        return cls(GroupRingElement.zero(spec, coeffs), NEG_INF)

    @classmethod
    def one(cls, spec: GroupSpec, coeffs: str = INT, cutoff=NEG_INF) -> "NovikovSeries":
        return cls.make(GroupRingElement.one(spec, coeffs), cutoff)

    # -- metadata ----------------------------------------------------------

    @property
    def spec(self) -> GroupSpec:
        return self.body.spec

    def degree(self):
        return self.body.degree()

    def reach(self):
        """Upper bound on the degree of the true (untruncated) element."""
        return dmax(self.body.degree(), self.cutoff)

    def is_exact(self) -> bool:
        return is_neg_inf(self.cutoff)

    def truncate(self, cutoff) -> "NovikovSeries":
        return NovikovSeries.make(self.body, dmax(self.cutoff, cutoff))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NovikovSeries)
            and self.body == other.body
            and self.cutoff == other.cutoff
        )

    def __repr__(self):
        cut = "exact" if self.is_exact() else f"cutoff {self.cutoff}"
        return f"({self.body!r} | {cut})"

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "NovikovSeries") -> "NovikovSeries":
        return NovikovSeries.make(self.body + other.body, dmax(self.cutoff, other.cutoff))

    def __neg__(self) -> "NovikovSeries":
        return NovikovSeries(-self.body, self.cutoff)

    def __sub__(self, other: "NovikovSeries") -> "NovikovSeries":
        return self + (-other)

    def scale(self, c) -> "NovikovSeries":
        if c == 0:
            return NovikovSeries(GroupRingElement.zero(self.spec, self.body.coeffs), self.cutoff)
        return NovikovSeries(self.body.scale(c), self.cutoff)

    def __mul__(self, other: "NovikovSeries") -> "NovikovSeries":
        """Truncated convolution.

        Unknown terms of one factor (at or below its cutoff) multiplied by
        the other factor's true content (bounded by its reach) stay at or
        below cutoff_a + reach_b resp. cutoff_b + reach_a; above the max of
        those levels the product is exact.
        """
        if self.spec != other.spec:
            raise RingError("series over different specs")
        cutoff = dmax(
            dsum(self.cutoff, other.reach()), dsum(other.cutoff, self.reach())
        )
        return NovikovSeries.make(self.body * other.body, cutoff)


def geometric_series(a: NovikovSeries, target: Fraction) -> NovikovSeries:
    """sum_{k>=0} a^k truncated at target: the inverse of 1 - a above target.

    Requires degree(a) < 0 and target < 0; stops at the first K with
    K * degree(a) <= target, past which every power is invisible.
    """
    if not isinstance(target, Fraction) or target >= 0:
        raise PrecisionError("geometric series needs a negative rational target")
    d = a.degree()
    if is_neg_inf(d):
        return NovikovSeries.one(a.spec, a.body.coeffs, cutoff=a.cutoff)
    if d >= 0:
        raise PrecisionError(f"geometric series needs degree < 0, got {d}")
    cutoff = dmax(target, a.cutoff)
    total = GroupRingElement.one(a.spec, a.body.coeffs)
    power = total
    k = 1
    while k * d > target:
        power = (power * a.body).truncated(target)
        total = total + power
        k += 1
    return NovikovSeries.make(total, cutoff)


def exp_series(a: NovikovSeries, target: Fraction) -> NovikovSeries:
    """Truncated exponential sum_m a^m / m! for rational a with degree < 0."""
    if a.body.coeffs != RAT:
        raise PrecisionError("exp needs rational coefficients")
    if not isinstance(target, Fraction) or target >= 0:
        raise PrecisionError("exp needs a negative rational target")
    d = a.degree()
    if is_neg_inf(d):
        return NovikovSeries.one(a.spec, RAT, cutoff=a.cutoff)
    if d >= 0:
        raise PrecisionError(f"exp needs degree < 0, got {d}")
    cutoff = dmax(target, a.cutoff)
    total = GroupRingElement.one(a.spec, RAT)
    power = total
    factorial = 1
    m = 1
    while m * d > target:
        power = (power * a.body).truncated(target)
        factorial *= m
        total = total + power.scale(Fraction(1, factorial))
        m += 1
    return NovikovSeries.make(total, cutoff)


# -- matrices ---------------------------------------------------------------


@dataclass
class NovikovMatrix:
    spec: GroupSpec
    entries: tuple  # tuple of row tuples of NovikovSeries

    def __post_init__(self):
        rows = len(self.entries)
        if rows == 0:
            raise RingError("empty matrix")
        cols = len(self.entries[0])
        if any(len(row) != cols for row in self.entries):
            raise RingError("ragged matrix")
        for row in self.entries:
            for e in row:
                if e.spec != self.spec:
                    raise RingError("matrix entry over a different spec")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @classmethod
    def from_ring_rows(cls, rows, cutoff=NEG_INF) -> "NovikovMatrix":
        spec = rows[0][0].spec
        return cls(
            spec,
            tuple(tuple(NovikovSeries.make(e, cutoff) for e in row) for row in rows),
        )

    @classmethod
    def identity(cls, spec: GroupSpec, n: int, coeffs: str = INT) -> "NovikovMatrix":
        return cls(
            spec,
            tuple(
                tuple(
                    NovikovSeries.one(spec, coeffs) if i == j else NovikovSeries.zero(spec, coeffs)
                    for j in range(n)
                )
                for i in range(n)
            ),
        )

    def ring_rows(self):
        return [[e.body for e in row] for row in self.entries]

    def degree(self):
        return dmax(*(e.degree() for row in self.entries for e in row))

    def cutoff(self):
        return dmax(*(e.cutoff for row in self.entries for e in row))

    def __add__(self, other: "NovikovMatrix") -> "NovikovMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise RingError("shape mismatch")
        return NovikovMatrix(
            self.spec,
            tuple(
                tuple(a + b for a, b in zip(r1, r2))
                for r1, r2 in zip(self.entries, other.entries)
            ),
        )

    def scale(self, c) -> "NovikovMatrix":
        return NovikovMatrix(
            self.spec, tuple(tuple(e.scale(c) for e in row) for row in self.entries)
        )

    def mul(self, other: "NovikovMatrix", target=NEG_INF) -> "NovikovMatrix":
        if self.cols != other.rows:
            raise RingError("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = None
                for l in range(self.cols):
                    term = self.entries[i][l] * other.entries[l][j]
                    acc = term if acc is None else acc + term
                row.append(acc.truncate(target))
            out.append(tuple(row))
        return NovikovMatrix(self.spec, tuple(out))

    def trace(self) -> NovikovSeries:
        if self.rows != self.cols:
            raise RingError("trace needs a square matrix")
        acc = self.entries[0][0]
        for i in range(1, self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NovikovMatrix)
            and self.spec == other.spec
            and self.entries == other.entries
        )


def matrix_geometric(a: NovikovMatrix, target: Fraction) -> NovikovMatrix:
    """sum_{k>=0} A^k truncated entrywise at target (inverse of I - A)."""
    if a.rows != a.cols:
        raise PrecisionError("matrix geometric series needs a square matrix")
    if not isinstance(target, Fraction) or target >= 0:
        raise PrecisionError("matrix geometric series needs a negative rational target")
    d = a.degree()
    coeffs = a.entries[0][0].body.coeffs
    if is_neg_inf(d):
        ident = NovikovMatrix.identity(a.spec, a.rows, coeffs)
        cut = a.cutoff()
        return NovikovMatrix(
            a.spec, tuple(tuple(e.truncate(cut) for e in row) for row in ident.entries)
        ) if not is_neg_inf(cut) else ident
    if d >= 0:
        raise PrecisionError(f"matrix geometric series needs degree < 0, got {d}")
    cutoff = dmax(target, a.cutoff())
    total = NovikovMatrix.identity(a.spec, a.rows, coeffs)
    power = total
    k = 1
    while k * d > target:
        power = power.mul(a, target)
        total = total + power
        k += 1
    return NovikovMatrix(
        a.spec, tuple(tuple(e.truncate(cutoff) for e in row) for row in total.entries)
    )


def log_det_one_minus(b: NovikovMatrix, target: Fraction) -> NovikovSeries:
    """det(I - B) over a commutative (free-abelian) rational spec, computed
    as exp(-sum_k trace(B^k)/k) truncated at target.

    Determinants only make sense on the abelianized side, so a
    noncommutative spec is rejected.
    """
    if b.spec.kind != FREE_ABELIAN:
        raise PrecisionError("determinants need a commutative (free_abelian) spec")
    if b.rows != b.cols:
        raise PrecisionError("determinant needs a square matrix")
    d = b.degree()
    coeffs = RAT
    if is_neg_inf(d):
        return NovikovSeries.one(b.spec, coeffs, cutoff=b.cutoff())
    if d >= 0:
        raise PrecisionError(f"det(I - B) needs degree(B) < 0, got {d}")
    log_sum = NovikovSeries.zero(b.spec, coeffs)
    power = NovikovMatrix.identity(b.spec, b.rows, coeffs)
    rational = NovikovMatrix(
        b.spec,
        tuple(
            tuple(NovikovSeries(e.body.rationalize(), e.cutoff) for e in row)
            for row in b.entries
        ),
    )
    k = 1
    while k * d > target:
        power = power.mul(rational, target)
        log_sum = log_sum + power.trace().scale(Fraction(-1, k))
        k += 1
    cutoff = dmax(target, b.cutoff())
    return exp_series(log_sum.truncate(target), target).truncate(cutoff)


# -- torsion units ------------------------------------------------------------


@dataclass
class TorsionUnit:
    """A unit of the completion in the subgroup W: 1 - a (scalar, stored as a
    1 x 1 matrix) or I - A, with degree of the subtracted part strictly
    negative.  sign_exponent i records the (-1)^i weight the unit carries in
    an alternating torsion sum."""

    a: NovikovMatrix
    sign_exponent: int = 0

    def __post_init__(self):
        d = self.a.degree()
        if not is_neg_inf(d) and d >= 0:
            raise PrecisionError(
                f"torsion unit needs degree < 0 for the subtracted part, got {d}"
            )

    @classmethod
    def from_unit(cls, a: NovikovSeries, sign_exponent: int = 0) -> "TorsionUnit":
        return cls(NovikovMatrix(a.spec, ((a,),)), sign_exponent)

    @classmethod
    def from_matrix(cls, a: NovikovMatrix, sign_exponent: int = 0) -> "TorsionUnit":
        if a.rows != a.cols:
            raise PrecisionError("I - A needs a square A")
        return cls(a, sign_exponent)

    @classmethod
    def from_ring_rows(cls, rows, sign_exponent: int = 0) -> "TorsionUnit":
        return cls.from_matrix(NovikovMatrix.from_ring_rows(rows), sign_exponent)
