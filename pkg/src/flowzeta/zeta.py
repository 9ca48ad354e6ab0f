"""Zeta functions of gradient-flow data, two independent ways.

The Dennis trace of a torsion unit tau(I - A) expands as

    DT(tau(I - A)) = -[ sum_{k>=1} trace(A^{k-1} (x) A) ],

a completed class-indexed 1-chain; the torsion of a Novikov complex is the
alternating sum over dimension indices i of tau(I - A_i) with weight
(-1)^{i+1}, and its Dennis trace is assembled per class here.  The same
object is built directly from closed-orbit records as a Nielsen-Fuller
series: an orbit with primitive class representative w, multiplicity m and
Lefschetz sign eps contributes eps . w^{m-1} (x) w at the class of w^m.  The
eta function is the l-image of either (equivalently sum eps/m per class), the
commutative zeta is exp of the abelianized eta and doubles as a determinant
of the abelianized torsion, and the rational zeta is the coefficient
extension checked against e(eta).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .groupring import INT, RAT, GroupRingElement
from .groups import ClassIndex, GroupSpec, Word, class_of
from .hochschild import (
    Chain1,
    ChainError,
    CompletedChain1,
    EtaSeries,
    HH1ClassValue,
    boundary1,
    e_hom,
    extract_class_value,
    l_hom,
    project_class,
    split_classes,
    trace_tensor,
)
from .novikov import (
    NovikovMatrix,
    NovikovSeries,
    PrecisionError,
    TorsionUnit,
    geometric_series,
    log_det_one_minus,
)
from .rationals import NEG_INF, is_neg_inf


class ZetaError(ValueError):
    pass


@dataclass
class OrbitRecord:
    """One closed-orbit record: primitive class representative, multiplicity
    and Lefschetz sign.  Closed orbits of a downward gradient flow sit at
    strictly negative xi."""

    primitive: Word
    multiplicity: int
    sign: int

    def validate(self, spec: GroupSpec) -> None:
        if self.multiplicity < 1:
            raise ZetaError(f"multiplicity must be >= 1, got {self.multiplicity}")
        if self.sign not in (1, -1):
            raise ZetaError(f"sign must be +1 or -1, got {self.sign}")
        if spec.xi_value(self.primitive) >= 0:
            raise ZetaError(
                f"orbit {self.primitive} has xi >= 0; closed orbits need xi < 0"
            )


@dataclass
class ZetaResult:
    """A completed class-indexed chain plus the per-class homology values."""

    chain: CompletedChain1
    classes: list  # [HH1ClassValue] in deterministic order
    cutoff: object

    @property
    def spec(self) -> GroupSpec:
        return self.chain.spec

    def extractions(self) -> dict:
        """ClassIndex -> nonzero extracted value."""
        return {v.cls: v.value for v in self.classes if not v.is_zero()}

    def is_zero(self) -> bool:
        return not self.extractions()


def _extract_all(chain: CompletedChain1) -> list:
    return [
        extract_class_value(chain.per_class[cls], cls) for cls in chain.classes()
    ]


def _result(chain: CompletedChain1) -> ZetaResult:
    return ZetaResult(chain, _extract_all(chain), chain.cutoff)


def _require_negative_cutoff(cutoff) -> None:
    if is_neg_inf(cutoff):
        raise ZetaError("a finite negative cutoff is required")
    if not isinstance(cutoff, Fraction) or cutoff >= 0:
        raise ZetaError(f"cutoff must be a negative rational, got {cutoff}")


def dennis_trace_unit(unit: TorsionUnit, cutoff: Fraction) -> ZetaResult:
    """Dennis trace of tau(I - A) as a completed chain with extractions.

    The k-th layer trace(A^{k-1} (x) A) has every term at xi <= k*degree(A),
    so the sum runs while k*degree(A) > cutoff; the whole chain is weighted
    by -1 (the trace of the inverse expands through the geometric series) and
    by (-1)^sign_exponent.
    """
    _require_negative_cutoff(cutoff)
    a = unit.a
    spec = a.spec
    if not spec.phi_is_identity():
        raise ZetaError("the zeta pipeline needs an identity-phi backend")
    deg = a.degree()
    sign = -1 if unit.sign_exponent % 2 == 0 else 1
    if is_neg_inf(deg):
        return _result(CompletedChain1.zero(spec, cutoff))
    acc: dict = {}
    a_rows = a.ring_rows()
    power = NovikovMatrix.identity(spec, a.rows, a.entries[0][0].body.coeffs)
    k = 1
    while k * deg > cutoff:
        layer = trace_tensor(power.ring_rows(), a_rows)
        for cls, sub in split_classes(layer).items():
            if cls.xi > cutoff:
                merged = acc[cls] + sub if cls in acc else sub
                if merged.is_zero():
                    acc.pop(cls, None)
                else:
                    acc[cls] = merged
        power = power.mul(a, cutoff - deg)
        k += 1
    acc = {cls: ch.scale(sign) for cls, ch in acc.items()}
    return _result(CompletedChain1(spec, False, acc, cutoff))


MatrixRows = Sequence[Sequence[GroupRingElement]]


def zeta_from_matrices(
    spec: GroupSpec, mats: Sequence, cutoff: Fraction
) -> ZetaResult:
    """Dennis trace of the alternating torsion sum
    sum_i (-1)^{i+1} tau(I - A_i) for square A_i over ZG with degree < 0."""
    _require_negative_cutoff(cutoff)
    total = CompletedChain1.zero(spec, cutoff)
    for dim, rows in mats:
        unit = TorsionUnit.from_ring_rows(rows, sign_exponent=dim + 1)
        if unit.a.spec != spec:
            raise ZetaError("matrix over a different spec")
        total = total.add(dennis_trace_unit(unit, cutoff).chain)
    return _result(total)


def nielsen_fuller(
    spec: GroupSpec, orbits: Iterable[OrbitRecord], cutoff: Fraction
) -> ZetaResult:
    """sum over records of sign . w^{m-1} (x) w at the class of w^m, for the
    classes above the cutoff.  Completeness of the record list above the
    cutoff is the caller's responsibility."""
    _require_negative_cutoff(cutoff)
    acc: dict = {}
    for rec in orbits:
        rec.validate(spec)
        w = spec.reduce(rec.primitive)
        total = spec.power(w, rec.multiplicity)
        cls = class_of(spec, total, False)
        if cls.xi <= cutoff:
            continue
        term = Chain1(
            spec, False, INT, {(spec.power(w, rec.multiplicity - 1), w): rec.sign}
        )
        merged = acc[cls] + term if cls in acc else term
        if merged.is_zero():
            acc.pop(cls, None)
        else:
            acc[cls] = merged
    return _result(CompletedChain1(spec, False, acc, cutoff))


def eta(z: ZetaResult) -> EtaSeries:
    """eta = l(zeta): the class-indexed rational map."""
    return l_hom(z.chain)


def eta_from_orbits(
    spec: GroupSpec, orbits: Iterable[OrbitRecord], cutoff: Fraction
) -> EtaSeries:
    """eta directly from records: sum sign/multiplicity per class."""
    _require_negative_cutoff(cutoff)
    values: dict = {}
    for rec in orbits:
        rec.validate(spec)
        w = spec.reduce(rec.primitive)
        cls = class_of(spec, spec.power(w, rec.multiplicity), False)
        if cls.xi <= cutoff:
            continue
        v = values.get(cls, Fraction(0)) + Fraction(rec.sign, rec.multiplicity)
        if v:
            values[cls] = v
        else:
            values.pop(cls, None)
    return EtaSeries(spec, values, cutoff)


def commutative_zeta(z: ZetaResult, cutoff: Fraction) -> NovikovSeries:
    """exp of the abelianized eta: a unit 1 + (negative-degree terms) in the
    rational abelianized completion."""
    _require_negative_cutoff(cutoff)
    series = eta(z)
    spec = z.spec
    ab = spec.abelianized()
    terms: dict = {}
    for cls, q in series.values.items():
        v = spec.exponent_vector(cls.canonical)
        s = terms.get(v, Fraction(0)) + q
        if s:
            terms[v] = s
        else:
            terms.pop(v, None)
    body = GroupRingElement(ab, RAT, terms)
    if not body.is_zero() and body.degree() >= 0:
        raise ZetaError("abelianized eta has nonnegative degree")
    arg = NovikovSeries.make(body, series.cutoff)
    from .novikov import exp_series

    return exp_series(arg, cutoff)


def commutative_zeta_determinant(
    spec: GroupSpec, mats: Sequence, cutoff: Fraction
) -> NovikovSeries:
    """Determinant route: prod_i det(I - eps(A_i))^{(-1)^{i+1}} over the
    abelianized rational completion."""
    _require_negative_cutoff(cutoff)
    ab = spec.abelianized()
    total = NovikovSeries.one(ab, RAT)
    for dim, rows in mats:
        b_rows = [[e.augment().rationalize() for e in row] for row in rows]
        b = NovikovMatrix.from_ring_rows(b_rows)
        det = log_det_one_minus(b, cutoff)
        if (dim + 1) % 2 == 0:
            total = (total * det).truncate(cutoff)
        else:
            defect = NovikovSeries.one(ab, RAT) - det
            inv = geometric_series(defect, cutoff)
            total = (total * inv).truncate(cutoff)
    return total


def rational_zeta(z: ZetaResult) -> ZetaResult:
    """Coefficient extension Z -> Q of the whole result."""
    chain = z.chain.rationalize()
    return _result(chain)


def verify_rational_zeta(z: ZetaResult) -> list:
    """Check zeta_Q = e(eta) per class; returns the mismatching classes."""
    zq = rational_zeta(z)
    series = eta(z)
    bad = []
    for cls in zq.chain.classes():
        lhs = extract_class_value(zq.chain.per_class[cls], cls)
        rhs = extract_class_value(e_hom(cls, series.values.get(cls, Fraction(0))), cls)
        if lhs.value != rhs.value:
            bad.append(cls)
    for cls, q in series.values.items():
        if cls not in zq.chain.per_class and q != 0:
            bad.append(cls)
    return bad


def one_parameter_trace(
    spec: GroupSpec,
    d_rows: MatrixRows,
    bnd_rows: MatrixRows,
    excluded: Iterable[ClassIndex],
    twisted: Optional[bool] = None,
) -> ZetaResult:
    """One-parameter trace of homotopy data: trace(D (x) bnd), with the
    classes of the end fixed points removed by the caller.

    Away from the excluded classes every class projection must be a cycle; a
    retained class failing the check signals a wrong excluded set.  The
    result is a finite exact chain (cutoff NEG_INF).
    """
    if twisted is None:
        twisted = spec.phi is not None and not spec.phi_is_identity()
    chain = trace_tensor(d_rows, bnd_rows, twisted=twisted)
    excluded = set(excluded)
    per_class = {}
    for cls, sub in split_classes(chain).items():
        if cls in excluded:
            continue
        if not boundary1(sub).is_zero():
            raise ZetaError(
                f"class {cls!r} fails the cycle check: the excluded set "
                "does not cover all end fixed points"
            )
        per_class[cls] = sub
    completed = CompletedChain1(spec, chain.twisted, per_class, NEG_INF)
    return _result(completed)


def enumerate_orbits_monomial(
    spec: GroupSpec, rows: MatrixRows, cutoff: Fraction
) -> list:
    """Closed-orbit records of the suspension-style flow of a monomial matrix.

    Every entry must be 0 or a single term c.g with xi(g) < 0; |c| > 1 is
    modeled as |c| parallel edges sharing the sign of c.  Primitive cyclic
    edge sequences are enumerated up to rotation; a record is emitted per
    (primitive cycle, repetition count m) with total xi above the cutoff,
    with primitive element the ordered label product over one period and
    sign the product of entry signs over one period raised to m.
    """
    _require_negative_cutoff(cutoff)
    n = len(rows)
    edges = []  # (source, target, word, sign, edge_id)
    for i in range(n):
        if len(rows[i]) != n:
            raise ZetaError("monomial orbit enumeration needs a square matrix")
        for j in range(n):
            e = rows[i][j]
            if e.is_zero():
                continue
            if len(e.terms) != 1:
                raise ZetaError(f"entry ({i},{j}) is not monomial: {e!r}")
            (word, coef), = e.terms.items()
            if spec.xi_value(word) >= 0:
                raise ZetaError(f"entry ({i},{j}) has xi >= 0")
            if not isinstance(coef, int):
                raise ZetaError(f"entry ({i},{j}) has non-integer coefficient")
            sgn = 1 if coef > 0 else -1
            for copy in range(abs(coef)):
                edges.append((i, j, word, sgn, len(edges)))

    xi_max = max((spec.xi_value(e[2]) for e in edges), default=None)
    if xi_max is None:
        return []
    # a cycle of length L has xi <= L * xi_max < 0, so survival bounds L
    max_len = 0
    while (max_len + 1) * xi_max > cutoff:
        max_len += 1

    out_edges: dict = {}
    for e in edges:
        out_edges.setdefault(e[0], []).append(e)

    primitive: dict = {}  # canonical rotation of edge-id tuple -> edge path

    def canonical_rotation(ids: tuple) -> tuple:
        rots = [ids[i:] + ids[:i] for i in range(len(ids))]
        return min(rots)

    def dfs(start: int, node: int, path: list, xi_total):
        # rooted walks through nodes >= start; cyclic duplicates are removed
        # by the canonical-rotation key
        for e in out_edges.get(node, []):
            if e[1] < start:
                continue
            nxt_xi = xi_total + spec.xi_value(e[2])
            if nxt_xi <= cutoff or len(path) + 1 > max_len:
                continue
            path.append(e)
            if e[1] == start:
                ids = tuple(p[4] for p in path)
                if _primitive_period(ids) == len(ids):
                    primitive.setdefault(canonical_rotation(ids), list(path))
            if len(path) < max_len:
                dfs(start, e[1], path, nxt_xi)
            path.pop()

    for start in range(n):
        dfs(start, start, [], Fraction(0))

    records = []
    for path in primitive.values():
        word = spec.identity()
        sgn = 1
        for e in path:
            word = spec.mul(word, e[2])
            sgn *= e[3]
        xi_w = spec.xi_value(word)
        m = 1
        while m * xi_w > cutoff:
            records.append(OrbitRecord(word, m, sgn**m))
            m += 1
    records.sort(
        key=lambda r: (
            -(r.multiplicity * spec.xi_value(r.primitive)),
            spec.xi_value(r.primitive),
            r.primitive,
            r.multiplicity,
        )
    )
    return records


def _primitive_period(ids: tuple) -> int:
    n = len(ids)
    for d in range(1, n + 1):
        if n % d == 0 and ids == ids[:d] * (n // d):
            return d
    return n


def compare_extractions(left: ZetaResult, right: ZetaResult) -> list:
    """Classes whose extracted values differ (zeros treated as absent)."""
    lmap = left.extractions()
    rmap = right.extractions()
    bad = []
    for cls in set(lmap) | set(rmap):
        if lmap.get(cls) != rmap.get(cls):
            bad.append(cls)
    bad.sort(key=lambda c: c.sort_key())
    return bad


def verify_main_equality(
    spec: GroupSpec, mats: Sequence, orbits: Sequence, cutoff: Fraction
):
    """Run both pipelines and compare per-class extractions.

    Returns (matrix_result, orbit_result, mismatched_classes).
    """
    zm = zeta_from_matrices(spec, mats, cutoff)
    zo = nielsen_fuller(spec, orbits, cutoff)
    return zm, zo, compare_extractions(zm, zo)
