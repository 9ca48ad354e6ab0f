"""Group backends: free groups F_n and free-abelian groups Z^n.

A group element ("word") is a plain tuple of ints.  For a free group it is a
freely reduced sequence of signed generator indices (+i is the i-th
generator, -i its inverse, 1-based); for a free-abelian group it is an
exponent vector of fixed length n, the zero vector being the identity.

A GroupSpec fixes the backend, the rational grading xi on the generators and
an optional endomorphism phi, and owns all word arithmetic.  On top of that
this module computes canonical forms of conjugacy classes (and, for abelian
backends, of phi-twisted semiconjugacy classes via Smith normal form),
together with conjugator witnesses and centralizer data.  Those canonical
forms are what indexes every class-graded object downstream.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Sequence

FREE = "free"
FREE_ABELIAN = "free_abelian"

CONJUGACY = "conjugacy"
SEMICONJUGACY = "semiconjugacy"

Word = tuple  # tuple[int, ...]


class GroupError(ValueError):
    pass


def _letter_key(letter: int) -> tuple:
    # fixed order on signed generators: x1 < x1^-1 < x2 < x2^-1 < ...
    return (abs(letter), 0 if letter > 0 else 1)


def word_key(kind: str, w: Word) -> tuple:
    """Deterministic total order on words (used for canonical rotations,
    term ordering and report ordering)."""
    if kind == FREE:
        return (len(w), tuple(_letter_key(l) for l in w))
    return tuple(w)


@dataclass(frozen=True)
class GroupSpec:
    """A supported group with grading and optional endomorphism.

    kind  -- "free" or "free_abelian"
    rank  -- number of generators, >= 1
    xi    -- exact rational grading value of each generator
    phi   -- optional endomorphism: for free_abelian an n x n integer matrix
             (tuple of row tuples, acting on column vectors); for free a
             tuple of reduced generator-image words.  None means identity.
    """

    kind: str
    rank: int
    xi: tuple
    phi: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in (FREE, FREE_ABELIAN):
            raise GroupError(f"unknown group kind {self.kind!r}")
        if not isinstance(self.rank, int) or self.rank < 1:
            raise GroupError("rank must be a positive integer")
        if len(self.xi) != self.rank:
            raise GroupError("xi must have one value per generator")
        if not all(isinstance(x, Fraction) for x in self.xi):
            raise GroupError("xi values must be exact Fractions")
        if self.phi is not None:
            if self.kind == FREE_ABELIAN:
                if len(self.phi) != self.rank or any(
                    len(row) != self.rank for row in self.phi
                ):
                    raise GroupError("phi must be an n x n integer matrix")
            else:
                if len(self.phi) != self.rank:
                    raise GroupError("phi needs one image word per generator")
                for img in self.phi:
                    if img != self._reduce_free(img):
                        raise GroupError(f"phi image {img} is not reduced")

    # -- basic word arithmetic ------------------------------------------

    def identity(self) -> Word:
        return () if self.kind == FREE else (0,) * self.rank

    def is_identity_word(self, w: Word) -> bool:
        return w == self.identity()

    def _check_free_letters(self, letters) -> None:
        for l in letters:
            if not isinstance(l, int) or l == 0 or abs(l) > self.rank:
                raise GroupError(f"generator index {l} out of range")

    def _reduce_free(self, letters) -> Word:
        out = []
        for l in letters:
            if out and out[-1] == -l:
                out.pop()
            else:
                out.append(l)
        return tuple(out)

    def reduce(self, raw: Sequence[int]) -> Word:
        """Free reduction (free) / validated exponent vector (free_abelian)."""
        if self.kind == FREE:
            self._check_free_letters(raw)
            return self._reduce_free(raw)
        vec = tuple(raw)
        if len(vec) != self.rank or not all(isinstance(c, int) for c in vec):
            raise GroupError(f"expected an integer vector of length {self.rank}")
        return vec

    def mul(self, u: Word, v: Word) -> Word:
        if self.kind == FREE:
            return self._reduce_free(u + v)
        return tuple(a + b for a, b in zip(u, v))

    def inv(self, w: Word) -> Word:
        if self.kind == FREE:
            return tuple(-l for l in reversed(w))
        return tuple(-c for c in w)

    def power(self, w: Word, k: int) -> Word:
        if self.kind == FREE_ABELIAN:
            return tuple(k * c for c in w)
        if k < 0:
            return self.power(self.inv(w), -k)
        out = self.identity()
        for _ in range(k):
            out = self.mul(out, w)
        return out

    def xi_value(self, w: Word) -> Fraction:
        """xi is a homomorphism to the rationals: sum of xi over exponents."""
        if self.kind == FREE:
            total = Fraction(0)
            for l in w:
                total += self.xi[abs(l) - 1] if l > 0 else -self.xi[-l - 1]
            return total
        return sum((c * x for c, x in zip(w, self.xi)), Fraction(0))

    def exponent_vector(self, w: Word) -> tuple:
        """Image of w in the abelianization Z^n."""
        if self.kind == FREE_ABELIAN:
            return w
        vec = [0] * self.rank
        for l in w:
            vec[abs(l) - 1] += 1 if l > 0 else -1
        return tuple(vec)

    def word_str(self, w: Word) -> str:
        if self.is_identity_word(w):
            return "1"
        if self.kind == FREE:
            parts = []
            for l in w:
                parts.append(f"x{l}" if l > 0 else f"x{-l}^-1")
            return " ".join(parts)
        names = ["t", "s", "u"] if self.rank <= 3 else [f"g{i+1}" for i in range(self.rank)]
        parts = []
        for name, c in zip(names, w):
            if c == 0:
                continue
            parts.append(name if c == 1 else f"{name}^{c}")
        return " ".join(parts)

    # -- endomorphism ---------------------------------------------------

    def phi_is_identity(self) -> bool:
        if self.phi is None:
            return True
        if self.kind == FREE_ABELIAN:
            return all(
                self.phi[i][j] == (1 if i == j else 0)
                for i in range(self.rank)
                for j in range(self.rank)
            )
        return all(self.phi[i] == (i + 1,) for i in range(self.rank))

    def apply_phi(self, w: Word) -> Word:
        if self.phi is None:
            return w
        if self.kind == FREE_ABELIAN:
            return tuple(
                sum(self.phi[i][j] * w[j] for j in range(self.rank))
                for i in range(self.rank)
            )
        out: Word = ()
        for l in w:
            img = self.phi[abs(l) - 1]
            out = self.mul(out, img if l > 0 else self.inv(img))
        return out

    def phi_abelianized(self) -> tuple:
        """Matrix of the abelianized endomorphism (columns = images)."""
        if self.phi is None:
            return tuple(
                tuple(1 if i == j else 0 for j in range(self.rank))
                for i in range(self.rank)
            )
        if self.kind == FREE_ABELIAN:
            return self.phi
        cols = [self.exponent_vector(img) for img in self.phi]
        return tuple(tuple(cols[j][i] for j in range(self.rank)) for i in range(self.rank))

    def abelianized(self) -> "GroupSpec":
        """Target of the augmentation: Z^n with the same grading."""
        if self.kind == FREE_ABELIAN and self.phi is None:
            return self
        phi = None if self.phi is None else self.phi_abelianized()
        return GroupSpec(FREE_ABELIAN, self.rank, self.xi, phi)


# -- Smith normal form ---------------------------------------------------


def _mat_identity(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [
        [sum(a[i][l] * b[l][j] for l in range(k)) for j in range(m)] for i in range(n)
    ]


def mat_vec(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


def smith_normal_form(x):
    """Diagonalize an integer matrix: U * X * V = D.

    Returns (U, Uinv, V, Vinv, D) as tuples of row tuples; U and V are
    unimodular, D is diagonal with nonnegative entries d_1 | d_2 | ...
    """
    n = len(x)
    m = len(x[0]) if n else 0
    a = [list(row) for row in x]
    u, uinv = _mat_identity(n), _mat_identity(n)
    v, vinv = _mat_identity(m), _mat_identity(m)

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for r in range(n):
            uinv[r][i], uinv[r][j] = uinv[r][j], uinv[r][i]

    def col_swap(i, j):
        for r in range(n):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(m):
            v[r][i], v[r][j] = v[r][j], v[r][i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def row_addmul(i, j, q):
        # row_i += q * row_j
        for c in range(m):
            a[i][c] += q * a[j][c]
        for c in range(n):
            u[i][c] += q * u[j][c]
        for r in range(n):
            uinv[r][j] -= q * uinv[r][i]

    def col_addmul(i, j, q):
        # col_i += q * col_j
        for r in range(n):
            a[r][i] += q * a[r][j]
        for r in range(m):
            v[r][i] += q * v[r][j]
        for c in range(m):
            vinv[j][c] -= q * vinv[i][c]

    def row_negate(i):
        for c in range(m):
            a[i][c] = -a[i][c]
        for c in range(n):
            u[i][c] = -u[i][c]
        for r in range(n):
            uinv[r][i] = -uinv[r][i]

    rank = min(n, m)
    for p in range(rank):
        while True:
            # pick smallest nonzero |entry| in the remaining block as pivot
            pivot = None
            for i in range(p, n):
                for j in range(p, m):
                    if a[i][j] != 0 and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            if pivot != (p, p):
                if pivot[0] != p:
                    row_swap(p, pivot[0])
                if pivot[1] != p:
                    col_swap(p, pivot[1])
            dirty = False
            for i in range(p + 1, n):
                q = a[i][p] // a[p][p]
                if q:
                    row_addmul(i, p, -q)
                if a[i][p]:
                    dirty = True
            for j in range(p + 1, m):
                q = a[p][j] // a[p][p]
                if q:
                    col_addmul(j, p, -q)
                if a[p][j]:
                    dirty = True
            if dirty:
                continue
            # enforce divisibility of the rest of the block by the pivot
            offender = None
            for i in range(p + 1, n):
                for j in range(p + 1, m):
                    if a[i][j] % a[p][p] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_addmul(p, offender, 1)
        if p < n and a[p][p] < 0:
            row_negate(p)

    return (
        tuple(map(tuple, u)),
        tuple(map(tuple, uinv)),
        tuple(map(tuple, v)),
        tuple(map(tuple, vinv)),
        tuple(map(tuple, a)),
    )


@lru_cache(maxsize=None)
def _semiconjugacy_data(spec: GroupSpec):
    """SNF data of I - M for an abelian twisted backend.

    Semiconjugacy w1 ~ w2 on Z^n with endomorphism matrix M means
    w1 - w2 in Im(I - M); the semicentralizer of every element is
    ker(I - M).
    """
    if spec.kind != FREE_ABELIAN or spec.phi is None:
        raise GroupError("semiconjugacy data needs a free_abelian spec with phi")
    n = spec.rank
    m = spec.phi
    x = tuple(
        tuple((1 if i == j else 0) - m[i][j] for j in range(n)) for i in range(n)
    )
    u, uinv, v, vinv, d = smith_normal_form(x)
    diag = tuple(d[i][i] for i in range(n))
    kernel_indices = tuple(i for i in range(n) if diag[i] == 0)
    kernel_basis = tuple(
        tuple(v[r][i] for r in range(n)) for i in kernel_indices
    )
    return {
        "matrix": x,
        "U": u,
        "Uinv": uinv,
        "V": v,
        "Vinv": vinv,
        "diag": diag,
        "kernel_indices": kernel_indices,
        "kernel_basis": kernel_basis,
    }


# -- class indices --------------------------------------------------------


@dataclass(frozen=True)
class ClassIndex:
    """Canonical form of a (semi)conjugacy class.

    Equality and hashing use (spec, twist, canonical) only: two words produce
    equal ClassIndex values exactly when they are (semi)conjugate.  The
    witness conjugates the word this index was computed from to the canonical
    representative; root/root_power describe the centralizer of a nontrivial
    free-group class (canonical = root ** root_power, root not a proper
    power).
    """

    spec: GroupSpec
    twist: str
    canonical: Word
    xi: Fraction = field(compare=False)
    witness: Word = field(compare=False)
    root: Optional[Word] = field(default=None, compare=False)
    root_power: Optional[int] = field(default=None, compare=False)

    @property
    def is_identity(self) -> bool:
        return self.spec.is_identity_word(self.canonical)

    def sort_key(self) -> tuple:
        return (-self.xi, word_key(self.spec.kind, self.canonical))

    def __repr__(self):
        return f"ClassIndex({self.twist}:{self.spec.word_str(self.canonical)})"


def _cyclic_reduce(w: Word):
    """w = prefix . core . prefix^{-1} with core cyclically reduced."""
    left, right = 0, len(w)
    while right - left >= 2 and w[left] == -w[right - 1]:
        left += 1
        right -= 1
    return w[left:right], w[:left]


def _minimal_rotation(core: Word) -> int:
    if not core:
        return 0
    keys = [tuple(_letter_key(l) for l in core[i:] + core[:i]) for i in range(len(core))]
    return min(range(len(core)), key=lambda i: keys[i])


def _primitive_root(core: Word):
    """Smallest period block: core = root ** k with root not a proper power."""
    n = len(core)
    for d in range(1, n + 1):
        if n % d == 0 and core == core[:d] * (n // d):
            return core[:d], n // d
    raise AssertionError("unreachable: every word is a power of itself")


def conjugacy_class(spec: GroupSpec, w: Word) -> ClassIndex:
    """Canonical form of the conjugacy class of w (identity phi only).

    Free groups: cyclically reduce, then take the lexicographically least
    cyclic rotation under the fixed generator order; the witness q satisfies
    w = q . canonical . q^{-1}.  Free-abelian groups: classes are singletons.
    """
    if not spec.phi_is_identity():
        raise GroupError("conjugacy classes require the identity endomorphism")
    if spec.kind == FREE_ABELIAN:
        return ClassIndex(
            spec, CONJUGACY, w, xi=spec.xi_value(w), witness=spec.identity()
        )
    core, prefix = _cyclic_reduce(w)
    i = _minimal_rotation(core)
    canonical = core[i:] + core[:i]
    witness = spec.mul(prefix, core[:i])
    if canonical:
        root, k = _primitive_root(canonical)
    else:
        root, k = None, None
    return ClassIndex(
        spec,
        CONJUGACY,
        canonical,
        xi=spec.xi_value(canonical),
        witness=witness,
        root=root,
        root_power=k,
    )


def semiconjugacy_class(spec: GroupSpec, w: Word) -> ClassIndex:
    """Canonical form of the phi-twisted semiconjugacy class of w.

    Only free-abelian backends have exact canonical forms: classes are the
    cosets of Im(I - M) and the canonical representative is computed through
    the Smith normal form U (I - M) V = D (coordinates of U.w reduced mod the
    diagonal, free coordinates kept).  For free groups with a nontrivial phi
    no practical canonical form is implemented; use
    twisted_conjugacy_test for a bounded three-valued equivalence test.
    """
    if spec.phi is None:
        raise GroupError("semiconjugacy classes require phi")
    if spec.phi_is_identity():
        cls = conjugacy_class(
            GroupSpec(spec.kind, spec.rank, spec.xi, None), w
        )
        return ClassIndex(
            spec,
            SEMICONJUGACY,
            cls.canonical,
            xi=cls.xi,
            witness=cls.witness,
            root=cls.root,
            root_power=cls.root_power,
        )
    if spec.kind == FREE:
        raise GroupError(
            "no canonical form for twisted conjugacy on free groups; "
            "use twisted_conjugacy_test (bounded search)"
        )
    data = _semiconjugacy_data(spec)
    y = mat_vec(data["U"], w)
    reduced = tuple(
        (c % d) if d != 0 else c for c, d in zip(y, data["diag"])
    )
    canonical = mat_vec(data["Uinv"], reduced)
    witness = _solve_semiconjugator(spec, canonical, w)
    return ClassIndex(
        spec, SEMICONJUGACY, canonical, xi=spec.xi_value(canonical), witness=witness
    )


def _solve_semiconjugator(spec: GroupSpec, canonical: Word, x: Word) -> Word:
    """h with (I - M) h = canonical - x, i.e. the twisted action of h moves
    x onto the canonical representative."""
    data = _semiconjugacy_data(spec)
    target = tuple(c - xi for c, xi in zip(canonical, x))
    rhs = mat_vec(data["U"], target)
    z = []
    for c, d in zip(rhs, data["diag"]):
        if d == 0:
            if c != 0:
                raise GroupError("words are not semiconjugate")
            z.append(0)
        else:
            if c % d != 0:
                raise GroupError("words are not semiconjugate")
            z.append(c // d)
    return mat_vec(data["V"], tuple(z))


def class_of(spec: GroupSpec, w: Word, twisted: bool) -> ClassIndex:
    """Class of w: semiconjugacy when twisted with a nontrivial phi,
    conjugacy otherwise."""
    if twisted and spec.phi is not None and not spec.phi_is_identity():
        return _cached_class(spec, w, True)
    return _cached_class(spec, w, False)


@lru_cache(maxsize=None)
def _cached_class(spec: GroupSpec, w: Word, twisted: bool) -> ClassIndex:
    if twisted:
        return semiconjugacy_class(spec, w)
    return conjugacy_class(spec, w)


def witness_to_canonical(cls: ClassIndex, x: Word) -> Word:
    """A conjugator moving the class member x onto cls.canonical.

    Untwisted: t with x = t . canonical . t^{-1}.  Twisted abelian: h with
    x + (I - M) h = canonical.  Unique only up to the (semi)centralizer,
    which is exactly the slack the extraction is invariant under.
    """
    spec = cls.spec
    if cls.twist == CONJUGACY:
        other = conjugacy_class(spec, x)
        if other.canonical != cls.canonical:
            raise GroupError(f"{x} is not in the class of {cls.canonical}")
        return other.witness
    if spec.kind != FREE_ABELIAN or spec.phi_is_identity():
        other = class_of(spec, x, True)
        if other.canonical != cls.canonical:
            raise GroupError(f"{x} is not in the class of {cls.canonical}")
        return other.witness
    return _solve_semiconjugator(spec, cls.canonical, x)


def centralizer_exponent(cls: ClassIndex, u: Word):
    """Coordinates of a (semi)centralizer element u in the abelianization of
    the centralizer: an integer for a cyclic centralizer <root>, an integer
    vector otherwise."""
    spec = cls.spec
    if cls.twist == SEMICONJUGACY and spec.kind == FREE_ABELIAN and not spec.phi_is_identity():
        data = _semiconjugacy_data(spec)
        if any(c != 0 for c in mat_vec(data["matrix"], u)):
            raise GroupError(f"{u} is not in the semicentralizer")
        z = mat_vec(data["Vinv"], u)
        return tuple(z[i] for i in data["kernel_indices"])
    if spec.kind == FREE_ABELIAN:
        return u
    if cls.is_identity:
        return spec.exponent_vector(u)
    root, _ = cls.root, cls.root_power
    if not u:
        return 0
    if len(u) % len(root) == 0:
        m = len(u) // len(root)
        if u == root * m:
            return m
        if u == spec.inv(root) * m:
            return -m
    raise GroupError(f"{u} is not in the centralizer of {cls.canonical}")


# -- bounded twisted-conjugacy test on free groups ------------------------


def iter_reduced_words(spec: GroupSpec, max_len: int) -> Iterator[Word]:
    """All freely reduced words of length <= max_len (identity first)."""
    yield ()
    frontier = [()]
    letters = [l for i in range(1, spec.rank + 1) for l in (i, -i)]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for l in letters:
                if w and w[-1] == -l:
                    continue
                nw = w + (l,)
                nxt.append(nw)
                yield nw
        frontier = nxt


def twisted_conjugacy_test(spec: GroupSpec, w1: Word, w2: Word, bound: int = 8) -> str:
    """Bounded three-valued semiconjugacy test on a free group with phi.

    Returns "yes" when a conjugator h of length <= bound realizes
    w1 = phi(h^{-1}) . w2 . h, "no" when the abelianized obstruction rules
    the pair out, and "unknown" otherwise.  Never guesses.
    """
    if spec.kind != FREE or spec.phi is None:
        raise GroupError("twisted_conjugacy_test is for free groups with phi")
    for h in iter_reduced_words(spec, bound):
        cand = spec.mul(spec.mul(spec.apply_phi(spec.inv(h)), w2), h)
        if cand == w1:
            return "yes"
    # abelianized obstruction: e(w1) - e(w2) must lie in Im(I - M_ab)
    ab = spec.abelianized()
    data = _semiconjugacy_data(ab) if not ab.phi_is_identity() else None
    if data is None:
        if spec.exponent_vector(w1) != spec.exponent_vector(w2):
            return "no"
        return "unknown"
    diff = tuple(
        a - b
        for a, b in zip(spec.exponent_vector(w1), spec.exponent_vector(w2))
    )
    rhs = mat_vec(data["U"], diff)
    for c, d in zip(rhs, data["diag"]):
        if (d == 0 and c != 0) or (d != 0 and c % d != 0):
            return "no"
    return "unknown"
