"""
Indecomposable decomposition of a pair f: V0 -> V1, g: V1 -> V0 over Q.

The pair is a Z/2-graded module over Q[t] with t of odd degree (t = f on V0,
t = g on V1). Where t^2 is invertible the module is a sum of A(k, pi),
classified by the elementary divisors of fg. The nilpotent rest is a sum of
strings x -> tx -> ... -> t^{L-1}x, one per (length L, parity of x):

    length 2k, even start   A(k, u)
    length 2k, odd start    A(k, inf)
    length 2k+1, even start B(k)
    length 2k+1, odd start  Bshift(k)

String counts come from the ranks of t^k on V0 and on V1.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import Matrix, Poly, Symbol

from ..utils.config import get_settings
from ..utils.errors import InvalidInputError, VerificationError
from .polynomial_service import UniPolyOverRing, exact_rank, to_fraction

logger = logging.getLogger(__name__)

U = Symbol("u")
KINDS = ("A", "B", "Bshift")


def matrix_rank(matrix: Matrix) -> int:
    """Exact rank through the sparse engine"""
    rows = [
        {j: to_fraction(matrix[i, j]) for j in range(matrix.cols) if matrix[i, j] != 0}
        for i in range(matrix.rows)
    ]
    return exact_rank(rows, matrix.cols)


@dataclass(frozen=True)
class MatrixPair:
    """f is m x n (V0 = Q^n -> V1 = Q^m), g is n x m"""

    f: Matrix
    g: Matrix

    def __post_init__(self):
        m, n = self.f.shape
        if self.g.shape != (n, m):
            raise InvalidInputError(f"f is {m}x{n}, so g must be {n}x{m}, got {self.g.shape[0]}x{self.g.shape[1]}")
        for entry in list(self.f) + list(self.g):
            if not sympy.sympify(entry).is_Rational:
                raise InvalidInputError(f"Matrix entries must be rational, got {entry}")

    @property
    def n(self) -> int:
        return self.f.shape[1]

    @property
    def m(self) -> int:
        return self.f.shape[0]

    def swapped(self) -> "MatrixPair":
        """Parity shift: the roles of V0 and V1 exchanged"""
        return MatrixPair(self.g, self.f)

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "m": self.m,
            "f": [[str(self.f[i, j]) for j in range(self.n)] for i in range(self.m)],
            "g": [[str(self.g[i, j]) for j in range(self.m)] for i in range(self.n)],
        }


@dataclass(frozen=True)
class IndecompTag:
    """
    kind "A" with poly = monic irreducible coefficients (highest first) or
    None for infinity; kind "B" / "Bshift" with poly None.
    """

    kind: str
    k: int
    poly: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"Unknown indecomposable kind {self.kind!r}")
        min_k = 1 if self.kind == "A" else 0
        if self.k < min_k:
            raise InvalidInputError(f"{self.kind}({self.k}) needs k >= {min_k}")
        if self.poly is not None:
            if self.kind != "A":
                raise InvalidInputError(f"{self.kind} blocks carry no polynomial")
            coeffs = tuple(to_fraction(c) for c in self.poly)
            if len(coeffs) < 2 or coeffs[0] != 1:
                raise InvalidInputError(f"A-block polynomial must be monic of degree >= 1, got {self.poly}")
            object.__setattr__(self, "poly", coeffs)

    @classmethod
    def A(cls, k: int, poly: Optional[Sequence] = None) -> "IndecompTag":
        return cls("A", k, None if poly is None else tuple(poly))

    @classmethod
    def A_inf(cls, k: int) -> "IndecompTag":
        return cls("A", k, None)

    @classmethod
    def A_zero(cls, k: int) -> "IndecompTag":
        return cls("A", k, (1, 0))

    @classmethod
    def B(cls, k: int) -> "IndecompTag":
        return cls("B", k)

    @classmethod
    def Bshift(cls, k: int) -> "IndecompTag":
        return cls("Bshift", k)

    def sort_key(self):
        return KINDS.index(self.kind), self.k, self.poly is not None, self.poly or ()

    @property
    def is_infinity(self) -> bool:
        return self.kind == "A" and self.poly is None

    @property
    def is_zero_root(self) -> bool:
        return self.kind == "A" and self.poly == (1, 0)

    @property
    def is_nilpotent(self) -> bool:
        return self.kind != "A" or self.is_infinity or self.is_zero_root

    def poly_expr(self):
        if self.poly is None:
            return None
        d = len(self.poly) - 1
        return sum(sympy.Rational(c.numerator, c.denominator) * U ** (d - i) for i, c in enumerate(self.poly))

    def dims(self) -> Tuple[int, int]:
        """(dim of even part, dim of odd part)"""
        if self.kind == "A":
            size = self.k * (1 if self.poly is None else len(self.poly) - 1)
            return size, size
        if self.kind == "B":
            return self.k + 1, self.k
        return self.k, self.k + 1

    def to_dict(self) -> Dict:
        if self.kind != "A":
            return {"type": self.kind, "k": self.k}
        poly = "inf" if self.poly is None else [
            c.numerator if c.denominator == 1 else str(c) for c in self.poly
        ]
        return {"type": "A", "k": self.k, "poly": poly}

    def __str__(self):
        if self.kind != "A":
            return f"{self.kind}({self.k})"
        return f"A({self.k}, {'inf' if self.poly is None else self.poly_expr()})"


class IndecompMultiset:
    """Multiset of indecomposable tags"""

    def __init__(self, tags: Iterable[IndecompTag] = ()):
        self.counts: Counter = Counter(tags)

    def __eq__(self, other):
        return isinstance(other, IndecompMultiset) and +self.counts == +other.counts

    def __iter__(self):
        for tag in sorted(self.counts, key=IndecompTag.sort_key):
            for _ in range(self.counts[tag]):
                yield tag

    def __len__(self):
        return sum(self.counts.values())

    def add(self, tag: IndecompTag, count: int = 1) -> None:
        if count:
            self.counts[tag] += count

    def dims(self) -> Tuple[int, int]:
        even = sum(tag.dims()[0] for tag in self)
        odd = sum(tag.dims()[1] for tag in self)
        return even, odd

    def to_list(self) -> List[Dict]:
        return [tag.to_dict() for tag in self]

    def __repr__(self):
        return "{" + ", ".join(str(tag) for tag in self) + "}"


@dataclass
class RankProfile:
    """even[k] = rank of t^k on V0, odd[k] = rank of t^k on V1"""

    even: List[int]
    odd: List[int]

    def total(self, k: int) -> int:
        return self.even[k] + self.odd[k]

    def to_dict(self) -> Dict:
        return {"even": self.even, "odd": self.odd}


def _block_diagonal(blocks: Sequence[Matrix]) -> Matrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = sympy.zeros(rows, cols)
    r = c = 0
    for b in blocks:
        if b.rows and b.cols:
            out[r : r + b.rows, c : c + b.cols] = b
        r += b.rows
        c += b.cols
    return out


def companion(coeffs: Sequence) -> Matrix:
    """Companion matrix of the monic polynomial with the given coefficients"""
    d = len(coeffs) - 1
    out = sympy.zeros(d, d)
    for i in range(1, d):
        out[i, i - 1] = 1
    for i in range(d):
        out[i, d - 1] = -sympy.Rational(coeffs[d - i])
    return out


def _shift_down(rows: int, cols: int) -> Matrix:
    out = sympy.zeros(rows, cols)
    for j in range(min(cols, rows - 1)):
        out[j + 1, j] = 1
    return out


def _identity_top(rows: int, cols: int) -> Matrix:
    out = sympy.zeros(rows, cols)
    for j in range(min(rows, cols)):
        out[j, j] = 1
    return out


def tag_pair(tag: IndecompTag) -> MatrixPair:
    """The indecomposable as a pair of matrices (f, g)"""
    k = tag.k
    if tag.kind == "B":
        return MatrixPair(_identity_top(k, k + 1), _shift_down(k + 1, k))
    if tag.kind == "Bshift":
        return MatrixPair(_shift_down(k + 1, k), _identity_top(k, k + 1))
    if tag.is_infinity:
        return MatrixPair(_shift_down(k, k), sympy.eye(k))
    if tag.is_zero_root:
        return MatrixPair(sympy.eye(k), _shift_down(k, k))
    power = Poly(tag.poly_expr() ** k, U).all_coeffs()
    g = companion(power)
    return MatrixPair(sympy.eye(g.rows), g)


def synthesize(ms: IndecompMultiset) -> MatrixPair:
    """Block-diagonal pair realizing the multiset"""
    pairs = [tag_pair(tag) for tag in ms]
    return MatrixPair(_block_diagonal([p.f for p in pairs]), _block_diagonal([p.g for p in pairs]))


def word_ranks(pair: MatrixPair, K: Optional[int] = None) -> RankProfile:
    """Ranks of t^k on V0 (words f, gf, fgf, ...) and on V1 (g, fg, gfg, ...), k = 0..K"""
    K = pair.n + pair.m + 1 if K is None else K
    even, odd = [pair.n], [pair.m]
    word0, word1 = sympy.eye(pair.n), sympy.eye(pair.m)
    for k in range(1, K + 1):
        # word0 lands in V1 after an odd number of steps
        word0 = (pair.f if k % 2 else pair.g) * word0
        word1 = (pair.g if k % 2 else pair.f) * word1
        even.append(matrix_rank(word0))
        odd.append(matrix_rank(word1))
    return RankProfile(even, odd)


def contribution(tag: IndecompTag, k: int) -> Tuple[int, int]:
    """(rank of t^k on the even part, on the odd part) for one indecomposable"""
    profile = word_ranks(tag_pair(tag), k)
    return profile.even[k], profile.odd[k]


def _charpoly(matrix: Matrix):
    if matrix.rows == 0:
        return sympy.Integer(1)
    return matrix.charpoly(U).as_expr()


def _poly_at_matrix(coeffs: Sequence, matrix: Matrix) -> Matrix:
    out = sympy.zeros(matrix.rows, matrix.cols)
    for c in coeffs:
        out = out * matrix + sympy.Rational(c) * sympy.eye(matrix.rows)
    return out


def _invertible_part(pair: MatrixPair) -> Tuple[IndecompMultiset, int]:
    """A(k, pi) blocks for pi != u, and their total dimension on each side"""
    ms = IndecompMultiset()
    if pair.m == 0 or pair.n == 0:
        return ms, 0
    fg = pair.f * pair.g
    _, factors = sympy.factor_list(_charpoly(fg), U)
    total = 0
    for factor, exponent in factors:
        pi = Poly(factor, U).monic()
        if pi.degree() == 0 or pi.as_expr() == U:
            continue
        coeffs = [to_fraction(c) for c in pi.all_coeffs()]
        deg = pi.degree()
        at = _poly_at_matrix(coeffs, fg)
        nullities = [0]
        power = sympy.eye(pair.m)
        for _ in range(exponent):
            power = power * at
            nullities.append(pair.m - matrix_rank(power))
        # at_least[j] = number of blocks pi^i with i >= j
        at_least = [(nullities[j] - nullities[j - 1]) // deg for j in range(1, exponent + 1)] + [0]
        for j in range(1, exponent + 1):
            ms.add(IndecompTag.A(j, coeffs), at_least[j - 1] - at_least[j])
        total += deg * exponent
    return ms, total


def _string_tag(length: int, even_start: bool) -> IndecompTag:
    half, odd_length = divmod(length, 2)
    if odd_length:
        return IndecompTag.B(half) if even_start else IndecompTag.Bshift(half)
    return IndecompTag.A_zero(half) if even_start else IndecompTag.A_inf(half)


def classify(pair: MatrixPair) -> IndecompMultiset:
    ms, d = _invertible_part(pair)
    L_max = pair.n + pair.m - 2 * d
    profile = word_ranks(pair, L_max + 2)
    r0 = [pair.n - d] + [x - d for x in profile.even[1:]]
    r1 = [pair.m - d] + [x - d for x in profile.odd[1:]]
    if min(r0 + r1) < 0:
        raise VerificationError("Invertible part exceeds the word ranks")
    r = [a + b for a, b in zip(r0, r1)]
    e = [a - b for a, b in zip(r0, r1)]
    for L in range(1, L_max + 1):
        count = r[L - 1] - 2 * r[L] + r[L + 1]
        parity_gap = e[L - 1] - e[L + 1]
        if (count + parity_gap) % 2 or abs(parity_gap) > count:
            raise VerificationError(f"Inconsistent string counts at length {L}: {count}, {parity_gap}")
        ms.add(_string_tag(L, True), (count + parity_gap) // 2)
        ms.add(_string_tag(L, False), (count - parity_gap) // 2)
    if ms.dims() != (pair.n, pair.m):
        logger.error(f"Classification {ms} has dims {ms.dims()}, pair has {(pair.n, pair.m)}")
        raise VerificationError("Classified blocks do not account for the whole pair")
    logger.debug(f"classified {pair.n}|{pair.m} pair as {ms}")
    return ms


def shift(ms: IndecompMultiset) -> IndecompMultiset:
    """M -> M[1]: A(k, u) <-> A(k, inf), B <-> Bshift, other A(k, pi) fixed"""
    out = IndecompMultiset()
    for tag, count in ms.counts.items():
        if tag.kind == "B":
            new = IndecompTag.Bshift(tag.k)
        elif tag.kind == "Bshift":
            new = IndecompTag.B(tag.k)
        elif tag.is_zero_root:
            new = IndecompTag.A_inf(tag.k)
        elif tag.is_infinity:
            new = IndecompTag.A_zero(tag.k)
        else:
            new = tag
        out.add(new, count)
    return out


def reduced_charpoly(pair: MatrixPair, delta: int) -> UniPolyOverRing:
    """chi(u) / u^delta for chi the characteristic polynomial of fg"""
    if delta < 0:
        raise InvalidInputError(f"delta must be nonnegative, got {delta}")
    coeffs = Poly(_charpoly(pair.f * pair.g), U).all_coeffs()
    if delta > len(coeffs) - 1 or any(c != 0 for c in coeffs[len(coeffs) - delta :]):
        raise InvalidInputError(f"u^{delta} does not divide the characteristic polynomial of fg")
    return UniPolyOverRing(tuple(coeffs[: len(coeffs) - delta]), U)


_RANDOM_POLYS = ((1, -1), (1, 1), (1, -2), (1, 3), (1, 0, 1), (1, 0, -2), (1, 1, 1))


def random_multiset(rng: np.random.Generator, max_even: int = 8, max_odd: int = 8) -> IndecompMultiset:
    ms = IndecompMultiset()
    even = odd = 0
    for _ in range(int(rng.integers(1, 7))):
        kind = int(rng.integers(0, 6))
        k = int(rng.integers(1, 4))
        if kind == 0:
            tag = IndecompTag.A(k, _RANDOM_POLYS[int(rng.integers(0, len(_RANDOM_POLYS)))])
        elif kind == 1:
            tag = IndecompTag.A_zero(k)
        elif kind == 2:
            tag = IndecompTag.A_inf(k)
        elif kind == 3:
            tag = IndecompTag.B(k - 1)
        elif kind == 4:
            tag = IndecompTag.Bshift(k - 1)
        else:
            tag = IndecompTag.A(k, (1, int(rng.integers(-5, 6)) or 4))
        de, do = tag.dims()
        if even + de <= max_even and odd + do <= max_odd:
            ms.add(tag)
            even, odd = even + de, odd + do
    return ms


def _random_unimodular(size: int, rng: np.random.Generator) -> Matrix:
    lower, upper = sympy.eye(size), sympy.eye(size)
    for i in range(size):
        for j in range(i):
            lower[i, j] = int(rng.integers(-2, 3))
            upper[j, i] = int(rng.integers(-2, 3))
    return lower * upper


def random_conjugate(pair: MatrixPair, rng: np.random.Generator) -> MatrixPair:
    """(Q f P^-1, P g Q^-1) for random determinant-one P on V0 and Q on V1"""
    P = _random_unimodular(pair.n, rng)
    Q = _random_unimodular(pair.m, rng)
    P_inv = P.inv() if pair.n else P
    Q_inv = Q.inv() if pair.m else Q
    return MatrixPair(Q * pair.f * P_inv, P * pair.g * Q_inv)


def verify_counting_table(max_total: int) -> bool:
    """
    Rank vectors of all nilpotent strings of total dimension <= max_total are
    linearly independent, so string counts are determined by word ranks.
    """
    tags = []
    for length in range(1, max_total + 1):
        tags.extend([_string_tag(length, True), _string_tag(length, False)])
    vectors = []
    for tag in tags:
        profile = word_ranks(tag_pair(tag), max_total + 1)
        vectors.append({i: Fraction(v) for i, v in enumerate(profile.even + profile.odd) if v})
    return exact_rank(vectors, 2 * (max_total + 2)) == len(tags)


def parse_matrix(text: str, rows: int, cols: int) -> Matrix:
    """'1,0;0,1' -> 2x2 matrix; rows separated by ';', entries by ','"""
    text = (text or "").strip()
    if rows == 0 or cols == 0:
        if text:
            raise InvalidInputError(f"Expected an empty {rows}x{cols} matrix, got {text!r}")
        return sympy.zeros(rows, cols)
    data = [[x.strip() for x in row.split(",")] for row in text.split(";")]
    if len(data) != rows or any(len(row) != cols for row in data):
        raise InvalidInputError(f"Expected a {rows}x{cols} matrix, got {text!r}")
    try:
        return Matrix([[sympy.Rational(x) for x in row] for row in data])
    except (TypeError, ValueError, sympy.SympifyError) as e:
        raise InvalidInputError(f"Matrix entries must be rationals: {e}")


class PairService:
    """Classification with the synthesize-back check, plus seeded round trips"""

    def __init__(self):
        self.settings = get_settings()

    def classify(self, pair: MatrixPair) -> Dict:
        ms = classify(pair)
        rebuilt = synthesize(ms)
        if word_ranks(rebuilt) != word_ranks(pair):
            raise VerificationError(f"Synthesized {ms} does not reproduce the word ranks of the pair")
        if sympy.expand(_charpoly(rebuilt.f * rebuilt.g) - _charpoly(pair.f * pair.g)) != 0:
            raise VerificationError(f"Synthesized {ms} has a different characteristic polynomial")
        return {
            "pair": pair.to_dict(),
            "blocks": ms.to_list(),
            "ranks": word_ranks(pair).to_dict(),
            "charpoly": str(sympy.expand(_charpoly(pair.f * pair.g))),
        }

    def roundtrips(self, seed: Optional[int] = None, trials: Optional[int] = None) -> Dict:
        seed = self.settings.seed if seed is None else seed
        trials = self.settings.trials if trials is None else trials
        rng = np.random.default_rng(seed)
        failures = []
        for trial in range(trials):
            ms = random_multiset(rng)
            pair = random_conjugate(synthesize(ms), rng)
            found = classify(pair)
            if found != ms:
                failures.append({"trial": trial, "expected": ms.to_list(), "found": found.to_list()})
        logger.info(f"classification round trips: {trials - len(failures)}/{trials} passed (seed {seed})")
        return {"seed": seed, "trials": trials, "failures": failures}
