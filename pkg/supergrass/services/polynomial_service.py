"""
Exact polynomial arithmetic over Q and degree-truncated linear algebra.

Polynomials are sympy Polys over QQ; ranks are taken with sympy's sparse
DomainMatrix (fraction-free elimination over ZZ after clearing
denominators). No Groebner bases: every quotient dimension comes from the
rank of the span of monomial multiples of the relations in one degree.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import Poly, Symbol
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from ..utils.config import get_settings
from ..utils.errors import InvalidInputError, ResourceLimitError

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
SparseRow = Dict[int, Fraction]


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, sympy Rationals and QQ elements to Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        num, den = value.numerator, value.denominator
        num = num() if callable(num) else num
        den = den() if callable(den) else den
        return Fraction(int(num), int(den))
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def _check_cells(nrows: int, ncols: int, what: str) -> None:
    limit = get_settings().max_cells
    if nrows * ncols > limit:
        raise ResourceLimitError(
            f"{what}: {nrows}x{ncols} matrix exceeds SUPERGRASS_MAX_CELLS={limit}"
        )


def exact_rank(rows: Sequence[SparseRow], ncols: int) -> int:
    """Rank over Q of sparse rational rows (fraction-free elimination over ZZ)"""
    rows = [row for row in rows if any(row.values())]
    if not rows or ncols == 0:
        return 0
    _check_cells(len(rows), ncols, "exact_rank")
    dok = {}
    for i, row in enumerate(rows):
        scale = reduce(lcm, (to_fraction(v).denominator for v in row.values()), 1)
        for j, value in row.items():
            value = to_fraction(value) * scale
            if value:
                dok[(i, j)] = ZZ(int(value))
    matrix = DomainMatrix.from_dok(dok, (len(rows), ncols), ZZ)
    _, _, pivots = matrix.rref_den()
    return len(pivots)


def rref_rows(rows: Sequence[SparseRow], ncols: int) -> Tuple[List[SparseRow], Tuple[int, ...]]:
    """Reduced row echelon form over Q; returns the nonzero rows and the pivot columns"""
    rows = [row for row in rows if any(row.values())]
    if not rows or ncols == 0:
        return [], ()
    _check_cells(len(rows), ncols, "rref")
    dok = {
        (i, j): QQ(to_fraction(v).numerator, to_fraction(v).denominator)
        for i, row in enumerate(rows)
        for j, v in row.items()
        if v
    }
    matrix = DomainMatrix.from_dok(dok, (len(rows), ncols), QQ)
    reduced, pivots = matrix.rref()
    out: Dict[int, SparseRow] = {}
    for (i, j), value in reduced.to_dok().items():
        if value:
            out.setdefault(i, {})[j] = to_fraction(value)
    return [out[i] for i in sorted(out)], tuple(pivots)


def modular_rank(rows: Sequence[SparseRow], ncols: int, prime: int) -> int:
    """Rank over F_prime; the cross-check for exact_rank"""
    rows = [row for row in rows if any(row.values())]
    if not rows or ncols == 0:
        return 0
    _check_cells(len(rows), ncols, "modular_rank")
    matrix = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, value in row.items():
            value = to_fraction(value)
            if value.denominator % prime == 0:
                raise InvalidInputError(f"Denominator {value.denominator} not invertible mod {prime}")
            matrix[i, j] = (value.numerator % prime) * pow(value.denominator, -1, prime) % prime
    rank = 0
    for col in range(ncols):
        candidates = np.nonzero(matrix[rank:, col])[0]
        if candidates.size == 0:
            continue
        pivot = rank + candidates[0]
        matrix[[rank, pivot]] = matrix[[pivot, rank]]
        inverse = pow(int(matrix[rank, col]), -1, prime)
        matrix[rank] = matrix[rank] * inverse % prime
        factors = matrix[:, col].copy()
        factors[rank] = 0
        matrix = (matrix - np.outer(factors, matrix[rank])) % prime
        rank += 1
        if rank == matrix.shape[0]:
            break
    return rank


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial over Q in named variables with positive integer degree weights"""

    poly: Poly
    weights: Tuple[int, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.poly.gens):
            raise InvalidInputError(
                f"{len(self.weights)} weights given for {len(self.poly.gens)} variables"
            )
        if any(w <= 0 for w in self.weights):
            raise InvalidInputError(f"Weights must be positive: {self.weights}")

    @classmethod
    def from_expr(cls, expr, gens: Sequence[Symbol], weights: Optional[Sequence[int]] = None) -> "MultiPoly":
        gens = tuple(gens)
        weights = tuple(weights) if weights is not None else (1,) * len(gens)
        return cls(Poly(expr, *gens, domain=QQ), weights)

    @property
    def gens(self) -> Tuple[Symbol, ...]:
        return tuple(self.poly.gens)

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return {exp: to_fraction(c) for exp, c in self.poly.terms() if c}

    def weighted_degree(self, exponent: Exponent) -> int:
        return sum(w * e for w, e in zip(self.weights, exponent))

    def degrees(self) -> List[int]:
        return sorted({self.weighted_degree(exp) for exp in self.terms})

    def top_degree(self) -> int:
        return max(self.degrees(), default=0)

    def is_zero(self) -> bool:
        return self.poly.is_zero

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def as_expr(self):
        return self.poly.as_expr()

    def _wrap(self, poly: Poly) -> "MultiPoly":
        return MultiPoly(poly, self.weights)

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        return self._wrap(self.poly + other.poly)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self._wrap(self.poly - other.poly)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        return self._wrap(self.poly * other.poly)

    def __neg__(self) -> "MultiPoly":
        return self._wrap(-self.poly)

    def __str__(self):
        return str(self.as_expr())


def _expand_coeffs(expr, var: Symbol, length: Optional[int] = None) -> Tuple:
    """Coefficients of expr as a polynomial in var, highest first, padded to length"""
    coeffs = [sympy.expand(c) for c in Poly(sympy.expand(expr), var).all_coeffs()]
    if length is not None:
        if len(coeffs) > length:
            raise InvalidInputError(f"Polynomial of degree {len(coeffs) - 1} does not fit {length} coefficients")
        coeffs = [sympy.Integer(0)] * (length - len(coeffs)) + coeffs
    return tuple(coeffs)


@dataclass(frozen=True)
class UniPolyOverRing:
    """Monic polynomial in `var` whose coefficients are polynomials in `base_gens`"""

    coeffs: Tuple  # highest degree first; coeffs[0] == 1
    var: Symbol = field(default_factory=lambda: Symbol("u"))
    base_gens: Tuple[Symbol, ...] = ()
    base_weights: Tuple[int, ...] = ()

    def __post_init__(self):
        coeffs = tuple(sympy.expand(sympy.sympify(c)) for c in self.coeffs)
        if not coeffs:
            raise InvalidInputError("A polynomial needs at least its leading coefficient")
        object.__setattr__(self, "coeffs", coeffs)
        if not self.base_weights:
            object.__setattr__(self, "base_weights", (1,) * len(self.base_gens))

    @classmethod
    def universal(cls, n: int, prefix: str = "a", var: Optional[Symbol] = None) -> "UniPolyOverRing":
        """u^n + a1 u^{n-1} + ... + an with a_i a fresh symbol of weight i"""
        gens = tuple(Symbol(f"{prefix}{i}") for i in range(1, n + 1))
        return cls((sympy.Integer(1),) + gens, var or Symbol("u"), gens, tuple(range(1, n + 1)))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, var: Optional[Symbol] = None) -> "UniPolyOverRing":
        """Monic polynomial with rational coefficients, highest degree first"""
        return cls(tuple(sympy.Rational(c) if not isinstance(c, sympy.Basic) else c for c in coeffs),
                   var or Symbol("u"))

    @classmethod
    def from_roots(cls, roots: Sequence, var: Optional[Symbol] = None) -> "UniPolyOverRing":
        var = var or Symbol("u")
        expr = sympy.prod([var - sympy.Rational(r) for r in roots])
        return cls(_expand_coeffs(expr, var), var)

    @classmethod
    def from_expr(cls, expr, var: Symbol, base_gens: Sequence[Symbol] = (),
                  base_weights: Sequence[int] = ()) -> "UniPolyOverRing":
        return cls(_expand_coeffs(expr, var), var, tuple(base_gens), tuple(base_weights))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_monic(self) -> bool:
        return sympy.expand(self.coeffs[0] - 1) == 0

    def as_expr(self):
        n = self.degree
        return sympy.expand(sum(c * self.var ** (n - i) for i, c in enumerate(self.coeffs)))

    def coefficient(self, i: int):
        """a_i in the convention f = sum a_{n-i} u^i (a_0 = 1)"""
        return self.coeffs[i]

    def is_rational(self) -> bool:
        return all(c.is_Rational for c in self.coeffs)

    def derivative_coeffs(self) -> Tuple:
        """Coefficients of f' (not monic), highest degree first"""
        n = self.degree
        return tuple(sympy.expand((n - i) * c) for i, c in enumerate(self.coeffs[:-1]))

    def coeff_polys(self) -> List[MultiPoly]:
        if not self.base_gens:
            raise InvalidInputError("Coefficient ring has no variables")
        return [MultiPoly.from_expr(c, self.base_gens, self.base_weights) for c in self.coeffs]

    def __str__(self):
        return str(self.as_expr())


_INDEXED = re.compile(r"^[a-zA-Z]+(\d+)$")


def parse_univariate(text: str, var: str = "u", monic: bool = True) -> UniPolyOverRing:
    """
    Parse a monic polynomial such as "u^3 - 1" or "u^2 + a1*u + a2".

    Symbols other than `var` become coefficient-ring variables; a symbol
    ending in an index (a1, b2, ...) gets that index as its weight.
    """
    u = Symbol(var)
    try:
        expr = parse_expr(text, local_dict={var: u}, transformations=standard_transformations + (convert_xor,))
    except (SyntaxError, TypeError, sympy.SympifyError) as e:
        raise InvalidInputError(f"Cannot parse polynomial {text!r}: {e}")
    base = sorted((s for s in expr.free_symbols if s != u), key=lambda s: s.name)
    weights = []
    for s in base:
        match = _INDEXED.match(s.name)
        weights.append(int(match.group(1)) if match and int(match.group(1)) > 0 else 1)
    f = UniPolyOverRing.from_expr(expr, u, base, weights)
    if monic and not f.is_monic():
        raise InvalidInputError(f"{text!r} is not monic in {var}")
    return f


def monic_divmod(f: UniPolyOverRing, g: UniPolyOverRing) -> Tuple[UniPolyOverRing, Tuple]:
    """f = g*q + r with deg r < deg g; r is returned as deg(g) coefficients, highest first"""
    if not g.is_monic():
        raise InvalidInputError(f"Divisor {g} is not monic")
    if g.degree > f.degree:
        raise InvalidInputError(f"Divisor degree {g.degree} exceeds dividend degree {f.degree}")
    var = f.var
    base = tuple(dict.fromkeys(f.base_gens + g.base_gens))
    gens = (var,) + base
    F = Poly(f.as_expr(), *gens, domain=QQ)
    G = Poly(g.as_expr().subs(g.var, var), *gens, domain=QQ)
    Q, R = F.div(G)
    quotient = UniPolyOverRing(_expand_coeffs(Q.as_expr(), var), var, base)
    remainder = _expand_coeffs(R.as_expr(), var, g.degree) if g.degree else ()
    return quotient, remainder


def monomials_of_degree(weights: Sequence[int], degree: int) -> Iterator[Exponent]:
    """Exponent vectors of the given weighted degree, in lexicographically decreasing order"""
    weights = tuple(weights)

    def build(i: int, remaining: int, prefix: Tuple[int, ...]):
        if i == len(weights):
            if remaining == 0:
                yield prefix
            return
        for e in range(remaining // weights[i], -1, -1):
            yield from build(i + 1, remaining - e * weights[i], prefix + (e,))

    if degree < 0:
        return
    yield from build(0, degree, ())


def _multiply_by_monomial(terms: Dict[Exponent, Fraction], monomial: Exponent) -> Dict[Exponent, Fraction]:
    return {tuple(a + b for a, b in zip(exp, monomial)): c for exp, c in terms.items()}


@dataclass
class GradedQuotientReport:
    """Per-degree dimensions of R/(relations) for a weighted polynomial ring R"""

    weights: Tuple[int, ...]
    dims: List[int]

    def total(self) -> int:
        return sum(self.dims)

    def trimmed(self) -> List[int]:
        dims = list(self.dims)
        while dims and dims[-1] == 0:
            dims.pop()
        return dims

    def to_dict(self) -> Dict:
        return {"weights": list(self.weights), "dims": list(self.dims), "total": self.total()}


def graded_quotient_dims(
    weights: Sequence[int],
    relations: Sequence[MultiPoly],
    up_to: int,
    multigrading: Optional[Sequence[Sequence[int]]] = None,
) -> GradedQuotientReport:
    """
    dim_d R/(relations) for d <= up_to; relations must be weighted-homogeneous.

    With a multigrading (one integer vector per variable) under which every
    relation is homogeneous, ranks are taken separately on each multidegree.
    """
    weights = tuple(weights)
    relations = [r for r in relations if not r.is_zero()]
    for r in relations:
        if r.weights != weights:
            raise InvalidInputError("Relation weights do not match the ring weights")
        if not r.is_homogeneous():
            raise InvalidInputError(f"Relation {r} is not weighted-homogeneous")

    def multidegree(exp: Exponent) -> Tuple[int, ...]:
        if multigrading is None:
            return ()
        return tuple(sum(e * vec[k] for e, vec in zip(exp, multigrading)) for k in range(len(multigrading[0])))

    rel_terms = [(r.top_degree(), r.terms) for r in relations]
    for _, terms in rel_terms:
        if len({multidegree(exp) for exp in terms}) > 1:
            raise InvalidInputError("Relation is not homogeneous for the multigrading")

    dims = []
    for d in range(up_to + 1):
        blocks: Dict[Tuple[int, ...], Dict[Exponent, int]] = {}
        for mono in monomials_of_degree(weights, d):
            block = blocks.setdefault(multidegree(mono), {})
            block[mono] = len(block)
        block_rows: Dict[Tuple[int, ...], List[SparseRow]] = {key: [] for key in blocks}
        for degree, terms in rel_terms:
            if degree > d:
                continue
            for mono in monomials_of_degree(weights, d - degree):
                product = _multiply_by_monomial(terms, mono)
                key = multidegree(next(iter(product)))
                block_rows[key].append({blocks[key][exp]: c for exp, c in product.items()})
        rank = sum(exact_rank(block_rows[key], len(columns)) for key, columns in blocks.items())
        size = sum(len(columns) for columns in blocks.values())
        logger.debug(f"degree {d}: {size} monomials in {len(blocks)} blocks, rank {rank}")
        dims.append(size - rank)
    return GradedQuotientReport(weights, dims)


def filtered_quotient_dim(weights: Sequence[int], relations: Sequence[MultiPoly], up_to: int) -> List[int]:
    """
    dim R_{<=D} / span{mono * rel : wdeg(mono) + topdeg(rel) <= D} for D = 0..up_to.

    When the top-degree forms of the relations cut out a finite quotient the
    sequence stabilizes at dim_Q R/(relations).
    """
    weights = tuple(weights)
    relations = [r for r in relations if not r.is_zero()]
    rel_terms = [(r.top_degree(), r.terms) for r in relations]
    values = []
    for D in range(up_to + 1):
        monomials = [m for d in range(D + 1) for m in monomials_of_degree(weights, d)]
        columns = {mono: idx for idx, mono in enumerate(monomials)}
        rows = []
        for degree, terms in rel_terms:
            for d in range(D - degree + 1):
                for mono in monomials_of_degree(weights, d):
                    product = _multiply_by_monomial(terms, mono)
                    rows.append({columns[exp]: c for exp, c in product.items()})
        values.append(len(columns) - exact_rank(rows, len(columns)))
    return values


class PolynomialService:
    """Rank computations with the modular cross-check switched on by settings"""

    def __init__(self):
        self.settings = get_settings()

    def checked_rank(self, rows: Sequence[SparseRow], ncols: int) -> Dict[str, int]:
        """Exact rank together with the rank over each configured prime"""
        report = {"exact": exact_rank(rows, ncols)}
        for prime in self.settings.check_primes:
            report[f"mod_{prime}"] = modular_rank(rows, ncols, prime)
        return report
