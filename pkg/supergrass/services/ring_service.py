"""
Splitting rings, factorization rings, Sylvester matrices and discriminants.

Generators carry cohomological weight 2 (xi_i) and 2i (b_i). Rank and
graded-dimension computations run with the halved weights 1 and i, so the
reported graded dimensions are in halved degrees.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import Matrix, Poly, Symbol

from ..utils.config import get_settings
from ..utils.errors import InvalidInputError, VerificationError
from .partition_service import gaussian_poincare, q_factorial_dims
from .polynomial_service import (
    GradedQuotientReport,
    MultiPoly,
    UniPolyOverRing,
    filtered_quotient_dim,
    graded_quotient_dims,
    monic_divmod,
)

logger = logging.getLogger(__name__)


def _symbols(prefix: str, count: int) -> Tuple[Symbol, ...]:
    return tuple(Symbol(f"{prefix}{i}") for i in range(1, count + 1))


def _poly_product(a: Sequence[int], b: Sequence[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@dataclass
class SplitRing:
    """Split_A(f): the universal A-algebra in which f = prod (u - xi_i)"""

    f: UniPolyOverRing
    xi: Tuple[Symbol, ...]
    tower: List[UniPolyOverRing]  # tower[i] = f / ((u - xi_1) ... (u - xi_i))
    relations: List  # a_i - (-1)^i e_i(xi), i = 1..n

    @property
    def n(self) -> int:
        return self.f.degree

    @property
    def weights(self) -> Tuple[int, ...]:
        return (2,) * self.n

    def staircase(self) -> List[Tuple[int, ...]]:
        """Exponent vectors e with e_i <= n - i; these index the basis"""
        bounds = [self.n - i for i in range(1, self.n + 1)]

        def build(i: int):
            if i == self.n:
                yield ()
                return
            for e in range(bounds[i] + 1):
                for rest in build(i + 1):
                    yield (e,) + rest

        return list(build(0))

    def basis_monomials(self) -> List:
        return [sympy.Mul(*[x ** e for x, e in zip(self.xi, exp)]) for exp in self.staircase()]

    def to_dict(self) -> Dict:
        return {
            "kind": "split",
            "f": str(self.f),
            "vars": [str(x) for x in self.xi],
            "weights": list(self.weights),
            "base_vars": [str(a) for a in self.f.base_gens],
            "relations": [str(r) for r in self.relations],
            "basis_size": len(self.staircase()),
        }


@dataclass
class FactRing:
    """Fact^{p,q}_A(f): the universal A-algebra in which f = g h, deg g = p, deg h = q"""

    f: UniPolyOverRing
    p: int
    b: Tuple[Symbol, ...]
    g: UniPolyOverRing
    cofactor: UniPolyOverRing  # h, its coefficients are the eliminated c_j
    relations: Tuple  # remainder of f / g, highest degree first

    @property
    def q(self) -> int:
        return self.f.degree - self.p

    @property
    def weights(self) -> Tuple[int, ...]:
        return tuple(2 * i for i in range(1, self.p + 1))

    def relation_polys(self) -> List[MultiPoly]:
        """Relations as polynomials in b (and the base variables of f, if any)"""
        gens = self.b + self.f.base_gens
        weights = tuple(range(1, self.p + 1)) + tuple(self.f.base_weights)
        return [MultiPoly.from_expr(r, gens, weights) for r in self.relations if sympy.expand(r) != 0]

    def to_dict(self) -> Dict:
        return {
            "kind": "fact",
            "f": str(self.f),
            "p": self.p,
            "q": self.q,
            "vars": [str(x) for x in self.b],
            "weights": list(self.weights),
            "base_vars": [str(a) for a in self.f.base_gens],
            "relations": [str(r) for r in self.relations],
            "cofactor": str(self.cofactor),
        }


@dataclass
class SylvesterMatrix:
    """Syl_{n,m}(f, g): m shifted rows of f's coefficients, then n of g's"""

    matrix: Matrix
    n: int
    m: int
    det: sympy.Expr
    nullity: Optional[int] = None  # only for rational entries

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "m": self.m,
            "rows": [[str(self.matrix[i, j]) for j in range(self.matrix.cols)] for i in range(self.matrix.rows)],
            "det": str(self.det),
            "nullity": self.nullity,
        }


@dataclass
class FreeRankReport:
    kind: str
    degree: int
    p: Optional[int]
    expected: int
    computed: int
    staircase: Optional[int] = None
    graded_dims: Optional[List[int]] = None
    filtration: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.computed == self.expected and self.staircase in (None, self.expected)

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "degree": self.degree,
            "p": self.p,
            "expected": self.expected,
            "computed": self.computed,
            "staircase": self.staircase,
            "graded_dims": self.graded_dims,
            "filtration": self.filtration,
            "ok": self.ok,
        }


def split_presentation(f: UniPolyOverRing, prefix: str = "x") -> SplitRing:
    """Generators, elementary-symmetric relations and the division tower of Split_A(f)"""
    n = f.degree
    if n < 1:
        raise InvalidInputError("Splitting ring needs deg f >= 1")
    xi = _symbols(prefix, n)
    u = f.var
    tower = [f]
    for i, x in enumerate(xi):
        linear = UniPolyOverRing((1, -x), u, (x,))
        quotient, _ = monic_divmod(tower[-1], linear)
        tower.append(UniPolyOverRing(quotient.coeffs, u, f.base_gens + xi[: i + 1]))
    relations = []
    for i in range(1, n + 1):
        e_i = sum(sympy.prod(c) for c in combinations(xi, i))
        relations.append(sympy.expand(f.coeffs[i] - (-1) ** i * e_i))
    return SplitRing(f, xi, tower, relations)


def split_normal_form(ring: SplitRing, element) -> Dict[Tuple[int, ...], sympy.Expr]:
    """
    Coordinates of `element` in the staircase basis.

    xi_n is reduced by the linear relation tower[n-1](xi_n) = 0, then xi_{n-1}
    by the quadratic tower[n-2](xi_{n-1}) = 0, down to xi_1 by f(xi_1) = 0.
    """
    expr = sympy.expand(sympy.sympify(element))
    u = ring.f.var
    for i in range(ring.n, 0, -1):
        x = ring.xi[i - 1]
        relation = sympy.expand(ring.tower[i - 1].as_expr().subs(u, x))
        if expr.has(x):
            expr = sympy.expand(sympy.rem(expr, relation, x))
    if expr == 0:
        return {}
    coords = {}
    for exp, coeff in Poly(expr, *ring.xi).terms():
        coeff = sympy.expand(coeff)
        if coeff != 0:
            coords[tuple(exp)] = coeff
    for exp in coords:
        if any(e > ring.n - i for i, e in enumerate(exp, start=1)):
            raise VerificationError(f"Normal form left {exp} outside the staircase")
    return dict(sorted(coords.items()))


def coords_to_expr(ring: SplitRing, coords: Dict[Tuple[int, ...], sympy.Expr]):
    return sympy.expand(sum(c * sympy.prod([x ** e for x, e in zip(ring.xi, exp)]) for exp, c in coords.items()))


def fact_presentation(f: UniPolyOverRing, p: int, prefix: str = "b") -> FactRing:
    """Divide f by g = u^p + b_1 u^{p-1} + ... + b_p; the remainder coefficients are the relations"""
    if not 0 <= p <= f.degree:
        raise InvalidInputError(f"Need 0 <= p <= deg f = {f.degree}, got p={p}")
    b = _symbols(prefix, p)
    clash = set(b) & set(f.base_gens)
    if clash:
        raise InvalidInputError(f"Generator names {sorted(map(str, clash))} clash with the coefficients of f")
    g = UniPolyOverRing((sympy.Integer(1),) + b, f.var, b, tuple(range(1, p + 1)))
    h, remainder = monic_divmod(f, g)
    return FactRing(f, p, b, g, h, tuple(sympy.expand(r) for r in remainder))


def substitute_back(ring: FactRing) -> bool:
    """
    The raw presentation imposes f = g*h coefficientwise, with the c_j free.
    Substituting the cofactor coefficients for the c_j must leave exactly
    the p remainder relations.
    """
    u = ring.f.var
    residual = sympy.expand(ring.f.as_expr() - ring.g.as_expr() * ring.cofactor.as_expr())
    remainder = sympy.expand(sum(r * u ** (ring.p - 1 - i) for i, r in enumerate(ring.relations)))
    if sympy.expand(residual - remainder) != 0:
        logger.error(f"Cofactor substitution leaves {residual - remainder}")
        raise VerificationError("Factorization relations do not match f - g*h")
    return True


def split_graded_dims(n: int) -> GradedQuotientReport:
    """Graded dims of Split(u^n) from the elementary-symmetric relations (halved degrees)"""
    ring = split_presentation(UniPolyOverRing((1,) + (0,) * n))
    rels = [MultiPoly.from_expr(r, ring.xi) for r in ring.relations]
    return graded_quotient_dims((1,) * n, rels, n * (n - 1) // 2 + 1)


def fact_graded_dims(N: int, s: int) -> GradedQuotientReport:
    """Graded dims of Fact(u^N, s) in halved degrees"""
    ring = fact_presentation(UniPolyOverRing((1,) + (0,) * N), s)
    return graded_quotient_dims(tuple(range(1, s + 1)), ring.relation_polys(), s * (N - s) + 1)


def verify_free_rank(kind: str, f: UniPolyOverRing, p: Optional[int] = None) -> FreeRankReport:
    """
    dim_Q of Split(f) or Fact(f, p) at a rational specialization of f.

    For f = u^n the relations are homogeneous and the graded dims are
    computed directly. Otherwise the filtered dimension is computed up to
    the socle degree of the u^n case, where it has stabilized.
    """
    if not f.is_rational():
        raise InvalidInputError("Free rank is checked at rational specializations of f")
    n = f.degree
    homogeneous = all(c == 0 for c in f.coeffs[1:])

    if kind == "split":
        ring = split_presentation(f)
        weights = (1,) * n
        rels = [MultiPoly.from_expr(r, ring.xi, weights) for r in ring.relations]
        top = n * (n - 1) // 2
        expected = factorial(n)
        staircase = len(ring.staircase())
    elif kind == "fact":
        if p is None:
            raise InvalidInputError("Factorization rings need p")
        ring = fact_presentation(f, p)
        weights = tuple(range(1, p + 1))
        rels = ring.relation_polys()
        top = p * (n - p)
        expected = comb(n, p)
        staircase = None
    else:
        raise InvalidInputError(f"Unknown ring kind: {kind}")

    if not weights:
        report = FreeRankReport(kind, n, p, expected, 1, staircase, [1], [1])
    elif homogeneous:
        graded = graded_quotient_dims(weights, rels, top + 1)
        report = FreeRankReport(kind, n, p, expected, graded.total(), staircase, graded.trimmed())
    else:
        filtration = filtered_quotient_dim(weights, rels, top + 1)
        report = FreeRankReport(kind, n, p, expected, filtration[-1], staircase, None, filtration)

    logger.info(f"{kind} f={f} p={p}: expected {expected}, computed {report.computed}")
    return report


def split_over_fact_check(n: int, p: int) -> Dict:
    """Poincare series of Split(u^n) = Fact(u^n, p) * Split(u^p) * Split(u^{n-p})"""
    if not 0 < p < n:
        raise InvalidInputError(f"Need 0 < p < n, got n={n}, p={p}")
    whole = split_graded_dims(n).trimmed()
    fact = fact_graded_dims(n, p).trimmed()
    product = _poly_product(_poly_product(fact, split_graded_dims(p).trimmed()), split_graded_dims(n - p).trimmed())
    return {"n": n, "p": p, "split": whole, "product": product, "ok": whole == product}


def _coeff_list(poly) -> List:
    if isinstance(poly, UniPolyOverRing):
        return list(poly.coeffs)
    return [sympy.sympify(c) for c in poly]


def sylvester(f, g, n: Optional[int] = None, m: Optional[int] = None) -> SylvesterMatrix:
    """
    Sylvester matrix of f (declared degree n) and g (declared degree m).

    f and g are UniPolyOverRing or coefficient lists, highest degree first.
    g may have fewer than m + 1 coefficients; it is padded with leading zeros.
    """
    a = _coeff_list(f)
    b = _coeff_list(g)
    n = len(a) - 1 if n is None else n
    m = len(b) - 1 if m is None else m
    if len(a) != n + 1:
        raise InvalidInputError(f"f has {len(a)} coefficients, expected {n + 1}")
    if sympy.expand(a[0]) == 0:
        raise InvalidInputError("Leading coefficient a_0 of f must be nonzero")
    if len(b) > m + 1:
        raise InvalidInputError(f"g has {len(b)} coefficients, more than m + 1 = {m + 1}")
    b = [sympy.Integer(0)] * (m + 1 - len(b)) + b

    size = n + m
    matrix = sympy.zeros(size, size)
    for i in range(m):
        for j, c in enumerate(a):
            matrix[i, i + j] = c
    for i in range(n):
        for j, c in enumerate(b):
            matrix[m + i, i + j] = c

    det = sympy.expand(matrix.det(method="bareiss")) if size else sympy.Integer(1)
    nullity = None
    if all(entry.is_Rational for entry in matrix):
        nullity = size - matrix.rank()
    return SylvesterMatrix(matrix, n, m, det, nullity)


def discriminant(f: UniPolyOverRing) -> sympy.Expr:
    """(-1)^{n(n-1)/2} det Syl_{n,n-1}(f, f'), so that disc(u^2 + a1 u + a2) = a1^2 - 4 a2"""
    n = f.degree
    if n < 1:
        raise InvalidInputError("Discriminant needs deg f >= 1")
    if not f.is_monic():
        raise InvalidInputError(f"{f} is not monic")
    syl = sylvester(f, f.derivative_coeffs(), n, n - 1)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sympy.expand(sign * syl.det)


def planted_resultant(f_roots: Sequence, g_roots: Sequence) -> sympy.Expr:
    """Res(f, g) = prod (r - s) over roots r of f and s of g, for monic f and g"""
    return sympy.Mul(*[sympy.Rational(r) - sympy.Rational(s) for r in f_roots for s in g_roots])


def gcd_nullity_trials(seed: int, trials: int, max_gcd: int = 3) -> Dict:
    """
    Plant a common factor of known degree and read it back off the Sylvester
    matrix: for rational f and g the nullity equals deg gcd(f, g).
    """
    rng = np.random.default_rng(seed)
    u = Symbol("u")
    failures = []
    for trial in range(trials):
        k = int(rng.integers(0, max_gcd + 1))
        n_extra, m_extra = int(rng.integers(1, 4)), int(rng.integers(0, 4))
        roots = [int(r) for r in rng.choice(np.arange(-20, 21), size=k + n_extra + m_extra, replace=False)]
        shared, only_f, only_g = roots[:k], roots[k : k + n_extra], roots[k + n_extra :]
        f = UniPolyOverRing.from_roots(shared + only_f, u)
        g = UniPolyOverRing.from_roots(shared + only_g, u)
        syl = sylvester(f, g)
        resultant = planted_resultant(shared + only_f, shared + only_g)
        if syl.nullity != k or syl.det != resultant:
            failures.append({
                "trial": trial, "f": str(f), "g": str(g), "gcd_degree": k,
                "nullity": syl.nullity, "det": str(syl.det), "resultant": str(resultant),
            })
    if failures:
        logger.error(f"{len(failures)} of {trials} Sylvester nullity trials failed")
    return {"seed": seed, "trials": trials, "failures": failures, "ok": not failures}


def discriminant_trials(seed: int, trials: int, max_degree: int = 5) -> Dict:
    """discriminant(f) against prod_{i<j} (r_i - r_j)^2 for f with random integer roots"""
    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(trials):
        n = int(rng.integers(1, max_degree + 1))
        roots = [int(r) for r in rng.integers(-9, 10, size=n)]
        expected = sympy.prod([(roots[i] - roots[j]) ** 2 for i, j in combinations(range(n), 2)])
        found = discriminant(UniPolyOverRing.from_roots(roots))
        if sympy.expand(found - expected) != 0:
            failures.append({"trial": trial, "roots": roots, "expected": str(expected), "found": str(found)})
    if failures:
        logger.error(f"{len(failures)} of {trials} discriminant trials failed")
    return {"seed": seed, "trials": trials, "failures": failures, "ok": not failures}


def regular_representation_traces(roots: Sequence) -> Dict[Tuple[int, ...], sympy.Expr]:
    """
    Trace of each permutation of the xi's acting on Split(f), f = prod (u - root).

    With distinct rational roots the ring is the regular representation of
    S_n, so only the identity has nonzero trace (n!).
    """
    f = UniPolyOverRing.from_roots(roots)
    ring = split_presentation(f)
    basis = ring.staircase()
    monomials = ring.basis_monomials()
    traces = {}
    for perm in permutations(range(ring.n)):
        mapping = {ring.xi[i]: ring.xi[perm[i]] for i in range(ring.n)}
        trace = sympy.Integer(0)
        for exp, mono in zip(basis, monomials):
            image = split_normal_form(ring, mono.xreplace(mapping))
            trace += image.get(exp, 0)
        traces[perm] = sympy.simplify(trace)
    return traces


class RingService:
    """Front door for the ring computations used by the command line"""

    def __init__(self):
        self.settings = get_settings()

    def split_report(self, f: UniPolyOverRing) -> Dict:
        ring = split_presentation(f)
        report = ring.to_dict()
        if f.is_rational():
            rank = verify_free_rank("split", f)
            if not rank.ok:
                logger.error(f"Split ring rank mismatch: {rank.to_dict()}")
                raise VerificationError(f"Split({f}) has dimension {rank.computed}, expected {rank.expected}")
            report["free_rank"] = rank.to_dict()
            if all(c == 0 for c in f.coeffs[1:]):
                expected = q_factorial_dims(f.degree).halved().as_list()
                report["flag_poincare"] = expected
                if rank.graded_dims != expected:
                    raise VerificationError(f"Split(u^{f.degree}) dims {rank.graded_dims} != {expected}")
        return report

    def fact_report(self, f: UniPolyOverRing, p: int) -> Dict:
        ring = fact_presentation(f, p)
        substitute_back(ring)
        report = ring.to_dict()
        if f.is_rational():
            rank = verify_free_rank("fact", f, p)
            if not rank.ok:
                logger.error(f"Factorization ring rank mismatch: {rank.to_dict()}")
                raise VerificationError(f"Fact({f}, {p}) has dimension {rank.computed}, expected {rank.expected}")
            report["free_rank"] = rank.to_dict()
            if all(c == 0 for c in f.coeffs[1:]):
                expected = gaussian_poincare(p, f.degree).halved().as_list()
                report["grassmann_poincare"] = expected
                if rank.graded_dims != expected:
                    raise VerificationError(f"Fact(u^{f.degree}, {p}) dims {rank.graded_dims} != {expected}")
        return report

    def gcd_trials(self, seed: Optional[int] = None, trials: Optional[int] = None) -> Dict:
        seed = self.settings.seed if seed is None else seed
        trials = self.settings.trials if trials is None else trials
        report = gcd_nullity_trials(seed, trials)
        logger.info(f"Sylvester nullity trials: {trials - len(report['failures'])}/{trials} passed (seed {seed})")
        return report

    def discriminant_trials(self, seed: Optional[int] = None, trials: Optional[int] = None) -> Dict:
        seed = self.settings.seed if seed is None else seed
        trials = self.settings.trials if trials is None else trials
        return discriminant_trials(seed, trials)
