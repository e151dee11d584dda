"""
Brute-force Tor_p^S(S/I, C)_d for the ideal I of (t+1)-minors of a generic
n x m matrix, as the homology of the Koszul complex

    ... -> L^p(x) (x) (S/I)(-p) -> L^{p-1}(x) (x) (S/I)(-p+1) -> ...

Everything is homogeneous for the torus of GL(V0) x GL(V1): the variable
x_jk has weight e_j + e_{n+k}. Quotient pieces, chain groups and boundary
maps are built one torus weight at a time, with exact rational ranks.
"""

import concurrent.futures
import logging
from collections import Counter, defaultdict
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, Iterator, List, Optional, Tuple

import sympy
from sympy import Matrix, Poly
from sympy.polys.domains import QQ

from ..utils.config import get_settings
from ..utils.errors import ResourceLimitError, VerificationError
from .lascoux_service import DetVarSpec, betti_numbers, betti_table
from .partition_service import schur_weights
from .polynomial_service import MultiPoly, SparseRow, exact_rank, graded_quotient_dims, rref_rows

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Weight = Tuple[int, ...]


@dataclass(frozen=True)
class OracleJob:
    spec: DetVarSpec
    d_max: int
    p_max: Optional[int] = None
    characters: bool = False
    reverse: bool = False

    @property
    def p_limit(self) -> int:
        top = self.spec.n * self.spec.m
        return top if self.p_max is None else min(self.p_max, top)

    def check_limits(self) -> None:
        settings = get_settings()
        variables = self.spec.n * self.spec.m
        if variables > settings.oracle_max_vars:
            raise ResourceLimitError(
                f"Oracle limited to n*m <= {settings.oracle_max_vars} variables, got {variables}"
            )
        if not 0 <= self.d_max <= settings.oracle_max_degree:
            raise ResourceLimitError(f"Oracle limited to d_max <= {settings.oracle_max_degree}, got {self.d_max}")


@dataclass
class TorDims:
    job: OracleJob
    dims: Dict[Tuple[int, int], int] = field(default_factory=dict)
    chain_dims: Dict[Tuple[int, int], int] = field(default_factory=dict)
    quotient_dims: Dict[int, int] = field(default_factory=dict)
    characters: Dict[Tuple[int, int], Counter] = field(default_factory=dict)

    def get(self, p: int, d: int) -> int:
        return self.dims.get((p, d), 0)

    def nonzero(self) -> Dict[Tuple[int, int], int]:
        return {key: v for key, v in sorted(self.dims.items()) if v}

    def to_dict(self) -> Dict:
        out = {
            "spec": self.job.spec.to_dict(),
            "d_max": self.job.d_max,
            "p_max": self.job.p_limit,
            "tor": [{"p": p, "d": d, "dim": v} for (p, d), v in self.nonzero().items()],
            "quotient_dims": [self.quotient_dims.get(d, 0) for d in range(self.job.d_max + 1)],
            "chain": [{"p": p, "d": d, "dim": v} for (p, d), v in sorted(self.chain_dims.items()) if v],
        }
        if self.job.characters:
            out["characters"] = [
                {"p": p, "d": d, "weights": [{"weight": list(w), "mult": c} for w, c in sorted(char.items())]}
                for (p, d), char in sorted(self.characters.items())
                if char
            ]
        return out


@dataclass
class QuotientBlock:
    """(S/I) in one torus weight: standard monomials and the normal form of the others"""

    standard: List[Exponent]
    index: Dict[Exponent, int]
    reductions: Dict[Exponent, Dict[int, Fraction]]

    def normal_form(self, exp: Exponent) -> Dict[int, Fraction]:
        if exp in self.index:
            return {self.index[exp]: Fraction(1)}
        return self.reductions[exp]


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


class KoszulOracle:
    """Koszul homology of S/I_{t+1} for the generic n x m matrix"""

    def __init__(self, n: int, m: int, t: int, reverse: bool = False):
        self.n, self.m, self.t = n, m, t
        self.reverse = reverse
        self.N = n * m
        self.symbols = [sympy.Symbol(f"x{j}_{k}") for j in range(n) for k in range(m)]
        self.var_weights = [self._unit_weight(v) for v in range(self.N)]
        self.minor_polys: List[MultiPoly] = self._minors()
        self.minors = [(self.weight_of(next(iter(p.terms))), p.terms) for p in self.minor_polys]
        self._blocks: Dict[Weight, QuotientBlock] = {}
        self._monomials: Dict[Weight, List[Exponent]] = {}

    def _unit_weight(self, v: int) -> Weight:
        j, k = divmod(v, self.m)
        w = [0] * (self.n + self.m)
        w[j] += 1
        w[self.n + k] += 1
        return tuple(w)

    def weight_of(self, exp: Exponent) -> Weight:
        w = [0] * (self.n + self.m)
        for v, e in enumerate(exp):
            if e:
                j, k = divmod(v, self.m)
                w[j] += e
                w[self.n + k] += e
        return tuple(w)

    def _minors(self) -> List[MultiPoly]:
        size = self.t + 1
        if size > min(self.n, self.m):
            return []
        X = Matrix(self.n, self.m, self.symbols)
        minors = []
        for rows in combinations(range(self.n), size):
            for cols in combinations(range(self.m), size):
                det = X.extract(list(rows), list(cols)).det(method="berkowitz")
                minors.append(MultiPoly(Poly(det, *self.symbols, domain=QQ), (1,) * self.N))
        return minors

    def monomials_of_weight(self, w: Weight) -> List[Exponent]:
        """Contingency tables with row sums w[:n] and column sums w[n:]"""
        if w in self._monomials:
            return self._monomials[w]
        rows, cols = w[: self.n], w[self.n :]
        out: List[Exponent] = []

        def fill(j: int, remaining_cols: Tuple[int, ...], prefix: Tuple[int, ...]):
            if j == self.n:
                if not any(remaining_cols):
                    out.append(prefix)
                return
            for row in self._row_splits(rows[j], remaining_cols):
                fill(j + 1, tuple(c - r for c, r in zip(remaining_cols, row)), prefix + row)

        if sum(rows) == sum(cols) and min(w, default=0) >= 0:
            fill(0, tuple(cols), ())
        if self.reverse:
            out.reverse()
        self._monomials[w] = out
        return out

    def _row_splits(self, total: int, caps: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        if not caps:
            if total == 0:
                yield ()
            return
        for first in range(min(total, caps[0]), -1, -1):
            for rest in self._row_splits(total - first, caps[1:]):
                yield (first,) + rest

    def quotient_block(self, w: Weight) -> QuotientBlock:
        if w in self._blocks:
            return self._blocks[w]
        monomials = self.monomials_of_weight(w)
        columns = {exp: i for i, exp in enumerate(monomials)}
        rows: List[SparseRow] = []
        for minor_weight, terms in self.minors:
            rest = tuple(a - b for a, b in zip(w, minor_weight))
            if min(rest) < 0:
                continue
            for mu in self.monomials_of_weight(rest):
                rows.append({columns[tuple(a + b for a, b in zip(exp, mu))]: c for exp, c in terms.items()})
        reduced, pivots = rref_rows(rows, len(monomials))
        pivot_set = set(pivots)
        standard = [exp for i, exp in enumerate(monomials) if i not in pivot_set]
        index = {exp: i for i, exp in enumerate(standard)}
        reductions = {}
        for row, pivot in zip(reduced, pivots):
            reductions[monomials[pivot]] = {
                index[monomials[col]]: -value for col, value in row.items() if col != pivot and value
            }
        block = QuotientBlock(standard, index, reductions)
        self._blocks[w] = block
        return block

    def normal_form(self, exp: Exponent) -> Dict[int, Fraction]:
        return self.quotient_block(self.weight_of(exp)).normal_form(exp)

    def chain_basis(self, w: Weight, p: int) -> List[Tuple[Tuple[int, ...], int]]:
        """Pairs (T, s): wedge of the variables in T times standard monomial s of weight w - wt(T)"""
        basis = []
        for T in combinations(range(self.N), p):
            rest = list(w)
            for v in T:
                rest = [a - b for a, b in zip(rest, self.var_weights[v])]
            if min(rest, default=0) < 0:
                continue
            block = self.quotient_block(tuple(rest))
            basis.extend((T, s) for s in range(len(block.standard)))
        return basis

    def boundary(self, w: Weight, p: int, source: List, target_index: Dict) -> List[SparseRow]:
        """Images of the degree-p chain basis in the degree-(p-1) basis"""
        rows = []
        for T, s in source:
            nu = self.quotient_block(self._rest_weight(w, T)).standard[s]
            image: Dict[int, Fraction] = defaultdict(Fraction)
            for i, v in enumerate(T):
                face = T[:i] + T[i + 1 :]
                product = tuple(e + (1 if idx == v else 0) for idx, e in enumerate(nu))
                sign = -1 if i % 2 else 1
                for s2, c in self.normal_form(product).items():
                    image[target_index[(face, s2)]] += sign * c
            rows.append({k: c for k, c in image.items() if c})
        return rows

    def _rest_weight(self, w: Weight, T: Tuple[int, ...]) -> Weight:
        rest = list(w)
        for v in T:
            rest = [a - b for a, b in zip(rest, self.var_weights[v])]
        return tuple(rest)

    def weights_of_degree(self, d: int) -> Iterator[Weight]:
        for rows in compositions(d, self.n):
            for cols in compositions(d, self.m):
                yield rows + cols

    def weight_homology(self, w: Weight, p_top: int) -> Dict[int, Tuple[int, int]]:
        """p -> (chain dim, homology dim) in weight w, for p = 0..p_top"""
        bases = [self.chain_basis(w, p) for p in range(p_top + 1)]
        indices = [{elem: i for i, elem in enumerate(basis)} for basis in bases]
        images = [None] + [self.boundary(w, p, bases[p], indices[p - 1]) for p in range(1, p_top + 1)]
        ranks = [0] + [exact_rank(images[p], len(bases[p - 1])) for p in range(1, p_top + 1)] + [0]

        for p in range(2, p_top + 1):
            for row in images[p]:
                composite: Dict[int, Fraction] = defaultdict(Fraction)
                for k, c in row.items():
                    for k2, c2 in images[p - 1][k].items():
                        composite[k2] += c * c2
                if any(composite.values()):
                    logger.error(f"d^2 != 0 in weight {w}, degree {p}")
                    raise VerificationError(f"Koszul boundary does not square to zero at weight {w}, p={p}")

        return {p: (len(bases[p]), len(bases[p]) - ranks[p] - ranks[p + 1]) for p in range(p_top + 1)}


@lru_cache(maxsize=8)
def _oracle_for(n: int, m: int, t: int, reverse: bool) -> KoszulOracle:
    return KoszulOracle(n, m, t, reverse)


def _solve_weight(args) -> Tuple[Weight, Dict[int, Tuple[int, int]]]:
    n, m, t, reverse, w, p_top = args
    return w, _oracle_for(n, m, t, reverse).weight_homology(w, p_top)


def _solve_all(tasks: List) -> List:
    settings = get_settings()
    if settings.parallel and len(tasks) > 1:
        try:
            with concurrent.futures.ProcessPoolExecutor(max_workers=settings.workers) as executor:
                return list(executor.map(_solve_weight, tasks, chunksize=max(1, len(tasks) // (4 * settings.workers))))
        except (OSError, BrokenProcessPool) as e:
            logger.warning(f"Process pool unavailable ({e}), solving weight blocks sequentially")
    return [_solve_weight(task) for task in tasks]


def tor_dims(job: OracleJob) -> TorDims:
    job.check_limits()
    spec = job.spec
    oracle = _oracle_for(spec.n, spec.m, spec.t, job.reverse)
    result = TorDims(job)
    tasks = []
    for d in range(job.d_max + 1):
        p_top = min(d, oracle.N)
        for w in oracle.weights_of_degree(d):
            tasks.append((spec.n, spec.m, spec.t, job.reverse, w, p_top))
    logger.info(f"Oracle for {spec}: {len(tasks)} weight blocks up to degree {job.d_max}")

    alternating: Dict[int, int] = defaultdict(int)
    for w, homology in _solve_all(tasks):
        d = sum(w[: spec.n])
        for p, (chain_dim, h) in homology.items():
            alternating[d] += (-1) ** p * h
            if p > job.p_limit:
                continue
            result.chain_dims[(p, d)] = result.chain_dims.get((p, d), 0) + chain_dim
            result.dims[(p, d)] = result.dims.get((p, d), 0) + h
            if job.characters and h:
                result.characters.setdefault((p, d), Counter())[w] += h
    result.quotient_dims = {d: result.chain_dims.get((0, d), 0) for d in range(job.d_max + 1)}

    _check_low_degrees(oracle, result)
    _check_quotient_dims(oracle, result, alternating)
    return result


def _check_low_degrees(oracle: KoszulOracle, result: TorDims) -> None:
    """Tor_0 is C in degree 0 and Tor_1 is spanned by the minors in degree t+1"""
    d_max = result.job.d_max
    tor0 = [result.get(0, d) for d in range(d_max + 1)]
    if tor0 != [1] + [0] * d_max:
        raise VerificationError(f"Tor_0 should be C in degree 0, got {tor0}")
    if result.job.p_limit < 1:
        return
    tor1 = {d: result.get(1, d) for d in range(d_max + 1) if result.get(1, d)}
    size = oracle.t + 1
    expected = {size: len(oracle.minor_polys)} if oracle.minor_polys and size <= d_max else {}
    if tor1 != expected:
        raise VerificationError(f"Tor_1 should be the span of the {size}-minors, got {tor1}")


def hilbert_numerator(quotient_dims: List[int], N: int) -> List[int]:
    """Coefficients of (1 - q)^N H_{S/I}(q), truncated to the given degrees"""
    return [
        sum((-1) ** p * comb(N, p) * quotient_dims[d - p] for p in range(min(d, N) + 1))
        for d in range(len(quotient_dims))
    ]


def _check_quotient_dims(oracle: KoszulOracle, result: TorDims, alternating: Dict[int, int]) -> None:
    """
    (S/I)_d from the chain group against an independent rank count of the
    ideal, and sum_p (-1)^p dim Tor_p(S/I)_d against the Hilbert numerator of
    that count.
    """
    d_max = result.job.d_max
    if oracle.N == 0:
        expected = [1] + [0] * d_max
    else:
        expected = graded_quotient_dims(
            (1,) * oracle.N, oracle.minor_polys, d_max, multigrading=oracle.var_weights
        ).dims
    found = [result.quotient_dims.get(d, 0) for d in range(d_max + 1)]
    if found != expected:
        logger.error(f"Quotient dims {found} from the complex, {expected} from the ideal")
        raise VerificationError("Degree-0 chain groups disagree with the graded quotient dimensions")

    numerator = hilbert_numerator(list(expected), oracle.N)
    tor_sums = [alternating.get(d, 0) for d in range(d_max + 1)]
    if tor_sums != numerator:
        logger.error(f"Alternating Tor sums {tor_sums}, Hilbert numerator {numerator}")
        raise VerificationError("Koszul homology disagrees with the Hilbert series of the quotient")


def characters_from_table(spec: DetVarSpec, d_max: int) -> Dict[Tuple[int, int], Counter]:
    """Torus characters of the Betti table summands: contents of S_P(V0) and S_Q(V1*)"""
    chars: Dict[Tuple[int, int], Counter] = {}
    for entry in betti_table(spec).entries:
        if entry.d > d_max:
            continue
        char = chars.setdefault((entry.p, entry.d), Counter())
        for wP, cP in schur_weights(entry.rep.P, spec.n).items():
            for wQ, cQ in schur_weights(entry.rep.Q, spec.m).items():
                char[wP + wQ] += cP * cQ
    return chars


@dataclass
class CompareReport:
    spec: DetVarSpec
    d_max: int
    rows: List[Dict] = field(default_factory=list)
    characters_checked: bool = False
    character_mismatches: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def mismatches(self) -> List[Dict]:
        return [row for row in self.rows if not row["match"]]

    @property
    def all_match(self) -> bool:
        return not self.mismatches and not self.character_mismatches

    def to_dict(self) -> Dict:
        return {
            "spec": self.spec.to_dict(),
            "d_max": self.d_max,
            "rows": self.rows,
            "characters_checked": self.characters_checked,
            "character_mismatches": [list(x) for x in self.character_mismatches],
            "all_match": self.all_match,
        }


def compare_with_lascoux(spec: DetVarSpec, d_max: int, characters: bool = False, reverse: bool = False) -> CompareReport:
    tor = tor_dims(OracleJob(spec, d_max, characters=characters, reverse=reverse))
    predicted = {key: v for key, v in betti_numbers(betti_table(spec)).items() if key[1] <= d_max}
    report = CompareReport(spec, d_max, characters_checked=characters)
    for p, d in sorted(set(predicted) | set(tor.nonzero())):
        lascoux, oracle = predicted.get((p, d), 0), tor.get(p, d)
        report.rows.append({"p": p, "d": d, "lascoux": lascoux, "oracle": oracle, "match": lascoux == oracle})
    if characters:
        expected = characters_from_table(spec, d_max)
        for key in sorted(set(expected) | set(tor.characters)):
            if +expected.get(key, Counter()) != +tor.characters.get(key, Counter()):
                report.character_mismatches.append(key)
    for row in report.mismatches:
        logger.error(f"{spec}: Tor_{row['p']} in degree {row['d']} is {row['oracle']}, formula gives {row['lascoux']}")
    return report


class KoszulService:
    def tor(self, job: OracleJob) -> TorDims:
        return tor_dims(job)

    def compare(self, spec: DetVarSpec, d_max: int, characters: bool = False) -> CompareReport:
        report = compare_with_lascoux(spec, d_max, characters)
        logger.info(f"{spec}: {len(report.rows)} bidegrees compared up to degree {d_max}, all match: {report.all_match}")
        return report
