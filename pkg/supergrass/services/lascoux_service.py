"""
Betti tables of determinantal varieties by Lascoux's formula.

Z0 is the variety of maps V0 -> V1 of rank <= t, with a = t in the
formula. Each summand S_P(V0) (x) S_Q(V1*) of Tor_p(O_Z0, C)_{p+q} comes from
a triple (b, alpha, beta) with alpha in a b x (m-t-b) box and beta in an
(n-t-b) x b box; p = b^2 + |alpha| + |beta| and q = a*b.
"""

import concurrent.futures
import logging
from concurrent.futures.process import BrokenProcessPool
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, List, Tuple

from ..utils.config import get_settings
from ..utils.errors import InvalidInputError, VerificationError
from .partition_service import Partition, conjugate, dim_schur, partitions_in_box

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DetVarSpec:
    """Maps C^n -> C^m of rank at most t"""

    n: int
    m: int
    t: int

    def __post_init__(self):
        for name in ("n", "m", "t"):
            if not isinstance(getattr(self, name), int):
                raise InvalidInputError(f"{name} must be an integer")
        if self.n < 0 or self.m < 0:
            raise InvalidInputError(f"Dimensions must be nonnegative, got n={self.n}, m={self.m}")
        if not 0 <= self.t <= min(self.n, self.m):
            raise InvalidInputError(f"Rank cutoff must satisfy 0 <= t <= min(n, m), got t={self.t}")

    def to_dict(self) -> Dict[str, int]:
        return {"n": self.n, "m": self.m, "t": self.t}


@dataclass(frozen=True)
class RepPair:
    """S_P(V0) (x) S_Q(V1*)"""

    P: Partition
    Q: Partition
    dim: int

    @classmethod
    def of(cls, P: Partition, Q: Partition, n: int, m: int) -> "RepPair":
        return cls(P, Q, dim_schur(P, n) * dim_schur(Q, m))

    def key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return self.P.parts, self.Q.parts

    def is_trivial(self) -> bool:
        return not self.P.parts and not self.Q.parts

    def __str__(self):
        return f"S{self.P}(V0) x S{self.Q}(V1*)"


@dataclass(frozen=True)
class BettiEntry:
    p: int
    d: int
    rep: RepPair
    b: int
    alpha: Partition
    beta: Partition

    @property
    def strand(self) -> int:
        return self.d - self.p

    def sort_key(self):
        return self.p, self.d, self.rep.P.parts, self.rep.Q.parts

    def to_dict(self) -> Dict:
        return {
            "p": self.p,
            "d": self.d,
            "P": self.rep.P.to_list(),
            "Q": self.rep.Q.to_list(),
            "dim": self.rep.dim,
            "b": self.b,
            "alpha": self.alpha.to_list(),
            "beta": self.beta.to_list(),
        }


@dataclass
class BettiTable:
    spec: DetVarSpec
    entries: List[BettiEntry]

    def at(self, p: int, d: int) -> List[BettiEntry]:
        return [e for e in self.entries if e.p == p and e.d == d]

    def dims(self) -> Dict[Tuple[int, int], int]:
        return betti_numbers(self)

    def strands(self) -> List[int]:
        return sorted({e.strand for e in self.entries})

    def grid(self) -> Tuple[List[str], List[List[str]]]:
        """Rows are strands q, columns homological degrees p"""
        numbers = betti_numbers(self)
        max_p = max((p for p, _ in numbers), default=0)
        headers = ["q\\p"] + [str(p) for p in range(max_p + 1)]
        rows = []
        for q in self.strands():
            rows.append([str(q)] + [str(numbers.get((p, p + q), "-")) for p in range(max_p + 1)])
        return headers, rows

    def to_dict(self) -> Dict:
        return {"spec": self.spec.to_dict(), "entries": [e.to_dict() for e in self.entries]}


def _entries_for_b(spec: DetVarSpec, b: int) -> List[BettiEntry]:
    n, m, a = spec.n, spec.m, spec.t
    entries = []
    for alpha in partitions_in_box(b, m - a - b):
        alpha_t = conjugate(alpha)
        for beta in partitions_in_box(n - a - b, b):
            beta_t = conjugate(beta)
            P = Partition(tuple(b + alpha.part(i) for i in range(b)) + (b,) * a + beta.parts)
            Q = Partition(tuple(b + beta_t.part(i) for i in range(b)) + (b,) * a + alpha_t.parts)
            rep = RepPair.of(P, Q, n, m)
            if rep.dim == 0:
                # the box bounds keep l(P) <= n and l(Q) <= m
                raise VerificationError(f"Zero Schur factor for b={b}, alpha={alpha}, beta={beta}")
            p = b * b + alpha.size() + beta.size()
            entries.append(BettiEntry(p, p + a * b, rep, b, alpha, beta))
    return entries


def betti_table(spec: DetVarSpec, parallel: bool = False) -> BettiTable:
    """Every summand of Tor^S_p(O_Z0, C)_d, sorted by (p, d, P, Q)"""
    b_max = min(spec.m - spec.t, spec.n - spec.t)
    if parallel and b_max > 0:
        entries = _parallel_entries(spec, b_max)
    else:
        entries = [e for b in range(b_max + 1) for e in _entries_for_b(spec, b)]
    entries.sort(key=BettiEntry.sort_key)
    logger.info(f"Betti table for {spec}: {len(entries)} summands over b <= {b_max}")
    return BettiTable(spec, entries)


def _parallel_entries(spec: DetVarSpec, b_max: int) -> List[BettiEntry]:
    workers = get_settings().workers
    try:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            chunks = executor.map(_entries_for_b, [spec] * (b_max + 1), range(b_max + 1))
            return [e for chunk in chunks for e in chunk]
    except (OSError, BrokenProcessPool) as e:
        logger.warning(f"Process pool unavailable ({e}), enumerating sequentially")
        return [e for b in range(b_max + 1) for e in _entries_for_b(spec, b)]


def linear_strand(spec: DetVarSpec, k: int) -> List[Tuple[int, RepPair]]:
    """L_k = sum_p Tor_p(O_Z0, C)_{p+k}"""
    if k < 0:
        return []
    return [(e.p, e.rep) for e in betti_table(spec).entries if e.strand == k]


def strand_dim(spec: DetVarSpec, k: int) -> int:
    return sum(rep.dim for _, rep in linear_strand(spec, k))


def verify_multiplicity_free(spec: DetVarSpec) -> bool:
    counts = Counter(e.rep.key() for e in betti_table(spec).entries)
    repeated = [key for key, c in counts.items() if c > 1]
    if repeated:
        logger.error(f"Repeated summands in Betti table of {spec}: {repeated}")
    return not repeated


def betti_numbers(table: BettiTable) -> Dict[Tuple[int, int], int]:
    """(p, d) -> dim Tor_p(O_Z0, C)_d"""
    numbers: Dict[Tuple[int, int], int] = defaultdict(int)
    for e in table.entries:
        numbers[(e.p, e.d)] += e.rep.dim
    return dict(sorted(numbers.items()))


def hilbert_numerator_at_one(table: BettiTable) -> int:
    """sum_p (-1)^p dim Tor_p; nonzero only for t = min(n, m)"""
    return sum((-1) ** e.p * e.rep.dim for e in table.entries)


class LascouxService:
    """Betti tables with the settings-driven parallel switch"""

    def __init__(self):
        self.settings = get_settings()

    def table(self, spec: DetVarSpec) -> BettiTable:
        table = betti_table(spec, parallel=self.settings.parallel)
        if not verify_multiplicity_free(spec):
            raise VerificationError(f"Betti table of {spec} is not multiplicity-free")
        return table

    def strand(self, spec: DetVarSpec, k: int) -> Dict:
        terms = linear_strand(spec, k)
        return {
            "spec": spec.to_dict(),
            "k": k,
            "terms": [{"p": p, "P": rep.P.to_list(), "Q": rep.Q.to_list(), "dim": rep.dim} for p, rep in terms],
            "dim": sum(rep.dim for _, rep in terms),
        }
