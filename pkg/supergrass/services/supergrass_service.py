"""
Cohomology of the structure sheaf of the super Grassmannian Gr_{r|s}(C^{n|m}).

After normalizing to r >= s, put delta = m - n + r - s when r - s > n - m
(else 0) and t = m - delta. Then

    H^i = sum_j A_{2j} (x) L_{i-2j}

with A = H*(Gr_s(C^t)) and L_k the k-th linear strand of the resolution of
the rank <= t determinantal variety in Hom(C^n, C^m). A summand of L_k
sitting in Tor_p has parity (p + k) mod 2.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Tuple

from ..utils.config import get_settings
from ..utils.errors import InvalidInputError, VerificationError
from .grassmann_service import GrassSpec, graded_dims
from .lascoux_service import BettiTable, DetVarSpec, betti_table
from .partition_service import Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuperGrassSpec:
    """Gr_{r|s}(C^{n|m})"""

    n: int
    m: int
    r: int
    s: int

    def __post_init__(self):
        for name in ("n", "m", "r", "s"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise InvalidInputError(f"{name} must be a nonnegative integer, got {value!r}")
        if self.r > self.n or self.s > self.m:
            raise InvalidInputError(f"Need r <= n and s <= m, got {self}")

    def to_dict(self) -> Dict[str, int]:
        return {"n": self.n, "m": self.m, "r": self.r, "s": self.s}

    def __str__(self):
        return f"Gr_{{{self.r}|{self.s}}}(C^{{{self.n}|{self.m}}})"


@dataclass(frozen=True)
class Delta:
    value: int

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class CohomologyTerm:
    """A_{a_degree} (x) (summand of strand L_strand in Tor_p)"""

    a_degree: int
    a_dim: int
    strand: int
    p: int
    P: Partition
    Q: Partition
    rep_dim: int

    @property
    def dim(self) -> int:
        return self.a_dim * self.rep_dim

    @property
    def parity(self) -> int:
        return (self.p + self.strand) % 2

    def to_dict(self) -> Dict:
        return {
            "a_degree": self.a_degree,
            "strand": self.strand,
            "p": self.p,
            "P": self.P.to_list(),
            "Q": self.Q.to_list(),
            "dim": self.dim,
        }


@dataclass
class CohomologyGroup:
    i: int
    terms: List[CohomologyTerm] = field(default_factory=list)

    @property
    def even_dim(self) -> int:
        return sum(t.dim for t in self.terms if t.parity == 0)

    @property
    def odd_dim(self) -> int:
        return sum(t.dim for t in self.terms if t.parity == 1)

    @property
    def dim(self) -> int:
        return self.even_dim + self.odd_dim

    def rep_keys(self) -> set:
        return {(t.P.parts, t.Q.parts) for t in self.terms}

    def to_dict(self) -> Dict:
        return {
            "i": self.i,
            "even_dim": self.even_dim,
            "odd_dim": self.odd_dim,
            "terms": [t.to_dict() for t in self.terms],
        }


@dataclass(frozen=True)
class EulerCheck:
    formula: int
    computed: int

    @property
    def ok(self) -> bool:
        return self.formula == self.computed

    def to_dict(self) -> Dict[str, int]:
        return {"formula": self.formula, "computed": self.computed}


@dataclass
class CohomologyReport:
    spec: SuperGrassSpec
    normalized: SuperGrassSpec
    delta: Delta
    grass: GrassSpec
    table: BettiTable
    groups: List[CohomologyGroup]
    euler: Optional[EulerCheck] = None

    @property
    def rank_cutoff(self) -> int:
        return self.grass.N

    def dims(self) -> List[int]:
        return [g.dim for g in self.groups]

    def even_dims(self) -> List[int]:
        return [g.even_dim for g in self.groups]

    def odd_dims(self) -> List[int]:
        return [g.odd_dim for g in self.groups]

    def total_dim(self) -> int:
        return sum(self.dims())

    def group(self, i: int) -> CohomologyGroup:
        return self.groups[i] if 0 <= i < len(self.groups) else CohomologyGroup(i)

    def to_dict(self) -> Dict:
        d0, d1 = super_dimension(self.spec)
        return {
            "spec": self.spec.to_dict(),
            "normalized": self.normalized.to_dict(),
            "delta": self.delta.value,
            "rank_cutoff": self.rank_cutoff,
            "grassmannian": self.grass.to_dict(),
            "case": theorem_case(self.spec),
            "super_dimension": {"even": d0, "odd": d1},
            "groups": [g.to_dict() for g in self.groups],
            "totals": {"even": sum(self.even_dims()), "odd": sum(self.odd_dims()), "all": self.total_dim()},
            "euler": self.euler.to_dict() if self.euler else None,
        }


def normalize(spec: SuperGrassSpec) -> SuperGrassSpec:
    """Gr_{r|s}(C^{n|m}) = Gr_{s|r}(C^{m|n}); choose the side with r >= s"""
    if spec.r >= spec.s:
        return spec
    return SuperGrassSpec(spec.m, spec.n, spec.s, spec.r)


def delta(spec: SuperGrassSpec) -> Delta:
    if spec.r < spec.s:
        raise InvalidInputError(f"delta needs a normalized spec (r >= s), got {spec}")
    if spec.r - spec.s > spec.n - spec.m:
        return Delta(spec.m - spec.n + spec.r - spec.s)
    return Delta(0)


def super_dimension(spec: SuperGrassSpec) -> Tuple[int, int]:
    n, m, r, s = spec.n, spec.m, spec.r, spec.s
    return r * (n - r) + s * (m - s), r * (m - s) + s * (n - r)


def theorem_case(spec: SuperGrassSpec) -> str:
    """'a' when the cohomology is that of an ordinary Grassmannian (delta = 0)"""
    ns = normalize(spec)
    return "a" if ns.n - ns.m >= ns.r - ns.s else "b"


def cohomology(spec: SuperGrassSpec, parallel: bool = False) -> CohomologyReport:
    ns = normalize(spec)
    dlt = delta(ns)
    t = ns.m - dlt.value
    grass = GrassSpec(ns.s, t)
    a_dims = graded_dims(grass)
    table = betti_table(DetVarSpec(ns.n, ns.m, t), parallel=parallel)

    by_degree: Dict[int, List[CohomologyTerm]] = defaultdict(list)
    for a_degree, a_dim in a_dims.dims.items():
        for entry in table.entries:
            by_degree[a_degree + entry.strand].append(
                CohomologyTerm(a_degree, a_dim, entry.strand, entry.p, entry.rep.P, entry.rep.Q, entry.rep.dim)
            )
    top = max(by_degree, default=0)
    groups = [
        CohomologyGroup(i, sorted(by_degree.get(i, []), key=lambda t: (t.a_degree, t.p, t.P.parts, t.Q.parts)))
        for i in range(top + 1)
    ]
    report = CohomologyReport(spec, ns, dlt, grass, table, groups)
    logger.info(f"{spec}: delta={dlt.value}, t={t}, dims {report.dims()}")
    return report


def euler_formula(spec: SuperGrassSpec) -> int:
    ns = normalize(spec)
    if ns.n - ns.m >= ns.r - ns.s:
        return comb(ns.m, ns.s)
    if ns.r == ns.s and ns.m > ns.n:
        return comb(ns.n, ns.s)
    return 0


def euler_from_report(report: CohomologyReport) -> int:
    return sum((-1) ** g.i * (g.even_dim - g.odd_dim) for g in report.groups)


def euler_from_map_degree(spec: SuperGrassSpec) -> int:
    """Generic rank of O_Z over the rank <= t locus: binom(t, s) when that locus fills Hom(C^n, C^m)"""
    ns = normalize(spec)
    t = ns.m - delta(ns).value
    return comb(t, ns.s) if t == min(ns.n, ns.m) else 0


def super_euler(spec: SuperGrassSpec, report: Optional[CohomologyReport] = None) -> EulerCheck:
    """Closed form against the alternating sum over the computed cohomology"""
    report = report or cohomology(spec)
    check = EulerCheck(euler_formula(spec), euler_from_report(report))
    degree = euler_from_map_degree(spec)
    if not check.ok or degree != check.computed:
        logger.error(f"Euler characteristic mismatch for {spec}: {check}, map degree {degree}")
        raise VerificationError(
            f"Super Euler characteristic of {spec}: formula {check.formula}, computed {check.computed}"
        )
    return check


def invariant_dims(report: CohomologyReport) -> List[int]:
    """Dimension of the trivial-representation part of each H^i"""
    return [sum(t.dim for t in g.terms if not t.P.parts and not t.Q.parts) for g in report.groups]


def verify_adjacent_disjoint(report: CohomologyReport) -> bool:
    for lower, upper in zip(report.groups, report.groups[1:]):
        shared = lower.rep_keys() & upper.rep_keys()
        if shared:
            logger.error(f"H^{lower.i} and H^{upper.i} share {sorted(shared)}")
            return False
    return True


class SupergrassService:
    """Cohomology reports with every cross-check applied"""

    def __init__(self):
        self.settings = get_settings()

    def report(self, spec: SuperGrassSpec) -> CohomologyReport:
        report = cohomology(spec, parallel=self.settings.parallel)
        report.euler = super_euler(spec, report)
        if not verify_adjacent_disjoint(report):
            raise VerificationError(f"Adjacent cohomology groups of {spec} share a summand")
        expected = graded_dims(report.grass).as_list()
        found = invariant_dims(report)
        width = max(len(expected), len(found))
        if expected + [0] * (width - len(expected)) != found + [0] * (width - len(found)):
            raise VerificationError(f"Invariant part of H*({spec}) is {found}, expected {expected}")
        return report
