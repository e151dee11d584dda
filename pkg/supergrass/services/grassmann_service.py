"""Schubert calculus on H*(Gr_s(C^N)) with exact rational coefficients."""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Union

import sympy

from ..utils.errors import InvalidInputError, VerificationError
from .partition_service import (
    BoxBound,
    GradedDims,
    Partition,
    complement,
    gaussian_poincare,
    lr_expand_in_box,
    partitions_in_box,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GrassSpec:
    """Gr_s(C^N)"""

    s: int
    N: int

    def __post_init__(self):
        if not 0 <= self.s <= self.N:
            raise InvalidInputError(f"Need 0 <= s <= N, got s={self.s}, N={self.N}")

    @property
    def box(self) -> BoxBound:
        return BoxBound(self.s, self.N - self.s)

    @property
    def top_degree(self) -> int:
        return 2 * self.s * (self.N - self.s)

    def to_dict(self) -> Dict[str, int]:
        return {"s": self.s, "N": self.N}


@dataclass
class CohomologyClass:
    """Rational combination of Schubert classes sigma_lambda"""

    spec: GrassSpec
    terms: Dict[Partition, sympy.Rational] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for p, c in self.terms.items():
            if not self.spec.box.contains(p):
                raise InvalidInputError(f"{p} does not fit the {self.spec.s}x{self.spec.N - self.spec.s} box")
            c = sympy.Rational(c)
            if c:
                cleaned[p] = c
        self.terms = dict(sorted(cleaned.items(), key=lambda kv: (kv[0].size(), kv[0].parts)))

    def is_zero(self) -> bool:
        return not self.terms

    def degree_parts(self) -> Dict[int, "CohomologyClass"]:
        parts: Dict[int, Dict[Partition, sympy.Rational]] = defaultdict(dict)
        for p, c in self.terms.items():
            parts[2 * p.size()][p] = c
        return {d: CohomologyClass(self.spec, t) for d, t in sorted(parts.items())}

    def __add__(self, other: "CohomologyClass") -> "CohomologyClass":
        terms = dict(self.terms)
        for p, c in other.terms.items():
            terms[p] = terms.get(p, sympy.Integer(0)) + c
        return CohomologyClass(self.spec, terms)

    def scale(self, c: Union[int, sympy.Rational]) -> "CohomologyClass":
        return CohomologyClass(self.spec, {p: v * sympy.Rational(c) for p, v in self.terms.items()})

    def __mul__(self, other: "CohomologyClass") -> "CohomologyClass":
        return cup(self.spec, self, other)

    def __eq__(self, other):
        return isinstance(other, CohomologyClass) and self.spec == other.spec and self.terms == other.terms

    def to_list(self) -> List[Dict]:
        return [
            {"partition": p.to_list(), "coeff_num": int(c.p), "coeff_den": int(c.q)}
            for p, c in self.terms.items()
        ]

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*s{p}" if c != 1 else f"s{p}" for p, c in self.terms.items())


def basis(spec: GrassSpec, degree: int) -> List[Partition]:
    """Schubert basis of A_degree: partitions of degree/2 in the s x (N-s) box"""
    if degree < 0 or degree % 2:
        raise InvalidInputError(f"Cohomological degree must be even and nonnegative, got {degree}")
    return list(partitions_in_box(spec.s, spec.N - spec.s, degree // 2))


def schubert_class(spec: GrassSpec, p: Partition) -> CohomologyClass:
    return CohomologyClass(spec, {p: sympy.Integer(1)})


def unit(spec: GrassSpec) -> CohomologyClass:
    return schubert_class(spec, Partition())


def point_class(spec: GrassSpec) -> CohomologyClass:
    """sigma of the full box, the generator of the top degree"""
    return schubert_class(spec, Partition((spec.N - spec.s,) * spec.s))


def poincare_dual(spec: GrassSpec, p: Partition) -> Partition:
    return complement(p, spec.box)


def cup(spec: GrassSpec, x: CohomologyClass, y: CohomologyClass) -> CohomologyClass:
    """Bilinear extension of the Littlewood-Richardson rule truncated to the box"""
    terms: Dict[Partition, sympy.Rational] = defaultdict(lambda: sympy.Integer(0))
    for p, a in x.terms.items():
        for q, b in y.terms.items():
            for lam, c in lr_expand_in_box(p, q, spec.box).items():
                terms[lam] += a * b * c
    return CohomologyClass(spec, dict(terms))


def total_dim(spec: GrassSpec) -> int:
    value = comb(spec.N, spec.s)
    graded = gaussian_poincare(spec.s, spec.N).total()
    if graded != value:
        raise VerificationError(f"Poincare polynomial of Gr_{spec.s}(C^{spec.N}) sums to {graded}, not {value}")
    return value


def graded_dims(spec: GrassSpec) -> GradedDims:
    return gaussian_poincare(spec.s, spec.N)


class GrassmannService:
    """Tables of the Schubert basis and of products, for the command line"""

    def poincare(self, spec: GrassSpec) -> Dict:
        dims = graded_dims(spec)
        return {
            "spec": spec.to_dict(),
            "dims": dims.to_dict(),
            "total": total_dim(spec),
            "basis": {
                str(d): [p.to_list() for p in basis(spec, d)] for d in range(0, spec.top_degree + 1, 2)
            },
        }

    def multiply(self, spec: GrassSpec, p: Partition, q: Partition) -> CohomologyClass:
        result = cup(spec, schubert_class(spec, p), schubert_class(spec, q))
        logger.debug(f"s{p} * s{q} = {result} on Gr_{spec.s}(C^{spec.N})")
        return result
