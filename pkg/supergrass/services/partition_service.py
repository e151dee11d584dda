"""
Partition arithmetic: conjugation, Schur functor dimensions, Gaussian
binomial Poincare polynomials and Littlewood-Richardson products cut down
to a box.

Cohomological degrees are doubled throughout: a Schubert class indexed by a
partition of k lives in degree 2k.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import lrcalc

from ..utils.errors import InvalidInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Partition:
    """Weakly decreasing sequence of nonnegative integers, trailing zeros stripped"""

    parts: Tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        if any(x < 0 for x in parts):
            raise InvalidInputError(f"Partition parts must be nonnegative: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise InvalidInputError(f"Partition parts must be weakly decreasing: {parts}")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    def size(self) -> int:
        return sum(self.parts)

    def length(self) -> int:
        return len(self.parts)

    def first(self) -> int:
        return self.parts[0] if self.parts else 0

    def part(self, i: int) -> int:
        """i-th part (0-based), zero past the end"""
        return self.parts[i] if i < len(self.parts) else 0

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def fits(self, box: "BoxBound") -> bool:
        return box.contains(self)

    def cells(self) -> Iterator[Tuple[int, int]]:
        for i, row in enumerate(self.parts):
            for j in range(row):
                yield i, j

    def to_list(self) -> List[int]:
        return list(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __str__(self):
        return "(" + ",".join(str(x) for x in self.parts) + ")" if self.parts else "()"


EMPTY = Partition()


@dataclass(frozen=True)
class BoxBound:
    """rows x cols rectangle; None means unbounded in that direction"""

    rows: Optional[int] = None
    cols: Optional[int] = None

    def __post_init__(self):
        for name in ("rows", "cols"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise InvalidInputError(f"Box {name} must be nonnegative, got {value}")

    @classmethod
    def unbounded(cls) -> "BoxBound":
        return cls(None, None)

    def contains(self, p: Partition) -> bool:
        if self.rows is not None and p.length() > self.rows:
            return False
        if self.cols is not None and p.first() > self.cols:
            return False
        return True


@dataclass
class GradedDims:
    """Finitely supported map degree -> dimension"""

    dims: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if any(v < 0 for v in self.dims.values()):
            raise InvalidInputError(f"Graded dimensions must be nonnegative: {self.dims}")
        self.dims = {d: v for d, v in sorted(self.dims.items()) if v}

    def get(self, degree: int) -> int:
        return self.dims.get(degree, 0)

    def total(self) -> int:
        return sum(self.dims.values())

    def top_degree(self) -> int:
        return max(self.dims, default=0)

    def halved(self) -> "GradedDims":
        return GradedDims({d // 2: v for d, v in self.dims.items()})

    def as_list(self) -> List[int]:
        """Dense list indexed by degree"""
        return [self.get(d) for d in range(self.top_degree() + 1)] if self.dims else []

    def to_dict(self) -> Dict[str, int]:
        return {str(d): v for d, v in self.dims.items()}


def conjugate(p: Partition) -> Partition:
    """Transpose of the Young diagram"""
    return Partition(tuple(sum(1 for row in p.parts if row > j) for j in range(p.first())))


def durfee_size(p: Partition) -> int:
    """Side of the largest square contained in the diagram"""
    return sum(1 for i, row in enumerate(p.parts) if row >= i + 1)


def complement(p: Partition, box: BoxBound) -> Partition:
    """Partition whose diagram fills the rest of the box, rotated by 180 degrees"""
    if box.rows is None or box.cols is None:
        raise InvalidInputError("Complement requires a bounded box")
    if not box.contains(p):
        raise InvalidInputError(f"{p} does not fit in a {box.rows}x{box.cols} box")
    return Partition(tuple(box.cols - p.part(box.rows - 1 - i) for i in range(box.rows)))


def dim_schur(p: Partition, n: int) -> int:
    """dim S_p(C^n) by the hook content formula"""
    if n < 0:
        raise InvalidInputError(f"Dimension must be nonnegative, got {n}")
    if p.length() > n:
        return 0
    conj = conjugate(p)
    numerator = prod(n + j - i for i, j in p.cells())
    hooks = prod((p.parts[i] - j) + (conj.parts[j] - i) - 1 for i, j in p.cells())
    value, rest = divmod(numerator, hooks)
    assert rest == 0, f"hook content quotient not integral for {p}, n={n}"
    return value


def partitions_in_box(rows: int, cols: int, size: Optional[int] = None) -> Iterator[Partition]:
    """Partitions with at most `rows` parts, each at most `cols`, largest first"""

    def extend(prefix: List[int], remaining_rows: int, cap: int, remaining: Optional[int]):
        if remaining is not None and remaining == 0:
            yield Partition(tuple(prefix))
            return
        if remaining is None:
            yield Partition(tuple(prefix))
        if remaining_rows == 0:
            return
        top = cap if remaining is None else min(cap, remaining)
        for part in range(top, 0, -1):
            if remaining is not None and part * remaining_rows < remaining:
                break
            yield from extend(
                prefix + [part], remaining_rows - 1, part,
                None if remaining is None else remaining - part,
            )

    if rows < 0 or cols < 0:
        raise InvalidInputError(f"Box dimensions must be nonnegative, got {rows}x{cols}")
    if size is not None and (size < 0 or size > rows * cols):
        return
    yield from extend([], rows, cols, size)


def partitions_of(k: int) -> Iterator[Partition]:
    """All partitions of k"""
    return partitions_in_box(k, k, k)


@lru_cache(maxsize=None)
def _gaussian_binomial(row: int, col: int) -> Tuple[int, ...]:
    """Coefficients of the q-binomial [row choose col]_q"""
    if col == 0 or col == row:
        return (1,)
    left = _gaussian_binomial(row - 1, col - 1)
    right = _gaussian_binomial(row - 1, col)
    shift = row - col
    coeffs = [0] * max(len(left) + shift, len(right))
    for i, c in enumerate(left):
        coeffs[i + shift] += c
    for i, c in enumerate(right):
        coeffs[i] += c
    return tuple(coeffs)


def gaussian_poincare(s: int, N: int) -> GradedDims:
    """Poincare polynomial of Gr_s(C^N), q^{2k} counting partitions of k in an s x (N-s) box"""
    if s < 0 or N < 0 or s > N:
        raise InvalidInputError(f"Need 0 <= s <= N, got s={s}, N={N}")
    return GradedDims({2 * k: c for k, c in enumerate(_gaussian_binomial(N, s))})


def q_factorial_dims(n: int) -> GradedDims:
    """Coefficients of [n]_q! = prod (1 + q + ... + q^{i-1}) with degrees doubled"""
    if n < 0:
        raise InvalidInputError(f"n must be nonnegative, got {n}")
    coeffs = [1]
    for i in range(1, n + 1):
        nxt = [0] * (len(coeffs) + i - 1)
        for a, c in enumerate(coeffs):
            for b in range(i):
                nxt[a + b] += c
        coeffs = nxt
    return GradedDims({2 * k: c for k, c in enumerate(coeffs)})


def schur_weights(p: Partition, n: int) -> Counter:
    """Contents of the semistandard tableaux of shape p with entries in 1..n"""
    cells = list(p.cells())
    weights: Counter = Counter()
    filling: Dict[Tuple[int, int], int] = {}

    def place(index: int):
        if index == len(cells):
            content = [0] * n
            for value in filling.values():
                content[value] += 1
            weights[tuple(content)] += 1
            return
        i, j = cells[index]
        low = 0
        if j > 0:
            low = max(low, filling[(i, j - 1)])
        if i > 0:
            low = max(low, filling[(i - 1, j)] + 1)
        for value in range(low, n):
            filling[(i, j)] = value
            place(index + 1)
        filling.pop((i, j), None)

    if p.length() <= n:
        place(0)
    return weights


def _horizontal_strips(shape: List[int], count: int, box: BoxBound) -> Iterator[List[int]]:
    """Shapes obtained by adding `count` boxes, no two in the same column"""
    rows = shape + [0]

    def grow(j: int, remaining: int, acc: List[int]):
        if j == len(rows):
            if remaining == 0:
                yield acc
            return
        ceiling = rows[j] + remaining if j == 0 else min(rows[j - 1], rows[j] + remaining)
        if box.cols is not None:
            ceiling = min(ceiling, box.cols)
        for new in range(rows[j], ceiling + 1):
            if new > 0 and box.rows is not None and j >= box.rows:
                break
            yield from grow(j + 1, remaining - (new - rows[j]), acc + [new])

    for grown in grow(0, count, []):
        yield [x for x in grown if x > 0]


def _is_lattice(labels_by_row: List[List[int]], depth: int) -> bool:
    """Reading word (rows top to bottom, right to left) is a lattice word"""
    counts = [0] * (depth + 1)
    for row in labels_by_row:
        for label in reversed(row):
            counts[label] += 1
            if label > 0 and counts[label] > counts[label - 1]:
                return False
    return True


def _check_factors(p: Partition, q: Partition, box: BoxBound) -> None:
    for name, part in (("p", p), ("q", q)):
        if not box.contains(part):
            raise InvalidInputError(f"{name}={part} does not fit in box {box.rows}x{box.cols}")


def _sorted_terms(terms: Dict[Partition, int]) -> Dict[Partition, int]:
    return dict(sorted(terms.items(), key=lambda kv: kv[0].parts, reverse=True))


def lr_expand_in_box(p: Partition, q: Partition, box: Optional[BoxBound] = None) -> Dict[Partition, int]:
    """Littlewood-Richardson expansion of s_p * s_q, terms outside the box dropped"""
    box = box or BoxBound.unbounded()
    _check_factors(p, q, box)
    if not p.parts and not q.parts:
        return {Partition(): 1}
    rows = -1 if box.rows is None else box.rows
    cols = -1 if box.cols is None else box.cols
    product = lrcalc.mult(list(p.parts), list(q.parts), rows, cols)
    terms = {Partition(tuple(lam)): int(c) for lam, c in product.items() if c}
    return _sorted_terms({lam: c for lam, c in terms.items() if box.contains(lam)})


def lr_expand_by_tableaux(p: Partition, q: Partition, box: Optional[BoxBound] = None) -> Dict[Partition, int]:
    """The same expansion by enumerating LR tableaux of shape lambda / p and content q"""
    box = box or BoxBound.unbounded()
    _check_factors(p, q, box)

    result: Counter = Counter()

    def fill(label: int, shape: List[int], labels_by_row: List[List[int]]):
        if label == q.length():
            if _is_lattice(labels_by_row, q.length()):
                result[Partition(tuple(shape))] += 1
            return
        for grown in _horizontal_strips(shape, q.parts[label], box):
            rows = [list(r) for r in labels_by_row] + [[] for _ in range(len(grown) - len(labels_by_row))]
            for j, new in enumerate(grown):
                old = shape[j] if j < len(shape) else 0
                rows[j].extend([label] * (new - old))
            # a label i in row j needs j >= i for the reading word to stay lattice
            if any(lab > j for j, row in enumerate(rows) for lab in row):
                continue
            fill(label + 1, grown, rows)

    fill(0, list(p.parts), [[] for _ in p.parts])
    return _sorted_terms(dict(result))
