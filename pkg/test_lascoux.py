"""
Tests for the closed-form Betti tables of determinantal varieties.

Usage:
    pytest test_lascoux.py
"""

from math import comb

import pytest

from supergrass.services import lascoux_service
from supergrass.services.lascoux_service import (
    BettiTable,
    DetVarSpec,
    LascouxService,
    betti_numbers,
    betti_table,
    hilbert_numerator_at_one,
    linear_strand,
    strand_dim,
    verify_multiplicity_free,
)
from supergrass.services.partition_service import Partition, conjugate, dim_schur, partitions_in_box
from supergrass.utils.errors import InvalidInputError

P = Partition.of


def _summary(table):
    return [(e.p, e.d, e.rep.P, e.rep.Q, e.rep.dim) for e in table.entries]


def test_one_variable_koszul_complex():
    table = betti_table(DetVarSpec(1, 1, 0))
    assert _summary(table) == [(0, 0, Partition(), Partition(), 1), (1, 1, P(1), P(1), 1)]


def test_eagon_northcott_three_by_two():
    table = betti_table(DetVarSpec(3, 2, 1))
    assert betti_numbers(table) == {(0, 0): 1, (1, 2): 3, (2, 3): 2}
    assert _summary(table)[1:] == [(1, 2, P(1, 1), P(1, 1), 3), (2, 3, P(1, 1, 1), P(2, 1), 2)]


def test_determinant_hypersurfaces():
    assert betti_numbers(betti_table(DetVarSpec(2, 2, 1))) == {(0, 0): 1, (1, 2): 1}
    table = betti_table(DetVarSpec(3, 3, 2))
    assert betti_numbers(table) == {(0, 0): 1, (1, 3): 1}
    assert table.at(1, 3)[0].rep.P == P(1, 1, 1)
    assert table.at(1, 3)[0].rep.Q == P(1, 1, 1)


def test_full_rank_cutoff_is_free():
    for n, m in [(1, 1), (2, 3), (3, 2), (0, 2)]:
        table = betti_table(DetVarSpec(n, m, min(n, m)))
        assert _summary(table) == [(0, 0, Partition(), Partition(), 1)]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("m", [2, 3])
def test_maximal_minors_match_eagon_northcott_ranks(n, m):
    if n < m:
        pytest.skip("maximal minors need n >= m")
    numbers = betti_numbers(betti_table(DetVarSpec(n, m, m - 1)))
    expected = {(0, 0): 1}
    for p in range(1, n - m + 2):
        expected[(p, m + p - 1)] = comb(n, m + p - 1) * comb(m + p - 2, p - 1)
    assert numbers == expected


def test_linear_strands():
    spec = DetVarSpec(3, 2, 1)
    strand = linear_strand(spec, 1)
    assert [(p, rep.P, rep.Q) for p, rep in strand] == [(1, P(1, 1), P(1, 1)), (2, P(1, 1, 1), P(2, 1))]
    assert strand_dim(spec, 1) == 5
    assert linear_strand(spec, 2) == []
    assert [(p, rep.is_trivial()) for p, rep in linear_strand(spec, 0)] == [(0, True)]


def test_strands_are_multiples_of_the_cutoff():
    for n in range(1, 5):
        for m in range(1, 5):
            for t in range(min(n, m) + 1):
                strands = betti_table(DetVarSpec(n, m, t)).strands()
                assert all(q % t == 0 for q in strands) if t else strands == [0]


SMALL_GRID = [(n, m, t) for n in range(4) for m in range(4) for t in range(min(n, m) + 1)]


@pytest.mark.parametrize("n,m,t", SMALL_GRID)
def test_multiplicity_free(n, m, t):
    assert verify_multiplicity_free(DetVarSpec(n, m, t))


def test_multiplicity_free_on_larger_specs():
    assert verify_multiplicity_free(DetVarSpec(4, 4, 2))
    assert verify_multiplicity_free(DetVarSpec(5, 3, 1))


def test_repeated_summands_are_reported(monkeypatch):
    table = betti_table(DetVarSpec(3, 2, 1))
    doubled = BettiTable(table.spec, table.entries + table.entries[-1:])
    monkeypatch.setattr(lascoux_service, "betti_table", lambda spec, parallel=False: doubled)
    assert not verify_multiplicity_free(DetVarSpec(3, 2, 1))


def test_zero_cutoff_is_the_exterior_algebra():
    """At t = 0 the summands are S_lambda(V0) x S_lambda'(V1*) over lambda in the n x m box"""
    for n in range(4):
        for m in range(4):
            table = betti_table(DetVarSpec(n, m, 0))
            found = sorted((e.p, e.rep.P.parts, e.rep.Q.parts) for e in table.entries)
            expected = sorted((lam.size(), lam.parts, conjugate(lam).parts) for lam in partitions_in_box(n, m))
            assert found == expected
            for p in range(n * m + 1):
                assert sum(e.rep.dim for e in table.entries if e.p == p) == comb(n * m, p)


def test_entries_stay_inside_their_bounds():
    for n in range(5):
        for m in range(5):
            for t in range(min(n, m) + 1):
                for e in betti_table(DetVarSpec(n, m, t)).entries:
                    assert e.rep.P.length() <= n and e.rep.Q.length() <= m
                    assert e.rep.dim == dim_schur(e.rep.P, n) * dim_schur(e.rep.Q, m) > 0
                    assert e.b <= m - t and e.alpha.first() <= m - t - e.b
                    assert e.beta.length() <= n - t - e.b
                    assert e.p == e.b ** 2 + e.alpha.size() + e.beta.size()
                    assert e.rep.P.size() == e.d


def test_hilbert_numerator_vanishes_below_full_rank():
    for n, m, t in [(2, 2, 1), (3, 2, 1), (3, 3, 1), (2, 3, 0)]:
        assert hilbert_numerator_at_one(betti_table(DetVarSpec(n, m, t))) == 0
    assert hilbert_numerator_at_one(betti_table(DetVarSpec(2, 3, 2))) == 1


def test_grid_layout():
    headers, rows = betti_table(DetVarSpec(3, 2, 1)).grid()
    assert headers == ["q\\p", "0", "1", "2"]
    assert rows == [["0", "1", "-", "-"], ["1", "-", "3", "2"]]


def test_invalid_specs():
    with pytest.raises(InvalidInputError):
        DetVarSpec(5, 5, -1)
    with pytest.raises(InvalidInputError):
        DetVarSpec(2, 3, 3)


def test_parallel_enumeration_matches(fresh_settings):
    fresh_settings.override(parallel=True, workers=2)
    spec = DetVarSpec(4, 4, 1)
    assert LascouxService().table(spec).entries == betti_table(spec).entries


def test_table_json_shape():
    data = betti_table(DetVarSpec(3, 2, 1)).to_dict()
    assert data["spec"] == {"n": 3, "m": 2, "t": 1}
    assert data["entries"][-1] == {"p": 2, "d": 3, "P": [1, 1, 1], "Q": [2, 1], "dim": 2, "b": 1, "alpha": [], "beta": [1]}
