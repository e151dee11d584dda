"""
Tests for the brute-force Koszul homology oracle and its agreement with
the closed-form Betti tables.

Usage:
    pytest test_koszul.py
    pytest test_koszul.py -m slow    # n, m <= 3 up to degree 6
"""

from math import comb

import pytest

from supergrass.services import koszul_service
from supergrass.services.koszul_service import (
    KoszulOracle,
    KoszulService,
    OracleJob,
    compare_with_lascoux,
    compositions,
    hilbert_numerator,
    tor_dims,
)
from supergrass.services.lascoux_service import DetVarSpec
from supergrass.utils.errors import ResourceLimitError, VerificationError


def _tor(n, m, t, d_max, **kwargs):
    return tor_dims(OracleJob(DetVarSpec(n, m, t), d_max, **kwargs))


def test_compositions():
    assert list(compositions(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert list(compositions(0, 0)) == [()]
    assert list(compositions(1, 0)) == []


def test_monomials_are_contingency_tables():
    oracle = KoszulOracle(2, 2, 1)
    assert len(list(oracle.weights_of_degree(1))) == 4
    assert sorted(oracle.monomials_of_weight((1, 1, 1, 1))) == [(0, 1, 1, 0), (1, 0, 0, 1)]
    assert oracle.monomials_of_weight((1, 0, 0, 0)) == []
    block = oracle.quotient_block((1, 1, 1, 1))
    assert len(block.standard) == 1
    assert len(block.reductions) == 1


def test_single_variable():
    tor = _tor(1, 1, 0, 2)
    assert tor.nonzero() == {(0, 0): 1, (1, 1): 1}
    assert tor.to_dict()["quotient_dims"] == [1, 0, 0]


def test_determinant_hypersurface():
    tor = _tor(2, 2, 1, 3)
    assert tor.nonzero() == {(0, 0): 1, (1, 2): 1}
    assert tor.to_dict()["quotient_dims"] == [1, 4, 9, 16]


def test_maximal_minors_of_a_three_by_two_matrix():
    assert _tor(3, 2, 1, 3).nonzero() == {(0, 0): 1, (1, 2): 3, (2, 3): 2}


def test_hilbert_numerator():
    # S/(det) for a 2x2 matrix: (1 - q)^4 H(q) = 1 - q^2
    assert hilbert_numerator([1, 4, 9, 16, 25], 4) == [1, 0, -1, 0, 0]
    assert hilbert_numerator([1, 0, 0], 0) == [1, 0, 0]
    assert hilbert_numerator([1, 3, 6, 10], 3) == [1, 0, 0, 0]


def test_alternating_tor_sums_match_the_quotient():
    tor = _tor(3, 2, 1, 4)
    sums = [sum((-1) ** p * tor.get(p, d) for p in range(7)) for d in range(5)]
    assert sums == hilbert_numerator(tor.to_dict()["quotient_dims"], 6)


def test_homology_disagreeing_with_the_quotient_is_raised(monkeypatch):
    monkeypatch.setattr(koszul_service, "hilbert_numerator", lambda dims, N: [1] + [0] * (len(dims) - 1))
    with pytest.raises(VerificationError):
        _tor(2, 2, 1, 3)


def test_zero_cutoff_gives_the_koszul_complex_of_the_variables():
    tor = _tor(2, 2, 0, 4)
    assert tor.nonzero() == {(p, p): comb(4, p) for p in range(5)}


def test_full_rank_cutoff_leaves_the_polynomial_ring():
    tor = _tor(2, 1, 1, 3)
    assert tor.nonzero() == {(0, 0): 1}
    assert tor.to_dict()["quotient_dims"] == [comb(d + 1, 1) for d in range(4)]


def test_p_max_truncates_the_table():
    tor = _tor(3, 2, 1, 3, p_max=1)
    assert tor.nonzero() == {(0, 0): 1, (1, 2): 3}
    assert tor.job.p_limit == 1


def test_monomial_order_does_not_matter():
    assert _tor(3, 2, 1, 3, reverse=True).nonzero() == _tor(3, 2, 1, 3).nonzero()


def test_parallel_weight_blocks(fresh_settings):
    sequential = _tor(2, 2, 1, 3).nonzero()
    fresh_settings.override(parallel=True, workers=2)
    assert _tor(2, 2, 1, 3).nonzero() == sequential


def test_desk_scale_limits():
    with pytest.raises(ResourceLimitError):
        OracleJob(DetVarSpec(4, 4, 1), 2).check_limits()
    with pytest.raises(ResourceLimitError):
        OracleJob(DetVarSpec(2, 2, 1), 11).check_limits()
    with pytest.raises(ResourceLimitError):
        _tor(2, 2, 1, -1)


@pytest.mark.parametrize("n,m,t,d_max", [(2, 2, 1, 3), (3, 2, 1, 4), (2, 2, 0, 4), (2, 3, 0, 3), (1, 3, 0, 3)])
def test_oracle_agrees_with_the_closed_form(n, m, t, d_max):
    report = compare_with_lascoux(DetVarSpec(n, m, t), d_max)
    assert report.all_match, report.mismatches


def test_characters_agree():
    report = compare_with_lascoux(DetVarSpec(3, 2, 1), 3, characters=True)
    assert report.characters_checked
    assert report.character_mismatches == []
    assert report.all_match


def test_character_weights():
    tor = _tor(2, 2, 1, 2, characters=True)
    assert tor.characters[(1, 2)] == {(1, 1, 1, 1): 1}
    assert tor.to_dict()["characters"][-1] == {"p": 1, "d": 2, "weights": [{"weight": [1, 1, 1, 1], "mult": 1}]}


def test_service_compare_payload():
    data = KoszulService().compare(DetVarSpec(2, 2, 1), 2).to_dict()
    assert data["all_match"]
    assert data["rows"] == [
        {"p": 0, "d": 0, "lascoux": 1, "oracle": 1, "match": True},
        {"p": 1, "d": 2, "lascoux": 1, "oracle": 1, "match": True},
    ]


@pytest.mark.slow
def test_acceptance_grid():
    for n in range(1, 4):
        for m in range(1, 4):
            for t in range(min(n, m) + 1):
                report = compare_with_lascoux(DetVarSpec(n, m, t), 6)
                assert report.all_match, (n, m, t, report.mismatches)
