"""Worked values for the profile algebra and puncturing identities."""
from __future__ import annotations

from fractions import Fraction

import pytest

from turbofade.ensemble import (
    DegreeProfile,
    ProfileError,
    derive_code_params,
    singleton_diversity,
    validate_profile,
)


def test_reference_irregular_profile():
    p = validate_profile({2: 0.9, 12: 0.1})
    assert p.average_degree == 3
    lam = p.edge_fractions()
    assert lam[2] == Fraction(6, 10)
    assert lam[12] == Fraction(4, 10)
    cfg = derive_code_params(p)
    assert cfg.constituent_rate == Fraction(3, 4)
    assert cfg.puncture_fraction == Fraction(2, 3)
    assert cfg.segment_count == 3
    assert cfg.segment_puncture_fraction == Fraction(3, 4)
    assert cfg.interleaver_length(6000) == 18000


def test_regular_profile():
    cfg = derive_code_params(validate_profile({2: 1}))
    assert cfg.profile.is_regular
    assert cfg.average_degree == 2
    assert cfg.constituent_rate == Fraction(2, 3)
    assert cfg.puncture_fraction == Fraction(1, 2)
    assert cfg.segment_count == 2
    assert cfg.segment_puncture_fraction == Fraction(1, 2)


def test_low_average_degree_profile_three_decimals():
    # average degree 2.727 exactly
    p = validate_profile({2: 0.9273, 12: 0.0727})
    assert p.average_degree == Fraction(2727, 1000)
    cfg = derive_code_params(p)
    assert round(float(cfg.puncture_fraction), 3) == 0.633
    assert round(float(cfg.segment_puncture_fraction), 3) == 0.700


def test_three_class_profile_reports_exact_average():
    p = validate_profile({2: 0.9, 9: 0.04, 15: 0.06})
    assert p.average_degree == Fraction(306, 100)
    assert float(p.average_degree) == 3.06


def test_two_class_high_degree_profile():
    p = validate_profile({2: 0.923, 15: 0.077})
    assert p.average_degree == Fraction(3001, 1000)


def test_profile_validation_errors():
    with pytest.raises(ProfileError):
        validate_profile({2: 0.5, 12: 0.4})  # does not sum to 1
    with pytest.raises(ProfileError):
        validate_profile({1: 0.5, 2: 0.5})  # degree below 2
    with pytest.raises(ProfileError):
        validate_profile({2: -0.1, 12: 1.1})
    with pytest.raises(ProfileError):
        validate_profile({})


def test_infeasible_rate_targets_rejected():
    p = validate_profile({2: 0.9, 12: 0.1})
    with pytest.raises(ProfileError):
        derive_code_params(p, code_rate=0.9)  # segment puncture share above 1
    with pytest.raises(ProfileError):
        derive_code_params(p, code_rate=0.2)  # needs negative puncture fraction


def test_rate_round_trip():
    p = validate_profile({2: 0.9, 12: 0.1})
    for rate in (Fraction(1, 2), Fraction(2, 5), Fraction(1, 3)):
        cfg = derive_code_params(p, code_rate=rate)
        rho = cfg.constituent_rate
        assert 1 / (1 + (1 / rho - 1) * cfg.average_degree) == rate
        # puncturing identity against the mother rate
        assert rho == 1 / (1 + (1 - cfg.puncture_fraction) * (1 / cfg.mother_rate - 1))


def test_class_counts_rounding():
    p = validate_profile({2: 0.9, 9: 0.04, 15: 0.06})
    counts = p.class_counts(991)
    assert counts[9] == 39 and counts[15] == 59  # floors
    assert counts[2] == 991 - 39 - 59  # remainder to the lowest degree
    assert sum(counts.values()) == 991


def test_interleaver_length_requires_integer():
    cfg = derive_code_params(validate_profile({2: 0.923, 15: 0.077}))
    with pytest.raises(ProfileError):
        cfg.interleaver_length(10)  # 10 * 3.001 is not an integer


def test_singleton_bound():
    assert singleton_diversity(2, "1/2").singleton_bound == 2
    assert singleton_diversity(2, "1/2").full_diversity_possible
    assert singleton_diversity(2, 0.9).singleton_bound == 1
    assert not singleton_diversity(2, 0.9).full_diversity_possible
    assert singleton_diversity(4, "1/2").singleton_bound == 3
