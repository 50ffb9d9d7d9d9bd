"""Density evolution: channel densities, trellis transfer, evolution runs."""
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import ndtr

from turbofade.codec import LayoutError, plan_layout
from turbofade.density_evolution import (
    DeConfig,
    checknode_transfer,
    density_from_channel,
    deo_indicator,
    evolve_awgn,
    evolve_fading,
    find_threshold,
    _multiplex_census,
)
from turbofade.ensemble import validate_profile
from turbofade.llr_density import LlrDensity
from turbofade.trellis import build_trellis

IRREGULAR = validate_profile({2: 0.9, 12: 0.1})
REGULAR = validate_profile({2: 1.0})

# Small enough to keep the suite quick, large enough for stable verdicts
# at the comfortable SNR margins used below.
FAST = DeConfig(window=2000, guard=100, samples_per_iteration=60_000,
                max_iterations=80)
TINY = DeConfig(window=600, guard=60, samples_per_iteration=4800,
                max_iterations=30, stall_window=5)


def test_density_from_channel_moments():
    grid = DeConfig().grid()
    d = density_from_channel(1.0, 2.0, grid)
    assert abs(d.mean() - 1.0) < grid.delta ** 2
    assert abs(d.variance() - 2.0) < grid.delta ** 2
    assert round(d.error_probability(), 4) == round(float(ndtr(-1 / np.sqrt(2))), 4)
    erased = density_from_channel(0.0, 2.0, grid)
    assert erased.masses[grid.zero_index] == 1.0
    with pytest.raises(ValueError):
        density_from_channel(-0.1, 2.0, grid)


def test_config_validation():
    with pytest.raises(ValueError):
        DeConfig(window=300, guard=100)
    with pytest.raises(ValueError):
        DeConfig(guard=2)
    with pytest.raises(ValueError):
        DeConfig(samples_per_iteration=100, window=10_000)


def test_checknode_transfer_delta_passthrough():
    grid = TINY.grid()
    tr = build_trellis()
    out = checknode_transfer(tr, LlrDensity.delta(grid), LlrDensity.delta(grid),
                             TINY, seed=1)
    assert out.masses[grid.zero_index] == 1.0


def test_checknode_transfer_saturated_apriori():
    # Perfect side information pins the state path; with parity observed,
    # nothing lands on the wrong side of zero.
    grid = TINY.grid()
    tr = build_trellis()
    sat = LlrDensity.delta(grid, 40.0)
    parity = density_from_channel(1.0, 0.5, grid)
    out = checknode_transfer(tr, sat, parity, TINY, seed=1)
    assert float(out.masses[:grid.zero_index].sum()) < 1e-6
    assert out.mean() > 5.0


def test_checknode_transfer_self_consistency():
    # Doubling the window and the sample budget moves the estimate by no
    # more than the per-bin shot noise allows at this reduced budget; the
    # summary statistics agree much more tightly.
    grid = FAST.grid()
    tr = build_trellis()
    apriori = density_from_channel(1.0, 1.0, grid)
    parity = density_from_channel(1.0, 1.0, grid)
    small = checknode_transfer(tr, apriori, parity, FAST, seed=2)
    big_cfg = DeConfig(window=4000, guard=100, samples_per_iteration=120_000,
                       max_iterations=80)
    big = checknode_transfer(tr, apriori, parity, big_cfg, seed=3)
    tv = 0.5 * float(np.abs(small.masses - big.masses).sum())
    assert tv < 0.1
    assert small.mean() == pytest.approx(big.mean(), abs=0.1)
    assert small.error_probability() == pytest.approx(big.error_probability(),
                                                      abs=5e-3)


def test_evolve_awgn_converges_above_threshold():
    result = evolve_awgn(IRREGULAR, 1.0, FAST, seed=3)
    assert result.converged
    assert result.final_error < 1e-6
    # error probability starts at the raw channel tail
    first = result.steps[0]
    assert first.iteration == 0
    assert 0.05 < first.error_probability < 0.2


def test_evolve_awgn_stalls_below_shannon_limit():
    result = evolve_awgn(IRREGULAR, -0.5, FAST, seed=3)
    assert not result.converged
    assert result.verdict == "stalled"
    assert result.iterations < FAST.max_iterations
    assert result.final_error > 0.05


def test_evolve_handles_noninteger_mean_degree_on_awgn():
    profile = validate_profile({2: 0.75, 4: 0.25})  # mean degree 2.5
    cfg = DeConfig(window=2000, guard=100, samples_per_iteration=10_000,
                   max_iterations=1)
    result = evolve_awgn(profile, 1.0, cfg, seed=0)
    assert result.verdict == "exhausted"
    with pytest.raises(LayoutError):
        evolve_fading(profile, (1.0, 1.0), 1.0, cfg, seed=0)


def test_bookkeeping_identity_every_step():
    result = evolve_awgn(IRREGULAR, 0.8, FAST, seed=5)
    for step in result.steps:
        mix = sum(float(IRREGULAR.bit_fraction(d)) * pb
                  for d, pb in step.per_degree)
        assert mix == pytest.approx(step.error_probability, abs=1e-15)


def test_fading_census_matches_frame_layout():
    census = _multiplex_census(IRREGULAR)
    layout = plan_layout(IRREGULAR, 120)
    assert census.beta == layout.beta
    assert census.period == layout.pin_period
    assert census.block1_bit_fracs == {2: Fraction(4, 5), 12: Fraction(1, 5)}
    assert census.free_edge_fracs[12] == Fraction(11, 5) / 3
    assert census.free_edge_fracs[2] == Fraction(4, 5) / 3
    with pytest.raises(LayoutError):
        _multiplex_census(validate_profile({4: 0.6, 2: 0.4}))


def test_evolve_fading_ergodic_ray_matches_awgn_verdicts():
    good = evolve_fading(IRREGULAR, (1.0, 1.0), 1.0, FAST, seed=3)
    assert good.converged
    bad = evolve_fading(IRREGULAR, (0.2, 0.2), 1.0, FAST, seed=3)
    assert not bad.converged


def test_deo_indicator_dead_and_strong_channels():
    assert deo_indicator(IRREGULAR, (0.0, 0.0), 20.0, TINY) == 1
    assert deo_indicator(IRREGULAR, (1.5, 1.5), 6.0, FAST, seed=4) == 0


def test_deo_degradation_monotonicity():
    cfg = DeConfig(window=2000, guard=100, samples_per_iteration=40_000,
                   max_iterations=60)
    base = (0.7, 0.5)
    assert deo_indicator(IRREGULAR, base, 8.0, cfg, seed=6) == 0
    for stronger in [(0.8, 0.5), (0.7, 0.62), (0.9, 0.9)]:
        assert deo_indicator(IRREGULAR, stronger, 8.0, cfg, seed=6) == 0


def test_evolution_is_reproducible():
    a = evolve_awgn(REGULAR, 0.9, TINY, seed=11)
    b = evolve_awgn(REGULAR, 0.9, TINY, seed=11)
    assert [s.error_probability for s in a.steps] == \
        [s.error_probability for s in b.steps]
    c = evolve_awgn(REGULAR, 0.9, TINY, seed=12)
    assert [s.error_probability for s in a.steps] != \
        [s.error_probability for s in c.steps]


def test_find_threshold_validation():
    with pytest.raises(ValueError):
        find_threshold(IRREGULAR, precision_db=0.005)
    with pytest.raises(ValueError):
        find_threshold(IRREGULAR, bracket_db=(1.0, 1.0))
    with pytest.raises(RuntimeError):
        # nothing converges below the Shannon limit
        find_threshold(IRREGULAR, precision_db=0.2, config=TINY,
                       bracket_db=(-1.0, -0.4))
