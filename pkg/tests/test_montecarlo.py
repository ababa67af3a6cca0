"""Stochastic pipeline simulation: laws, invariants, and reproducibility."""
import math

import numpy as np
import pytest

from pld.core import Scenario
from pld.distortion import (
    DROPPING,
    EXCLUSION,
    PERCEPTION,
    ReceiverStrategy,
    delta_terms,
    opportunistic_distortion,
)
from pld.montecarlo import (
    CHUNK_TRIALS,
    McEstimate,
    estimate_distortion,
    simulate_batch,
    simulate_trial,
)
from pld.strategy import optimal_receiver_strategy

CENTER = ReceiverStrategy(1 / 3, 1 / 3, 1 / 3)


def make_scenario(size=2, alpha=0.99):
    return Scenario(codebook_size=size, d_loss=1.0, d_conf=10.0, alpha=alpha)


# ---------------------------------------------------------------------------
# degenerate laws
# ---------------------------------------------------------------------------

def test_total_erasure_costs_exactly_the_loss():
    est = estimate_distortion(make_scenario(size=4), 1.0, 0.3, CENTER, 5000, seed=1)
    assert est.mean == 1.0
    assert est.std_error == 0.0


def test_perfect_channels_cost_nothing():
    sc = make_scenario(size=4, alpha=1.0)
    est = estimate_distortion(sc, 0.0, 0.0, CENTER, 5000, seed=2)
    assert est.mean == 0.0
    assert est.std_error == 0.0


def test_single_trial_has_no_error_bar():
    est = estimate_distortion(make_scenario(size=4), 0.5, 0.5, CENTER, 1, seed=3)
    assert math.isnan(est.std_error)
    assert est.mean in (0.0, 1.0, 10.0)


def test_argument_validation():
    sc = make_scenario()
    with pytest.raises(ValueError):
        estimate_distortion(sc, 0.1, 0.1, CENTER, 0, seed=1)
    with pytest.raises(ValueError):
        estimate_distortion(sc, 0.1, 0.1, CENTER, 100, seed=1, workers=0)
    with pytest.raises(ValueError):
        McEstimate(0.0, 0.0, 0, 1)


# ---------------------------------------------------------------------------
# per-trial structure of the vectorized kernel
# ---------------------------------------------------------------------------

def test_batch_pipeline_invariants():
    sc = make_scenario(size=4, alpha=0.6)
    rng = np.random.default_rng(99)
    batch = simulate_batch(rng, sc, 0.3, 0.4, CENTER, 20000)

    assert batch.message.max() < 4
    assert batch.ciphertext.max() < 4
    active = batch.key_active
    assert np.all(batch.key[active] >= 1)
    assert np.all(batch.key[active] <= 3)
    assert np.all(batch.key[~active] == 0)
    expect_s = np.where(active, (batch.message + batch.key) % 4, batch.message)
    assert np.array_equal(batch.ciphertext, expect_s)

    # a key can only be decoded if one was actually sent
    assert not np.any(batch.key_decoded & ~active)

    synced = batch.delivered & batch.key_decoded
    assert np.array_equal(batch.estimate[synced], batch.message[synced])
    assert np.all(batch.distortion[synced] == 0.0)

    assert not np.any(batch.estimate_valid[~batch.delivered])
    fallback = batch.delivered & ~batch.key_decoded
    assert not np.any(batch.estimate_valid[fallback & (batch.option == 1)])
    seen = fallback & (batch.option == 0)
    assert np.array_equal(batch.estimate[seen], batch.ciphertext[seen])
    excluded = fallback & (batch.option == 2)
    assert np.all(batch.estimate[excluded] != batch.ciphertext[excluded])
    assert batch.estimate[excluded].max() < 4

    missing = ~batch.estimate_valid
    assert np.all(batch.distortion[missing] == 1.0)
    wrong = batch.estimate_valid & (batch.estimate != batch.message)
    assert np.all(batch.distortion[wrong] == 10.0)
    right = batch.estimate_valid & (batch.estimate == batch.message)
    assert np.all(batch.distortion[right] == 0.0)

    n = batch.message.size
    sigma = math.sqrt(0.3 * 0.7 / n)
    assert abs(np.mean(batch.delivered) - 0.7) < 4 * sigma


def test_scalar_walk_matches_closed_form():
    sc = make_scenario(size=2, alpha=0.99)
    rng = np.random.default_rng(7)
    n = 20000
    draws = np.array([simulate_trial(rng, sc, 0.3, 0.4, CENTER) for _ in range(n)])
    want = opportunistic_distortion(sc, 0.3, 0.4, CENTER).total
    se = draws.std(ddof=1) / math.sqrt(n)
    assert abs(draws.mean() - want) < 4 * se


# ---------------------------------------------------------------------------
# agreement with closed forms
# ---------------------------------------------------------------------------

def test_reference_cell_perception():
    sc = make_scenario(size=2, alpha=0.99)
    est = estimate_distortion(sc, 0.1, 0.2, PERCEPTION, 10**6, seed=20250801)
    assert abs(est.mean - 1.882) < 4 * est.std_error


def test_huge_codebook_matches_closed_form():
    sc = make_scenario(size=1 << 64, alpha=0.99)
    est = estimate_distortion(sc, 0.1, 0.2, PERCEPTION, 2 * 10**5, seed=5)
    want = opportunistic_distortion(sc, 0.1, 0.2, PERCEPTION).total
    assert abs(est.mean - want) < 4 * est.std_error


def test_optimal_strategy_not_beaten_by_pure_options():
    sc = make_scenario(size=4, alpha=0.7)
    eps_p, eps_s = 0.2, 0.35
    sol = optimal_receiver_strategy(delta_terms(sc, eps_s))
    best = estimate_distortion(sc, eps_p, eps_s, sol.strategy, 2 * 10**5, seed=11)
    for pure in (PERCEPTION, DROPPING, EXCLUSION):
        other = estimate_distortion(sc, eps_p, eps_s, pure, 2 * 10**5, seed=12)
        slack = 4 * (best.std_error + other.std_error)
        assert best.mean <= other.mean + slack


# ---------------------------------------------------------------------------
# reproducibility
# ---------------------------------------------------------------------------

def test_same_seed_bit_identical():
    sc = make_scenario(size=4, alpha=0.5)
    a = estimate_distortion(sc, 0.2, 0.3, CENTER, 50000, seed=42)
    b = estimate_distortion(sc, 0.2, 0.3, CENTER, 50000, seed=42)
    assert a == b
    c = estimate_distortion(sc, 0.2, 0.3, CENTER, 50000, seed=43)
    assert c.mean != a.mean


def test_worker_count_does_not_change_the_estimate():
    sc = make_scenario(size=4, alpha=0.5)
    trials = 3 * CHUNK_TRIALS + 1000
    solo = estimate_distortion(sc, 0.2, 0.3, CENTER, trials, seed=9, workers=1)
    pooled = estimate_distortion(sc, 0.2, 0.3, CENTER, trials, seed=9, workers=3)
    assert solo.mean == pooled.mean
    assert solo.std_error == pooled.std_error
