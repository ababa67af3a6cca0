"""End-to-end stochastic simulation of the deception pipeline.

Every trial walks the whole chain — draw meaning and key, encrypt, push
through both transport channels, let the receiver decrypt or fall back on
its perception/dropping/exclusion mix — and scores the realized semantic
distortion.  A scalar reference walk (``simulate_trial``) states the
pipeline plainly; the vectorized kernel (``simulate_batch``) reproduces the
same law on uint64 arrays for throughput.  Estimates reduce chunk sums in a
fixed order with per-chunk substreams, so a given seed yields bit-identical
results for any worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import channels, crypto
from .core import NULL_KEY, NULL_MSG, Scenario, distance
from .crypto import ShiftCipher
from .distortion import ReceiverStrategy

#: Trials per reduction chunk; one substream and one partial sum per chunk.
CHUNK_TRIALS = 1 << 19


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error and provenance."""

    mean: float
    std_error: float
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class TrialBatch:
    """Per-trial pipeline record; sentinel fields use (values, mask) pairs."""

    message: np.ndarray
    key: np.ndarray
    key_active: np.ndarray
    ciphertext: np.ndarray
    delivered: np.ndarray
    key_decoded: np.ndarray
    option: np.ndarray
    estimate: np.ndarray
    estimate_valid: np.ndarray
    distortion: np.ndarray


def simulate_trial(
    rng: np.random.Generator,
    scenario: Scenario,
    eps_p: float,
    eps_s: float,
    strategy: ReceiverStrategy,
) -> float:
    """One full pipeline walk; returns the realized distortion."""
    size = scenario.codebook_size
    cipher = ShiftCipher(size)
    w = int(rng.integers(0, size - 1, dtype=np.uint64, endpoint=True))
    k = crypto.sample_key(rng, scenario)
    s = cipher.encrypt(w, k)
    s_hat = channels.sample_primary(rng, s, eps_p)
    k_hat = channels.sample_secondary(rng, k, eps_s)
    if k_hat is not NULL_KEY:
        w_hat = cipher.decrypt(s_hat, k_hat)
    else:
        u = rng.random()
        if u < strategy.beta1:  # perception: take the codeword at face value
            w_hat = s_hat
        elif u < strategy.beta1 + strategy.beta2:  # dropping
            w_hat = NULL_MSG
        elif s_hat is NULL_MSG:  # nothing to exclude from
            w_hat = NULL_MSG
        else:  # exclusion: uniform guess among the other codewords
            r = int(rng.integers(0, size - 1, dtype=np.uint64))
            w_hat = r + 1 if r >= s_hat else r
    return distance(w, w_hat, scenario.distortion)


def simulate_batch(
    rng: np.random.Generator,
    scenario: Scenario,
    eps_p: float,
    eps_s: float,
    strategy: ReceiverStrategy,
    size: int,
) -> TrialBatch:
    """Vectorized pipeline walk; same law as simulate_trial, fixed draw order.

    Branch and exclusion randomness is drawn for every trial (and discarded
    where unused) to keep the stream layout independent of the outcomes.
    """
    cardinality = scenario.codebook_size
    w = rng.integers(0, cardinality, size=size, dtype=np.uint64)
    key_vals, key_active = crypto.sample_keys(rng, scenario, size)
    s = crypto.encrypt_batch(w, key_vals, key_active, cardinality)
    delivered = channels.delivery_mask(rng, eps_p, size)
    key_arrived = channels.delivery_mask(rng, eps_s, size)
    key_decoded = key_active & key_arrived
    branch_u = rng.random(size)
    option = np.zeros(size, dtype=np.int8)
    option[branch_u >= strategy.beta1] = 1
    option[branch_u >= strategy.beta1 + strategy.beta2] = 2
    excl_raw = rng.integers(0, cardinality - 1, size=size, dtype=np.uint64)

    decrypted = crypto.decrypt_batch(s, key_vals, key_decoded, cardinality)
    excl_pick = excl_raw + (excl_raw >= s).astype(np.uint64)

    estimate = np.zeros(size, dtype=np.uint64)
    estimate_valid = np.zeros(size, dtype=bool)
    synced = delivered & key_decoded
    estimate[synced] = decrypted[synced]
    estimate_valid[synced] = True
    fallback = delivered & ~key_decoded
    seen = fallback & (option == 0)
    estimate[seen] = s[seen]
    estimate_valid[seen] = True
    excluded = fallback & (option == 2)
    estimate[excluded] = excl_pick[excluded]
    estimate_valid[excluded] = True
    # dropping and erasures keep estimate_valid False (NULL_MSG).

    distortion = np.where(
        ~estimate_valid,
        scenario.d_loss,
        np.where(estimate == w, 0.0, scenario.d_conf),
    )
    return TrialBatch(
        message=w,
        key=key_vals,
        key_active=key_active,
        ciphertext=s,
        delivered=delivered,
        key_decoded=key_decoded,
        option=option,
        estimate=estimate,
        estimate_valid=estimate_valid,
        distortion=distortion,
    )


def _chunk_sizes(trials: int) -> list[int]:
    sizes = [CHUNK_TRIALS] * (trials // CHUNK_TRIALS)
    if trials % CHUNK_TRIALS:
        sizes.append(trials % CHUNK_TRIALS)
    return sizes


def estimate_distortion(
    scenario: Scenario,
    eps_p: float,
    eps_s: float,
    strategy: ReceiverStrategy,
    trials: int,
    seed: int,
    workers: int = 1,
) -> McEstimate:
    """Mean realized distortion over ``trials`` seeded pipeline walks.

    The trial stream is split into fixed-size chunks, each with its own
    substream spawned from ``seed``; partial sums reduce in chunk order, so
    the estimate is bit-identical for any ``workers`` value.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    sizes = _chunk_sizes(trials)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    def run_chunk(idx: int) -> tuple[float, float]:
        rng = np.random.default_rng(seeds[idx])
        d = simulate_batch(rng, scenario, eps_p, eps_s, strategy, sizes[idx]).distortion
        return float(d.sum()), float(np.square(d).sum())

    if workers == 1 or len(sizes) == 1:
        partials = [run_chunk(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run_chunk, range(len(sizes))))

    total = 0.0
    total_sq = 0.0
    for part, part_sq in partials:  # fixed chunk order
        total += part
        total_sq += part_sq
    mean = total / trials
    if trials > 1:
        variance = max(total_sq - trials * mean * mean, 0.0) / (trials - 1)
        std_error = float(np.sqrt(variance / trials))
    else:
        std_error = float("nan")
    return McEstimate(mean, std_error, trials, seed)
