"""Optimal play on both sides: receiver option choice and activation rate.

The receiver's expected distortion is affine in its option weights, so the
optimum puts all mass on the option(s) with the smallest delta term.  Seen
as a function of the activation rate alpha, each delta term is affine, so
the optimized distortion is a concave piecewise-linear envelope with at most
two breakpoints.  The transmitter's problem — push the eavesdropper's
distortion as high as possible while keeping the intended receiver's below a
cap — then reduces to candidate enumeration over interval endpoints and
envelope breakpoints, no grid search needed.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, replace

from .channels import TransportChannel
from .core import Scenario
from .distortion import DeltaTerms, ReceiverStrategy, delta_terms
from .fbl import FblCode

OPTION_LABELS = ("perception", "dropping", "exclusion")

#: Delta values this close (relative to the largest delta) count as tied.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class ReceiverSolution:
    """An optimal corner (or tie-splitting mix) of the receiver simplex."""

    strategy: ReceiverStrategy
    value: float
    active_option: str


@dataclass(frozen=True)
class LinearPiece:
    """One affine segment value = intercept + slope*x on [lo, hi]."""

    lo: float
    hi: float
    intercept: float
    slope: float
    label: str

    def value_at(self, x: float) -> float:
        return self.intercept + self.slope * x


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function on [pieces[0].lo, pieces[-1].hi]."""

    pieces: tuple[LinearPiece, ...]

    def __post_init__(self) -> None:
        if not self.pieces:
            raise ValueError("piecewise-linear function needs >= 1 piece")

    @property
    def lo(self) -> float:
        return self.pieces[0].lo

    @property
    def hi(self) -> float:
        return self.pieces[-1].hi

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Interior x where the active piece changes."""
        return tuple(p.lo for p in self.pieces[1:])

    def piece_at(self, x: float) -> LinearPiece:
        if not self.lo <= x <= self.hi:
            raise ValueError(f"x={x!r} outside domain [{self.lo}, {self.hi}]")
        idx = bisect_right([p.lo for p in self.pieces], x) - 1
        return self.pieces[max(idx, 0)]

    def __call__(self, x: float) -> float:
        return self.piece_at(x).value_at(x)


def lower_envelope(
    affines: list[tuple[float, float, str]], lo: float, hi: float
) -> PiecewiseLinear:
    """Pointwise minimum of affine functions (intercept, slope, label) pairs."""
    if hi <= lo:
        raise ValueError(f"empty domain [{lo}, {hi}]")
    knots = {lo, hi}
    for i, (ci, mi, _) in enumerate(affines):
        for cj, mj, _ in affines[i + 1 :]:
            if mi != mj:
                x = (cj - ci) / (mi - mj)
                if lo < x < hi:
                    knots.add(x)
    cuts = sorted(knots)
    pieces: list[LinearPiece] = []
    for a, b in zip(cuts, cuts[1:]):
        mid = 0.5 * (a + b)
        c, m, label = min(affines, key=lambda t: t[0] + t[1] * mid)
        if pieces and pieces[-1].intercept == c and pieces[-1].slope == m:
            pieces[-1] = replace(pieces[-1], hi=b)
        else:
            pieces.append(LinearPiece(a, b, c, m, label))
    return PiecewiseLinear(tuple(pieces))


def optimal_receiver_strategy(
    deltas: DeltaTerms,
    *,
    scenario: Scenario | None = None,
    eps_p: float | None = None,
) -> ReceiverSolution:
    """Minimize expected distortion over the option simplex.

    All mass goes to the smallest delta term; deltas tied within TIE_TOL
    (relative to the largest term) share the mass equally and are reported
    as the "tie-set".  Without channel context, ``value`` is the conditional
    expected distortion given primary delivery (the weighted delta sum);
    passing ``scenario`` and ``eps_p`` folds in the erasure floor to give
    the full expected distortion.
    """
    if (scenario is None) != (eps_p is None):
        raise ValueError("supply scenario and eps_p together or not at all")
    values = deltas.as_tuple()
    tol = TIE_TOL * max(values)
    d_min = min(values)
    tied = [i for i, v in enumerate(values) if v - d_min <= tol]
    share = 1.0 / len(tied)
    betas = [share if i in tied else 0.0 for i in range(3)]
    strategy = ReceiverStrategy(*betas)
    value = sum(b * v for b, v in zip(betas, values))
    if scenario is not None:
        value = eps_p * scenario.d_loss + (1.0 - eps_p) * value
    label = OPTION_LABELS[tied[0]] if len(tied) == 1 else "tie-set"
    return ReceiverSolution(strategy, value, label)


def receiver_value_of_alpha(
    scenario: Scenario, eps_p: float, eps_s: float
) -> PiecewiseLinear:
    """Optimized receiver distortion as a function of the activation rate.

    Each delta term is exactly affine in alpha, so evaluating the closed
    forms at alpha=0 and alpha=1 recovers intercepts and slopes without
    duplicating any formula; the optimized distortion is the concave lower
    envelope scaled by the delivery probability on top of the erasure floor.
    The scenario's own alpha field is ignored.
    """
    at0 = delta_terms(replace(scenario, alpha=0.0), eps_s).as_tuple()
    at1 = delta_terms(replace(scenario, alpha=1.0), eps_s).as_tuple()
    deliver = 1.0 - eps_p
    floor = eps_p * scenario.d_loss
    affines = [
        (floor + deliver * c0, deliver * (c1 - c0), label)
        for c0, c1, label in zip(at0, at1, OPTION_LABELS)
    ]
    return lower_envelope(affines, 0.0, 1.0)


def sublevel_intervals(
    f: PiecewiseLinear, level: float
) -> tuple[tuple[float, float], ...]:
    """Closed intervals of the domain where f(x) <= level."""
    found: list[tuple[float, float]] = []
    for p in f.pieces:
        v_lo, v_hi = p.value_at(p.lo), p.value_at(p.hi)
        if v_lo <= level and v_hi <= level:
            seg = (p.lo, p.hi)
        elif v_lo > level and v_hi > level:
            continue
        else:
            x = (level - p.intercept) / p.slope
            x = min(max(x, p.lo), p.hi)
            seg = (p.lo, x) if v_lo <= level else (x, p.hi)
        if found and seg[0] <= found[-1][1]:
            found[-1] = (found[-1][0], max(found[-1][1], seg[1]))
        else:
            found.append(seg)
    return tuple(found)


@dataclass(frozen=True)
class DeceptionPlan:
    """Best activation rate under the intended receiver's distortion cap."""

    alpha_opt: float
    eve_distortion: float
    bob_distortion: float
    feasible_intervals: tuple[tuple[float, float], ...]
    feasible: bool


def optimize_deception(
    scenario_bob: Scenario,
    scenario_eve_expected: Scenario,
    d_max: float,
    *,
    bob_channel: TransportChannel | None = None,
    eve_channel: TransportChannel | None = None,
) -> DeceptionPlan:
    """Choose alpha maximizing Eve's distortion subject to Bob's cap.

    Bob's channel comes from ``scenario_bob`` at its snr_bob_db; Eve's from
    ``scenario_eve_expected`` at its snr_eve_db (her expected SNR) — pass
    the same scenario twice for the usual single-config case, or channel
    overrides to inject error rates directly.  Both optimized distortions
    are concave piecewise-linear in alpha, so the constraint set is [0,1]
    minus an open interval and the maximum sits on an interval endpoint or
    an objective breakpoint.  Value ties resolve toward larger alpha (more
    deception at no cost to the objective).
    """
    if not (math.isfinite(d_max) and d_max > 0):
        raise ValueError(f"d_max must be finite and > 0, got {d_max!r}")
    for field in ("codebook_size", "d_loss", "d_conf"):
        if getattr(scenario_bob, field) != getattr(scenario_eve_expected, field):
            raise ValueError(
                f"scenarios disagree on {field}: "
                f"{getattr(scenario_bob, field)!r} vs "
                f"{getattr(scenario_eve_expected, field)!r}"
            )
    if bob_channel is None:
        bob_channel = TransportChannel.from_snr_db(
            scenario_bob.snr_bob_db, FblCode.from_scenario(scenario_bob)
        )
    if eve_channel is None:
        eve_channel = TransportChannel.from_snr_db(
            scenario_eve_expected.snr_eve_db,
            FblCode.from_scenario(scenario_eve_expected),
        )
    value_bob = receiver_value_of_alpha(
        scenario_bob, bob_channel.eps_primary, bob_channel.eps_secondary
    )
    value_eve = receiver_value_of_alpha(
        scenario_eve_expected, eve_channel.eps_primary, eve_channel.eps_secondary
    )
    intervals = sublevel_intervals(value_bob, d_max)
    if not intervals:
        nan = float("nan")
        return DeceptionPlan(nan, nan, nan, (), False)

    candidates: set[float] = set()
    for lo, hi in intervals:
        candidates.update((lo, hi))
        for x in value_eve.breakpoints:
            if lo < x < hi:
                candidates.add(x)
    best_alpha = None
    best_value = -math.inf
    for alpha in sorted(candidates):
        v = value_eve(alpha)
        if v >= best_value:
            best_alpha, best_value = alpha, v
    return DeceptionPlan(
        best_alpha, best_value, value_bob(best_alpha), intervals, True
    )
