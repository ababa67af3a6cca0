"""Core value types for the deception simulator.

Meanings and codewords are integers in {0, ..., S-1} for a codebook of
cardinality S.  Two sentinels extend the alphabets: NULL_MSG marks an erased
codeword (and an estimator's deliberate "no decision"), NULL_KEY marks the
absence of an encryption key.  Semantic distortion is a three-level distance:
0 for an exact match, ``d_loss`` for a lost meaning, ``d_conf`` for a wrong
one, with ``d_conf > d_loss > 0`` so confusion hurts more than loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


class _Sentinel:
    """Identity-compared marker; two of these exist, NULL_MSG and NULL_KEY."""

    __slots__ = ("_name",)

    def __init__(self, name: str) -> None:
        self._name = name

    def __repr__(self) -> str:
        return self._name


#: Erased codeword / withheld estimate.
NULL_MSG = _Sentinel("NULL_MSG")
#: Absent key (deception not activated, or key lost in transit).
NULL_KEY = _Sentinel("NULL_KEY")

Symbol = int | _Sentinel
Key = int | _Sentinel

#: Largest codebook the exhaustive-enumeration oracle will accept.
ENUMERATION_CAP = 4096


@dataclass(frozen=True)
class DistortionModel:
    """Three-level semantic distance parameters (validated by the scenario)."""

    d_loss: float
    d_conf: float


@dataclass(frozen=True)
class Scenario:
    """One experiment configuration.

    ``codebook_size`` is the cardinality S of the meaning set; keys live in
    {1, ..., S-1}.  ``alpha`` is the deception activation rate: the prior
    probability that a transmission carries a real key rather than NULL_KEY.
    ``payload_bits`` and ``code_rate`` determine the blocklength of the
    finite-blocklength code used on both transport channels, and the SNR
    fields place the two receivers on that code's error-rate curve.
    """

    codebook_size: int
    d_loss: float
    d_conf: float
    alpha: float
    payload_bits: int = 64
    code_rate: float = 0.5
    snr_bob_db: float = 4.0
    snr_eve_db: float = 0.0

    @property
    def distortion(self) -> DistortionModel:
        return DistortionModel(self.d_loss, self.d_conf)

    @property
    def keyspace_size(self) -> int:
        return self.codebook_size - 1

    @property
    def blocklength(self) -> int:
        """Channel uses per packet, ``payload_bits / code_rate`` rounded."""
        return round(self.payload_bits / self.code_rate)


class ScenarioError(ValueError):
    """Raised by validate_scenario; carries the full list of violations."""

    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = list(violations)


def _is_int(x: object) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def scenario_violations(s: Scenario) -> list[str]:
    """Return every constraint the scenario breaks (empty list if none)."""
    bad: list[str] = []
    if not _is_int(s.codebook_size) or s.codebook_size < 2:
        bad.append(f"codebook_size must be an integer >= 2, got {s.codebook_size!r}")
    if not (math.isfinite(s.d_loss) and s.d_loss > 0):
        bad.append(f"d_loss must be finite and > 0, got {s.d_loss!r}")
    if not (math.isfinite(s.d_conf) and s.d_conf > s.d_loss):
        bad.append(f"d_conf must be finite and > d_loss, got {s.d_conf!r}")
    if not (math.isfinite(s.alpha) and 0.0 <= s.alpha <= 1.0):
        bad.append(f"alpha must lie in [0, 1], got {s.alpha!r}")
    if not _is_int(s.payload_bits) or s.payload_bits < 1:
        bad.append(f"payload_bits must be a positive integer, got {s.payload_bits!r}")
    if not (math.isfinite(s.code_rate) and 0.0 < s.code_rate <= 1.0):
        bad.append(f"code_rate must lie in (0, 1], got {s.code_rate!r}")
    else:
        n = s.payload_bits / s.code_rate
        if abs(n - round(n)) > 1e-9:
            bad.append(
                f"payload_bits/code_rate must be an integer blocklength, got {n!r}"
            )
    for field in ("snr_bob_db", "snr_eve_db"):
        if not math.isfinite(getattr(s, field)):
            bad.append(f"{field} must be finite, got {getattr(s, field)!r}")
    return bad


def validate_scenario(s: Scenario) -> Scenario:
    """Return ``s`` unchanged, or raise ScenarioError listing all violations."""
    bad = scenario_violations(s)
    if bad:
        raise ScenarioError(bad)
    return s


def distance(w: int, w_hat: Symbol, model: DistortionModel) -> float:
    """Semantic distance d(w, w_hat): 0 exact, d_loss erased, d_conf wrong."""
    if w is NULL_MSG:
        raise ValueError("true meaning cannot be the error flag NULL_MSG")
    if w_hat is NULL_MSG:
        return model.d_loss
    if w_hat == w:
        return 0.0
    return model.d_conf
