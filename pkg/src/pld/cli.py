"""Command-line drivers: error-rate tables, receiver sweeps, activation-rate
optimization, and an oracle-based self-check suite.

All tabular output is CSV (comma, dot-decimal, UTF-8, LF) with a fixed
header; byte-identical for identical inputs and seed.  Exit codes: 0 on
success, 1 when a validation gate fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import distortion, montecarlo, strategy
from .channels import primary_pmf, secondary_pmf
from .core import (
    ENUMERATION_CAP,
    NULL_KEY,
    NULL_MSG,
    Scenario,
    ScenarioError,
    validate_scenario,
)
from .crypto import ShiftCipher, decrypt_batch, encrypt_batch
from .distortion import DROPPING, EXCLUSION, PERCEPTION, ReceiverStrategy
from .fbl import FblCode, packet_error_rate, snr_db_to_linear

SCENARIO_KEYS = frozenset(
    {
        "codebook_size",
        "d_loss",
        "d_conf",
        "alpha",
        "payload_bits",
        "code_rate",
        "snr_bob_db",
        "snr_eve_db",
        "d_max",
        "mc_trials",
        "seed",
    }
)

_MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class ScenarioFile:
    """A parsed scenario document: model parameters plus run settings."""

    scenario: Scenario
    d_max: float
    mc_trials: int
    seed: int


def _is_int(x: object) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_real(x: object) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def load_scenario_file(path: str) -> ScenarioFile:
    """Parse and validate a scenario JSON document (strict keys)."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    problems = []
    unknown = sorted(set(data) - SCENARIO_KEYS)
    if unknown:
        problems.append(f"unknown keys: {', '.join(unknown)}")
    missing = sorted(SCENARIO_KEYS - set(data))
    if missing:
        problems.append(f"missing keys: {', '.join(missing)}")
    if problems:
        raise ValueError(f"{path}: " + "; ".join(problems))

    size = data["codebook_size"]
    if size == "2^64":
        size = 1 << 64
    elif not _is_int(size):
        problems.append(
            f"codebook_size must be an integer or the string \"2^64\", got {size!r}"
        )
    for key in ("d_loss", "d_conf", "alpha", "code_rate", "snr_bob_db",
                "snr_eve_db", "d_max"):
        if not _is_real(data[key]):
            problems.append(f"{key} must be a number, got {data[key]!r}")
    for key in ("payload_bits", "mc_trials", "seed"):
        if not _is_int(data[key]):
            problems.append(f"{key} must be an integer, got {data[key]!r}")
    if problems:
        raise ValueError(f"{path}: " + "; ".join(problems))

    scenario = validate_scenario(
        Scenario(
            codebook_size=size,
            d_loss=float(data["d_loss"]),
            d_conf=float(data["d_conf"]),
            alpha=float(data["alpha"]),
            payload_bits=data["payload_bits"],
            code_rate=float(data["code_rate"]),
            snr_bob_db=float(data["snr_bob_db"]),
            snr_eve_db=float(data["snr_eve_db"]),
        )
    )
    d_max = float(data["d_max"])
    if not (math.isfinite(d_max) and d_max > 0):
        problems.append(f"d_max must be finite and > 0, got {data['d_max']!r}")
    if data["mc_trials"] < 1:
        problems.append(f"mc_trials must be >= 1, got {data['mc_trials']}")
    if not 0 <= data["seed"] <= _MAX_SEED:
        problems.append(f"seed must fit in 64 bits, got {data['seed']}")
    if problems:
        raise ValueError(f"{path}: " + "; ".join(problems))
    return ScenarioFile(scenario, d_max, data["mc_trials"], data["seed"])


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_lines(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def write_csv(header: list[str], rows: list[tuple], out: str | None) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    write_lines(lines, out)


def snr_grid(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive dB grid lo, lo+step, ...; index arithmetic avoids drift."""
    if not all(math.isfinite(v) for v in (lo, hi, step)):
        raise ValueError(f"SNR range values must be finite, got {(lo, hi, step)}")
    if step <= 0 or lo >= hi:
        raise ValueError(
            f"need lo < hi and step > 0, got lo={lo}, hi={hi}, step={step}"
        )
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _error_table_code(args) -> FblCode:
    if args.scenario is not None:
        return FblCode.from_scenario(load_scenario_file(args.scenario).scenario)
    blocklength = args.payload_bits / args.code_rate
    if not (0 < args.code_rate <= 1) or args.payload_bits < 1:
        raise ValueError(
            f"need payload_bits >= 1 and code_rate in (0, 1], got "
            f"{args.payload_bits}, {args.code_rate}"
        )
    if abs(blocklength - round(blocklength)) > 1e-9:
        raise ValueError(f"non-integer blocklength {blocklength}")
    return FblCode(round(blocklength), args.payload_bits)


def cmd_error_table(args) -> int:
    code = _error_table_code(args)
    rows = []
    for snr in snr_grid(args.snr_lo, args.snr_hi, args.snr_step):
        rows.append((snr, packet_error_rate(snr_db_to_linear(snr), code)))
    write_csv(["snr_db", "epsilon"], rows, args.out)
    return 0


def cmd_sweep_receiver(args) -> int:
    scenario = load_scenario_file(args.scenario).scenario
    code = FblCode.from_scenario(scenario)
    rows = []
    for snr in snr_grid(args.snr_lo, args.snr_hi, args.snr_step):
        eps = packet_error_rate(snr_db_to_linear(snr), code)
        deltas = distortion.delta_terms(scenario, eps)
        sol = strategy.optimal_receiver_strategy(
            deltas, scenario=scenario, eps_p=eps
        )
        rows.append(
            (
                snr,
                eps,
                eps,
                deltas.delta1,
                deltas.delta2,
                deltas.delta3,
                sol.strategy.beta1,
                sol.strategy.beta2,
                sol.strategy.beta3,
                sol.value,
            )
        )
    write_csv(
        [
            "snr_db",
            "eps_p",
            "eps_s",
            "delta1",
            "delta2",
            "delta3",
            "beta1",
            "beta2",
            "beta3",
            "d_tilde_min",
        ],
        rows,
        args.out,
    )
    return 0


def cmd_optimize_alpha(args) -> int:
    loaded = load_scenario_file(args.scenario)
    rows = []
    for snr_bob in snr_grid(args.bob_snr_lo, args.bob_snr_hi, args.bob_snr_step):
        for snr_eve in snr_grid(args.eve_snr_lo, args.eve_snr_hi, args.eve_snr_step):
            cell = replace(
                loaded.scenario, snr_bob_db=snr_bob, snr_eve_db=snr_eve
            )
            plan = strategy.optimize_deception(cell, cell, loaded.d_max)
            rows.append(
                (
                    snr_bob,
                    snr_eve,
                    plan.alpha_opt,
                    plan.eve_distortion,
                    plan.bob_distortion,
                    plan.feasible,
                )
            )
    write_csv(
        [
            "snr_bob_db",
            "snr_eve_db",
            "alpha_opt",
            "eve_distortion",
            "bob_distortion",
            "feasible",
        ],
        rows,
        args.out,
    )
    return 0


# ---------------------------------------------------------------------------
# validation gates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GateResult:
    name: str
    status: str  # PASS / FAIL / SKIP
    detail: str


def _gate_cipher_identities(scenario: Scenario, rng: np.random.Generator) -> GateResult:
    size = scenario.codebook_size
    cipher = ShiftCipher(size)
    violations = 0
    if size <= 256:
        checks = 0
        for w in range(size):
            if cipher.encrypt(w, NULL_KEY) != w:
                violations += 1
            if cipher.decrypt(w, NULL_KEY) != w:
                violations += 1
            checks += 2
            for k in range(1, size):
                s = cipher.encrypt(w, k)
                if s == w or cipher.decrypt(s, k) != w:
                    violations += 1
                checks += 1
        if cipher.decrypt(NULL_MSG, NULL_KEY) is not NULL_MSG:
            violations += 1
        checks += 1
        detail = f"{violations} violations in {checks} exhaustive checks (S={size})"
    else:
        n = 100_000
        w = rng.integers(0, size, size=n, dtype=np.uint64)
        k = rng.integers(0, size - 1, size=n, dtype=np.uint64) + np.uint64(1)
        active = np.ones(n, dtype=bool)
        s = encrypt_batch(w, k, active, size)
        violations += int((s == w).sum())
        violations += int((decrypt_batch(s, k, active, size) != w).sum())
        if cipher.decrypt(NULL_MSG, 1) is not NULL_MSG:
            violations += 1
        detail = f"{violations} violations in {n} randomized checks (S={size})"
    status = "PASS" if violations == 0 else "FAIL"
    return GateResult("cipher-identities", status, detail)


def _gate_channel_rows(eps_values: list[float]) -> GateResult:
    worst = 0.0
    for eps in eps_values:
        row_p = primary_pmf(7, 7, eps) + primary_pmf(NULL_MSG, 7, eps)
        row_s = secondary_pmf(3, 3, eps) + secondary_pmf(NULL_KEY, 3, eps)
        row_null = secondary_pmf(NULL_KEY, NULL_KEY, eps)
        for row in (row_p, row_s, row_null):
            worst = max(worst, abs(row - 1.0))
        for stray in (primary_pmf(8, 7, eps), secondary_pmf(4, 3, eps),
                      secondary_pmf(3, NULL_KEY, eps)):
            worst = max(worst, abs(stray))
    status = "PASS" if worst <= 1e-12 else "FAIL"
    return GateResult("channel-pmf-rows", status, f"max row-sum deviation {worst:.3e}")


_GATE_STRATEGIES = (
    PERCEPTION,
    DROPPING,
    EXCLUSION,
    ReceiverStrategy(1 / 3, 1 / 3, 1 / 3),
)


def _gate_enumeration(
    scenario: Scenario, eps_pairs: list[tuple[float, float]]
) -> GateResult:
    if scenario.codebook_size > ENUMERATION_CAP:
        return GateResult(
            "closed-form-vs-enumeration",
            "SKIP",
            f"skipped: cardinality cap — S={scenario.codebook_size} exceeds "
            f"{ENUMERATION_CAP}",
        )
    worst = 0.0
    for eps_p, eps_s in eps_pairs:
        for strat in _GATE_STRATEGIES:
            closed = distortion.opportunistic_distortion(
                scenario, eps_p, eps_s, strat
            ).total
            oracle = distortion.enumeration_oracle(scenario, eps_p, eps_s, strat)
            worst = max(worst, abs(closed - oracle) / max(1.0, abs(oracle)))
    status = "PASS" if worst <= 1e-10 else "FAIL"
    return GateResult(
        "closed-form-vs-enumeration",
        status,
        f"max rel diff {worst:.3e} (tol 1e-10)",
    )


def _gate_perception_reduction(
    scenario: Scenario, rng: np.random.Generator
) -> GateResult:
    worst = 0.0
    for _ in range(200):
        alpha, eps_p, eps_s = rng.random(3)
        sc = replace(scenario, alpha=float(alpha))
        a = distortion.opportunistic_distortion(
            sc, float(eps_p), float(eps_s), PERCEPTION
        ).total
        b = distortion.deterministic_pipeline_distortion(
            sc, float(eps_p), float(eps_s)
        ).total
        worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    status = "PASS" if worst <= 1e-12 else "FAIL"
    return GateResult(
        "perception-vs-pipeline", status, f"max rel diff {worst:.3e} (tol 1e-12)"
    )


def _gate_monte_carlo(
    scenario: Scenario,
    eps_p: float,
    eps_s: float,
    trials: int,
    seed: int,
    workers: int,
) -> GateResult:
    children = np.random.SeedSequence(seed).spawn(len(_GATE_STRATEGIES) + 1)
    best = strategy.optimal_receiver_strategy(
        distortion.delta_terms(scenario, eps_s)
    ).strategy
    worst_sigma = 0.0
    for child, strat in zip(children, _GATE_STRATEGIES + (best,)):
        est = montecarlo.estimate_distortion(
            scenario,
            eps_p,
            eps_s,
            strat,
            trials,
            int(child.generate_state(1, np.uint64)[0]),
            workers,
        )
        closed = distortion.opportunistic_distortion(
            scenario, eps_p, eps_s, strat
        ).total
        gap = abs(est.mean - closed)
        # distortion lives in {0, d_loss, d_conf}, so Var <= d_conf * mean;
        # the analytic bound keeps the gate meaningful when events are so
        # rare that the empirical standard error collapses to zero
        se_bound = math.sqrt(scenario.d_conf * max(closed, 0.0) / trials)
        tol = 4.0 * max(est.std_error, se_bound) + 1e-12
        if gap > tol:
            return GateResult(
                "closed-form-vs-monte-carlo",
                "FAIL",
                f"|{est.mean:.6g} - {closed:.6g}| = {gap:.3e} > "
                f"tol={tol:.3e} at {trials} trials",
            )
        if est.std_error > 0:
            worst_sigma = max(worst_sigma, gap / est.std_error)
    return GateResult(
        "closed-form-vs-monte-carlo",
        "PASS",
        f"max |mean-analytic| = {worst_sigma:.2f} sigma over "
        f"{len(_GATE_STRATEGIES) + 1} strategies at {trials} trials",
    )


def _gate_decomposition(
    scenario: Scenario, eps_pairs: list[tuple[float, float]]
) -> GateResult:
    worst = 0.0
    for eps_p, eps_s in eps_pairs:
        reports = [
            distortion.opportunistic_distortion(scenario, eps_p, eps_s, strat)
            for strat in _GATE_STRATEGIES
        ]
        reports.append(
            distortion.deterministic_pipeline_distortion(scenario, eps_p, eps_s)
        )
        for rep in reports:
            gap = abs(rep.total - (rep.loss_part + rep.confusion_part))
            worst = max(worst, gap / max(1.0, abs(rep.total)))
    status = "PASS" if worst <= 1e-12 else "FAIL"
    return GateResult(
        "report-decomposition", status, f"max rel diff {worst:.3e} (tol 1e-12)"
    )


def run_validation(
    loaded: ScenarioFile, trials: int, seed: int, workers: int = 1
) -> list[GateResult]:
    """Run every self-check gate; FAIL on any discrepancy beyond tolerance."""
    scenario = loaded.scenario
    code = FblCode.from_scenario(scenario)
    eps_bob = packet_error_rate(snr_db_to_linear(scenario.snr_bob_db), code)
    eps_eve = packet_error_rate(snr_db_to_linear(scenario.snr_eve_db), code)
    eps_pairs = [(eps_bob, eps_bob), (eps_eve, eps_eve), (0.1, 0.2), (0.5, 0.5)]
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    return [
        _gate_cipher_identities(scenario, rng),
        _gate_channel_rows([0.0, 0.25, 1.0, eps_bob, eps_eve]),
        _gate_enumeration(scenario, eps_pairs),
        _gate_perception_reduction(scenario, rng),
        _gate_monte_carlo(scenario, eps_bob, eps_bob, trials, seed, workers),
        _gate_decomposition(scenario, eps_pairs),
    ]


def cmd_validate(args) -> int:
    loaded = load_scenario_file(args.scenario)
    trials = loaded.mc_trials if args.trials is None else args.trials
    seed = loaded.seed if args.seed is None else args.seed
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= seed <= _MAX_SEED:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    if args.workers < 1:
        raise ValueError(f"workers must be >= 1, got {args.workers}")
    results = run_validation(loaded, trials, seed, args.workers)
    lines = [f"{r.status} {r.name}: {r.detail}" for r in results]
    counts = {s: sum(r.status == s for r in results) for s in ("PASS", "FAIL", "SKIP")}
    lines.append(
        f"gates: {counts['PASS']} passed, {counts['FAIL']} failed, "
        f"{counts['SKIP']} skipped"
    )
    write_lines(lines, args.out)
    return 1 if counts["FAIL"] else 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser, need_scenario: bool) -> None:
    sub.add_argument(
        "--scenario",
        required=need_scenario,
        default=None,
        help="scenario JSON file",
    )
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument(
        "--seed", type=int, default=None, help="override the scenario seed"
    )
    sub.add_argument(
        "--trials", type=int, default=None, help="override scenario mc_trials"
    )
    sub.add_argument(
        "--workers", type=int, default=1, help="worker threads for Monte Carlo"
    )


def _add_snr_range(sub: argparse.ArgumentParser, prefix: str = "snr") -> None:
    sub.add_argument(f"--{prefix}-lo", type=float, default=-5.0)
    sub.add_argument(f"--{prefix}-hi", type=float, default=5.0)
    sub.add_argument(f"--{prefix}-step", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pld",
        description="Semantic-distortion experiments for physical-layer "
        "deception over dual transport channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("error-table", help="packet error rate vs SNR")
    _add_common(p, need_scenario=False)
    p.add_argument("--payload-bits", type=int, default=64)
    p.add_argument("--code-rate", type=float, default=0.5)
    _add_snr_range(p)
    p.set_defaults(func=cmd_error_table)

    p = sub.add_parser(
        "sweep-receiver", help="optimal receiver strategy across an SNR sweep"
    )
    _add_common(p, need_scenario=True)
    _add_snr_range(p)
    p.set_defaults(func=cmd_sweep_receiver)

    p = sub.add_parser(
        "optimize-alpha", help="best activation rate over an SNR grid"
    )
    _add_common(p, need_scenario=True)
    _add_snr_range(p, "bob-snr")
    _add_snr_range(p, "eve-snr")
    p.set_defaults(func=cmd_optimize_alpha)

    p = sub.add_parser("validate", help="run the oracle self-check suite")
    _add_common(p, need_scenario=True)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
