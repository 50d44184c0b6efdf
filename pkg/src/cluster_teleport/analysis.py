"""Closed-form probabilities, Monte Carlo repetition, and success grids.

The closed forms are cross-checked two ways: exhaustive enumeration of
every measurement branch through the simulator, and seeded Monte Carlo
with binomial error bounds. Repeat-until-success statistics follow the
geometric distribution in the per-attempt success probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .protocols import (
    ChannelParams,
    InputState,
    PovmConfig,
    TeleportStatus,
    channel_branch,
    make_cluster_channel,
    preserving_branch_state,
    preserving_teleport,
)
from .qcore import (
    BellOutcome,
    PureState,
    bell_measure,
    extract_qubit_state,
    measure_projective,
    povm_measure,
    tensor_product,
)

# The per-attempt success probability printed throughout is
# p = 2(|alpha|^2 + |beta|^2); its complement is |gamma|^2 + |eta|^2
# - |alpha|^2 - |beta|^2.


def success_probability(params: ChannelParams) -> float:
    """Per-attempt conclusive probability of the preserving scheme."""
    params.require_preserving_assumptions()
    return 2.0 * (abs(params.alpha) ** 2 + abs(params.beta) ** 2)


def failure_probability(params: ChannelParams) -> float:
    params.require_preserving_assumptions()
    return (
        abs(params.gamma) ** 2
        + abs(params.eta) ** 2
        - abs(params.alpha) ** 2
        - abs(params.beta) ** 2
    )


def enumerated_success_probability(zeta: InputState, params: ChannelParams) -> float:
    """Exhaustive oracle: sum branch weight times conclusive weight.

    Walks every controller outcome through the full state-vector
    pipeline and enumerates the ancilla measurement, with no sampling.
    """
    state = tensor_product(zeta.as_state("A"), make_cluster_channel(params))
    total = 0.0
    for out in bell_measure(state, "Q2", "Q3"):
        if out.post_state is None:
            continue
        branch = channel_branch(BellOutcome(out.label), params)
        final = preserving_branch_state(out.post_state, branch)
        conclusive = measure_projective(final, "E", "z")[0].probability
        total += out.probability * conclusive
    return total


# ---------------------------------------------------------------------------
# POVM outcome report

@dataclass(frozen=True)
class PovmReport:
    """Side-by-side POVM outcome probabilities for one weight pair.

    closed_form holds the scheme's stated values 1/(4*rho*s), 1/(4*rho*s)
    and 1 - 1/(2*rho*s) with s the inverse-square weight sum; simulated
    holds the exact probabilities of measuring the normalized
    post-C-NOT state. The two disagree by the squared norm of the
    weighted state, so the discrepancy is reported, never reconciled.
    """

    delta0: float
    delta1: float
    rho: float
    closed_form: tuple[float, float, float]
    simulated: tuple[float, float, float]

    @property
    def max_discrepancy(self) -> float:
        return max(abs(c - s) for c, s in zip(self.closed_form, self.simulated))


def povm_probability_report(config: PovmConfig, zeta: InputState) -> PovmReport:
    """Compare stated POVM outcome probabilities with a full simulation."""
    base = 1.0 / (4.0 * config.rho * config.inv_square_sum)
    closed = (base, base, 1.0 - 2.0 * base)
    amps = np.array(
        [config.delta0 * zeta.a, 0.0, 0.0, config.delta1 * zeta.b], dtype=np.complex128
    )
    norm = np.linalg.norm(amps)
    state = PureState(("Q4", "E"), amps / norm)
    outcomes = povm_measure(state, "E", config.elements)
    simulated = tuple(out.probability for out in outcomes)
    return PovmReport(config.delta0, config.delta1, config.rho, closed, simulated)


# ---------------------------------------------------------------------------
# Geometric repetition

def geometric_success(p: float, n: int) -> float:
    """Probability that n independent attempts contain a success: 1 - (1-p)^n."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if p == 1.0:
        return 1.0
    # log1p keeps precision for small p where (1-p)^n barely decays.
    return -math.expm1(n * math.log1p(-p))


@dataclass(frozen=True)
class SuccessGridRow:
    p: float
    N: int
    prob: float


DEFAULT_N_CURVES = (2, 10, 50, 100)
DEFAULT_P_GRID = tuple(i / 50.0 for i in range(51))
DEFAULT_P_CURVES = (0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_N_GRID = tuple(range(1, 101))


def success_grid(p_values: Sequence[float], n_values: Sequence[int]) -> list[SuccessGridRow]:
    """Full cross product of 1 - (1-p)^N over the given grids."""
    return [
        SuccessGridRow(p, n, geometric_success(p, n))
        for n in n_values
        for p in p_values
    ]


def default_success_grid() -> list[SuccessGridRow]:
    """The two standard sweeps: fixed-N curves over p, fixed-p curves over N."""
    rows = success_grid(DEFAULT_P_GRID, DEFAULT_N_CURVES)
    rows += [
        SuccessGridRow(p, n, geometric_success(p, n))
        for p in DEFAULT_P_CURVES
        for n in DEFAULT_N_GRID
    ]
    return rows


# ---------------------------------------------------------------------------
# Monte Carlo repetition harness

@dataclass(frozen=True)
class RepeatStats:
    """Empirical repeat-until-success statistics.

    first_success_histogram maps the attempt index k (1-based) to the
    number of trials whose first success happened at attempt k; trials
    that exhausted max_tries are counted in exhausted, not the histogram.
    p_hat is the per-attempt success rate over all attempts.
    """

    trials: int
    max_tries: int
    seed: int
    attempts: int
    successes: int
    first_success_histogram: dict[int, int]
    exhausted: int
    p_closed: float

    @property
    def p_hat(self) -> float:
        return self.successes / self.attempts if self.attempts else 0.0

    def empirical_within(self, n: int) -> float:
        """Fraction of trials whose first success came within n attempts."""
        hits = sum(count for k, count in self.first_success_histogram.items() if k <= n)
        return hits / self.trials


class InformationLossError(AssertionError):
    """A failed attempt did not hand the input back to the sender intact."""


def monte_carlo_repeat(
    zeta: InputState,
    params: ChannelParams,
    trials: int,
    max_tries: int,
    seed: int,
) -> RepeatStats:
    """Repeat the preserving scheme until success, per trial.

    Every retry consumes a fresh channel but reuses the physically
    recovered qubit-A state: the next attempt's input is read back off
    the failed run's final state, never from a stored copy, and a
    fidelity-one check against the original guards each recovery.
    Trial k draws its generator from (seed, k), so results do not depend
    on execution order.
    """
    if trials < 1 or max_tries < 1:
        raise ValueError("trials and max_tries must both be >= 1")
    reference = zeta.as_state("A")
    histogram: dict[int, int] = {}
    attempts = 0
    successes = 0
    exhausted = 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        current = zeta
        for attempt in range(1, max_tries + 1):
            attempts += 1
            result = preserving_teleport(current, params, seed=rng)
            if result.status is TeleportStatus.SUCCESS:
                successes += 1
                histogram[attempt] = histogram.get(attempt, 0) + 1
                break
            recovered = extract_qubit_state(result.final_state, "A")
            fid = abs(np.vdot(reference.amps, recovered.amps)) ** 2
            if abs(fid - 1.0) > 1e-9:
                raise InformationLossError(
                    f"failed attempt returned fidelity {fid!r} on the sender qubit"
                )
            current = InputState(complex(recovered.amps[0]), complex(recovered.amps[1]))
        else:
            exhausted += 1
    return RepeatStats(
        trials=trials,
        max_tries=max_tries,
        seed=seed,
        attempts=attempts,
        successes=successes,
        first_success_histogram=dict(sorted(histogram.items())),
        exhausted=exhausted,
        p_closed=success_probability(params),
    )
