"""The two controlled probabilistic teleportation protocols.

Both schemes share the same resource: a sender (qubits A and Q1), a
controller (Q2, Q3) and a receiver (Q4) holding the four-qubit cluster
channel alpha|0000> + beta|1010> + gamma|0101> - eta|1111>.

povm_teleport: both parties Bell-measure, the receiver appends an
ancilla and runs an unambiguous-discrimination POVM. Conclusive outcomes
recover the input on Q4; the inconclusive outcome destroys it everywhere.

preserving_teleport: only the controller measures. The sender runs a
four-gate pipeline plus single-qubit measurements that either teleport
the input to Q4 (conclusive) or leave the input intact on the sender's
qubit A, ready for a retry over a fresh channel.

Analytical outcome tables (collapse_table_entry, channel_branch) are
provided as independent oracles against the simulated runs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from .qcore import (
    CNOT,
    BellOutcome,
    DensityMatrix,
    GateMatrix,
    IDENTITY,
    MeasurementOutcome,
    PAULI_X,
    PAULI_XZ,
    PAULI_Z,
    PovmElement,
    PureState,
    apply_gate,
    bell_measure,
    controlled,
    qubit,
    qubit_fidelity,
    sample_bell,
    sample_povm,
    sample_projective,
    tensor_product,
)

SENDER = "sender"
CONTROLLER = "controller"
RECEIVER = "receiver"

CHANNEL_LABELS = ("Q1", "Q2", "Q3", "Q4")


class AssumptionError(ValueError):
    """A protocol precondition on the channel parameters is violated."""


class PovmPositivityError(ValueError):
    """The completion element of the POVM would not be positive semidefinite."""


# ---------------------------------------------------------------------------
# Inputs

@dataclass(frozen=True)
class InputState:
    """The unknown single-qubit state a|0> + b|1> to be teleported."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        norm_sq = abs(a) ** 2 + abs(b) ** 2
        if not (math.isfinite(norm_sq) and abs(norm_sq - 1.0) <= 1e-12):
            raise ValueError(f"input state not normalized: |a|^2 + |b|^2 = {norm_sq!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def as_state(self, label: str = "A") -> PureState:
        return qubit(label, self.a, self.b)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "InputState":
        vec = rng.normal(size=2) + 1j * rng.normal(size=2)
        vec /= np.linalg.norm(vec)
        return cls(complex(vec[0]), complex(vec[1]))


@dataclass(frozen=True)
class ChannelParams:
    """Cluster-channel coefficients (alpha, beta, gamma, eta).

    The information-preserving protocol additionally requires the phase
    alignment arg(alpha) = arg(eta), arg(beta) = arg(gamma) and the
    magnitude ordering |alpha| <= |eta|, |beta| <= |gamma|. Those flags
    are checked where needed, never silently assumed.
    """

    alpha: complex
    beta: complex
    gamma: complex
    eta: complex

    def __post_init__(self):
        vals = [complex(getattr(self, name)) for name in ("alpha", "beta", "gamma", "eta")]
        norm_sq = sum(abs(v) ** 2 for v in vals)
        if not (math.isfinite(norm_sq) and abs(norm_sq - 1.0) <= 1e-12):
            raise ValueError(
                f"channel parameters not normalized: sum of squares = {norm_sq!r}"
            )
        for name, v in zip(("alpha", "beta", "gamma", "eta"), vals):
            object.__setattr__(self, name, v)

    @classmethod
    def uniform(cls) -> "ChannelParams":
        return cls(0.5, 0.5, 0.5, 0.5)

    @property
    def phase_aligned(self) -> bool:
        return _phases_match(self.alpha, self.eta) and _phases_match(self.beta, self.gamma)

    @property
    def magnitude_ordered(self) -> bool:
        return (
            abs(self.alpha) <= abs(self.eta) + 1e-12
            and abs(self.beta) <= abs(self.gamma) + 1e-12
        )

    def require_preserving_assumptions(self) -> None:
        problems = []
        if not self.phase_aligned:
            problems.append("phases of (alpha, eta) and (beta, gamma) must match pairwise")
        if not self.magnitude_ordered:
            problems.append("|alpha| <= |eta| and |beta| <= |gamma| must hold")
        if problems:
            raise AssumptionError("channel assumption violated: " + "; ".join(problems))


def _phases_match(x: complex, y: complex, atol: float = 1e-9) -> bool:
    # A (near-)zero coefficient puts no constraint on its partner's phase.
    if abs(x) <= 1e-12 or abs(y) <= 1e-12:
        return True
    return abs((x * y.conjugate()).imag) <= atol * abs(x * y.conjugate())


def make_cluster_channel(
    params: ChannelParams, labels: Sequence[str] = CHANNEL_LABELS
) -> PureState:
    """The shared four-qubit channel with its single negative amplitude."""
    amps = np.zeros(16, dtype=np.complex128)
    amps[0b0000] = params.alpha
    amps[0b1010] = params.beta
    amps[0b0101] = params.gamma
    amps[0b1111] = -params.eta
    return PureState(tuple(labels), amps)


# ---------------------------------------------------------------------------
# Corrections and classical bookkeeping

class CorrectionOp(Enum):
    ID = "I"
    X = "X"
    Z = "Z"
    XZ = "XZ"

    @property
    def gate(self) -> GateMatrix:
        return {
            CorrectionOp.ID: IDENTITY,
            CorrectionOp.X: PAULI_X,
            CorrectionOp.Z: PAULI_Z,
            CorrectionOp.XZ: PAULI_XZ,
        }[self]


class BranchForm(Enum):
    """Shape of the collapsed (Q1, Q4) pair after the controller measures."""

    CORRELATED = "correlated"        # u|00> + v|11>
    ANTICORRELATED = "anticorrelated"  # u|10> + v|01> (u on Q1=1, Q4=0)


@dataclass(frozen=True)
class GateApplied:
    gate: str
    targets: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"event": "gate", "gate": self.gate, "targets": list(self.targets)}


@dataclass(frozen=True)
class Measured:
    party: str
    kind: str  # "bell", "z", "x" or "povm"
    targets: tuple[str, ...]
    outcome: str
    probability: float

    def to_dict(self) -> dict:
        return {
            "event": "measurement",
            "party": self.party,
            "kind": self.kind,
            "targets": list(self.targets),
            "outcome": self.outcome,
            "probability": self.probability,
        }


@dataclass(frozen=True)
class ClassicalMessage:
    sender: str
    recipient: str
    bits: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "event": "message",
            "sender": self.sender,
            "recipient": self.recipient,
            "bits": list(self.bits),
        }


@dataclass(frozen=True)
class CorrectionApplied:
    op: CorrectionOp
    target: str

    def to_dict(self) -> dict:
        return {"event": "correction", "op": self.op.value, "target": self.target}


Event = Union[GateApplied, Measured, ClassicalMessage, CorrectionApplied]


@dataclass(frozen=True)
class Transcript:
    """Ordered record of everything that happened in one protocol run."""

    events: tuple[Event, ...]

    def to_dicts(self) -> list[dict]:
        return [e.to_dict() for e in self.events]

    def to_json(self) -> str:
        return json.dumps(self.to_dicts())


class TeleportStatus(Enum):
    SUCCESS = "success"
    FAIL_RECOVERABLE = "fail-recoverable"
    FAIL_INCONCLUSIVE = "fail-inconclusive"


@dataclass(frozen=True)
class TeleportResult:
    status: TeleportStatus
    target_fidelity: float
    sender_fidelity_on_fail: Optional[float]
    transcript: Transcript
    final_state: PureState


# ---------------------------------------------------------------------------
# Analytical outcome table for the POVM scheme (16 cells)

@dataclass(frozen=True)
class CollapseEntry:
    """One cell of the double-Bell-measurement collapse table.

    The receiver's unnormalized collapse is c0|0> + c1|1> with
    (c0, c1) = (a*delta0, b*delta1) when pre_correction is ID and
    (b*delta1, a*delta0) when it is X; applying pre_correction always
    yields delta0*a|0> + delta1*b|1>. Signs ride in the deltas.
    """

    alice: BellOutcome
    bob: BellOutcome
    delta0: complex
    delta1: complex
    pre_correction: CorrectionOp

    def collapse_coefficients(self, zeta: InputState) -> tuple[complex, complex]:
        if self.pre_correction is CorrectionOp.X:
            return (zeta.b * self.delta1, zeta.a * self.delta0)
        return (zeta.a * self.delta0, zeta.b * self.delta1)

    def collapse_weight(self, zeta: InputState) -> float:
        c0, c1 = self.collapse_coefficients(zeta)
        return (abs(c0) ** 2 + abs(c1) ** 2) / 4.0

    def collapse_state(self, zeta: InputState, label: str = "Q4") -> Optional[PureState]:
        c0, c1 = self.collapse_coefficients(zeta)
        norm = math.hypot(abs(c0), abs(c1))
        if norm <= 1e-15:
            return None
        return PureState((label,), np.array([c0, c1]) / norm)

    def describe(self) -> str:
        """Human-readable form of the unnormalized collapse, e.g. 'b*alpha|0> - a*eta|1>'."""
        return _describe_cell(self)


# (pair, swapped, sign) per (alice, bob): pair picks (alpha, eta) or
# (beta, gamma); swapped means the receiver needs an X; sign multiplies
# the |1> coefficient as the table states it.
_P, _M = 1, -1
_AE, _BG = "alpha_eta", "beta_gamma"
_COLLAPSE_TABLE = {
    (BellOutcome.PHI_PLUS, BellOutcome.PHI_PLUS): (_AE, False, _M),
    (BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS): (_AE, False, _P),
    (BellOutcome.PHI_PLUS, BellOutcome.PSI_PLUS): (_BG, True, _P),
    (BellOutcome.PHI_PLUS, BellOutcome.PSI_MINUS): (_BG, True, _M),
    (BellOutcome.PHI_MINUS, BellOutcome.PHI_PLUS): (_AE, False, _P),
    (BellOutcome.PHI_MINUS, BellOutcome.PHI_MINUS): (_AE, False, _M),
    (BellOutcome.PHI_MINUS, BellOutcome.PSI_PLUS): (_BG, True, _M),
    (BellOutcome.PHI_MINUS, BellOutcome.PSI_MINUS): (_BG, True, _P),
    (BellOutcome.PSI_PLUS, BellOutcome.PHI_PLUS): (_AE, True, _M),
    (BellOutcome.PSI_PLUS, BellOutcome.PHI_MINUS): (_AE, True, _P),
    (BellOutcome.PSI_PLUS, BellOutcome.PSI_PLUS): (_BG, False, _P),
    (BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS): (_BG, False, _M),
    (BellOutcome.PSI_MINUS, BellOutcome.PHI_PLUS): (_AE, True, _P),
    (BellOutcome.PSI_MINUS, BellOutcome.PHI_MINUS): (_AE, True, _M),
    (BellOutcome.PSI_MINUS, BellOutcome.PSI_PLUS): (_BG, False, _M),
    (BellOutcome.PSI_MINUS, BellOutcome.PSI_MINUS): (_BG, False, _P),
}


def collapse_table_entry(
    alice: BellOutcome, bob: BellOutcome, params: ChannelParams
) -> CollapseEntry:
    """Receiver's collapse for one (sender, controller) Bell outcome pair."""
    pair, swapped, sign = _COLLAPSE_TABLE[(alice, bob)]
    if pair == _AE:
        c_zero, c_one = params.alpha, params.eta
    else:
        c_zero, c_one = params.beta, params.gamma
    # Written form: on |0> the a-or-b coefficient multiplies c_zero when
    # not swapped (a*c_zero|0> + sign*b*c_one|1>), and the swap exchanges
    # which of a/b appears where (b*c_zero|0> + sign*a*c_one|1>). After
    # the X correction the deltas are read off the |0>/|1> coefficients.
    if swapped:
        delta0, delta1 = sign * c_one, c_zero
    else:
        delta0, delta1 = c_zero, sign * c_one
    return CollapseEntry(alice, bob, delta0, delta1, CorrectionOp.X if swapped else CorrectionOp.ID)


def _describe_cell(entry: CollapseEntry) -> str:
    pair, swapped, sign = _COLLAPSE_TABLE[(entry.alice, entry.bob)]
    c_zero, c_one = ("alpha", "eta") if pair == _AE else ("beta", "gamma")
    first, second = ("b", "a") if swapped else ("a", "b")
    op = "-" if sign < 0 else "+"
    return f"{first}*{c_zero}|0> {op} {second}*{c_one}|1>"


# ---------------------------------------------------------------------------
# Collapsed-channel branches for the preserving scheme (4 rows)

@dataclass(frozen=True)
class BranchInfo:
    """Collapsed (Q1, Q4) pair for one controller outcome.

    u and v are the two nonzero amplitudes with |u| <= |v| under the
    magnitude-ordering assumption; signs follow the analytic table
    (e.g. v < 0 for phi+ with positive parameters). rotation_axis is the
    Bloch axis of the orthogonalizing rotation, built from |u|/|v|.
    """

    outcome: BellOutcome
    u: complex
    v: complex
    form: BranchForm
    prob: float
    rotation_axis: tuple[float, float, float]

    def collapse_state(self, labels: Sequence[str] = ("Q1", "Q4")) -> PureState:
        amps = np.zeros(4, dtype=np.complex128)
        if self.form is BranchForm.CORRELATED:
            amps[0b00], amps[0b11] = self.u, self.v
        else:
            # The beta term of the channel carries Q1=1, Q4=0, so the
            # small coefficient u sits on |10> in (Q1, Q4) order.
            amps[0b10], amps[0b01] = self.u, self.v
        return PureState(tuple(labels), amps)

    def magnitude_ratio(self) -> float:
        return abs(self.u) / abs(self.v)


def channel_branch(bob: BellOutcome, params: ChannelParams) -> BranchInfo:
    """Analytic (Q1, Q4) branch for one controller Bell outcome."""
    params.require_preserving_assumptions()
    if bob in (BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS):
        small, large = params.alpha, params.eta
        form = BranchForm.CORRELATED
        sign = -1.0 if bob is BellOutcome.PHI_PLUS else 1.0
    else:
        small, large = params.beta, params.gamma
        form = BranchForm.ANTICORRELATED
        sign = 1.0 if bob is BellOutcome.PSI_PLUS else -1.0
    norm_sq = abs(small) ** 2 + abs(large) ** 2
    if norm_sq <= 1e-15:
        raise ValueError(f"branch {bob.value} has zero probability")
    norm = math.sqrt(norm_sq)
    u = small / norm
    v = sign * large / norm
    ratio = abs(u) / abs(v)
    axis = (math.sqrt(max(0.0, 1.0 - ratio * ratio)), 0.0, ratio)
    return BranchInfo(bob, u, v, form, norm_sq / 2.0, axis)


def orthogonalizing_rotation(branch: BranchInfo) -> GateMatrix:
    """Pi rotation about the branch axis that makes u|0> +/- v|1> X-distinguishable.

    Built from the real magnitude ratio c = |u|/|v|; the sign of v is
    handled by a separate Z pre-rotation on Q1.
    """
    if abs(branch.u) > abs(branch.v) + 1e-12:
        raise ValueError(
            f"branch requires |u| <= |v|, got |u| = {abs(branch.u)!r}, |v| = {abs(branch.v)!r}"
        )
    c = min(branch.magnitude_ratio(), 1.0)
    s = math.sqrt(max(0.0, 1.0 - c * c))
    return GateMatrix(np.array([[c, s], [s, -c]]), "ROT")


def canonicalization_ops(branch: BranchInfo) -> list[tuple[CorrectionOp, str]]:
    """Local Paulis that bring the collapsed pair to canonical form.

    Canonical form is u|00> + v|11> (correlated) or u|01> + v|10>
    (anticorrelated) with real u, v >= 0 up to a global phase. The
    anticorrelated branch physically collapses with its kets flipped on
    both qubits, so the sender flips Q1 and the receiver flips Q4; a
    negative v ratio is absorbed as a Z on Q1.
    """
    ops: list[tuple[CorrectionOp, str]] = []
    if branch.form is BranchForm.ANTICORRELATED:
        ops.append((CorrectionOp.X, "Q1"))
        ops.append((CorrectionOp.X, "Q4"))
    if abs(branch.u) > 1e-12:
        ratio = branch.v / branch.u
        if abs(ratio.imag) > 1e-9 * max(1.0, abs(ratio)):
            raise AssumptionError(
                f"collapsed pair has a non-real amplitude ratio {ratio!r}; "
                "phase alignment is required"
            )
        if ratio.real < 0.0:
            ops.append((CorrectionOp.Z, "Q1"))
    return ops


def discriminate_correction(
    e_bit: int, z_bit: int, x_sign: str, form: BranchForm
) -> CorrectionOp:
    """Map the sender's conclusive measurement record to the receiver's Pauli.

    Only defined on the conclusive branch (ancilla read 0). The record
    (z_bit on A, x_sign on Q1) indexes the four orthogonal cases; the
    Pauli depends on the announced branch form.
    """
    if e_bit != 0:
        raise ValueError("correction lookup is only defined for the conclusive branch")
    if z_bit not in (0, 1):
        raise ValueError(f"z_bit must be 0 or 1, got {z_bit!r}")
    if x_sign not in ("+", "-"):
        raise ValueError(f"x_sign must be '+' or '-', got {x_sign!r}")
    index = {(0, "+"): 0, (0, "-"): 1, (1, "-"): 2, (1, "+"): 3}[(z_bit, x_sign)]
    if form is BranchForm.CORRELATED:
        table = (CorrectionOp.ID, CorrectionOp.Z, CorrectionOp.X, CorrectionOp.XZ)
    else:
        table = (CorrectionOp.X, CorrectionOp.XZ, CorrectionOp.ID, CorrectionOp.Z)
    return table[index]


# ---------------------------------------------------------------------------
# POVM construction

@dataclass(frozen=True)
class PovmConfig:
    """Three-element unambiguous-discrimination POVM for weights delta0, delta1.

    The two conclusive elements project (scaled by 1/rho) onto the unit
    vectors m1, m2 proportional to |0>/delta0 +/- |1>/delta1; the third
    element completes the set and is positive semidefinite only for
    rho >= rho_min = (2 / inv_square_sum) * max(delta0^-2, delta1^-2).
    """

    delta0: float
    delta1: float
    inv_square_sum: float  # 1/delta0^2 + 1/delta1^2
    rho: float
    rho_min: float
    m1: np.ndarray
    m2: np.ndarray
    elements: tuple[PovmElement, PovmElement, PovmElement]


def povm_rho_min(delta0: float, delta1: float) -> float:
    if delta0 <= 0 or delta1 <= 0:
        raise ValueError("POVM weights must be positive")
    inv_sq = 1.0 / delta0 ** 2 + 1.0 / delta1 ** 2
    return (2.0 / inv_sq) * max(1.0 / delta0 ** 2, 1.0 / delta1 ** 2)


def make_povm(delta0: float, delta1: float, rho: float) -> PovmConfig:
    """Build and validate the discrimination POVM."""
    if delta0 <= 0 or delta1 <= 0:
        raise ValueError("POVM weights must be positive")
    if rho <= 0:
        raise ValueError("rho must be positive")
    inv_sq = 1.0 / delta0 ** 2 + 1.0 / delta1 ** 2
    rho_min = (2.0 / inv_sq) * max(1.0 / delta0 ** 2, 1.0 / delta1 ** 2)
    if rho < rho_min - 1e-12:
        raise PovmPositivityError(
            "completion element not positive semidefinite: "
            f"rho = {rho!r} is below rho_min = {rho_min!r}"
        )
    scale = 1.0 / math.sqrt(inv_sq)
    m1 = np.array([scale / delta0, scale / delta1], dtype=np.complex128)
    m2 = np.array([scale / delta0, -scale / delta1], dtype=np.complex128)
    e1 = PovmElement(np.outer(m1, m1.conj()) / rho)
    e2 = PovmElement(np.outer(m2, m2.conj()) / rho)
    e3 = PovmElement(np.eye(2) - e1.matrix - e2.matrix)
    m1.setflags(write=False)
    m2.setflags(write=False)
    return PovmConfig(delta0, delta1, inv_sq, rho, rho_min, m1, m2, (e1, e2, e3))


# ---------------------------------------------------------------------------
# Shared driver plumbing

def _bell_bits(outcome: BellOutcome) -> tuple[int, int]:
    index = list(BellOutcome).index(outcome)
    return (index >> 1, index & 1)


def _record(
    events: list[Event],
    out: MeasurementOutcome,
    party: str,
    kind: str,
    targets: tuple[str, ...],
) -> MeasurementOutcome:
    events.append(Measured(party, kind, targets, out.label, out.probability))
    return out


def _apply_correction(
    events: list[Event], state: PureState, op: CorrectionOp, target: str
) -> PureState:
    events.append(CorrectionApplied(op, target))
    if op is CorrectionOp.ID:
        return state
    return apply_gate(state, op.gate, [target])


def preserving_pipeline_gates(rotation: GateMatrix) -> list[tuple[GateMatrix, tuple[str, str]]]:
    """The sender's four-gate sequence on labels A, Q1 and ancilla E."""
    return [
        (CNOT, ("Q1", "A")),
        (CNOT, ("A", "E")),
        (controlled(rotation, "C-ROT"), ("Q1", "A")),
        (CNOT, ("A", "E")),
    ]


def preserving_branch_state(
    state: PureState, branch: BranchInfo, events: Optional[list[Event]] = None
) -> PureState:
    """Canonicalize the collapsed channel and run the sender's pipeline.

    state is any state containing labels A, Q1, Q4 (and not E) in which
    the controller's qubits have already collapsed. Returns the
    pre-ancilla-measurement state with E appended.
    """
    if events is None:
        events = []
    for op, target in canonicalization_ops(branch):
        state = _apply_correction(events, state, op, target)
    state = tensor_product(state, qubit("E", 1.0, 0.0))
    events.append(GateApplied("INIT|0>", ("E",)))
    for gate, targets in preserving_pipeline_gates(orthogonalizing_rotation(branch)):
        state = apply_gate(state, gate, targets)
        events.append(GateApplied(gate.name, targets))
    return state


# ---------------------------------------------------------------------------
# Protocol drivers

def preserving_teleport(
    zeta: InputState, params: ChannelParams, seed: int | np.random.Generator = 0
) -> TeleportResult:
    """Run the information-preserving scheme once, seeded and replayable."""
    params.require_preserving_assumptions()
    rng = np.random.default_rng(seed)
    events: list[Event] = []
    reference = zeta.as_state("A")

    state = tensor_product(reference, make_cluster_channel(params))
    bob_out = _record(
        events, sample_bell(state, "Q2", "Q3", rng), CONTROLLER, "bell", ("Q2", "Q3")
    )
    state = bob_out.post_state
    bob = BellOutcome(bob_out.label)
    bits = _bell_bits(bob)
    events.append(ClassicalMessage(CONTROLLER, SENDER, bits))
    events.append(ClassicalMessage(CONTROLLER, RECEIVER, bits))

    branch = channel_branch(bob, params)
    state = preserving_branch_state(state, branch, events)

    e_out = _record(events, sample_projective(state, "E", "z", rng), SENDER, "z", ("E",))
    state = e_out.post_state

    if e_out.label == "0":
        z_out = _record(events, sample_projective(state, "A", "z", rng), SENDER, "z", ("A",))
        state = z_out.post_state
        x_out = _record(events, sample_projective(state, "Q1", "x", rng), SENDER, "x", ("Q1",))
        state = x_out.post_state
        z_bit = int(z_out.label)
        case_index = {(0, "+"): 0, (0, "-"): 1, (1, "-"): 2, (1, "+"): 3}[(z_bit, x_out.label)]
        events.append(ClassicalMessage(SENDER, RECEIVER, (case_index >> 1, case_index & 1)))
        correction = discriminate_correction(0, z_bit, x_out.label, branch.form)
        state = _apply_correction(events, state, correction, "Q4")
        target_fid = qubit_fidelity(state, "Q4", reference)
        return TeleportResult(
            TeleportStatus.SUCCESS, target_fid, None, Transcript(tuple(events)), state
        )

    sender_fid = qubit_fidelity(state, "A", reference)
    target_fid = qubit_fidelity(state, "Q4", reference)
    return TeleportResult(
        TeleportStatus.FAIL_RECOVERABLE,
        target_fid,
        sender_fid,
        Transcript(tuple(events)),
        state,
    )


def povm_teleport(
    zeta: InputState,
    params: ChannelParams,
    rho: Optional[float] = None,
    seed: int | np.random.Generator = 0,
) -> TeleportResult:
    """Run the POVM-based scheme once, seeded and replayable.

    rho defaults to max(2, rho_min) for the branch that is reached; an
    explicit rho below the branch's rho_min raises PovmPositivityError.
    """
    rng = np.random.default_rng(seed)
    events: list[Event] = []
    reference = zeta.as_state("A")

    state = tensor_product(reference, make_cluster_channel(params))
    alice_out = _record(
        events, sample_bell(state, "A", "Q1", rng), SENDER, "bell", ("A", "Q1")
    )
    state = alice_out.post_state
    alice = BellOutcome(alice_out.label)
    events.append(ClassicalMessage(SENDER, "all", _bell_bits(alice)))

    bob_out = _record(
        events, sample_bell(state, "Q2", "Q3", rng), CONTROLLER, "bell", ("Q2", "Q3")
    )
    state = bob_out.post_state
    bob = BellOutcome(bob_out.label)
    events.append(ClassicalMessage(CONTROLLER, "all", _bell_bits(bob)))

    entry = collapse_table_entry(alice, bob, params)
    state = _apply_correction(events, state, entry.pre_correction, "Q4")

    # Normalize the residual sign/phase of the deltas so the POVM can be
    # built from positive weights; only a ratio of -1 is correctable.
    delta0, delta1 = entry.delta0, entry.delta1
    if abs(delta0) <= 1e-12 or abs(delta1) <= 1e-12:
        raise AssumptionError(
            "collapse leaves a basis state on Q4; the discrimination POVM "
            "is undefined for a zero delta"
        )
    ratio = delta1 / delta0
    if abs(ratio.imag) > 1e-9 * max(1.0, abs(ratio)):
        raise AssumptionError(
            f"collapse coefficients have non-real ratio {ratio!r}; "
            "the POVM step requires aligned phases"
        )
    if ratio.real < 0.0:
        state = _apply_correction(events, state, CorrectionOp.Z, "Q4")

    state = tensor_product(state, qubit("E", 1.0, 0.0))
    events.append(GateApplied("INIT|0>", ("E",)))
    state = apply_gate(state, CNOT, ("Q4", "E"))
    events.append(GateApplied("CNOT", ("Q4", "E")))

    d0, d1 = abs(delta0), abs(delta1)
    rho_min = povm_rho_min(d0, d1)
    rho_eff = max(2.0, rho_min) if rho is None else rho
    config = make_povm(d0, d1, rho_eff)

    povm_out = _record(
        events, sample_povm(state, "E", config.elements, rng), RECEIVER, "povm", ("E",)
    )
    state = povm_out.post_state

    if povm_out.label == "1":
        state = _apply_correction(events, state, CorrectionOp.Z, "Q4")
    target_fid = qubit_fidelity(state, "Q4", reference)
    sender_fid = qubit_fidelity(state, "A", reference)

    if povm_out.label in ("0", "1"):
        return TeleportResult(
            TeleportStatus.SUCCESS, target_fid, None, Transcript(tuple(events)), state
        )
    return TeleportResult(
        TeleportStatus.FAIL_INCONCLUSIVE,
        target_fid,
        sender_fid,
        Transcript(tuple(events)),
        state,
    )


# ---------------------------------------------------------------------------
# The density-matrix critique of the POVM scheme

def sender_bell_ensemble(
    zeta: InputState, params: ChannelParams
) -> tuple[DensityMatrix, float, float]:
    """Outcome-averaged state of the sender's pair after her Bell measurement.

    Returns the Bell-basis density matrix of the ensemble together with
    the closed-form branch weights (weight_phi for each of phi+/phi-,
    weight_psi for each of psi+/psi-). The ensemble matrix is built from
    the simulated outcome distribution, so the diagonal is the simulated
    value and the closed forms are the independent oracle.

    Before the measurement the reduced state generally retains Bell-basis
    coherences; the diagonal form describes the measured ensemble, whose
    weights carry no information about the input phase, only |a|^2, |b|^2.
    """
    state = tensor_product(zeta.as_state("A"), make_cluster_channel(params))
    outcomes = bell_measure(state, "A", "Q1")
    probs = np.array([out.probability for out in outcomes])
    ensemble = DensityMatrix(np.diag(probs.astype(np.complex128)), ("A", "Q1"), "bell")
    a2, b2 = abs(zeta.a) ** 2, abs(zeta.b) ** 2
    al2, be2 = abs(params.alpha) ** 2, abs(params.beta) ** 2
    ga2, et2 = abs(params.gamma) ** 2, abs(params.eta) ** 2
    weight_phi = (a2 * al2 + a2 * ga2 + b2 * be2 + b2 * et2) / 2.0
    weight_psi = (b2 * al2 + b2 * ga2 + a2 * be2 + a2 * et2) / 2.0
    return ensemble, weight_phi, weight_psi
