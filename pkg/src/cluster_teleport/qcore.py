"""Dense state-vector engine for small systems of labeled qubits.

States carry an explicit qubit-label order; ``labels[0]`` is the most
significant bit of the amplitude index, so kets read left to right in
label order. Everything is an immutable value: operations return new
states. Branch weight never lives inside amplitudes; every measurement
enumeration returns the complete outcome distribution with renormalized
post-states, and sampling is a separate, explicitly seeded step (the
sample_* variants draw one branch without materializing the others).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np

# Fixed tolerances: deterministic linear algebra at 1e-12, accumulated
# operator sums at 1e-10. These are contract values, not knobs.
NORM_ATOL = 1e-12
UNITARY_ATOL = 1e-12
PSD_ATOL = 1e-12
COMPLETENESS_ATOL = 1e-10

_SQRT_HALF = 1.0 / np.sqrt(2.0)


def _complex_array(values, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if shape is not None:
        arr = arr.reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite amplitude (NaN or Inf)")
    return arr


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over an ordered tuple of qubit labels."""

    labels: tuple[str, ...]
    amps: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels in {labels}")
        amps = _complex_array(self.amps).reshape(-1)
        if amps.size != 2 ** len(labels):
            raise ValueError(
                f"expected {2 ** len(labels)} amplitudes for {len(labels)} "
                f"qubits, got {amps.size}"
            )
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ValueError(f"state not normalized: sum |amp|^2 = {norm_sq!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amps", amps)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.amps.size

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(
                f"unknown qubit label {label!r}; state has {self.labels}"
            ) from None

    def amplitude(self, bits: str) -> complex:
        """Amplitude of the basis ket written in label order, e.g. '0110'."""
        if len(bits) != self.n_qubits:
            raise ValueError(f"expected {self.n_qubits} bits, got {bits!r}")
        return complex(self.amps[int(bits, 2)])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


def _trusted_state(labels: tuple[str, ...], amps: np.ndarray) -> PureState:
    # Construction shortcut for amplitudes that are normalized by
    # construction (unitary images, renormalized branches). Invariants
    # still hold; only their re-validation is skipped.
    amps = np.ascontiguousarray(amps.reshape(-1))
    amps.setflags(write=False)
    state = object.__new__(PureState)
    object.__setattr__(state, "labels", labels)
    object.__setattr__(state, "amps", amps)
    return state


def normalized(labels: Sequence[str], amps) -> PureState:
    """Build a PureState from an unnormalized amplitude vector."""
    arr = _complex_array(amps).reshape(-1)
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return PureState(tuple(labels), arr / norm)


def qubit(label: str, a: complex, b: complex) -> PureState:
    """Single-qubit state a|0> + b|1>."""
    return PureState((label,), np.array([a, b], dtype=np.complex128))


def basis_state(labels: Sequence[str], bits: str) -> PureState:
    labels = tuple(labels)
    if len(bits) != len(labels):
        raise ValueError(f"expected {len(labels)} bits, got {bits!r}")
    amps = np.zeros(2 ** len(labels), dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return PureState(labels, amps)


def tensor_product(s1: PureState, s2: PureState) -> PureState:
    """Combined state with s1's labels as the most significant bits."""
    overlap = set(s1.labels) & set(s2.labels)
    if overlap:
        raise ValueError(f"duplicate labels in tensor product: {sorted(overlap)}")
    return _trusted_state(s1.labels + s2.labels, np.kron(s1.amps, s2.amps))


def reorder(state: PureState, new_labels: Sequence[str]) -> PureState:
    """Same state with its qubit axes permuted into new_labels order."""
    new_labels = tuple(new_labels)
    if set(new_labels) != set(state.labels) or len(new_labels) != state.n_qubits:
        raise ValueError(f"{new_labels} is not a permutation of {state.labels}")
    perm = [state.axis(l) for l in new_labels]
    psi = state.amps.reshape([2] * state.n_qubits).transpose(perm)
    return _trusted_state(new_labels, psi.reshape(-1))


# ---------------------------------------------------------------------------
# Gates

@dataclass(frozen=True, eq=False)
class GateMatrix:
    """Unitary matrix acting on k qubits; validated at construction."""

    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        mat = _complex_array(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"gate {self.name!r}: matrix must be square")
        dim = mat.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise ValueError(f"gate {self.name!r}: dimension {dim} is not a power of 2")
        dev = np.max(np.abs(mat.conj().T @ mat - np.eye(dim)))
        if dev > UNITARY_ATOL:
            raise ValueError(
                f"gate {self.name!r} not unitary: max |U^dag U - I| = {dev:.3e} "
                f"exceeds {UNITARY_ATOL}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def arity(self) -> int:
        return int(self.matrix.shape[0]).bit_length() - 1


PAULI_X = GateMatrix(np.array([[0, 1], [1, 0]]), "X")
PAULI_Z = GateMatrix(np.array([[1, 0], [0, -1]]), "Z")
PAULI_XZ = GateMatrix(PAULI_X.matrix @ PAULI_Z.matrix, "XZ")
IDENTITY = GateMatrix(np.eye(2), "I")
# Control is the first target label, target the second.
CNOT = GateMatrix(
    np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]), "CNOT"
)


def controlled(u: GateMatrix, name: str = "") -> GateMatrix:
    """Two-qubit gate applying u to the second qubit when the first is |1>."""
    if u.arity != 1:
        raise ValueError("controlled() expects a single-qubit gate")
    mat = np.eye(4, dtype=np.complex128)
    mat[2:, 2:] = u.matrix
    return GateMatrix(mat, name or f"C-{u.name}")


def _front_permutation(n: int, axes: Sequence[int]) -> tuple[list[int], list[int]]:
    """Permutation bringing axes to the front, and its inverse."""
    perm = list(axes) + [i for i in range(n) if i not in axes]
    inverse = [0] * n
    for position, axis in enumerate(perm):
        inverse[axis] = position
    return perm, inverse


def apply_gate(state: PureState, gate: GateMatrix, targets: Sequence[str]) -> PureState:
    """Apply gate to the listed qubits, first listed label = gate's MSB."""
    targets = list(targets)
    k = gate.arity
    if len(targets) != k:
        raise ValueError(
            f"gate {gate.name!r} acts on {k} qubits, got {len(targets)} targets"
        )
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated target labels: {targets}")
    axes = [state.axis(t) for t in targets]
    n = state.n_qubits
    perm, inverse = _front_permutation(n, axes)
    psi = state.amps.reshape([2] * n).transpose(perm).reshape(2 ** k, -1)
    psi = gate.matrix @ psi
    psi = psi.reshape([2] * n).transpose(inverse)
    return _trusted_state(state.labels, psi)


# ---------------------------------------------------------------------------
# Measurement

@dataclass(frozen=True)
class MeasurementOutcome:
    """One branch of a complete measurement: label, weight, collapsed state.

    post_state is None only for zero-probability branches, where no
    renormalized state exists.
    """

    label: str
    probability: float
    post_state: Union[PureState, None]


class BellOutcome(Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


# Bell vectors over two qubits, first qubit = MSB, in fixed enumeration order.
BELL_VECTORS: dict[BellOutcome, np.ndarray] = {
    BellOutcome.PHI_PLUS: np.array([1, 0, 0, 1]) * _SQRT_HALF,
    BellOutcome.PHI_MINUS: np.array([1, 0, 0, -1]) * _SQRT_HALF,
    BellOutcome.PSI_PLUS: np.array([0, 1, 1, 0]) * _SQRT_HALF,
    BellOutcome.PSI_MINUS: np.array([0, 1, -1, 0]) * _SQRT_HALF,
}

# Change of basis: columns are the Bell vectors in enumeration order.
BELL_BASIS = np.column_stack(
    [BELL_VECTORS[o] for o in BellOutcome]
).astype(np.complex128)

_Z_VECTORS = [
    ("0", np.array([1.0, 0.0], dtype=np.complex128)),
    ("1", np.array([0.0, 1.0], dtype=np.complex128)),
]
_X_VECTORS = [
    ("+", np.array([1.0, 1.0], dtype=np.complex128) * _SQRT_HALF),
    ("-", np.array([1.0, -1.0], dtype=np.complex128) * _SQRT_HALF),
]
_BELL_LABELED = [(o.value, BELL_VECTORS[o].astype(np.complex128)) for o in BellOutcome]


def _projection_branches(state: PureState, axes: list[int], vectors):
    """Per-outcome (label, vector, residual, probability) for a projective family."""
    n = state.n_qubits
    k = len(axes)
    perm, inverse = _front_permutation(n, axes)
    psi = state.amps.reshape([2] * n).transpose(perm).reshape(2 ** k, -1)
    branches = []
    for label, vec in vectors:
        rest = vec.conj() @ psi
        prob = float(np.vdot(rest, rest).real)
        branches.append((label, vec, rest, prob))
    return branches, inverse


def _collapsed_state(state, vec, rest, prob, inverse):
    n = state.n_qubits
    collapsed = np.multiply.outer(vec, rest / np.sqrt(prob))
    collapsed = collapsed.reshape([2] * n).transpose(inverse)
    return _trusted_state(state.labels, collapsed)


def _project_onto(state: PureState, axes: list[int], vectors) -> list[MeasurementOutcome]:
    """Complete projective measurement onto the given orthonormal vectors.

    The measured qubits are retained, collapsed onto the outcome vector.
    """
    branches, inverse = _projection_branches(state, axes, vectors)
    outcomes = []
    total = 0.0
    for label, vec, rest, prob in branches:
        total += prob
        if prob <= 1e-15:
            outcomes.append(MeasurementOutcome(label, max(prob, 0.0), None))
        else:
            post = _collapsed_state(state, vec, rest, prob, inverse)
            outcomes.append(MeasurementOutcome(label, prob, post))
    if abs(total - 1.0) > COMPLETENESS_ATOL:
        raise AssertionError(f"measurement probabilities sum to {total!r}")
    return outcomes


def _sample_projection(
    state: PureState, axes: list[int], vectors, rng: np.random.Generator
) -> MeasurementOutcome:
    """Inverse-CDF draw over the projective family in enumeration order.

    Distribution-identical to enumerating with _project_onto and then
    sampling, but only the selected branch's post-state is built.
    """
    branches, inverse = _projection_branches(state, axes, vectors)
    r = rng.random()
    acc = 0.0
    chosen = None
    for label, vec, rest, prob in branches:
        acc += prob
        if prob > 1e-15:
            chosen = (label, vec, rest, prob)
            if r < acc:
                break
    if chosen is None:
        raise ValueError("all outcomes have zero probability")
    label, vec, rest, prob = chosen
    return MeasurementOutcome(
        label, prob, _collapsed_state(state, vec, rest, prob, inverse)
    )


def _basis_vectors(basis: str):
    basis = basis.lower()
    if basis == "z":
        return _Z_VECTORS
    if basis == "x":
        return _X_VECTORS
    raise ValueError(f"unknown measurement basis {basis!r}")


def measure_projective(
    state: PureState, target: str, basis: str = "z"
) -> list[MeasurementOutcome]:
    """Single-qubit Z or X measurement; outcomes in fixed order (0/+ first)."""
    return _project_onto(state, [state.axis(target)], _basis_vectors(basis))


def sample_projective(
    state: PureState, target: str, basis: str, rng: np.random.Generator
) -> MeasurementOutcome:
    """Sampling counterpart of measure_projective (one rng draw)."""
    return _sample_projection(state, [state.axis(target)], _basis_vectors(basis), rng)


def _bell_axes(state: PureState, q1: str, q2: str) -> list[int]:
    if q1 == q2:
        raise ValueError(f"Bell measurement needs two distinct qubits, got {q1!r} twice")
    return [state.axis(q1), state.axis(q2)]


def bell_measure(state: PureState, q1: str, q2: str) -> list[MeasurementOutcome]:
    """Two-qubit Bell measurement; outcomes ordered phi+, phi-, psi+, psi-.

    Bell states are phi+/- = (|00> +/- |11>)/sqrt(2) and
    psi+/- = (|01> +/- |10>)/sqrt(2) with q1 the first ket slot.
    """
    return _project_onto(state, _bell_axes(state, q1, q2), _BELL_LABELED)


def sample_bell(
    state: PureState, q1: str, q2: str, rng: np.random.Generator
) -> MeasurementOutcome:
    """Sampling counterpart of bell_measure (one rng draw)."""
    return _sample_projection(state, _bell_axes(state, q1, q2), _BELL_LABELED, rng)


@dataclass(frozen=True, eq=False)
class PovmElement:
    """2x2 Hermitian, positive semidefinite operator."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _complex_array(self.matrix)
        if mat.shape != (2, 2):
            raise ValueError("POVM element must be a 2x2 matrix")
        herm_dev = np.max(np.abs(mat - mat.conj().T))
        if herm_dev > NORM_ATOL:
            raise ValueError(
                f"POVM element not Hermitian: max |M - M^dag| = {herm_dev:.3e}"
            )
        lam = float(np.linalg.eigvalsh(mat)[0])
        if lam < -PSD_ATOL:
            raise ValueError(
                f"POVM element not positive semidefinite: eigenvalue {lam:.6e}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def sqrt(self) -> np.ndarray:
        """Canonical PSD square root (the Kraus operator of this outcome)."""
        w, vecs = np.linalg.eigh(self.matrix)
        w = np.clip(w, 0.0, None)
        return (vecs * np.sqrt(w)) @ vecs.conj().T


def _validate_povm_completeness(elements: Sequence[PovmElement]) -> None:
    if not elements:
        raise ValueError("empty POVM element set")
    total = sum(e.matrix for e in elements)
    dev = float(np.max(np.abs(total - np.eye(2))))
    if dev > COMPLETENESS_ATOL:
        raise ValueError(
            f"POVM elements incomplete: max |sum - I| = {dev:.3e} exceeds "
            f"{COMPLETENESS_ATOL}"
        )


def _povm_branches(state: PureState, target: str, elements: Sequence[PovmElement]):
    axis = state.axis(target)
    n = state.n_qubits
    perm, inverse = _front_permutation(n, [axis])
    psi = state.amps.reshape([2] * n).transpose(perm).reshape(2, -1)
    branches = []
    for k, element in enumerate(elements):
        filtered = element.sqrt() @ psi
        prob = float(np.vdot(filtered, filtered).real)
        branches.append((str(k), filtered, prob))
    return branches, inverse


def _povm_post(state, filtered, prob, inverse):
    n = state.n_qubits
    post = (filtered / np.sqrt(prob)).reshape([2] * n).transpose(inverse)
    return _trusted_state(state.labels, post)


def povm_measure(
    state: PureState, target: str, elements: Sequence[PovmElement]
) -> list[MeasurementOutcome]:
    """Generalized measurement on one qubit.

    Outcome k has probability <s|E_k|s>; its post-state applies the
    canonical square-root Kraus operator E_k^(1/2) and renormalizes.
    Rejecting an incomplete element set is mandatory.
    """
    _validate_povm_completeness(elements)
    branches, inverse = _povm_branches(state, target, elements)
    outcomes = []
    for label, filtered, prob in branches:
        if prob <= 1e-15:
            outcomes.append(MeasurementOutcome(label, max(prob, 0.0), None))
        else:
            outcomes.append(
                MeasurementOutcome(label, prob, _povm_post(state, filtered, prob, inverse))
            )
    return outcomes


def sample_povm(
    state: PureState,
    target: str,
    elements: Sequence[PovmElement],
    rng: np.random.Generator,
) -> MeasurementOutcome:
    """Sampling counterpart of povm_measure (one rng draw)."""
    _validate_povm_completeness(elements)
    branches, inverse = _povm_branches(state, target, elements)
    r = rng.random()
    acc = 0.0
    chosen = None
    for label, filtered, prob in branches:
        acc += prob
        if prob > 1e-15:
            chosen = (label, filtered, prob)
            if r < acc:
                break
    if chosen is None:
        raise ValueError("all outcomes have zero probability")
    label, filtered, prob = chosen
    return MeasurementOutcome(label, prob, _povm_post(state, filtered, prob, inverse))


def sample_outcome(
    outcomes: Sequence[MeasurementOutcome], rng: np.random.Generator
) -> MeasurementOutcome:
    """Inverse-CDF draw over enumerated outcomes in their fixed order."""
    r = rng.random()
    acc = 0.0
    chosen = None
    for out in outcomes:
        acc += out.probability
        if out.post_state is not None:
            chosen = out
            if r < acc:
                break
    if chosen is None:
        raise ValueError("all outcomes have zero probability")
    return chosen


# ---------------------------------------------------------------------------
# Density matrices, partial trace, fidelity

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, PSD matrix over labeled qubits.

    basis is "computational" or, for two qubits, "bell" (entry (i, j) is
    <B_i| rho |B_j> in the fixed Bell enumeration order).
    """

    matrix: np.ndarray
    labels: tuple[str, ...]
    basis: str = "computational"

    def __post_init__(self):
        mat = _complex_array(self.matrix)
        labels = tuple(self.labels)
        dim = 2 ** len(labels)
        if mat.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix for {len(labels)} qubits")
        if self.basis not in ("computational", "bell"):
            raise ValueError(f"unknown basis tag {self.basis!r}")
        if self.basis == "bell" and len(labels) != 2:
            raise ValueError("bell basis is only defined for two-qubit matrices")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise ValueError("density matrix not Hermitian")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        lam = float(np.linalg.eigvalsh(mat)[0])
        if lam < -1e-10:
            raise ValueError(f"density matrix not PSD: eigenvalue {lam:.6e}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "labels", labels)


def reduced_density_matrix(
    state: PureState, keep: Sequence[str], basis: str = "computational"
) -> DensityMatrix:
    """Partial trace over everything but keep, indexed in keep order."""
    keep = list(keep)
    if not keep:
        raise ValueError("keep set must be nonempty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"repeated labels in keep set: {keep}")
    axes = [state.axis(l) for l in keep]
    k = len(keep)
    perm, _ = _front_permutation(state.n_qubits, axes)
    psi = state.amps.reshape([2] * state.n_qubits).transpose(perm).reshape(2 ** k, -1)
    rho = psi @ psi.conj().T
    if basis == "bell":
        if k != 2:
            raise ValueError("bell basis requires exactly two kept qubits")
        rho = BELL_BASIS.conj().T @ rho @ BELL_BASIS
    return DensityMatrix(rho, tuple(keep), basis)


def partial_trace(dm: DensityMatrix, keep: Sequence[str]) -> DensityMatrix:
    """Trace a computational-basis density matrix down to keep."""
    if dm.basis != "computational":
        raise ValueError("partial_trace expects a computational-basis matrix")
    keep = list(keep)
    if not keep or not set(keep) <= set(dm.labels):
        raise ValueError(f"keep set {keep} not contained in {dm.labels}")
    n = len(dm.labels)
    positions = [dm.labels.index(l) for l in keep]
    order = positions + [p for p in range(n) if p not in positions]
    perm = order + [n + p for p in order]
    rho = dm.matrix.reshape([2] * (2 * n)).transpose(perm)
    k = len(keep)
    rho = rho.reshape(2 ** k, 2 ** (n - k), 2 ** k, 2 ** (n - k))
    reduced = np.einsum("ibjb->ij", rho)
    return DensityMatrix(reduced, tuple(keep), "computational")


def fidelity(state, reference: PureState) -> float:
    """|<ref|s>|^2 for pure states, <ref|rho|ref> for density matrices.

    Global phase is ignored by construction. Labels are aligned by name.
    """
    if isinstance(state, PureState):
        if set(state.labels) != set(reference.labels):
            raise ValueError(
                f"dimension mismatch: state over {state.labels}, "
                f"reference over {reference.labels}"
            )
        ref = reorder(reference, state.labels)
        val = abs(np.vdot(ref.amps, state.amps)) ** 2
    elif isinstance(state, DensityMatrix):
        if state.basis != "computational":
            raise ValueError("fidelity expects a computational-basis density matrix")
        if set(state.labels) != set(reference.labels):
            raise ValueError(
                f"dimension mismatch: matrix over {state.labels}, "
                f"reference over {reference.labels}"
            )
        ref = reorder(reference, state.labels)
        val = float(np.real(ref.amps.conj() @ state.matrix @ ref.amps))
    else:
        raise TypeError(f"cannot compute fidelity of {type(state).__name__}")
    return float(min(max(val, 0.0), 1.0))


def qubit_fidelity(state: PureState, label: str, reference: PureState) -> float:
    """<ref|rho|ref> for one labeled qubit without building the matrix.

    Equivalent to fidelity(reduced_density_matrix(state, [label]), ref);
    the reference's own label is ignored.
    """
    if reference.n_qubits != 1:
        raise ValueError("reference must be a single-qubit state")
    axis = state.axis(label)
    perm, _ = _front_permutation(state.n_qubits, [axis])
    psi = state.amps.reshape([2] * state.n_qubits).transpose(perm).reshape(2, -1)
    overlap = reference.amps.conj() @ psi
    val = float(np.vdot(overlap, overlap).real)
    return float(min(max(val, 0.0), 1.0))


def same_up_to_phase(s1: PureState, s2: PureState, atol: float = 1e-10) -> bool:
    """Phase-quotient state equality: |<s1|s2>| = 1 within atol."""
    return abs(1.0 - fidelity(s1, s2)) <= atol


def extract_qubit_state(state: PureState, label: str, atol: float = 1e-9) -> PureState:
    """Pure state of one qubit, valid only when it is unentangled."""
    rho = reduced_density_matrix(state, [label]).matrix
    w, vecs = np.linalg.eigh(rho)
    if abs(w[-1] - 1.0) > atol:
        raise ValueError(
            f"qubit {label!r} is entangled with the rest (purity eigenvalue {w[-1]!r})"
        )
    return PureState((label,), vecs[:, -1])
