"""Small dense quantum-state engine for polarization qubits.

States hold at most four qubits. Index bit ``k`` of an amplitude, counted from
the most significant end, is the polarization of qubit ``k`` (0 = H, 1 = V), so
``|HV>`` on two qubits sits at index ``0b01``. Every object here is immutable.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import PostselectionError, SizeError

MAX_QUBITS = 4
ATOL = 1e-12
EIG_ATOL = 1e-10
ZERO_NORM = 1e-14

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def _num_qubits_for(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise SizeError(f"dimension {dim} is not a power of two >= 2")
    if n > MAX_QUBITS:
        raise SizeError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
    return n


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector on 1 to 4 qubits.

    Use :meth:`from_amplitudes` to build a state from unnormalized input.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        _num_qubits_for(amps.size)
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state is not normalized (squared norm {norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if norm < ZERO_NORM:
            raise ValueError("cannot normalize an all-zero state")
        return cls(amps / norm)

    @classmethod
    def basis(cls, label: str) -> "PureState":
        """Product state from a label over ``H``, ``V``, ``+`` and ``-``, e.g. ``"HH+"``."""
        singles = {
            "H": np.array([1, 0], dtype=complex),
            "V": np.array([0, 1], dtype=complex),
            "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
            "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
        }
        try:
            factors = [singles[ch] for ch in label]
        except KeyError as exc:
            raise ValueError(f"unknown basis label {exc.args[0]!r}") from None
        if not factors:
            raise SizeError("empty label")
        out = factors[0]
        for f in factors[1:]:
            out = np.kron(out, f)
        return cls.from_amplitudes(out)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def to_density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self):
        return f"PureState(num_qubits={self.num_qubits}, amplitudes={np.round(self.amplitudes, 6)!r})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite matrix on 1 to 4 qubits."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SizeError(f"density matrix must be square, got shape {m.shape}")
        _num_qubits_for(m.shape[0])
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix entries must be finite")
        if np.max(np.abs(m - m.conj().T)) > ATOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > ATOL:
            raise ValueError(f"density matrix trace is {np.trace(m).real!r}, expected 1")
        if np.min(np.linalg.eigvalsh(m)) < -EIG_ATOL:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def num_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1


@dataclass(frozen=True, eq=False)
class Unitary2:
    """Single-qubit unitary (a Jones matrix of a lossless optical element)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise SizeError(f"expected a 2x2 matrix, got shape {m.shape}")
        if np.max(np.abs(m.conj().T @ m - np.eye(2))) > ATOL:
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "matrix", _frozen(m))

    def __matmul__(self, other: "Unitary2") -> "Unitary2":
        return Unitary2(self.matrix @ other.matrix)


IDENTITY = Unitary2(np.eye(2))


class Basis(enum.Enum):
    COMPUTATIONAL = "HV"
    DIAGONAL = "+-"


def diagonal_basis(num_qubits: int) -> tuple[Basis, ...]:
    return (Basis.DIAGONAL,) * num_qubits


def computational_basis(num_qubits: int) -> tuple[Basis, ...]:
    return (Basis.COMPUTATIONAL,) * num_qubits


State = Union[PureState, DensityOperator]


def _check_qubit(num_qubits: int, qubit: int) -> None:
    if not 0 <= qubit < num_qubits:
        raise IndexError(f"qubit {qubit} out of range for a {num_qubits}-qubit state")


def _apply_1q(tensor: np.ndarray, gate: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(gate, tensor, axes=([1], [axis])), 0, axis)


def tensor(a: PureState, b: PureState) -> PureState:
    """Kronecker product; ``a`` occupies the more significant qubits."""
    if a.num_qubits + b.num_qubits > MAX_QUBITS:
        raise SizeError(
            f"{a.num_qubits} + {b.num_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
        )
    return PureState.from_amplitudes(np.kron(a.amplitudes, b.amplitudes))


def apply_single_qubit(state: State, gate: Unitary2, qubit: int) -> State:
    """Apply ``gate`` to one tensor factor of a pure state or density operator."""
    n = state.num_qubits
    _check_qubit(n, qubit)
    u = gate.matrix
    if isinstance(state, PureState):
        psi = state.amplitudes.reshape((2,) * n)
        return PureState(_apply_1q(psi, u, qubit).reshape(-1))
    rho = state.matrix.reshape((2,) * (2 * n))
    rho = _apply_1q(rho, u, qubit)
    rho = _apply_1q(rho, u.conj(), n + qubit)
    return DensityOperator(rho.reshape(2**n, 2**n))


def apply_product(state: State, gates: Sequence[Unitary2]) -> State:
    """Apply ``gates[k]`` to qubit ``k`` for every ``k``."""
    if len(gates) != state.num_qubits:
        raise SizeError(f"need {state.num_qubits} gates, got {len(gates)}")
    for k, g in enumerate(gates):
        state = apply_single_qubit(state, g, k)
    return state


def _pattern_mask(num_qubits: int, qubits: Sequence[int], kept: Iterable) -> np.ndarray:
    kept_patterns = set()
    for pattern in kept:
        if isinstance(pattern, str):
            bits = tuple({"H": 0, "V": 1, "0": 0, "1": 1}[ch] for ch in pattern)
        else:
            bits = tuple(int(b) for b in pattern)
        if len(bits) != len(qubits):
            raise ValueError(f"pattern {pattern!r} does not match {len(qubits)} qubits")
        kept_patterns.add(bits)
    if not kept_patterns:
        raise ValueError("kept_outcomes must be nonempty")
    idx = np.arange(2**num_qubits)
    sub = np.stack([(idx >> (num_qubits - 1 - q)) & 1 for q in qubits], axis=1)
    return np.array([tuple(row) in kept_patterns for row in sub], dtype=bool)


def postselect(state: PureState, qubits: Sequence[int], kept_outcomes: Iterable) -> tuple[PureState, float]:
    """Project ``qubits`` onto the computational patterns in ``kept_outcomes``.

    Patterns are bit tuples or strings over ``H``/``V`` (or ``0``/``1``), one
    entry per listed qubit. The postselected qubits stay in the state.
    Returns the renormalized state and the success probability.
    """
    n = state.num_qubits
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError("postselected qubits must be distinct")
    for q in qubits:
        _check_qubit(n, q)
    mask = _pattern_mask(n, qubits, kept_outcomes)
    out = np.where(mask, state.amplitudes, 0)
    prob = float(np.vdot(out, out).real)
    if prob < ZERO_NORM:
        raise PostselectionError("no amplitude survives the postselection")
    return PureState(out / np.sqrt(prob)), prob


def project_diagonal(state: PureState, qubit: int, sign: str) -> tuple[PureState, float]:
    """Project one qubit onto ``|+>`` or ``|->`` and drop it from the register."""
    n = state.num_qubits
    _check_qubit(n, qubit)
    if n == 1:
        raise SizeError("cannot remove the only qubit of a state")
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    bra = np.array([1, 1 if sign == "+" else -1], dtype=complex) / np.sqrt(2)
    psi = state.amplitudes.reshape((2,) * n)
    out = np.tensordot(bra.conj(), psi, axes=([0], [qubit])).reshape(-1)
    prob = float(np.vdot(out, out).real)
    if prob < ZERO_NORM:
        raise PostselectionError(f"qubit {qubit} has no overlap with |{sign}>")
    return PureState(out / np.sqrt(prob)), prob


def _to_measurement_frame(state: State, basis: Sequence[Basis]) -> State:
    if len(basis) != state.num_qubits:
        raise SizeError(f"basis has {len(basis)} tags for {state.num_qubits} qubits")
    h = Unitary2(HADAMARD)
    for k, tag in enumerate(basis):
        if Basis(tag) is Basis.DIAGONAL:
            state = apply_single_qubit(state, h, k)
    return state


def outcome_distribution(state: State, basis: Sequence[Basis]) -> np.ndarray:
    """Born-rule probabilities over ``2**n`` outcomes.

    Bit ``k`` of the outcome index (most significant first) is qubit ``k``'s
    result: 0 for H or +, 1 for V or -.
    """
    rotated = _to_measurement_frame(state, basis)
    if isinstance(rotated, PureState):
        probs = np.abs(rotated.amplitudes) ** 2
    else:
        probs = np.diagonal(rotated.matrix).real.copy()
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_indices(probs: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF lookup of outcome indices, scanning outcomes in ascending order."""
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, uniforms, side="right")


def index_to_bits(index: int, num_qubits: int) -> tuple[int, ...]:
    return tuple((int(index) >> (num_qubits - 1 - k)) & 1 for k in range(num_qubits))


def sample_outcome(state: State, basis: Sequence[Basis], rng: np.random.Generator) -> tuple[int, ...]:
    """Draw one measurement outcome as a bit tuple, consuming a single uniform."""
    probs = outcome_distribution(state, basis)
    idx = sample_indices(probs, np.array([rng.random()]))[0]
    return index_to_bits(idx, state.num_qubits)


def inner_product(a: PureState, b: PureState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.num_qubits != b.num_qubits:
        raise SizeError(f"size mismatch: {a.num_qubits} vs {b.num_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: PureState, b: PureState) -> float:
    return abs(inner_product(a, b)) ** 2


def equal_up_to_global_phase(a: PureState, b: PureState, atol: float = ATOL) -> bool:
    """True if ``a = c*b`` for some unit-modulus ``c``.

    ``c`` is read off the largest-magnitude amplitude of ``b``.
    """
    if a.num_qubits != b.num_qubits:
        return False
    k = int(np.argmax(np.abs(b.amplitudes)))
    ratio = a.amplitudes[k] / b.amplitudes[k]
    if ratio == 0:
        return False
    c = ratio / abs(ratio)
    return float(np.linalg.norm(a.amplitudes - c * b.amplitudes)) < atol
