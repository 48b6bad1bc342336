"""The three-party parity game: inputs, rotations, GHZ preparation and one quantum round.

Apple counts are kept as integer half-units (0..3 for 0, 1/2, 1, 3/2 apples) so
enumeration and parity stay exact.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import qsim
from .qsim import PureState, Unitary2

# V-phase of rotation(h) is i**h, tabulated so the protocol phases are exact.
_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)


@dataclass(frozen=True, order=True)
class AppleCount:
    half_units: int

    def __post_init__(self):
        if self.half_units not in (0, 1, 2, 3):
            raise ValueError(f"half_units must be in 0..3, got {self.half_units!r}")

    @property
    def apples(self) -> Fraction:
        return Fraction(self.half_units, 2)

    def __str__(self):
        return str(self.apples)


@dataclass(frozen=True, order=True)
class AppleVariation:
    """Apples handed to Alice, Bob and Charlie; the total must be a whole number."""

    n_a: AppleCount
    n_b: AppleCount
    n_c: AppleCount

    def __post_init__(self):
        for name in ("n_a", "n_b", "n_c"):
            value = getattr(self, name)
            if not isinstance(value, AppleCount):
                object.__setattr__(self, name, AppleCount(int(value)))
        if sum(self.half_units) % 2:
            raise ValueError(f"total apples {self.total} is not an integer")

    @classmethod
    def from_apples(cls, a, b, c) -> "AppleVariation":
        """Build from apple numbers such as ``0.5`` or ``Fraction(3, 2)``."""
        def to_half(x):
            h = Fraction(x) * 2
            if h.denominator != 1:
                raise ValueError(f"{x!r} is not a multiple of 1/2")
            return int(h)
        return cls(to_half(a), to_half(b), to_half(c))

    @property
    def half_units(self) -> tuple[int, int, int]:
        return (self.n_a.half_units, self.n_b.half_units, self.n_c.half_units)

    @property
    def counts(self) -> tuple[AppleCount, AppleCount, AppleCount]:
        return (self.n_a, self.n_b, self.n_c)

    @property
    def total(self) -> Fraction:
        return Fraction(sum(self.half_units), 2)

    def __str__(self):
        return "(" + ", ".join(str(n) for n in self.counts) + ")"


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1

    @property
    def bit(self) -> int:
        return self.value

    @classmethod
    def from_bit(cls, bit: int) -> "Parity":
        return cls(bit & 1)

    def __str__(self):
        return self.name.lower()


@dataclass(frozen=True)
class AnswerBits:
    b_a: int
    b_b: int
    b_c: int

    def __post_init__(self):
        if any(b not in (0, 1) for b in (self.b_a, self.b_b, self.b_c)):
            raise ValueError("answer bits must be 0 or 1")

    @property
    def team_bit(self) -> int:
        return self.b_a ^ self.b_b ^ self.b_c


class PlateKind(enum.Enum):
    HWP = "HWP"
    QWP = "QWP"


@dataclass(frozen=True)
class Waveplate:
    kind: PlateKind
    angle: float = 0.0  # fast axis, radians from horizontal


WaveplateStack = tuple  # of Waveplate, in the order the photon meets them


@lru_cache(maxsize=None)
def enumerate_valid_variations() -> tuple[AppleVariation, ...]:
    """All 32 variations with a whole-number total, in lexicographic half-unit order."""
    return tuple(
        AppleVariation(*h)
        for h in itertools.product(range(4), repeat=3)
        if sum(h) % 2 == 0
    )


def variation_index(v: AppleVariation) -> int:
    return enumerate_valid_variations().index(v)


def parity(v: AppleVariation) -> Parity:
    return Parity.from_bit((sum(v.half_units) // 2) % 2)


def rotation(n: AppleCount) -> Unitary2:
    """Phase rotation diag(1, exp(i*pi*n)) for ``n`` apples."""
    return Unitary2(np.diag([1, _PHASES[n.half_units]]))


def _rotate(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def jones_matrix(kind: PlateKind, angle: float) -> Unitary2:
    """Jones matrix of an ideal wave plate with its fast axis at ``angle`` radians.

    HWP(t) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]];
    QWP(t) = rot(t) @ diag(1, i) @ rot(-t).
    """
    kind = PlateKind(kind)
    if kind is PlateKind.HWP:
        c, s = np.cos(2 * angle), np.sin(2 * angle)
        return Unitary2(np.array([[c, s], [s, -c]]))
    return Unitary2(_rotate(angle) @ np.diag([1, 1j]) @ _rotate(-angle))


def waveplate_stack(n: AppleCount) -> WaveplateStack:
    """Plates at 0 degrees realizing ``rotation(n)`` up to a global phase."""
    return {
        0: (),
        1: (Waveplate(PlateKind.QWP),),
        2: (Waveplate(PlateKind.HWP),),
        3: (Waveplate(PlateKind.HWP), Waveplate(PlateKind.QWP)),
    }[n.half_units]


def stack_matrix(stack: WaveplateStack) -> Unitary2:
    out = qsim.IDENTITY
    for plate in stack:
        out = jones_matrix(plate.kind, plate.angle) @ out
    return out


def unitaries_equal_up_to_phase(u: Unitary2, w: Unitary2, atol: float = qsim.ATOL) -> bool:
    a, b = u.matrix.reshape(-1), w.matrix.reshape(-1)
    k = int(np.argmax(np.abs(b)))
    c = a[k] / b[k]
    if abs(c) == 0:
        return False
    return float(np.linalg.norm(a - c / abs(c) * b)) < atol


def ghz() -> PureState:
    return PureState.from_amplitudes([1, 0, 0, 0, 0, 0, 0, 1])


def ghz_perp() -> PureState:
    return PureState.from_amplitudes([1, 0, 0, 0, 0, 0, 0, -1])


def prepare_ghz_direct() -> PureState:
    return ghz()


def bell_pair() -> PureState:
    """(|HH> + |VV>)/sqrt(2), the state of each down-converted pair."""
    return PureState.from_amplitudes([1, 0, 0, 1])


def prepare_ghz_via_pbs() -> tuple[PureState, float, float]:
    """Fuse two pairs at a polarizing beam splitter and herald on the fourth photon.

    Modes are ordered (1, 2, 3, 4) as qubits 0..3. The beam splitter fires both
    output detectors only when modes 2 and 4 carry equal polarizations; the
    fourth photon is then projected onto 45 degrees and discarded.

    Returns the three-photon state on modes (1, 2, 3) together with the parity
    check and trigger success probabilities.
    """
    pairs = qsim.tensor(bell_pair(), bell_pair())
    fused, p_pbs = qsim.postselect(pairs, (1, 3), ("HH", "VV"))
    three, p_trigger = qsim.project_diagonal(fused, 3, "+")
    return three, p_pbs, p_trigger


def ghz_transform_oracle(v: AppleVariation) -> PureState:
    """Closed-form result of rotating each GHZ photon by its party's apples."""
    return ghz() if parity(v) is Parity.EVEN else ghz_perp()


def rotate_for_variation(state: qsim.State, v: AppleVariation) -> qsim.State:
    return qsim.apply_product(state, [rotation(n) for n in v.counts])


def outcome_bits(index: int) -> AnswerBits:
    """Map a diagonal-basis outcome index to answer bits (+ -> 0, - -> 1)."""
    return AnswerBits(*qsim.index_to_bits(index, 3))


def round_distribution(v: AppleVariation, state: qsim.State) -> np.ndarray:
    """Probabilities of the eight diagonal-basis outcomes after the parties rotate."""
    if state.num_qubits != 3:
        raise ValueError(f"a round needs a 3-qubit state, got {state.num_qubits}")
    return qsim.outcome_distribution(rotate_for_variation(state, v), qsim.diagonal_basis(3))


# outcome indices whose answer bits XOR to 0 (even) and 1 (odd)
EVEN_OUTCOMES = tuple(i for i in range(8) if bin(i).count("1") % 2 == 0)
ODD_OUTCOMES = tuple(i for i in range(8) if bin(i).count("1") % 2 == 1)


def win_probability(v: AppleVariation, state: qsim.State) -> float:
    probs = round_distribution(v, state)
    good = EVEN_OUTCOMES if parity(v) is Parity.EVEN else ODD_OUTCOMES
    return float(probs[list(good)].sum())


def quantum_round(v: AppleVariation, state: qsim.State, rng: np.random.Generator) -> tuple[AnswerBits, Parity]:
    """Play one valid round: rotate, measure each photon in the +/- basis, XOR the bits."""
    probs = round_distribution(v, state)
    idx = int(qsim.sample_indices(probs, np.array([rng.random()]))[0])
    bits = outcome_bits(idx)
    return bits, Parity.from_bit(bits.team_bit)
