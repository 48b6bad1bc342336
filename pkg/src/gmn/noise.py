"""Imperfect GHZ sources and lossy detectors.

The source is modeled as a GHZ state whose |HHH><VVV| coherence is scaled by a
visibility ``v``, optionally mixed with white noise. Under that model every
variation is won with probability ``(1 + v)(1 - p)/2 + p/2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .protocol import enumerate_valid_variations, win_probability
from .qsim import ATOL, DensityOperator

NoisyState = DensityOperator


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class NoiseModel:
    visibility: float = 1.0
    white_noise: float = 0.0
    detector_efficiency: tuple[float, float, float] = field(default=(1.0, 1.0, 1.0))

    def __post_init__(self):
        object.__setattr__(self, "visibility", _check_unit("visibility", self.visibility))
        object.__setattr__(self, "white_noise", _check_unit("white_noise", self.white_noise))
        eff = tuple(float(e) for e in self.detector_efficiency)
        if len(eff) != 3:
            raise DomainError("detector_efficiency needs one value per party")
        if any(not 0.0 < e <= 1.0 for e in eff):
            raise DomainError(f"detector efficiencies must lie in (0, 1], got {eff!r}")
        object.__setattr__(self, "detector_efficiency", eff)

    @property
    def valid_round_probability(self) -> float:
        return float(np.prod(self.detector_efficiency))


def apply_ghz_dephasing(visibility: float) -> NoisyState:
    """GHZ state with its off-diagonal coherence scaled by ``visibility``."""
    v = _check_unit("visibility", visibility)
    rho = np.zeros((8, 8), dtype=complex)
    rho[0, 0] = rho[7, 7] = 0.5
    rho[0, 7] = rho[7, 0] = v / 2
    return DensityOperator(rho)


def apply_white_noise(state: NoisyState, p: float) -> NoisyState:
    """Replace a fraction ``p`` of the state by the maximally mixed state."""
    p = _check_unit("white noise fraction", p)
    dim = state.matrix.shape[0]
    return DensityOperator((1 - p) * state.matrix + p * np.eye(dim) / dim)


def prepare_noisy_ghz(model: NoiseModel) -> NoisyState:
    return apply_white_noise(apply_ghz_dephasing(model.visibility), model.white_noise)


def closed_form_win(visibility: float, white_noise: float = 0.0) -> float:
    return (1 + visibility) * (1 - white_noise) / 2 + white_noise / 2


def per_variation_win_probabilities(model: NoiseModel) -> np.ndarray:
    """Win probability of each of the 32 variations, by density-operator arithmetic."""
    rho = prepare_noisy_ghz(model)
    return np.array([win_probability(v, rho) for v in enumerate_valid_variations()])


def win_probability_exact(model: NoiseModel) -> float:
    """Common per-variation win probability; detector efficiency does not enter."""
    probs = per_variation_win_probabilities(model)
    spread = float(probs.max() - probs.min())
    if spread > ATOL:
        raise RuntimeError(f"win probability varies across variations by {spread:g}")
    return float(probs.mean())


def calibrate_visibility(target_win: float) -> float:
    """Visibility whose noiseless-detector win probability equals ``target_win``."""
    target_win = float(target_win)
    if not 0.5 <= target_win <= 1.0:
        raise DomainError(f"target win probability must lie in [0.5, 1], got {target_win!r}")
    return 2 * target_win - 1


def detection_events(model: NoiseModel, rng: np.random.Generator) -> tuple[bool, bool, bool]:
    """Independent detector clicks for Alice, Bob and Charlie."""
    u = rng.random(3)
    return tuple(bool(x) for x in u < np.asarray(model.detector_efficiency))


def detection_block(model: NoiseModel, rng: np.random.Generator, size: int) -> np.ndarray:
    """Boolean mask of valid rounds (all three detectors fire) for ``size`` rounds.

    Consumes the stream exactly like ``size`` successive calls to
    :func:`detection_events`.
    """
    u = rng.random((size, 3))
    return np.all(u < np.asarray(model.detector_efficiency), axis=1)
