"""Small statevector simulator for the Ry/CZ two-local ansatz.

Amplitude ordering: qubit ``k`` is axis ``k`` of the ``(2,)*n`` tensor view,
so qubit 0 is the most significant bit of the basis index and the leftmost
character of a printed bitstring.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SimulationError, ValidationError
from .hamiltonian import format_bitstring, index_to_bits

MAX_QUBITS = 24


@dataclass
class Statevector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValidationError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    @classmethod
    def zero(cls, n_qubits: int, dtype=np.complex128) -> Statevector:
        _check_size(n_qubits)
        amps = np.zeros(1 << n_qubits, dtype=dtype)
        amps[0] = 1.0
        return cls(amps, n_qubits)

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> Statevector:
        return Statevector(self.amplitudes.copy(), self.n_qubits)


def _check_size(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise SimulationError(f"simulator supports 1..{MAX_QUBITS} qubits, got {n_qubits}")


def _check_qubit(state: Statevector, q: int) -> None:
    if not 0 <= q < state.n_qubits:
        raise ValidationError(f"qubit {q} out of range for {state.n_qubits} qubits")


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def _ry_inplace(amps: np.ndarray, n: int, qubit: int, angle: float) -> None:
    view = amps.reshape(1 << qubit, 2, 1 << (n - qubit - 1))
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = c * a0 - s * a1
    view[:, 1, :] = s * a0 + c * a1


def apply_ry(state: Statevector, qubit: int, angle: float) -> Statevector:
    _check_qubit(state, qubit)
    out = state.copy()
    _ry_inplace(out.amplitudes, out.n_qubits, qubit, angle)
    return out


def apply_cz(state: Statevector, q1: int, q2: int) -> Statevector:
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise ValidationError("CZ needs two distinct qubits")
    out = state.copy()
    idx = [slice(None)] * out.n_qubits
    idx[q1] = idx[q2] = 1
    out.amplitudes.reshape((2,) * out.n_qubits)[tuple(idx)] *= -1
    return out


@lru_cache(maxsize=8)
def _cz_chain_signs(n_qubits: int) -> np.ndarray:
    bits = index_to_bits(np.arange(1 << n_qubits), n_qubits).astype(np.int64)
    parity = (bits[:, :-1] & bits[:, 1:]).sum(axis=1) & 1
    signs = 1.0 - 2.0 * parity
    signs.flags.writeable = False
    return signs


def n_parameters(n_qubits: int) -> int:
    return 2 * n_qubits


def two_local_state(params, n_qubits: int) -> Statevector:
    """Ry layer, linear CZ chain (0,1),(1,2),..., second Ry layer, from |0...0>.

    The gate set is real, so amplitudes are returned as float64.
    """
    _check_size(n_qubits)
    theta = np.asarray(params, dtype=float)
    if theta.shape != (2 * n_qubits,):
        raise ValidationError(f"two-local ansatz on {n_qubits} qubits needs {2 * n_qubits} "
                              f"parameters, got {theta.size}")
    # first layer acting on |0...0> is a product state
    half = theta / 2
    cos, sin = np.cos(half), np.sin(half)
    amps = np.ones(1)
    for q in range(n_qubits):
        amps = np.stack((amps * cos[q], amps * sin[q]), axis=-1).ravel()
    if n_qubits > 1:
        amps *= _cz_chain_signs(n_qubits)
    for q in range(n_qubits):
        k = n_qubits + q
        rot = np.array([[cos[k], -sin[k]], [sin[k], cos[k]]])
        amps = (rot @ amps.reshape(1 << q, 2, -1)).ravel()
    return Statevector(amps, n_qubits)


def exact_probabilities(state: Statevector) -> np.ndarray:
    """|amplitude|^2 indexed by basis index."""
    amps = state.amplitudes
    return amps.real ** 2 + amps.imag ** 2 if np.iscomplexobj(amps) else amps * amps


def probability_map(state: Statevector, cutoff: float = 0.0) -> dict[str, float]:
    probs = exact_probabilities(state)
    idx = np.flatnonzero(probs > cutoff)
    return {format_bitstring(b): float(probs[i])
            for i, b in zip(idx, index_to_bits(idx, state.n_qubits))}


def sample_counts(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Multinomial draw of ``shots`` outcomes; returns a count per basis index."""
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    cdf = np.cumsum(np.clip(probs, 0.0, None))
    # inverse-CDF draws; equivalent to a multinomial but cheaper for sparse shots
    picks = np.searchsorted(cdf, rng.random(shots) * cdf[-1], side="right")
    return np.bincount(np.minimum(picks, len(cdf) - 1), minlength=len(cdf))


def sample(state: Statevector, shots: int, rng_seed) -> dict[str, int]:
    """Measure ``shots`` times; ``rng_seed`` is an int seed or a numpy Generator."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    counts = sample_counts(exact_probabilities(state), shots, rng)
    idx = np.flatnonzero(counts)
    return {format_bitstring(b): int(counts[i])
            for i, b in zip(idx, index_to_bits(idx, state.n_qubits))}
