"""Dense state-vector simulator for small qubit registers.

Conventions used throughout the package:

- Qubit 0 is the most significant bit of the amplitude index, so for a
  register ``|q0 q1 ... q_{n-1}>`` the basis state with bits ``b_i`` sits at
  index ``sum(b_i << (n - 1 - i))``.
- All operations are pure: they accept a :class:`StateVector` and return a
  new one. Amplitude arrays are exposed read-only, which is what makes the
  "share states across threads, pass explicit rng handles" concurrency story
  safe.
- The rotation ``make_rotation(theta)`` acts as
  ``|0> -> cos(theta)|0> + sin(theta)|1>`` and
  ``|1> -> -sin(theta)|0> + cos(theta)|1>``, i.e. the matrix
  ``[[cos, -sin], [sin, cos]]``, which equals ``expm(-1j * sigma_y * theta)``.

Registers are capped at 16 qubits; this is a protocol-study tool, not a
general simulator.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np

STATE_TOL = 1e-10      # state-level assertions (norms, probabilities)
MATRIX_TOL = 1e-12     # 2x2 matrix identities (unitarity, recovery algebra)
ZERO_PROB_TOL = 1e-15  # below this a branch counts as impossible
MAX_QUBITS = 16

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


class ZeroProbabilityError(ValueError):
    """Raised when an operation would condition on a zero-probability outcome."""


def make_rotation(theta: float) -> np.ndarray:
    """Real rotation by ``theta`` about the y axis, equal to expm(-i*sigma_y*theta)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def is_unitary(u: np.ndarray, tol: float = MATRIX_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        return False
    return bool(np.max(np.abs(u @ u.conj().T - IDENTITY)) <= tol)


class StateVector:
    """Normalized pure state of ``num_qubits`` qubits.

    The amplitude array is complex128, has length ``2 ** num_qubits`` and is
    validated to have unit norm (within STATE_TOL) on construction.
    """

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes: Sequence[complex] | np.ndarray):
        amps = np.array(amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2 or amps.size & (amps.size - 1):
            raise ValueError("amplitudes must be a 1-d array of length 2**n, n >= 1")
        n = amps.size.bit_length() - 1
        if n > MAX_QUBITS:
            raise ValueError(f"register of {n} qubits exceeds the {MAX_QUBITS}-qubit cap")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > STATE_TOL:
            raise ValueError(f"state is not normalized: sum |a|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "num_qubits", n)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("StateVector is immutable")

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"

    @classmethod
    def qubit(cls, alpha: complex, beta: complex) -> "StateVector":
        """Single-qubit state alpha|0> + beta|1>."""
        return cls(np.array([alpha, beta], dtype=complex))

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        """Computational basis state |index> of the given register size."""
        if not 0 <= index < (1 << num_qubits):
            raise IndexError(f"basis index {index} out of range for {num_qubits} qubits")
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)


def _check_target(state: StateVector, target: int) -> None:
    if not 0 <= target < state.num_qubits:
        raise IndexError(f"qubit {target} out of range for {state.num_qubits}-qubit register")


def _single_view(amps: np.ndarray, n: int, target: int) -> np.ndarray:
    pre = 1 << target
    post = 1 << (n - target - 1)
    return amps.reshape(pre, 2, post)


def _pair_view(amps: np.ndarray, n: int, lo: int, hi: int) -> np.ndarray:
    pre = 1 << lo
    mid = 1 << (hi - lo - 1)
    post = 1 << (n - hi - 1)
    return amps.reshape(pre, 2, mid, 2, post)


def apply_single(state: StateVector, target: int, u: np.ndarray) -> StateVector:
    """Apply a 2x2 unitary to one qubit."""
    _check_target(state, target)
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("matrix is not unitary within 1e-12")
    out = np.empty_like(state.amplitudes)
    src = _single_view(state.amplitudes, state.num_qubits, target)
    dst = _single_view(out, state.num_qubits, target)
    dst[:, 0, :] = u[0, 0] * src[:, 0, :] + u[0, 1] * src[:, 1, :]
    dst[:, 1, :] = u[1, 0] * src[:, 0, :] + u[1, 1] * src[:, 1, :]
    return StateVector(out)


def _check_pair(state: StateVector, q1: int, q2: int) -> tuple[int, int]:
    _check_target(state, q1)
    _check_target(state, q2)
    if q1 == q2:
        raise IndexError("two-qubit gate needs distinct qubits")
    return min(q1, q2), max(q1, q2)


def apply_cz(state: StateVector, control: int, target: int) -> StateVector:
    """Controlled-Z; symmetric in its two wires."""
    lo, hi = _check_pair(state, control, target)
    out = state.amplitudes.copy()
    v = _pair_view(out, state.num_qubits, lo, hi)
    v[:, 1, :, 1, :] *= -1.0
    return StateVector(out)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """Controlled-NOT flipping ``target`` when ``control`` is 1."""
    lo, hi = _check_pair(state, control, target)
    out = state.amplitudes.copy()
    v = _pair_view(out, state.num_qubits, lo, hi)
    if control == lo:
        tmp = v[:, 1, :, 0, :].copy()
        v[:, 1, :, 0, :] = v[:, 1, :, 1, :]
        v[:, 1, :, 1, :] = tmp
    else:
        tmp = v[:, 0, :, 1, :].copy()
        v[:, 0, :, 1, :] = v[:, 1, :, 1, :]
        v[:, 1, :, 1, :] = tmp
    return StateVector(out)


def apply_swap(state: StateVector, q1: int, q2: int) -> StateVector:
    """Exchange two wires."""
    lo, hi = _check_pair(state, q1, q2)
    out = state.amplitudes.copy()
    v = _pair_view(out, state.num_qubits, lo, hi)
    tmp = v[:, 0, :, 1, :].copy()
    v[:, 0, :, 1, :] = v[:, 1, :, 0, :]
    v[:, 1, :, 0, :] = tmp
    return StateVector(out)


class MeasurementResult(NamedTuple):
    outcome: int
    probability: float
    state: StateVector


def measure(
    state: StateVector,
    target: int,
    rng: np.random.Generator | None = None,
    forced: int | None = None,
) -> MeasurementResult:
    """Projective computational-basis measurement of one qubit.

    Exactly one of ``rng`` and ``forced`` must be given. With ``rng`` the
    outcome is Born-sampled; with ``forced`` the stated outcome is imposed,
    and forcing an outcome whose probability is below ZERO_PROB_TOL raises
    :class:`ZeroProbabilityError`.

    Returns the outcome bit, its Born probability, and the renormalized
    post-measurement state (still on the full register).
    """
    _check_target(state, target)
    if (rng is None) == (forced is None):
        raise ValueError("pass exactly one of rng and forced")
    v = _single_view(state.amplitudes, state.num_qubits, target)
    p0 = float(np.sum(np.abs(v[:, 0, :]) ** 2))
    p1 = float(np.sum(np.abs(v[:, 1, :]) ** 2))
    if forced is not None:
        if forced not in (0, 1):
            raise ValueError("forced outcome must be 0 or 1")
        outcome = forced
        p = (p0, p1)[outcome]
        if p <= ZERO_PROB_TOL:
            raise ZeroProbabilityError(
                f"outcome {outcome} on qubit {target} has probability {p!r}"
            )
    else:
        outcome = 0 if rng.random() < p0 else 1
        p = (p0, p1)[outcome]
    out = np.zeros_like(state.amplitudes)
    dst = _single_view(out, state.num_qubits, target)
    dst[:, outcome, :] = v[:, outcome, :] / math.sqrt(p)
    return MeasurementResult(outcome, p, StateVector(out))


def extract_qubit(state: StateVector, target: int) -> StateVector:
    """Pull out the pure state of one qubit once every other wire has collapsed.

    Valid only when the rest of the register is in a single computational
    basis state (as it is after measuring all other qubits); raises
    ValueError otherwise.
    """
    _check_target(state, target)
    t = np.moveaxis(
        state.amplitudes.reshape((2,) * state.num_qubits), target, 0
    ).reshape(2, -1)
    weights = np.abs(t[0]) ** 2 + np.abs(t[1]) ** 2
    col = int(np.argmax(weights))
    w = float(weights[col])
    if abs(w - 1.0) > STATE_TOL:
        raise ValueError("other wires are not collapsed to a single basis state")
    return StateVector(t[:, col] / math.sqrt(w))


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix on k qubits."""

    __slots__ = ("num_qubits", "matrix")

    def __init__(self, matrix: np.ndarray):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        dim = m.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise ValueError("density matrix dimension must be 2**k, k >= 1")
        if np.max(np.abs(m - m.conj().T)) > STATE_TOL:
            raise ValueError("density matrix is not hermitian")
        if abs(np.trace(m).real - 1.0) > STATE_TOL:
            raise ValueError("density matrix trace is not 1")
        if float(np.min(np.linalg.eigvalsh(m))) < -STATE_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "num_qubits", dim.bit_length() - 1)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("DensityMatrix is immutable")

    def __repr__(self) -> str:
        return f"DensityMatrix(num_qubits={self.num_qubits})"


def reduced_density(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Partial trace of a pure state down to the qubits in ``keep``.

    The kept qubits appear in ascending original index order.
    """
    kept = sorted(set(keep))
    if not kept:
        raise ValueError("keep at least one qubit")
    for q in kept:
        _check_target(state, q)
    n = state.num_qubits
    rest = [q for q in range(n) if q not in kept]
    t = state.amplitudes.reshape((2,) * n)
    t = np.transpose(t, kept + rest).reshape(1 << len(kept), 1 << len(rest))
    return DensityMatrix(t @ t.conj().T)


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, the pure-state fidelity, which ignores global phase."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("states live on different registers")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the sum of absolute eigenvalues of the difference."""
    if a.matrix.shape != b.matrix.shape:
        raise ValueError("density matrices have different dimensions")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))
