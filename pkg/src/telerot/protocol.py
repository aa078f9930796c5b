"""The rotation-teleportation pipeline and its branch bookkeeping.

Register layout: wire 0 carries the message qubit a, wire 1 carries the
dealer's entangled qubit b, wires 2..n+1 carry the n receiver qubits. The
dealer prepares ``(alpha|0> + beta|1>)_a`` next to a GHZ state over b and all
receivers, entangles a with b (CZ then CNOT), each receiver applies its own
rotation and measures, and the dealer finishes with SWAP(a, b), a Hadamard on
b and a measurement of b. What is left on wire a is the message rotated by a
branch angle phi that is a deterministic function of the rotation angles and
the receiver outcomes:

    A' = prod(cos over outcome-0) * prod(sin over outcome-1)
    B' = (-1)**m * prod(sin over outcome-0) * prod(cos over outcome-1)
    phi = atan2(B', A')                 (m = number of outcome-0 receivers)

with the branch occurring with probability (A'^2 + B'^2) / 2. When the
dealer's own outcome is 1 the residual carries an extra sigma_z ahead of the
rotation; either way a deterministic recovery returns the message exactly.

Branch probabilities never depend on the message amplitudes, and the dealer's
final outcome is an exact coin flip on every receiver branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qsim import (
    HADAMARD,
    SIGMA_Z,
    ZERO_PROB_TOL,
    StateVector,
    ZeroProbabilityError,
    apply_cnot,
    apply_cz,
    apply_single,
    apply_swap,
    extract_qubit,
    make_rotation,
    measure,
)

MAX_ENUM_RECEIVERS = 12


class CapacityError(ValueError):
    """Raised when a request exceeds the enumeration size cap."""


@dataclass(frozen=True)
class ScenarioConfig:
    """One protocol scenario: message amplitudes, receiver angles, run mode."""

    alpha: complex
    beta: complex
    n: int
    thetas: tuple[float, ...]
    mode: str = "enumerate"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        if self.n < 1:
            raise ValueError("need at least one receiver")
        if len(self.thetas) != self.n:
            raise ValueError(f"expected {self.n} rotation angles, got {len(self.thetas)}")
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"message amplitudes are not normalized: {norm!r}")
        if self.mode not in ("enumerate", "sample"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")

    def message_state(self) -> StateVector:
        return StateVector.qubit(self.alpha, self.beta)


@dataclass(frozen=True)
class Branch:
    """One measurement history and what it leaves on the message wire."""

    receiver_outcomes: str
    m: int
    alice_outcome: int
    probability: float
    phi: float
    final_state: StateVector


@dataclass(frozen=True)
class RecoveryPlan:
    alice_outcome: int
    unitary: np.ndarray
    description: str


def prepare(config: ScenarioConfig) -> StateVector:
    """Message qubit next to a GHZ state over the dealer's b and all receivers."""
    ghz = np.zeros(1 << (config.n + 1), dtype=complex)
    ghz[0] = ghz[-1] = 1.0 / math.sqrt(2)
    msg = np.array([config.alpha, config.beta], dtype=complex)
    return StateVector(np.kron(msg, ghz))


def alice_encode(state: StateVector) -> StateVector:
    """Entangle the message with the dealer's GHZ qubit: CZ(a, b) then CNOT(a, b)."""
    return apply_cnot(apply_cz(state, 0, 1), 0, 1)


def receivers_rotate(state: StateVector, thetas: Sequence[float]) -> StateVector:
    """Each receiver i rotates its own wire by thetas[i]."""
    if len(thetas) != state.num_qubits - 2:
        raise ValueError("one angle per receiver wire is required")
    for i, theta in enumerate(thetas):
        state = apply_single(state, 2 + i, make_rotation(theta))
    return state


def compute_phi(thetas: Sequence[float], outcomes: Sequence[int] | str) -> float:
    """Branch rotation angle from the receiver angles and outcome bits.

    ``outcomes`` may be a bit string like "01" or any sequence of 0/1 ints,
    entry i belonging to receiver i. The result lies in (-pi, pi]. Raises
    ZeroProbabilityError when the branch has no weight (both defining
    products vanish).
    """
    bits = [int(b) for b in outcomes]
    if len(bits) != len(thetas):
        raise ValueError("outcomes and thetas must have equal length")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("outcomes must be 0/1 bits")
    a_prod = 1.0
    b_prod = 1.0
    for theta, bit in zip(thetas, bits):
        c, s = math.cos(theta), math.sin(theta)
        if bit == 0:
            a_prod *= c
            b_prod *= -s
        else:
            a_prod *= s
            b_prod *= c
    if (a_prod * a_prod + b_prod * b_prod) / 2.0 < ZERO_PROB_TOL:
        raise ZeroProbabilityError("branch has zero probability, phi is undefined")
    phi = math.atan2(b_prod, a_prod)
    if phi <= -math.pi:
        phi += 2.0 * math.pi
    return phi


def _finalize(
    state: StateVector,
    rng: np.random.Generator | None,
    forced: int | None,
) -> tuple[int, float, StateVector]:
    """SWAP(a, b), Hadamard on b, measure b; also reports the outcome probability."""
    state = apply_swap(state, 0, 1)
    state = apply_single(state, 1, HADAMARD)
    outcome, p, state = measure(state, 1, rng=rng, forced=forced)
    return outcome, p, extract_qubit(state, 0)


def alice_finalize(
    state: StateVector,
    rng: np.random.Generator | None = None,
    forced: int | None = None,
) -> tuple[int, StateVector]:
    """Dealer's closing moves once every receiver wire has been measured.

    Returns her outcome bit and the one-qubit state left on the message wire.
    """
    outcome, _, qubit = _finalize(state, rng, forced)
    return outcome, qubit


def _rotated_state(config: ScenarioConfig) -> StateVector:
    return receivers_rotate(alice_encode(prepare(config)), config.thetas)


def enumerate_branches(config: ScenarioConfig) -> list[Branch]:
    """Every measurement history with its exact Born probability.

    Receiver patterns are visited in lexicographic order, each followed by
    the dealer's outcome 0 branch then outcome 1. Branches whose receiver
    pattern has probability below ZERO_PROB_TOL are dropped. Probabilities
    of the returned branches sum to 1 up to that pruning.
    """
    if config.n > MAX_ENUM_RECEIVERS:
        raise CapacityError(
            f"enumeration is capped at {MAX_ENUM_RECEIVERS} receivers, got {config.n}"
        )
    base = _rotated_state(config)
    branches: list[Branch] = []

    def descend(state: StateVector, wire: int, bits: str, weight: float) -> None:
        if wire == config.n + 2:
            phi = compute_phi(config.thetas, bits)
            for alice_bit in (0, 1):
                outcome, p, qubit = _finalize(state, None, alice_bit)
                branches.append(
                    Branch(
                        receiver_outcomes=bits,
                        m=bits.count("0"),
                        alice_outcome=outcome,
                        probability=weight * p,
                        phi=phi,
                        final_state=qubit,
                    )
                )
            return
        for bit in (0, 1):
            try:
                outcome, p, collapsed = measure(state, wire, forced=bit)
            except ZeroProbabilityError:
                continue
            if weight * p < ZERO_PROB_TOL:
                continue
            descend(collapsed, wire + 1, bits + str(bit), weight * p)

    descend(base, 2, "", 1.0)
    return branches


def run_sampled(
    config: ScenarioConfig,
    rng: np.random.Generator | None = None,
) -> Branch:
    """One Born-sampled pass through the whole protocol.

    The generator defaults to ``numpy.random.default_rng(config.seed)``; pass
    ``rng`` to draw several runs from one stream. Requires mode "sample".
    """
    if config.mode != "sample":
        raise ValueError('run_sampled needs a config with mode "sample"')
    if rng is None:
        rng = np.random.default_rng(config.seed)
    state = _rotated_state(config)
    bits = []
    weight = 1.0
    for i in range(config.n):
        outcome, p, state = measure(state, 2 + i, rng=rng)
        bits.append(str(outcome))
        weight *= p
    pattern = "".join(bits)
    alice_outcome, p, qubit = _finalize(state, rng, None)
    return Branch(
        receiver_outcomes=pattern,
        m=pattern.count("0"),
        alice_outcome=alice_outcome,
        probability=weight * p,
        phi=compute_phi(config.thetas, pattern),
        final_state=qubit,
    )


def recovery_plan(phi: float, alice_outcome: int) -> RecoveryPlan:
    """Correction that maps the branch residual back to the message.

    Outcome 0 leaves the message rotated by phi, undone by the inverse
    rotation. Outcome 1 additionally carries a sigma_z ahead of the rotation;
    sigma_z composed with a rotation by -(pi + phi) undoes it, up to an
    unobservable overall sign.
    """
    if alice_outcome == 0:
        return RecoveryPlan(0, make_rotation(-phi), "R(-phi)")
    if alice_outcome == 1:
        return RecoveryPlan(1, SIGMA_Z @ make_rotation(-math.pi - phi), "sigma_z R(-pi-phi)")
    raise ValueError("alice_outcome must be 0 or 1")


def alice_alternative_correction(branch: Branch) -> StateVector:
    """Dealer-side sigma_z on an outcome-1 branch before the qubit is handed over.

    Turns the residual into a plain rotation of the message, by pi - phi, so
    the eventual holder only ever has to undo a rotation.
    """
    if branch.alice_outcome != 1:
        raise ValueError("the alternative correction applies to alice outcome 1 only")
    return apply_single(branch.final_state, 0, SIGMA_Z)


_TWO_PARTY_CORRECTION = {
    (0, 0): np.eye(2, dtype=complex),
    (0, 1): SIGMA_Z,
    (1, 0): np.array([[0, -1j], [1j, 0]], dtype=complex),
    (1, 1): np.array([[0, 1], [1, 0]], dtype=complex),
}


def two_party_run(
    alpha: complex,
    beta: complex,
    theta: float,
    rng: np.random.Generator | None = None,
    forced: tuple[int, int] | None = None,
) -> tuple[int, StateVector]:
    """Single-receiver protocol with the receiver's outcome reported back.

    One shared entangled pair plus one classical bit let the pair of parties
    leave the message rotated by exactly ``sign * theta``, where the sign is
    fixed by the dealer's own outcome (+1 for outcome 1). Each sign occurs
    with probability 1/2. Pass ``forced=(receiver_bit, alice_bit)`` to pick a
    branch, or ``rng`` to sample one; returns ``(sign, rotated message)``.
    """
    if (rng is None) == (forced is None):
        raise ValueError("pass exactly one of rng and forced")
    config = ScenarioConfig(alpha, beta, 1, (theta,), mode="sample")
    state = _rotated_state(config)
    r_forced = forced[0] if forced is not None else None
    r_out, _, state = measure(state, 2, rng=rng, forced=r_forced)
    a_forced = forced[1] if forced is not None else None
    a_out, _, qubit = _finalize(state, rng, a_forced)
    corrected = apply_single(qubit, 0, _TWO_PARTY_CORRECTION[(r_out, a_out)])
    return (1 if a_out == 1 else -1), corrected
