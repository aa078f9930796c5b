"""Who tells what to whom: the secret-sharing layer over the protocol.

The dealer (Alice) runs the quantum half, then messages flow to one
designated receiver (Bob) over an in-process, deterministic queue realized
as an ordered transcript:

1. Alice reports her own final outcome bit.
2. Alice hands over the message wire (qubit transfer).
3. Every other cooperating receiver disclosed its outcome bit and then its
   rotation angle, in ascending receiver index.

Bob's own angle and outcome never appear as messages; he holds them locally.
With every disclosure in hand Bob computes the branch angle and applies the
exact recovery. If any receiver withholds, Bob cannot estimate the rotation
at all; his fallback is to undo only the sigma_z that Alice's outcome bit
flags (that needs no angle data) and otherwise leave the qubit alone, so the
residual is a plain rotation by the branch angle.

Messages carry an ``intercepted`` flag for information-availability
accounting of eavesdropper scenarios; nothing in this module sets it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .analysis import FidelityStats
from .protocol import ScenarioConfig, compute_phi, recovery_plan, run_sampled
from .qsim import SIGMA_Z, StateVector, apply_single, fidelity_up_to_phase

PHASE_ORDER = ("alice_report", "transfer", "disclosure")


@dataclass(frozen=True)
class PartyId:
    """Either the dealer ("alice") or one of the receivers ("receiver:i")."""

    kind: str
    index: int | None = None

    def __post_init__(self):
        if self.kind == "alice":
            if self.index is not None:
                raise ValueError("alice carries no index")
        elif self.kind == "receiver":
            if self.index is None or self.index < 0:
                raise ValueError("receiver needs a nonnegative index")
        else:
            raise ValueError(f"unknown party kind {self.kind!r}")

    @classmethod
    def alice(cls) -> "PartyId":
        return cls("alice")

    @classmethod
    def receiver(cls, index: int) -> "PartyId":
        return cls("receiver", index)

    @classmethod
    def from_tag(cls, tag: str) -> "PartyId":
        if tag == "alice":
            return cls.alice()
        kind, _, idx = tag.partition(":")
        if kind == "receiver" and idx.isdigit():
            return cls.receiver(int(idx))
        raise ValueError(f"unparseable party tag {tag!r}")

    @property
    def tag(self) -> str:
        return "alice" if self.kind == "alice" else f"receiver:{self.index}"


@dataclass(frozen=True)
class ClassicalMessage:
    """One classical record: angle or outcome disclosure, Alice's bit, or the handover."""

    sender: PartyId
    recipient: PartyId
    kind: str
    value: object
    phase: str
    intercepted: bool = False

    KINDS = ("angle", "outcome", "alice_outcome", "qubit_transfer")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown message kind {self.kind!r}")
        if self.phase not in PHASE_ORDER:
            raise ValueError(f"unknown phase {self.phase!r}")

    def to_dict(self) -> dict:
        return {
            "from": self.sender.tag,
            "to": self.recipient.tag,
            "kind": self.kind,
            "phase": self.phase,
            "value": self.value,
            "intercepted": self.intercepted,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassicalMessage":
        return cls(
            sender=PartyId.from_tag(d["from"]),
            recipient=PartyId.from_tag(d["to"]),
            kind=d["kind"],
            phase=d["phase"],
            value=d["value"],
            intercepted=bool(d.get("intercepted", False)),
        )


@dataclass(frozen=True)
class Transcript:
    """Ordered record of one secret-sharing run."""

    n: int
    bob: int
    cooperating: tuple[str, ...]
    messages: tuple[ClassicalMessage, ...]
    fidelity: float | None

    def to_json(self) -> str:
        payload = {
            "format": "telerot-transcript/1",
            "n": self.n,
            "bob": self.bob,
            "cooperating": list(self.cooperating),
            "messages": [m.to_dict() for m in self.messages],
            "fidelity": self.fidelity,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_dict(self) -> dict:
        return json.loads(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        d = json.loads(text)
        if d.get("format") != "telerot-transcript/1":
            raise ValueError("not a telerot transcript document")
        return cls(
            n=int(d["n"]),
            bob=int(d["bob"]),
            cooperating=tuple(d["cooperating"]),
            messages=tuple(ClassicalMessage.from_dict(m) for m in d["messages"]),
            fidelity=None if d["fidelity"] is None else float(d["fidelity"]),
        )


def _amplitude_pairs(state: StateVector) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in state.amplitudes]


def _bob_fallback(final_state: StateVector, alice_outcome: int) -> StateVector:
    if alice_outcome == 1:
        return apply_single(final_state, 0, SIGMA_Z)
    return final_state


def run_secret_sharing(
    config: ScenarioConfig,
    bob: int,
    cooperating: Iterable[int] | None = None,
    rng: np.random.Generator | None = None,
) -> Transcript:
    """One sampled run with full message routing.

    ``cooperating`` lists the receiver indices that disclose their data;
    None means everyone. Bob is the reconstructing receiver and always
    counts as cooperating (his data stays local and off the wire). With
    every other receiver cooperating, Bob applies the exact recovery and the
    recorded fidelity is 1 up to numerical noise; otherwise he falls back to
    the angle-free sigma_z correction.
    """
    if not 0 <= bob < config.n:
        raise ValueError(f"bob index {bob} out of range for {config.n} receivers")
    coop = set(range(config.n)) if cooperating is None else set(cooperating)
    if not coop <= set(range(config.n)):
        raise ValueError("cooperating contains an unknown receiver index")
    coop.add(bob)
    sample_config = replace(config, mode="sample")
    branch = run_sampled(sample_config, rng=rng)

    alice = PartyId.alice()
    bob_id = PartyId.receiver(bob)
    messages = [
        ClassicalMessage(alice, bob_id, "alice_outcome", branch.alice_outcome, "alice_report"),
        ClassicalMessage(
            alice, bob_id, "qubit_transfer", _amplitude_pairs(branch.final_state), "transfer"
        ),
    ]
    for i in range(config.n):
        if i == bob or i not in coop:
            continue
        sender = PartyId.receiver(i)
        messages.append(
            ClassicalMessage(
                sender, bob_id, "outcome", int(branch.receiver_outcomes[i]), "disclosure"
            )
        )
        messages.append(
            ClassicalMessage(sender, bob_id, "angle", config.thetas[i], "disclosure")
        )

    if coop == set(range(config.n)):
        plan = recovery_plan(branch.phi, branch.alice_outcome)
        final = apply_single(branch.final_state, 0, plan.unitary)
    else:
        final = _bob_fallback(branch.final_state, branch.alice_outcome)
    fidelity = fidelity_up_to_phase(final, config.message_state())

    cooperating_tags = tuple(
        [alice.tag] + [PartyId.receiver(i).tag for i in sorted(coop)]
    )
    return Transcript(
        n=config.n,
        bob=bob,
        cooperating=cooperating_tags,
        messages=tuple(messages),
        fidelity=fidelity,
    )


MESSAGE_FAMILIES = ("fixed", "varphi_zero", "uniform")


def _draw_message(
    family: str, config: ScenarioConfig, rng: np.random.Generator
) -> tuple[complex, complex]:
    if family == "fixed":
        return config.alpha, config.beta
    vartheta = rng.uniform(0.0, math.pi)
    varphi = 0.0 if family == "varphi_zero" else rng.uniform(0.0, 2.0 * math.pi)
    return (
        complex(math.cos(vartheta / 2.0)),
        complex(math.cos(varphi), math.sin(varphi)) * math.sin(vartheta / 2.0),
    )


def non_cooperation_average(
    config: ScenarioConfig,
    withholder: int,
    trials: int,
    seed: int = 0,
    bob: int = 0,
    message_family: str = "fixed",
) -> FidelityStats:
    """Mean reconstruction fidelity when one receiver keeps quiet.

    Per trial the withholder's angle is redrawn uniformly from [0, pi), the
    protocol is sampled once, and Bob applies his angle-free fallback. The
    message is config's own ("fixed"), or redrawn per trial from the
    varphi = 0 family or the fully uniform Bloch family.
    """
    if not 0 <= bob < config.n:
        raise ValueError(f"bob index {bob} out of range for {config.n} receivers")
    if not 0 <= withholder < config.n:
        raise ValueError(f"withholder {withholder} out of range for {config.n} receivers")
    if withholder == bob:
        raise ValueError("the reconstructing receiver cannot withhold from himself")
    if trials < 1:
        raise ValueError("trials must be positive")
    if message_family not in MESSAGE_FAMILIES:
        raise ValueError(f"unknown message family {message_family!r}")
    rng = np.random.default_rng(seed)
    fidelities = np.empty(trials)
    thetas = list(config.thetas)
    for k in range(trials):
        thetas[withholder] = rng.uniform(0.0, math.pi)
        alpha, beta = _draw_message(message_family, config, rng)
        trial_config = ScenarioConfig(alpha, beta, config.n, tuple(thetas), mode="sample")
        branch = run_sampled(trial_config, rng=rng)
        final = _bob_fallback(branch.final_state, branch.alice_outcome)
        fidelities[k] = fidelity_up_to_phase(final, trial_config.message_state())
    std_error = float(fidelities.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return FidelityStats(mean=float(fidelities.mean()), std_error=std_error, samples=trials)


def validate_transcript(transcript: Transcript) -> list[str]:
    """Provenance and ordering violations, empty when the transcript is clean.

    Checks: disclosures come only from non-Bob receivers, Alice alone reports
    her outcome and transfers the qubit, the transfer goes to Bob, phases
    appear in protocol order, and a recorded fidelity implies a handover.
    """
    violations: list[str] = []
    bob_id = PartyId.receiver(transcript.bob)
    seen_phase = -1
    transfers = 0
    for i, msg in enumerate(transcript.messages):
        where = f"message {i}"
        if msg.kind in ("angle", "outcome"):
            if msg.sender.kind != "receiver":
                violations.append(f"{where}: {msg.kind} disclosure from non-receiver")
            elif msg.sender == bob_id:
                violations.append(f"{where}: the reconstructing receiver's own data is on the wire")
        elif msg.kind == "alice_outcome":
            if msg.sender.kind != "alice":
                violations.append(f"{where}: alice_outcome from non-dealer")
        elif msg.kind == "qubit_transfer":
            transfers += 1
            if msg.sender.kind != "alice":
                violations.append(f"{where}: qubit transfer from non-dealer")
            if msg.recipient != bob_id:
                violations.append(f"{where}: qubit transfer not addressed to the recipient")
        phase_rank = PHASE_ORDER.index(msg.phase)
        if phase_rank < seen_phase:
            violations.append(f"{where}: phase {msg.phase!r} after a later phase")
        seen_phase = max(seen_phase, phase_rank)
    if transcript.fidelity is not None and transfers == 0:
        violations.append("fidelity recorded without any qubit transfer")
    return violations
