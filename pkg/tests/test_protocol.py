"""Pipeline tests: preparation, encoding, branch angles, recovery."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from telerot.protocol import (
    MAX_ENUM_RECEIVERS,
    CapacityError,
    ScenarioConfig,
    alice_alternative_correction,
    alice_finalize,
    alice_encode,
    compute_phi,
    enumerate_branches,
    prepare,
    receivers_rotate,
    recovery_plan,
    run_sampled,
    two_party_run,
)
from telerot.qsim import (
    SIGMA_Z,
    StateVector,
    ZeroProbabilityError,
    apply_single,
    apply_swap,
    fidelity_up_to_phase,
    is_unitary,
    make_rotation,
    measure,
)

rng_messages = np.random.default_rng(20)


def random_config(n: int, rng: np.random.Generator, **kw) -> ScenarioConfig:
    alpha, beta = oracles.random_message(rng)
    return ScenarioConfig(alpha, beta, n, tuple(rng.uniform(0, math.pi, n)), **kw)


class TestScenarioConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ScenarioConfig(1.0, 0.0, 0, ())
        with pytest.raises(ValueError):
            ScenarioConfig(1.0, 0.0, 2, (0.1,))
        with pytest.raises(ValueError):
            ScenarioConfig(1.0, 0.5, 1, (0.1,))
        with pytest.raises(ValueError):
            ScenarioConfig(1.0, 0.0, 1, (0.1,), mode="walk")
        with pytest.raises(ValueError):
            ScenarioConfig(1.0, 0.0, 1, (0.1,), seed=-1)

    def test_coercion(self):
        config = ScenarioConfig(1, 0, 1, [np.float64(0.25)])
        assert isinstance(config.alpha, complex)
        assert config.thetas == (0.25,)
        assert np.allclose(config.message_state().amplitudes, [1, 0])


class TestPrepareAndEncode:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_prepare_matches_index_construction(self, n):
        alpha, beta = oracles.random_message(rng_messages)
        state = prepare(ScenarioConfig(alpha, beta, n, (0.0,) * n))
        assert np.allclose(state.amplitudes, oracles.prepared_state(alpha, beta, n), atol=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_encode_matches_closed_form(self, n):
        for _ in range(10):
            alpha, beta = oracles.random_message(rng_messages)
            got = alice_encode(prepare(ScenarioConfig(alpha, beta, n, (0.0,) * n)))
            assert np.allclose(got.amplitudes, oracles.encoded_state(alpha, beta, n), atol=1e-13)

    def test_encode_of_basis_messages(self):
        # alpha = 1: the CZ and CNOT both act trivially on the |0>_a branch
        got = alice_encode(prepare(ScenarioConfig(1.0, 0.0, 1, (0.0,))))
        want = (oracles.ket([0, 0, 0]) + oracles.ket([0, 1, 1])) / math.sqrt(2)
        assert np.allclose(got.amplitudes, want, atol=1e-15)
        # beta = 1: CZ flips the sign of |111>, CNOT then toggles wire b
        got = alice_encode(prepare(ScenarioConfig(0.0, 1.0, 1, (0.0,))))
        want = (oracles.ket([1, 1, 0]) - oracles.ket([1, 0, 1])) / math.sqrt(2)
        assert np.allclose(got.amplitudes, want, atol=1e-15)

    def test_rotate_matches_embedding(self):
        alpha, beta = oracles.random_message(rng_messages)
        thetas = (0.3, 1.1)
        got = receivers_rotate(
            alice_encode(prepare(ScenarioConfig(alpha, beta, 2, thetas))), thetas
        )
        want = oracles.rotate_receivers(oracles.encoded_state(alpha, beta, 2), 2, thetas)
        assert np.allclose(got.amplitudes, want, atol=1e-13)

    def test_rotate_rejects_wrong_angle_count(self):
        state = prepare(ScenarioConfig(1.0, 0.0, 2, (0.1, 0.2)))
        with pytest.raises(ValueError):
            receivers_rotate(state, (0.1,))


class TestComputePhi:
    def test_worked_examples(self):
        assert np.isclose(compute_phi((math.pi / 4,), "0"), -math.pi / 4)
        assert np.isclose(compute_phi((math.pi / 4,), "1"), math.pi / 4)
        assert np.isclose(compute_phi((math.pi / 4, math.pi / 4), "00"), math.pi / 4)
        # mixed outcomes: A' = cos(pi/6) sin(pi/3) = 3/4, B' = -sin(pi/6) cos(pi/3) = -1/4
        assert np.isclose(
            compute_phi((math.pi / 6, math.pi / 3), "01"), math.atan2(-0.25, 0.75)
        )

    def test_int_sequence_and_string_agree(self):
        thetas = (0.3, 0.9, 1.4)
        assert compute_phi(thetas, "010") == compute_phi(thetas, [0, 1, 0])

    def test_zero_weight_branch_raises(self):
        with pytest.raises(ZeroProbabilityError):
            compute_phi((0.0, math.pi / 2), "11")
        with pytest.raises(ZeroProbabilityError):
            compute_phi((0.0, math.pi / 2), "00")

    def test_input_validation(self):
        with pytest.raises(ValueError):
            compute_phi((0.1,), "01")
        with pytest.raises(ValueError):
            compute_phi((0.1, 0.2), [0, 2])

    @given(
        st.lists(st.floats(min_value=-3.0, max_value=3.0), min_size=1, max_size=4),
        st.integers(min_value=0, max_value=15),
    )
    @settings(max_examples=80)
    def test_range(self, thetas, pattern):
        bits = [((pattern >> i) & 1) for i in range(len(thetas))]
        try:
            phi = compute_phi(thetas, bits)
        except ZeroProbabilityError:
            return
        assert -math.pi < phi <= math.pi

    @given(
        st.lists(
            st.floats(min_value=0.1, max_value=math.pi / 2 - 0.1), min_size=1, max_size=5
        ),
        st.data(),
    )
    @settings(max_examples=60)
    def test_sorted_pattern_tangent_form(self, thetas, data):
        """For the all-zeros-then-all-ones pattern with acute angles the angle
        reduces to atan of a signed tangent/cotangent product."""
        m = data.draw(st.integers(min_value=0, max_value=len(thetas)))
        bits = "0" * m + "1" * (len(thetas) - m)
        prod = (-1.0) ** m
        for theta, bit in zip(thetas, bits):
            prod *= math.tan(theta) if bit == "0" else 1.0 / math.tan(theta)
        assert np.isclose(compute_phi(thetas, bits), math.atan(prod), atol=1e-12)

    def test_agrees_with_amplitude_extraction(self):
        rng = np.random.default_rng(21)
        for n in (1, 2, 3):
            for _ in range(10):
                alpha, beta = oracles.random_message(rng)
                thetas = tuple(rng.uniform(0, math.pi, n))
                rotated = oracles.rotate_receivers(
                    oracles.encoded_state(alpha, beta, n), n, thetas
                )
                a_prod, b_prod = oracles.pattern_products(rotated, n, alpha, beta)
                for p in range(1 << n):
                    if (a_prod[p] ** 2 + b_prod[p] ** 2) / 2 < 1e-12:
                        continue
                    want = math.atan2(b_prod[p], a_prod[p])
                    assert np.isclose(compute_phi(thetas, format(p, f"0{n}b")), want, atol=1e-10)


class TestSwapStep:
    def test_handover_rearranges_wires(self):
        """After the receiver collapses, SWAP(a, b) moves the message-bearing
        superposition onto the wire the dealer is about to measure."""
        alpha, beta = 0.6, 0.8j
        theta = 0.7
        c, s = math.cos(theta), math.sin(theta)
        state = receivers_rotate(
            alice_encode(prepare(ScenarioConfig(alpha, beta, 1, (theta,)))), (theta,)
        )
        _, _, collapsed = measure(state, 2, forced=0)
        want = (
            alpha * c * oracles.ket([0, 0, 0])
            - alpha * s * oracles.ket([0, 1, 0])
            + beta * s * oracles.ket([1, 0, 0])
            + beta * c * oracles.ket([1, 1, 0])
        )
        assert np.allclose(collapsed.amplitudes, want, atol=1e-12)
        swapped = apply_swap(collapsed, 0, 1)
        want_swapped = (
            alpha * c * oracles.ket([0, 0, 0])
            - alpha * s * oracles.ket([1, 0, 0])
            + beta * s * oracles.ket([0, 1, 0])
            + beta * c * oracles.ket([1, 1, 0])
        )
        assert np.allclose(swapped.amplitudes, want_swapped, atol=1e-12)


class TestEnumerate:
    def test_quarter_angle_single_receiver(self):
        branches = enumerate_branches(ScenarioConfig(1.0, 0.0, 1, (math.pi / 4,)))
        assert [b.receiver_outcomes for b in branches] == ["0", "0", "1", "1"]
        assert [b.alice_outcome for b in branches] == [0, 1, 0, 1]
        assert np.allclose([b.probability for b in branches], 0.25, atol=1e-12)
        assert np.allclose([b.phi for b in branches],
                           [-math.pi / 4, -math.pi / 4, math.pi / 4, math.pi / 4])
        assert all(b.m == (1 if b.receiver_outcomes == "0" else 0) for b in branches)

    def test_zero_weight_patterns_are_pruned(self):
        branches = enumerate_branches(ScenarioConfig(0.6, 0.8, 2, (0.0, math.pi / 2)))
        patterns = {b.receiver_outcomes for b in branches}
        assert patterns == {"01", "10"}
        assert len(branches) == 4
        assert np.allclose([b.probability for b in branches], 0.25, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_probabilities_sum_to_one(self, n):
        rng = np.random.default_rng(22)
        for _ in range(5):
            config = random_config(n, rng)
            total = math.fsum(b.probability for b in enumerate_branches(config))
            assert abs(total - 1.0) < 1e-10

    def test_probabilities_ignore_the_message(self):
        rng = np.random.default_rng(23)
        thetas = tuple(rng.uniform(0, math.pi, 3))
        a1, b1 = oracles.random_message(rng)
        a2, b2 = oracles.random_message(rng)
        probs1 = [b.probability for b in enumerate_branches(ScenarioConfig(a1, b1, 3, thetas))]
        probs2 = [b.probability for b in enumerate_branches(ScenarioConfig(a2, b2, 3, thetas))]
        assert np.allclose(probs1, probs2, atol=1e-12)

    def test_alice_outcome_is_a_fair_coin(self):
        rng = np.random.default_rng(24)
        config = random_config(2, rng)
        branches = enumerate_branches(config)
        by_pattern = {}
        for b in branches:
            by_pattern.setdefault(b.receiver_outcomes, []).append(b.probability)
        for probs in by_pattern.values():
            assert len(probs) == 2
            assert abs(probs[0] - probs[1]) < 1e-12

    def test_probability_matches_product_formula(self):
        config = ScenarioConfig(1.0, 0.0, 2, (0.4, 1.2))
        for b in enumerate_branches(config):
            a_prod, b_prod = 1.0, 1.0
            for theta, bit in zip(config.thetas, b.receiver_outcomes):
                c, s = math.cos(theta), math.sin(theta)
                a_prod *= c if bit == "0" else s
                b_prod *= -s if bit == "0" else c
            assert np.isclose(b.probability, (a_prod**2 + b_prod**2) / 4, atol=1e-12)

    def test_final_states_are_exact_rotations(self):
        rng = np.random.default_rng(25)
        for n in (1, 2, 3):
            config = random_config(n, rng)
            msg = config.message_state()
            for b in enumerate_branches(config):
                want = apply_single(msg, 0, make_rotation(b.phi))
                if b.alice_outcome == 1:
                    want = apply_single(
                        StateVector(SIGMA_Z @ msg.amplitudes), 0, make_rotation(b.phi)
                    )
                assert np.allclose(b.final_state.amplitudes, want.amplitudes, atol=1e-10)

    def test_measurement_order_does_not_matter(self):
        """Joint receiver-pattern weight is the same when wires collapse in
        scrambled order instead of ascending index order."""
        config = ScenarioConfig(0.6, 0.8, 3, (0.5, 1.0, 1.5))
        base = receivers_rotate(alice_encode(prepare(config)), config.thetas)
        pattern = "101"
        state, weight = base, 1.0
        for wire in (4, 2, 3):
            _, p, state = measure(state, wire, forced=int(pattern[wire - 2]))
            weight *= p
        want = sum(
            b.probability for b in enumerate_branches(config) if b.receiver_outcomes == pattern
        )
        assert np.isclose(weight, want, atol=1e-12)

    def test_capacity_guard(self):
        config = ScenarioConfig(1.0, 0.0, MAX_ENUM_RECEIVERS + 1,
                                (0.1,) * (MAX_ENUM_RECEIVERS + 1))
        with pytest.raises(CapacityError):
            enumerate_branches(config)


class TestAliceFinalize:
    def test_forced_outcomes_reproduce_enumeration(self):
        config = ScenarioConfig(0.8, -0.6, 1, (0.9,))
        base = receivers_rotate(alice_encode(prepare(config)), config.thetas)
        _, _, collapsed = measure(base, 2, forced=0)
        branches = [b for b in enumerate_branches(config) if b.receiver_outcomes == "0"]
        for branch in branches:
            outcome, qubit = alice_finalize(collapsed, forced=branch.alice_outcome)
            assert outcome == branch.alice_outcome
            assert np.allclose(qubit.amplitudes, branch.final_state.amplitudes, atol=1e-12)


class TestRecovery:
    def test_plan_unitaries(self):
        for phi in (-2.0, -0.3, 0.0, 1.1, math.pi):
            for outcome in (0, 1):
                plan = recovery_plan(phi, outcome)
                assert is_unitary(plan.unitary)
        assert recovery_plan(0.2, 0).description == "R(-phi)"
        assert recovery_plan(0.2, 1).description == "sigma_z R(-pi-phi)"
        with pytest.raises(ValueError):
            recovery_plan(0.2, 2)

    def test_recovery_algebra(self):
        for phi in np.linspace(-3.0, 3.0, 13):
            undo0 = recovery_plan(phi, 0).unitary @ make_rotation(phi)
            assert np.allclose(undo0, np.eye(2), atol=1e-12)
            # outcome 1 residual is R(phi) sigma_z; recovery restores it up to sign
            undo1 = recovery_plan(phi, 1).unitary @ make_rotation(phi) @ SIGMA_Z
            assert np.allclose(np.abs(undo1), np.eye(2), atol=1e-12)

    def test_every_branch_recovers_exactly(self):
        rng = np.random.default_rng(26)
        for n in (1, 2, 3):
            config = random_config(n, rng)
            msg = config.message_state()
            for b in enumerate_branches(config):
                plan = recovery_plan(b.phi, b.alice_outcome)
                recovered = apply_single(b.final_state, 0, plan.unitary)
                assert fidelity_up_to_phase(recovered, msg) > 1 - 1e-10

    def test_alternative_correction_gives_plain_rotation(self):
        rng = np.random.default_rng(27)
        config = random_config(2, rng)
        msg = config.message_state()
        seen = 0
        for b in enumerate_branches(config):
            if b.alice_outcome != 1:
                with pytest.raises(ValueError):
                    alice_alternative_correction(b)
                continue
            seen += 1
            fixed = alice_alternative_correction(b)
            want = apply_single(msg, 0, make_rotation(math.pi - b.phi))
            assert fidelity_up_to_phase(fixed, want) > 1 - 1e-10
        assert seen == 4


class TestRunSampled:
    def test_requires_sample_mode(self):
        with pytest.raises(ValueError):
            run_sampled(ScenarioConfig(1.0, 0.0, 1, (0.1,)))

    def test_deterministic_per_seed(self):
        config = ScenarioConfig(0.6, 0.8, 2, (0.4, 1.1), mode="sample", seed=5)
        b1 = run_sampled(config)
        b2 = run_sampled(config)
        assert b1.receiver_outcomes == b2.receiver_outcomes
        assert b1.alice_outcome == b2.alice_outcome
        assert np.allclose(b1.final_state.amplitudes, b2.final_state.amplitudes)

    def test_probability_field_matches_enumeration(self):
        config = ScenarioConfig(0.6, 0.8, 2, (0.4, 1.1), mode="sample", seed=5)
        branch = run_sampled(config)
        table = {
            (b.receiver_outcomes, b.alice_outcome): b.probability
            for b in enumerate_branches(ScenarioConfig(0.6, 0.8, 2, (0.4, 1.1)))
        }
        want = table[(branch.receiver_outcomes, branch.alice_outcome)]
        assert np.isclose(branch.probability, want, atol=1e-12)

    def test_sampled_frequencies_match_born_weights(self):
        config = ScenarioConfig(0.6, 0.8, 2, (0.7, 1.3), mode="sample")
        rng = np.random.default_rng(28)
        counts: dict[tuple[str, int], int] = {}
        runs = 4000
        for _ in range(runs):
            b = run_sampled(config, rng=rng)
            counts[(b.receiver_outcomes, b.alice_outcome)] = (
                counts.get((b.receiver_outcomes, b.alice_outcome), 0) + 1
            )
        for b in enumerate_branches(ScenarioConfig(0.6, 0.8, 2, (0.7, 1.3))):
            freq = counts.get((b.receiver_outcomes, b.alice_outcome), 0) / runs
            band = 3 * math.sqrt(b.probability * (1 - b.probability) / runs)
            assert abs(freq - b.probability) <= band


class TestTwoParty:
    @pytest.mark.parametrize("theta", [math.pi / 8, math.pi / 3])
    def test_forced_branches(self, theta):
        alpha, beta = oracles.random_message(np.random.default_rng(29))
        msg = StateVector.qubit(alpha, beta)
        for r_bit in (0, 1):
            for a_bit in (0, 1):
                sign, corrected = two_party_run(alpha, beta, theta, forced=(r_bit, a_bit))
                assert sign == (1 if a_bit == 1 else -1)
                want = apply_single(msg, 0, make_rotation(sign * theta))
                assert fidelity_up_to_phase(corrected, want) > 1 - 1e-10

    def test_signs_are_balanced(self):
        rng = np.random.default_rng(30)
        runs = 4000
        plus = sum(
            two_party_run(0.6, 0.8, math.pi / 5, rng=rng)[0] == 1 for _ in range(runs)
        )
        assert abs(plus / runs - 0.5) < 3 * math.sqrt(0.25 / runs)

    def test_arg_guard(self):
        with pytest.raises(ValueError):
            two_party_run(1.0, 0.0, 0.1)
        with pytest.raises(ValueError):
            two_party_run(1.0, 0.0, 0.1, rng=np.random.default_rng(0), forced=(0, 0))
