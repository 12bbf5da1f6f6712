import itertools
import time

import numpy as np
import pytest

from qcroute import (
    AnsatzSpec,
    SampleCounts,
    build_cable_qubo,
    default_penalties,
    estimate_energy,
    exact_distribution,
    prepare_state,
    qubo_energy,
    sample,
)
from qcroute.quantum import bitstring_to_index, index_to_bitstring
from test_oracle import zero_qubo
from reference import reference_energy


class TestAnsatzSpec:
    @pytest.mark.parametrize("m, reps, count", [(1, 0, 1), (4, 1, 8), (11, 1, 22), (3, 2, 9)])
    def test_parameter_count(self, m, reps, count):
        assert AnsatzSpec(m, reps).parameter_count == count

    def test_invalid(self):
        with pytest.raises(ValueError):
            AnsatzSpec(0, 1)
        with pytest.raises(ValueError):
            AnsatzSpec(2, -1)


class TestPrepareState:
    def test_single_qubit_identity(self):
        state = prepare_state(AnsatzSpec(1, 0), [0.0])
        assert np.allclose(state.amplitudes, [1.0, 0.0])

    def test_single_qubit_flip(self):
        state = prepare_state(AnsatzSpec(1, 0), [np.pi])
        assert np.allclose(state.amplitudes, [0.0, 1.0], atol=1e-12)

    def test_cnot_chain_propagates_flip(self):
        # First layer flips qubit 0, the chain copies it onto qubit 1, the
        # final zero layer does nothing: state |11> (amplitude index 3).
        state = prepare_state(AnsatzSpec(2, 1), [np.pi, 0.0, 0.0, 0.0])
        expected = np.zeros(4)
        expected[3] = 1.0
        assert np.allclose(np.abs(state.amplitudes), expected, atol=1e-12)

    @pytest.mark.parametrize("m, reps", [(1, 0), (3, 1), (5, 2)])
    def test_zero_parameters_give_all_zero_state(self, m, reps):
        spec = AnsatzSpec(m, reps)
        state = prepare_state(spec, np.zeros(spec.parameter_count))
        expected = np.zeros(1 << m)
        expected[0] = 1.0
        assert np.max(np.abs(state.amplitudes - expected)) <= 1e-12

    def test_normalization_preserved(self):
        rng = np.random.default_rng(11)
        spec = AnsatzSpec(4, 1)
        for _ in range(1000):
            theta = rng.random(spec.parameter_count) * 2 * np.pi
            state = prepare_state(spec, theta)
            assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-10

    def test_normalization_at_eleven_qubits(self):
        rng = np.random.default_rng(12)
        spec = AnsatzSpec(11, 1)
        for _ in range(25):
            state = prepare_state(spec, rng.random(spec.parameter_count) * 2 * np.pi)
            assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-10

    def test_parameter_count_mismatch(self):
        with pytest.raises(ValueError, match="parameters"):
            prepare_state(AnsatzSpec(2, 1), [0.0, 0.0])

    def test_sixteen_qubit_preparation_is_fast(self):
        spec = AnsatzSpec(16, 1)
        theta = np.linspace(0.1, 1.0, spec.parameter_count)
        prepare_state(spec, theta)  # warm up
        start = time.perf_counter()
        prepare_state(spec, theta)
        assert time.perf_counter() - start < 0.1


class TestBitOrdering:
    def test_round_trip(self):
        for u in range(16):
            assert bitstring_to_index(index_to_bitstring(u, 4)) == u

    def test_character_i_is_qubit_i(self):
        assert index_to_bitstring(1, 3) == "100"
        assert index_to_bitstring(4, 3) == "001"


class TestExactDistribution:
    def test_point_mass(self):
        state = prepare_state(AnsatzSpec(3, 0), np.zeros(3))
        assert exact_distribution(state) == {"000": 1.0}

    def test_uniform_two_qubit(self):
        # Half-turn rotations on both qubits, no entangling layer.
        state = prepare_state(AnsatzSpec(2, 0), [np.pi / 2, np.pi / 2])
        dist = exact_distribution(state)
        assert set(dist) == {"00", "10", "01", "11"}
        for p in dist.values():
            assert p == pytest.approx(0.25, abs=1e-10)

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(5)
        spec = AnsatzSpec(4, 1)
        for _ in range(20):
            state = prepare_state(spec, rng.random(spec.parameter_count) * 2 * np.pi)
            assert sum(exact_distribution(state).values()) == pytest.approx(1.0, abs=1e-10)


class TestSample:
    def test_deterministic_state_all_shots_on_one_string(self):
        state = prepare_state(AnsatzSpec(2, 1), [np.pi, 0.0, 0.0, 0.0])
        counts = sample(state, 50, np.random.default_rng(0))
        assert counts.counts == {"11": 50}
        assert counts.shots == 50

    def test_uniform_counts_within_five_sigma(self):
        state = prepare_state(AnsatzSpec(2, 0), [np.pi / 2, np.pi / 2])
        counts = sample(state, 4000, np.random.default_rng(123))
        sigma = np.sqrt(4000 * 0.25 * 0.75)
        for key in ("00", "01", "10", "11"):
            assert abs(counts.counts.get(key, 0) - 1000) <= 5 * sigma

    def test_same_seed_identical_counts(self):
        spec = AnsatzSpec(3, 1)
        theta = np.linspace(0.3, 2.0, spec.parameter_count)
        state = prepare_state(spec, theta)
        a = sample(state, 500, np.random.default_rng(77))
        b = sample(state, 500, np.random.default_rng(77))
        assert a == b

    def test_invalid_shots(self):
        state = prepare_state(AnsatzSpec(1, 0), [0.0])
        with pytest.raises(ValueError, match="shots"):
            sample(state, 0, np.random.default_rng(0))

    def test_chi_square_sanity_at_large_shots(self):
        rng = np.random.default_rng(31)
        spec = AnsatzSpec(4, 1)
        state = prepare_state(spec, rng.random(spec.parameter_count) * 2 * np.pi)
        expected = exact_distribution(state)
        counts = sample(state, 100_000, np.random.default_rng(32))
        chi2 = 0.0
        dof = 0
        for key, p in expected.items():
            if 100_000 * p < 5:
                continue
            observed = counts.counts.get(key, 0)
            chi2 += (observed - 100_000 * p) ** 2 / (100_000 * p)
            dof += 1
        # Generous bound: far beyond any plausible quantile for <= 16 bins.
        assert chi2 < 60.0
        assert dof >= 8


@pytest.fixture()
def triangle_qubo(triangle):
    cable = triangle.cables[0]
    return build_cable_qubo(triangle, cable, default_penalties(triangle, cable))


class TestEstimateEnergy:
    def test_point_mass(self, triangle_qubo):
        e_exp, (best, best_energy) = estimate_energy({"1101": 1.0}, triangle_qubo)
        assert e_exp == best_energy == 2.0
        assert best == "1101"

    def test_uniform_matches_enumeration_mean(self, triangle, triangle_qubo):
        pens = triangle_qubo.penalties
        keys = ["".join(bits) for bits in itertools.product("01", repeat=4)]
        uniform = {key: 1.0 / 16.0 for key in keys}
        e_exp, (best, _) = estimate_energy(uniform, triangle_qubo)
        mean = sum(reference_energy(triangle, triangle.cables[0], pens, z) for z in keys) / 16.0
        assert e_exp == pytest.approx(mean, abs=1e-9)
        assert best == "1101"

    def test_counts_weighting(self, triangle_qubo):
        counts = SampleCounts(counts={"0000": 3, "1101": 1}, shots=4)
        e_exp, (best, best_energy) = estimate_energy(counts, triangle_qubo)
        assert e_exp == pytest.approx((3 * 10.0 + 2.0) / 4.0)
        assert (best, best_energy) == ("1101", 2.0)

    def test_tie_breaks_lexicographically(self):
        q = zero_qubo(3)
        e_exp, (best, best_energy) = estimate_energy({"100": 0.5, "010": 0.5}, q)
        assert best == "010"
        assert e_exp == best_energy == 0.0

    def test_dimension_mismatch(self, triangle_qubo):
        with pytest.raises(ValueError, match="dimension"):
            estimate_energy({"11": 1.0}, triangle_qubo)

    def test_empty_weights(self, triangle_qubo):
        with pytest.raises(ValueError, match="no weighted"):
            estimate_energy({}, triangle_qubo)

    def test_shot_estimate_close_to_exact(self, layout1):
        cable = layout1.cable("c1")
        q = build_cable_qubo(layout1, cable, default_penalties(layout1, cable))
        spec = AnsatzSpec(q.dim, 1)
        rng = np.random.default_rng(9)
        for trial in range(5):
            theta = rng.random(spec.parameter_count) * 2 * np.pi
            state = prepare_state(spec, theta)
            dist = exact_distribution(state)
            e_exact, _ = estimate_energy(dist, q)
            second_moment = sum(
                p * qubo_energy(q, z) ** 2 for z, p in dist.items()
            )
            std_error = np.sqrt(max(second_moment - e_exact**2, 0.0) / 1000.0)
            counts = sample(state, 1000, np.random.default_rng(100 + trial))
            e_shots, _ = estimate_energy(counts, q)
            assert abs(e_shots - e_exact) <= 5.0 * std_error + 1e-12
