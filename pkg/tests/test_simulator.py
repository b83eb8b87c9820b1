import numpy as np
import pytest

from gravopto.bosonmap import PHYSICAL_BITSTRINGS, ground_state_prep
from gravopto.circuit import Circuit, cx, h, measure, rz, s, sx, unitary_of, x
from gravopto.digitizer import build_evolution_circuit
from gravopto.simulator import (
    CountsHistogram,
    NoiseModel,
    align_global_phase,
    apply_readout,
    born_probabilities,
    run_ideal,
    run_noisy,
    zero_state,
)

from test_circuit import random_circuit


def measured(c: Circuit) -> Circuit:
    return c.extend(measure(q, q) for q in range(c.n_qubits))


def test_zero_state():
    psi = zero_state(3)
    assert psi.shape == (2, 2, 2)
    assert psi[0, 0, 0] == 1.0 and np.abs(psi).sum() == 1.0


def test_run_ideal_matches_unitary():
    rng = np.random.default_rng(71)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        c = random_circuit(rng, n, int(rng.integers(1, 15)))
        want = unitary_of(c)[:, 0]
        got = run_ideal(c)
        assert np.allclose(got, want, atol=1e-12)


def test_run_ideal_initial_state():
    c = Circuit(1, (x(0),))
    out = run_ideal(c, initial=np.array([0.0, 1.0]))
    assert np.allclose(out, [1.0, 0.0])
    with pytest.raises(ValueError):
        run_ideal(c, initial=np.zeros(4))


def test_run_ideal_skips_measurements():
    c = Circuit(2, (h(0), cx(0, 1), measure(0, 0), measure(1, 1)))
    got = run_ideal(c)
    assert np.allclose(got, unitary_of(c.without_measurements())[:, 0])


def test_align_global_phase():
    rng = np.random.default_rng(13)
    for _ in range(30):
        ref = rng.normal(size=4) + 1j * rng.normal(size=4)
        ref /= np.linalg.norm(ref)
        rotated = ref * np.exp(1j * rng.uniform(0, 2 * np.pi))
        back = align_global_phase(rotated, ref)
        assert np.allclose(back, ref, atol=1e-12)
    # zero overlap leaves the state alone
    a = np.array([1.0, 0.0], dtype=complex)
    b = np.array([0.0, 1.0], dtype=complex)
    assert np.allclose(align_global_phase(b, a), b)


class TestBornProbabilities:
    def test_bell_pair(self):
        c = measured(Circuit(2, (h(0), cx(0, 1))))
        p = born_probabilities(c)
        assert np.allclose(p, [0.5, 0, 0, 0.5], atol=1e-12)

    def test_cbit_order_is_key_order(self):
        # qubit 1 goes to cbit 0, so key bit 0 reads qubit 1
        c = Circuit(2, (x(0), measure(1, 0), measure(0, 1)))
        p = born_probabilities(c)
        assert p[int("01", 2)] == pytest.approx(1.0)

    def test_partial_measurement_marginalizes(self):
        c = Circuit(2, (h(0), cx(0, 1), measure(0, 0)))
        p = born_probabilities(c)
        assert np.allclose(p, [0.5, 0.5], atol=1e-12)

    def test_requires_contiguous_cbits(self):
        with pytest.raises(ValueError):
            born_probabilities(Circuit(2, (measure(0, 1),)))
        with pytest.raises(ValueError):
            born_probabilities(Circuit(2, (h(0),)))


class TestApplyReadout:
    def test_single_bit(self):
        lam = 0.07
        out = apply_readout(np.array([1.0, 0.0]), [lam])
        assert np.allclose(out, [1 - lam, lam])

    def test_four_bit_diagonal_weight(self):
        lam = 0.02
        probs = np.zeros(16)
        probs[0] = 1.0
        out = apply_readout(probs, [lam] * 4)
        assert out[0] == pytest.approx((1 - lam) ** 4)
        assert out[-1] == pytest.approx(lam ** 4)
        assert out.sum() == pytest.approx(1.0)

    def test_zero_rate_is_identity(self):
        p = np.linspace(0.0, 1.0, 8)
        p /= p.sum()
        assert np.allclose(apply_readout(p, [0.0] * 3), p)

    def test_rate_count_mismatch(self):
        with pytest.raises(ValueError):
            apply_readout(np.ones(4) / 4, [0.1])

    def test_per_bit_rates(self):
        out = apply_readout(np.array([1.0, 0.0, 0.0, 0.0]), [0.5 - 1e-9, 0.0])
        assert out[int("00", 2)] == pytest.approx(0.5)
        assert out[int("10", 2)] == pytest.approx(0.5)


class TestNoiseModel:
    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseModel(readout=0.5)
        with pytest.raises(ValueError):
            NoiseModel(readout=-0.1)
        with pytest.raises(ValueError):
            NoiseModel(sq_depol=1.0)
        with pytest.raises(ValueError):
            NoiseModel(cx_depol=-0.5)
        with pytest.raises(ValueError):
            NoiseModel(readout=(0.1, 0.6))

    def test_per_qubit_readout(self):
        nm = NoiseModel(readout=(0.01, 0.02, 0.03))
        assert nm.readout_rate(1) == 0.02
        with pytest.raises(ValueError):
            nm.readout_rate(3)
        assert NoiseModel(readout=0.05).readout_rate(17) == 0.05

    def test_is_noiseless(self):
        assert NoiseModel().is_noiseless
        assert NoiseModel(readout=(0.0, 0.0)).is_noiseless
        assert not NoiseModel(readout=0.01).is_noiseless
        assert not NoiseModel(cx_depol=0.001).is_noiseless


class TestCountsHistogram:
    def test_key_validation(self):
        with pytest.raises(ValueError):
            CountsHistogram({"012": 1}, shots=1, n_bits=3)
        with pytest.raises(ValueError):
            CountsHistogram({"01": 1}, shots=1, n_bits=3)

    def test_vector_round_trip(self):
        hist = CountsHistogram({"00": 3, "11": 5}, shots=8, n_bits=2)
        vec = hist.to_vector()
        assert np.allclose(vec, [3, 0, 0, 5])
        back = CountsHistogram.from_vector(vec, shots=8, n_bits=2)
        assert back.entries == hist.entries
        assert isinstance(back.entries["00"], int)

    def test_from_vector_keeps_fractions(self):
        back = CountsHistogram.from_vector(np.array([0.25, 0.75]), shots=1, n_bits=1)
        assert back.entries == {"0": 0.25, "1": 0.75}
        assert isinstance(back.entries["0"], float)

    def test_json_round_trip(self):
        hist = CountsHistogram({"10": 2, "01": 7}, shots=9, n_bits=2)
        again = CountsHistogram.from_json(hist.to_json())
        assert again.entries == hist.entries
        assert again.shots == 9 and again.n_bits == 2
        assert '"counts"' in hist.to_json() and '"shots"' in hist.to_json()

    def test_lookup_and_total(self):
        hist = CountsHistogram({"1": 4}, shots=4, n_bits=1)
        assert hist["1"] == 4 and hist["0"] == 0
        assert hist.total() == 4.0


class TestRunNoisy:
    def test_requires_shots_and_measures(self):
        c = measured(Circuit(1, (h(0),)))
        with pytest.raises(ValueError):
            run_noisy(c, 0)
        with pytest.raises(ValueError):
            run_noisy(Circuit(1, (h(0),)), 10)

    def test_seed_reproducibility(self):
        c = measured(Circuit(2, (h(0), cx(0, 1))))
        nm = NoiseModel(readout=0.03, sq_depol=0.01, cx_depol=0.05)
        a = run_noisy(c, 500, nm, seed=9)
        b = run_noisy(c, 500, nm, seed=9)
        assert a.entries == b.entries
        assert run_noisy(c, 500, nm, seed=10).entries != a.entries

    def test_model_seed_is_fallback(self):
        c = measured(Circuit(1, (h(0),)))
        nm = NoiseModel(readout=0.1, seed=21)
        assert run_noisy(c, 200, nm).entries == run_noisy(c, 200, nm, seed=21).entries

    def test_noiseless_matches_born_statistics(self):
        c = measured(Circuit(2, (h(0), cx(0, 1))))
        shots = 100_000
        hist = run_noisy(c, shots, seed=3)
        assert hist.total() == shots
        assert set(hist.entries) <= {"00", "11"}
        freq = hist["00"] / shots
        sigma = (0.25 / shots) ** 0.5
        assert abs(freq - 0.5) <= 4 * sigma

    def test_irrelevant_depol_changes_nothing(self):
        # cx error rate on a cx-free circuit must not even perturb the rng
        c = measured(Circuit(1, (h(0),)))
        plain = run_noisy(c, 300, seed=5)
        with_cx_rate = run_noisy(c, 300, NoiseModel(cx_depol=0.3), seed=5)
        assert plain.entries == with_cx_rate.entries

    def test_readout_only_diagonal(self):
        lam = 0.05
        c = measured(ground_state_prep())
        shots = 40_000
        hist = run_noisy(c, shots, NoiseModel(readout=lam), seed=8)
        want = (1 - lam) ** 4
        freq = hist["0101"] / shots
        sigma = (want * (1 - want) / shots) ** 0.5
        assert abs(freq - want) <= 4 * sigma

    def test_readout_matches_exact_transform(self):
        lam = 0.11
        c = measured(Circuit(2, (h(0),)))
        shots = 200_000
        hist = run_noisy(c, shots, NoiseModel(readout=lam), seed=4)
        want = apply_readout(born_probabilities(c), [lam, lam])
        got = hist.to_vector() / shots
        assert np.abs(got - want).max() <= 4 * (0.25 / shots) ** 0.5

    def test_depolarizing_leaks_out_of_the_subspace(self):
        c = measured(build_evolution_circuit(0.1, prepend_ground_prep=True))
        hist = run_noisy(c, 5_000, NoiseModel(cx_depol=0.05), seed=14)
        leaked = sum(w for key, w in hist.entries.items()
                     if key not in PHYSICAL_BITSTRINGS)
        assert leaked > 0
        assert hist.total() == 5_000

    def test_depol_rate_one_half_mixes_single_qubit(self):
        c = measured(Circuit(1, (x(0),)))
        shots = 50_000
        hist = run_noisy(c, shots, NoiseModel(sq_depol=0.75), seed=2)
        # error fires 75% of the time; only the Z draw leaves |1> in place
        want = 0.25 + 0.75 / 3
        freq = hist["1"] / shots
        sigma = (want * (1 - want) / shots) ** 0.5
        assert abs(freq - want) <= 4 * sigma
