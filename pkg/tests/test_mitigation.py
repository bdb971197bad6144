import math

import numpy as np
import pytest

from qcbench.ansatz import TRIPLET_PARAMS, compile_ion_trap, spc
from qcbench.hamiltonian import SymmetrySector, random_molecular_hamiltonian
from qcbench.mitigation import (
    ConfusionMatrix,
    calibrate_readout,
    fold_entanglers,
    hidden_inverse_benchmark,
    mitigate_counts,
    mitigated_energy,
    richardson,
)
from qcbench.pauli import PauliSum, expectation
from qcbench.simulator import Circuit, NoiseModel, estimate_energy, run


def test_confusion_matrix_from_known_noise():
    noise = NoiseModel(p10=0.02, p01=0.05)
    cm = ConfusionMatrix.from_noise(noise, 2)
    np.testing.assert_allclose(cm.matrices[0], [[0.98, 0.05], [0.02, 0.95]])
    assert cm.invertible
    assert cm.joint().shape == (4, 4)
    np.testing.assert_allclose(cm.joint().sum(axis=0), np.ones(4))


def test_degenerate_confusion_is_flagged():
    cm = ConfusionMatrix.from_noise(NoiseModel(p10=0.5, p01=0.5), 1)
    assert not cm.invertible
    with pytest.raises(ValueError):
        mitigate_counts({"0": 50, "1": 50}, cm)


def test_calibration_recovers_flip_rates():
    noise = NoiseModel(p10=0.02, p01=0.07)
    cm = calibrate_readout(noise, 4, shots=100_000, rng=5)
    sigma = math.sqrt(0.07 * 0.93 / 100_000)
    for q in range(4):
        assert cm.matrices[q][1, 0] == pytest.approx(0.02, abs=5 * sigma)
        assert cm.matrices[q][0, 1] == pytest.approx(0.07, abs=5 * sigma)


def test_mitigation_inverts_the_channel_exactly():
    # push an arbitrary distribution through the joint channel analytically,
    # then undo it; this isolates the inversion from sampling noise
    rng = np.random.default_rng(8)
    p_true = rng.random(8)
    p_true /= p_true.sum()
    cm = ConfusionMatrix.from_noise(NoiseModel(p10=0.04, p01=0.09), 3)
    corrupted = cm.joint() @ p_true
    counts = {format(i, "03b"): float(1e6 * v) for i, v in enumerate(corrupted)}
    quasi = mitigate_counts(counts, cm)
    recovered = np.array([quasi.get(format(i, "03b"), 0.0) for i in range(8)])
    np.testing.assert_allclose(recovered, p_true, atol=1e-9)
    assert sum(quasi.values()) == pytest.approx(1.0, abs=1e-9)


def test_mitigated_energy_removes_readout_bias():
    circuit = Circuit(2).add("RY", 0, 0.9).add("CNOT", (0, 1))
    h = PauliSum.from_terms([("ZI", 0.6), ("IZ", 0.4), ("ZZ", 0.3)])
    exact = expectation(run(circuit), h)
    noise = NoiseModel(p10=0.05, p01=0.05)
    cm = ConfusionMatrix.from_noise(noise, 2)
    raw_bias = []
    mitigated_bias = []
    for seed in range(10):
        raw = estimate_energy(circuit, h, shots=20_000, noise=noise, rng=seed)
        fix = mitigated_energy(circuit, h, 20_000, noise, cm, rng=seed)
        raw_bias.append(raw.mean - exact)
        mitigated_bias.append(fix.mean - exact)
        assert fix.stderr >= raw.stderr  # inversion inflates variance
    assert abs(np.mean(raw_bias)) > 5 * abs(np.mean(mitigated_bias)) or (
        abs(np.mean(mitigated_bias)) < 2e-3
    )


def test_fold_entanglers_parity():
    c = Circuit(2).add("RY", 0, 0.4).add("CNOT", (0, 1))
    folded = fold_entanglers(c, 3)
    assert sum(1 for g in folded.gates if g.kind == "CNOT") == 3
    fidelity = abs(np.vdot(run(c), run(folded))) ** 2
    assert fidelity >= 1.0 - 1e-12
    with pytest.raises(ValueError):
        fold_entanglers(c, 2)


def test_richardson_weights_and_linear_annihilation():
    two = richardson([1.0, 3.0], [0.0, 0.0])
    np.testing.assert_allclose(two.weights, [1.5, -0.5])
    three = richardson([1.0, 3.0, 5.0], [0.0, 0.0, 0.0])
    np.testing.assert_allclose(three.weights, [15 / 8, -5 / 4, 3 / 8])

    truth, slope = -1.23, 0.17
    noisy = [truth + slope * s for s in (1.0, 3.0)]
    res = richardson([1.0, 3.0], noisy)
    assert res.value == pytest.approx(truth, abs=1e-10)
    assert res.residual < 1e-10

    quad = [truth + slope * s + 0.05 * s * s for s in (1.0, 3.0, 5.0)]
    res3 = richardson([1.0, 3.0, 5.0], quad)
    assert res3.value == pytest.approx(truth, abs=1e-10)


def test_richardson_stderr_propagation():
    res = richardson([1.0, 3.0], [0.5, 0.7], stderrs=[0.01, 0.02])
    expected = math.sqrt((1.5 * 0.01) ** 2 + (0.5 * 0.02) ** 2)
    assert res.stderr == pytest.approx(expected)


def test_even_power_weights():
    res = richardson([1.0, 3.0], [0.0, 0.0], powers=(2,))
    assert np.allclose(res.weights, [9.0 / 8.0, -1.0 / 8.0])
    with pytest.raises(ValueError):
        richardson([1.0, 3.0], [0.0, 0.0], powers=(0,))


def test_extrapolation_beats_raw_noisy_energy():
    h = random_molecular_hamiltonian(0)
    logical = spc(SymmetrySector(2, 0.0)).bind(TRIPLET_PARAMS)
    ideal = estimate_energy(compile_ion_trap(logical), h.terms).mean
    noise = NoiseModel(over_rotation_bias=0.02)
    energies = []
    for scale in (1, 3):
        folded = compile_ion_trap(fold_entanglers(logical, scale))
        energies.append(estimate_energy(folded, h.terms, "exact", noise, rng=0).mean)
    # the over-rotation error curve is even in the noise angle, so the
    # extrapolation targets the quadratic term
    res = richardson([1.0, 3.0], energies, powers=(2,))
    assert abs(res.value - ideal) <= abs(energies[0] - ideal) / 5.0


def test_hidden_inverse_smoke():
    h = random_molecular_hamiltonian(6)
    rows = hidden_inverse_benchmark(
        h, epsilons=[0.08], trials=3, seed=1, max_evaluations=60,
    )
    by_variant = {r["variant"]: r for r in rows}
    assert set(by_variant) == {"native", "hidden-inverse"}
    assert by_variant["native"]["trials"] == 3
    assert (
        by_variant["hidden-inverse"]["mean_abs_error"]
        <= by_variant["native"]["mean_abs_error"]
    )
