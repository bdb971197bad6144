import math

import numpy as np
import pytest

from qcbench.pauli import PauliString, PauliSum, expectation
from qcbench.simulator import (
    Circuit,
    EnergyEstimate,
    NoiseModel,
    Param,
    basis_state,
    estimate_energy,
    gate_matrix,
    measurement_groups,
    run,
    run_noisy,
    sample_counts,
    term_mean_from_counts,
    xx_matrix,
)


def test_all_gate_matrices_are_unitary():
    cases = [
        ("X", ()), ("H", ()), ("RX", (0.3,)), ("RY", (-1.2,)), ("RZ", (2.5,)),
        ("U3", (0.4, 1.1, -0.7)), ("CNOT", ()), ("CNOTDG", ()), ("CZ", ()),
        ("XX", (0.9,)), ("ASWAP", (0.6, -2.0)),
    ]
    for kind, params in cases:
        m = gate_matrix(kind, params)
        np.testing.assert_allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=1e-12)


def test_qubit_zero_is_most_significant():
    c = Circuit(2).add("X", 0)
    psi = run(c)
    np.testing.assert_allclose(psi, basis_state("10"), atol=1e-15)


def test_bell_pair():
    c = Circuit(2).add("H", 0).add("CNOT", (0, 1))
    psi = run(c)
    expected = np.zeros(4, dtype=complex)
    expected[0] = expected[3] = 1 / math.sqrt(2)
    np.testing.assert_allclose(psi, expected, atol=1e-15)


def test_xx_exponent_convention():
    chi = 0.37
    from scipy.linalg import expm

    xkronx = np.kron([[0, 1], [1, 0]], [[0, 1], [1, 0]])
    np.testing.assert_allclose(xx_matrix(chi), expm(-1j * chi * xkronx), atol=1e-12)


def test_cnot_dagger_same_unitary_distinct_kind():
    np.testing.assert_allclose(gate_matrix("CNOT", ()), gate_matrix("CNOTDG", ()))
    c = Circuit(2).add("CNOTDG", (0, 1))
    assert c.gates[0].kind == "CNOTDG"


def test_parameter_binding_by_sequence_and_dict():
    c = Circuit(1).add("RY", 0, Param("a")).add("RZ", 0, Param("a", -1.0, 0.5))
    assert c.parameters == ["a"]
    assert not c.is_bound
    b1 = c.bind([0.3])
    b2 = c.bind({"a": 0.3})
    assert b1.gates[1].params[0] == pytest.approx(-0.3 + 0.5)
    np.testing.assert_allclose(run(b1), run(b2))
    with pytest.raises(ValueError):
        run(c)


def test_stateprep_first_gate_only():
    vec = np.array([0.0, 1.0])
    c = Circuit(2)
    c.add("STATEPREP", (1,), vector=vec)
    psi = run(c)
    np.testing.assert_allclose(psi, basis_state("01"), atol=1e-15)
    with pytest.raises(ValueError):
        c.add("STATEPREP", (0,), vector=vec)
    with pytest.raises(ValueError):
        run(c, initial="00")


def test_exact_estimate_matches_dense_oracle():
    for seed in range(8):
        rng = np.random.default_rng(400 + seed)
        c = Circuit(3)
        for _ in range(6):
            kind = rng.choice(["RY", "RZ", "RX"])
            c.add(str(kind), int(rng.integers(3)), float(rng.normal()))
            q = rng.permutation(3)[:2]
            c.add("CNOT", (int(q[0]), int(q[1])))
        pairs = [
            ("".join(rng.choice(list("IXYZ"), size=3)), float(rng.normal()))
            for _ in range(6)
        ]
        h = PauliSum.from_terms(pairs, n_qubits=3)
        est = estimate_energy(c, h)
        assert est.shots == "exact"
        assert est.stderr == 0.0
        assert est.mean == pytest.approx(expectation(run(c), h), abs=1e-12)


def test_measurement_grouping_is_qubitwise_commuting():
    h = PauliSum.from_terms([("XX", 0.5), ("XI", 0.25), ("IZ", -1.0), ("II", 3.0)])
    groups = measurement_groups(h)
    assert len(groups) == 2  # {XX, XI} share basis XX; IZ needs Z on qubit 1
    for g in groups:
        for letters, _ in g.terms:
            for bq, tq in zip(g.basis, letters):
                assert tq == "I" or tq == bq


def test_term_mean_parity():
    counts = {"00": 30, "11": 50, "01": 20}
    assert term_mean_from_counts(counts, "ZZ") == pytest.approx((30 + 50 - 20) / 100)
    assert term_mean_from_counts(counts, "IZ") == pytest.approx((30 - 50 - 20) / 100)


def test_shot_estimate_on_bell_state():
    # ZZ and XX are both +1 on the Bell pair, so the estimate is exact even
    # with finite shots; the constant passes through untouched.
    c = Circuit(2).add("H", 0).add("CNOT", (0, 1))
    h = PauliSum.from_terms([("ZZ", 0.5), ("XX", 0.5), ("II", 1.0)])
    est = estimate_energy(c, h, shots=256, rng=7)
    assert est.mean == pytest.approx(2.0)
    assert est.shots == 256


def test_shot_estimate_statistics():
    c = Circuit(2).add("RY", 0, 0.8).add("CNOT", (0, 1))
    h = PauliSum.from_terms([("ZI", 0.7), ("XX", -0.4), ("ZZ", 0.2)])
    exact = expectation(run(c), h)
    pulls = []
    for seed in range(30):
        est = estimate_energy(c, h, shots=2048, rng=seed)
        assert est.stderr > 0.0
        pulls.append((est.mean - exact) / est.stderr)
    # means should scatter like unit-variance pulls, nothing systematic
    assert abs(np.mean(pulls)) < 1.0
    assert np.max(np.abs(pulls)) < 5.0


def test_stderr_shrinks_with_shots():
    c = Circuit(2).add("RY", 0, 0.8)
    h = PauliSum.from_terms([("ZI", 1.0)])
    lo = estimate_energy(c, h, shots=512, rng=1).stderr
    hi = estimate_energy(c, h, shots=8192, rng=1).stderr
    assert hi < lo / 2.5


def test_sample_counts_deterministic_for_seed():
    c = Circuit(3).add("H", 0).add("CNOT", (0, 1)).add("RY", 2, 0.3)
    a = sample_counts(c, 500, rng=42)
    b = sample_counts(c, 500, rng=42)
    assert a == b
    assert sum(a.values()) == 500


def test_readout_flips_rate():
    c = Circuit(4)
    c.add("X", 0)  # true state |1000>
    noise = NoiseModel(p10=0.1, p01=0.2)
    counts = sample_counts(c, 20000, noise=noise, rng=3)
    ones = np.zeros(4)
    for label, cnt in counts.items():
        ones += cnt * np.array([int(b) for b in label])
    rate = ones / 20000
    assert rate[0] == pytest.approx(0.8, abs=0.02)  # p(0|1) = 0.2 flips it down
    for q in (1, 2, 3):
        assert rate[q] == pytest.approx(0.1, abs=0.02)


def test_over_rotation_scales_xx_angle():
    chi = math.pi / 4
    c = Circuit(2).add("H", 0).add("XX", (0, 1), chi)
    noise = NoiseModel(over_rotation_bias=0.05)
    noisy = run_noisy(c, noise, rng=0)
    manual = run(Circuit(2).add("H", 0).add("XX", (0, 1), chi * 1.05))
    np.testing.assert_allclose(noisy, manual, atol=1e-12)


def test_stochastic_over_rotation_reproducible():
    c = Circuit(2).add("XX", (0, 1), 0.7)
    noise = NoiseModel(over_rotation_sigma=0.1)
    a = run_noisy(c, noise, rng=11)
    b = run_noisy(c, noise, rng=11)
    other = run_noisy(c, noise, rng=12)
    np.testing.assert_allclose(a, b)
    assert np.max(np.abs(a - other)) > 1e-6


def test_per_gate_refresh_draws_independently():
    c = Circuit(2).add("XX", (0, 1), 0.5).add("XX", (0, 1), -0.5)
    shared = NoiseModel(over_rotation_sigma=0.2, error_refresh="per_evaluation")
    fresh = NoiseModel(over_rotation_sigma=0.2, error_refresh="per_gate")
    # with one shared draw the two equal-and-opposite angles cancel exactly
    np.testing.assert_allclose(run_noisy(c, shared, rng=5), basis_state("00"), atol=1e-12)
    assert abs(run_noisy(c, fresh, rng=5)[0]) < 1.0 - 1e-6


def test_depolarizing_perturbs_sampling():
    c = Circuit(2).add("CNOT", (0, 1))
    noise = NoiseModel(depolarizing=1.0)
    counts = sample_counts(c, 200, noise=noise, rng=9)
    assert sum(counts.values()) == 200
    assert set(counts) != {"00"}  # every shot got kicked by a random Pauli


def test_circuit_text_dump():
    c = Circuit(3).add("RY", 1, 0.5).add("CNOT", (2, 0)).add("XX", (0, 1), math.pi / 4)
    lines = c.to_text().splitlines()
    assert lines[0] == "RY q1 0.5"
    assert lines[1] == "CNOT q2,q0"
    assert lines[2].startswith("XX q0,q1 0.7853981633")
    sym = Circuit(1).add("RY", 0, Param("t1", -1.0, -math.pi / 2))
    assert "t1" in sym.to_text()


def test_estimate_energy_returns_type():
    c = Circuit(1).add("H", 0)
    est = estimate_energy(c, PauliSum.from_terms([("X", 1.0)]))
    assert isinstance(est, EnergyEstimate)
    assert est.mean == pytest.approx(1.0)
