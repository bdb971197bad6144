import numpy as np
import pytest

from qcbench.pauli import (
    PauliString,
    PauliSum,
    decompose_hermitian,
    dense_matrix,
    expectation,
    mixed_expectation,
    pauli_product,
)


def random_state(rng, n):
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return psi / np.linalg.norm(psi)


def test_xi_matrix_puts_x_on_qubit_zero():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    expected = np.kron(x, np.eye(2))
    np.testing.assert_allclose(dense_matrix(PauliString("XI")), expected)


def test_product_table_matches_dense_products():
    for a in "IXYZ":
        for b in "IXYZ":
            pa, pb = PauliString(a), PauliString(b)
            prod, phase = pauli_product(pa, pb)
            np.testing.assert_allclose(
                pa.dense_matrix() @ pb.dense_matrix(),
                phase * prod.dense_matrix(),
                atol=1e-15,
            )


def test_product_on_words():
    prod, phase = pauli_product(PauliString("XYZI"), PauliString("YYXZ"))
    assert prod.letters == "ZIYZ"
    assert phase == pytest.approx(-1.0)  # X@Y = iZ on qubit 0, Z@X = iY on qubit 2


def test_cz_decomposition():
    cz = np.diag([1.0, 1.0, 1.0, -1.0])
    h = decompose_hermitian(cz)
    assert h.coeff("II") == pytest.approx(0.5)
    assert h.coeff("IZ") == pytest.approx(0.5)
    assert h.coeff("ZI") == pytest.approx(0.5)
    assert h.coeff("ZZ") == pytest.approx(-0.5)
    assert h.n_terms == 4


def test_decompose_roundtrip_random_hermitian():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        dim = 2**n
        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        m = raw + raw.conj().T
        h = decompose_hermitian(m)
        np.testing.assert_allclose(h.dense_matrix(), m, atol=1e-10)


def test_real_symmetric_matrices_have_even_y_terms():
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        raw = rng.normal(size=(8, 8))
        h = decompose_hermitian(raw + raw.T)
        for s in h.strings():
            assert s.y_count % 2 == 0


def test_decompose_rejects_non_hermitian():
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        decompose_hermitian(m)


def test_decompose_rejects_bad_dimension():
    with pytest.raises(ValueError):
        decompose_hermitian(np.eye(3))


def test_expectation_matches_dense_oracle():
    for seed in range(10):
        rng = np.random.default_rng(200 + seed)
        n = int(rng.integers(1, 4))
        pairs = [
            ("".join(rng.choice(list("IXYZ"), size=n)), float(rng.normal()))
            for _ in range(5)
        ]
        h = PauliSum.from_terms(pairs, n_qubits=n)
        psi = random_state(rng, n)
        expected = np.vdot(psi, h.dense_matrix() @ psi).real
        assert expectation(psi, h) == pytest.approx(expected, abs=1e-12)


def test_expectation_rejects_unnormalised_state():
    with pytest.raises(ValueError):
        expectation(np.array([1.0, 1.0]), PauliString("Z"))


def test_mixed_expectation_phase_convention():
    # X @ Y = iZ, so on |0> the mixed moment is +i exactly.
    ket0 = np.array([1.0, 0.0])
    assert mixed_expectation(ket0, PauliString("X"), PauliString("Y")) == pytest.approx(1j)
    assert mixed_expectation(ket0, PauliString("Y"), PauliString("X")) == pytest.approx(-1j)


def test_mixed_expectation_matches_dense_oracle():
    for seed in range(10):
        rng = np.random.default_rng(300 + seed)
        n = 3
        a = PauliString("".join(rng.choice(list("IXYZ"), size=n)))
        pairs = [
            ("".join(rng.choice(list("IXYZ"), size=n)), float(rng.normal()))
            for _ in range(4)
        ]
        b = PauliSum.from_terms(pairs, n_qubits=n)
        psi = random_state(rng, n)
        expected = np.vdot(psi, a.dense_matrix() @ b.dense_matrix() @ psi)
        got = mixed_expectation(psi, a, b)
        assert got == pytest.approx(expected, abs=1e-12)


def test_sum_arithmetic_and_pruning():
    a = PauliSum.from_terms([("XI", 1.0), ("ZZ", 0.5)])
    b = PauliSum.from_terms([("XI", -1.0), ("IY", 2.0)])
    c = a + b
    assert c.coeff("XI") == 0.0
    assert c.n_terms == 2
    assert (2.0 * c).coeff("IY") == pytest.approx(4.0)
    assert (-c).coeff("ZZ") == pytest.approx(-0.5)
    assert c.shifted(3.0).coeff("II") == pytest.approx(3.0)


def test_text_roundtrip():
    h = PauliSum.from_terms([("XZ", 0.25), ("YY", -1.5), ("II", 0.125)])
    again = PauliSum.from_lines(h.to_lines())
    assert again == h


def test_malformed_term_line_raises():
    with pytest.raises(ValueError):
        PauliSum.from_lines(["0.5 XQ"])
    with pytest.raises(ValueError):
        PauliSum.from_lines(["notanumber XX"])


def test_scalar_register():
    one = PauliSum.identity(0, 2.5)
    np.testing.assert_allclose(one.dense_matrix(), [[2.5]])
    assert expectation(np.array([1.0]), one) == pytest.approx(2.5)
