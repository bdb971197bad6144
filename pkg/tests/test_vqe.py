import numpy as np
import pytest

from qcbench.hamiltonian import (
    SymmetrySector,
    extract_block,
    random_molecular_hamiltonian,
    triplet_state,
)
from qcbench.pauli import expectation
from qcbench.results import RESULTS_COLUMNS, STATE_KEYS
from qcbench.simulator import NoiseModel
from qcbench.vqe import (
    EstimatorConfig,
    OptimizerConfig,
    TargetSpec,
    exact_reference,
    scan_dissociation,
    sector_extremum,
    spectral_range_bound,
    third_singlet,
    triplet_energy,
)

SECTOR_OF_KEY = {
    "g": SymmetrySector(2, 0.0),
    "1": SymmetrySector(1, 0.5),
    "3": SymmetrySector(3, 0.5),
}


def middle_singlet(h):
    """Oracle for the deflated search: the non-extremal non-triplet level."""
    block = extract_block(h, SymmetrySector(2, 0.0))
    evals, evecs = block.eigensystem()
    t = triplet_state()
    singlets = [
        evals[i]
        for i in range(4)
        if abs(np.vdot(t, block.lift(evecs[:, i]))) ** 2 < 0.5
    ]
    assert len(singlets) == 3
    return sorted(singlets)[1]


def test_exact_extrema_match_diagonalization():
    for seed in range(4):
        h = random_molecular_hamiltonian(seed, triplet_split=True)
        for name, key in (("spc-ne2", "g"), ("spc-ne1", "1"), ("spc-ne3", "3")):
            evals = extract_block(h, SECTOR_OF_KEY[key]).eigenvalues()
            lo = sector_extremum(h, name, "min", seed=seed)
            hi = sector_extremum(h, name, "max", seed=seed)
            assert abs(lo.energy - evals[0]) < 1e-6
            assert abs(hi.energy - evals[-1]) < 1e-6
            assert lo.converged and hi.converged


def test_triplet_energy_is_expectation():
    h = random_molecular_hamiltonian(3, triplet_split=True)
    got = triplet_energy(h)
    assert got.parameters == ()
    assert abs(got.energy - expectation(triplet_state(), h.terms)) < 1e-9


def test_third_singlet_deflation():
    for seed in (0, 5, 9):
        h = random_molecular_hamiltonian(seed, triplet_split=True)
        ground = sector_extremum(h, "spc-ne2", "min", seed=seed)
        got = third_singlet(h, ground.parameters, seed=seed)
        assert abs(got.energy - middle_singlet(h)) < 1e-5


def test_third_singlet_zero_weight_collapses_to_ground():
    h = random_molecular_hamiltonian(2, triplet_split=True)
    ground = sector_extremum(h, "spc-ne2", "min", seed=2)
    got = third_singlet(h, ground.parameters, penalty_weight=0.0, seed=2)
    assert abs(got.energy - ground.energy) < 1e-8


def test_penalized_target_needs_exact_estimator():
    h = random_molecular_hamiltonian(0, triplet_split=True)
    shots = EstimatorConfig(estimator="shots", shots=256)
    with pytest.raises(ValueError):
        third_singlet(h, (0.1, 0.2, 0.3), estimator=shots)


def test_target_spec_validation():
    with pytest.raises(ValueError):
        TargetSpec("supremize")
    with pytest.raises(ValueError):
        TargetSpec("orthogonality_penalized")
    with pytest.raises(ValueError):
        TargetSpec("orthogonality_penalized", (triplet_state(),), -1.0)


def test_estimator_config_validation():
    with pytest.raises(ValueError):
        EstimatorConfig(estimator="exact", mitigation="readout")
    with pytest.raises(ValueError):
        EstimatorConfig(estimator="shots", richardson_scales=(1, 2))
    with pytest.raises(ValueError):
        EstimatorConfig(estimator="shots", richardson_powers=(1, 2))


def test_spectral_range_bound_brackets_range():
    for seed in range(6):
        h = random_molecular_hamiltonian(seed)
        evals = np.linalg.eigvalsh(h.terms.dense_matrix())
        true_range = float(evals[-1] - evals[0])
        bound = spectral_range_bound(h)
        assert true_range <= bound <= 2.0 * true_range + 1e-9


def test_exact_scan_matches_reference_columns():
    h = random_molecular_hamiltonian(
        11, triplet_split=True, scale=0.04, molecule="LiH", bond_distance=1.5
    )
    rows = scan_dissociation([h], seed=0)
    assert len(rows) == 1
    row = rows[0]
    assert set(row) == set(RESULTS_COLUMNS)
    assert row["molecule"] == "LiH"
    assert row["distance"] == 1.5
    for key in STATE_KEYS:
        assert abs(row[f"energy_{key}"] - row[f"exact_{key}"]) < 1e-6
        assert row[f"stderr_{key}"] == 0.0


def test_exact_reference_orders_extrema():
    h = random_molecular_hamiltonian(7, triplet_split=True)
    ref = exact_reference(h)
    for key in ("g", "1", "3"):
        assert ref[key] < ref[f"{key}_max"]
    assert ref["g"] < ref["2"] < ref["g_max"]


def test_scan_parallel_matches_serial():
    h = random_molecular_hamiltonian(
        4, triplet_split=True, scale=0.04, molecule="NaH", bond_distance=1.0
    )
    serial = scan_dissociation([h], seed=3)
    parallel = scan_dissociation([h], seed=3, jobs=2)
    assert serial == parallel


def test_shot_mode_cell_is_deterministic_and_close():
    h = random_molecular_hamiltonian(
        11, triplet_split=True, scale=0.04, molecule="LiH", bond_distance=1.5
    )
    noise = NoiseModel(p10=0.02, p01=0.02, over_rotation_bias=0.01)
    est = EstimatorConfig(
        estimator="shots", shots=8192, noise=noise,
        mitigation="readout+richardson",
    )
    opt = OptimizerConfig(max_evaluations=120, tolerance=1e-4, restarts=1)
    oracle = extract_block(h, SymmetrySector(2, 0.0)).eigenvalues()[0]
    a = sector_extremum(h, "spc-ne2", "min", est, opt, seed=5)
    b = sector_extremum(h, "spc-ne2", "min", est, opt, seed=5)
    assert a.energy == b.energy and a.parameters == b.parameters
    assert a.stderr > 0
    assert abs(a.energy - oracle) < 5e-3
    c = sector_extremum(h, "spc-ne2", "min", est, opt, seed=6)
    assert c.energy != a.energy


def test_mitigation_unbiases_readout_heavy_cell():
    # without readout correction the 2% flip rate shifts the estimate by
    # many standard errors; the corrected pipeline should sit within a few
    h = random_molecular_hamiltonian(
        11, triplet_split=True, scale=0.04, molecule="LiH", bond_distance=1.5
    )
    noise = NoiseModel(p10=0.02, p01=0.02)
    raw = EstimatorConfig(estimator="shots", shots=8192, noise=noise)
    fixed = EstimatorConfig(
        estimator="shots", shots=8192, noise=noise, mitigation="readout"
    )
    raw_err = abs(triplet_energy(h, raw, seed=1).energy - expectation(triplet_state(), h.terms))
    fixed_err = abs(triplet_energy(h, fixed, seed=1).energy - expectation(triplet_state(), h.terms))
    assert fixed_err < raw_err / 2
