"""Imaginary-time stepping and Krylov post-processing.

Each step approximates the normalized action of ``exp(-dtau H)`` by a
unitary ``exp(-i dtau A)``, where the Hermitian generator ``A`` is a real
combination of pool Pauli strings solving a least-squares system built
from state expectations.  The recorded energies feed a small generalized
eigenvalue problem whose overlap and Hamiltonian matrices have closed
forms in the per-step normalization constants.

Shot mode emulates the hardware procedure: the current state is re-prepared
every step through a fixed-shape circuit and all expectations entering the
linear system are sampled, while the state update itself stays classical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigh, expm

from .mitigation import ConfusionMatrix, calibrate_readout, mitigate_counts
from .pauli import PauliString, PauliSum, pauli_product
from .simulator import (
    Circuit,
    NoiseModel,
    basis_rotation_gates,
    basis_state,
    measurement_groups,
    run,
    sample_counts,
    term_mean_from_counts,
)

POOL_NAMES = ("odd_y_full", "full_xyz")

#: Tikhonov strength and Krylov conditioning floor by estimator mode.
DEFAULT_REGULARIZATION = {"exact": 1e-8, "shots": 1e-2}
DEFAULT_CONDITION_FLOOR = {"exact": 1e-8, "shots": 1e-3}


def operator_pool(n_qubits: int, pool: str = "odd_y_full") -> List[PauliString]:
    """Generator candidates for the unitary update.

    ``odd_y_full`` keeps the strings with an odd number of Y letters; their
    dense matrices are purely imaginary, so they are exactly the generators
    that keep real states real, and the only ones with nonzero right-hand
    side for a real Hamiltonian.  ``full_xyz`` is every non-identity string.
    """
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    if pool not in POOL_NAMES:
        raise ValueError(f"pool must be one of {POOL_NAMES}")
    out = []
    for letters in iter_product("IXYZ", repeat=n_qubits):
        word = "".join(letters)
        if set(word) == {"I"}:
            continue
        if pool == "odd_y_full" and word.count("Y") % 2 == 0:
            continue
        out.append(PauliString(word))
    return out


@dataclass(frozen=True)
class QiteConfig:
    delta_tau: float = 0.1
    max_steps: int = 200
    convergence_epsilon: float = 0.001  # stop once |E_s - E_{s-1}| drops below
    pool: str = "odd_y_full"
    regularization: Optional[float] = None  # None: mode default
    estimator: str = "exact"
    shots: int = 8192
    noise: Optional[NoiseModel] = None
    readout_mitigation: bool = False

    def __post_init__(self) -> None:
        if self.delta_tau <= 0:
            raise ValueError("delta_tau must be positive")
        if self.convergence_epsilon < 0:
            # zero disables early stopping and runs out max_steps
            raise ValueError("convergence_epsilon must be non-negative")
        if self.pool not in POOL_NAMES:
            raise ValueError(f"pool must be one of {POOL_NAMES}")
        if self.estimator not in ("exact", "shots"):
            raise ValueError("estimator must be 'exact' or 'shots'")
        if self.max_steps < 1 or self.shots < 1:
            raise ValueError("max_steps and shots must be positive")

    @property
    def solve_regularization(self) -> float:
        if self.regularization is not None:
            return self.regularization
        return DEFAULT_REGULARIZATION[self.estimator]


@dataclass
class QiteStepRecord:
    step: int
    a_coefficients: Tuple[float, ...]
    energy: float
    c_ratio: float  # norm ratio sqrt(1 - 2 dtau E) of the step it follows
    state: np.ndarray


@dataclass
class QiteTrajectory:
    initial_label: str
    initial_energy: float
    records: List[QiteStepRecord]
    converged: bool
    config: QiteConfig

    @property
    def final_energy(self) -> float:
        return self.records[-1].energy if self.records else self.initial_energy

    @property
    def energies(self) -> List[float]:
        """Energy by step index, starting with step 0."""
        return [self.initial_energy] + [r.energy for r in self.records]


# ---------------------------------------------------------------------------
# state preparation for the sampled estimator
# ---------------------------------------------------------------------------

def _u3_angles(w: np.ndarray) -> Tuple[float, float, float]:
    """Angles reproducing the 2x2 unitary ``w`` up to global phase."""
    if abs(w[1, 0]) < 1e-12:
        # diagonal: only the relative phase of the two entries matters
        return 0.0, 0.0, float(np.angle(w[1, 1]) - np.angle(w[0, 0]))
    if abs(w[0, 0]) < 1e-12:
        return math.pi, float(np.angle(w[1, 0])), float(np.angle(-w[0, 1]))
    theta = 2.0 * math.atan2(abs(w[1, 0]), abs(w[0, 0]))
    ref = np.angle(w[0, 0])
    phi = float(np.angle(w[1, 0]) - ref)
    lam = float(np.angle(-w[0, 1]) - ref)
    return theta, phi, lam


def fixed_shape_2q_prep(target: Sequence[complex]) -> Circuit:
    """Fixed-skeleton circuit preparing a two-qubit state from |00>.

    The skeleton is a single-qubit layer, one CNOT, and a closing
    single-qubit layer.  Real targets come out as three RY angles through
    the Schmidt decomposition; complex targets use the full angle set.
    """
    psi = np.asarray(target, dtype=complex)
    if psi.shape != (4,) or abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("target must be a normalized 2-qubit state")
    is_real = bool(np.max(np.abs(psi.imag)) < 1e-12)
    m = psi.reshape(2, 2)
    u, s, vt = np.linalg.svd(m)
    # the second-qubit factors are the rows of vt, not their conjugates:
    # psi = sum_k s_k u[:, k] (x) vt[k, :]
    v = vt.T
    circuit = Circuit(2, name="fixed-shape-prep")
    if is_real:
        u, v, s = u.real.copy(), v.real.copy(), s.copy()
        if np.linalg.det(u) < 0:
            u[:, 1] *= -1.0
            s[1] *= -1.0
        if np.linalg.det(v) < 0:
            v[:, 1] *= -1.0
            s[1] *= -1.0
        circuit.add("RY", 0, 2.0 * math.atan2(s[1], s[0]))
        circuit.add("CNOT", (0, 1))
        circuit.add("RY", 0, 2.0 * math.atan2(u[1, 0], u[0, 0]))
        circuit.add("RY", 1, 2.0 * math.atan2(v[1, 0], v[0, 0]))
    else:
        circuit.add("RY", 0, 2.0 * math.atan2(s[1], s[0]))
        circuit.add("CNOT", (0, 1))
        circuit.add("U3", 0, *_u3_angles(u))
        circuit.add("U3", 1, *_u3_angles(v))
    got = run(circuit)
    fidelity = abs(np.vdot(psi, got)) ** 2
    if fidelity < 1.0 - 1e-8:
        raise RuntimeError(f"state fit failure: fidelity {fidelity:.12f}")
    return circuit


def _prep_circuit(state: np.ndarray) -> Circuit:
    if state.shape == (2,):
        circuit = Circuit(1, name="prep")
        theta = 2.0 * math.atan2(abs(state[1]), abs(state[0]))
        phi = float(np.angle(state[1]) - np.angle(state[0])) if abs(state[1]) > 1e-12 else 0.0
        circuit.add("U3", 0, theta, phi, 0.0)
        return circuit
    if state.shape == (4,):
        return fixed_shape_2q_prep(state)
    raise ValueError("sampled estimation supports 1- and 2-qubit states only")


# ---------------------------------------------------------------------------
# expectation backends
# ---------------------------------------------------------------------------

def _means_exact(state: np.ndarray, words: Sequence[str]) -> Dict[str, float]:
    out = {}
    for word in words:
        m = PauliString(word).dense_matrix()
        out[word] = float(np.real(np.vdot(state, m @ state)))
    return out


def _means_sampled(
    state: np.ndarray,
    words: Sequence[str],
    cfg: QiteConfig,
    rng: np.random.Generator,
    confusion: Optional[ConfusionMatrix],
) -> Dict[str, float]:
    base = _prep_circuit(state)
    unit = PauliSum.from_terms([(w, 1.0) for w in words], base.n_qubits)
    out: Dict[str, float] = {}
    for group in measurement_groups(unit):
        rotated = base.copy()
        for kind, q, params in basis_rotation_gates(group.basis):
            rotated.add(kind, q, *params)
        counts = sample_counts(rotated, cfg.shots, cfg.noise or NoiseModel(), rng)
        if confusion is not None:
            counts = mitigate_counts(counts, confusion)
        for letters, _ in group.terms:
            out[letters] = term_mean_from_counts(counts, letters)
    return out


def _string_means(
    state: np.ndarray,
    words: Sequence[str],
    cfg: QiteConfig,
    rng: Optional[np.random.Generator],
    confusion: Optional[ConfusionMatrix],
) -> Dict[str, float]:
    if cfg.estimator == "exact":
        return _means_exact(state, words)
    if rng is None:
        rng = np.random.default_rng(0)
    return _means_sampled(state, words, cfg, rng, confusion)


# ---------------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------------

def _identity_word(n: int) -> str:
    return "I" * n


def _energy_from_means(h: PauliSum, means: Dict[str, float]) -> float:
    total = h.coeff(_identity_word(h.n_qubits))
    for word, coeff in h.items():
        if set(word) != {"I"}:
            total += coeff * means[word]
    return float(total)


def qite_step(
    state: np.ndarray,
    h: PauliSum,
    cfg: QiteConfig = QiteConfig(),
    rng: Optional[np.random.Generator] = None,
    confusion: Optional[ConfusionMatrix] = None,
) -> Tuple[QiteStepRecord, np.ndarray]:
    """One unitary imaginary-time step from ``state``.

    Solves ``(S + S^T + reg I) a = b`` over the pool, with the right-hand
    side carrying the first-order norm-ratio prefactor, then applies the
    exact matrix exponential of the resulting generator.
    """
    n = h.n_qubits
    pool = operator_pool(n, cfg.pool)
    state = np.asarray(state, dtype=complex)
    if abs(np.linalg.norm(state) - 1.0) > 1e-9:
        raise ValueError("state must be normalized")

    # every expectation reduces to means of plain Pauli words
    identity = _identity_word(n)
    words = {w for w, _ in h.items() if set(w) != {"I"}}
    s_plan = {}
    for i, p in enumerate(pool):
        for j, q in enumerate(pool):
            word, phase = pauli_product(p, q)
            s_plan[i, j] = (word.letters, phase)
            if set(word.letters) != {"I"}:
                words.add(word.letters)
    b_plan: Dict[int, List[Tuple[float, str]]] = {}
    for i, p in enumerate(pool):
        rows = []
        for word, coeff in h.items():
            prod, phase = pauli_product(p, PauliString(word))
            weight = coeff * phase.imag
            if weight != 0.0:
                rows.append((weight, prod.letters))
                if set(prod.letters) != {"I"}:
                    words.add(prod.letters)
        b_plan[i] = rows

    means = _string_means(state, sorted(words), cfg, rng, confusion)
    means[identity] = 1.0
    energy_before = _energy_from_means(h, means)

    ratio_sq = 1.0 - 2.0 * cfg.delta_tau * energy_before
    if ratio_sq <= 0.0:
        raise RuntimeError(
            f"norm ratio collapsed (1 - 2 dtau E = {ratio_sq:.3g}); "
            "reduce delta_tau or shift the Hamiltonian"
        )
    prefactor = 2.0 / math.sqrt(ratio_sq)

    dim = len(pool)
    s_sym = np.empty((dim, dim))
    for (i, j), (word, phase) in s_plan.items():
        s_sym[i, j] = 2.0 * phase.real * means[word]
    b = np.zeros(dim)
    for i, rows in b_plan.items():
        b[i] = prefactor * sum(w * means[word] for w, word in rows)

    system = s_sym + cfg.solve_regularization * np.eye(dim)
    try:
        a = np.linalg.solve(system, b)
    except np.linalg.LinAlgError as err:
        cond = np.linalg.cond(s_sym)
        raise RuntimeError(
            f"singular step system (condition {cond:.3g}) despite "
            f"regularization {cfg.solve_regularization:g}"
        ) from err

    generator = np.zeros((2**n, 2**n), dtype=complex)
    for coeff, p in zip(a, pool):
        generator += coeff * p.dense_matrix()
    new_state = expm(-1j * cfg.delta_tau * generator) @ state
    new_state /= np.linalg.norm(new_state)

    if cfg.estimator == "exact":
        new_energy = _energy_from_means(h, _means_exact(new_state, sorted(
            w for w, _ in h.items() if set(w) != {"I"}
        )))
    else:
        h_words = sorted(w for w, _ in h.items() if set(w) != {"I"})
        new_energy = _energy_from_means(
            h, _string_means(new_state, h_words, cfg, rng, confusion)
        )
    record = QiteStepRecord(
        step=0,  # assigned by run_qite; standalone steps keep 0
        a_coefficients=tuple(float(v) for v in a),
        energy=new_energy,
        c_ratio=math.sqrt(ratio_sq),
        state=new_state,
    )
    return record, new_state


def run_qite(
    h: PauliSum,
    initial: Union[str, np.ndarray],
    cfg: QiteConfig = QiteConfig(),
    seed: int = 0,
) -> QiteTrajectory:
    """Iterate steps until the energy change falls below epsilon.

    The caller is responsible for an initial state with nonzero ground
    overlap; a run that stalls on an excited level still reports
    ``converged`` because the stopping rule only watches the energy change.
    """
    if isinstance(initial, str):
        label, state = initial, basis_state(initial)
    else:
        label, state = "custom", np.asarray(initial, dtype=complex)
    rng = np.random.default_rng([seed, 0xA17E])
    confusion = None
    if cfg.estimator == "shots" and cfg.readout_mitigation:
        confusion = calibrate_readout(
            cfg.noise or NoiseModel(), h.n_qubits, rng=np.random.default_rng([seed, 0xCA1]),
        )

    if cfg.estimator == "exact":
        words = sorted(w for w, _ in h.items() if set(w) != {"I"})
        energy = _energy_from_means(h, _means_exact(state, words))
    else:
        words = sorted(w for w, _ in h.items() if set(w) != {"I"})
        energy = _energy_from_means(h, _string_means(state, words, cfg, rng, confusion))

    records: List[QiteStepRecord] = []
    converged = False
    previous = energy
    for step in range(1, cfg.max_steps + 1):
        record, state = qite_step(state, h, cfg, rng, confusion)
        record.step = step
        records.append(record)
        if abs(record.energy - previous) < cfg.convergence_epsilon:
            converged = True
            break
        previous = record.energy
    return QiteTrajectory(label, energy, records, converged, cfg)


# ---------------------------------------------------------------------------
# Krylov post-processing
# ---------------------------------------------------------------------------

@dataclass
class KrylovSolveResult:
    t_matrix: np.ndarray
    h_matrix: np.ndarray
    indices: Tuple[int, ...]
    eigenvalues: Tuple[float, ...]
    x: np.ndarray  # columns are T-orthonormal eigenvector coefficients


def qlanczos(
    trajectory: QiteTrajectory,
    krylov_indices: Optional[Sequence[int]] = None,
    shift: float = 0.0,
    condition_floor: Optional[float] = None,
) -> KrylovSolveResult:
    """Generalized eigensolve over imaginary-time snapshots.

    Overlap and Hamiltonian matrix entries come from the normalization
    recursion, so only the recorded energies are consumed.  ``shift`` is
    subtracted from the energies before the recursion (keeping the norm
    factors well-scaled for strongly positive spectra) and added back to
    the returned eigenvalues.  Directions whose overlap eigenvalue falls
    below the conditioning floor are discarded before the solve.
    """
    energies = trajectory.energies
    last = len(energies) - 1
    if krylov_indices is None:
        top = last - (last % 2)
        krylov_indices = (top - 2, top) if top >= 2 else (0,)
    indices = tuple(int(i) for i in krylov_indices)
    if not indices:
        raise ValueError("need at least one Krylov index")
    if any(i < 0 or i > last for i in indices):
        raise ValueError(f"indices out of range 0..{last}")
    if any(i % 2 for i in indices):
        raise ValueError("Krylov indices must be even steps")
    if len(set(indices)) != len(indices):
        raise ValueError("Krylov indices must be distinct")
    if condition_floor is None:
        condition_floor = DEFAULT_CONDITION_FLOOR[trajectory.config.estimator]

    shifted = [e - shift for e in energies]
    dtau = trajectory.config.delta_tau
    c = np.ones(last + 1)
    for r in range(last):
        ratio_sq = 1.0 - 2.0 * dtau * shifted[r]
        if ratio_sq <= 0.0:
            raise RuntimeError(
                f"normalization recursion collapsed at step {r}; "
                "use a larger shift"
            )
        c[r + 1] = c[r] / math.sqrt(ratio_sq)

    k = len(indices)
    t = np.empty((k, k))
    hm = np.empty((k, k))
    for a, l in enumerate(indices):
        for bidx, lp in enumerate(indices):
            r = (l + lp) // 2
            t[a, bidx] = c[l] * c[lp] / c[r] ** 2
            hm[a, bidx] = t[a, bidx] * shifted[r]

    t_eigs, t_vecs = np.linalg.eigh(t)
    keep = t_eigs >= condition_floor
    if not np.any(keep):
        raise RuntimeError(
            f"overlap matrix fully discarded: eigenvalues {t_eigs.tolist()} "
            f"all below floor {condition_floor:g}"
        )
    basis = t_vecs[:, keep]
    evals, y = eigh(basis.T @ hm @ basis, basis.T @ t @ basis)
    x = basis @ y
    return KrylovSolveResult(
        t_matrix=t,
        h_matrix=hm,
        indices=indices,
        eigenvalues=tuple(float(e) + shift for e in evals),
        x=x,
    )
