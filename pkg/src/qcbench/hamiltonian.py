"""Molecular qubit Hamiltonians and their symmetry-sector structure.

The register encodes four spin orbitals: qubits 0 and 1 carry the spin-up
orbitals, qubits 2 and 3 the spin-down ones, and an occupied orbital is
``|1>``.  Electron number and spin projection are then bit counts, every
Hamiltonian of interest is block diagonal over the ``(n_electrons, s_z)``
sectors, and each block can be compressed onto a register of
``log2(block dim)`` qubits for the solvers.

Hamiltonians are persisted as JSON with the exact key set
``molecule, bond_distance_angstrom, n_qubits, terms, provenance`` where each
term is ``{"pauli": <letters>, "coeff": <float>}``.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .pauli import PauliString, PauliSum, decompose_hermitian

N_QUBITS = 4
N_SPIN_UP = 2  # qubits 0..1 are spin-up orbitals, 2..3 spin-down


@dataclass(frozen=True, order=True)
class SymmetrySector:
    """Conserved quantum numbers ``(n_electrons, s_z)`` of a block."""

    n_electrons: int
    s_z: float

    @property
    def label(self) -> str:
        if self.s_z == 0:
            sz = "0"
        else:
            num = int(round(2 * self.s_z))
            sz = f"{num:+d}/2" if num % 2 else f"{num // 2:+d}"
        return f"ne{self.n_electrons}_sz{sz}"


def sector_of(label: str) -> SymmetrySector:
    """Sector of a basis ket label under the spin-orbital layout."""
    if len(label) != N_QUBITS or any(c not in "01" for c in label):
        raise ValueError(f"bad basis label {label!r}")
    up = sum(int(c) for c in label[:N_SPIN_UP])
    down = sum(int(c) for c in label[N_SPIN_UP:])
    return SymmetrySector(up + down, 0.5 * (up - down))


def sector_basis(sector: SymmetrySector) -> Tuple[str, ...]:
    """Lexicographically sorted ket labels spanning a sector."""
    labels = [
        format(i, f"0{N_QUBITS}b")
        for i in range(2**N_QUBITS)
        if sector_of(format(i, f"0{N_QUBITS}b")) == sector
    ]
    return tuple(labels)


def _all_sectors() -> Tuple[SymmetrySector, ...]:
    seen = {}
    for i in range(2**N_QUBITS):
        s = sector_of(format(i, f"0{N_QUBITS}b"))
        seen.setdefault((s.n_electrons, -s.s_z), s)
    return tuple(seen[k] for k in sorted(seen))


#: All nonempty sectors, ordered by electron number then descending s_z.
SECTORS: Tuple[SymmetrySector, ...] = _all_sectors()

#: The ket labels of the analytic spin triplet living in the ne2_sz0 block.
TRIPLET_KETS = ("1001", "0110")


def triplet_state() -> np.ndarray:
    """The ``(|1001> - |0110>)/sqrt(2)`` triplet on the full register."""
    psi = np.zeros(2**N_QUBITS)
    psi[int(TRIPLET_KETS[0], 2)] = 1.0 / math.sqrt(2.0)
    psi[int(TRIPLET_KETS[1], 2)] = -1.0 / math.sqrt(2.0)
    return psi


# ---------------------------------------------------------------------------
# the Hamiltonian container
# ---------------------------------------------------------------------------

@dataclass
class QubitHamiltonian:
    terms: PauliSum
    molecule: str = ""
    bond_distance: float = 0.0
    provenance: str = ""

    @property
    def n_qubits(self) -> int:
        return self.terms.n_qubits

    def dense_matrix(self) -> np.ndarray:
        return self.terms.dense_matrix()

    def validate(self) -> List[str]:
        """Physics checks; returns a list of human-readable violations."""
        problems = []
        for s in self.terms.strings():
            if s.y_count % 2:
                problems.append(f"term {s.letters} has an odd number of Y factors")
        dense = self.dense_matrix()
        for name, op in (("electron number", _number_operator()),
                         ("spin projection", _sz_operator())):
            comm = dense @ op - op @ dense
            if np.max(np.abs(comm)) > 1e-9:
                problems.append(
                    f"does not commute with the {name} operator "
                    f"(largest offender: {self._worst_term(op, comm)})"
                )
        return problems

    def _worst_term(self, op: np.ndarray, comm: np.ndarray) -> str:
        """Term whose own commutator aligns best with the total violation.

        Individual words may fail to commute while the sum does (XX+YY
        pairs), so the total commutator is what gets projected onto.
        """
        best, best_score = "?", 0.0
        for letters, coeff in self.terms.items():
            term = coeff * PauliString(letters).dense_matrix()
            score = abs(np.vdot(term @ op - op @ term, comm))
            if score > best_score:
                best, best_score = letters, score
        return best


def _number_operator() -> np.ndarray:
    terms = PauliSum.identity(N_QUBITS, N_QUBITS / 2.0)
    for q in range(N_QUBITS):
        letters = "".join("Z" if i == q else "I" for i in range(N_QUBITS))
        terms = terms + PauliSum.from_terms([(letters, -0.5)])
    return terms.dense_matrix()


def _sz_operator() -> np.ndarray:
    terms = PauliSum(N_QUBITS)
    for q in range(N_QUBITS):
        sign = 1.0 if q < N_SPIN_UP else -1.0
        letters = "".join("Z" if i == q else "I" for i in range(N_QUBITS))
        terms = terms + PauliSum.from_terms([(letters, -0.25 * sign)])
    return terms.dense_matrix()


def save(h: QubitHamiltonian, path: Union[str, Path]) -> None:
    payload = {
        "molecule": h.molecule,
        "bond_distance_angstrom": float(h.bond_distance),
        "n_qubits": h.n_qubits,
        "terms": [
            {"pauli": letters, "coeff": coeff} for letters, coeff in h.terms.items()
        ],
        "provenance": h.provenance,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


class SchemaError(ValueError):
    """Raised when a Hamiltonian file violates the JSON contract."""


def load(path: Union[str, Path]) -> QubitHamiltonian:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    for key in ("molecule", "bond_distance_angstrom", "n_qubits", "terms", "provenance"):
        if key not in payload:
            raise SchemaError(f"missing key {key!r}")
    n = payload["n_qubits"]
    if not isinstance(n, int) or n < 1:
        raise SchemaError(f"bad n_qubits: {n!r}")
    if not isinstance(payload["terms"], list) or not payload["terms"]:
        raise SchemaError("terms must be a non-empty list")
    pairs = []
    for entry in payload["terms"]:
        if not isinstance(entry, dict) or set(entry) != {"pauli", "coeff"}:
            raise SchemaError(f"bad term entry: {entry!r}")
        letters, coeff = entry["pauli"], entry["coeff"]
        if not isinstance(letters, str) or len(letters) != n or any(
            c not in "IXYZ" for c in letters
        ):
            raise SchemaError(f"bad Pauli word: {letters!r}")
        if not isinstance(coeff, (int, float)) or not math.isfinite(coeff):
            raise SchemaError(f"bad coefficient for {letters}: {coeff!r}")
        pairs.append((letters, float(coeff)))
    return QubitHamiltonian(
        terms=PauliSum.from_terms(pairs, n_qubits=n),
        molecule=str(payload["molecule"]),
        bond_distance=float(payload["bond_distance_angstrom"]),
        provenance=str(payload["provenance"]),
    )


# ---------------------------------------------------------------------------
# sector blocks
# ---------------------------------------------------------------------------

@dataclass
class SectorBlock:
    """One symmetry block, both as a dense matrix and as a compressed operator.

    ``reduced`` is the traceless part of the block expressed on
    ``n_reduced_qubits`` qubits; adding ``shift`` to its eigenvalues recovers
    the eigenvalues of the full Hamiltonian restricted to this sector.
    """

    sector: SymmetrySector
    basis: Tuple[str, ...]
    matrix: np.ndarray
    reduced: PauliSum
    shift: float

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n_reduced_qubits(self) -> int:
        return self.reduced.n_qubits

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def eigensystem(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    def lift(self, reduced_state: np.ndarray) -> np.ndarray:
        """Embed an in-block state back into the full register."""
        vec = np.asarray(reduced_state, dtype=complex).reshape(-1)
        if vec.shape[0] != self.dim:
            raise ValueError("state dimension does not match the block")
        full = np.zeros(2**N_QUBITS, dtype=complex)
        for amplitude, label in zip(vec, self.basis):
            full[int(label, 2)] = amplitude
        return full


def pad_to_power_of_two(matrix: np.ndarray) -> Tuple[np.ndarray, int]:
    """Pad a Hermitian matrix with a large diagonal so solvers can ignore it.

    Padding entries sit 10 above the top eigenvalue; returns the padded matrix
    and the original dimension.  Blocks of the four-orbital problem all have
    power-of-two dimension already, so this is only exercised synthetically.
    """
    dim = matrix.shape[0]
    target = 1 << max(0, (dim - 1).bit_length())
    if target == dim:
        return matrix.copy(), dim
    top = float(np.max(np.linalg.eigvalsh(matrix)))
    padded = np.eye(target, dtype=matrix.dtype) * (top + 10.0)
    padded[:dim, :dim] = matrix
    return padded, dim


def extract_block(h: QubitHamiltonian, sector: SymmetrySector) -> SectorBlock:
    if h.n_qubits != N_QUBITS:
        raise ValueError("sector extraction assumes the four-orbital register")
    basis = sector_basis(sector)
    if not basis:
        raise ValueError(f"empty sector {sector}")
    idx = [int(label, 2) for label in basis]
    dense = h.dense_matrix()[np.ix_(idx, idx)]
    if np.max(np.abs(dense.imag)) > 1e-12:
        raise ValueError("sector block is not real; check the Hamiltonian")
    dense = dense.real.astype(float)
    dim = len(basis)
    shift = float(np.trace(dense)) / dim
    traceless = dense - shift * np.eye(dim)
    k = (dim - 1).bit_length()
    if 2**k != dim:
        # not reachable for the physical sectors; keep the contract honest
        padded, _ = pad_to_power_of_two(traceless)
        reduced = decompose_hermitian(padded)
    else:
        reduced = decompose_hermitian(traceless) if dim > 1 else PauliSum(0)
    return SectorBlock(sector, basis, dense, reduced, shift)


# ---------------------------------------------------------------------------
# exact spectra
# ---------------------------------------------------------------------------

@dataclass
class Spectrum:
    """Eigenvalues of the full Hamiltonian with their sector assignments.

    ``spin`` carries a total-spin label where one can be read off exactly:
    eigenvectors of the ne2_sz0 block that coincide with the analytic triplet
    get 1, those orthogonal to it get 0, anything in between stays None.
    """

    eigenvalues: np.ndarray
    states: np.ndarray  # columns, on the full register
    sectors: List[SymmetrySector]
    spin: List[Optional[int]]


def exact_spectrum(h: QubitHamiltonian) -> Spectrum:
    entries = []
    triplet = triplet_state()
    for sector in SECTORS:
        block = extract_block(h, sector)
        vals, vecs = block.eigensystem()
        for j in range(block.dim):
            full_vec = block.lift(vecs[:, j])
            spin: Optional[int] = None
            if sector == SymmetrySector(2, 0.0):
                overlap = abs(np.vdot(triplet, full_vec)) ** 2
                if overlap > 1.0 - 1e-8:
                    spin = 1
                elif overlap < 1e-8:
                    spin = 0
            elif sector in (SymmetrySector(2, 1.0), SymmetrySector(2, -1.0)):
                spin = 1
            entries.append((float(vals[j]), full_vec, sector, spin))
    entries.sort(key=lambda e: e[0])
    return Spectrum(
        eigenvalues=np.array([e[0] for e in entries]),
        states=np.column_stack([e[1] for e in entries]),
        sectors=[e[2] for e in entries],
        spin=[e[3] for e in entries],
    )


# ---------------------------------------------------------------------------
# synthetic molecules
# ---------------------------------------------------------------------------

#: Minimum edge gap of each block, as a fraction of the coefficient scale.
MIN_GAP_FRACTION = 0.15
#: Minimum squared overlap between solver start states and the target
#: eigenvector of each block.
OVERLAP_FLOOR = 0.05

_GENERATOR_TAG = 0x51C0FFEE


def stable_cell_seed(*parts: Union[str, int, float]) -> int:
    """Deterministic 32-bit seed from heterogeneous parts (crc32, not hash())."""
    text = "|".join(
        f"{p:.9g}" if isinstance(p, float) else str(p) for p in parts
    )
    return zlib.crc32(text.encode())


def _block_conditioned(block: np.ndarray, scale: float) -> bool:
    dim = block.shape[0]
    if dim == 1:
        return True
    vals, vecs = np.linalg.eigh(block)
    floor = MIN_GAP_FRACTION * scale
    if vals[1] - vals[0] < floor or vals[-1] - vals[-2] < floor:
        return False
    if vecs[0, 0] ** 2 < OVERLAP_FLOOR:  # start |0..0> against the ground state
        return False
    if vecs[-1, -1] ** 2 < OVERLAP_FLOOR:  # start |1..1> against the top state
        return False
    return True


def _triplet_split_block(rng: np.random.Generator, scale: float) -> np.ndarray:
    """Random ne2_sz0 block that is exactly block diagonal over spin.

    Built in the symmetry-adapted basis (three singlets plus the triplet) and
    rotated back to the ket basis, so the triplet ket combination is an exact
    eigenvector with a random eigenvalue.
    """
    basis = sector_basis(SymmetrySector(2, 0.0))
    r = np.zeros((4, 4))
    s = 1.0 / math.sqrt(2.0)
    columns = {
        0: {"1010": 1.0},
        1: {"0101": 1.0},
        2: {"1001": s, "0110": s},
        3: {"1001": s, "0110": -s},  # the triplet
    }
    for col, amplitudes in columns.items():
        for ket, amp in amplitudes.items():
            r[basis.index(ket), col] = amp
    raw = rng.normal(size=(3, 3))
    singlets = scale * (raw + raw.T) / 2.0
    t_energy = scale * rng.normal()
    sym = np.zeros((4, 4))
    sym[:3, :3] = singlets
    sym[3, 3] = t_energy
    return r @ sym @ r.T


def _triplet_block_conditioned(block: np.ndarray, scale: float) -> bool:
    if not _block_conditioned(block, scale):
        return False
    basis = sector_basis(SymmetrySector(2, 0.0))
    t = np.zeros(4)
    t[basis.index("1001")] = 1.0 / math.sqrt(2.0)
    t[basis.index("0110")] = -1.0 / math.sqrt(2.0)
    t_energy = float(t @ block @ t)
    singlet_vals = []
    vals, vecs = np.linalg.eigh(block)
    for j in range(4):
        if abs(np.dot(t, vecs[:, j])) ** 2 < 1e-8:
            singlet_vals.append(vals[j])
    if len(singlet_vals) != 3:
        return False
    floor = MIN_GAP_FRACTION * scale
    gaps = np.diff(sorted(singlet_vals))
    if np.min(gaps) < floor:
        return False
    if min(abs(t_energy - v) for v in singlet_vals) < OVERLAP_FLOOR * scale:
        return False
    return True


def random_molecular_hamiltonian(
    seed: int,
    triplet_split: bool = False,
    scale: float = 1.0,
    molecule: str = "",
    bond_distance: float = 1.0,
) -> QubitHamiltonian:
    """Draw a random Hamiltonian with the symmetry structure of the benchmark.

    Each sector block is an independent random real symmetric matrix at the
    requested coefficient scale.  Draws are rejected until every block is
    well conditioned for the solvers: edge gaps of at least
    ``MIN_GAP_FRACTION * scale`` and start-state overlaps of at least
    ``OVERLAP_FLOOR``.  With ``triplet_split`` the ne2_sz0 block commutes with
    total spin, so the analytic triplet is an exact eigenvector there.

    Fully deterministic in ``seed``; the rejection loop derives one fresh
    stream per attempt.
    """
    for attempt in range(500):
        rng = np.random.default_rng([_GENERATOR_TAG, seed & 0xFFFFFFFF, attempt])
        dense = np.zeros((2**N_QUBITS, 2**N_QUBITS))
        ok = True
        for sector in SECTORS:
            basis = sector_basis(sector)
            dim = len(basis)
            if triplet_split and sector == SymmetrySector(2, 0.0):
                block = _triplet_split_block(rng, scale)
                ok = ok and _triplet_block_conditioned(block, scale)
            else:
                raw = rng.normal(size=(dim, dim))
                block = scale * (raw + raw.T) / 2.0
                ok = ok and _block_conditioned(block, scale)
            idx = [int(label, 2) for label in basis]
            dense[np.ix_(idx, idx)] = block
        if ok:
            name = molecule or f"synthetic-{seed}"
            note = (
                f"synthetic generator seed={seed} scale={scale:g} "
                f"triplet_split={triplet_split} attempt={attempt}"
            )
            return QubitHamiltonian(
                terms=decompose_hermitian(dense),
                molecule=name,
                bond_distance=bond_distance,
                provenance=note,
            )
    raise RuntimeError(f"no conditioned draw found for seed {seed}")
