"""Statevector circuit simulator with shot sampling and a small noise model.

The gate set is deliberately closed: single-qubit ``X H RX RY RZ U3``,
two-qubit ``CNOT CNOTDG CZ XX ASWAP``, plus ``STATEPREP`` as an optional
first gate.  ``CNOTDG`` is the adjoint-compiled variant of ``CNOT``; the two
are identical unitaries but compile to different pulse sequences and are
therefore tracked as distinct kinds.

Angles may be concrete floats or affine expressions of a named slot
(:class:`Param`), which is how ansatz circuits stay symbolic until an
optimiser binds them.

Noise covers what the benchmarks need and nothing more: coherent over-rotation
of ``XX`` entangler angles (systematic bias plus a stochastic part), optional
depolarizing kicks after entanglers, and independent per-qubit readout flips.
Readout and depolarizing act only on sampling paths; exact-expectation
estimates see only the coherent part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .pauli import QUBIT_CAP, PauliString, PauliSum, expectation


# ---------------------------------------------------------------------------
# parameters and gates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    """Affine expression ``scale * <slot> + offset`` of one named angle slot."""

    name: str
    scale: float = 1.0
    offset: float = 0.0

    def resolve(self, bindings: Dict[str, float]) -> float:
        if self.name not in bindings:
            raise KeyError(f"no binding for parameter slot {self.name!r}")
        return self.scale * float(bindings[self.name]) + self.offset

    def __neg__(self) -> "Param":
        return Param(self.name, -self.scale, -self.offset)

    def shifted(self, delta: float) -> "Param":
        return Param(self.name, self.scale, self.offset + delta)

    def render(self) -> str:
        if self.scale == 1.0 and self.offset == 0.0:
            return self.name
        text = f"{self.scale:g}*{self.name}"
        if self.offset != 0.0:
            text += f"{self.offset:+.12g}"
        return text


Angle = Union[float, Param]

#: kind -> (arity, number of angle parameters)
GATE_DEFS: Dict[str, Tuple[int, int]] = {
    "X": (1, 0),
    "H": (1, 0),
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "U3": (1, 3),
    "CNOT": (2, 0),
    "CNOTDG": (2, 0),
    "CZ": (2, 0),
    "XX": (2, 1),
    "ASWAP": (2, 2),
    "STATEPREP": (-1, 0),  # arity checked against the attached vector
}

ENTANGLER_KINDS = ("CNOT", "CNOTDG", "CZ", "XX", "ASWAP")

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
_XKRONX = np.kron(_PAULI_X, _PAULI_X)


def rx_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]]
    )


def xx_matrix(chi: float) -> np.ndarray:
    """``exp(-i * chi * X (x) X)``; the full angle appears in the exponent."""
    return math.cos(chi) * np.eye(4, dtype=complex) - 1j * math.sin(chi) * _XKRONX


def aswap_matrix(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    e = np.exp(1j * phi)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, c, e * s, 0],
            [0, np.conj(e) * s, -c, 0],
            [0, 0, 0, 1],
        ]
    )


def gate_matrix(kind: str, params: Sequence[float]) -> np.ndarray:
    if kind == "X":
        return _PAULI_X
    if kind == "H":
        return _HADAMARD
    if kind == "RX":
        return rx_matrix(params[0])
    if kind == "RY":
        return ry_matrix(params[0])
    if kind == "RZ":
        return rz_matrix(params[0])
    if kind == "U3":
        return u3_matrix(*params)
    if kind in ("CNOT", "CNOTDG"):
        return _CNOT
    if kind == "CZ":
        return _CZ
    if kind == "XX":
        return xx_matrix(params[0])
    if kind == "ASWAP":
        return aswap_matrix(*params)
    raise ValueError(f"unknown gate kind {kind!r}")


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    qubits: Tuple[int, ...]
    params: Tuple[Angle, ...] = ()
    vector: Optional[np.ndarray] = None  # STATEPREP payload

    @property
    def is_bound(self) -> bool:
        return not any(isinstance(p, Param) for p in self.params)

    @property
    def is_entangler(self) -> bool:
        return self.kind in ENTANGLER_KINDS

    def bound_params(self, bindings: Dict[str, float]) -> Tuple[float, ...]:
        return tuple(
            p.resolve(bindings) if isinstance(p, Param) else float(p)
            for p in self.params
        )

    def to_text(self) -> str:
        qubits = ",".join(f"q{q}" for q in self.qubits)
        parts = [self.kind, qubits]
        for p in self.params:
            parts.append(p.render() if isinstance(p, Param) else f"{float(p):.12g}")
        return " ".join(parts)


@dataclass
class Circuit:
    """Ordered gate list on a fixed register, possibly with unbound slots."""

    n_qubits: int
    gates: List[Gate] = field(default_factory=list)
    name: str = ""

    def __post_init__(self) -> None:
        if not (1 <= self.n_qubits <= QUBIT_CAP):
            raise ValueError(f"register width {self.n_qubits} outside [1, {QUBIT_CAP}]")

    def add(self, kind: str, qubits: Union[int, Sequence[int]], *params: Angle,
            vector: Optional[np.ndarray] = None) -> "Circuit":
        if isinstance(qubits, int):
            qubits = (qubits,)
        qubits = tuple(int(q) for q in qubits)
        if kind not in GATE_DEFS:
            raise ValueError(f"unknown gate kind {kind!r}")
        arity, n_params = GATE_DEFS[kind]
        if kind == "STATEPREP":
            if self.gates:
                raise ValueError("STATEPREP is only allowed as the first gate")
            if vector is None:
                raise ValueError("STATEPREP needs a state vector")
            vec = np.asarray(vector, dtype=complex).reshape(-1)
            if vec.shape[0] != 2 ** len(qubits):
                raise ValueError("STATEPREP vector length does not match its qubits")
            if abs(np.linalg.norm(vec) - 1.0) > 1e-9:
                raise ValueError("STATEPREP vector is not normalised")
            self.gates.append(Gate(kind, qubits, (), vec))
            return self
        if arity != len(qubits):
            raise ValueError(f"{kind} acts on {arity} qubits, got {qubits}")
        if n_params != len(params):
            raise ValueError(f"{kind} takes {n_params} angles, got {len(params)}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in {kind} {qubits}")
        if any(q < 0 or q >= self.n_qubits for q in qubits):
            raise ValueError(f"qubit index out of range in {kind} {qubits}")
        self.gates.append(Gate(kind, qubits, tuple(params)))
        return self

    @property
    def parameters(self) -> List[str]:
        """Slot names in order of first appearance."""
        seen: List[str] = []
        for g in self.gates:
            for p in g.params:
                if isinstance(p, Param) and p.name not in seen:
                    seen.append(p.name)
        return seen

    @property
    def is_bound(self) -> bool:
        return all(g.is_bound for g in self.gates)

    def bind(self, values: Union[Dict[str, float], Sequence[float]]) -> "Circuit":
        """Resolve every slot; sequences are matched to ``parameters`` order."""
        if not isinstance(values, dict):
            names = self.parameters
            values = list(values)
            if len(values) != len(names):
                raise ValueError(
                    f"{len(names)} parameter slots, got {len(values)} values"
                )
            values = dict(zip(names, [float(v) for v in values]))
        out = Circuit(self.n_qubits, name=self.name)
        for g in self.gates:
            if g.kind == "STATEPREP":
                out.gates.append(g)
            else:
                out.gates.append(Gate(g.kind, g.qubits, g.bound_params(values)))
        return out

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, list(self.gates), self.name)

    def to_text(self) -> str:
        return "\n".join(g.to_text() for g in self.gates)


# ---------------------------------------------------------------------------
# state evolution
# ---------------------------------------------------------------------------

def basis_state(label: str) -> np.ndarray:
    """Statevector for a ket label such as ``"0110"`` (qubit 0 leftmost)."""
    if not label or any(c not in "01" for c in label):
        raise ValueError(f"bad basis label {label!r}")
    psi = np.zeros(2 ** len(label), dtype=complex)
    psi[int(label, 2)] = 1.0
    return psi


def index_label(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


def apply_matrix(psi: np.ndarray, m: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Apply a ``2^k x 2^k`` matrix to the listed qubits of an n-qubit state."""
    k = len(qubits)
    perm = list(qubits) + [q for q in range(n) if q not in qubits]
    tensor = np.transpose(psi.reshape((2,) * n), perm)
    tensor = (m @ tensor.reshape(2**k, -1)).reshape((2,) * n)
    return np.transpose(tensor, np.argsort(perm)).reshape(-1)


def _initial_state(circuit: Circuit, initial: Union[None, str, np.ndarray]) -> Tuple[np.ndarray, int]:
    """Resolve the starting vector; returns it plus the index of the first
    gate left to apply (1 if a STATEPREP was consumed)."""
    n = circuit.n_qubits
    start = 0
    if circuit.gates and circuit.gates[0].kind == "STATEPREP":
        if initial is not None:
            raise ValueError("explicit initial state conflicts with STATEPREP")
        g = circuit.gates[0]
        psi = np.zeros(2**n, dtype=complex)
        psi[0] = 1.0
        tensor = psi.reshape((2,) * n)
        # place the prepared amplitudes on the prep qubits, |0> elsewhere
        perm = list(g.qubits) + [q for q in range(n) if q not in g.qubits]
        tensor = np.transpose(tensor, perm)
        flat = np.zeros_like(tensor.reshape(2 ** len(g.qubits), -1))
        flat[:, 0] = g.vector
        tensor = flat.reshape((2,) * n)
        psi = np.transpose(tensor, np.argsort(perm)).reshape(-1)
        return psi, 1
    if initial is None:
        psi = np.zeros(2**n, dtype=complex)
        psi[0] = 1.0
    elif isinstance(initial, str):
        if len(initial) != n:
            raise ValueError(f"label {initial!r} does not match {n} qubits")
        psi = basis_state(initial)
    else:
        psi = np.asarray(initial, dtype=complex).reshape(-1).copy()
        if psi.shape[0] != 2**n:
            raise ValueError("initial vector has the wrong dimension")
        if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
            raise ValueError("initial vector is not normalised")
    return psi, start


def run(circuit: Circuit, initial: Union[None, str, np.ndarray] = None) -> np.ndarray:
    """Evolve the initial state through a fully bound circuit."""
    if not circuit.is_bound:
        raise ValueError(
            f"circuit has unbound parameters: {circuit.parameters}"
        )
    psi, start = _initial_state(circuit, initial)
    for g in circuit.gates[start:]:
        psi = apply_matrix(psi, gate_matrix(g.kind, g.params), g.qubits, circuit.n_qubits)
    return psi


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------

REFRESH_POLICIES = ("per_evaluation", "per_gate", "per_shot")


@dataclass(frozen=True)
class NoiseModel:
    """Entangler over-rotation plus independent readout flips.

    ``over_rotation_bias`` is the systematic part of the relative angle error
    on ``XX`` gates and ``over_rotation_sigma`` the standard deviation of the
    stochastic part; a drawn error ``eps`` turns ``XX(chi)`` into
    ``XX(chi * (1 + eps))``.  ``error_refresh`` controls how often ``eps`` is
    redrawn: once per evaluation (default), per gate, or per shot.

    ``p10`` / ``p01`` are the probabilities of reading 1 for a true 0 and
    0 for a true 1; scalars broadcast over the register.  ``depolarizing``
    inserts a uniformly random non-identity two-qubit Pauli after each
    entangler with the given probability, and is honoured only on sampling
    paths (a statevector cannot carry the mixture).
    """

    p10: Union[float, Tuple[float, ...]] = 0.0
    p01: Union[float, Tuple[float, ...]] = 0.0
    over_rotation_sigma: float = 0.0
    over_rotation_bias: float = 0.0
    depolarizing: float = 0.0
    error_refresh: str = "per_evaluation"

    def __post_init__(self) -> None:
        if self.error_refresh not in REFRESH_POLICIES:
            raise ValueError(f"unknown refresh policy {self.error_refresh!r}")

    def readout_probs(self, n_qubits: int) -> Tuple[np.ndarray, np.ndarray]:
        def broadcast(p):
            arr = np.atleast_1d(np.asarray(p, dtype=float))
            if arr.shape[0] == 1:
                arr = np.repeat(arr, n_qubits)
            if arr.shape[0] != n_qubits:
                raise ValueError("readout probability list does not match register")
            return arr

        return broadcast(self.p10), broadcast(self.p01)

    @property
    def has_coherent(self) -> bool:
        return self.over_rotation_sigma != 0.0 or self.over_rotation_bias != 0.0

    @property
    def has_readout(self) -> bool:
        return np.any(np.atleast_1d(self.p10)) or np.any(np.atleast_1d(self.p01))

    def with_fixed_draw(self, eps: float) -> "NoiseModel":
        """Freeze the coherent error at a concrete value (used to share one
        draw across the measurement groups of a single evaluation)."""
        return NoiseModel(
            self.p10, self.p01, 0.0, eps, self.depolarizing, "per_evaluation"
        )


def _as_rng(rng: Union[None, int, np.random.Generator]) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


_TWO_QUBIT_PAULIS = [
    (a, b) for a in "IXYZ" for b in "IXYZ" if not (a == "I" and b == "I")
]


def run_noisy(
    circuit: Circuit,
    noise: NoiseModel,
    rng: Union[None, int, np.random.Generator] = None,
    initial: Union[None, str, np.ndarray] = None,
    apply_depolarizing: bool = False,
) -> np.ndarray:
    """Evolve through the circuit with coherent entangler errors applied.

    One error draw per call under the default refresh policy, one per ``XX``
    gate under ``per_gate``.  Depolarizing kicks are only inserted when
    ``apply_depolarizing`` is set (the per-shot sampling path).
    """
    if not circuit.is_bound:
        raise ValueError("cannot run a circuit with unbound parameters")
    rng = _as_rng(rng)
    psi, start = _initial_state(circuit, initial)
    eps = noise.over_rotation_bias + noise.over_rotation_sigma * rng.standard_normal()
    from .pauli import PAULI_MATRICES  # local to avoid polluting module namespace

    for g in circuit.gates[start:]:
        params = list(g.params)
        if g.kind == "XX":
            if noise.error_refresh == "per_gate":
                eps = (
                    noise.over_rotation_bias
                    + noise.over_rotation_sigma * rng.standard_normal()
                )
            params[0] = params[0] * (1.0 + eps)
        psi = apply_matrix(psi, gate_matrix(g.kind, params), g.qubits, circuit.n_qubits)
        if (
            apply_depolarizing
            and noise.depolarizing > 0.0
            and g.is_entangler
            and rng.random() < noise.depolarizing
        ):
            a, b = _TWO_QUBIT_PAULIS[rng.integers(len(_TWO_QUBIT_PAULIS))]
            kick = np.kron(PAULI_MATRICES[a], PAULI_MATRICES[b])
            psi = apply_matrix(psi, kick, g.qubits, circuit.n_qubits)
    return psi


# ---------------------------------------------------------------------------
# sampling and energy estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementGroup:
    """Qubit-wise commuting terms sharing one measurement basis.

    ``basis`` holds one letter per qubit; ``I`` means the qubit is
    unconstrained and is measured in Z.
    """

    basis: str
    terms: Tuple[Tuple[str, float], ...]


def measurement_groups(h: PauliSum) -> List[MeasurementGroup]:
    """Greedy qubit-wise-commuting grouping, deterministic for equal inputs."""
    n = h.n_qubits
    groups: List[Tuple[List[str], List[Tuple[str, float]]]] = []
    for letters, coeff in h.items():
        if all(c == "I" for c in letters):
            continue  # the constant is handled exactly
        placed = False
        for basis, members in groups:
            merged = []
            for bq, tq in zip(basis, letters):
                if tq == "I" or bq == tq:
                    merged.append(bq)
                elif bq == "I":
                    merged.append(tq)
                else:
                    break
            else:
                basis[:] = merged
                members.append((letters, coeff))
                placed = True
            if placed:
                break
        if not placed:
            groups.append(([c for c in letters], [(letters, coeff)]))
    return [
        MeasurementGroup("".join(basis), tuple(members)) for basis, members in groups
    ]


def basis_rotation_gates(basis: str) -> List[Tuple[str, int, Tuple[float, ...]]]:
    """Gates that map the given product basis onto Z measurements.

    ``H`` diagonalises X.  For Y the convention is ``RX(pi/2)``, which maps Y
    eigenstates onto the computational basis with the same statistics as the
    textbook S-dagger-then-H rotation.
    """
    out = []
    for q, c in enumerate(basis):
        if c == "X":
            out.append(("H", q, ()))
        elif c == "Y":
            out.append(("RX", q, (math.pi / 2.0,)))
        elif c not in "IZ":
            raise ValueError(f"bad basis letter {c!r}")
    return out


def _with_rotations(circuit: Circuit, basis: str) -> Circuit:
    rotated = circuit.copy()
    for kind, q, params in basis_rotation_gates(basis):
        rotated.add(kind, q, *params)
    return rotated


def _apply_readout_flips(
    bits: np.ndarray, noise: NoiseModel, rng: np.random.Generator
) -> np.ndarray:
    p10, p01 = noise.readout_probs(bits.shape[1])
    flip_prob = np.where(bits == 0, p10[None, :], p01[None, :])
    return bits ^ (rng.random(bits.shape) < flip_prob).astype(np.int8)


def sample_counts(
    circuit: Circuit,
    shots: int,
    noise: Optional[NoiseModel] = None,
    rng: Union[None, int, np.random.Generator] = None,
    initial: Union[None, str, np.ndarray] = None,
) -> Dict[str, int]:
    """Measure every qubit in Z after the circuit; returns label -> count.

    With ``per_shot`` refresh or a depolarizing probability the circuit is
    re-executed for every shot, which is slow but faithful; otherwise a single
    statevector is sampled multinomially.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    rng = _as_rng(rng)
    n = circuit.n_qubits
    noise = noise or NoiseModel()
    per_shot = noise.error_refresh == "per_shot" or noise.depolarizing > 0.0

    if per_shot and (noise.has_coherent or noise.depolarizing > 0.0):
        indices = np.empty(shots, dtype=np.int64)
        for s in range(shots):
            psi = run_noisy(circuit, noise, rng, initial, apply_depolarizing=True)
            p = np.abs(psi) ** 2
            indices[s] = rng.choice(p.shape[0], p=p / p.sum())
    else:
        if noise.has_coherent:
            psi = run_noisy(circuit, noise, rng, initial)
        else:
            psi = run(circuit, initial)
        p = np.abs(psi) ** 2
        p = p / p.sum()
        counts = rng.multinomial(shots, p)
        indices = np.repeat(np.arange(p.shape[0]), counts)

    bits = ((indices[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(np.int8)
    if noise.has_readout:
        bits = _apply_readout_flips(bits, noise, rng)
    weights = 1 << np.arange(n - 1, -1, -1)
    observed = bits @ weights
    out: Dict[str, int] = {}
    for idx, cnt in zip(*np.unique(observed, return_counts=True)):
        out[index_label(int(idx), n)] = int(cnt)
    return out


def term_mean_from_counts(counts: Dict[str, int], letters: str) -> float:
    """Empirical mean of a Z-diagonalised term given Z-basis counts."""
    total = sum(counts.values())
    if total == 0:
        raise ValueError("empty counts")
    support = [i for i, c in enumerate(letters) if c != "I"]
    acc = 0
    for label, cnt in counts.items():
        parity = sum(int(label[q]) for q in support) % 2
        acc += cnt if parity == 0 else -cnt
    return acc / total


@dataclass(frozen=True)
class EnergyEstimate:
    mean: float
    stderr: float
    shots: Union[int, str]  # shot count per measurement basis, or "exact"


def estimate_energy(
    circuit: Circuit,
    h: PauliSum,
    shots: Union[int, str] = "exact",
    noise: Optional[NoiseModel] = None,
    rng: Union[None, int, np.random.Generator] = None,
    initial: Union[None, str, np.ndarray] = None,
) -> EnergyEstimate:
    """Estimate ``<H>`` after the circuit, exactly or from sampled shots.

    Shot mode groups terms into qubit-wise commuting measurement bases and
    spends ``shots`` per basis.  The quoted standard error treats the term
    means inside one basis as independent binomials, which overstates nothing
    at the coefficient scales used here and is stated as an approximation.
    Under the default refresh policy one coherent error draw is shared by all
    measurement bases of the evaluation.
    """
    noise = noise or NoiseModel()
    if shots == "exact":
        if noise.has_coherent:
            psi = run_noisy(circuit, noise, rng, initial)
        else:
            psi = run(circuit, initial)
        return EnergyEstimate(expectation(psi, h), 0.0, "exact")

    shots = int(shots)
    rng = _as_rng(rng)
    eval_noise = noise
    if noise.error_refresh == "per_evaluation" and noise.has_coherent:
        eps = noise.over_rotation_bias + noise.over_rotation_sigma * rng.standard_normal()
        eval_noise = noise.with_fixed_draw(eps)

    mean = h.coeff("I" * h.n_qubits)
    var = 0.0
    for group in measurement_groups(h):
        counts = sample_counts(
            _with_rotations(circuit, group.basis), shots, eval_noise, rng, initial
        )
        for letters, coeff in group.terms:
            m = term_mean_from_counts(counts, letters)
            mean += coeff * m
            var += coeff * coeff * max(0.0, 1.0 - m * m) / shots
    return EnergyEstimate(float(mean), math.sqrt(var), shots)
