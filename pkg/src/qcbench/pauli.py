"""Pauli-string algebra on a fixed-width qubit register.

Everything downstream (simulator, Hamiltonians, imaginary-time evolution)
speaks in terms of the two classes defined here.  A :class:`PauliString` is a
word over ``I X Y Z``; a :class:`PauliSum` is a real linear combination of
such words.  Only Hermitian operators with real coefficients are representable
on purpose: the molecular Hamiltonians this package targets contain an even
number of ``Y`` factors per term, so their coefficients are real, and keeping
the coefficient type narrow catches sign and phase bugs early.

Ordering convention
-------------------
Qubit 0 is the leftmost character of a string and the leftmost factor of every
Kronecker product, which makes it the most significant bit of a statevector
index.  ``dense_matrix(PauliString("XI"))`` is therefore ``kron(X, I)`` and
acts on qubit 0.  The same convention is shared by the simulator and the
sector bookkeeping; it is asserted once here and imported everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Tuple, Union

import numpy as np

#: Human-readable statement of the register convention, kept next to the code
#: that enforces it.
BIT_ORDER_DOC = (
    "qubit 0 = leftmost ket character = most significant statevector bit; "
    "dense matrices are built as kron(q0, q1, ..., q_{n-1})"
)

#: Hard ceiling on register width for dense operations (16 x 16 at the
#: molecular size used here; the cap only guards against runaway kron calls).
QUBIT_CAP = 12

#: Coefficients with magnitude below this are dropped when building sums.
COEFF_PRUNE = 1e-12

_LETTERS = "IXYZ"

PAULI_MATRICES: Dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# Single-qubit product table: _PRODUCT[(a, b)] = (c, phase) with a @ b = phase * c.
# Phases follow the matrices themselves (X @ Y = iZ and cyclic); the table is
# cross-checked against dense products in the test suite.
_PRODUCT: Dict[Tuple[str, str], Tuple[str, complex]] = {}
for _a in _LETTERS:
    _PRODUCT[("I", _a)] = (_a, 1.0 + 0.0j)
    _PRODUCT[(_a, "I")] = (_a, 1.0 + 0.0j)
    _PRODUCT[(_a, _a)] = ("I", 1.0 + 0.0j)
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (_c, 1.0j)
    _PRODUCT[(_b, _a)] = (_c, -1.0j)
del _a, _b, _c


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Paulis, e.g. ``"XZYI"``.

    The empty string is the scalar identity on a zero-qubit register; it shows
    up naturally when a one-dimensional symmetry block is reduced to a number.
    """

    letters: str

    def __post_init__(self) -> None:
        if any(c not in _LETTERS for c in self.letters):
            raise ValueError(f"invalid Pauli letters: {self.letters!r}")
        if len(self.letters) > QUBIT_CAP:
            raise ValueError(
                f"{len(self.letters)} qubits exceeds the cap of {QUBIT_CAP}"
            )

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return all(c == "I" for c in self.letters)

    @property
    def y_count(self) -> int:
        return self.letters.count("Y")

    @property
    def support(self) -> Tuple[int, ...]:
        """Indices of the qubits on which this string acts nontrivially."""
        return tuple(i for i, c in enumerate(self.letters) if c != "I")

    def dense_matrix(self) -> np.ndarray:
        """Kronecker-product matrix, qubit 0 as the leftmost factor."""
        out = np.eye(1, dtype=complex)
        for c in self.letters:
            out = np.kron(out, PAULI_MATRICES[c])
        return out

    def __str__(self) -> str:
        return self.letters


def pauli_product(a: PauliString, b: PauliString) -> Tuple[PauliString, complex]:
    """Return ``(c, phase)`` with ``a @ b == phase * c``.

    The phase is one of ``{1, -1, i, -i}`` and matches the dense matrices,
    so ``pauli_product(X, Y)`` on one qubit gives ``(Z, 1j)``.
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError("Pauli strings act on different register sizes")
    phase = 1.0 + 0.0j
    letters = []
    for ca, cb in zip(a.letters, b.letters):
        c, p = _PRODUCT[(ca, cb)]
        letters.append(c)
        phase *= p
    return PauliString("".join(letters)), phase


class PauliSum:
    """Real linear combination of Pauli strings on a common register.

    Terms are stored in a dict keyed by the letter string; arithmetic prunes
    coefficients below :data:`COEFF_PRUNE`.  Iteration and the text form are
    sorted by letters so that equal operators serialise identically.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n_qubits: int, terms: Union[Dict[str, float], None] = None):
        if n_qubits < 0 or n_qubits > QUBIT_CAP:
            raise ValueError(f"register width {n_qubits} outside [0, {QUBIT_CAP}]")
        self._n = n_qubits
        self._terms: Dict[str, float] = {}
        if terms:
            for letters, coeff in terms.items():
                self._set(letters, float(coeff))

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_terms(cls, pairs: Iterable[Tuple[str, float]], n_qubits: Union[int, None] = None) -> "PauliSum":
        pairs = list(pairs)
        if n_qubits is None:
            if not pairs:
                raise ValueError("cannot infer register width from zero terms")
            n_qubits = len(pairs[0][0])
        out = cls(n_qubits)
        for letters, coeff in pairs:
            out._add(letters, float(coeff))
        return out

    @classmethod
    def identity(cls, n_qubits: int, coeff: float = 1.0) -> "PauliSum":
        return cls(n_qubits, {"I" * n_qubits: coeff})

    def _check(self, letters: str) -> None:
        if len(letters) != self._n:
            raise ValueError(
                f"term {letters!r} has {len(letters)} letters, register has {self._n}"
            )
        PauliString(letters)  # validates the alphabet

    def _set(self, letters: str, coeff: float) -> None:
        self._check(letters)
        if abs(coeff) < COEFF_PRUNE:
            self._terms.pop(letters, None)
        else:
            self._terms[letters] = coeff

    def _add(self, letters: str, coeff: float) -> None:
        self._set(letters, self._terms.get(letters, 0.0) + coeff)

    # -- views ---------------------------------------------------------------

    @property
    def n_qubits(self) -> int:
        return self._n

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def coeff(self, letters: str) -> float:
        self._check(letters)
        return self._terms.get(letters, 0.0)

    def items(self) -> List[Tuple[str, float]]:
        """Terms as ``(letters, coeff)`` pairs, sorted by letters."""
        return sorted(self._terms.items())

    def strings(self) -> List[PauliString]:
        return [PauliString(s) for s, _ in self.items()]

    def __iter__(self) -> Iterator[Tuple[str, float]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __repr__(self) -> str:
        inner = " + ".join(f"{c:+.6g}*{s}" for s, c in self.items())
        return f"PauliSum({self._n}q: {inner or '0'})"

    # -- arithmetic ----------------------------------------------------------

    def _require_same_register(self, other: "PauliSum") -> None:
        if self._n != other._n:
            raise ValueError("register widths differ")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._require_same_register(other)
        out = PauliSum(self._n, dict(self._terms))
        for letters, coeff in other._terms.items():
            out._add(letters, coeff)
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum(self._n, {s: scalar * c for s, c in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def shifted(self, constant: float) -> "PauliSum":
        """This operator plus ``constant`` times the identity."""
        out = PauliSum(self._n, dict(self._terms))
        out._add("I" * self._n, constant)
        return out

    def dense_matrix(self) -> np.ndarray:
        dim = 2 ** self._n
        out = np.zeros((dim, dim), dtype=complex)
        for letters, coeff in self._terms.items():
            out += coeff * PauliString(letters).dense_matrix()
        return out

    # -- text form -----------------------------------------------------------

    def to_lines(self) -> List[str]:
        """One term per line, ``"<coeff> <letters>"``, sorted by letters."""
        return [f"{c:.17g} {s}" for s, c in self.items()]

    @classmethod
    def from_lines(cls, lines: Iterable[str], n_qubits: Union[int, None] = None) -> "PauliSum":
        pairs = []
        for raw in lines:
            line = raw.strip()
            if not line:
                continue
            try:
                coeff_text, letters = line.split()
                coeff = float(coeff_text)
            except ValueError as exc:
                raise ValueError(f"malformed Pauli term line: {raw!r}") from exc
            pairs.append((letters, coeff))
        return cls.from_terms(pairs, n_qubits=n_qubits)


def dense_matrix(op: Union[PauliString, PauliSum]) -> np.ndarray:
    """Dense matrix of a string or sum under the shared ordering convention."""
    return op.dense_matrix()


def decompose_hermitian(matrix: np.ndarray, hermiticity_tol: float = 1e-12) -> PauliSum:
    """Expand a Hermitian matrix in the Pauli basis.

    Coefficients are ``Tr(matrix @ sigma) / 2**n``; they are real for a
    Hermitian input and the construction prunes anything below
    :data:`COEFF_PRUNE`.  Raises ``ValueError`` if the matrix is not square
    with power-of-two dimension, or if it fails the Hermiticity check.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dim = m.shape[0]
    n = int(dim).bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if n > QUBIT_CAP:
        raise ValueError(f"{n} qubits exceeds the cap of {QUBIT_CAP}")
    if np.max(np.abs(m - m.conj().T)) > hermiticity_tol:
        raise ValueError("matrix is not Hermitian within tolerance")

    out = PauliSum(n)
    for index in range(4**n):
        letters = _index_to_letters(index, n)
        sigma = PauliString(letters).dense_matrix()
        coeff = np.trace(sigma @ m) / dim
        if abs(coeff.imag) > hermiticity_tol * max(1.0, abs(coeff.real)):
            raise ValueError(f"non-real coefficient for {letters}: {coeff}")
        out._add(letters, coeff.real)
    return out


def _index_to_letters(index: int, n_qubits: int) -> str:
    digits = []
    for _ in range(n_qubits):
        digits.append(_LETTERS[index % 4])
        index //= 4
    return "".join(reversed(digits))


def _as_state(state: np.ndarray, n_qubits: int) -> np.ndarray:
    psi = np.asarray(state, dtype=complex).reshape(-1)
    if psi.shape[0] != 2**n_qubits:
        raise ValueError(
            f"state has dimension {psi.shape[0]}, operator acts on {2**n_qubits}"
        )
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state is not normalised (|psi| = {norm})")
    return psi


def _apply_string(psi: np.ndarray, letters: str) -> np.ndarray:
    """Apply a Pauli string to a statevector without building the full matrix."""
    n = len(letters)
    out = psi.reshape((2,) * n) if n else psi.copy()
    for q, c in enumerate(letters):
        if c == "I":
            continue
        out = np.moveaxis(out, q, 0)
        if c == "X":
            out = out[::-1]
        elif c == "Y":
            out = out[::-1] * np.array([-1.0j, 1.0j]).reshape((2,) + (1,) * (n - 1))
        else:  # Z
            out = out * np.array([1.0, -1.0]).reshape((2,) + (1,) * (n - 1))
        out = np.moveaxis(out, 0, q)
    return out.reshape(-1)


def expectation(state: np.ndarray, op: Union[PauliString, PauliSum]) -> float:
    """Real expectation value ``<state| op |state>``.

    The imaginary residue is an internal consistency check: for a Hermitian
    operator it can only be rounding noise, so anything above ``1e-9`` raises
    rather than being silently discarded.
    """
    if isinstance(op, PauliString):
        op = PauliSum(op.n_qubits, {op.letters: 1.0})
    psi = _as_state(state, op.n_qubits)
    value = 0.0 + 0.0j
    for letters, coeff in op.items():
        value += coeff * np.vdot(psi, _apply_string(psi, letters))
    if abs(value.imag) > 1e-9:
        raise ArithmeticError(f"expectation of a Hermitian operator came out complex: {value}")
    return float(value.real)


def mixed_expectation(
    state: np.ndarray, a: PauliString, b: Union[PauliString, PauliSum]
) -> complex:
    """Complex expectation ``<state| a @ b |state>``.

    The product phase follows :func:`pauli_product`; with ``a = X`` and
    ``b = Y`` on ``|0>`` this returns ``+1j`` because ``X @ Y = iZ``.  Used by
    the imaginary-time solver, where the mixed moments are genuinely complex.
    """
    terms = [(b, 1.0)] if isinstance(b, PauliString) else [
        (PauliString(s), c) for s, c in b.items()
    ]
    if not terms:
        return 0.0 + 0.0j
    psi = _as_state(state, a.n_qubits)
    value = 0.0 + 0.0j
    for string_b, coeff in terms:
        prod, phase = pauli_product(a, string_b)
        value += coeff * phase * np.vdot(psi, _apply_string(psi, prod.letters))
    return complex(value)
