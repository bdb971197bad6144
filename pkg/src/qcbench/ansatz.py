"""Circuit families for the four-orbital benchmark.

Two ansatz styles are provided.  The symmetry-preserving circuits (``spc``)
confine the state to one ``(n_electrons, s_z)`` sector with the minimal gate
budget: one CNOT and one parameter for the two-dimensional sectors, three
CNOTs and three parameters for the four-dimensional one.  The ``ucc3``
circuits are conventional three-parameter unitary coupled-cluster circuits
with eight CNOTs, used by the hidden-inverse study; their ``ucc3-hi`` variant
replaces four designated CNOTs by adjoint-compiled ones, which is invisible
at zero noise and cancels coherent over-rotations in pairs under noise.

The recurring single-qubit block is ``R(theta) = Rz(pi) Ry(theta + pi/2)``
(rightmost gate applied first); ``Z`` gates are emitted as ``Rz(pi)``, which
keeps the advertised 21-gate single-qubit count for the big SPC exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .hamiltonian import SymmetrySector
from .simulator import Angle, Circuit, Gate, Param

HALF_PI = math.pi / 2.0

#: Parameters at which spc(2,0) prepares the s_z=0 triplet exactly.
TRIPLET_PARAMS: Tuple[float, float, float] = (-math.pi / 4, -math.pi / 4, 3 * math.pi / 4)

#: Ansatz names accepted by the command line.
ANSATZ_NAMES = ("spc-ne1", "spc-ne2", "spc-ne3", "ucc3", "ucc3-hi")


def _shift(theta: Angle, delta: float) -> Angle:
    return theta.shifted(delta) if isinstance(theta, Param) else float(theta) + delta


def _neg(theta: Angle) -> Angle:
    return -theta if isinstance(theta, Param) else -float(theta)


def _r(c: Circuit, q: int, theta: Angle) -> None:
    """R(theta): Ry(theta + pi/2) then Rz(pi)."""
    c.add("RY", q, _shift(theta, HALF_PI))
    c.add("RZ", q, math.pi)


def _rdg(c: Circuit, q: int, theta: Angle) -> None:
    """Adjoint of R(theta): Rz(-pi) then Ry(-theta - pi/2)."""
    c.add("RZ", q, -math.pi)
    c.add("RY", q, _shift(_neg(theta), -HALF_PI))


def _spc_two_dim(occupied: Tuple[int, ...], rotated: int, cnot: Tuple[int, int],
                 name: str) -> Circuit:
    """Shared skeleton of all one-parameter sector circuits."""
    c = Circuit(4, name=name)
    for q in occupied:
        c.add("X", q)
    t1 = Param("t1")
    _rdg(c, rotated, t1)
    c.add("X", rotated)
    _r(c, rotated, t1)
    c.add("CNOT", cnot)
    return c


def spc(sector: SymmetrySector) -> Circuit:
    """Symmetry-preserving circuit spanning the requested sector.

    Supported sectors: ``(1, +-1/2)``, ``(3, +-1/2)`` and ``(2, 0)``.  The
    spin-down variants are the spin-up circuits with the orbital pairs
    swapped (qubits 0,1 with 2,3).
    """
    key = (sector.n_electrons, sector.s_z)
    if key == (1, 0.5):
        return _spc_two_dim((0,), 1, (1, 0), "spc-ne1")
    if key == (1, -0.5):
        return _spc_two_dim((2,), 3, (3, 2), "spc-ne1-down")
    if key == (3, 0.5):
        return _spc_two_dim((0, 1, 3), 2, (2, 3), "spc-ne3")
    if key == (3, -0.5):
        return _spc_two_dim((2, 3, 1), 0, (0, 1), "spc-ne3-down")
    if key == (2, 0.0):
        return _spc_ne2()
    raise ValueError(f"no symmetry-preserving circuit for sector {sector}")


def _spc_ne2() -> Circuit:
    c = Circuit(4, name="spc-ne2")
    t1, t2, t3 = Param("t1"), Param("t2"), Param("t3")
    c.add("X", 0)
    c.add("X", 3)
    c.add("X", 2)
    _rdg(c, 1, t1)
    _rdg(c, 2, t2)
    c.add("X", 1)
    c.add("X", 2)
    _r(c, 1, t1)
    _r(c, 2, t2)
    c.add("CNOT", (2, 3))
    c.add("RZ", 1, math.pi)  # a plain Z up to global phase
    c.add("H", 3)
    c.add("CNOT", (1, 3))
    _rdg(c, 1, t3)
    c.add("H", 3)
    c.add("X", 1)
    _r(c, 1, t3)
    c.add("CNOT", (1, 0))
    return c


def triplet_circuit() -> Circuit:
    """spc(2,0) frozen at the parameters that emit the s_z=0 triplet."""
    c = spc(SymmetrySector(2, 0.0)).bind(TRIPLET_PARAMS)
    c.name = "triplet"
    return c


# ---------------------------------------------------------------------------
# ASWAP
# ---------------------------------------------------------------------------

def aswap(theta: float, phi: float, qubits: Tuple[int, int] = (0, 1)) -> Gate:
    """The particle-conserving two-qubit rotation as a primitive gate."""
    return Gate("ASWAP", tuple(qubits), (float(theta), float(phi)))


def aswap_decomposed(theta: Angle, phi: float, qubits: Tuple[int, int] = (0, 1),
                     n_qubits: int = 2) -> Circuit:
    """CNOT/single-qubit expansion of ``aswap``, equal up to global phase.

    Pattern: CNOT down-up, adjoint R on the lower qubit, CNOT up-down,
    R on the lower qubit, CNOT down-up, with
    ``R(theta, phi) = Rz(phi + pi) Ry(theta + pi/2)``.
    """
    top, bottom = qubits
    c = Circuit(n_qubits, name="aswap")
    c.add("CNOT", (bottom, top))
    c.add("RZ", bottom, -(float(phi) + math.pi))
    c.add("RY", bottom, _shift(_neg(theta), -HALF_PI))
    c.add("CNOT", (top, bottom))
    c.add("RY", bottom, _shift(theta, HALF_PI))
    c.add("RZ", bottom, float(phi) + math.pi)
    c.add("CNOT", (bottom, top))
    return c


# ---------------------------------------------------------------------------
# UCC-3
# ---------------------------------------------------------------------------

def ucc3(hidden_inverse: bool = False) -> Circuit:
    """Three-parameter unitary coupled-cluster circuit on the full register.

    Starts from the reference ket |1010> (built in by the leading X gates) and
    spans the ne2_sz0 sector.  With ``hidden_inverse`` four of the eight CNOTs
    compile to the inverted native pattern; the ideal unitary is unchanged.
    """
    flip = "CNOTDG" if hidden_inverse else "CNOT"
    t1, t2, t3 = Param("t1"), Param("t2"), Param("t3")
    c = Circuit(4, name="ucc3-hi" if hidden_inverse else "ucc3")
    c.add("X", 0).add("H", 1).add("X", 2).add("H", 3)
    c.add("RX", 0, -HALF_PI).add("RX", 2, -HALF_PI)
    c.add("CNOT", (0, 1)).add("CNOT", (2, 3))
    c.add("RZ", 1, t1).add("RZ", 3, t2)
    c.add(flip, (2, 3))
    c.add("RX", 2, HALF_PI)
    c.add("H", 2)
    c.add("CNOT", (1, 2))
    c.add("CNOT", (2, 3))
    c.add("RZ", 3, t3)
    c.add(flip, (2, 3))
    c.add(flip, (1, 2)).add("H", 3)
    c.add(flip, (0, 1)).add("H", 2)
    c.add("RX", 0, HALF_PI).add("H", 1)
    return c


# ---------------------------------------------------------------------------
# native compilation and bookkeeping
# ---------------------------------------------------------------------------

def compile_ion_trap(circuit: Circuit) -> Circuit:
    """Rewrite CNOT/CNOTDG into the native XX-gate pulse patterns.

    CNOT becomes ``Ry(pi/2)`` on the control, ``XX(pi/4)``, ``Rx(-pi/2)`` on
    both qubits, ``Ry(-pi/2)`` on the control.  The adjoint pattern uses
    ``XX(-pi/4)`` with ``Rx(+pi/2)`` on both qubits ahead of it.  Other gates
    pass through; two-qubit gates without a native pattern are rejected.
    """
    out = Circuit(circuit.n_qubits, name=circuit.name)
    for g in circuit.gates:
        if g.kind == "CNOT":
            ctrl, tgt = g.qubits
            out.add("RY", ctrl, HALF_PI)
            out.add("XX", (ctrl, tgt), math.pi / 4.0)
            out.add("RX", ctrl, -HALF_PI)
            out.add("RX", tgt, -HALF_PI)
            out.add("RY", ctrl, -HALF_PI)
        elif g.kind == "CNOTDG":
            ctrl, tgt = g.qubits
            out.add("RY", ctrl, HALF_PI)
            out.add("RX", ctrl, HALF_PI)
            out.add("RX", tgt, HALF_PI)
            out.add("XX", (ctrl, tgt), -math.pi / 4.0)
            out.add("RY", ctrl, -HALF_PI)
        elif g.kind == "STATEPREP":
            out.gates.append(g)
        elif len(g.qubits) == 1:
            out.gates.append(g)
        else:
            raise ValueError(f"no native decomposition for {g.kind}")
    return out


def resource_count(circuit: Circuit) -> Dict[str, int]:
    """CNOT-class, parameter and single-qubit gate totals of a circuit."""
    cnots = sum(1 for g in circuit.gates if g.kind in ("CNOT", "CNOTDG"))
    singles = sum(1 for g in circuit.gates if len(g.qubits) == 1 and g.kind != "STATEPREP")
    return {
        "cnot_count": cnots,
        "parameter_count": len(circuit.parameters),
        "single_qubit_count": singles,
    }


@dataclass(frozen=True)
class AnsatzSpec:
    name: str
    family: str  # "spc" or "ucc"
    sector: Optional[SymmetrySector]
    parameter_count: int


_BY_NAME = {
    "spc-ne1": (lambda: spc(SymmetrySector(1, 0.5)), "spc", SymmetrySector(1, 0.5)),
    "spc-ne2": (lambda: spc(SymmetrySector(2, 0.0)), "spc", SymmetrySector(2, 0.0)),
    "spc-ne3": (lambda: spc(SymmetrySector(3, 0.5)), "spc", SymmetrySector(3, 0.5)),
    "ucc3": (lambda: ucc3(False), "ucc", SymmetrySector(2, 0.0)),
    "ucc3-hi": (lambda: ucc3(True), "ucc", SymmetrySector(2, 0.0)),
}


def build_ansatz(name: str) -> Circuit:
    if name not in _BY_NAME:
        raise ValueError(f"unknown ansatz {name!r}; choose from {ANSATZ_NAMES}")
    return _BY_NAME[name][0]()


def ansatz_spec(name: str) -> AnsatzSpec:
    if name not in _BY_NAME:
        raise ValueError(f"unknown ansatz {name!r}; choose from {ANSATZ_NAMES}")
    builder, family, sector = _BY_NAME[name]
    return AnsatzSpec(name, family, sector, len(builder().parameters))
