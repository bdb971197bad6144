"""Small-molecule eigensolver benchmarks on a simulated quantum register.

The package is organised bottom-up:

* :mod:`qcbench.pauli` -- Pauli-string algebra and operator decomposition.
* :mod:`qcbench.simulator` -- statevector circuits, noise, shot sampling.
* :mod:`qcbench.hamiltonian` -- molecular Hamiltonians, symmetry sectors.
* :mod:`qcbench.ansatz` -- particle-number-preserving circuit families.
* :mod:`qcbench.optimizers` -- derivative-free minimisers.
* :mod:`qcbench.vqe` -- variational eigensolvers and dissociation scans.
* :mod:`qcbench.qite` -- imaginary-time evolution and Krylov refinement.
* :mod:`qcbench.mitigation` -- readout and coherent-error mitigation.
* :mod:`qcbench.cli` -- command line entry point.

Qubit ordering is fixed package-wide: qubit 0 is the leftmost character of a
ket label and the most significant bit of a statevector index.  See
:data:`qcbench.pauli.BIT_ORDER_DOC`.
"""

__version__ = "0.1.0"
