"""Fermion-qubit quantum computing toolkit.

Symbolic Majorana-Pauli operator algebra, a Heisenberg-picture Clifford
conjugation engine, an exact dense simulator over mixed qubit/fermion/boson
registers, fermionic stabilizer codes (repetition and triangular color codes),
quantum-simulation gadgets including the fermionic fast Fourier transform,
and numerics for the molecular-dissociation pairing gate.
"""

from fqtk.majorana import MajoranaQubitString, OperatorSum, PauliString, canonicalize
from fqtk.circuit import Circuit, Gate, Registers

__all__ = [
    "MajoranaQubitString",
    "OperatorSum",
    "PauliString",
    "canonicalize",
    "Circuit",
    "Gate",
    "Registers",
]
