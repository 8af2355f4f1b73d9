"""Heisenberg-picture conjugation of Majorana-qubit strings through gates.

``conjugate(g, s)`` returns U† s U for a single gate; circuits fold gate by
gate in reverse order.  Gates in the discrete Clifford family map a single
string to a single string; quarter-angle phase gates split a factor into a
two-term sum.
"""

from __future__ import annotations

import math
from fractions import Fraction

from fqtk.circuit import Circuit, Gate, MoveSwap, Registers
from fqtk import circuit as cg
from fqtk.majorana import (
    GAMMA,
    GAMMA_TILDE,
    MajoranaQubitString,
    OperatorSum,
    eta_index,
    eta_kind,
    eta_site,
    g,
    gt,
    pauli,
    zf_string,
)


class NonCliffordGateError(ValueError):
    """Raised when a gate has no symbolic conjugation rule: use exact-sim."""


def _one(s: MajoranaQubitString, coeff: complex = 1.0) -> OperatorSum:
    return OperatorSum([(coeff, s)])


def _rot_pair(a: MajoranaQubitString, b: MajoranaQubitString, theta: float) -> OperatorSum:
    """cos(theta) * a - sin(theta) * b, dropping exact zeros."""
    c, sn = math.cos(theta), math.sin(theta)
    terms = []
    if abs(c) > 1e-15:
        terms.append((c, a))
    if abs(sn) > 1e-15:
        terms.append((-sn, b))
    return OperatorSum(terms)


def _angle_of(gate: Gate) -> float:
    ang = gate.angle
    if ang is None:
        raise NonCliffordGateError(f"{gate.kind} requires an angle")
    return ang


def _pi_multiple(gate: Gate, num: int, den: int) -> bool:
    """True when the gate angle is exactly num/den * pi (mod 2 pi)."""
    if gate.angle_pi is None:
        return False
    return (gate.angle_pi - Fraction(num, den)) % 2 == 0


def _conjugate_factor(gate: Gate, factor: MajoranaQubitString) -> OperatorSum:
    """Image of a single Majorana factor or Pauli letter under U^dag (.) U."""
    kind, tg = gate.kind, gate.targets

    if kind in ("Tf", "Sf", "Zf", "PHASEf"):
        site = tg[0]
        if factor.etas and eta_site(factor.etas[0]) == site:
            if kind == "Tf":
                theta = math.pi / 4 if gate.dagger else -math.pi / 4
            elif kind == "Sf":
                theta = math.pi / 2 if gate.dagger else -math.pi / 2
            elif kind == "Zf":
                theta = math.pi
            else:
                theta = _angle_of(gate)
            # exp(-i theta n): g -> cos(theta) g - sin(theta) gt,
            #                  gt -> sin(theta) g + cos(theta) gt
            if eta_kind(factor.etas[0]) == GAMMA:
                return _rot_pair(g(site), gt(site), theta)
            return _rot_pair(gt(site), g(site), -theta)
        return _one(factor)

    if kind in ("H", "S", "Z", "X", "T", "Xrot"):
        q = tg[0]
        letters = dict(factor.paulis)
        if q not in letters:
            return _one(factor)
        letter = letters[q]
        if kind == "H":
            image = {"X": (1.0, "Z"), "Z": (1.0, "X"), "Y": (-1.0, "Y")}[letter]
            return _one(pauli(image[1], q), image[0])
        if kind == "S":
            if gate.dagger:
                image = {"X": (1.0, "Y"), "Y": (-1.0, "X"), "Z": (1.0, "Z")}[letter]
            else:
                image = {"X": (-1.0, "Y"), "Y": (1.0, "X"), "Z": (1.0, "Z")}[letter]
            return _one(pauli(image[1], q), image[0])
        if kind == "Z":
            sign = -1.0 if letter in ("X", "Y") else 1.0
            return _one(factor, sign)
        if kind == "X":
            sign = -1.0 if letter in ("Y", "Z") else 1.0
            return _one(factor, sign)
        if kind == "T":
            sgn = 1.0 if gate.dagger else -1.0
            if letter == "X":
                return OperatorSum([(1 / math.sqrt(2), pauli("X", q)),
                                    (sgn / math.sqrt(2), pauli("Y", q))])
            if letter == "Y":
                return OperatorSum([(1 / math.sqrt(2), pauli("Y", q)),
                                    (-sgn / math.sqrt(2), pauli("X", q))])
            return _one(factor)
        # Xrot(theta) = exp(-i theta/2 X): Z -> cos Z + sin Y, Y -> cos Y - sin Z
        theta = _angle_of(gate)
        if letter == "X":
            return _one(factor)
        if letter == "Z":
            return _rot_pair(pauli("Z", q), pauli("Y", q), -theta)
        return _rot_pair(pauli("Y", q), pauli("Z", q), theta)

    if kind in ("BRAID", "BRAIDtheta"):
        i, j = tg
        if kind == "BRAID":
            theta = math.pi / 2
        else:
            theta = _angle_of(gate)
        # exp(-(theta/2) gt_i g_j): rotation in the (gt_i, g_j) plane
        if factor.etas == (eta_index(i, GAMMA_TILDE),):
            return _rot_pair(gt(i), g(j), theta)
        if factor.etas == (eta_index(j, GAMMA),):
            return _rot_pair(g(j), gt(i), -theta)
        return _one(factor)

    if kind in ("CZf", "CZftheta"):
        if kind == "CZftheta":
            if _pi_multiple(gate, 0, 1):
                return _one(factor)
            if not _pi_multiple(gate, 1, 1):
                raise NonCliffordGateError(
                    f"CZftheta at angle {gate.angle_pi or gate.angle_raw}: "
                    "non-Clifford, use exact-sim")
        i, j = tg
        if factor.etas:
            site = eta_site(factor.etas[0])
            if site == i:
                return _one(factor * zf_string(j))
            if site == j:
                return _one(factor * zf_string(i))
        return _one(factor)

    if kind in ("CZqf", "CZqftheta"):
        if kind == "CZqftheta":
            if _pi_multiple(gate, 0, 1):
                return _one(factor)
            if not _pi_multiple(gate, 1, 1):
                raise NonCliffordGateError(
                    f"CZqftheta at angle {gate.angle_pi or gate.angle_raw}: "
                    "non-Clifford, use exact-sim")
        q, j = tg
        if factor.etas and eta_site(factor.etas[0]) == j:
            return _one(pauli("Z", q) * factor)
        letters = dict(factor.paulis)
        if q in letters and letters[q] in ("X", "Y"):
            return _one(factor * zf_string(j))
        return _one(factor)

    if kind == "CZ":
        q1, q2 = tg
        letters = dict(factor.paulis)
        if q1 in letters and letters[q1] in ("X", "Y"):
            return _one(factor * pauli("Z", q2))
        if q2 in letters and letters[q2] in ("X", "Y"):
            return _one(factor * pauli("Z", q1))
        return _one(factor)

    if kind == "CNOT":
        c, t = tg
        letters = dict(factor.paulis)
        if c in letters and letters[c] in ("X", "Y"):
            return _one(factor * pauli("X", t))
        if t in letters and letters[t] in ("Z", "Y"):
            return _one(factor * pauli("Z", c))
        return _one(factor)

    raise NonCliffordGateError(f"{kind}: non-Clifford, use exact-sim")


def _factors(s: MajoranaQubitString) -> list[MajoranaQubitString]:
    out = [MajoranaQubitString(0, (e,), ()) for e in s.etas]
    out.extend(MajoranaQubitString(0, (), ((q, letter),)) for q, letter in s.paulis)
    return out


def conjugate(gate: Gate, s: MajoranaQubitString) -> OperatorSum:
    """Return U† s U as an operator sum."""
    result = OperatorSum([(s.phase, MajoranaQubitString())])
    for f in _factors(s):
        result = result * _conjugate_factor(gate, f)
    return result


def _relabel_moveswap(s: MajoranaQubitString, i: int, j: int) -> MajoranaQubitString:
    factors = []
    swap = {i: j, j: i}
    for e in s.etas:
        site = swap.get(eta_site(e), eta_site(e))
        factors.append(eta_index(site, eta_kind(e)))
    prod = MajoranaQubitString(s.phase_pow, (), s.paulis)
    for f in factors:
        prod = prod * MajoranaQubitString(0, (f,), ())
    return prod


def conjugate_sum(gate: Gate, op: OperatorSum) -> OperatorSum:
    terms = []
    for coeff, s in op:
        for c2, s2 in conjugate(gate, s):
            terms.append((coeff * c2, s2))
    return OperatorSum(terms, tol=1e-14)


def conjugate_circuit(circ: Circuit, s: MajoranaQubitString | OperatorSum) -> OperatorSum:
    """Fold U† s U through a measurement-free circuit, last gate first."""
    op = OperatorSum.from_string(s) if isinstance(s, MajoranaQubitString) else s
    for node in reversed(circ.ops):
        if isinstance(node, Gate):
            op = conjugate_sum(node, op)
        elif isinstance(node, MoveSwap):
            op = OperatorSum([(c, _relabel_moveswap(t, node.i, node.j)) for c, t in op])
        else:
            raise ValueError("cannot conjugate through measurements or resets")
    return op


# -- braid compilations --------------------------------------------------------


def braid_variant(kind: str, i: int, j: int, registers: Registers | None = None) -> Circuit:
    """Compile the tilde-tilde, plain-plain, or inverse braiding from primitives.

        exp(-pi/4 gt_i gt_j) = Sf_j† BRAID_ij Sf_j
        exp(-pi/4 g_i g_j)   = Sf_i BRAID_ij Sf_i†
        BRAID_ij†           = Zf_j BRAID_ij Zf_j
    """
    if i == j:
        raise ValueError("braid targets must differ")
    if registers is None:
        registers = Registers(n_fermions=max(i, j) + 1)
    if kind == "tilde-tilde":
        ops = (cg.sf(j), cg.braid(i, j), cg.sf(j, dagger=True))
    elif kind == "plain-plain":
        ops = (cg.sf(i, dagger=True), cg.braid(i, j), cg.sf(i))
    elif kind == "inverse":
        ops = (cg.zf(j), cg.braid(i, j), cg.zf(j))
    else:
        raise ValueError(f"unknown braid variant {kind!r}")
    return Circuit(registers, ops)


def braid_variant_theta(kind: str, i: int, j: int, angle,
                        registers: Registers | None = None) -> Circuit:
    """Arbitrary-angle version of the tilde-tilde / plain-plain compilations."""
    if i == j:
        raise ValueError("braid targets must differ")
    if registers is None:
        registers = Registers(n_fermions=max(i, j) + 1)
    core = cg.braid_theta(i, j, angle)
    if kind == "tilde-tilde":
        ops = (cg.sf(j), core, cg.sf(j, dagger=True))
    elif kind == "plain-plain":
        ops = (cg.sf(i, dagger=True), core, cg.sf(i))
    else:
        raise ValueError(f"unknown braid variant {kind!r}")
    return Circuit(registers, ops)


def gate_class(gate: Gate | MoveSwap) -> str:
    """clifford / tgate / rotation / boson classification used by reports."""
    if isinstance(gate, MoveSwap):
        return "clifford"
    kind = gate.kind
    if kind in ("BS", "U_DISS", "U_TDOWN", "U_UPDOWN"):
        return "boson"
    if kind in ("Tf", "T"):
        return "tgate"
    if kind in ("H", "S", "Z", "X", "Sf", "Zf", "BRAID", "CZf", "CZqf", "CZ",
                "CNOT", "FSWAP", "SQRT_ISWAPf"):
        return "clifford"
    if kind == "F2Q":
        return "tgate"
    # angle kinds
    if gate.angle_pi is not None:
        frac = gate.angle_pi % 2
        if frac % Fraction(1, 2) == 0:
            return "clifford"
        if frac % Fraction(1, 4) == 0:
            return "tgate"
        return "rotation"
    return "rotation"
