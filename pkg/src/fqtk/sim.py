"""Exact dense state-vector simulation over qubit/fermion/boson registers.

Basis ordering is qubits, then fermion modes ascending, then boson modes;
the leftmost factor is the most significant index.  Fermion modes are stored
as Jordan-Wigner qubits under the fixed convention

    g_i  -> (prod_{j<i} Z_j) X_i,      gt_i -> (prod_{j<i} Z_j) Y_i

which makes p_i^ = (g_i + i gt_i)/2 create into leg index 0: a fermion leg
index of 0 means occupied and 1 means empty.  All occupation-labelled input
and output goes through helpers that hide this inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from fqtk.circuit import (
    BOSON,
    Circuit,
    Conditioned,
    FERMION,
    Gate,
    KIND_SIGNATURES,
    Measure,
    MoveSwap,
    QUBIT,
    Registers,
    Reset,
)
from fqtk.majorana import (
    GAMMA,
    GAMMA_TILDE,
    MajoranaQubitString,
    OperatorSum,
    PauliString,
    canonicalize,
    eta_index,
    jordan_wigner,
)


@dataclass(frozen=True)
class Layout:
    n_qubits: int = 0
    n_fermions: int = 0
    boson_cutoffs: tuple[int, ...] = ()

    @classmethod
    def of(cls, registers: Registers) -> "Layout":
        return cls(registers.n_qubits, registers.n_fermions, registers.boson_cutoffs)

    @property
    def legs(self) -> tuple[int, ...]:
        return (2,) * self.n_qubits + (2,) * self.n_fermions + tuple(
            c + 1 for c in self.boson_cutoffs)

    @property
    def dim(self) -> int:
        d = 1
        for n in self.legs:
            d *= n
        return d

    def qubit_leg(self, q: int) -> int:
        return q

    def fermion_leg(self, i: int) -> int:
        return self.n_qubits + i

    def boson_leg(self, m: int) -> int:
        return self.n_qubits + self.n_fermions + m

    def registers(self) -> Registers:
        return Registers(self.n_qubits, self.n_fermions, self.boson_cutoffs)


@dataclass
class StateVector:
    layout: Layout
    vec: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.layout, self.vec.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def normalized(self) -> "StateVector":
        return StateVector(self.layout, self.vec / np.linalg.norm(self.vec))

    def tensor(self) -> np.ndarray:
        return self.vec.reshape(self.layout.legs)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.vec, other.vec))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2


class TruncationError(RuntimeError):
    """Boson amplitude leaked into the top truncation levels."""


# -- state construction -------------------------------------------------------


def vacuum(layout: Layout) -> StateVector:
    """All qubits |0>, all fermion modes empty, all boson modes empty."""
    vec = np.zeros(layout.dim, dtype=complex)
    # empty fermion modes sit at leg index 1
    idx = 0
    for leg, size in enumerate(layout.legs):
        pos = 1 if layout.n_qubits <= leg < layout.n_qubits + layout.n_fermions else 0
        idx = idx * size + pos
    vec[idx] = 1.0
    return StateVector(layout, vec)


def init_state(layout: Layout, qubits=(), fermions=(), bosons=()) -> StateVector:
    """Product basis state from occupation labels.

    Fermion creation operators are applied in descending site order, so two
    occupied modes i < j give p_j^ p_i^ |vac>.
    """
    state = vacuum(layout)
    t = state.tensor()
    for q, bit in enumerate(qubits):
        if bit:
            t = np.flip(t, axis=layout.qubit_leg(q))
    for m, occ in enumerate(bosons):
        if occ > layout.boson_cutoffs[m]:
            raise ValueError(f"boson occupation {occ} exceeds cutoff {layout.boson_cutoffs[m]}")
        leg = layout.boson_leg(m)
        rolled = np.zeros_like(t)
        sl_src = [slice(None)] * t.ndim
        sl_dst = [slice(None)] * t.ndim
        sl_src[leg] = 0
        sl_dst[leg] = occ
        rolled[tuple(sl_dst)] = t[tuple(sl_src)]
        t = rolled
    state = StateVector(layout, t.reshape(-1))
    for i in sorted(range(len(fermions)), reverse=True):
        if fermions[i]:
            state = apply_operator_sum(state, creation_op(i))
    return state


def creation_op(site: int) -> OperatorSum:
    """p_i^ = (g_i + i gt_i)/2."""
    return OperatorSum([
        (0.5, MajoranaQubitString(0, (eta_index(site, GAMMA),), ())),
        (0.5j, MajoranaQubitString(0, (eta_index(site, GAMMA_TILDE),), ())),
    ])


def annihilation_op(site: int) -> OperatorSum:
    return creation_op(site).adjoint()


def number_op(site: int) -> OperatorSum:
    """n_i = (1 + i gt_i g_i)/2."""
    return OperatorSum([
        (0.5, MajoranaQubitString()),
        (0.5j, canonicalize([eta_index(site, GAMMA_TILDE), eta_index(site, GAMMA)])),
    ])


# -- string application -------------------------------------------------------


def _apply_letter(t: np.ndarray, leg: int, letter: str) -> np.ndarray:
    if letter == "X":
        return np.flip(t, axis=leg)
    sl0 = [slice(None)] * t.ndim
    sl1 = [slice(None)] * t.ndim
    sl0[leg] = 0
    sl1[leg] = 1
    if letter == "Z":
        out = t.copy()
        out[tuple(sl1)] *= -1
        return out
    # Y = diag(-i, i) X
    out = np.flip(t, axis=leg).copy()
    out[tuple(sl0)] *= -1j
    out[tuple(sl1)] *= 1j
    return out


def apply_pauli_string(state: StateVector, p: PauliString) -> StateVector:
    t = state.tensor()
    for q, letter in p.letters:
        t = _apply_letter(t, q, letter)
    return StateVector(state.layout, (p.phase * t).reshape(-1))


def apply_string(state: StateVector, s: MajoranaQubitString) -> StateVector:
    p = jordan_wigner(s, state.layout.n_fermions, state.layout.n_qubits)
    return apply_pauli_string(state, p)


def apply_operator_sum(state: StateVector, op: OperatorSum) -> StateVector:
    out = np.zeros_like(state.vec)
    for coeff, s in op:
        out += coeff * apply_string(state, s).vec
    return StateVector(state.layout, out)


def expectation(state: StateVector, op: OperatorSum | MajoranaQubitString) -> complex:
    if isinstance(op, MajoranaQubitString):
        op = OperatorSum.from_string(op)
    return state.overlap(apply_operator_sum(state, op))


# -- sparse operator cache for boson-coupled gates -----------------------------

_SPARSE_CACHE: dict[tuple, sp.csr_matrix] = {}


def _kron_chain(mats) -> sp.csr_matrix:
    out = None
    for m in mats:
        out = m if out is None else sp.kron(out, m, format="csr")
    return out.tocsr()


def _sparse_boson_lowering(layout: Layout, mode: int) -> sp.csr_matrix:
    key = (layout, "b", mode)
    if key not in _SPARSE_CACHE:
        mats = []
        for leg, size in enumerate(layout.legs):
            if leg == layout.boson_leg(mode):
                data = np.sqrt(np.arange(1, size))
                mats.append(sp.diags(data, offsets=1, format="csr"))
            else:
                mats.append(sp.identity(size, format="csr"))
        _SPARSE_CACHE[key] = _kron_chain(mats)
    return _SPARSE_CACHE[key]


def _sparse_creation(layout: Layout, site: int) -> sp.csr_matrix:
    key = (layout, "pdag", site)
    if key not in _SPARSE_CACHE:
        Z = sp.csr_matrix(np.diag([1.0, -1.0]))
        raise_occ = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))  # |occ><empty|
        mats = []
        for leg, size in enumerate(layout.legs):
            f = leg - layout.n_qubits
            if 0 <= f < layout.n_fermions:
                if f < site:
                    mats.append(Z)
                elif f == site:
                    mats.append(raise_occ)
                else:
                    mats.append(sp.identity(2, format="csr"))
            else:
                mats.append(sp.identity(size, format="csr"))
        _SPARSE_CACHE[key] = _kron_chain(mats)
    return _SPARSE_CACHE[key]


# -- gate application ----------------------------------------------------------


def _diag_phase_fermion(state: StateVector, site: int, factor: complex) -> StateVector:
    t = state.tensor().copy()
    sl = [slice(None)] * t.ndim
    sl[state.layout.fermion_leg(site)] = 0  # occupied slice
    t[tuple(sl)] *= factor
    return StateVector(state.layout, t.reshape(-1))


def _diag_phase_joint(state: StateVector, legs_and_indices, factor: complex) -> StateVector:
    t = state.tensor().copy()
    sl = [slice(None)] * t.ndim
    for leg, index in legs_and_indices:
        sl[leg] = index
    t[tuple(sl)] *= factor
    return StateVector(state.layout, t.reshape(-1))


def _apply_qubit_matrix(state: StateVector, q: int, mat: np.ndarray) -> StateVector:
    t = state.tensor()
    leg = state.layout.qubit_leg(q)
    out = np.moveaxis(np.tensordot(mat, t, axes=([1], [leg])), 0, leg)
    return StateVector(state.layout, np.ascontiguousarray(out).reshape(-1))


def _hop_generator(i: int, j: int) -> OperatorSum:
    """p_i^ p_j + p_j^ p_i = (i/2)(gt_i g_j + gt_j g_i)."""
    return OperatorSum([
        (0.5j, canonicalize([eta_index(i, GAMMA_TILDE), eta_index(j, GAMMA)])),
        (0.5j, canonicalize([eta_index(j, GAMMA_TILDE), eta_index(i, GAMMA)])),
    ])


def _apply_hopping(state: StateVector, i: int, j: int, theta: float) -> StateVector:
    """exp(-i theta (p_i^ p_j + h.c.)); h^3 = h gives a closed form."""
    h = _hop_generator(i, j)
    hv = apply_operator_sum(state, h)
    hhv = apply_operator_sum(hv, h)
    vec = state.vec + (math.cos(theta) - 1.0) * hhv.vec - 1j * math.sin(theta) * hv.vec
    return StateVector(state.layout, vec)


def _moveswap_signs(layout: Layout, i: int, j: int) -> np.ndarray:
    """Sign tensor for exchanging fermion modes i < j (after axis swap)."""
    lo, hi = min(i, j), max(i, j)
    span = hi - lo + 1
    shape = [1] * len(layout.legs)
    bits = np.indices([2] * span)  # bits inside the span, already swapped order
    occ = 1 - bits
    o_i, o_j = occ[0], occ[-1]
    between = occ[1:-1].sum(axis=0) if span > 2 else 0
    expo = o_i * o_j + (o_i + o_j) * between
    sign = np.where(expo % 2 == 0, 1.0, -1.0)
    full_shape = list(shape)
    for k in range(span):
        full_shape[layout.fermion_leg(lo + k)] = 2
    return sign.reshape(full_shape)


def apply_move_swap(state: StateVector, i: int, j: int) -> StateVector:
    if i == j:
        return state
    t = np.swapaxes(state.tensor(), state.layout.fermion_leg(i), state.layout.fermion_leg(j))
    t = t * _moveswap_signs(state.layout, i, j)
    return StateVector(state.layout, np.ascontiguousarray(t).reshape(-1))


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.diag([1, 1j]).astype(complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)
_T = np.diag([1, np.exp(1j * math.pi / 4)])


def apply_gate(state: StateVector, gate: Gate, truncation_tol: float = 1e-10) -> StateVector:
    layout = state.layout
    kind = gate.kind
    tg = gate.targets

    if kind in ("Tf", "Sf", "Zf", "PHASEf"):
        if kind == "Tf":
            theta = -math.pi / 4
        elif kind == "Sf":
            theta = -math.pi / 2
        elif kind == "Zf":
            theta = math.pi
        else:
            theta = gate.angle
        if gate.dagger:
            theta = -theta
        # exp(-i theta n): occupied amplitude gains e^{-i theta}
        return _diag_phase_fermion(state, tg[0], np.exp(-1j * theta))

    if kind in ("CZf", "CZftheta"):
        theta = math.pi if kind == "CZf" else gate.angle
        legs = [(layout.fermion_leg(tg[0]), 0), (layout.fermion_leg(tg[1]), 0)]
        return _diag_phase_joint(state, legs, np.exp(-1j * theta))

    if kind in ("CZqf", "CZqftheta"):
        theta = math.pi if kind == "CZqf" else gate.angle
        legs = [(layout.qubit_leg(tg[0]), 1), (layout.fermion_leg(tg[1]), 0)]
        return _diag_phase_joint(state, legs, np.exp(-1j * theta))

    if kind == "CZ":
        legs = [(layout.qubit_leg(tg[0]), 1), (layout.qubit_leg(tg[1]), 1)]
        return _diag_phase_joint(state, legs, -1.0)

    if kind == "CNOT":
        c, t = tg
        state = _apply_qubit_matrix(state, t, _H)
        state = _diag_phase_joint(state, [(layout.qubit_leg(c), 1), (layout.qubit_leg(t), 1)], -1.0)
        return _apply_qubit_matrix(state, t, _H)

    if kind in ("H", "S", "Z", "X", "T", "Xrot"):
        q = tg[0]
        if kind == "H":
            mat = _H
        elif kind == "S":
            mat = _S.conj() if gate.dagger else _S
        elif kind == "Z":
            mat = _Z
        elif kind == "X":
            mat = _X
        elif kind == "T":
            mat = _T.conj() if gate.dagger else _T
        else:
            theta = gate.angle
            mat = math.cos(theta / 2) * np.eye(2) - 1j * math.sin(theta / 2) * _X
        return _apply_qubit_matrix(state, q, mat)

    if kind in ("BRAID", "BRAIDtheta"):
        theta = math.pi / 2 if kind == "BRAID" else gate.angle
        i, j = tg
        # exp(-(theta/2) gt_i g_j) = cos(theta/2) - sin(theta/2) gt_i g_j
        s = canonicalize([eta_index(i, GAMMA_TILDE), eta_index(j, GAMMA)])
        sv = apply_string(state, s)
        vec = math.cos(theta / 2) * state.vec - math.sin(theta / 2) * sv.vec
        return StateVector(layout, vec)

    if kind == "SQRT_ISWAPf":
        return _apply_hopping(state, tg[0], tg[1], -math.pi / 4)

    if kind in ("HOPf", "U_TDOWN", "U_UPDOWN"):
        theta = gate.angle
        if gate.dagger:
            theta = -theta
        return _apply_hopping(state, tg[0], tg[1], theta)

    if kind == "BS":
        theta = gate.angle
        if gate.dagger:
            theta = -theta
        b1 = _sparse_boson_lowering(layout, tg[0])
        b2 = _sparse_boson_lowering(layout, tg[1])
        gen = theta * (b1.conj().T @ b2 - b2.conj().T @ b1)
        vec = spla.expm_multiply(gen.tocsc(), state.vec)
        out = StateVector(layout, vec)
        _check_truncation(out, tg[0], truncation_tol)
        _check_truncation(out, tg[1], truncation_tol)
        return out

    if kind == "U_DISS":
        mode, up, down = tg
        if gate.n_cal is None or gate.n_cal <= 0:
            return state  # no molecules: nothing to dissociate
        strength = math.pi / (4.0 * math.sqrt(gate.n_cal))
        if gate.dagger:
            strength = -strength
        b = _sparse_boson_lowering(layout, mode)
        pd_up = _sparse_creation(layout, up)
        pd_down = _sparse_creation(layout, down)
        pair = b @ pd_up @ pd_down
        coup = np.exp(1j * gate.phi) * pair
        gen = -1j * strength * (coup + coup.conj().T)
        vec = spla.expm_multiply(gen.tocsc(), state.vec)
        out = StateVector(layout, vec)
        _check_truncation(out, mode, truncation_tol)
        return out

    raise ValueError(f"no dense rule for gate kind {kind!r}")


def _check_truncation(state: StateVector, mode: int, tol: float):
    cutoff = state.layout.boson_cutoffs[mode]
    t = state.tensor()
    sl = [slice(None)] * t.ndim
    sl[state.layout.boson_leg(mode)] = cutoff
    leak = float(np.sum(np.abs(t[tuple(sl)]) ** 2))
    if leak > tol:
        raise TruncationError(
            f"boson mode {mode} top-level population {leak:.3e} exceeds {tol:.1e}")


# -- measurement and branching -------------------------------------------------


def _outcome_slice(layout: Layout, register: str, index: int, value: int):
    if register == QUBIT:
        return layout.qubit_leg(index), value
    if register == FERMION:
        # occupation `value` sits at leg index 1 - value
        return layout.fermion_leg(index), 1 - value
    raise ValueError(f"cannot measure register {register!r}")


def branch(state: StateVector, register: str, index: int, value: int) -> tuple[float, StateVector]:
    """Project onto a measurement outcome; returns (probability, normalized state)."""
    leg, pos = _outcome_slice(state.layout, register, index, value)
    t = state.tensor().copy()
    sl = [slice(None)] * t.ndim
    sl[leg] = 1 - pos
    t[tuple(sl)] = 0.0
    prob = float(np.sum(np.abs(t) ** 2))
    if prob <= 1e-300:
        raise ValueError(f"zero-probability branch {register}[{index}]={value}")
    return prob, StateVector(state.layout, t.reshape(-1) / math.sqrt(prob))


def measure(state: StateVector, register: str, index: int,
            rng: np.random.Generator) -> tuple[int, float, StateVector]:
    leg, pos1 = _outcome_slice(state.layout, register, index, 1)
    t = state.tensor()
    sl = [slice(None)] * t.ndim
    sl[leg] = pos1
    p1 = float(np.sum(np.abs(t[tuple(sl)]) ** 2)) / max(state.norm**2, 1e-300)
    outcome = 1 if rng.random() < p1 else 0
    prob, collapsed = branch(state, register, index, outcome)
    return outcome, prob, collapsed


def reset_register(state: StateVector, register: str, index: int,
                   rng: np.random.Generator | None = None) -> StateVector:
    """Measure, then repump to the empty/zero state."""
    if rng is None:
        # deterministic variant: keep the dominant branch
        probs = []
        for val in (0, 1):
            try:
                probs.append((branch(state, register, index, val)[0], val))
            except ValueError:
                probs.append((0.0, val))
        outcome = max(probs)[1]
        state = branch(state, register, index, outcome)[1]
    else:
        outcome, _, state = measure(state, register, index, rng)
    if outcome == 1:
        leg, _ = _outcome_slice(state.layout, register, index, 1)
        t = state.tensor()
        t = np.flip(t, axis=leg)  # move population to the 0/empty slot
        state = StateVector(state.layout, np.ascontiguousarray(t).reshape(-1))
    return state


def run_circuit(state: StateVector, circ: Circuit, rng: np.random.Generator | None = None,
                branch_outcomes: dict[str, int] | None = None,
                ) -> tuple[StateVector, dict[str, int], float]:
    """Execute a circuit; returns (state, measurement records, branch probability).

    With ``branch_outcomes`` the listed measurements are projected
    deterministically (the tests' branch() path); otherwise sampling needs rng.
    """
    records: dict[str, int] = {}
    prob = 1.0
    for op in circ.ops:
        if isinstance(op, Gate):
            state = apply_gate(state, op)
        elif isinstance(op, MoveSwap):
            state = apply_move_swap(state, op.i, op.j)
        elif isinstance(op, Measure):
            if branch_outcomes is not None and op.record in branch_outcomes:
                val = branch_outcomes[op.record]
                p, state = branch(state, op.register, op.index, val)
                prob *= p
                records[op.record] = val
            else:
                if rng is None:
                    raise ValueError("sampling a measurement requires an rng")
                val, p, state = measure(state, op.register, op.index, rng)
                prob *= p
                records[op.record] = val
        elif isinstance(op, Conditioned):
            if records.get(op.record) == op.value:
                state = apply_gate(state, op.gate)
        elif isinstance(op, Reset):
            state = reset_register(state, op.register, op.index, rng)
    return state, records, prob


# -- matrices for oracle comparisons -------------------------------------------


def string_matrix(s: MajoranaQubitString, layout: Layout) -> np.ndarray:
    dim = layout.dim
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        basis = StateVector(layout, np.zeros(dim, dtype=complex))
        basis.vec[col] = 1.0
        out[:, col] = apply_string(basis, s).vec
    return out


def sum_matrix(op: OperatorSum, layout: Layout) -> np.ndarray:
    dim = layout.dim
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        basis = StateVector(layout, np.zeros(dim, dtype=complex))
        basis.vec[col] = 1.0
        out[:, col] = apply_operator_sum(basis, op).vec
    return out


def gate_matrix(gate: Gate, layout: Layout) -> np.ndarray:
    dim = layout.dim
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        basis = StateVector(layout, np.zeros(dim, dtype=complex))
        basis.vec[col] = 1.0
        out[:, col] = apply_gate(basis, gate).vec
    return out


def circuit_matrix(circ: Circuit, layout: Layout | None = None) -> np.ndarray:
    layout = layout or Layout.of(circ.registers)
    dim = layout.dim
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        basis = StateVector(layout, np.zeros(dim, dtype=complex))
        basis.vec[col] = 1.0
        state, _, _ = run_circuit(basis, circ)
        out[:, col] = state.vec
    return out


def same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    ia, ja = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(b[ia, ja]) < 1e-14:
        return False
    phase = a[ia, ja] / b[ia, ja]
    if abs(abs(phase) - 1.0) > tol:
        return False
    return bool(np.max(np.abs(a - phase * b)) <= tol)


# -- fermion populations and tomography ----------------------------------------


def fermion_populations(state: StateVector) -> np.ndarray:
    """Probabilities indexed by fermion occupations, bosons and qubits traced out."""
    layout = state.layout
    t = np.abs(state.tensor()) ** 2
    axes = [layout.qubit_leg(q) for q in range(layout.n_qubits)]
    axes += [layout.boson_leg(m) for m in range(len(layout.boson_cutoffs))]
    pops = t.sum(axis=tuple(axes)) if axes else t
    for axis in range(pops.ndim):
        pops = np.flip(pops, axis=axis)  # leg bit -> occupation
    return pops


def population(state: StateVector, occupations: tuple[int, ...]) -> float:
    return float(fermion_populations(state)[tuple(occupations)])


@dataclass
class DensityMatrixOnSubspace:
    labels: tuple[tuple[int, ...], ...]
    matrix: np.ndarray

    def __post_init__(self):
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        if np.max(np.abs(self.matrix - h)) > 1e-9:
            raise ValueError("reconstructed matrix is not Hermitian")
        self.matrix = h
        if np.min(np.linalg.eigvalsh(h)) < -1e-6:
            raise ValueError("reconstructed matrix has a significantly negative eigenvalue")

    def fidelity_with(self, amplitudes: np.ndarray) -> float:
        v = np.asarray(amplitudes, dtype=complex)
        return float(np.real(v.conj() @ self.matrix @ v))


def project_density_matrix(state: StateVector,
                           labels: tuple[tuple[int, ...], ...]) -> np.ndarray:
    """Exact reduced fermion density matrix block on the labelled configurations."""
    layout = state.layout
    t = state.tensor()
    # flatten to (fermion configs, environment)
    fermion_axes = [layout.fermion_leg(i) for i in range(layout.n_fermions)]
    other_axes = [a for a in range(t.ndim) if a not in fermion_axes]
    perm = fermion_axes + other_axes
    m = np.transpose(t, perm).reshape(2 ** layout.n_fermions, -1)
    rows = [_config_row(label) for label in labels]
    block = m[rows, :]
    return block @ block.conj().T


def _config_row(occupations: tuple[int, ...]) -> int:
    row = 0
    for occ in occupations:
        row = row * 2 + (1 - occ)
    return row


def subspace_tomography(initial: StateVector, prepare: Circuit,
                        rotations: list[Circuit | None],
                        ideal_rotations: list[np.ndarray],
                        labels: tuple[tuple[int, ...], ...],
                        ) -> DensityMatrixOnSubspace:
    """Linear-inversion state tomography restricted to a fermion-label subspace.

    Each setting applies one rotation circuit (None means no pulse) after the
    preparation and records the populations of the labelled configurations.
    The inversion assumes the ideal rotation matrices, so imperfections of the
    physical rotation pulses show up as reconstruction error, as they would in
    an experiment.
    """
    d = len(labels)
    prepared, _, _ = run_circuit(initial.copy(), prepare)
    design = []
    values = []
    for rot, ideal in zip(rotations, ideal_rotations):
        state = prepared.copy()
        if rot is not None:
            state, _, _ = run_circuit(state, rot)
        pops = fermion_populations(state)
        for k, label in enumerate(labels):
            row = np.outer(ideal[k, :], ideal[k, :].conj()).reshape(-1)
            design.append(_real_imag_row(row, d))
            values.append(pops[tuple(label)])
    design = np.array(design)
    if np.linalg.matrix_rank(design, tol=1e-9) < d * d:
        raise ValueError("tomography settings do not fix all matrix elements")
    sol, *_ = np.linalg.lstsq(design, np.array(values), rcond=None)
    rho = _unpack_hermitian(sol, d)
    return DensityMatrixOnSubspace(tuple(labels), rho)


def _real_imag_row(row: np.ndarray, d: int) -> np.ndarray:
    """Express Re(sum row_ab rho_ab) over a real parameterization of Hermitian rho."""
    m = row.reshape(d, d)
    out = []
    for a in range(d):
        out.append(np.real(m[a, a]))
    for a in range(d):
        for b in range(a + 1, d):
            out.append(np.real(m[a, b] + m[b, a]))
            out.append(np.real(1j * (m[a, b] - m[b, a])))
    return np.array(out)


def _unpack_hermitian(params: np.ndarray, d: int) -> np.ndarray:
    rho = np.zeros((d, d), dtype=complex)
    k = 0
    for a in range(d):
        rho[a, a] = params[k]
        k += 1
    for a in range(d):
        for b in range(a + 1, d):
            re, im = params[k], params[k + 1]
            k += 2
            rho[a, b] = (re + 1j * im) / 1.0
            rho[b, a] = rho[a, b].conjugate()
    return rho


# -- Knill-Laflamme -------------------------------------------------------------


@dataclass
class KLReport:
    label: str
    pep: np.ndarray
    detectable: bool
    deviation: float
    scale: complex

    def __str__(self) -> str:
        verdict = "detectable" if self.detectable else "not-detectable"
        return f"{self.label}: {verdict} (deviation {self.deviation:.3e})"


def kl_check(codewords: list[StateVector], errors: list[tuple[str, OperatorSum]],
             tol: float = 1e-9) -> list[KLReport]:
    """PEP ~ P test for each error operator on orthonormal codewords."""
    k = len(codewords)
    gram = np.array([[ci.overlap(cj) for cj in codewords] for ci in codewords])
    if np.max(np.abs(gram - np.eye(k))) > 1e-9:
        raise ValueError("codewords are not orthonormal")
    reports = []
    for label, op in errors:
        images = [apply_operator_sum(c, op) for c in codewords]
        pep = np.array([[ci.overlap(img) for img in images] for ci in codewords])
        lam = np.trace(pep) / k
        deviation = float(np.max(np.abs(pep - lam * np.eye(k))))
        reports.append(KLReport(label, pep, deviation < tol, deviation, lam))
    return reports
