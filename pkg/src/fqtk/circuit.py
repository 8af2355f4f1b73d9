"""Circuit intermediate representation over qubit / fermion / boson registers.

Angles are kept as exact rational multiples of pi whenever they are
constructed that way, so Clifford membership stays a syntactic check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

# register tags
QUBIT = "qubit"
FERMION = "fermion"
BOSON = "boson"

# kind -> target register tags
KIND_SIGNATURES: dict[str, tuple[str, ...]] = {
    "Tf": (FERMION,),
    "Sf": (FERMION,),
    "Zf": (FERMION,),
    "PHASEf": (FERMION,),
    "H": (QUBIT,),
    "S": (QUBIT,),
    "Z": (QUBIT,),
    "X": (QUBIT,),
    "T": (QUBIT,),
    "Xrot": (QUBIT,),
    "CZ": (QUBIT, QUBIT),
    "CNOT": (QUBIT, QUBIT),
    "BRAID": (FERMION, FERMION),
    "BRAIDtheta": (FERMION, FERMION),
    "CZf": (FERMION, FERMION),
    "CZftheta": (FERMION, FERMION),
    "CZqf": (QUBIT, FERMION),
    "CZqftheta": (QUBIT, FERMION),
    "SQRT_ISWAPf": (FERMION, FERMION),
    "HOPf": (FERMION, FERMION),        # exp(-i theta (p_i^ p_j + h.c.))
    "U_TDOWN": (FERMION, FERMION),
    "U_UPDOWN": (FERMION, FERMION),
    "BS": (BOSON, BOSON),
    "U_DISS": (BOSON, FERMION, FERMION),
    # qubit-only baseline bookkeeping kinds (no matrix semantics needed)
    "FSWAP": (QUBIT, QUBIT),
    "F2Q": (QUBIT, QUBIT),
}

_SELF_INVERSE = {"Zf", "H", "Z", "X", "CZ", "CNOT", "CZf", "CZqf", "FSWAP"}


def _norm_angle(angle) -> tuple[Fraction | None, float | None]:
    """Split an angle into (exact multiple of pi, raw float)."""
    if angle is None:
        return None, None
    if isinstance(angle, Fraction):
        return angle, None
    if isinstance(angle, int):
        return Fraction(angle), None
    return None, float(angle)


@dataclass(frozen=True)
class Gate:
    """A single gate application.

    ``angle_pi`` holds exact rational multiples of pi; ``angle_raw`` holds a
    free float angle in radians.  At most one of the two is set.
    """

    kind: str
    targets: tuple[int, ...]
    angle_pi: Fraction | None = None
    angle_raw: float | None = None
    dagger: bool = False
    phi: float = 0.0          # drive phase for U_DISS
    n_cal: float | None = None  # calibration occupation for U_DISS

    def __post_init__(self):
        if self.kind not in KIND_SIGNATURES:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        sig = KIND_SIGNATURES[self.kind]
        if len(self.targets) != len(sig):
            raise ValueError(f"{self.kind} takes {len(sig)} targets, got {self.targets}")
        if self.angle_raw is not None and not math.isfinite(self.angle_raw):
            raise ValueError(f"angle must be finite, got {self.angle_raw}")

    @property
    def angle(self) -> float | None:
        """Angle in radians."""
        if self.angle_pi is not None:
            return float(self.angle_pi) * math.pi
        return self.angle_raw

    def inverse(self) -> "Gate":
        if self.kind in _SELF_INVERSE:
            return self
        if self.kind in ("Tf", "Sf", "S", "T"):
            return Gate(self.kind, self.targets, dagger=not self.dagger)
        if self.angle_pi is not None:
            return Gate(self.kind, self.targets, angle_pi=-self.angle_pi,
                        phi=self.phi, n_cal=self.n_cal)
        if self.angle_raw is not None:
            return Gate(self.kind, self.targets, angle_raw=-self.angle_raw,
                        phi=self.phi, n_cal=self.n_cal)
        raise ValueError(f"no inverse rule for {self}")

    def label(self) -> str:
        return self.kind + ("†" if self.dagger else "")

    def __str__(self) -> str:
        bits = [self.label(), str(list(self.targets))]
        if self.angle_pi is not None:
            bits.append(f"angle={self.angle_pi}*pi")
        elif self.angle_raw is not None:
            bits.append(f"angle={self.angle_raw:.6g}")
        return " ".join(bits)


@dataclass(frozen=True)
class Measure:
    register: str      # QUBIT or FERMION
    index: int
    record: str


@dataclass(frozen=True)
class Conditioned:
    record: str
    value: int
    gate: Gate


@dataclass(frozen=True)
class Reset:
    register: str
    index: int


@dataclass(frozen=True)
class MoveSwap:
    """Relabel two fermion modes by physically exchanging them (an fSWAP)."""

    i: int
    j: int


Op = Union[Gate, Measure, Conditioned, Reset, MoveSwap]


@dataclass(frozen=True)
class Registers:
    n_qubits: int = 0
    n_fermions: int = 0
    boson_cutoffs: tuple[int, ...] = ()

    @property
    def n_bosons(self) -> int:
        return len(self.boson_cutoffs)

    def check_target(self, tag: str, index: int):
        limit = {QUBIT: self.n_qubits, FERMION: self.n_fermions, BOSON: self.n_bosons}[tag]
        if not 0 <= index < limit:
            raise ValueError(f"{tag} index {index} outside register of size {limit}")


@dataclass(frozen=True)
class Circuit:
    registers: Registers
    ops: tuple[Op, ...] = ()

    def __post_init__(self):
        defined: set[str] = set()
        for op in self.ops:
            if isinstance(op, Gate):
                for tag, t in zip(KIND_SIGNATURES[op.kind], op.targets):
                    self.registers.check_target(tag, t)
            elif isinstance(op, Measure):
                self.registers.check_target(op.register, op.index)
                defined.add(op.record)
            elif isinstance(op, Conditioned):
                if op.record not in defined:
                    raise ValueError(f"record {op.record!r} used before measurement")
                for tag, t in zip(KIND_SIGNATURES[op.gate.kind], op.gate.targets):
                    self.registers.check_target(tag, t)
            elif isinstance(op, Reset):
                self.registers.check_target(op.register, op.index)
            elif isinstance(op, MoveSwap):
                self.registers.check_target(FERMION, op.i)
                self.registers.check_target(FERMION, op.j)

    def gates(self) -> list[Gate]:
        return [op for op in self.ops if isinstance(op, Gate)]

    def has_measurements(self) -> bool:
        return any(isinstance(op, Measure) for op in self.ops)

    def then(self, other: "Circuit") -> "Circuit":
        if other.registers != self.registers:
            raise ValueError("cannot concatenate circuits over different registers")
        return Circuit(self.registers, self.ops + other.ops)

    def extended(self, ops: Iterable[Op]) -> "Circuit":
        return Circuit(self.registers, self.ops + tuple(ops))

    def inverse(self) -> "Circuit":
        inv: list[Op] = []
        for op in reversed(self.ops):
            if isinstance(op, Gate):
                inv.append(op.inverse())
            elif isinstance(op, MoveSwap):
                inv.append(op)
            else:
                raise ValueError("cannot invert a circuit with measurements or resets")
        return Circuit(self.registers, tuple(inv))

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        def gate_dict(gate: Gate) -> dict:
            d: dict = {"kind": gate.kind, "targets": list(gate.targets)}
            if gate.angle_pi is not None:
                d["angle_pi"] = [gate.angle_pi.numerator, gate.angle_pi.denominator]
            if gate.angle_raw is not None:
                d["angle"] = gate.angle_raw
            if gate.dagger:
                d["dagger"] = True
            if gate.kind == "U_DISS":
                d["phi"] = gate.phi
                d["n_cal"] = gate.n_cal
            return d

        ops = []
        for op in self.ops:
            if isinstance(op, Gate):
                ops.append(gate_dict(op))
            elif isinstance(op, Measure):
                ops.append({"measure": {"register": op.register, "index": op.index,
                                        "record": op.record}})
            elif isinstance(op, Conditioned):
                ops.append({"cond": {"record": op.record, "value": op.value,
                                     "gate": gate_dict(op.gate)}})
            elif isinstance(op, Reset):
                ops.append({"reset": {"register": op.register, "index": op.index}})
            elif isinstance(op, MoveSwap):
                ops.append({"move": [op.i, op.j]})
        return {
            "registers": {
                "qubits": self.registers.n_qubits,
                "fermions": self.registers.n_fermions,
                "boson_cutoffs": list(self.registers.boson_cutoffs),
            },
            "ops": ops,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        regs = Registers(
            n_qubits=data["registers"]["qubits"],
            n_fermions=data["registers"]["fermions"],
            boson_cutoffs=tuple(data["registers"]["boson_cutoffs"]),
        )

        def parse_gate(d: dict) -> Gate:
            angle_pi = None
            if "angle_pi" in d:
                angle_pi = Fraction(d["angle_pi"][0], d["angle_pi"][1])
            return Gate(
                d["kind"], tuple(d["targets"]), angle_pi=angle_pi,
                angle_raw=d.get("angle"), dagger=d.get("dagger", False),
                phi=d.get("phi", 0.0), n_cal=d.get("n_cal"),
            )

        ops: list[Op] = []
        for d in data["ops"]:
            if "measure" in d:
                m = d["measure"]
                ops.append(Measure(m["register"], m["index"], m["record"]))
            elif "cond" in d:
                c = d["cond"]
                ops.append(Conditioned(c["record"], c["value"], parse_gate(c["gate"])))
            elif "reset" in d:
                r = d["reset"]
                ops.append(Reset(r["register"], r["index"]))
            elif "move" in d:
                ops.append(MoveSwap(d["move"][0], d["move"][1]))
            else:
                ops.append(parse_gate(d))
        return cls(regs, tuple(ops))

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


# -- gate constructors ---------------------------------------------------------


def tf(i: int, dagger: bool = False) -> Gate:
    return Gate("Tf", (i,), dagger=dagger)


def sf(i: int, dagger: bool = False) -> Gate:
    return Gate("Sf", (i,), dagger=dagger)


def zf(i: int) -> Gate:
    return Gate("Zf", (i,))


def phasef(i: int, angle) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("PHASEf", (i,), angle_pi=pi_part, angle_raw=raw)


def h(q: int) -> Gate:
    return Gate("H", (q,))


def s(q: int, dagger: bool = False) -> Gate:
    return Gate("S", (q,), dagger=dagger)


def z(q: int) -> Gate:
    return Gate("Z", (q,))


def x(q: int) -> Gate:
    return Gate("X", (q,))


def t(q: int, dagger: bool = False) -> Gate:
    return Gate("T", (q,), dagger=dagger)


def xrot(q: int, angle) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("Xrot", (q,), angle_pi=pi_part, angle_raw=raw)


def cz(q1: int, q2: int) -> Gate:
    return Gate("CZ", (q1, q2))


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def braid(i: int, j: int) -> Gate:
    return Gate("BRAID", (i, j))


def braid_theta(i: int, j: int, angle) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("BRAIDtheta", (i, j), angle_pi=pi_part, angle_raw=raw)


def czf(i: int, j: int) -> Gate:
    return Gate("CZf", (i, j))


def czf_theta(i: int, j: int, angle) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("CZftheta", (i, j), angle_pi=pi_part, angle_raw=raw)


def czqf(q: int, j: int) -> Gate:
    return Gate("CZqf", (q, j))


def czqf_theta(q: int, j: int, angle) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("CZqftheta", (q, j), angle_pi=pi_part, angle_raw=raw)


def sqrt_iswapf(i: int, j: int) -> Gate:
    return Gate("SQRT_ISWAPf", (i, j))


def hopf(i: int, j: int, angle) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("HOPf", (i, j), angle_pi=pi_part, angle_raw=raw)


def u_tdown(i: int, j: int, angle) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("U_TDOWN", (i, j), angle_pi=pi_part, angle_raw=raw)


def u_updown(i: int, j: int, angle) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("U_UPDOWN", (i, j), angle_pi=pi_part, angle_raw=raw)


def bs(m1: int, m2: int, angle) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("BS", (m1, m2), angle_pi=pi_part, angle_raw=raw)


def u_diss(mode: int, up: int, down: int, n_cal: float, phi: float = 0.0,
           dagger: bool = False) -> Gate:
    return Gate("U_DISS", (mode, up, down), phi=phi, n_cal=float(n_cal), dagger=dagger)


def fswap(q1: int, q2: int) -> Gate:
    return Gate("FSWAP", (q1, q2))


def f2q(q1: int, q2: int, angle=0) -> Gate:
    pi_part, raw = _norm_angle(angle)
    return Gate("F2Q", (q1, q2), angle_pi=pi_part, angle_raw=raw)
