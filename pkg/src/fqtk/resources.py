"""Gate counts and parallel depth for circuits.

Depth uses greedy ASAP layering: ops whose targets are disjoint share a
layer.  Fermion-mode move-swaps are free by default, reflecting rearrangement
by physical movement rather than gates; set ``count_move_depth`` to price them.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from fqtk.circuit import Circuit, Conditioned, Gate, KIND_SIGNATURES, Measure, MoveSwap, Reset
from fqtk.clifford import gate_class

BRAID_KINDS = frozenset({"BRAID", "BRAIDtheta"})
SINGLE_FERMION_KINDS = frozenset({"Tf", "Sf", "Zf", "PHASEf"})


@dataclass
class ResourceReport:
    counts: dict[str, int] = field(default_factory=dict)
    class_counts: dict[str, int] = field(default_factory=dict)
    depth: int = 0
    rotation_depth: int = 0
    tgate_depth: int = 0
    move_swaps: int = 0
    measurements: int = 0

    @property
    def total_gates(self) -> int:
        return sum(self.counts.values())

    @property
    def braid_gates(self) -> int:
        return sum(n for k, n in self.counts.items() if k.rstrip("†") in BRAID_KINDS)

    @property
    def single_fermion_gates(self) -> int:
        return sum(n for k, n in self.counts.items() if k.rstrip("†") in SINGLE_FERMION_KINDS)

    def count_class(self, name: str) -> int:
        return self.class_counts.get(name, 0)

    def to_dict(self) -> dict:
        return {
            "counts": dict(sorted(self.counts.items())),
            "class_counts": dict(sorted(self.class_counts.items())),
            "depth": self.depth,
            "rotation_depth": self.rotation_depth,
            "tgate_depth": self.tgate_depth,
            "move_swaps": self.move_swaps,
            "measurements": self.measurements,
            "braid_gates": self.braid_gates,
            "single_fermion_gates": self.single_fermion_gates,
            "total_gates": self.total_gates,
        }


def _gate_keys(gate: Gate) -> list[tuple[str, int]]:
    return [(tag, t) for tag, t in zip(KIND_SIGNATURES[gate.kind], gate.targets)]


def count_resources(circ: Circuit, clifford_kinds: frozenset[str] | None = None,
                    count_move_depth: bool = False) -> ResourceReport:
    counts: Counter[str] = Counter()
    classes: Counter[str] = Counter()
    clocks: dict[tuple[str, int], int] = {}
    rotation_layers: set[int] = set()
    tgate_layers: set[int] = set()
    depth = 0
    move_swaps = 0
    measurements = 0

    def schedule(keys: list[tuple[str, int]]) -> int:
        layer = 1 + max((clocks.get(k, 0) for k in keys), default=0)
        for k in keys:
            clocks[k] = layer
        return layer

    def record_gate(gate: Gate):
        nonlocal depth
        counts[gate.label()] += 1
        cls = gate_class(gate)
        if clifford_kinds is not None and gate.kind in clifford_kinds:
            cls = "clifford"
        classes[cls] += 1
        layer = schedule(_gate_keys(gate))
        depth = max(depth, layer)
        if cls == "rotation":
            rotation_layers.add(layer)
        elif cls == "tgate":
            tgate_layers.add(layer)

    for op in circ.ops:
        if isinstance(op, Gate):
            record_gate(op)
        elif isinstance(op, MoveSwap):
            move_swaps += 1
            if count_move_depth:
                layer = schedule([("fermion", op.i), ("fermion", op.j)])
                depth = max(depth, layer)
        elif isinstance(op, Measure):
            measurements += 1
            layer = schedule([(op.register, op.index)])
            depth = max(depth, layer)
        elif isinstance(op, Conditioned):
            record_gate(op.gate)
        elif isinstance(op, Reset):
            layer = schedule([(op.register, op.index)])
            depth = max(depth, layer)

    return ResourceReport(
        counts=dict(counts),
        class_counts=dict(classes),
        depth=depth,
        rotation_depth=len(rotation_layers),
        tgate_depth=len(tgate_layers),
        move_swaps=move_swaps,
        measurements=measurements,
    )
