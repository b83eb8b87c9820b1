"""Lowering, routing and simplification to the device basis {X, SX, Rz, CNOT}.

Lowering rewrites each gate locally (diagonal gates become a single Rz; H is
the 3-gate Rz-SX-Rz form; a generic Rx uses the 5-gate Rz-SX-Rz-SX-Rz form).

Routing walks a SWAP (3 CNOTs) along a BFS shortest path whenever a CNOT
spans non-adjacent physical qubits. No swap-back is appended; the final
logical-to-physical permutation is reported instead.

Simplification iterates three deterministic passes to a fixpoint:

  1. rz floating: an Rz slides over any CNOT acting on its qubit as control,
     accumulating with later Rz gates on the same wire; zero rotations
     (|angle| < 1e-12 after wrapping to (-pi, pi]) are dropped.
  2. adjacent identical CNOT pairs cancel.
  3. every maximal run of >= 2 single-qubit gates on one wire is resynthesised
     into a canonical form (at most Rz SX Rz SX Rz) when that is strictly
     shorter; this subsumes SX^4 -> identity and SX SX -> X.

All three preserve the unitary up to global phase and never increase any
gate count, so simplify is idempotent gate for gate.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import (
    Circuit,
    Gate,
    SINGLE_QUBIT_KINDS,
    cx,
    matrix_of,
    phase_distance,
    rz,
    sx,
    x,
)
from .errors import RoutingError

BASIS_KINDS = ("x", "sx", "rz", "cx", "measure")

_TWO_PI = 2.0 * math.pi
_ANGLE_TOL = 1e-12

TOPOLOGY_PRESETS = {
    "belem-like": (5, ((0, 1), (1, 2), (1, 3), (3, 4))),
    "nairobi-like": (7, ((0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6))),
}


@dataclass(frozen=True)
class Topology:
    """Undirected coupling graph of a device."""

    n: int
    edges: frozenset = field(default_factory=frozenset)
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("topology needs at least one qubit")
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError("self-loop edge")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a},{b}) outside {self.n} qubits")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def preset(cls, name: str) -> "Topology":
        if name not in TOPOLOGY_PRESETS:
            raise ValueError(
                f"unknown topology preset {name!r}; have {sorted(TOPOLOGY_PRESETS)}"
            )
        n, edges = TOPOLOGY_PRESETS[name]
        return cls(n, frozenset(edges), name)

    @classmethod
    def fully_connected(cls, n: int) -> "Topology":
        edges = frozenset((a, b) for a in range(n) for b in range(a + 1, n))
        return cls(n, edges, f"complete-{n}")

    @classmethod
    def from_json(cls, text: str, name: str = "") -> "Topology":
        data = json.loads(text)
        return cls(int(data["n"]), frozenset(tuple(e) for e in data["edges"]), name)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": sorted(list(e) for e in self.edges)})

    def neighbors(self, q: int) -> list[int]:
        out = [b if a == q else a for a, b in self.edges if q in (a, b)]
        return sorted(out)

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def degree(self, q: int) -> int:
        return len(self.neighbors(q))

    def shortest_path(self, start: int, goal: int) -> list[int] | None:
        """BFS path (deterministic: neighbours visited in ascending order)."""
        if start == goal:
            return [start]
        parent = {start: start}
        frontier = [start]
        while frontier:
            nxt = []
            for node in frontier:
                for nb in self.neighbors(node):
                    if nb in parent:
                        continue
                    parent[nb] = node
                    if nb == goal:
                        path = [goal]
                        while path[-1] != start:
                            path.append(parent[path[-1]])
                        return path[::-1]
                    nxt.append(nb)
            frontier = nxt
        return None


def load_topology(path: str) -> Topology:
    with open(path, "r", encoding="utf-8") as fh:
        return Topology.from_json(fh.read())


@dataclass(frozen=True)
class Layout:
    """Injective logical -> physical qubit assignment."""

    logical_to_physical: tuple[int, ...]

    def __post_init__(self):
        l2p = tuple(int(p) for p in self.logical_to_physical)
        if len(set(l2p)) != len(l2p):
            raise ValueError("layout is not injective")
        object.__setattr__(self, "logical_to_physical", l2p)

    def __getitem__(self, logical: int) -> int:
        return self.logical_to_physical[logical]

    def __len__(self) -> int:
        return len(self.logical_to_physical)

    def __iter__(self):
        return iter(self.logical_to_physical)


def hub_layout(topo: Topology, n_logical: int = 4) -> Layout:
    """Put logical 0 on the highest-degree physical qubit, the rest BFS-out.

    Ties on degree break toward the lowest physical index, so the layout is
    deterministic for a given topology.
    """
    if n_logical > topo.n:
        raise ValueError("more logical qubits than the topology holds")
    hub = max(range(topo.n), key=lambda q: (topo.degree(q), -q))
    order = [hub]
    seen = {hub}
    frontier = [hub]
    while frontier and len(order) < n_logical:
        nxt = []
        for node in frontier:
            for nb in topo.neighbors(node):
                if nb not in seen:
                    seen.add(nb)
                    order.append(nb)
                    nxt.append(nb)
        frontier = nxt
    if len(order) < n_logical:
        raise RoutingError("topology is disconnected under the requested size")
    return Layout(tuple(order[:n_logical]))


# ---------------------------------------------------------------------------
# lowering

def _lower_rx(gate: Gate) -> list[Gate]:
    q = gate.qubits[0]
    theta = math.remainder(gate.param, _TWO_PI)
    for target, gates in (
        (0.0, []),
        (math.pi / 2, [sx(q)]),
        (math.pi, [x(q)]),
        (-math.pi, [x(q)]),
        (-math.pi / 2, [sx(q), x(q)]),
    ):
        if abs(theta - target) < _ANGLE_TOL:
            return list(gates)
    half = math.pi / 2
    return [rz(q, half), sx(q), rz(q, gate.param + math.pi), sx(q), rz(q, half)]


def lower_to_basis(c: Circuit) -> Circuit:
    """Rewrite every gate into {x, sx, rz, cx, measure}, phase-equivalent."""
    out: list[Gate] = []
    for g in c.gates:
        q = g.qubits[0]
        if g.kind in ("x", "sx", "rz", "cx", "measure"):
            out.append(g)
        elif g.kind == "s":
            out.append(rz(q, math.pi / 2))
        elif g.kind == "sdg":
            out.append(rz(q, -math.pi / 2))
        elif g.kind == "u1":
            out.append(rz(q, g.param))
        elif g.kind == "h":
            out.extend([rz(q, math.pi / 2), sx(q), rz(q, math.pi / 2)])
        elif g.kind == "sxdg":
            out.extend([sx(q), x(q)])
        elif g.kind == "rx":
            out.extend(_lower_rx(g))
        else:
            raise ValueError(f"no lowering rule for {g.kind}")
    return Circuit(c.n_qubits, tuple(out), dict(c.metadata))


# ---------------------------------------------------------------------------
# routing

@dataclass(frozen=True)
class RoutedCircuit:
    circuit: Circuit
    initial_layout: tuple[int, ...]
    final_layout: tuple[int, ...]
    # placement of every virtual wire (logical first, then pad wires that
    # started on the unused physical qubits, ascending)
    full_final_layout: tuple[int, ...]


def route(c: Circuit, topo: Topology, layout: Layout | Sequence[int] | None = None) -> RoutedCircuit:
    """Map a circuit onto a topology, inserting SWAPs as CNOT triples."""
    if layout is None:
        layout = tuple(range(c.n_qubits))
    l2p_logical = tuple(Layout(tuple(layout)))
    if len(l2p_logical) != c.n_qubits:
        raise ValueError("layout size does not match the circuit")
    if any(p >= topo.n or p < 0 for p in l2p_logical):
        raise ValueError("layout maps outside the topology")

    pads = [p for p in range(topo.n) if p not in l2p_logical]
    l2p = list(l2p_logical) + pads  # virtual wire -> physical
    p2l = {p: v for v, p in enumerate(l2p)}

    out: list[Gate] = []

    def emit_swap(a: int, b: int):
        out.extend([cx(a, b), cx(b, a), cx(a, b)])
        va, vb = p2l[a], p2l[b]
        l2p[va], l2p[vb] = b, a
        p2l[a], p2l[b] = vb, va

    for g in c.gates:
        if g.kind == "cx":
            a, b = l2p[g.qubits[0]], l2p[g.qubits[1]]
            path = topo.shortest_path(a, b)
            if path is None:
                raise RoutingError(f"qubits {a} and {b} are disconnected")
            while len(path) > 2:
                emit_swap(path[0], path[1])
                a = path[1]
                path = path[1:]
            out.append(cx(a, b))
        elif g.kind == "measure":
            out.append(Gate("measure", (l2p[g.qubits[0]],), cbit=g.cbit))
        else:
            out.append(Gate(g.kind, (l2p[g.qubits[0]],), param=g.param))
    routed = Circuit(topo.n, tuple(out), dict(c.metadata))
    return RoutedCircuit(
        circuit=routed,
        initial_layout=l2p_logical,
        final_layout=tuple(l2p[: c.n_qubits]),
        full_final_layout=tuple(l2p),
    )


# ---------------------------------------------------------------------------
# simplification

def _wrap(angle: float) -> float:
    return math.remainder(angle, _TWO_PI)


def _is_zero_angle(angle: float) -> bool:
    return abs(_wrap(angle)) < _ANGLE_TOL


def _float_rz(gates: list[Gate]) -> list[Gate]:
    """Slide Rz gates over CNOT controls and merge them along each wire."""
    out: list[Gate] = []
    pending: dict[int, float] = {}

    def flush(q: int):
        angle = _wrap(pending.pop(q))
        if abs(angle) >= _ANGLE_TOL:
            out.append(rz(q, angle))

    for g in gates:
        if g.kind == "rz":
            q = g.qubits[0]
            pending[q] = pending.get(q, 0.0) + g.param
            continue
        if g.kind == "cx":
            if g.qubits[1] in pending:
                flush(g.qubits[1])
            out.append(g)
            continue
        if g.kind == "measure":
            # measures are a suffix; park every floating rotation before it
            for q in sorted(pending):
                flush(q)
            out.append(g)
            continue
        for q in g.qubits:
            if q in pending:
                flush(q)
        out.append(g)
    for q in sorted(pending):
        flush(q)
    return out


def _cancel_cx_pairs(gates: list[Gate]) -> list[Gate]:
    gates = list(gates)
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(gates):
            if g.kind != "cx":
                continue
            touched = set(g.qubits)
            for j in range(i + 1, len(gates)):
                other = gates[j]
                if touched & set(other.qubits):
                    if other.kind == "cx" and other.qubits == g.qubits:
                        del gates[j]
                        del gates[i]
                        changed = True
                    break
            if changed:
                break
    return gates


_SX_MATRIX = matrix_of(sx(0))
_SX3_MATRIX = _SX_MATRIX @ _SX_MATRIX @ _SX_MATRIX


def _synthesize_1q(q: int, u: np.ndarray) -> list[Gate]:
    """Canonical basis-gate realisation of a 2x2 unitary, up to phase."""
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    v = u / np.sqrt(det)
    if abs(v[0, 1]) < _ANGLE_TOL and abs(v[1, 0]) < _ANGLE_TOL:
        angle = 2.0 * np.angle(v[1, 1])
        return [] if _is_zero_angle(angle) else [rz(q, _wrap(angle))]
    if abs(v[0, 0]) < _ANGLE_TOL and abs(v[1, 1]) < _ANGLE_TOL:
        angle = np.angle(v[0, 1] / v[1, 0])
        gates = [] if _is_zero_angle(angle) else [rz(q, _wrap(angle))]
        gates.append(x(q))
        return gates
    if phase_distance(u, _SX_MATRIX) < _ANGLE_TOL:
        return [sx(q)]
    if phase_distance(u, _SX3_MATRIX) < _ANGLE_TOL:
        return [sx(q), x(q)]
    beta = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    alpha_plus = 2.0 * np.angle(v[1, 1])
    alpha_minus = 2.0 * np.angle(v[1, 0])
    alpha = 0.5 * (alpha_plus + alpha_minus)
    gamma = 0.5 * (alpha_plus - alpha_minus)
    gates = []
    if not _is_zero_angle(gamma):
        gates.append(rz(q, _wrap(gamma)))
    gates.extend([sx(q), rz(q, _wrap(beta + math.pi)), sx(q)])
    if not _is_zero_angle(alpha + math.pi):
        gates.append(rz(q, _wrap(alpha + math.pi)))
    return gates


def _resynth_runs(gates: list[Gate]) -> list[Gate]:
    """Shrink maximal single-qubit runs to canonical form when shorter."""
    runs: list[list[int]] = []
    open_runs: dict[int, list[int]] = {}
    for i, g in enumerate(gates):
        if g.kind in SINGLE_QUBIT_KINDS:
            open_runs.setdefault(g.qubits[0], []).append(i)
        else:
            for q in g.qubits:
                if q in open_runs:
                    runs.append(open_runs.pop(q))
    runs.extend(open_runs.values())

    inserts: dict[int, list[Gate]] = {}
    removed: set[int] = set()
    for run in runs:
        if len(run) < 2:
            continue
        q = gates[run[0]].qubits[0]
        u = np.eye(2, dtype=complex)
        for idx in run:
            u = matrix_of(gates[idx]) @ u
        candidate = _synthesize_1q(q, u)
        check = np.eye(2, dtype=complex)
        for g in candidate:
            check = matrix_of(g) @ check
        if phase_distance(check, u) > 1e-10:
            raise RuntimeError("single-qubit resynthesis drifted")
        if len(candidate) < len(run):
            inserts[run[0]] = candidate
            removed.update(run)
    if not inserts:
        return gates
    out: list[Gate] = []
    for i, g in enumerate(gates):
        if i in inserts:
            out.extend(inserts[i])
        if i not in removed:
            out.append(g)
    return out


def simplify(c: Circuit) -> Circuit:
    """Deterministic peephole cleanup; idempotent, count-nonincreasing."""
    gates = list(c.gates)
    for _ in range(60):
        new = _float_rz(gates)
        new = _cancel_cx_pairs(new)
        new = _resynth_runs(new)
        if new == gates:
            break
        gates = new
    return Circuit(c.n_qubits, tuple(gates), dict(c.metadata))


@dataclass(frozen=True)
class TranspileResult:
    circuit: Circuit
    initial_layout: tuple[int, ...]
    final_layout: tuple[int, ...]
    full_final_layout: tuple[int, ...]


def transpile(
    c: Circuit,
    topology: Topology | None = None,
    layout: Layout | Sequence[int] | None = None,
) -> TranspileResult:
    """lower -> route (if a topology is given) -> simplify."""
    lowered = lower_to_basis(c)
    if topology is None:
        ident = tuple(range(c.n_qubits))
        return TranspileResult(simplify(lowered), ident, ident, ident)
    routed = route(lowered, topology, layout)
    return TranspileResult(
        simplify(routed.circuit),
        routed.initial_layout,
        routed.final_layout,
        routed.full_final_layout,
    )
