"""Gate-level circuit container and dense evaluator.

Gate definitions (exact, testable):

    X                       Pauli X
    SX   = sqrt(X)          0.5*[[1+i, 1-i], [1-i, 1+i]]
    SXdg = SX^-1
    H                       Hadamard
    S    = diag(1, i)       Sdg = S^-1
    Rx(theta) = exp(-i*theta/2 * X)
    Rz(lam)   = exp(-i*lam/2 * Z)
    U1(lam)   = diag(1, exp(i*lam))     (S == U1(pi/2))
    CNOT(control, target)
    Measure(qubit, cbit)

Circuits are immutable values. Gates apply in list order; the circuit unitary
is the reverse-order matrix product. Qubit 0 is the leftmost tensor factor.
Measure gates may only appear as a trailing suffix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable

import numpy as np

from .errors import CapacityError

MAX_DENSE_QUBITS = 12

GATE_KINDS = ("x", "sx", "sxdg", "h", "s", "sdg", "rx", "rz", "u1", "cx", "measure")
PARAM_KINDS = ("rx", "rz", "u1")
SINGLE_QUBIT_KINDS = ("x", "sx", "sxdg", "h", "s", "sdg", "rx", "rz", "u1")

_SQRT2 = math.sqrt(2.0)

FIXED_MATRICES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "sx": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    "sxdg": 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]]),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2,
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: float | None = None
    cbit: int | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if any(q < 0 for q in self.qubits):
            raise ValueError("negative qubit index")
        if self.kind == "cx":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError("cx needs two distinct qubits")
        elif len(self.qubits) != 1:
            raise ValueError(f"{self.kind} acts on exactly one qubit")
        if self.kind in PARAM_KINDS:
            if self.param is None:
                raise ValueError(f"{self.kind} needs an angle")
            object.__setattr__(self, "param", float(self.param))
        elif self.param is not None:
            raise ValueError(f"{self.kind} takes no parameter")
        if self.kind == "measure":
            if self.cbit is None or self.cbit < 0:
                raise ValueError("measure needs a nonnegative classical bit")
        elif self.cbit is not None:
            raise ValueError("only measure carries a classical bit")


def x(q: int) -> Gate:
    return Gate("x", (q,))


def sx(q: int) -> Gate:
    return Gate("sx", (q,))


def sxdg(q: int) -> Gate:
    return Gate("sxdg", (q,))


def h(q: int) -> Gate:
    return Gate("h", (q,))


def s(q: int) -> Gate:
    return Gate("s", (q,))


def sdg(q: int) -> Gate:
    return Gate("sdg", (q,))


def rx(q: int, theta: float) -> Gate:
    return Gate("rx", (q,), param=theta)


def rz(q: int, lam: float) -> Gate:
    return Gate("rz", (q,), param=lam)


def u1(q: int, lam: float) -> Gate:
    return Gate("u1", (q,), param=lam)


def cx(control: int, target: int) -> Gate:
    return Gate("cx", (control, target))


def measure(qubit: int, cbit: int) -> Gate:
    return Gate("measure", (qubit,), cbit=cbit)


def matrix_of(gate: Gate) -> np.ndarray:
    """Dense matrix of a unitary gate (2x2, or 4x4 for cx)."""
    if gate.kind in FIXED_MATRICES:
        return FIXED_MATRICES[gate.kind].copy()
    if gate.kind == "rx":
        half = gate.param / 2.0
        c, sn = math.cos(half), math.sin(half)
        return np.array([[c, -1j * sn], [-1j * sn, c]])
    if gate.kind == "rz":
        half = gate.param / 2.0
        return np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]])
    if gate.kind == "u1":
        return np.array([[1, 0], [0, np.exp(1j * gate.param)]])
    if gate.kind == "cx":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    raise ValueError(f"{gate.kind} has no unitary matrix")


_DAGGER_KIND = {
    "x": "x",
    "h": "h",
    "s": "sdg",
    "sdg": "s",
    "sx": "sxdg",
    "sxdg": "sx",
    "cx": "cx",
}


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        seen_measure = False
        used_cbits: set[int] = set()
        measured_qubits: set[int] = set()
        for g in self.gates:
            if not isinstance(g, Gate):
                raise TypeError(f"not a Gate: {g!r}")
            if max(g.qubits) >= self.n_qubits:
                raise ValueError(f"gate {g.kind} touches qubit {max(g.qubits)} "
                                 f"outside a {self.n_qubits}-qubit register")
            if g.kind == "measure":
                if g.cbit in used_cbits:
                    raise ValueError(f"classical bit {g.cbit} measured twice")
                if g.qubits[0] in measured_qubits:
                    raise ValueError(f"qubit {g.qubits[0]} measured twice")
                used_cbits.add(g.cbit)
                measured_qubits.add(g.qubits[0])
                seen_measure = True
            elif seen_measure:
                raise ValueError("unitary gate after measurement")

    def append(self, gate: Gate) -> "Circuit":
        return Circuit(self.n_qubits, self.gates + (gate,), dict(self.metadata))

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.n_qubits, self.gates + tuple(gates), dict(self.metadata))

    def __add__(self, other: "Circuit") -> "Circuit":
        if self.n_qubits != other.n_qubits:
            raise ValueError("cannot concatenate circuits of different widths")
        meta = dict(self.metadata)
        meta.update(other.metadata)
        return Circuit(self.n_qubits, self.gates + other.gates, meta)

    @property
    def has_measurements(self) -> bool:
        return any(g.kind == "measure" for g in self.gates)

    @property
    def measurements(self) -> tuple[tuple[int, int], ...]:
        """(qubit, cbit) pairs in gate order."""
        return tuple((g.qubits[0], g.cbit) for g in self.gates if g.kind == "measure")

    def without_measurements(self) -> "Circuit":
        kept = tuple(g for g in self.gates if g.kind != "measure")
        return Circuit(self.n_qubits, kept, dict(self.metadata))

    def dagger(self) -> "Circuit":
        """Exact inverse circuit: reversed order, every gate inverted.

        sx/sxdg swap kinds, so dagger(dagger(c)) == c gate for gate.
        """
        out = []
        for g in reversed(self.gates):
            if g.kind == "measure":
                raise ValueError("cannot invert a measurement")
            if g.kind in _DAGGER_KIND:
                out.append(Gate(_DAGGER_KIND[g.kind], g.qubits))
            else:
                out.append(Gate(g.kind, g.qubits, param=-g.param))
        return Circuit(self.n_qubits, tuple(out), dict(self.metadata))

    def gate_counts(self) -> tuple[int, int]:
        """(single-qubit count, cnot count); measurements excluded."""
        single = sum(1 for g in self.gates if g.kind in SINGLE_QUBIT_KINDS)
        two = sum(1 for g in self.gates if g.kind == "cx")
        return single, two

    def unitary(self) -> np.ndarray:
        return unitary_of(self)


def append(c: Circuit, gate: Gate) -> Circuit:
    return c.append(gate)


def dagger(c: Circuit) -> Circuit:
    return c.dagger()


def gate_counts(c: Circuit) -> tuple[int, int]:
    return c.gate_counts()


def _embedded(gate: Gate, n: int) -> np.ndarray:
    eye = np.eye(2, dtype=complex)
    if gate.kind == "cx":
        c, t = gate.qubits
        p0 = np.array([[1, 0], [0, 0]], dtype=complex)
        p1 = np.array([[0, 0], [0, 1]], dtype=complex)
        xm = FIXED_MATRICES["x"]
        hold = [eye] * n
        hold[c] = p0
        term0 = reduce(np.kron, hold)
        hold = [eye] * n
        hold[c] = p1
        hold[t] = xm
        term1 = reduce(np.kron, hold)
        return term0 + term1
    hold = [eye] * n
    hold[gate.qubits[0]] = matrix_of(gate)
    return reduce(np.kron, hold)


def unitary_of(c: Circuit) -> np.ndarray:
    """Dense unitary of a measurement-free circuit.

    Composition convention: for gates [g1, g2, ...] applied in order the
    result is ... @ U(g2) @ U(g1).
    """
    if c.has_measurements:
        raise ValueError("circuit with measurements has no unitary")
    if c.n_qubits > MAX_DENSE_QUBITS:
        raise CapacityError(f"{c.n_qubits} qubits exceeds the dense limit")
    total = np.eye(2 ** c.n_qubits, dtype=complex)
    for g in c.gates:
        total = _embedded(g, c.n_qubits) @ total
    return total


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Global-phase-invariant distance d(A, B) = 1 - |tr(A^dag B)| / dim."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("phase_distance needs two equal square matrices")
    dim = a.shape[0]
    return max(0.0, 1.0 - abs(np.trace(a.conj().T @ b)) / dim)
