"""Exact circuit synthesis for exponentials of Pauli strings.

The coupling unitary exp(i eps M) with
M = (XXXX + XXYY + YYXX + YYYY) / 4 factors exactly into its four term
exponentials because the terms commute pairwise; no product-formula error
is introduced and term order is irrelevant.

Each term exponential is built as a conjugation ladder around a single-qubit
rotation on the pivot (lowest-index support qubit):

    collars . [CNOT fan interleaved with Sdg on the pivot] . core . mirror

Collars map every support factor to X (Sdg/S for Y, H/H for Z). The
interleaved fan conjugates the core generator onto the full X string; whether
the core must generate exp(i a X) or exp(i a Y), and with which sign, depends
only on the number of fan steps modulo 4. The Y-type core is the
Rx(pi/2) U1 Rx(-pi/2) sandwich; the X-type core is a bare Rx.

Everything here is phase-equivalent to the target exponential; global phase
is quotiented out by the project-wide distance metric.
"""
from __future__ import annotations

import math

from .bosonmap import INTERACTION_FACTORS, ground_state_prep
from .circuit import Circuit, Gate, cx, h, rx, s, sdg, u1
from .pauli import PauliString

_HALF_PI = math.pi / 2.0


def _core_gates(pivot: int, j: int, theta: float) -> list[Gate]:
    """Pivot rotation for a ladder with j fan steps, targeting exp(i theta X...X)."""
    sign = 1.0 if j % 4 in (0, 3) else -1.0
    alpha = sign * theta
    if j % 2 == 1:
        # Y-type core: Rx(pi/2) U1(2a) Rx(-pi/2) = exp(ia) exp(ia Y)
        return [rx(pivot, -_HALF_PI), u1(pivot, 2.0 * alpha), rx(pivot, _HALF_PI)]
    # X-type core: exp(ia X) = Rx(-2a)
    return [rx(pivot, -2.0 * alpha)]


def compile_pauli_exponential(string: PauliString, angle: float) -> Circuit:
    """Circuit phase-equivalent to exp(i * angle * string).

    The string phase must be +-1; a -1 phase is folded into the angle.
    """
    if string.phase_power % 2 == 1:
        raise ValueError("cannot exponentiate a string with +-i phase")
    theta = float(angle) if string.phase_power == 0 else -float(angle)
    support = [q for q, f in enumerate(string.factors) if f != "I"]
    if not support:
        raise ValueError("identity string has no nontrivial exponential")
    n = string.n_qubits

    if len(support) == 1 and string.factors[support[0]] == "Z":
        # diagonal case: exp(i t Z) = U1(-2t) up to phase
        return Circuit(n, (u1(support[0], -2.0 * theta),))

    opening: list[Gate] = []
    closing: list[Gate] = []
    for q in sorted(support, reverse=True):
        f = string.factors[q]
        if f == "Y":
            opening.append(sdg(q))
        elif f == "Z":
            opening.append(h(q))
    for q in sorted(support):
        f = string.factors[q]
        if f == "Y":
            closing.append(s(q))
        elif f == "Z":
            closing.append(h(q))

    pivot, *rest = support
    fan_in: list[Gate] = []
    fan_out: list[Gate] = []
    for q in reversed(rest):
        fan_in.append(cx(pivot, q))
        fan_in.append(sdg(pivot))
    for q in rest:
        fan_out.append(s(pivot))
        fan_out.append(cx(pivot, q))

    core = _core_gates(pivot, len(rest), theta)
    gates = opening + fan_in + core + fan_out + closing
    return Circuit(n, tuple(gates))


def decompose_term(index: int, epsilon: float, max_epsilon: float = 1.0) -> Circuit:
    """Circuit for the index-th factor of exp(i eps M), index in 1..4."""
    if index not in (1, 2, 3, 4):
        raise ValueError(f"term index must be 1..4, got {index}")
    _check_epsilon(epsilon, max_epsilon)
    string = PauliString(INTERACTION_FACTORS[index - 1])
    circ = compile_pauli_exponential(string, epsilon / 4.0)
    return Circuit(
        circ.n_qubits,
        circ.gates,
        {"segment": f"pauli-term-{index}", "epsilon": float(epsilon)},
    )


def build_evolution_circuit(
    epsilon: float,
    prepend_ground_prep: bool = False,
    max_epsilon: float = 1.0,
) -> Circuit:
    """Full coupling unitary exp(i eps M), optionally after ground-state prep."""
    _check_epsilon(epsilon, max_epsilon)
    total = ground_state_prep() if prepend_ground_prep else Circuit(4)
    for index in (1, 2, 3, 4):
        total = total + decompose_term(index, epsilon, max_epsilon)
    return Circuit(total.n_qubits, total.gates, {"epsilon": float(epsilon)})


def _check_epsilon(epsilon: float, max_epsilon: float):
    if not abs(epsilon) < max_epsilon:
        raise ValueError(
            f"|epsilon| = {abs(epsilon)} outside the validated range "
            f"(< {max_epsilon}); pass max_epsilon explicitly to override"
        )
