"""Dense statevector simulation with sampled depolarising and readout noise.

States are complex128 arrays over 2**n amplitudes; axis/bit order follows the
circuit convention (qubit 0 is the leftmost bit of a basis label). Histogram
keys follow classical-bit order: cbit 0 is the leftmost character.

The noise model is stochastic rather than a density-matrix channel: after
every gate, with the configured probability, a uniformly random non-identity
Pauli error is applied to the gate's qubits. Shots where no error fired are
all sampled at once from the ideal distribution; the rest are replayed one by
one from a cached prefix state. Readout error enters as an exact per-qubit
symmetric bit-flip transform on outcome probabilities before sampling.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Gate, matrix_of

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _apply_1q(state: np.ndarray, u: np.ndarray, q: int) -> np.ndarray:
    moved = np.tensordot(u, state, axes=([1], [q]))
    return np.moveaxis(moved, 0, q)


def _apply_2q(state: np.ndarray, u4: np.ndarray, qa: int, qb: int) -> np.ndarray:
    u = u4.reshape(2, 2, 2, 2)
    moved = np.tensordot(u, state, axes=([2, 3], [qa, qb]))
    return np.moveaxis(moved, (0, 1), (qa, qb))


def _apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    if gate.kind == "cx":
        return _apply_2q(state, matrix_of(gate), *gate.qubits)
    return _apply_1q(state, matrix_of(gate), gate.qubits[0])


def zero_state(n_qubits: int) -> np.ndarray:
    psi = np.zeros((2,) * n_qubits, dtype=complex)
    psi[(0,) * n_qubits] = 1.0
    return psi


def run_ideal(c: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Final statevector, flat shape (2**n,). Measurements are skipped."""
    if initial is None:
        psi = zero_state(c.n_qubits)
    else:
        initial = np.asarray(initial, dtype=complex)
        if initial.size != 2 ** c.n_qubits:
            raise ValueError("initial state has the wrong dimension")
        psi = initial.reshape((2,) * c.n_qubits).copy()
    for g in c.gates:
        if g.kind == "measure":
            continue
        psi = _apply_gate(psi, g)
    return psi.reshape(-1)


def align_global_phase(state: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rotate state's global phase so its overlap with reference is real > 0."""
    ip = np.vdot(reference, state)
    if abs(ip) < 1e-12:
        return state
    return state * (ip.conjugate() / abs(ip))


def _measure_order(c: Circuit) -> list[int]:
    """Measured qubits sorted by classical bit; cbits must be 0..k-1."""
    pairs = sorted(c.measurements, key=lambda qc: qc[1])
    if not pairs:
        raise ValueError("circuit has no measurements")
    cbits = [cb for _, cb in pairs]
    if cbits != list(range(len(cbits))):
        raise ValueError("classical bits must be contiguous from 0")
    return [q for q, _ in pairs]


def born_probabilities(c: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Exact outcome distribution over the 2**k classical keys."""
    qubits = _measure_order(c)
    psi = run_ideal(c, initial).reshape((2,) * c.n_qubits)
    p = np.abs(psi) ** 2
    rest = [ax for ax in range(c.n_qubits) if ax not in qubits]
    p = np.transpose(p, qubits + rest).reshape(2 ** len(qubits), -1).sum(axis=1)
    return p


def apply_readout(probs: np.ndarray, lambdas) -> np.ndarray:
    """Mix a symmetric bit flip with rate lambdas[j] into classical bit j."""
    k = int(round(math.log2(probs.size)))
    lam = list(lambdas)
    if len(lam) != k:
        raise ValueError("one flip rate per classical bit")
    p = np.asarray(probs, dtype=float).reshape((2,) * k)
    for axis, rate in enumerate(lam):
        if rate:
            p = (1.0 - rate) * p + rate * np.flip(p, axis=axis)
    return p.reshape(-1)


@dataclass(frozen=True)
class NoiseModel:
    """Bit-flip readout plus per-gate depolarising error rates.

    readout is a single rate for all qubits or one rate per physical qubit.
    """

    readout: float | tuple[float, ...] = 0.0
    sq_depol: float = 0.0
    cx_depol: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        ro = self.readout
        rates = (ro,) if np.isscalar(ro) else tuple(float(r) for r in ro)
        for r in rates:
            if not 0.0 <= r < 0.5:
                raise ValueError(f"readout rate {r} outside [0, 0.5)")
        if not np.isscalar(ro):
            object.__setattr__(self, "readout", rates)
        for name in ("sq_depol", "cx_depol"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} rate {v} outside [0, 1)")

    def readout_rate(self, qubit: int) -> float:
        if np.isscalar(self.readout):
            return float(self.readout)
        if qubit >= len(self.readout):
            raise ValueError(f"no readout rate for qubit {qubit}")
        return self.readout[qubit]

    @property
    def is_noiseless(self) -> bool:
        scalar = np.isscalar(self.readout)
        ro_zero = self.readout == 0.0 if scalar else all(r == 0.0 for r in self.readout)
        return ro_zero and self.sq_depol == 0.0 and self.cx_depol == 0.0


@dataclass(frozen=True)
class CountsHistogram:
    """Outcome weights keyed by classical bitstring.

    Weights are integer counts straight after sampling; readout mitigation
    turns them into real quasi-weights, so values are not forced to int.
    """

    entries: dict = field(default_factory=dict)
    shots: int = 0
    n_bits: int = 0

    def __post_init__(self):
        for key in self.entries:
            if len(key) != self.n_bits or set(key) - {"0", "1"}:
                raise ValueError(f"malformed outcome key {key!r}")

    def total(self) -> float:
        return float(sum(self.entries.values()))

    def __getitem__(self, key: str):
        return self.entries.get(key, 0)

    def to_vector(self) -> np.ndarray:
        vec = np.zeros(2 ** self.n_bits)
        for key, w in self.entries.items():
            vec[int(key, 2)] = w
        return vec

    @classmethod
    def from_vector(cls, vec: np.ndarray, shots: int, n_bits: int) -> "CountsHistogram":
        entries = {}
        for idx, w in enumerate(np.asarray(vec).reshape(-1)):
            if w != 0:
                entries[format(idx, f"0{n_bits}b")] = (
                    int(w) if float(w).is_integer() else float(w)
                )
        return cls(entries, shots, n_bits)

    def to_json_dict(self) -> dict:
        return {
            "counts": {k: self.entries[k] for k in sorted(self.entries)},
            "n_bits": self.n_bits,
            "shots": self.shots,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CountsHistogram":
        return cls(dict(data["counts"]), int(data["shots"]), int(data["n_bits"]))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CountsHistogram":
        return cls.from_json_dict(json.loads(text))


def _sample_vector(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    p = np.clip(probs, 0.0, None)
    return rng.multinomial(shots, p / p.sum()).astype(float)


def run_noisy(
    c: Circuit,
    shots: int,
    noise: NoiseModel | None = None,
    seed: int | None = None,
) -> CountsHistogram:
    """Sample a measured circuit under the stochastic noise model.

    The Philox counter generator keeps results reproducible for a fixed
    (circuit, shots, noise, seed) regardless of platform.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    noise = noise or NoiseModel()
    qubits = _measure_order(c)
    lambdas = [noise.readout_rate(q) for q in qubits]
    k = len(qubits)

    rng = np.random.Generator(np.random.Philox(seed if seed is not None else noise.seed))

    sites = [g for g in c.gates if g.kind != "measure"]
    site_rates = np.array(
        [noise.cx_depol if g.kind == "cx" else noise.sq_depol for g in sites]
    )

    # which shots suffer an error, and where it first strikes
    if site_rates.size and site_rates.max() > 0.0:
        fires = np.zeros((shots, len(sites)), dtype=bool)
        for j, rate in enumerate(site_rates):
            if rate > 0.0:
                fires[:, j] = rng.random(shots) < rate
        dirty = np.flatnonzero(fires.any(axis=1))
    else:
        fires = np.zeros((0, 0), dtype=bool)
        dirty = np.empty(0, dtype=np.intp)

    # prefix states: prefix[i] is the state after the first i gates
    psi = zero_state(c.n_qubits)
    prefix = [psi]
    for g in sites:
        psi = _apply_gate(psi, g)
        prefix.append(psi)

    def classical_probs(state: np.ndarray) -> np.ndarray:
        p = np.abs(state) ** 2
        rest = [ax for ax in range(c.n_qubits) if ax not in qubits]
        p = np.transpose(p, qubits + rest).reshape(2 ** k, -1).sum(axis=1)
        return apply_readout(p, lambdas)

    counts = np.zeros(2 ** k)
    n_clean = shots - dirty.size
    if n_clean:
        counts += _sample_vector(classical_probs(prefix[-1]), n_clean, rng)

    for shot in dirty:
        hit = [int(i) for i in np.flatnonzero(fires[shot])]
        state = prefix[hit[0] + 1].copy()
        pos = hit[0] + 1
        for site_idx in hit:
            while pos <= site_idx:
                state = _apply_gate(state, sites[pos])
                pos += 1
            g = sites[site_idx]
            if g.kind == "cx":
                pa, pb = divmod(int(rng.integers(1, 16)), 4)
                if pa:
                    state = _apply_1q(state, _PAULIS[pa], g.qubits[0])
                if pb:
                    state = _apply_1q(state, _PAULIS[pb], g.qubits[1])
            else:
                state = _apply_1q(state, _PAULIS[int(rng.integers(1, 4))], g.qubits[0])
        for i in range(pos, len(sites)):
            state = _apply_gate(state, sites[i])
        p = classical_probs(state)
        u = rng.random()
        outcome = int(np.searchsorted(np.cumsum(p), u * p.sum(), side="right"))
        counts[min(outcome, 2 ** k - 1)] += 1.0

    return CountsHistogram.from_vector(counts, shots, k)
