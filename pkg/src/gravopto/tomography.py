"""Two-mode tomography on dual-rail pairs.

A logical mode lives on a qubit pair: |0> = |01|, |1> = |10|, first qubit
leftmost. Restricted to that pair, logical Z is Z on the first qubit, logical
X is XX, and logical Y is YX (Y on the first qubit, X on the second). So a
logical basis choice turns into local pre-rotations:

    Z or I  ->  none
    X       ->  h on both qubits
    Y       ->  sdg, h on the first qubit and h on the second

Decoding a 4-bit outcome key (cbit order, mode 0 first): a Z factor reads the
pair as 01 -> +1, 10 -> -1, and anything else contributes 0 to the numerator
while the shot still counts in the denominator. X and Y factors read the pair
parity, (-1)**(sum of the two bits). Post-selection applies only to settings
measured in the computational basis, where leaked pairs are identifiable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bosonmap import ModeEncoding, PHYSICAL_BITSTRINGS
from .circuit import Circuit, Gate, h, measure, sdg
from .simulator import CountsHistogram, NoiseModel, run_noisy

SETTING_LABELS = ("ZZ", "XY", "YX", "IZ", "ZI")

_PAIR_Z = {"01": 1.0, "10": -1.0}


@dataclass(frozen=True)
class MeasurementSetting:
    """One tomography setting; label[m] is the basis for logical mode m."""

    label: str

    def __post_init__(self):
        if len(self.label) != 2 or set(self.label) - set("IXYZ"):
            raise ValueError(f"bad setting label {self.label!r}")

    @property
    def z_type(self) -> bool:
        """True when measured directly in the computational basis."""
        return set(self.label) <= {"I", "Z"}

    def rotation_gates(self, enc: ModeEncoding | None = None) -> list[Gate]:
        enc = enc or ModeEncoding()
        gates: list[Gate] = []
        for mode, basis in enumerate(self.label):
            first, second = enc.qubit_of(mode, 0), enc.qubit_of(mode, 1)
            if basis == "X":
                gates += [h(first), h(second)]
            elif basis == "Y":
                gates += [sdg(first), h(first), h(second)]
        return gates

    def decode(self, key: str) -> float:
        """Eigenvalue of this setting for one outcome key (0 on leakage)."""
        value = 1.0
        for mode, basis in enumerate(self.label):
            pair = key[2 * mode: 2 * mode + 2]
            if basis == "I":
                continue
            if basis == "Z":
                z = _PAIR_Z.get(pair)
                if z is None:
                    return 0.0
                value *= z
            else:
                value *= -1.0 if pair.count("1") % 2 else 1.0
        return value


def measurement_circuits(
    base: Circuit,
    enc: ModeEncoding | None = None,
    labels=SETTING_LABELS,
) -> list[tuple[MeasurementSetting, Circuit]]:
    """Append basis rotations and a full register measurement per setting."""
    enc = enc or ModeEncoding()
    if base.has_measurements:
        raise ValueError("base circuit already measures")
    n = enc.qubit_of(enc.n_modes - 1, enc.n_p) + 1
    if base.n_qubits != n:
        raise ValueError(f"base circuit must act on {n} qubits")
    out = []
    for label in labels:
        setting = MeasurementSetting(label)
        gates = setting.rotation_gates(enc) + [measure(q, q) for q in range(n)]
        meta = dict(base.metadata)
        meta["setting"] = label
        out.append((setting, Circuit(n, base.gates + tuple(gates), meta)))
    return out


def postselect(
    hist: CountsHistogram, setting: MeasurementSetting
) -> tuple[CountsHistogram, float]:
    """Drop leaked outcomes for computational-basis settings.

    Rotated settings pass through untouched (leakage is not identifiable
    there); the second return value is the retained weight fraction.
    """
    total = hist.total()
    if total <= 0:
        raise ValueError("empty histogram")
    if not setting.z_type:
        return hist, 1.0
    kept = {k: w for k, w in hist.entries.items() if k in PHYSICAL_BITSTRINGS}
    retained = sum(kept.values()) / total
    return CountsHistogram(kept, hist.shots, hist.n_bits), retained


class ConfusionMatrix:
    """Column-stochastic map from true outcomes to recorded outcomes."""

    def __init__(self, dense: np.ndarray):
        dense = np.asarray(dense, dtype=float)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ValueError("confusion matrix must be square")
        n = int(round(np.log2(dense.shape[0])))
        if 2 ** n != dense.shape[0]:
            raise ValueError("dimension must be a power of two")
        if not np.allclose(dense.sum(axis=0), 1.0, atol=1e-9):
            raise ValueError("columns must sum to one")
        self._dense = dense
        self.n_bits = n

    @classmethod
    def from_lambdas(cls, lambdas) -> "ConfusionMatrix":
        """Independent symmetric bit flips, one rate per classical bit."""
        dense = np.array([[1.0]])
        for lam in lambdas:
            if not 0.0 <= lam < 0.5:
                raise ValueError(f"flip rate {lam} outside [0, 0.5)")
            c = np.array([[1.0 - lam, lam], [lam, 1.0 - lam]])
            dense = np.kron(dense, c)
        return cls(dense)

    @classmethod
    def identity(cls, n_bits: int) -> "ConfusionMatrix":
        return cls(np.eye(2 ** n_bits))

    def matrix(self) -> np.ndarray:
        return self._dense.copy()

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self._dense)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConfusionMatrix) and np.array_equal(
            self._dense, other._dense
        )


def calibrate_confusion(
    n_bits: int,
    noise: NoiseModel,
    shots: int | None = None,
    seed: int | None = None,
    qubits=None,
) -> ConfusionMatrix:
    """Readout confusion, analytic from the model (default) or sampled.

    The sampled variant prepares each of the 2**n basis states with X gates,
    measures, and stacks the observed distributions as columns.
    """
    qubits = list(qubits) if qubits is not None else list(range(n_bits))
    if len(qubits) != n_bits:
        raise ValueError("one measured qubit per classical bit")
    if shots is None:
        return ConfusionMatrix.from_lambdas([noise.readout_rate(q) for q in qubits])
    if shots < 1:
        raise ValueError("empirical calibration needs at least one shot")
    width = max(qubits) + 1
    column_seeds = np.random.SeedSequence(seed).generate_state(2 ** n_bits)
    dense = np.zeros((2 ** n_bits, 2 ** n_bits))
    for state in range(2 ** n_bits):
        bits = format(state, f"0{n_bits}b")
        gates = [Gate("x", (qubits[j],)) for j, b in enumerate(bits) if b == "1"]
        gates += [measure(q, j) for j, q in enumerate(qubits)]
        circ = Circuit(width, tuple(gates))
        hist = run_noisy(circ, shots, noise, seed=int(column_seeds[state]))
        dense[:, state] = hist.to_vector() / shots
    return ConfusionMatrix(dense)


def mitigate(hist: CountsHistogram, confusion: ConfusionMatrix) -> CountsHistogram:
    """Invert readout confusion; falls back to constrained least squares.

    Plain matrix inversion is kept when the result is a valid distribution up
    to rounding; otherwise the nearest probability vector (nonnegative,
    normalised) under the forward map is found with SLSQP.
    """
    if hist.n_bits != confusion.n_bits:
        raise ValueError("histogram and confusion matrix disagree on width")
    vec = hist.to_vector()
    total = vec.sum()
    if total <= 0:
        raise ValueError("empty histogram")
    target = vec / total
    quasi = confusion.inverse() @ target
    if quasi.min() >= -1e-10:
        probs = np.clip(quasi, 0.0, None)
    else:
        from scipy.optimize import minimize

        c = confusion.matrix()

        def cost(p):
            r = c @ p - target
            return float(r @ r)

        def grad(p):
            return 2.0 * (c.T @ (c @ p - target))

        start = np.clip(quasi, 0.0, None)
        start = start / start.sum() if start.sum() > 0 else np.full_like(target, 1.0 / target.size)
        res = minimize(
            cost,
            start,
            jac=grad,
            method="SLSQP",
            bounds=[(0.0, 1.0)] * target.size,
            constraints=[{"type": "eq", "fun": lambda p: p.sum() - 1.0}],
        )
        probs = np.clip(res.x, 0.0, None)
    probs = probs / probs.sum() * total
    return CountsHistogram.from_vector(probs, hist.shots, hist.n_bits)


def expectation(hist: CountsHistogram, setting: MeasurementSetting) -> tuple[float, float]:
    """(estimate, shot-noise standard error) of the setting's eigenvalue."""
    num = 0.0
    den = 0.0
    for key, w in hist.entries.items():
        num += w * setting.decode(key)
        den += w
    if den <= 0:
        raise ValueError("no weight left to average")
    est = num / den
    se = float(np.sqrt(max(1.0 - est * est, 0.0) / den))
    return est, se


@dataclass(frozen=True)
class TomographyResult:
    """Estimated two-mode correlators and their bookkeeping."""

    traces: dict
    errors: dict
    retained: dict
    shots: dict

    def trace(self, label: str) -> float:
        return self.traces[label]

    @property
    def tr_zz(self) -> float:
        return self.traces["ZZ"]

    @property
    def tr_xy(self) -> float:
        return self.traces["XY"]

    @property
    def tr_yx(self) -> float:
        return self.traces["YX"]

    @property
    def tr_iz(self) -> float:
        return self.traces["IZ"]

    @property
    def tr_zi(self) -> float:
        return self.traces["ZI"]


def estimate_traces(
    histograms: dict,
    retained: dict | None = None,
) -> TomographyResult:
    """Turn processed per-setting histograms into correlator estimates."""
    traces, errors, shots = {}, {}, {}
    for label, hist in histograms.items():
        est, se = expectation(hist, MeasurementSetting(label))
        traces[label] = est
        errors[label] = se
        shots[label] = hist.shots
    kept = {label: 1.0 for label in histograms}
    if retained:
        kept.update(retained)
    return TomographyResult(traces, errors, kept, shots)
