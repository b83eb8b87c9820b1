"""End-to-end sweeps: build, transpile, simulate, estimate, report.

A sweep point is fully determined by the config and a per-point seed derived
from the global one, so results are reproducible row by row no matter how
many workers run the sweep. The CSV payload is byte-stable for a fixed
config; the JSON report additionally carries a timestamp.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from datetime import datetime, timezone

import numpy as np

from .analysis import (
    concurrence_theory,
    fidelity_error,
    fidelity_from_traces,
)
from .bosonmap import ModeEncoding, PHYSICAL_BITSTRINGS
from .circuit import Circuit
from .digitizer import build_evolution_circuit
from .errors import ConfigError
from .qasm import emit as qasm_emit
from .simulator import (
    CountsHistogram,
    NoiseModel,
    apply_readout,
    born_probabilities,
    run_noisy,
)
from .tomography import (
    SETTING_LABELS,
    calibrate_confusion,
    estimate_traces,
    measurement_circuits,
    mitigate,
    postselect,
)
from .transpiler import Layout, Topology, hub_layout, route, simplify, lower_to_basis

RESULT_COLUMNS = (
    "epsilon",
    "fidelity",
    "fidelity_err",
    "tr_zz",
    "tr_xy",
    "tr_yx",
    "tr_iz",
    "tr_zi",
    "concurrence_theory",
    "retained_fraction_zz",
    "single_qubit_gates",
    "cnot_gates",
    "shots",
    "seed",
)

NOISE_PRESETS = {
    "none": {"readout": 0.0, "sq_depol": 0.0, "cx_depol": 0.0},
    "belem-like": {"readout": 0.0211, "sq_depol": 2.76e-4, "cx_depol": 0.00875},
    "nairobi-like": {"readout": 0.0306, "sq_depol": 3.28e-4, "cx_depol": 0.01492},
}

DEFAULT_EPSILONS = tuple(float(e) for e in np.logspace(-7.0, -2.0, 13))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; validation errors name the offending field."""

    epsilon_values: tuple = DEFAULT_EPSILONS
    shots: int = 100_000
    readout: float = 0.0
    sq_depol: float = 0.0
    cx_depol: float = 0.0
    topology: str | None = None
    layout: tuple | None = None
    mitigation: bool = True
    postselection: bool = True
    transpile: bool = True
    analytic_mode: bool = False
    seed: int = 0
    workers: int = 1
    out_dir: str | None = None
    export_qasm: bool = False

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilon_values)
        if not eps:
            raise ConfigError("epsilon_values: must not be empty")
        for e in eps:
            if not abs(e) < 1.0:
                raise ConfigError(f"epsilon_values: |{e}| is not < 1")
        object.__setattr__(self, "epsilon_values", eps)
        if self.shots < 1:
            raise ConfigError("shots: must be >= 1")
        if not 0.0 <= self.readout < 0.5:
            raise ConfigError(f"readout: {self.readout} outside [0, 0.5)")
        for name in ("sq_depol", "cx_depol"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ConfigError(f"{name}: {v} outside [0, 1)")
        if self.analytic_mode and (self.sq_depol > 0 or self.cx_depol > 0):
            raise ConfigError(
                "analytic_mode: exact probabilities support readout noise only"
            )
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if self.layout is not None:
            if self.topology is None:
                raise ConfigError("layout: requires a topology")
            object.__setattr__(self, "layout", tuple(int(q) for q in self.layout))

    @classmethod
    def with_preset(cls, preset: str, **kwargs) -> "ExperimentConfig":
        if preset not in NOISE_PRESETS:
            raise ConfigError(
                f"noise preset: unknown {preset!r}; have {sorted(NOISE_PRESETS)}"
            )
        merged = dict(NOISE_PRESETS[preset])
        merged.update(kwargs)
        return cls(**merged)

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown config field")
        clean = dict(data)
        for key in ("epsilon_values", "layout"):
            if clean.get(key) is not None:
                clean[key] = tuple(clean[key])
        return cls(**clean)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be an object")
        return cls.from_json_dict(data)

    def to_json_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    def noise_model(self) -> NoiseModel:
        return NoiseModel(
            readout=self.readout, sq_depol=self.sq_depol, cx_depol=self.cx_depol
        )


def resolve_topology(name_or_path: str | None) -> Topology | None:
    if name_or_path is None:
        return None
    if name_or_path in ("belem-like", "nairobi-like"):
        return Topology.preset(name_or_path)
    if os.path.exists(name_or_path):
        with open(name_or_path, "r", encoding="utf-8") as fh:
            return Topology.from_json(fh.read(), name=os.path.basename(name_or_path))
    raise ConfigError(f"topology: {name_or_path!r} is neither a preset nor a file")


def prepare_circuits(cfg: ExperimentConfig, epsilon: float) -> dict:
    """The five as-run measurement circuits for one sweep point."""
    base = build_evolution_circuit(epsilon, prepend_ground_prep=True)
    pairs = measurement_circuits(base, ModeEncoding())
    topo = resolve_topology(cfg.topology)
    out = {}
    for setting, circ in pairs:
        if cfg.transpile:
            circ = lower_to_basis(circ)
            if topo is not None:
                lay = Layout(cfg.layout) if cfg.layout else hub_layout(topo, circ.n_qubits)
                circ = route(circ, topo, lay).circuit
            circ = simplify(circ)
        out[setting.label] = (setting, circ)
    return out


def _analytic_histogram(circ: Circuit, shots: int, noise: NoiseModel) -> CountsHistogram:
    qubits = [q for q, _ in sorted(circ.measurements, key=lambda qc: qc[1])]
    probs = born_probabilities(circ)
    probs = apply_readout(probs, [noise.readout_rate(q) for q in qubits])
    return CountsHistogram.from_vector(probs * shots, shots, len(qubits))


def run_point(cfg: ExperimentConfig, epsilon: float, seed: int) -> dict:
    """One sweep row; self-contained and deterministic for (cfg, eps, seed)."""
    circuits = prepare_circuits(cfg, epsilon)
    noise = cfg.noise_model()
    setting_seeds = np.random.SeedSequence(seed).generate_state(len(SETTING_LABELS))

    histograms = {}
    retained = {}
    for idx, label in enumerate(SETTING_LABELS):
        setting, circ = circuits[label]
        if cfg.analytic_mode:
            hist = _analytic_histogram(circ, cfg.shots, noise)
        else:
            hist = run_noisy(circ, cfg.shots, noise, seed=int(setting_seeds[idx]))
        if cfg.mitigation:
            qubits = [q for q, _ in sorted(circ.measurements, key=lambda qc: qc[1])]
            confusion = calibrate_confusion(len(qubits), noise, qubits=qubits)
            hist = mitigate(hist, confusion)
        if label == "ZZ":
            # the sweep post-selects the correlation setting; the population
            # settings keep their leakage, which decodes to zero weight
            filtered, frac = postselect(hist, setting)
            retained[label] = frac
            if cfg.postselection:
                hist = filtered
        histograms[label] = hist

    result = estimate_traces(histograms, retained)
    fid = fidelity_from_traces(epsilon, result)
    fid_err = fidelity_error(epsilon, result, cfg.readout)
    single, cnots = circuits["ZZ"][1].gate_counts()
    return {
        "epsilon": float(epsilon),
        "fidelity": float(fid),
        "fidelity_err": float(fid_err),
        "tr_zz": result.tr_zz,
        "tr_xy": result.tr_xy,
        "tr_yx": result.tr_yx,
        "tr_iz": result.tr_iz,
        "tr_zi": result.tr_zi,
        "concurrence_theory": concurrence_theory(epsilon),
        "retained_fraction_zz": retained.get("ZZ", 1.0),
        "single_qubit_gates": single,
        "cnot_gates": cnots,
        "shots": cfg.shots,
        "seed": int(seed),
    }


def run_sweep(cfg: ExperimentConfig) -> list[dict]:
    """One row per epsilon, in input order."""
    point_seeds = np.random.SeedSequence(cfg.seed).generate_state(
        len(cfg.epsilon_values)
    )
    jobs = list(zip(cfg.epsilon_values, (int(s) for s in point_seeds)))
    if cfg.workers == 1:
        return [run_point(cfg, eps, s) for eps, s in jobs]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(run_point, cfg, eps, s) for eps, s in jobs]
        return [f.result() for f in futures]


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_outputs(
    table: list[dict],
    cfg: ExperimentConfig,
    out_dir: str | None = None,
    timestamp: str | None = None,
) -> dict:
    """Write results.csv and report.json (and QASM exports when asked).

    Returns the paths written. The CSV holds exactly RESULT_COLUMNS and is
    byte-stable for a fixed config; the timestamp lives only in the JSON.
    """
    if not table:
        raise ValueError("nothing to write")
    out_dir = out_dir or cfg.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    csv_path = os.path.join(out_dir, "results.csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for row in table:
            writer.writerow([_format_cell(row[col]) for col in RESULT_COLUMNS])
    paths["csv"] = csv_path

    when = timestamp or datetime.now(timezone.utc).isoformat()
    from gravopto import __version__

    report = {
        "config": cfg.to_json_dict(),
        "provenance": {"version": __version__, "seed": cfg.seed, "timestamp": when},
        "results": table,
    }
    json_path = os.path.join(out_dir, "report.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths["json"] = json_path

    if cfg.export_qasm:
        topo = resolve_topology(cfg.topology)
        qasm_paths = []
        for i, eps in enumerate(cfg.epsilon_values):
            circ = build_evolution_circuit(eps, prepend_ground_prep=True)
            if cfg.transpile:
                circ = lower_to_basis(circ)
                if topo is not None:
                    lay = Layout(cfg.layout) if cfg.layout else hub_layout(topo, circ.n_qubits)
                    circ = route(circ, topo, lay).circuit
                circ = simplify(circ)
            path = os.path.join(out_dir, f"circuit_{i:02d}.qasm")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(qasm_emit(circ))
            qasm_paths.append(path)
        paths["qasm"] = qasm_paths
    return paths


def subspace_weight(hist: CountsHistogram) -> float:
    """Fraction of histogram weight inside the dual-rail subspace."""
    total = hist.total()
    if total <= 0:
        return 0.0
    kept = sum(hist.entries.get(k, 0.0) for k in PHYSICAL_BITSTRINGS)
    return kept / total
