"""Command line entry points.

Exit codes: 0 success, 2 configuration problem (also argparse's own code),
3 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from .digitizer import build_evolution_circuit
from .errors import ConfigError
from .experiment import (
    NOISE_PRESETS,
    ExperimentConfig,
    emit_outputs,
    resolve_topology,
    run_sweep,
)
from .qasm import emit as qasm_emit
from .qasm import parse as qasm_parse
from .simulator import NoiseModel
from .tomography import calibrate_confusion
from .transpiler import Layout, hub_layout, lower_to_basis, route, simplify


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravopto",
        description="Digital simulation of a linearized optomechanical coupling "
        "on dual-rail encoded qubits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a full epsilon sweep and write results")
    _add_run_flags(sweep)
    sweep.add_argument("--out-dir", default=None, help="output directory")
    sweep.add_argument("--export-qasm", action="store_true", help="also write per-point circuits")
    sweep.add_argument("--workers", type=int, default=None, help="parallel sweep points")

    tomo = sub.add_parser("tomography", help="single-epsilon run with full detail")
    tomo.add_argument("--epsilon", required=True, help="evolution parameter")
    _add_run_flags(tomo, epsilon=False)

    circuit = sub.add_parser("circuit", help="emit one evolution circuit as OpenQASM")
    circuit.add_argument("--epsilon", type=float, default=0.1)
    circuit.add_argument("--no-ground-prep", action="store_true")
    circuit.add_argument("--transpile", action="store_true")
    circuit.add_argument("--topology", default=None, help="preset name or JSON file")
    circuit.add_argument("--out", default="-", help="output file, - for stdout")

    transpile = sub.add_parser("transpile", help="transpile an OpenQASM file")
    transpile.add_argument("input", help="OpenQASM 2.0 file")
    transpile.add_argument("--topology", default=None)
    transpile.add_argument("--layout", default=None, help="comma-separated physical qubits")
    transpile.add_argument("--out", default="-", help="output file, - for stdout")

    calib = sub.add_parser("calibrate", help="print a readout confusion matrix")
    calib.add_argument("--noise-preset", choices=sorted(NOISE_PRESETS), default="belem-like")
    calib.add_argument("--readout", type=float, default=None, help="override flip rate")
    calib.add_argument("--n-bits", type=int, default=4)
    calib.add_argument("--shots", type=int, default=0, help="0 for the analytic matrix")
    calib.add_argument("--seed", type=int, default=0)
    calib.add_argument("--out", default="-")
    return parser


def _add_run_flags(p: argparse.ArgumentParser, epsilon: bool = True):
    p.add_argument("--config", default=None, help="JSON config file")
    if epsilon:
        p.add_argument("--epsilon", default=None, help="comma-separated values, overrides config")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--noise-preset", choices=sorted(NOISE_PRESETS), default=None)
    p.add_argument("--topology", default=None, help="preset name or JSON file")
    p.add_argument("--no-mitigation", action="store_true")
    p.add_argument("--no-postselect", action="store_true")
    p.add_argument("--no-transpile", action="store_true")
    p.add_argument("--analytic", action="store_true")


def _run_config(args) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                data = json.loads(fh.read())
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be an object")
    if args.noise_preset:
        data.update(NOISE_PRESETS[args.noise_preset])
    if getattr(args, "epsilon", None) is not None:
        try:
            data["epsilon_values"] = [float(v) for v in str(args.epsilon).split(",")]
        except ValueError as exc:
            raise ConfigError(f"epsilon_values: {exc}") from exc
    for flag, key in (("shots", "shots"), ("seed", "seed"), ("topology", "topology")):
        value = getattr(args, flag, None)
        if value is not None:
            data[key] = value
    if args.no_mitigation:
        data["mitigation"] = False
    if args.no_postselect:
        data["postselection"] = False
    if args.no_transpile:
        data["transpile"] = False
    if args.analytic:
        data["analytic_mode"] = True
    if getattr(args, "out_dir", None):
        data["out_dir"] = args.out_dir
    if getattr(args, "workers", None):
        data["workers"] = args.workers
    if getattr(args, "export_qasm", False):
        data["export_qasm"] = True
    return ExperimentConfig.from_json_dict(data)


def _write(text: str, dest: str):
    if dest == "-":
        sys.stdout.write(text)
        return
    with open(dest, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_sweep(args) -> int:
    cfg = _run_config(args)
    table = run_sweep(cfg)
    paths = emit_outputs(table, cfg, out_dir=cfg.out_dir or ".")
    mean_f = sum(r["fidelity"] for r in table) / len(table)
    print(f"wrote {paths['csv']} and {paths['json']}")
    print(f"{len(table)} points, mean fidelity {mean_f:.4f}")
    return 0


def _cmd_tomography(args) -> int:
    cfg = _run_config(args)
    row = run_sweep(cfg)[0]
    print(json.dumps(row, indent=2, sort_keys=True))
    return 0


def _cmd_circuit(args) -> int:
    circ = build_evolution_circuit(
        args.epsilon, prepend_ground_prep=not args.no_ground_prep
    )
    if args.transpile:
        circ = lower_to_basis(circ)
        topo = resolve_topology(args.topology)
        if topo is not None:
            circ = route(circ, topo, hub_layout(topo, circ.n_qubits)).circuit
        circ = simplify(circ)
    elif args.topology:
        raise ConfigError("topology: only used together with --transpile")
    _write(qasm_emit(circ), args.out)
    return 0


def _cmd_transpile(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        circ = qasm_parse(fh.read())
    circ = lower_to_basis(circ)
    topo = resolve_topology(args.topology)
    if topo is not None:
        if args.layout:
            layout = Layout(tuple(int(q) for q in args.layout.split(",")))
        else:
            layout = hub_layout(topo, circ.n_qubits)
        circ = route(circ, topo, layout).circuit
    elif args.layout:
        raise ConfigError("layout: requires a topology")
    circ = simplify(circ)
    single, cnots = circ.gate_counts()
    _write(qasm_emit(circ), args.out)
    summary = f"single_qubit_gates={single} cnot_gates={cnots}\n"
    (sys.stderr if args.out == "-" else sys.stdout).write(summary)
    return 0


def _cmd_calibrate(args) -> int:
    rate = args.readout if args.readout is not None else NOISE_PRESETS[args.noise_preset]["readout"]
    noise = NoiseModel(readout=rate)
    confusion = calibrate_confusion(
        args.n_bits, noise, shots=args.shots or None, seed=args.seed
    )
    payload = {
        "n_bits": args.n_bits,
        "readout": rate,
        "shots": args.shots,
        "matrix": [[float(v) for v in row] for row in confusion.matrix()],
    }
    _write(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "tomography": _cmd_tomography,
    "circuit": _cmd_circuit,
    "transpile": _cmd_transpile,
    "calibrate": _cmd_calibrate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
