"""Command-line front end binding the benchmark pipelines.

One executable, six subcommands: exact-spectrum dumps, the VQE dissociation
sweep, QITE/QLanczos traces, the hidden-inverse benchmark, a mitigation
demo, and Hamiltonian file validation.  Every run that writes a CSV also
writes a ``<out>.config.json`` sidecar with the resolved configuration, and
``--report`` renders quick-look figures next to the table.

Exit codes: 0 success, 2 usage, 3 missing input file, 4 schema or physics
contract violation, 5 numerical failure.  Errors go to stderr as one JSON
line so wrapping tools can parse them.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .hamiltonian import (
    QubitHamiltonian,
    SchemaError,
    SymmetrySector,
    exact_spectrum,
    extract_block,
    load,
    stable_cell_seed,
    triplet_state,
)
from .pauli import PauliSum, expectation
from .qite import QiteConfig, qlanczos, run_qite
from .results import (
    HIDDEN_INVERSE_COLUMNS,
    MITIGATION_DEMO_COLUMNS,
    QITE_TRACE_COLUMNS,
    RESULTS_COLUMNS,
    STATE_KEYS,
    format_value,
    write_table,
)
from .simulator import NoiseModel
from .vqe import EstimatorConfig, OptimizerConfig, scan_dissociation, triplet_energy

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_SCHEMA = 4
EXIT_NUMERICAL = 5

#: Sectors with at least one free direction, in presentation order.
QITE_SECTOR_LABELS = (
    "ne1_sz-1/2", "ne1_sz+1/2", "ne2_sz0", "ne3_sz-1/2", "ne3_sz+1/2",
)

_SECTOR_BY_LABEL = {
    SymmetrySector(1, -0.5).label: SymmetrySector(1, -0.5),
    SymmetrySector(1, 0.5).label: SymmetrySector(1, 0.5),
    SymmetrySector(2, 0.0).label: SymmetrySector(2, 0.0),
    SymmetrySector(3, -0.5).label: SymmetrySector(3, -0.5),
    SymmetrySector(3, 0.5).label: SymmetrySector(3, 0.5),
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems through ``CliError``."""

    def error(self, message):
        raise CliError(EXIT_USAGE, message)


# ---------------------------------------------------------------------------
# flag plumbing
# ---------------------------------------------------------------------------

def _shots_value(text: str) -> Union[str, int]:
    if text == "exact":
        return "exact"
    try:
        shots = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'exact' or an integer, got {text!r}")
    if shots < 1:
        raise argparse.ArgumentTypeError("shot count must be positive")
    return shots


def _float_list(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _sector_list(text: str) -> Tuple[str, ...]:
    if text == "all":
        return QITE_SECTOR_LABELS
    labels = tuple(part.strip() for part in text.split(","))
    for label in labels:
        if label not in _SECTOR_BY_LABEL:
            raise argparse.ArgumentTypeError(
                f"unknown sector {label!r}; choose from {', '.join(QITE_SECTOR_LABELS)}"
            )
    return labels


def _direction_list(text: str) -> Tuple[str, ...]:
    directions = tuple(part.strip() for part in text.split(","))
    for d in directions:
        if d not in ("min", "max"):
            raise argparse.ArgumentTypeError(f"directions are 'min' and 'max', got {d!r}")
    return directions


def _add_input_flags(parser, required: bool = False) -> None:
    parser.add_argument(
        "--hamiltonian", action="append", metavar="FILE",
        help="Hamiltonian JSON file; repeat for several",
    )
    if not required:
        parser.add_argument(
            "--hamiltonian-dir", metavar="DIR",
            help="directory whose *.json files are all ingested, sorted by name",
        )


def _add_run_flags(parser, default_shots: Union[str, int] = "exact") -> None:
    parser.add_argument("--shots", type=_shots_value, default=default_shots,
                        metavar="{exact|N}", help="estimator: exact or a shot count")
    parser.add_argument("--seed", type=int, default=0, help="global seed")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("--out", default="-", metavar="PATH",
                        help="output CSV; '-' streams to stdout")
    parser.add_argument("--report", action="store_true",
                        help="render quick-look figures next to the CSV")
    parser.add_argument("--config", metavar="FILE",
                        help="key=value file supplying flag defaults")


def _add_noise_flags(parser, p10=0.0, p01=0.0, bias=0.0, sigma=0.0) -> None:
    parser.add_argument("--readout-p10", type=float, default=p10,
                        help="probability of reading 1 for a true 0")
    parser.add_argument("--readout-p01", type=float, default=p01,
                        help="probability of reading 0 for a true 1")
    parser.add_argument("--over-rotation-bias", type=float, default=bias,
                        help="systematic relative XX angle error")
    parser.add_argument("--over-rotation-sigma", type=float, default=sigma,
                        help="stochastic relative XX angle error, std dev")


def build_parser() -> Tuple[_Parser, Dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="qcbench", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)
    by_name: Dict[str, argparse.ArgumentParser] = {}

    def command(name, help_text):
        sub = commands.add_parser(name, help=help_text)
        by_name[name] = sub
        return sub

    sub = command("spectrum", "exact eigenvalues with sector labels")
    _add_input_flags(sub)
    sub.add_argument("--config", metavar="FILE")

    sub = command("validate-hamiltonian", "check files against the physics contract")
    _add_input_flags(sub)
    sub.add_argument("--config", metavar="FILE")

    sub = command("vqe-scan", "seven-state dissociation sweep")
    _add_input_flags(sub)
    _add_run_flags(sub)
    _add_noise_flags(sub)
    sub.add_argument("--ansatz", choices=("spc",), default="spc",
                     help="circuit family for the sector extrema")
    sub.add_argument("--mitigation", choices=("none", "readout", "readout+richardson"),
                     default="none")
    sub.add_argument("--calibration-shots", type=int, default=100_000)
    sub.add_argument("--max-evaluations", type=int, default=200,
                     help="objective evaluations per optimizer start")
    sub.add_argument("--restarts", type=int, default=2,
                     help="extra random starts after the zero start")
    sub.add_argument("--tolerance", type=float, default=1e-8,
                     help="optimizer convergence tolerance")

    sub = command("qite-scan", "imaginary-time traces with a Krylov estimate")
    _add_input_flags(sub)
    _add_run_flags(sub)
    _add_noise_flags(sub)
    sub.add_argument("--sectors", type=_sector_list, default=QITE_SECTOR_LABELS,
                     metavar="{all|LABELS}", help="comma-separated sector labels")
    sub.add_argument("--directions", type=_direction_list, default=("min", "max"),
                     metavar="LIST", help="comma-separated subset of min,max")
    sub.add_argument("--dtau", type=float, default=0.1, help="imaginary-time step")
    sub.add_argument("--epsilon", type=float, default=0.001,
                     help="energy-plateau convergence threshold")
    sub.add_argument("--max-steps", type=int, default=200)
    sub.add_argument("--krylov", type=int, default=2,
                     help="Krylov dimension for the trace-end estimate; 0 disables")
    sub.add_argument("--mitigation", choices=("none", "readout"), default="none")

    sub = command("hidden-inverse-bench",
                  "native vs hidden-inverse UCC-3 under over-rotation")
    _add_input_flags(sub, required=True)
    _add_run_flags(sub, default_shots="exact")
    sub.add_argument("--epsilons", type=_float_list,
                     default=tuple(round(0.01 * k, 2) for k in range(1, 11)),
                     metavar="LIST", help="comma-separated over-rotation magnitudes")
    sub.add_argument("--trials", type=int, default=20)
    sub.add_argument("--max-evaluations", type=int, default=120)

    sub = command("mitigation-demo", "readout correction and extrapolation on one state")
    _add_input_flags(sub, required=True)
    _add_run_flags(sub, default_shots=8192)
    _add_noise_flags(sub, p10=0.02, p01=0.02, bias=0.01)
    sub.add_argument("--calibration-shots", type=int, default=100_000)

    return parser, by_name


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

def _read_config_file(path: Path) -> Dict[str, str]:
    if not path.is_file():
        raise CliError(EXIT_MISSING_FILE, f"no such config file: {path}")
    values: Dict[str, str] = {}
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(EXIT_USAGE, f"{path}:{line_no}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config_file(args, argv, parser, by_name):
    file_values = _read_config_file(Path(args.config))
    sub = by_name[args.command]
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help",)}
    for key, text in file_values.items():
        if key not in actions:
            raise CliError(EXIT_USAGE, f"unknown config key {key!r} for {args.command}")
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            value: object = text.lower() in ("1", "true", "yes", "on")
        else:
            try:
                value = action.type(text) if action.type else text
            except argparse.ArgumentTypeError as exc:
                raise CliError(EXIT_USAGE, f"config key {key!r}: {exc}")
            if action.choices and value not in action.choices:
                raise CliError(
                    EXIT_USAGE,
                    f"config key {key!r}: {value!r} not in {tuple(action.choices)}",
                )
            if isinstance(action, argparse._AppendAction):
                value = [value]
        sub.set_defaults(**{key: value})
    # flags given on the command line still win: defaults only fill gaps
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _collect_paths(args, minimum: int = 0) -> List[Path]:
    paths = [Path(p) for p in (args.hamiltonian or [])]
    directory = getattr(args, "hamiltonian_dir", None)
    if directory:
        d = Path(directory)
        if not d.is_dir():
            raise CliError(EXIT_MISSING_FILE, f"no such directory: {d}")
        paths.extend(sorted(d.glob("*.json")))
    for p in paths:
        if not p.is_file():
            raise CliError(EXIT_MISSING_FILE, f"no such file: {p}")
    if len(paths) < minimum:
        raise CliError(EXIT_USAGE, "at least one --hamiltonian is required")
    return paths


def _noise_from(args) -> Optional[NoiseModel]:
    fields = (args.readout_p10, args.readout_p01,
              args.over_rotation_bias, args.over_rotation_sigma)
    if not any(fields):
        return None
    return NoiseModel(
        p10=args.readout_p10,
        p01=args.readout_p01,
        over_rotation_bias=args.over_rotation_bias,
        over_rotation_sigma=args.over_rotation_sigma,
    )


def _estimator_from(args, mitigation: str) -> EstimatorConfig:
    if args.shots == "exact":
        if mitigation != "none":
            raise CliError(EXIT_USAGE, "mitigation needs a sampled estimator; set --shots N")
        return EstimatorConfig(estimator="exact")
    return EstimatorConfig(
        estimator="shots",
        shots=args.shots,
        noise=_noise_from(args),
        mitigation=mitigation,
        calibration_shots=getattr(args, "calibration_shots", 100_000),
    )


def _write_sidecar(args) -> None:
    resolved = {}
    for key, value in sorted(vars(args).items()):
        if isinstance(value, Path):
            value = str(value)
        elif isinstance(value, tuple):
            value = list(value)
        resolved[key] = value
    sidecar = Path(str(args.out) + ".config.json")
    sidecar.write_text(json.dumps(resolved, indent=2, sort_keys=True) + "\n")


def _emit_table(args, columns, rows, renderer=None) -> None:
    if args.out == "-" and args.report:
        raise CliError(EXIT_USAGE, "--report needs --out FILE to place the figures")
    write_table(args.out, columns, rows)
    if args.out != "-":
        _write_sidecar(args)
        if args.report and renderer is not None:
            for figure in renderer(rows, Path(args.out)):
                print(f"figure: {figure}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_spectrum(args) -> int:
    paths = _collect_paths(args, minimum=1)
    for index, path in enumerate(paths):
        h = load(path)
        if len(paths) > 1:
            prefix = "" if index == 0 else "\n"
            print(f"{prefix}# {path}")
        spectrum = exact_spectrum(h)
        for energy, sector, spin in zip(
            spectrum.eigenvalues, spectrum.sectors, spectrum.spin
        ):
            tag = "" if spin is None else f"  spin={spin}"
            print(f"{sector.label:12s} {format_value(float(energy))}{tag}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    paths = _collect_paths(args, minimum=1)
    bad = 0
    for path in paths:
        problems = load(path).validate()
        if problems:
            bad += 1
            for problem in problems:
                print(f"{path}: {problem}")
        else:
            print(f"{path}: ok")
    if bad:
        raise CliError(EXIT_SCHEMA, f"{bad} of {len(paths)} files violate the contract")
    return EXIT_OK


def _cmd_vqe_scan(args) -> int:
    hams = [load(p) for p in _collect_paths(args)]
    estimator = _estimator_from(args, args.mitigation)
    optimizer = OptimizerConfig(
        max_evaluations=args.max_evaluations,
        tolerance=args.tolerance,
        restarts=args.restarts,
    )
    rows = scan_dissociation(
        hams, estimator=estimator, optimizer=optimizer, seed=args.seed, jobs=args.jobs
    )
    ordered = sorted(rows, key=lambda r: (str(r["molecule"]), float(r["distance"])))
    _emit_table(args, RESULTS_COLUMNS, ordered, _render_vqe_report)
    return EXIT_OK


def _qite_task(payload):
    (order, pairs, n_qubits, molecule, distance, label, direction,
     config, krylov, seed) = payload
    h = QubitHamiltonian(
        terms=PauliSum.from_terms(pairs, n_qubits=n_qubits),
        molecule=molecule,
        bond_distance=distance,
    )
    block = extract_block(h, _SECTOR_BY_LABEL[label])
    sign = 1.0 if direction == "min" else -1.0
    problem = block.reduced if direction == "min" else -1.0 * block.reduced
    start = ("0" if direction == "min" else "1") * block.n_reduced_qubits
    trajectory = run_qite(problem, start, config, seed=seed)
    exact = float(block.eigenvalues()[0 if direction == "min" else -1])
    rows = []
    for step, energy in enumerate(trajectory.energies):
        rows.append({
            "molecule": molecule, "distance": distance, "sector": label,
            "direction": direction, "series": "qite", "step": step,
            "beta": step * config.delta_tau,
            "energy": sign * energy + block.shift, "exact": exact,
        })
    if krylov > 0:
        top = len(trajectory.records) - (len(trajectory.records) % 2)
        evens = list(range(0, top + 1, 2))
        indices = tuple(evens[-krylov:])
        estimate = qlanczos(trajectory, indices).eigenvalues[0]
        rows.append({
            "molecule": molecule, "distance": distance, "sector": label,
            "direction": direction, "series": "krylov", "step": indices[-1],
            "beta": indices[-1] * config.delta_tau,
            "energy": sign * float(estimate) + block.shift, "exact": exact,
        })
    return order, rows


def _cmd_qite_scan(args) -> int:
    paths = _collect_paths(args)
    noise = _noise_from(args)
    config = QiteConfig(
        delta_tau=args.dtau,
        max_steps=args.max_steps,
        convergence_epsilon=args.epsilon,
        estimator="exact" if args.shots == "exact" else "shots",
        shots=args.shots if args.shots != "exact" else 8192,
        noise=None if args.shots == "exact" else noise,
        readout_mitigation=args.mitigation == "readout",
    )
    if config.estimator == "exact" and args.mitigation != "none":
        raise CliError(EXIT_USAGE, "mitigation needs a sampled estimator; set --shots N")
    tasks = []
    for path in paths:
        h = load(path)
        pairs = h.terms.items()
        for label in args.sectors:
            for direction in args.directions:
                seed = stable_cell_seed(
                    args.seed, h.molecule, h.bond_distance, label, direction
                )
                tasks.append((
                    len(tasks), pairs, h.n_qubits, h.molecule, h.bond_distance,
                    label, direction, config, args.krylov, seed,
                ))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outputs = list(pool.map(_qite_task, tasks))
    else:
        outputs = [_qite_task(t) for t in tasks]
    rows = []
    for _, task_rows in sorted(outputs, key=lambda o: o[0]):
        rows.extend(task_rows)
    rows.sort(key=lambda r: (
        str(r["molecule"]), float(r["distance"]), str(r["sector"]),
        str(r["direction"]), 0 if r["series"] == "qite" else 1, int(r["step"]),
    ))
    _emit_table(args, QITE_TRACE_COLUMNS, rows, _render_qite_report)
    return EXIT_OK


def _cmd_hidden_inverse(args) -> int:
    from .mitigation import hidden_inverse_benchmark

    paths = _collect_paths(args, minimum=1)
    if len(paths) != 1:
        raise CliError(EXIT_USAGE, "this benchmark runs on exactly one Hamiltonian")
    h = load(paths[0])
    rows = hidden_inverse_benchmark(
        h,
        epsilons=args.epsilons,
        trials=args.trials,
        seed=args.seed,
        max_evaluations=args.max_evaluations,
        jobs=args.jobs,
    )
    _emit_table(args, HIDDEN_INVERSE_COLUMNS, rows, _render_hidden_inverse_report)
    return EXIT_OK


def _cmd_mitigation_demo(args) -> int:
    paths = _collect_paths(args, minimum=1)
    if len(paths) != 1:
        raise CliError(EXIT_USAGE, "the demo runs on exactly one Hamiltonian")
    if args.shots == "exact":
        raise CliError(EXIT_USAGE, "the demo needs a sampled estimator; set --shots N")
    h = load(paths[0])
    reference = float(expectation(triplet_state(), h.terms))
    rows = []
    for name, mitigation in (
        ("raw", "none"),
        ("readout", "readout"),
        ("readout_richardson", "readout+richardson"),
    ):
        estimator = _estimator_from(args, mitigation)
        result = triplet_energy(h, estimator=estimator, seed=args.seed)
        rows.append({
            "quantity": f"triplet_{name}",
            "value": result.energy,
            "stderr": result.stderr,
            "reference": reference,
        })
    _emit_table(args, MITIGATION_DEMO_COLUMNS, rows, _render_demo_report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# quick-look figures
# ---------------------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _render_vqe_report(rows, out: Path) -> List[Path]:
    plt = _pyplot()
    molecules = sorted({str(r["molecule"]) for r in rows})
    if not molecules:
        return []
    cols = min(2, len(molecules))
    rows_n = (len(molecules) + cols - 1) // cols
    fig, axes = plt.subplots(
        rows_n, cols, figsize=(5.0 * cols, 3.6 * rows_n), squeeze=False
    )
    for ax, molecule in zip(axes.flat, molecules):
        sub = sorted(
            (r for r in rows if r["molecule"] == molecule),
            key=lambda r: float(r["distance"]),
        )
        x = [float(r["distance"]) for r in sub]
        for key in STATE_KEYS:
            exact = [float(r[f"exact_{key}"]) for r in sub]
            energy = [float(r[f"energy_{key}"]) for r in sub]
            (line,) = ax.plot(x, exact, "-", lw=1.0, label=key)
            ax.plot(x, energy, "o", ms=3.5, color=line.get_color())
        ax.set_title(molecule)
        ax.set_xlabel("bond distance [$\\AA$]")
        ax.set_ylabel("energy [Ha]")
    for ax in axes.flat[len(molecules):]:
        ax.axis("off")
    axes.flat[0].legend(fontsize=7, ncol=2)
    fig.tight_layout()
    path = out.with_name(out.stem + "_curves.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def _render_qite_report(rows, out: Path) -> List[Path]:
    plt = _pyplot()
    panels = sorted({(str(r["sector"]), str(r["direction"])) for r in rows})
    if not panels:
        return []
    cols = min(2, len(panels))
    rows_n = (len(panels) + cols - 1) // cols
    fig, axes = plt.subplots(
        rows_n, cols, figsize=(5.0 * cols, 3.0 * rows_n), squeeze=False
    )
    for ax, (sector, direction) in zip(axes.flat, panels):
        sub = [r for r in rows if r["sector"] == sector and r["direction"] == direction]
        curves = sorted({(str(r["molecule"]), float(r["distance"])) for r in sub})
        for molecule, distance in curves:
            trace = [
                r for r in sub
                if r["molecule"] == molecule
                and float(r["distance"]) == distance
                and r["series"] == "qite"
            ]
            trace.sort(key=lambda r: int(r["step"]))
            ax.plot(
                [float(r["beta"]) for r in trace],
                [float(r["energy"]) for r in trace],
                "-", lw=0.8, alpha=0.7,
            )
            marks = [
                r for r in sub
                if r["molecule"] == molecule
                and float(r["distance"]) == distance
                and r["series"] == "krylov"
            ]
            ax.plot(
                [float(r["beta"]) for r in marks],
                [float(r["energy"]) for r in marks],
                "k*", ms=6,
            )
        ax.set_title(f"{sector} ({direction})", fontsize=9)
        ax.set_xlabel("$\\beta$")
        ax.set_ylabel("energy [Ha]")
    for ax in axes.flat[len(panels):]:
        ax.axis("off")
    fig.tight_layout()
    path = out.with_name(out.stem + "_traces.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def _render_hidden_inverse_report(rows, out: Path) -> List[Path]:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for variant, marker in (("native", "o"), ("hidden-inverse", "s")):
        sub = sorted(
            (r for r in rows if r["variant"] == variant),
            key=lambda r: float(r["epsilon"]),
        )
        ax.errorbar(
            [float(r["epsilon"]) for r in sub],
            [float(r["mean_abs_error"]) for r in sub],
            yerr=[float(r["std_abs_error"]) for r in sub],
            marker=marker, ms=4, capsize=2, label=variant,
        )
    ax.set_xlabel("over-rotation magnitude $\\epsilon$")
    ax.set_ylabel("|energy error| [Ha]")
    ax.legend()
    fig.tight_layout()
    path = out.with_name(out.stem + "_errors.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def _render_demo_report(rows, out: Path) -> List[Path]:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    labels = [str(r["quantity"]) for r in rows]
    bias = [abs(float(r["value"]) - float(r["reference"])) for r in rows]
    err = [float(r["stderr"]) for r in rows]
    ax.bar(range(len(rows)), bias, yerr=err, capsize=3)
    ax.set_xticks(range(len(rows)), labels, rotation=20, fontsize=8)
    ax.set_ylabel("|bias| [Ha]")
    fig.tight_layout()
    path = out.with_name(out.stem + "_bias.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "validate-hamiltonian": _cmd_validate,
    "vqe-scan": _cmd_vqe_scan,
    "qite-scan": _cmd_qite_scan,
    "hidden-inverse-bench": _cmd_hidden_inverse,
    "mitigation-demo": _cmd_mitigation_demo,
}


def _emit_error(code: int, message: str) -> None:
    print(json.dumps({"error": message, "code": code}), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, by_name = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            args = _apply_config_file(args, argv, parser, by_name)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        _emit_error(exc.code, exc.message)
        return exc.code
    except SchemaError as exc:
        _emit_error(EXIT_SCHEMA, str(exc))
        return EXIT_SCHEMA
    except FileNotFoundError as exc:
        _emit_error(EXIT_MISSING_FILE, str(exc))
        return EXIT_MISSING_FILE
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        _emit_error(EXIT_NUMERICAL, str(exc))
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
