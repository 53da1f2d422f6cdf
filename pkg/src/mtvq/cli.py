"""Command-line entry point: ``mtvq {presets,exact,vqe,sweep,eval}``.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EnumerationBoundError, MtvqError, ParseError, ValidationError
from .exact import ground_state, spectrum, write_spectrum_json
from .hamiltonian import EdgeForm, ProblemSpec, cost_terms, parse_bitstring
from .topology import PRESET_NAMES, load_graph_file, preset
from .vqe import (
    DEFAULT_ALPHAS,
    VqeSettings,
    aggregate,
    alpha_sweep,
    run_many,
    write_distribution_csv,
    write_sweep_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2, 3


@dataclass
class CommandOutcome:
    status: int
    summary: str
    artifacts: list[Path] = field(default_factory=list)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _alpha_list(text: str) -> list[float]:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise argparse.ArgumentTypeError("alpha list is empty")
    try:
        return [float(s) for s in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from None


def _add_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESET_NAMES)
    src.add_argument("--file", type=Path, help="problem JSON file")
    p.add_argument("--alpha", type=float, help="override the spatial-adjacency exponent")
    p.add_argument("--edge-form", choices=[f.value for f in EdgeForm], default=EdgeForm.ENDPOINT.value)
    p.add_argument("--round-weights", type=int, metavar="DECIMALS",
                   help="round edge weights to this many decimals")


def _add_vqe_options(p: argparse.ArgumentParser, runs_default: int) -> None:
    p.add_argument("--iters", type=_positive_int, default=300)
    p.add_argument("--shots", type=_positive_int, default=1024)
    p.add_argument("--runs", type=_positive_int, default=runs_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resample-only", action="store_true",
                   help="optimize once and re-sample the final circuit per run")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtvq", description="Linker-placement Hamiltonians: exact and sampling-VQE solvers")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("presets", help="list bundled framework presets")

    p = sub.add_parser("exact", help="exhaustive low-energy spectrum")
    _add_source(p)
    p.add_argument("--top", type=_positive_int, default=6)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("vqe", help="sampling VQE, aggregated over runs")
    _add_source(p)
    _add_vqe_options(p, runs_default=128)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("sweep", help="success counts across alpha values")
    _add_source(p)
    _add_vqe_options(p, runs_default=128)
    p.add_argument("--alphas", type=_alpha_list, default=list(DEFAULT_ALPHAS))
    p.add_argument("--out", type=Path)

    p = sub.add_parser("eval", help="evaluate H for one configuration")
    _add_source(p)
    p.add_argument("--config", required=True, help="bitstring, site-major / type-minor")
    return parser


def load_spec(args) -> ProblemSpec:
    inputs = preset(args.preset) if args.preset else load_graph_file(args.file)
    graph = inputs.graph
    if args.alpha is not None:
        graph = graph.with_alpha(args.alpha)
    if args.round_weights is not None:
        graph = graph.with_weight_decimals(args.round_weights)
    return ProblemSpec(graph, inputs.catalog, inputs.ratio, inputs.c_ratio, inputs.c_occ, args.edge_form)


def cmd_presets(args) -> CommandOutcome:
    lines = []
    for name in PRESET_NAMES:
        inputs = preset(name)
        g = inputs.graph
        lines.append(f"{name:<15} N_i={g.n_sites} |t|={len(inputs.catalog)} "
                     f"{g.n_sites * len(inputs.catalog)} qubits alpha={g.alpha:g} |G|={g.n_edges}")
    print("\n".join(lines))
    return CommandOutcome(EXIT_OK, f"{len(lines)} presets")


def cmd_exact(args) -> CommandOutcome:
    spec = load_spec(args)
    entries = spectrum(spec, args.top)
    for e in entries:
        print(f"H={e.hamiltonian_value:.6f}  n={len(e.configurations)}  {e.configurations[0]}")
    artifacts = []
    if args.out:
        write_spectrum_json(entries, args.out)
        artifacts.append(args.out)
    gs = entries[0]
    return CommandOutcome(EXIT_OK, f"ground H={gs.hamiltonian_value:.6f} config={gs.configurations[0]}", artifacts)


def _settings(args) -> VqeSettings:
    return VqeSettings(iterations=args.iters, shots=args.shots, runs=args.runs,
                       master_seed=args.seed, resample_only=args.resample_only)


def cmd_vqe(args) -> CommandOutcome:
    spec = load_spec(args)
    settings = _settings(args)
    exact = ground_state(spec)
    dist = aggregate(run_many(spec, settings))
    best = dist.argmax(spec)
    terms = cost_terms(best, spec)
    match = best in exact.configurations
    artifacts = []
    if args.out:
        write_distribution_csv(dist, spec, args.out)
        artifacts.append(args.out)
    summary = (f"argmax {best} p={dist.probabilities[best]:.6f} H={float(terms['total']):.6f} "
               f"match: {'true' if match else 'false'}")
    return CommandOutcome(EXIT_OK, summary, artifacts)


def cmd_sweep(args) -> CommandOutcome:
    spec = load_spec(args)
    for a in args.alphas:
        if not 0.0 <= a <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {a}")
    rows = alpha_sweep(spec, args.alphas, _settings(args))
    for r in rows:
        print(f"alpha={r.alpha:g} successes={r.successes}/{r.runs}")
    artifacts = []
    if args.out:
        write_sweep_csv(rows, args.out)
        artifacts.append(args.out)
    return CommandOutcome(EXIT_OK, f"{len(rows)} alpha values", artifacts)


def cmd_eval(args) -> CommandOutcome:
    spec = load_spec(args)
    bits = parse_bitstring(args.config.strip(), spec.n_qubits)
    t = {k: float(v) for k, v in cost_terms(bits, spec).items()}
    print(f"ratio={t['ratio']:.6f} (x{spec.c_ratio:g})")
    print(f"occupancy={t['occupancy']:.6f} (x{spec.c_occ:g})")
    print(f"balance={t['balance']:.6f}")
    return CommandOutcome(EXIT_OK, f"total={t['total']:.6f}")


COMMANDS = {"presets": cmd_presets, "exact": cmd_exact, "vqe": cmd_vqe, "sweep": cmd_sweep, "eval": cmd_eval}


def run(argv=None) -> CommandOutcome:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return CommandOutcome(EXIT_USAGE, f"usage error: {exc}")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValidationError, ParseError, EnumerationBoundError) as exc:
        return CommandOutcome(EXIT_VALIDATION, f"error: {exc}")
    except (MtvqError, OSError) as exc:
        return CommandOutcome(EXIT_RUNTIME, f"error: {exc}")


def main(argv=None) -> int:
    outcome = run(argv)
    stream = sys.stdout if outcome.status == EXIT_OK else sys.stderr
    print(outcome.summary, file=stream)
    for path in outcome.artifacts:
        print(f"wrote {path}", file=stream)
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
