"""Command-line front end.

    wlift validate
    wlift run    --a2 0.6 --seed 3 --policy keep-W1-and-W5
    wlift mc     --a2 0.5 --theta 0.6283 --shots 100000 --seed 7
    wlift mixed  --a2 0.5 --theta 0.6283 --format json
    wlift sweep  --theta 0 --format csv
    wlift ghz    --a2 0.6
    wlift yield  --epsilon 0.1 --pairs 3000000

Numbers are written with 12 significant digits; files are UTF-8 with LF
line endings. ``WLIFT_SEED`` replaces the default seed of 42.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__, analysis, protocol
from .bases import correction_unitary, ghz_basis, validate_orthonormality, w_basis, w_state
from .protocol import PostselectionPolicy, SourceSpec
from .qcore import apply_unitary, fidelity_pure, overlap

COMMANDS = ("validate", "run", "mc", "mixed", "sweep", "ghz", "yield")
SWEEP_HEADER = ("a2", "theta", "f", "F", "F0", "P", "K_derived", "K_paper")
DEFAULT_SHOTS = 100_000
DEFAULT_SEED = 42


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec: SourceSpec
    n_shots: int = DEFAULT_SHOTS
    seed: int = DEFAULT_SEED
    policy: PostselectionPolicy = PostselectionPolicy.KEEP_ALL
    output_path: Optional[str] = None
    format: str = "csv"
    epsilon: float = 0.1
    n_pairs: int = 3_000_000
    a2_grid: tuple = analysis.DEFAULT_A2_GRID
    theta_grid: tuple = analysis.DEFAULT_THETA_GRID
    f_grid: tuple = (0.0,)


def _unit_interval(name):
    def parse(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not 0.0 <= value <= 1.0:
            raise argparse.ArgumentTypeError(f"{name} must lie in [0, 1], got {text}")
        return value
    return parse


def _theta(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"theta must be a number, got {text!r}")
    if abs(value) > math.pi / 2 + 1e-12:
        raise argparse.ArgumentTypeError(f"theta must lie in [-pi/2, pi/2], got {text}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed_default() -> int:
    env = os.environ.get("WLIFT_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"wlift: WLIFT_SEED must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wlift", description="Remote W-state preparation toolkit.")
    parser.add_argument("--version", action="version", version=f"wlift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "validate": "run the basis, unitarity and oracle-agreement checks",
        "run": "simulate a single shot",
        "mc": "Monte Carlo batch against the closed-form outcome table",
        "mixed": "mixed state of B without postselection",
        "sweep": "fidelities, success probability and coherences over a grid",
        "ghz": "GHZ-basis variant of the protocol",
        "yield": "expected perfect W states from weakly entangled pairs",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--a2", type=_unit_interval("a2"), default=None, help="a^2 of each pair (default 0.5)")
        p.add_argument("--theta", type=_theta, default=None, help="phase of b in radians (default 0)")
        p.add_argument("--f", type=_unit_interval("f"), default=None, help="white-noise fraction (default 0)")
        p.add_argument("--shots", type=_positive_int, default=DEFAULT_SHOTS)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--policy", choices=[m.value for m in PostselectionPolicy],
                       default=PostselectionPolicy.KEEP_ALL.value)
        p.add_argument("--output", "-o", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "yield":
            p.add_argument("--epsilon", type=_unit_interval("epsilon"), default=0.1)
            p.add_argument("--pairs", type=_positive_int, default=3_000_000)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    a2 = 0.5 if args.a2 is None else args.a2
    theta = 0.0 if args.theta is None else args.theta
    f = 0.0 if args.f is None else args.f
    if args.command == "yield" and args.pairs % 3:
        parser.error(f"--pairs must be divisible by 3, got {args.pairs}")
    grids = {}
    if args.command == "sweep":
        grids = dict(
            a2_grid=analysis.DEFAULT_A2_GRID if args.a2 is None else (args.a2,),
            theta_grid=analysis.DEFAULT_THETA_GRID if args.theta is None else (args.theta,),
            f_grid=(0.0,) if args.f is None else (args.f,),
        )
    return RunConfig(
        command=args.command,
        spec=SourceSpec.from_a2(a2, theta, f),
        n_shots=args.shots,
        seed=_seed_default() if args.seed is None else args.seed,
        policy=PostselectionPolicy(args.policy),
        output_path=args.output,
        format=args.format,
        epsilon=getattr(args, "epsilon", 0.1),
        n_pairs=getattr(args, "pairs", 3_000_000),
        **grids,
    )


# -- serialization ---------------------------------------------------------

def fmt(x) -> str:
    return format(float(x), ".12g")


def _num(x):
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(fmt(x))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return _num(obj)


def matrix_pairs(m: np.ndarray) -> list:
    """Row-major [re, im] pairs."""
    return [[complex(v) for v in row] for row in np.asarray(m)]


def _spec_dict(spec: SourceSpec) -> dict:
    return {"a2": spec.a2, "a": spec.a, "theta": spec.theta, "f": spec.noise_f}


def to_json(spec: Optional[SourceSpec], results, seed: Optional[int]) -> str:
    doc = {
        "spec": None if spec is None else _spec_dict(spec),
        "results": results,
        "meta": {"seed": seed, "version": __version__},
    }
    return json.dumps(_jsonable(doc), indent=2) + "\n"


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(v)
    return fmt(v)


def to_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _quantity_rows(results: dict) -> list:
    rows = []
    for key, value in results.items():
        if isinstance(value, (list, tuple)) and value and isinstance(value[0], (list, tuple)):
            for i, row in enumerate(value):
                for j, v in enumerate(row):
                    rows.append((f"{key}[{i}][{j}].re", complex(v).real))
                    rows.append((f"{key}[{i}][{j}].im", complex(v).imag))
        elif isinstance(value, (list, tuple)):
            for i, v in enumerate(value):
                rows.append((f"{key}[{i}]", v))
        elif isinstance(value, bool):
            rows.append((key, str(value).lower()))
        else:
            rows.append((key, value))
    return rows


def render(config: RunConfig, results: dict, table=None) -> str:
    """Serialize ``results``; ``table`` (header, rows) overrides the CSV layout."""
    if config.format == "json":
        spec = None if config.command in ("sweep", "yield", "validate") else config.spec
        return to_json(spec, results, config.seed)
    if table is not None:
        return to_csv(*table)
    return to_csv(("quantity", "value"), _quantity_rows(results))


def write_output(text: str, path: Optional[str]) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- commands --------------------------------------------------------------

def validation_checks() -> list[tuple[str, float, float]]:
    """(name, measured deviation, tolerance) for each invariant suite."""
    checks = [
        ("w_basis_orthonormality", validate_orthonormality(w_basis()), 1e-12),
        ("ghz_basis_orthonormality", validate_orthonormality(ghz_basis()), 1e-12),
        ("corrections_map_to_w1", max(
            abs(1.0 - overlap(w_state(), apply_unitary(m, correction_unitary(j))))
            for j, m in enumerate(w_basis(), start=1)), 1e-12),
    ]
    ideal = analysis.brute_force_oracle(protocol.IDEAL)
    checks.append(("ideal_determinism", max(
        max(abs(p - 1 / 8) for p in ideal.probs),
        max(abs(1.0 - overlap(w_state(), s) ** 2) for s in ideal.post_locc_states)), 1e-12))
    prob_dev = fid_dev = rho_dev = 0.0
    for spec in analysis.default_grid():
        oracle = analysis.brute_force_oracle(spec)
        prob_dev = max(prob_dev, np.max(np.abs(oracle.probs - protocol.outcome_probabilities(spec))))
        fid_dev = max(fid_dev, abs(fidelity_pure(oracle.rho, w_state()) - protocol.analytic_fidelity(spec)))
        rho_dev = max(rho_dev, np.max(np.abs(
            oracle.rho.matrix - protocol.mixed_state_no_postselection(spec).matrix)))
    checks += [
        ("outcome_table_vs_oracle", prob_dev, 1e-12),
        ("fidelity_vs_oracle", fid_dev, 1e-12),
        ("mixed_state_vs_oracle", rho_dev, 1e-10),
    ]
    return checks


def _cmd_validate(config):
    checks = validation_checks()
    ok = all(dev <= tol for _, dev, tol in checks)
    results = {"checks": [{"name": n, "deviation": d, "tolerance": t, "passed": d <= t} for n, d, t in checks],
               "all_passed": ok}
    rows = [(n, d, t, "true" if d <= t else "false") for n, d, t in checks]
    return render(config, results, (("check", "deviation", "tolerance", "passed"), rows)), 0 if ok else 1


def _cmd_run(config):
    rng = np.random.default_rng(config.seed)
    shot = protocol.run_single(config.spec, rng, config.policy)
    accepted = isinstance(shot, protocol.RunOutcome)
    results = {
        "outcome_index": shot.outcome_index,
        "label": w_basis().labels[shot.outcome_index - 1],
        "probability": shot.probability,
        "accepted": accepted,
        "fidelity_to_w1": shot.fidelity if accepted else float("nan"),
    }
    if accepted and config.format == "json":
        results["post_locc_state"] = [complex(v) for v in shot.post_locc_state.amplitudes]
    return render(config, results), 0


def _report_dict(report: analysis.EnsembleReport) -> dict:
    return {
        "policy": report.policy,
        "n_shots": report.n_shots,
        "outcome_labels": list(report.outcome_labels),
        "counts": list(report.counts),
        "empirical_probs": list(report.empirical_probs),
        "analytic_probs": list(report.analytic_probs),
        "empirical_fidelity": report.empirical_fidelity,
        "analytic_fidelity": report.analytic_fidelity,
        "accepted_fraction": report.accepted_fraction,
        "analytic_accepted_fraction": report.analytic_accepted_fraction,
        "within_5_sigma": report.within_bound(),
    }


def _cmd_mc(config):
    spec = config.spec.noiseless()
    report = analysis.monte_carlo(spec, config.n_shots, config.seed, config.policy)
    return render(config, _report_dict(report)), 0


def _cmd_mixed(config):
    spec = config.spec
    noiseless = spec.noiseless()
    rho = protocol.propagate_depolarizing_noise(spec)
    results = {
        "F": fidelity_pure(rho, w_state()),
        "F0": protocol.noisy_source_fidelity(spec),
        "P": protocol.postselection_success_probability(spec),
        "K_derived": protocol.coherence_K(noiseless),
        "K_paper": protocol.coherence_K_printed(noiseless),
        "rho_basis": "W",
        "rho": matrix_pairs(w_basis().represent(rho.matrix)),
    }
    return render(config, results), 0


def _cmd_sweep(config):
    records = analysis.sweep(config.a2_grid, config.theta_grid, config.f_grid)
    rows = [(r.a2, r.theta, r.f, r.F, r.F0, r.P, r.K_derived, r.K_paper) for r in records]
    results = [dict(zip(SWEEP_HEADER, row)) for row in rows]
    return render(config, results, (SWEEP_HEADER, rows)), 0


def _cmd_ghz(config):
    spec = config.spec.noiseless()
    shot = protocol.run_ghz_variant(spec, np.random.default_rng(config.seed))
    branches = protocol.ghz_branches(spec)
    header = ("outcome", "label", "probability", "partner_fidelity", "best_fidelity", "sampled")
    rows = [(j, br.label, br.probability, br.partner_fidelity, br.best_fidelity,
             "true" if j == shot.outcome_index else "false")
            for j, br in enumerate(branches, start=1)]
    results = {"sampled_outcome": shot.outcome_index, "sampled_label": shot.target,
               "branches": [dict(zip(header[:-1], row[:-1])) for row in rows]}
    return render(config, results, (header, rows)), 0


def _cmd_yield(config):
    est = analysis.yield_estimate(config.epsilon, config.n_pairs)
    results = {"epsilon": config.epsilon, "n_pairs": config.n_pairs, **asdict(est)}
    return render(config, results), 0


_HANDLERS = {
    "validate": _cmd_validate, "run": _cmd_run, "mc": _cmd_mc, "mixed": _cmd_mixed,
    "sweep": _cmd_sweep, "ghz": _cmd_ghz, "yield": _cmd_yield,
}


def execute(config: RunConfig) -> int:
    text, code = _HANDLERS[config.command](config)
    write_output(text, config.output_path)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    return execute(config)


if __name__ == "__main__":
    sys.exit(main())
