"""Command-line front end: ``transduce <command> [options]``.

Exit codes: 0 success, 2 validation error, 3 numerical failure,
4 optimizer did not converge (best result still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from .chain import TransducerChain
from .circuit import power_transmission, synthesize
from .config import (
    ChainConfig,
    chain_to_config,
    load_chain_config,
    load_ensemble_config,
)
from .ensemble import atom_grid, collective_chain, discretized_ensemble_efficiency
from .errors import ConfigError, DegenerateChain, InvalidChain, SingularSystem
from .matching import effective_cooperativities, impedance_residuals, matching_determinant
from .optimizer import OptimizationProblem, optimize_general
from .parallel import ordered_map
from .phase import AXES, MODE_NAMES, grid_axis, phase_diagram
from .scattering import added_noise, added_noise_general, efficiency_sweep, scattering_matrix

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_CONVERGENCE = 0, 2, 3, 4
SELF_CHECK_POINTS = 101
SELF_CHECK_TOL = 1e-8


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# -- output helpers -------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


def render_table(columns, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(columns, map(_plain, r))) for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_plain(report), indent=1) + "\n"
    return render_table(list(report), [list(report.values())], "csv")


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _chain(args) -> ChainConfig:
    if not args.config:
        raise ConfigError("--config is required")
    return load_chain_config(args.config)


def _emit_config(args, chain: TransducerChain, cfg: ChainConfig | None = None):
    if getattr(args, "emit_config", None):
        doc = chain_to_config(chain, cfg.label if cfg else None, cfg.unit if cfg else None,
                              cfg.occupations if cfg else None)
        with open(args.emit_config, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")


def _grid(args) -> np.ndarray:
    if args.points < 2:
        raise ConfigError(f"need at least 2 points, got {args.points}", "--points")
    if not args.omega_min < args.omega_max:
        raise ConfigError(f"omega_min ({args.omega_min}) must be below omega_max ({args.omega_max})",
                          "--omega-min")
    return np.linspace(args.omega_min, args.omega_max, args.points)


def _locate_singularity(chain, omegas, values):
    for w, v in zip(omegas, values):
        if not np.isfinite(v):
            try:
                scattering_matrix(chain, float(w))
            except SingularSystem as exc:
                raise CommandError(f"singular at omega={w!r}: {exc}", EXIT_NUMERICAL) from None
            raise CommandError(f"non-finite efficiency at omega={w!r}", EXIT_NUMERICAL)


# -- commands -----------------------------------------------------------------------


def cmd_spectrum(args) -> int:
    cfg = _chain(args)
    chain = cfg.chain
    w = _grid(args)
    with np.errstate(divide="ignore", invalid="ignore"):
        sw = efficiency_sweep(chain, w)
    _locate_singularity(chain, w, sw["eta_internal"])
    columns = ["omega", "eta_total", "eta_internal", "refl_a", "refl_b"]
    data = [sw[c] for c in columns]
    if args.noise:
        noise = ordered_map(lambda x: added_noise_general(chain, float(x), cfg.occupations), w)
        data += [np.array([n[0] for n in noise]), np.array([n[1] for n in noise])]
        columns += ["n_add_ab", "n_add_ba"]
    rows = [list(r) for r in zip(*data)]
    _emit(render_table(columns, rows, args.format), args.out)
    return EXIT_OK


def cmd_match(args) -> int:
    chain = _chain(args).chain
    if any(g == 0 for g in chain.couplings):
        links = [j for j, g in enumerate(chain.couplings) if g == 0]
        print(f"warning: degenerate chain, zero coupling on link(s) {links}", file=sys.stderr)
    res = matching_determinant(chain, args.omega)
    report = {
        "omega": args.omega,
        "M_re": res.resistance_part,
        "M_im": res.resonant_part,
        "relative": res.relative,
        "matched": res.matched,
    }
    try:
        ra, rb = impedance_residuals(chain, args.omega)
        coop = effective_cooperativities(chain, args.omega)
        report.update(residual_a=ra, residual_b=rb)
        report.update({f"cooperativity_{j}": complex(c) for j, c in enumerate(coop)})
    except DegenerateChain as exc:
        print(f"warning: degenerate chain, {exc}", file=sys.stderr)
    if args.format == "json":
        _emit(render_report(report, "json"), args.out)
    else:
        lines = []
        for k, v in report.items():
            if isinstance(v, complex):
                lines.append(f"{k}: {_fmt(v.real)} {_fmt(v.imag)}")
            else:
                lines.append(f"{k}: {_fmt(v)}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _chain(args)
    chain = cfg.chain
    for p in args.pin:
        if not -chain.n_modes <= p < chain.n_modes:
            raise ConfigError(f"mode index {p} out of range for {chain.n_modes} modes", "--pin")
    problem = OptimizationProblem(chain, frozenset(args.pin), n_starts=args.starts, max_iter=args.max_iter,
                                  max_rounds=args.rounds, seed=args.seed)
    sol = optimize_general(problem)
    doc = sol.as_dict()
    doc["eta_total"] = sol.eta_internal * chain.eta_external
    doc["pins"] = sorted(problem.pins)
    _emit(json.dumps(_plain(doc), indent=1) + "\n", args.out)
    _emit_config(args, chain.at_frequencies(sol.nu), cfg)
    return EXIT_CONVERGENCE if "no_convergence" in sol.flags else EXIT_OK


def cmd_phase_diagram(args) -> int:
    n = args.stages
    try:
        xs = grid_axis(args.x_min, args.x_max, args.nx, args.log)
        ys = grid_axis(args.y_min, args.y_max, args.ny, args.log)
    except ValueError as exc:
        raise ConfigError(str(exc), "grid") from None
    kappas = None
    if args.kappas:
        kappas = [float(k) for k in args.kappas.split(",")]
        want = 1 if n == 0 else n + 2
        if len(kappas) != want or any(not k > 0 for k in kappas):
            raise ConfigError(f"need {want} positive linewidths", "--kappas")
    cells = phase_diagram(n, xs, ys, kappas=kappas, c_23=args.c23)
    columns = ["index", *AXES[n], "label", "eta_max"] + [f"nu_{m}" for m in MODE_NAMES[n]]
    rows = [[c.index, c.x, c.y, c.label, c.eta_max, *c.nu] for c in cells]
    _emit(render_table(columns, rows, args.format), args.out)
    return EXIT_OK


def self_check_grid(chain: TransducerChain, points: int = SELF_CHECK_POINTS) -> np.ndarray:
    """Frequencies covering every resonance of ``chain``: ``+/- (max|detuning| + 2 sum kappa + 2 sum g)``."""
    span = np.max(np.abs(chain.detunings)) + 2 * np.sum(chain.kappa) + 2 * np.sum(chain.couplings)
    return np.linspace(-span, span, points)


def cmd_circuit(args) -> int:
    chain = _chain(args).chain
    if args.gauge <= 0 or not math.isfinite(args.gauge):
        raise ConfigError(f"gauge must be positive, got {args.gauge}", "--gauge")
    net = synthesize(chain, args.topology, args.gauge)
    w = self_check_grid(chain)
    dev = float(np.max(np.abs(np.abs(power_transmission(net, w)) ** 2 - efficiency_sweep(chain, w)["eta_total"])))
    check = f"self-check: max ||t^p|^2 - eta_total| = {dev:.3e} over {len(w)} points"
    netlist = net.netlist() + f"# {check}\n"
    doc = net.to_dict()
    doc["self_check"] = {"points": len(w), "max_deviation": dev, "tolerance": SELF_CHECK_TOL}
    text_json = json.dumps(doc, indent=1) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(netlist + text_json)
    else:
        _emit(netlist, args.out + ".net")
        _emit(text_json, args.out + ".json")
        print(check)
    if not dev <= SELF_CHECK_TOL:
        print(f"error: {check} exceeds {SELF_CHECK_TOL:g}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_noise(args) -> int:
    cfg = _chain(args)
    res = added_noise(cfg.chain, args.omega, cfg.occupations, method=args.method)
    if res.premise_violation:
        print("warning: closed form requires a matched chain with lossless intermediate modes; "
              "used the full scattering matrix", file=sys.stderr)
    report = {"omega": args.omega, "n_add_ab": res.n_add_ab, "n_add_ba": res.n_add_ba,
              "closed_form": res.closed_form, "premise_violation": res.premise_violation}
    _emit(render_report(report, args.format), args.out)
    return EXIT_OK


def cmd_ensemble(args) -> int:
    if not args.config:
        raise ConfigError("--config is required")
    spec = load_ensemble_config(args.config)
    chain = collective_chain(spec)
    if args.k < 1:
        raise ConfigError(f"need at least one sub-mode, got {args.k}", "--k")
    atoms = len(atom_grid(spec, args.k)[0])
    omegas = _grid(args) if args.points is not None else np.array([args.omega])

    def row(w):
        w = float(w)
        closed = scattering_matrix(chain, w).eta_total
        disc = discretized_ensemble_efficiency(spec, args.k, w, args.truncation)
        return [w, closed, disc, (disc - closed) / closed if closed else math.nan, atoms]

    rows = ordered_map(row, omegas)
    _emit(render_table(["omega", "eta_collective", "eta_discretized", "relative_deviation", "atoms"],
                       rows, args.format), args.out)
    _emit_config(args, chain)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transduce", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", help="output path (default stdout)")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    def grid(p, required=True):
        p.add_argument("--omega-min", type=float, default=-5.0)
        p.add_argument("--omega-max", type=float, default=5.0)
        p.add_argument("--points", type=int, default=1001 if required else None)

    p = common(sub.add_parser("spectrum", help="efficiency and reflection spectra"))
    grid(p)
    p.add_argument("--noise", action="store_true", help="add added-noise columns")
    p.set_defaults(func=cmd_spectrum)

    p = common(sub.add_parser("match", help="evaluate the matching condition"), fmt=False)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--omega", type=float, default=0.0)
    p.set_defaults(func=cmd_match)

    p = common(sub.add_parser("optimize", help="numerically optimal operating frequencies"), fmt=False)
    p.add_argument("--pin", type=int, action="append", default=[], help="hold nu_j = 0 (repeatable)")
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--max-iter", type=int, default=400)
    p.add_argument("--rounds", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit-config", help="write the chain tuned to the optimum")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("phase-diagram", help="closed-form optimum over a cooperativity grid")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--stages", type=int, choices=(0, 1, 2), required=True)
    for axis in ("x", "y"):
        p.add_argument(f"--{axis}-min", type=float, default=0.1)
        p.add_argument(f"--{axis}-max", type=float, default=10.0)
        p.add_argument(f"--n{axis}", type=int, default=50)
    p.add_argument("--log", action="store_true", help="geometric grid spacing")
    p.add_argument("--c23", type=float, default=4.0, help="middle cooperativity for 2 stages")
    p.add_argument("--kappas", help="comma-separated linewidths (kappa_a only for 0 stages)")
    p.set_defaults(func=cmd_phase_diagram)

    p = common(sub.add_parser("circuit", help="ladder-network synthesis"), fmt=False)
    p.add_argument("--topology", type=int, choices=(1, 2), default=1)
    p.add_argument("--gauge", type=float, default=1.0)
    p.set_defaults(func=cmd_circuit)

    p = common(sub.add_parser("noise", help="added noise in both directions"))
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--method", choices=("auto", "closed_form", "general"), default="auto")
    p.set_defaults(func=cmd_noise)

    p = common(sub.add_parser("ensemble", help="collective vs sampled-atom ensemble efficiency"))
    grid(p, required=False)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--k", type=int, default=201, help="sampled atoms (squared-rounded with two broadened levels)")
    p.add_argument("--truncation", type=float, default=None, help="cut Lorentzian tails at this many widths")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; sampling is deterministic")
    p.add_argument("--emit-config", help="write the collective chain as a chain config")
    p.set_defaults(func=cmd_ensemble)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, InvalidChain) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SingularSystem, DegenerateChain, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
