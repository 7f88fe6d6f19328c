"""Command-line front end.

One binary with subcommands covering the full workflow: evaluate
potentials, generate states, simulate the measurement schedule,
reconstruct from counts, fit the splitter family, interpolate between
states, and emit Wigner grids.  Report-style subcommands render a figure
next to their delimited output unless ``--no-plot`` is given.

Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 incomplete
data, 5 non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, config, measures, reconstruction, simulator, states, wigner
from .errors import (
    CurveTooShort,
    DimMismatch,
    DimOverflow,
    ElevenPopulated,
    EmptySweep,
    GridTooLarge,
    HierarchyViolation,
    InvalidState,
    IrreparableBlock,
    MissingRecord,
    NcpotError,
    NonConvergence,
    NonHermitian,
    NonPhysical,
    OutOfRange,
)
from .linalg import load_density_matrix, save_density_matrix

EXIT_INVALID = 2
EXIT_IO = 3
EXIT_INCOMPLETE = 4
EXIT_NONCONVERGENCE = 5

_INVALID_INPUT = (
    NonPhysical,
    OutOfRange,
    InvalidState,
    NonHermitian,
    DimMismatch,
    DimOverflow,
    GridTooLarge,
    HierarchyViolation,
    ElevenPopulated,
    IrreparableBlock,
)
_INCOMPLETE = (MissingRecord, EmptySweep, CurveTooShort)


def _round9(value: float) -> float:
    return float(f"{value:.9g}")


def _parse_complex(raw: str) -> complex:
    try:
        return complex(raw)
    except ValueError:
        raise InvalidState(f"cannot parse {raw!r} as a (complex) number") from None


def _beam_splitter(args) -> states.BeamSplitter | None:
    if args.r is None and args.q is None:
        return None
    r = args.r if args.r is not None else 1.0 / np.sqrt(2.0)
    q = args.q if args.q is not None else 0.0
    if args.t is not None:
        return states.BeamSplitter(r=r, t=args.t, q=q)
    return states.BeamSplitter.from_reflectivity(r, q)


def _load_state(path) -> np.ndarray:
    rho = load_density_matrix(path)
    if rho.shape not in ((2, 2), (3, 3), (4, 4)):
        raise InvalidState(f"unsupported state dimension {rho.shape[0]}")
    return rho


def _as_two_qubit(rho: np.ndarray) -> np.ndarray:
    if rho.shape == (3, 3):
        return wigner.two_qubit_embed(rho)
    if rho.shape == (4, 4):
        return rho
    raise InvalidState(f"need a 3x3 or 4x4 state, got {rho.shape[0]}x{rho.shape[0]}")


def cmd_potentials(args, cfg: config.RunConfig) -> int:
    qubit = states.QubitState(args.p, _parse_complex(args.x))
    triple = measures.potentials(qubit, _beam_splitter(args))
    payload = {"c": _round9(triple.c), "s": _round9(triple.s), "b": _round9(triple.b)}
    print(json.dumps(payload))
    return 0


def cmd_state(args, cfg: config.RunConfig) -> int:
    if args.family == "vops":
        rho = states.vops_state(args.p, _parse_complex(args.x))
    elif args.family == "ideal":
        rho = states.mix_on_ideal_bs(states.QubitState(args.p, _parse_complex(args.x)))
    elif args.family == "imperfect":
        bs = _beam_splitter(args) or states.BeamSplitter.balanced()
        rho = states.mix_on_imperfect_bs(states.QubitState(args.p, _parse_complex(args.x)), bs)
    else:
        rho = states.werner_state(args.w)
    save_density_matrix(args.out, rho)
    print(args.out)
    return 0


def cmd_simulate(args, cfg: config.RunConfig) -> int:
    qubit = states.QubitState(args.p, _parse_complex(args.x))
    bs = _beam_splitter(args) or states.BeamSplitter.balanced()
    det = cfg.detector
    if args.pairs is not None:
        rate = args.pairs / simulator.schedule_duration_s()
        det = dataclasses.replace(det, pair_rate_hz=rate)
    seed = args.seed if args.seed is not None else cfg.seed
    records = simulator.simulate_schedule(qubit, bs, det, seed)
    simulator.save_counts(args.out, records, det, seed)
    print(f"{len(records)} records -> {args.out}")
    return 0


def cmd_reconstruct(args, cfg: config.RunConfig) -> int:
    records, _ = simulator.load_counts(args.counts)
    result = reconstruction.reconstruct(records)
    save_density_matrix(args.out, result.rho)
    meta_path = Path(args.out).with_suffix(".meta.json")
    meta = dict(result.metadata)
    meta["blocks"] = {
        "m_a": result.blocks.m_a,
        "m_b": np.asarray(result.blocks.m_b).tolist(),
        "m_c": result.blocks.m_c,
        "m_d": result.blocks.m_d,
    }
    meta_path.write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    print(f"{args.out}\n{meta_path}")
    return 0


def cmd_fit(args, cfg: config.RunConfig) -> int:
    target = _as_two_qubit(_load_state(args.state))
    seed = args.seed if args.seed is not None else cfg.seed
    fit = analysis.fit_rho_qr(target, seed=seed)
    if args.intent_p is not None:
        intent = states.QubitState(args.intent_p, _parse_complex(args.intent_x or "0"))
        f_in, f_out = analysis.fidelities(fit, intent, target)
        fit = dataclasses.replace(fit, fidelity_in=f_in, fidelity_out=f_out)
    payload = {
        "p": _round9(fit.p),
        "x": _round9(fit.x),
        "r": _round9(fit.r),
        "q": _round9(fit.q),
        "bures": _round9(fit.bures),
        "fidelity_in": None if fit.fidelity_in is None else _round9(fit.fidelity_in),
        "fidelity_out": None if fit.fidelity_out is None else _round9(fit.fidelity_out),
        "seed": fit.seed,
        "n_evaluations": fit.n_evaluations,
    }
    text = json.dumps(payload, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(args.out)
    else:
        print(text)
    return 0


def cmd_interpolate(args, cfg: config.RunConfig) -> int:
    a = _as_two_qubit(_load_state(args.a))
    b = _as_two_qubit(_load_state(args.b))
    curve = analysis.sweep_interpolation(a, b, args.steps)
    analysis.write_sweep_csv(curve, args.out)
    print(args.out)
    extrema = analysis.locate_extrema(curve)
    for name in ("c", "s", "b"):
        for beta, kind in extrema[name]:
            print(f"extremum {name} {kind} beta={beta:.9g}")
    if not args.no_plot:
        from . import plots

        png = Path(args.out).with_suffix(".png")
        plots.render_sweep(curve, png)
        print(png)
    return 0


def cmd_wigner(args, cfg: config.RunConfig) -> int:
    if args.state:
        rho = _load_state(args.state)
        if rho.shape == (4, 4):
            rho = wigner.qutrit_encode(rho)
    elif args.p is not None:
        rho = states.vops_state(args.p, _parse_complex(args.x))
    else:
        raise InvalidState("either --state or --p is required")
    grid_spec = cfg.grid
    if args.grid:
        try:
            lo, hi, n = args.grid.split(":")
            grid_spec = wigner.GridSpec(lo=float(lo), hi=float(hi), n=int(n))
        except ValueError:
            raise InvalidState(f"bad grid spec {args.grid!r}, expected LO:HI:N") from None
    grid = wigner.wigner_function(rho, grid_spec, n_trunc=cfg.n_trunc)
    wigner.write_grid_csv(grid, args.out)
    print(args.out)
    print(f"w_min={np.min(grid.values):.9g} w_max={np.max(grid.values):.9g}")
    if not args.no_plot:
        from . import plots

        png = Path(args.out).with_suffix(".png")
        plots.render_wigner(grid, png)
        print(png)
    return 0


def cmd_show_config(args, cfg: config.RunConfig) -> int:
    for key, value in cfg.as_items():
        print(f"{key} = {value}")
    return 0


def _add_state_flags(parser, require_p=True):
    parser.add_argument("--p", type=float, required=require_p, help="photon probability")
    parser.add_argument("--x", default="0", help="coherence parameter (complex accepted)")


def _add_bs_flags(parser):
    parser.add_argument("--r", type=float, default=None, help="splitter reflection")
    parser.add_argument("--t", type=float, default=None, help="splitter transmission")
    parser.add_argument("--q", type=float, default=None, help="output decoherence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncpot",
        description="Nonclassicality potentials: measures, simulation, reconstruction.",
    )
    parser.add_argument("--config", default=None, help="key = value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("potentials", help="correlation potentials of a vacuum/photon qubit")
    _add_state_flags(p)
    _add_bs_flags(p)
    p.set_defaults(func=cmd_potentials)

    p = sub.add_parser("state", help="write a density-matrix JSON file")
    p.add_argument("--family", choices=("vops", "ideal", "imperfect", "werner"), required=True)
    _add_state_flags(p, require_p=False)
    _add_bs_flags(p)
    p.add_argument("--w", type=float, default=None, help="Werner mixing weight")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("simulate", help="generate a coincidence-count schedule")
    _add_state_flags(p)
    _add_bs_flags(p)
    p.add_argument("--pairs", type=float, default=None, help="total pairs over the schedule")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="assemble the output state from counts")
    p.add_argument("--counts", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("fit", help="fit the imperfect-splitter family to a state")
    p.add_argument("--state", required=True)
    p.add_argument("--intent-p", type=float, default=None, dest="intent_p")
    p.add_argument("--intent-x", default=None, dest="intent_x")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("interpolate", help="measure curves between two states")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--steps", type=int, default=analysis.DEFAULT_SWEEP_STEPS)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("wigner", help="phase-space grid of a state")
    p.add_argument("--state", default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--x", default="0")
    p.add_argument("--grid", default=None, help="LO:HI:N")
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("show-config", help="print the effective configuration")
    p.set_defaults(func=cmd_show_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config.build_config(args.config)
        config.apply_tolerances(cfg)
        return args.func(args, cfg)
    except _INCOMPLETE as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    except NonConvergence as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except _INVALID_INPUT as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as exc:
        print(f"error: unreadable JSON: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NcpotError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
