"""Command-line interface.

Subcommands
-----------
``table1``          closed-form vs quadrature-derived dilatancy for power-law
                    yield functions, with dissipation contributions
``check``           run the five structural checks for a model over a grid
``classify``        certify C1/C2/C3 and print the stability verdict
``derive``          compare closed-form f against the quadrature derivation
``simulate-box``    homogeneous box under prescribed or random forcing
``simulate-column`` pore-pressure diffusion in a static column
``symbol``          assemble the extended spectral symbol from a config file

Exit codes: 0 all checks pass, 2 a checked condition fails, 1 on errors
(bad flags, malformed config, I/O).  Outputs are plain CSV with a ``#``
provenance header embedding the resolved configuration; runs are
deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .conditions import GridSpec, standard_grid, sweep, write_report_csv
from .config import ConfigError, load_parameters, parameters_text, read_symbol_config
from .materials import EquilibriumLaw, GasParams, MaterialParams
from .rheology import MODEL_IDS, PowerLaw, build_model, derive_f_numeric
from .simulate import (
    column_cfl_dt,
    constant_forcing,
    random_forcing,
    run_box,
    run_column,
    uniform_column,
)
from .stability import (
    assemble_extended_symbol,
    classify,
    extended_spectrum_property,
    spectral_union_matches,
)

TABLE1_EXPONENTS = (0.0, 1.0, 2.0, 3.0, -0.5)
DERIVE_TOL = 1.0e-8


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1 (2 means a failed
    physical check here)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_grid(spec: str) -> GridSpec:
    """Parse ``phi=lo:hi:n,I=lo:hi:n[:log],p=lo:hi:n``."""
    ranges: dict[str, tuple] = {}
    log_I = True
    for chunk in spec.split(","):
        if "=" not in chunk:
            raise ConfigError(f"grid chunk {chunk!r} is not name=lo:hi:n")
        name, rest = chunk.split("=", 1)
        parts = rest.split(":")
        name = name.strip()
        if name not in ("phi", "I", "p"):
            raise ConfigError(f"unknown grid axis {name!r}")
        if name == "I" and len(parts) == 4:
            if parts[3] not in ("log", "lin"):
                raise ConfigError(f"bad I-axis spacing {parts[3]!r}")
            log_I = parts[3] == "log"
            parts = parts[:3]
        if len(parts) != 3:
            raise ConfigError(f"grid axis {name!r} needs lo:hi:n")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"cannot parse grid axis {chunk!r}") from None
        ranges[name] = (lo, hi, n)
    base = standard_grid()
    return GridSpec(
        phi_range=ranges.get("phi", base.phi_range),
        I_range=ranges.get("I", base.I_range),
        p_range=ranges.get("p", base.p_range),
        log_I=log_I,
    )


def _load_params(args) -> tuple[MaterialParams, GasParams]:
    if getattr(args, "config", None):
        return load_parameters(args.config)
    return MaterialParams(), GasParams()


def _provenance(out, args, mat: MaterialParams, gas: GasParams) -> None:
    out.write(f"# granupore {__version__} :: {args.command}\n")
    for line in parameters_text(mat, gas).splitlines():
        out.write(f"# {line}\n")
    for name in ("model", "grid", "seed", "mode"):
        if getattr(args, name, None) is not None:
            out.write(f"# {name} = {getattr(args, name)}\n")


def _open_out(args):
    if getattr(args, "out", None):
        return open(args.out, "w")
    return sys.stdout


def _build(args, mat: MaterialParams):
    return build_model(
        args.model,
        mat,
        EquilibriumLaw(),
        rr_gain=getattr(args, "rr_gain", None),
        z_override=getattr(args, "z_override", None),
    )


def _apply_scenario(args, parser_defaults: dict) -> None:
    """Fill simulation settings from a flat key = value scenario file.

    Explicit command-line flags win over the file; file keys must match the
    subcommand's option names (underscored).  Unknown keys are rejected
    with their line number.
    """
    from .config import read_kv_file

    if not args.scenario:
        return
    for key, (raw, lineno) in read_kv_file(args.scenario).items():
        if key not in parser_defaults:
            raise ConfigError(f"{args.scenario}:{lineno}: unknown scenario key {key!r}")
        if getattr(args, key) != parser_defaults[key]:
            continue  # explicitly set on the command line
        default = parser_defaults[key]
        if key in ("model", "forcing", "mode"):
            setattr(args, key, raw)
        elif isinstance(default, int) and not isinstance(default, bool):
            setattr(args, key, int(raw))
        else:
            try:
                setattr(args, key, float(raw))
            except ValueError:
                raise ConfigError(
                    f"{args.scenario}:{lineno}: cannot parse number from {raw!r}"
                ) from None


# ----------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------

def cmd_table1(args) -> int:
    mat, gas = _load_params(args)
    law = EquilibriumLaw()
    phi, p, I = 0.5, 1000.0, 1.0  # sample state with i_eq(phi) = 0.5
    shear = I * np.sqrt(p / mat.rho_s) / mat.d
    out = _open_out(args)
    try:
        _provenance(out, args, mat, gas)
        out.write("n,Z_form,phi,I,i_eq,f_closed,f_numeric,abs_diff,dissipation\n")
        worst = 0.0
        for n in TABLE1_EXPONENTS:
            model = PowerLaw(mat, law, n=n)
            f_closed = model.dilatancy(phi, p, I)
            f_numeric = derive_f_numeric(
                model.yield_function, law, mat, phi, p, I
            )
            diff = abs(f_closed - f_numeric)
            worst = max(worst, diff)
            z = model.yield_function(phi, I)
            dissipation = 2.0 * (z - f_closed) * p * shear
            out.write(
                f"{n:g},I^{n:g},{phi:.10e},{I:.10e},{model.i_eq(phi):.10e},"
                f"{f_closed:.10e},{f_numeric:.10e},{diff:.3e},{dissipation:.10e}\n"
            )
    finally:
        if out is not sys.stdout:
            out.close()
    if worst > DERIVE_TOL:
        print(f"closed-form vs derived mismatch {worst:.3e}", file=sys.stderr)
        return 2
    return 0


def cmd_check(args) -> int:
    mat, gas = _load_params(args)
    model = _build(args, mat)
    grid = _parse_grid(args.grid) if args.grid else standard_grid()
    report = sweep(model, grid)
    if args.out:
        with open(args.out, "w") as fh:
            _provenance(fh, args, mat, gas)
            write_report_csv(report, fh)
    print(f"model: {args.model}")
    print(report.summary_text())
    return 0 if report.all_pass else 2


def cmd_classify(args) -> int:
    mat, gas = _load_params(args)
    model = _build(args, mat)
    grid = _parse_grid(args.grid) if args.grid else standard_grid()
    verdict = classify(model, grid, model_id=args.model)
    if args.out:
        with open(args.out, "w") as fh:
            _provenance(fh, args, mat, gas)
            write_report_csv(verdict.report, fh)
    print(f"model: {verdict.model_id}")
    print(f"verdict: {verdict.verdict}")
    if verdict.failing:
        print(f"failing conditions: {', '.join(verdict.failing)}")
    print(verdict.report.summary_text())
    return 0 if verdict.verdict == "certified-stable" else 2


def cmd_derive(args) -> int:
    mat, gas = _load_params(args)
    model = _build(args, mat)
    grid = _parse_grid(args.grid) if args.grid else standard_grid()
    p = grid.p_values()[0]
    out = _open_out(args)
    worst = 0.0
    try:
        _provenance(out, args, mat, gas)
        out.write("phi,I,p,f_closed,f_numeric,abs_diff\n")
        for phi in grid.phi_values():
            for I in grid.I_values():
                f_closed = model.dilatancy(phi, p, I)
                f_numeric = derive_f_numeric(
                    model.yield_function, model.law, mat, phi, p, I
                )
                diff = abs(f_closed - f_numeric)
                worst = max(worst, diff)
                out.write(
                    f"{phi:.10e},{I:.10e},{p:.10e},"
                    f"{f_closed:.10e},{f_numeric:.10e},{diff:.3e}\n"
                )
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"max |closed - derived| = {worst:.3e} (tolerance {DERIVE_TOL:g})")
    return 0 if worst <= DERIVE_TOL else 2


BOX_DEFAULTS = dict(
    phi0=0.55, I=None, shear=100.0, p=1000.0, pf0=None, t_end=0.05,
    dt=1.0e-6, forcing="constant", seed=0, record_every=100,
)

COLUMN_DEFAULTS = dict(
    cells=200, length=0.1, phi=0.6, pf_mean=200.0, pf_amplitude=100.0,
    t_end=6.0e-3, dt=None, mode="explicit", record_every=2000,
)


def cmd_simulate_box(args) -> int:
    _apply_scenario(args, BOX_DEFAULTS)
    mat, gas = _load_params(args)
    model = _build(args, mat)
    if args.forcing == "random":
        rng = np.random.default_rng(args.seed)
        forcing = random_forcing(rng, args.t_end)
    else:
        if args.I is not None:
            shear = args.I * np.sqrt(args.p / mat.rho_s) / mat.d
        else:
            shear = args.shear
        forcing = constant_forcing(shear, args.p)
    result = run_box(
        model,
        mat,
        forcing,
        phi0=args.phi0,
        t_end=args.t_end,
        dt=args.dt,
        pf0=args.pf0,
        gas=gas if args.pf0 is not None else None,
        record_every=args.record_every,
    )
    if args.out:
        with open(args.out, "w") as fh:
            _provenance(fh, args, mat, gas)
            fh.write("t,phi,pf,div_u,I,i_eq\n")
            pf = result.p_f if result.p_f is not None else np.full_like(result.t, np.nan)
            for k in range(result.t.size):
                fh.write(
                    f"{result.t[k]:.10e},{result.phi[k]:.10e},{pf[k]:.10e},"
                    f"{result.div_u[k]:.10e},{result.inertial[k]:.10e},"
                    f"{result.i_eq[k]:.10e}\n"
                )
    print(f"final phi = {result.phi[-1]:.6f}")
    print(f"phi range seen: [{result.phi_min:.6f}, {result.phi_max_seen:.6f}]")
    print(f"bound violations: {len(result.violations)}")
    print(f"divergence sign agreement: {'yes' if result.sign_agreement else 'NO'}")
    return 0 if not result.violations and result.sign_agreement else 2


def cmd_simulate_column(args) -> int:
    _apply_scenario(args, COLUMN_DEFAULTS)
    mat, gas = _load_params(args)
    state0 = uniform_column(
        args.cells,
        args.length,
        args.phi,
        lambda z: args.pf_mean + args.pf_amplitude * np.cos(np.pi * z / args.length),
    )
    dt = args.dt if args.dt is not None else column_cfl_dt(state0, gas, mat)
    n_steps = int(round(args.t_end / dt))
    result = run_column(
        state0, gas, mat, dt, n_steps, mode=args.mode, record_every=args.record_every
    )
    if args.out:
        with open(args.out, "w") as fh:
            _provenance(fh, args, mat, gas)
            fh.write("t,z,pf\n")
            for state in result.history:
                for z, pf in zip(state.z, state.pf_profile):
                    fh.write(f"{state.t:.10e},{z:.10e},{pf:.10e}\n")
    energy_ok = bool(np.all(np.diff(result.energy) <= 0.0))
    print(f"steps: {n_steps}, dt = {dt:.6e} s ({args.mode})")
    print(f"gas-content drift per step: {result.max_step_content_drift:.3e}")
    print(f"energy non-increasing: {'yes' if energy_ok else 'NO'}")
    print(f"final energy: {result.energy[-1]:.6f} J/m2")
    ok = energy_ok and result.max_step_content_drift < 1.0e-12
    return 0 if ok else 2


def cmd_symbol(args) -> int:
    data = read_symbol_config(args.config)
    sym = assemble_extended_symbol(
        data["N"], data["xi"], data["momentum_rows"], data["c"]
    )
    eig_m = np.sort_complex(np.linalg.eigvals(sym.M))
    eig_n = np.sort_complex(np.linalg.eigvals(sym.N))
    union_ok = spectral_union_matches(sym)
    floor_ok = extended_spectrum_property(sym)
    print(f"spectrum(N): {eig_n}")
    print(f"spectrum(M): {eig_m}")
    print(f"added eigenvalue c|xi|^2 = {sym.added_eigenvalue:.10e}")
    print(f"spectral union holds: {'yes' if union_ok else 'NO'}")
    print(f"no spectral degradation: {'yes' if floor_ok else 'NO'}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(f"# granupore {__version__} :: symbol\n")
            fh.write(f"# xi = {list(map(float, data['xi']))}\n")
            fh.write(f"# momentum_rows = {list(data['momentum_rows'])}\n")
            fh.write(f"# c = {data['c']!r}\n")
            fh.write("matrix,re,im\n")
            for ev in eig_n:
                fh.write(f"N,{ev.real:.10e},{ev.imag:.10e}\n")
            for ev in eig_m:
                fh.write(f"M,{ev.real:.10e},{ev.imag:.10e}\n")
    return 0 if union_ok and floor_ok else 2


# ----------------------------------------------------------------------
# Parser wiring
# ----------------------------------------------------------------------

def _add_common(sub, model: bool = True, grid: bool = True) -> None:
    sub.add_argument("--config", help="material/gas key = value file")
    sub.add_argument("--out", help="output CSV path (default: stdout or none)")
    if model:
        sub.add_argument(
            "--model", required=True, help=f"model id, one of {', '.join(MODEL_IDS)}"
        )
        sub.add_argument(
            "--z-override",
            choices=["dp"],
            dest="z_override",
            help="force plain sin(delta) yield on roux-radjai",
        )
        sub.add_argument(
            "--rr-gain", type=float, dest="rr_gain", help="Roux-Radjai gain a"
        )
    if grid:
        sub.add_argument(
            "--grid",
            help="phi=lo:hi:n,I=lo:hi:n[:log|:lin],p=lo:hi:n (defaults to the standard grid)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="granupore", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"granupore {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    table1 = subs.add_parser("table1", help="power-law yield/dilatancy table")
    _add_common(table1, model=False, grid=False)

    check = subs.add_parser("check", help="run the five structural checks")
    _add_common(check)

    cls = subs.add_parser("classify", help="certify C1/C2/C3 and print verdict")
    _add_common(cls)

    derive = subs.add_parser("derive", help="closed-form vs derived dilatancy")
    _add_common(derive)

    box = subs.add_parser("simulate-box", help="homogeneous box run")
    _add_common(box, grid=False)
    box.add_argument("--scenario", help="run settings as a key = value file")
    box.add_argument("--phi0", type=float, default=0.55)
    box.add_argument("--I", type=float, default=None, help="constant inertial number")
    box.add_argument("--shear", type=float, default=100.0, help="constant |S| (1/s)")
    box.add_argument("--p", type=float, default=1000.0, help="constant pressure (Pa)")
    box.add_argument("--pf0", type=float, default=None, help="track p_f from this value")
    box.add_argument("--t-end", type=float, dest="t_end", default=0.05)
    box.add_argument("--dt", type=float, default=1.0e-6)
    box.add_argument("--forcing", choices=["constant", "random"], default="constant")
    box.add_argument("--seed", type=int, default=0)
    box.add_argument("--record-every", type=int, dest="record_every", default=100)

    col = subs.add_parser("simulate-column", help="static-column diffusion run")
    _add_common(col, model=False, grid=False)
    col.add_argument("--scenario", help="run settings as a key = value file")
    col.add_argument("--cells", type=int, default=200)
    col.add_argument("--length", type=float, default=0.1, help="column height (m)")
    col.add_argument("--phi", type=float, default=0.6)
    col.add_argument("--pf-mean", type=float, dest="pf_mean", default=200.0)
    col.add_argument("--pf-amplitude", type=float, dest="pf_amplitude", default=100.0)
    col.add_argument("--t-end", type=float, dest="t_end", default=6.0e-3)
    col.add_argument("--dt", type=float, default=None, help="default: stability bound")
    col.add_argument("--mode", choices=["explicit", "implicit"], default="explicit")
    col.add_argument("--record-every", type=int, dest="record_every", default=2000)

    sym = subs.add_parser("symbol", help="extended spectral symbol from config")
    sym.add_argument("--config", required=True, help="n_matrix/xi/momentum_rows/c file")
    sym.add_argument("--out", help="eigenvalue CSV path")

    return parser


_COMMANDS = {
    "table1": cmd_table1,
    "check": cmd_check,
    "classify": cmd_classify,
    "derive": cmd_derive,
    "simulate-box": cmd_simulate_box,
    "simulate-column": cmd_simulate_column,
    "symbol": cmd_symbol,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
