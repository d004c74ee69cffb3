"""Numerical verification of the structural conditions on (Z, f) pairs.

For a model to be dissipative, consistent with critical-state physics and
linearly stable, its yield function Z and dilatancy function f must satisfy

* dissipation:      Z - f >= 0,
* consistency (C1): Z - (I/2) dZ/dI = f + I df/dI,
* growth bound (C2): Z + I dZ/dI >= 0,
* pressure slope (C3): df/dp - (I/(2p)) df/dI < 0 (strict),
* equilibrium signs: f(phi, p, i_eq(phi)) = 0 with f > 0 above and f < 0
  below the equilibrium inertial number.

These are sufficient conditions; a failure pinpoints where a model leaves
the certified regime, it does not by itself prove ill-posedness.
Derivatives are central differences so the checker works equally for
closed-form and tabulated models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, TextIO

import numpy as np

from .gas import permeability_kappa
from .materials import FlowState, GasParams, MaterialParams, inertial_number

__all__ = [
    "C1_TOL",
    "C2_TOL",
    "C3_STRICT",
    "DISSIPATION_TOL",
    "EQ_ANCHOR_TOL",
    "GridSpec",
    "PointRecord",
    "ConditionSummary",
    "ConditionReport",
    "residual_c1",
    "check_c2",
    "check_c3",
    "check_dissipation",
    "check_equilibrium_signs",
    "dissipation_density",
    "sweep",
    "standard_grid",
    "write_report_csv",
]

#: |C1 residual| below which the consistency equation counts as satisfied.
C1_TOL = 1.0e-5
#: Floating-point slack on the non-strict C2 inequality.
C2_TOL = -1.0e-10
#: C3 is strict: the value must be below this threshold.
C3_STRICT = -1.0e-14
#: Floating-point slack on the non-strict dissipation inequality.
DISSIPATION_TOL = -1.0e-12
#: |f| at the equilibrium anchor.
EQ_ANCHOR_TOL = 1.0e-12

CONDITIONS = ("C1", "C2", "C3", "dissipation", "equilibrium")


def _central(fun: Callable[[float], float], x: float, h: float) -> float:
    """Central difference with one domain-shrink retry.

    Evaluation at x +/- h can leave the model's domain near a boundary
    (for example I_eq terms at phi -> phi_max); in that case the step is
    halved once before giving up.
    """
    for step in (h, 0.5 * h):
        try:
            return (fun(x + step) - fun(x - step)) / (2.0 * step)
        except ValueError:
            continue
    raise ValueError(f"cannot take a central difference at {x} (step {h})")


def _h_I(I: float, rel: float = 1.0e-6) -> float:
    return rel * max(I, 1.0e-3)


def _h_p(p: float, rel: float = 1.0e-6) -> float:
    return rel * max(p, 1.0e-3)


def residual_c1(model, phi: float, p: float, I: float, rel_h: float = 1.0e-6) -> float:
    """Residual of the consistency equation,
    r = (Z - (I/2) dZ/dI) - (f + I df/dI); zero for compliant pairs."""
    h = _h_I(I, rel_h)
    dz = _central(lambda J: model.yield_function(phi, J), I, h)
    df = _central(lambda J: model.dilatancy(phi, p, J), I, h)
    z = model.yield_function(phi, I)
    f = model.dilatancy(phi, p, I)
    return (z - 0.5 * I * dz) - (f + I * df)


def check_c2(model, phi: float, I: float, rel_h: float = 1.0e-6) -> tuple[float, bool]:
    """Value and pass flag of the growth bound Z + I dZ/dI >= 0."""
    h = _h_I(I, rel_h)
    dz = _central(lambda J: model.yield_function(phi, J), I, h)
    value = model.yield_function(phi, I) + I * dz
    return value, value >= C2_TOL


def check_c3(
    model, phi: float, p: float, I: float, rel_h: float = 1.0e-6
) -> tuple[float, bool]:
    """Value and pass flag of the strict pressure-slope condition
    df/dp - (I/(2p)) df/dI < 0."""
    dfp = _central(lambda q: model.dilatancy(phi, q, I), p, _h_p(p, rel_h))
    dfi = _central(lambda J: model.dilatancy(phi, p, J), I, _h_I(I, rel_h))
    value = dfp - 0.5 * I / p * dfi
    return value, value < C3_STRICT


def check_dissipation(model, phi: float, p: float, I: float) -> tuple[float, bool]:
    """Gap Z - f and its non-negativity flag."""
    gap = model.yield_function(phi, I) - model.dilatancy(phi, p, I)
    return gap, gap >= DISSIPATION_TOL


def check_equilibrium_signs(model, phi: float, p: float) -> bool:
    """Critical-state sign structure of f around the equilibrium.

    Checks f = 0 at I = i_eq(phi), f > 0 at 2 i_eq and f < 0 at i_eq/2.
    At phi = phi_max (i_eq = 0) only one-sided positivity is checkable.
    """
    ieq = model.i_eq(phi)
    if ieq <= 0.0:
        return all(model.dilatancy(phi, p, I) > 0.0 for I in (0.1, 1.0))
    anchored = abs(model.dilatancy(phi, p, ieq)) < EQ_ANCHOR_TOL
    above = model.dilatancy(phi, p, 2.0 * ieq) > 0.0
    below = model.dilatancy(phi, p, 0.5 * ieq) < 0.0
    return anchored and above and below


def dissipation_density(
    model,
    state: FlowState,
    mat: MaterialParams,
    gas: GasParams,
    grad_pf=0.0,
) -> float:
    """Local dissipation rate kappa |grad p_f|^2 + 2 (Z - f) p |S| (W/m3).

    ``grad_pf`` may be a scalar or a gradient vector.
    """
    g = np.atleast_1d(np.asarray(grad_pf, dtype=float))
    density = permeability_kappa(gas, mat.d, state.phi) * float(g @ g)
    if state.shear > 0.0:
        I = inertial_number(mat, state.shear, state.p)
        gap, _ = check_dissipation(model, state.phi, state.p, I)
        density += 2.0 * gap * state.p * state.shear
    return density


# ----------------------------------------------------------------------
# Grid sweeps
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Cartesian evaluation grid over (phi, I, p).

    Ranges are (lo, hi, count); the inertial-number axis may be log-spaced.
    """

    phi_range: tuple[float, float, int] = (0.40, 0.595, 12)
    I_range: tuple[float, float, int] = (1.0e-2, 10.0, 12)
    p_range: tuple[float, float, int] = (10.0, 1.0e4, 4)
    log_I: bool = True

    def __post_init__(self) -> None:
        for name, (lo, hi, count) in (
            ("phi_range", self.phi_range),
            ("I_range", self.I_range),
            ("p_range", self.p_range),
        ):
            if not lo < hi:
                raise ValueError(f"{name}: need lo < hi, got {lo} >= {hi}")
            if count < 2:
                raise ValueError(f"{name}: need at least 2 points, got {count}")
        if self.I_range[0] <= 0:
            raise ValueError("I grid must be strictly positive")
        if self.p_range[0] <= 0:
            raise ValueError("p grid must be strictly positive")

    def phi_values(self) -> np.ndarray:
        lo, hi, n = self.phi_range
        return np.linspace(lo, hi, n)

    def I_values(self) -> np.ndarray:
        lo, hi, n = self.I_range
        return np.geomspace(lo, hi, n) if self.log_I else np.linspace(lo, hi, n)

    def p_values(self) -> np.ndarray:
        lo, hi, n = self.p_range
        return np.linspace(lo, hi, n)


def standard_grid() -> GridSpec:
    """The default certification grid: phi in [0.40, 0.595], I in [1e-2, 10]
    log-spaced, p in [10, 1e4]."""
    return GridSpec()


@dataclass(frozen=True)
class PointRecord:
    phi: float
    I: float
    p: float
    c1_residual: float
    c2_value: float
    c3_value: float
    dissipation_gap: float
    eq_sign_ok: bool

    def passes(self, condition: str) -> bool:
        if condition == "C1":
            return abs(self.c1_residual) < C1_TOL
        if condition == "C2":
            return self.c2_value >= C2_TOL
        if condition == "C3":
            return self.c3_value < C3_STRICT
        if condition == "dissipation":
            return self.dissipation_gap >= DISSIPATION_TOL
        if condition == "equilibrium":
            return self.eq_sign_ok
        raise ValueError(f"unknown condition {condition!r}")

    def severity(self, condition: str) -> float:
        """How badly the condition is violated; larger is worse."""
        if condition == "C1":
            return abs(self.c1_residual)
        if condition == "C2":
            return -self.c2_value
        if condition == "C3":
            return self.c3_value
        if condition == "dissipation":
            return -self.dissipation_gap
        return 0.0 if self.eq_sign_ok else 1.0


@dataclass(frozen=True)
class ConditionSummary:
    all_pass: bool
    worst_point: tuple[float, float, float] | None
    worst_value: float | None
    n_failures: int


@dataclass
class ConditionReport:
    records: list[PointRecord] = field(default_factory=list)
    skipped: list[tuple[tuple[float, float, float], str]] = field(default_factory=list)
    summaries: dict[str, ConditionSummary] = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return bool(self.summaries) and all(
            s.all_pass for s in self.summaries.values()
        ) and not self.skipped

    def failing_conditions(self) -> tuple[str, ...]:
        return tuple(c for c in CONDITIONS if not self.summaries[c].all_pass)

    def summary_text(self) -> str:
        lines = [f"points evaluated: {len(self.records)}, skipped: {len(self.skipped)}"]
        for cond in CONDITIONS:
            s = self.summaries[cond]
            status = "pass" if s.all_pass else f"FAIL ({s.n_failures} points)"
            line = f"  {cond:<12} {status}"
            if not s.all_pass and s.worst_point is not None:
                phi, I, p = s.worst_point
                line += (
                    f"; worst at phi={phi:.6g}, I={I:.6g}, p={p:.6g}"
                    f" with value {s.worst_value:.6e}"
                )
            lines.append(line)
        return "\n".join(lines)


def sweep(model, grid: GridSpec) -> ConditionReport:
    """Evaluate all five checks at every grid point.

    Points where the model raises a domain error are recorded as skipped
    with the reason rather than aborting: the admissible-region boundary
    (phi -> phi_max with log terms, for instance) is expected to be
    singular.  Ordering is deterministic (phi outer, then I, then p).
    """
    report = ConditionReport()
    for phi in grid.phi_values():
        for I in grid.I_values():
            for p in grid.p_values():
                try:
                    rec = PointRecord(
                        phi=float(phi),
                        I=float(I),
                        p=float(p),
                        c1_residual=residual_c1(model, phi, p, I),
                        c2_value=check_c2(model, phi, I)[0],
                        c3_value=check_c3(model, phi, p, I)[0],
                        dissipation_gap=check_dissipation(model, phi, p, I)[0],
                        eq_sign_ok=check_equilibrium_signs(model, phi, p),
                    )
                except ValueError as exc:
                    report.skipped.append(((float(phi), float(I), float(p)), str(exc)))
                    continue
                report.records.append(rec)

    for cond in CONDITIONS:
        failures = [r for r in report.records if not r.passes(cond)]
        if failures:
            worst = max(failures, key=lambda r: r.severity(cond))
            value = {
                "C1": worst.c1_residual,
                "C2": worst.c2_value,
                "C3": worst.c3_value,
                "dissipation": worst.dissipation_gap,
                "equilibrium": 0.0,
            }[cond]
            report.summaries[cond] = ConditionSummary(
                all_pass=False,
                worst_point=(worst.phi, worst.I, worst.p),
                worst_value=value,
                n_failures=len(failures),
            )
        else:
            report.summaries[cond] = ConditionSummary(True, None, None, 0)
    return report


def write_report_csv(report: ConditionReport, out: TextIO) -> None:
    """One row per grid point, stable float formatting."""
    out.write("phi,I,p,c1_residual,c2_value,c3_value,dissipation_gap,eq_sign_ok\n")
    for r in report.records:
        out.write(
            f"{r.phi:.10e},{r.I:.10e},{r.p:.10e},{r.c1_residual:.10e},"
            f"{r.c2_value:.10e},{r.c3_value:.10e},{r.dissipation_gap:.10e},"
            f"{int(r.eq_sign_ok)}\n"
        )
    for point, reason in report.skipped:
        out.write(f"# skipped phi={point[0]},I={point[1]},p={point[2]}: {reason}\n")
