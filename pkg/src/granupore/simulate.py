"""Desk-scale time integrators exercising the constitutive framework.

Two reduced settings isolate the provable behaviour of the full model
without a momentum solver:

* a homogeneous 0D *box* under prescribed shear |S|(t) and pressure p(t),
  evolving d(phi)/dt = -2 phi |S| f(phi, p, I) (and optionally the pore
  pressure through the non-conservative gas equation without diffusion).
  This carries the packing-bound and equilibrium-attraction content: phi
  stays in [0, phi_max] for compliant models and relaxes to phi_eq(I)
  under constant forcing.

* a 1D *column* of solid at rest, where the pore pressure obeys
  d/dt[(1-phi) p_f] = p_atm d/dz[kappa(phi) dp_f/dz] with zero flux at both
  ends.  The finite-volume discretisation conserves the discrete gas
  content exactly and dissipates the gas energy
  E1 = sum (1-phi) H(p_f) dz monotonically.

Bound violations in the box are *flagged, never clamped*: a clamp would
mask an integrator or model defect that the theory says cannot occur for
compliant models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .materials import GasParams, MaterialParams, inertial_number

__all__ = [
    "Forcing",
    "constant_forcing",
    "piecewise_constant_forcing",
    "random_forcing",
    "BoxState",
    "step_box",
    "BoxResult",
    "run_box",
    "ColumnState",
    "uniform_column",
    "column_cfl_dt",
    "step_column",
    "ColumnResult",
    "run_column",
    "EnergyLedger",
    "energy_ledger",
    "gas_content",
]

#: Bound-violation slack (numerical, not physical).
BOUND_EPS = 1.0e-9

#: Default pressure floor regularising the inertial number at p -> 0.
P_FLOOR = 1.0


# ----------------------------------------------------------------------
# Forcing signals
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Forcing:
    """Prescribed shear-rate and pressure signals for the box."""

    shear: Callable[[float], float]
    p: Callable[[float], float]


def constant_forcing(shear: float, p: float) -> Forcing:
    if p <= 0:
        raise ValueError(f"forcing pressure must be positive, got {p}")
    if shear < 0:
        raise ValueError(f"forcing shear must be non-negative, got {shear}")
    return Forcing(shear=lambda t: shear, p=lambda t: p)


def piecewise_constant_forcing(
    edges: Sequence[float], shears: Sequence[float], ps: Sequence[float]
) -> Forcing:
    """Right-open piecewise-constant signals on [edges[k], edges[k+1]).

    ``edges`` has one more entry than the value lists; times outside the
    range take the first/last segment values.
    """
    edges_arr = np.asarray(edges, dtype=float)
    shear_arr = np.asarray(shears, dtype=float)
    p_arr = np.asarray(ps, dtype=float)
    if edges_arr.size != shear_arr.size + 1 or shear_arr.size != p_arr.size:
        raise ValueError("need len(edges) = len(shears) + 1 = len(ps) + 1")
    if np.any(p_arr <= 0):
        raise ValueError("forcing pressures must be positive")

    def segment(t: float) -> int:
        return int(np.clip(np.searchsorted(edges_arr, t, side="right") - 1,
                           0, shear_arr.size - 1))

    return Forcing(
        shear=lambda t: float(shear_arr[segment(t)]),
        p=lambda t: float(p_arr[segment(t)]),
    )


def random_forcing(
    rng: np.random.Generator,
    t_end: float,
    n_segments: int = 8,
    shear_range: tuple[float, float] = (50.0, 1500.0),
    p_range: tuple[float, float] = (10.0, 1.0e4),
    p_floor: float = P_FLOOR,
) -> Forcing:
    """Seeded piecewise-constant forcing, log-uniform in shear and pressure."""
    edges = np.linspace(0.0, t_end, n_segments + 1)
    shears = np.exp(rng.uniform(math.log(shear_range[0]), math.log(shear_range[1]), n_segments))
    ps = np.exp(rng.uniform(math.log(p_range[0]), math.log(p_range[1]), n_segments))
    return piecewise_constant_forcing(edges, shears, np.maximum(ps, p_floor))


# ----------------------------------------------------------------------
# 0D box
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class BoxState:
    """Homogeneous state: time, packing fraction and optional pore pressure."""

    t: float
    phi: float
    p_f: float | None = None


def _box_rates(
    model, mat: MaterialParams, forcing: Forcing, gas: GasParams | None,
    t: float, phi: float, p_f: float | None,
) -> tuple[float, float]:
    shear = forcing.shear(t)
    p = forcing.p(t)
    if shear == 0.0:
        divu = 0.0
    else:
        I = inertial_number(mat, shear, p)
        divu = 2.0 * shear * model.dilatancy(phi, p, I)
    dphi = -phi * divu
    dpf = 0.0
    if p_f is not None:
        dpf = -(gas.p_atm + p_f) * divu / (1.0 - phi)
    return dphi, dpf


def step_box(
    state: BoxState,
    model,
    mat: MaterialParams,
    forcing: Forcing,
    dt: float,
    gas: GasParams | None = None,
) -> BoxState:
    """One classical 4-stage Runge-Kutta step of the box dynamics.

    The forcing (and hence the inertial number) is re-evaluated at every
    stage time.  When the state carries a pore pressure, ``gas`` must be
    given and the non-conservative, diffusion-free gas equation
    (1-phi) dp_f/dt = -(p_atm + p_f) div u is advanced alongside phi.

    Raises:
        ValueError: If dt <= 0, or p_f is tracked without gas parameters;
            model domain errors at stage states propagate.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if state.p_f is not None and gas is None:
        raise ValueError("tracking p_f requires gas parameters")
    t, phi, pf = state.t, state.phi, state.p_f

    k1 = _box_rates(model, mat, forcing, gas, t, phi, pf)
    k2 = _box_rates(
        model, mat, forcing, gas, t + 0.5 * dt,
        phi + 0.5 * dt * k1[0], None if pf is None else pf + 0.5 * dt * k1[1],
    )
    k3 = _box_rates(
        model, mat, forcing, gas, t + 0.5 * dt,
        phi + 0.5 * dt * k2[0], None if pf is None else pf + 0.5 * dt * k2[1],
    )
    k4 = _box_rates(
        model, mat, forcing, gas, t + dt,
        phi + dt * k3[0], None if pf is None else pf + dt * k3[1],
    )
    phi_new = phi + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    pf_new = (
        None
        if pf is None
        else pf + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    )
    return BoxState(t=t + dt, phi=phi_new, p_f=pf_new)


@dataclass
class BoxResult:
    """Recorded box trajectory with bound and sign diagnostics."""

    t: np.ndarray
    phi: np.ndarray
    p_f: np.ndarray | None
    div_u: np.ndarray
    inertial: np.ndarray
    i_eq: np.ndarray
    violations: list[tuple[int, float, float]]  # (step, time, phi)
    sign_agreement: bool

    @property
    def phi_min(self) -> float:
        return float(np.min(self.phi))

    @property
    def phi_max_seen(self) -> float:
        return float(np.max(self.phi))


def run_box(
    model,
    mat: MaterialParams,
    forcing: Forcing,
    phi0: float,
    t_end: float,
    dt: float,
    pf0: float | None = None,
    gas: GasParams | None = None,
    record_every: int = 1,
) -> BoxResult:
    """Integrate the box and collect diagnostics.

    Each recorded step stores div u, I and i_eq(phi) and checks the
    critical-state sign agreement sign(div u) = sign(I - i_eq(phi)) outside
    a |f| < 1e-12 dead band.  Steps leaving [-1e-9, phi_max + 1e-9] are
    flagged as model-violation events and never clamped.
    """
    n_steps = int(round(t_end / dt))
    state = BoxState(t=0.0, phi=phi0, p_f=pf0)
    ts, phis, pfs, divs, inertials, ieqs = [], [], [], [], [], []
    violations: list[tuple[int, float, float]] = []
    sign_ok = True

    def record(step: int, st: BoxState) -> None:
        nonlocal sign_ok
        shear, p = forcing.shear(st.t), forcing.p(st.t)
        in_domain = 0.0 <= st.phi <= mat.phi_max
        if shear > 0.0 and in_domain:
            I = inertial_number(mat, shear, p)
            f_val = model.dilatancy(st.phi, p, I)
            divu = 2.0 * shear * f_val
        else:
            I, f_val, divu = 0.0, 0.0, 0.0
        ieq = model.i_eq(st.phi) if in_domain else float("nan")
        ts.append(st.t)
        phis.append(st.phi)
        pfs.append(st.p_f if st.p_f is not None else math.nan)
        divs.append(divu)
        inertials.append(I)
        ieqs.append(ieq)
        if shear > 0.0 and abs(f_val) >= 1.0e-12 and not math.isnan(ieq):
            if math.copysign(1.0, divu) != math.copysign(1.0, I - ieq):
                sign_ok = False

    record(0, state)
    for step in range(1, n_steps + 1):
        try:
            state = step_box(state, model, mat, forcing, dt, gas=gas)
        except ValueError as exc:
            raise RuntimeError(f"box step {step} (t={state.t:g}) failed: {exc}") from exc
        if not -BOUND_EPS <= state.phi <= mat.phi_max + BOUND_EPS:
            violations.append((step, state.t, state.phi))
        if step % record_every == 0 or step == n_steps:
            record(step, state)

    return BoxResult(
        t=np.asarray(ts),
        phi=np.asarray(phis),
        p_f=None if pf0 is None else np.asarray(pfs),
        div_u=np.asarray(divs),
        inertial=np.asarray(inertials),
        i_eq=np.asarray(ieqs),
        violations=violations,
        sign_agreement=sign_ok,
    )


# ----------------------------------------------------------------------
# 1D column
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ColumnState:
    """Cell-centred column state; the solid profile is static."""

    z: np.ndarray
    phi_profile: np.ndarray
    pf_profile: np.ndarray
    t: float

    @property
    def dz(self) -> float:
        return float(self.z[1] - self.z[0])


def uniform_column(
    n_cells: int,
    length: float,
    phi: float | Sequence[float],
    pf_init: float | Sequence[float] | Callable[[np.ndarray], np.ndarray] = 0.0,
) -> ColumnState:
    """Build a column state on a uniform grid of cell centres."""
    if n_cells < 2:
        raise ValueError(f"need at least 2 cells, got {n_cells}")
    dz = length / n_cells
    z = (np.arange(n_cells) + 0.5) * dz
    phi_arr = np.broadcast_to(np.asarray(phi, dtype=float), (n_cells,)).copy()
    if np.any(phi_arr <= 0.0) or np.any(phi_arr >= 1.0):
        raise ValueError("column phi profile must lie in (0, 1)")
    if callable(pf_init):
        pf = np.asarray(pf_init(z), dtype=float)
    else:
        pf = np.broadcast_to(np.asarray(pf_init, dtype=float), (n_cells,)).copy()
    return ColumnState(z=z, phi_profile=phi_arr, pf_profile=pf, t=0.0)


def _cell_kappa(state: ColumnState, gas: GasParams, mat: MaterialParams) -> np.ndarray:
    phi = state.phi_profile
    return mat.d * mat.d * (1.0 - phi) ** 3 / (150.0 * gas.eta_f * phi * phi)


def _face_kappa(state: ColumnState, gas: GasParams, mat: MaterialParams) -> np.ndarray:
    kappa = _cell_kappa(state, gas, mat)
    # Harmonic mean preserves flux continuity across jumps in kappa.
    return 2.0 * kappa[:-1] * kappa[1:] / (kappa[:-1] + kappa[1:])


def column_cfl_dt(
    state: ColumnState, gas: GasParams, mat: MaterialParams, safety: float = 0.4
) -> float:
    """Largest explicit step: safety * min(dz^2 (1-phi) / (p_atm kappa))."""
    dz = state.dz
    limits = dz * dz * (1.0 - state.phi_profile) / (
        gas.p_atm * _cell_kappa(state, gas, mat)
    )
    return safety * float(np.min(limits))


def step_column(
    state: ColumnState,
    gas: GasParams,
    mat: MaterialParams,
    dt: float,
    mode: str = "explicit",
) -> ColumnState:
    """One finite-volume step of the pore-pressure diffusion equation.

    Zero-flux ends; harmonic-mean face permeabilities.  Explicit mode
    enforces the stability bound of :func:`column_cfl_dt` up front; the
    implicit mode is a backward-Euler tridiagonal solve without a step
    restriction.  Both modes conserve sum (1-phi) p_f dz exactly (the flux
    sum telescopes).

    Raises:
        ValueError: On dt <= 0, unknown mode, or an explicit step above the
            stability bound.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    dz = state.dz
    one_m = 1.0 - state.phi_profile
    kf = _face_kappa(state, gas, mat)
    p = state.pf_profile

    if mode == "explicit":
        limit = column_cfl_dt(state, gas, mat, safety=0.4)
        if dt > limit * (1.0 + 1.0e-12):
            raise ValueError(
                f"explicit step dt={dt:g} above the stability bound {limit:g}; "
                "reduce dt or use implicit mode"
            )
        flux = kf * (p[1:] - p[:-1]) / dz  # face fluxes, zero at both ends
        content = one_m * p
        content[:-1] += dt * gas.p_atm / dz * flux
        content[1:] -= dt * gas.p_atm / dz * flux
        p_new = content / one_m
    elif mode == "implicit":
        n = p.size
        r = dt * gas.p_atm / (dz * dz)
        lower = np.zeros(n)
        diag = one_m.copy()
        upper = np.zeros(n)
        diag[:-1] += r * kf
        diag[1:] += r * kf
        upper[1:] = -r * kf
        lower[:-1] = -r * kf
        ab = np.vstack([upper, diag, lower])
        p_new = solve_banded((1, 1), ab, one_m * p)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    return ColumnState(
        z=state.z, phi_profile=state.phi_profile, pf_profile=p_new, t=state.t + dt
    )


def gas_content(state: ColumnState) -> float:
    """Discrete gas content sum (1-phi) p_f dz, conserved by the stepper."""
    return float(np.sum((1.0 - state.phi_profile) * state.pf_profile) * state.dz)


@dataclass
class ColumnResult:
    """Per-step column diagnostics plus downsampled state history."""

    history: list[ColumnState]
    t: np.ndarray
    content: np.ndarray
    energy: np.ndarray
    dissipation: np.ndarray
    max_step_content_drift: float


def run_column(
    state0: ColumnState,
    gas: GasParams,
    mat: MaterialParams,
    dt: float,
    n_steps: int,
    mode: str = "explicit",
    record_every: int = 1,
) -> ColumnResult:
    """Advance the column, tracking conservation and the energy ledger.

    ``content``, ``energy`` and ``dissipation`` are recorded at *every*
    step; states are kept each ``record_every`` steps (plus the initial and
    final ones).
    """
    state = state0
    history = [state]
    ts = [state.t]
    contents = [gas_content(state)]
    energies = [_column_energy(state, gas)]
    dissipations = [_column_dissipation(state, gas, mat)]
    scale = max(abs(contents[0]), 1.0)
    max_drift = 0.0
    for step in range(1, n_steps + 1):
        state = step_column(state, gas, mat, dt, mode=mode)
        ts.append(state.t)
        g = gas_content(state)
        max_drift = max(max_drift, abs(g - contents[-1]) / scale)
        contents.append(g)
        energies.append(_column_energy(state, gas))
        dissipations.append(_column_dissipation(state, gas, mat))
        if step % record_every == 0 or step == n_steps:
            history.append(state)
    return ColumnResult(
        history=history,
        t=np.asarray(ts),
        content=np.asarray(contents),
        energy=np.asarray(energies),
        dissipation=np.asarray(dissipations),
        max_step_content_drift=max_drift,
    )


def _column_energy(state: ColumnState, gas: GasParams) -> float:
    """E1 = sum (1-phi) (p_atm + p_f) [ln(1 + p_f/p_atm) - 1] dz."""
    p = state.pf_profile
    h = (gas.p_atm + p) * (np.log1p(p / gas.p_atm) - 1.0)
    return float(np.sum((1.0 - state.phi_profile) * h) * state.dz)


def _column_dissipation(
    state: ColumnState, gas: GasParams, mat: MaterialParams
) -> float:
    """D = sum over faces of kappa (dp_f/dz)^2 dz."""
    kf = _face_kappa(state, gas, mat)
    grad = (state.pf_profile[1:] - state.pf_profile[:-1]) / state.dz
    return float(np.sum(kf * grad * grad) * state.dz)


@dataclass
class EnergyLedger:
    """Energy budget of a column history.

    ``residuals[k] = |(E1[k+1] - E1[k]) / dt_k + D[k]|`` measures how well
    the discrete trajectory honours dE1/dt = -D; it shrinks linearly with
    the time step.
    """

    t: np.ndarray
    energy: np.ndarray
    dissipation: np.ndarray
    residuals: np.ndarray

    @property
    def non_increasing(self) -> bool:
        return bool(np.all(np.diff(self.energy) <= 0.0))

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0


def energy_ledger(
    history: Sequence[ColumnState], gas: GasParams, mat: MaterialParams
) -> EnergyLedger:
    """Build the E1 / dissipation ledger from a sequence of column states."""
    if len(history) < 2:
        raise ValueError("need at least two states for a ledger")
    t = np.array([s.t for s in history])
    e1 = np.array([_column_energy(s, gas) for s in history])
    diss = np.array([_column_dissipation(s, gas, mat) for s in history])
    dts = np.diff(t)
    if np.any(dts <= 0):
        raise ValueError("history times must be strictly increasing")
    residuals = np.abs(np.diff(e1) / dts + diss[:-1])
    return EnergyLedger(t=t, energy=e1, dissipation=diss, residuals=residuals)
