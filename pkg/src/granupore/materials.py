"""Material parameters, equilibrium packing laws and dimensionless numbers.

Everything downstream (constitutive laws, condition checks, simulators)
builds on the quantities defined here:

* the inertial number ``I = d|S| / sqrt(p / rho_s)`` characterising the
  flow regime of a dry granular medium,
* the viscous number ``J = eta_f |S| / p`` used for fluid-immersed flows
  at low Stokes number,
* empirical equilibrium laws ``phi_eq(I)`` relating packing fraction and
  inertial number at steady isochoric shearing, together with their
  inverses ``i_eq(phi)``,
* the geometry linking a dilatancy angle ``psi`` to the velocity-field
  divergence, ``div u = 2 |S| sin(psi)`` in planar shear.

All quantities are SI; angles are radians internally (configuration files
may use an explicit ``deg`` suffix, see :mod:`granupore.config`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "MaterialParams",
    "GasParams",
    "EquilibriumLaw",
    "FlowState",
    "glass_beads",
    "air",
    "inertial_number",
    "viscous_number",
    "phi_eq",
    "i_eq",
    "div_u_from_angle",
    "angle_from_div_u",
]

#: Upper bracket for the numeric inversion of non-linear equilibrium laws.
I_CAP = 1.0e3

#: Residual tolerance for the numeric inversion (|phi_eq(I) - phi|).
I_EQ_TOL = 1.0e-12


@dataclass(frozen=True)
class MaterialParams:
    """Physical parameters of the solid (granular) phase.

    Args:
        rho_s: Solid density (kg/m3).
        d: Grain diameter (m).
        phi_max: Maximum packing fraction.
        delta_phi: Slope of the linear equilibrium law phi_eq(I).
        delta: Internal friction angle (rad), sine convention.
        mu1: Low-I friction bound of the mu(I) law.
        mu2: High-I friction bound of the mu(I) law.
        I0: Inertial scale of the mu(I) law.  Kept constant here; some
            measurements suggest a phi dependence, which would slot in as
            a callable replacing this scalar.
        a_rr: Optional critical-state gain for the Roux-Radjai closure.
    """

    rho_s: float = 2500.0
    d: float = 1.0e-4
    phi_max: float = 0.6
    delta_phi: float = 0.2
    delta: float = math.radians(30.0)
    mu1: float = math.tan(math.radians(21.0))
    mu2: float = math.tan(math.radians(33.0))
    I0: float = 0.3
    a_rr: float | None = None

    def __post_init__(self) -> None:
        if self.rho_s <= 0:
            raise ValueError(f"rho_s must be positive, got {self.rho_s}")
        if self.d <= 0:
            raise ValueError(f"d must be positive, got {self.d}")
        if not 0.0 < self.phi_max < 1.0:
            raise ValueError(f"phi_max must lie in (0, 1), got {self.phi_max}")
        if self.delta_phi <= 0:
            raise ValueError(f"delta_phi must be positive, got {self.delta_phi}")
        if not 0.0 < self.delta < math.pi / 2:
            raise ValueError(f"delta must lie in (0, pi/2), got {self.delta}")
        if not 0.0 < self.mu1 < self.mu2:
            raise ValueError(f"need 0 < mu1 < mu2, got mu1={self.mu1}, mu2={self.mu2}")
        if self.I0 <= 0:
            raise ValueError(f"I0 must be positive, got {self.I0}")


@dataclass(frozen=True)
class GasParams:
    """Physical parameters of the interstitial gas.

    Args:
        eta_f: Gas dynamic viscosity (Pa s).
        p_atm: Atmospheric pressure (Pa).
        rho_f0: Gas density at atmospheric pressure (kg/m3).
    """

    eta_f: float = 1.8e-5
    p_atm: float = 1.013e5
    rho_f0: float = 1.0

    def __post_init__(self) -> None:
        for name in ("eta_f", "p_atm", "rho_f0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class EquilibriumLaw:
    """Empirical law phi_eq(I) for the isochoric steady state.

    Variants:
        ``linear``: phi_max - delta_phi * I (may go negative at large I;
            the mass-conservation dynamics keeps phi bounded regardless,
            so no clamping is applied inside the law).
        ``schaeffer``: phi_max - delta_phi / (1 + 1/I).
        ``robinson``: phi_max - A * I**a.
        ``breard``: phi_max / (1 + I).

    The packing constants ``phi_max`` and ``delta_phi`` come from the
    :class:`MaterialParams` passed to :func:`phi_eq` / :func:`i_eq`; only
    the Robinson exponent pair lives here.
    """

    variant: str = "linear"
    A: float = 0.1305
    a: float = 0.8156

    _VARIANTS = ("linear", "schaeffer", "robinson", "breard")

    def __post_init__(self) -> None:
        if self.variant not in self._VARIANTS:
            raise ValueError(
                f"unknown equilibrium law {self.variant!r}; expected one of {self._VARIANTS}"
            )
        if self.variant == "robinson" and (self.A <= 0 or self.a <= 0):
            raise ValueError("robinson law needs positive A and a")


@dataclass(frozen=True)
class FlowState:
    """Local flow state at which laws and conditions are evaluated.

    Args:
        phi: Solid volume fraction.
        p: Solid (granular) pressure (Pa).
        shear: Second-invariant norm |S| of the deviatoric strain rate (1/s).
        p_f: Pore gas pressure (Pa), gauge relative to atmospheric.
    """

    phi: float
    p: float
    shear: float
    p_f: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {self.phi}")
        if self.p < 0:
            raise ValueError(f"p must be non-negative, got {self.p}")
        if self.shear < 0:
            raise ValueError(f"shear must be non-negative, got {self.shear}")


def glass_beads(**overrides) -> MaterialParams:
    """Default mono-dispersed glass-bead parameters.

    mu1 = tan 21deg, mu2 = tan 33deg, I0 = 0.3, phi_max = 0.6,
    delta_phi = 0.2, delta = 30deg, rho_s = 2500 kg/m3, d = 100 um.
    """
    return MaterialParams(**overrides)


def air(**overrides) -> GasParams:
    """Default air parameters (eta_f = 1.8e-5 Pa s, p_atm = 1.013e5 Pa)."""
    return GasParams(**overrides)


def inertial_number(mat: MaterialParams, shear: float, p: float) -> float:
    """Inertial number I = d * shear / sqrt(p / rho_s).

    Args:
        mat: Material parameters (grain diameter and solid density).
        shear: Strain-rate norm |S| (1/s), non-negative.
        p: Solid pressure (Pa), strictly positive.

    Raises:
        ValueError: If p <= 0 (I is singular at vanishing pressure; callers
            that need a regularisation must apply their own pressure floor)
            or shear < 0.
    """
    if p <= 0:
        raise ValueError(f"inertial number undefined for p <= 0, got p={p}")
    if shear < 0:
        raise ValueError(f"shear must be non-negative, got {shear}")
    return mat.d * shear / math.sqrt(p / mat.rho_s)


def viscous_number(gas: GasParams, shear: float, p: float) -> float:
    """Viscous number J = eta_f * shear / p for low-Stokes suspensions."""
    if p <= 0:
        raise ValueError(f"viscous number undefined for p <= 0, got p={p}")
    if shear < 0:
        raise ValueError(f"shear must be non-negative, got {shear}")
    return gas.eta_f * shear / p


def phi_eq(law: EquilibriumLaw, mat: MaterialParams, I: float) -> float:
    """Equilibrium packing fraction phi_eq(I) for the chosen law variant.

    Raises:
        ValueError: If I < 0.
    """
    if I < 0:
        raise ValueError(f"equilibrium law undefined for I < 0, got {I}")
    if law.variant == "linear":
        return mat.phi_max - mat.delta_phi * I
    if law.variant == "schaeffer":
        # I/(1+I) form avoids the 1/I singularity at I=0 and gives the
        # correct limit phi_max.
        return mat.phi_max - mat.delta_phi * I / (1.0 + I)
    if law.variant == "robinson":
        return mat.phi_max - law.A * I**law.a
    return mat.phi_max / (1.0 + I)  # breard


def i_eq(law: EquilibriumLaw, mat: MaterialParams, phi: float) -> float:
    """Equilibrium inertial number, the inverse of :func:`phi_eq`.

    The linear law inverts in closed form, i_eq = (phi_max - phi)/delta_phi.
    Non-linear variants are inverted by bisection on [0, I_CAP]; bisection
    is slower than Newton but cannot diverge on these monotone laws.

    Raises:
        ValueError: If phi > phi_max (no non-negative equilibrium I exists)
            or the bisection bracket fails (phi below the law's range).
    """
    if phi > mat.phi_max:
        raise ValueError(
            f"no equilibrium inertial number for phi={phi} > phi_max={mat.phi_max}"
        )
    if law.variant == "linear":
        return (mat.phi_max - phi) / mat.delta_phi

    lo, hi = 0.0, I_CAP
    f_lo = phi_eq(law, mat, lo) - phi
    f_hi = phi_eq(law, mat, hi) - phi
    if f_lo < 0.0:
        # phi_eq(0) = phi_max >= phi always holds, so this is unreachable
        # unless phi > phi_max slipped through rounding.
        raise ValueError(f"inversion bracket failed at I=0 for phi={phi}")
    if f_hi > 0.0:
        raise ValueError(
            f"phi={phi} below the range of the {law.variant} law on [0, {I_CAP}]"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = phi_eq(law, mat, mid) - phi
        if abs(f_mid) < I_EQ_TOL:
            return mid
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 4.0 * math.ulp(hi):
            break
    return 0.5 * (lo + hi)


def div_u_from_angle(shear: float, psi: float, mode: str = "planar2D") -> float:
    """Velocity divergence produced by a geometric dilatancy angle.

    Modes:
        ``planar2D``: div u = 2 |S| sin(psi), exact in planar shear.
        ``exact3D``: div u = 2 |S| sin(psi) / sqrt(1 + sin(psi)^2 / 3),
            the unidirectional-3D generalisation; the leading factor 2
            survives in three dimensions.
        ``small_angle``: div u = 2 |S| psi.

    Raises:
        ValueError: If |psi| >= pi/2 or the mode is unknown.
    """
    if abs(psi) >= math.pi / 2:
        raise ValueError(f"dilatancy angle must satisfy |psi| < pi/2, got {psi}")
    if mode == "planar2D":
        return 2.0 * shear * math.sin(psi)
    if mode == "exact3D":
        s = math.sin(psi)
        return 2.0 * shear * s / math.sqrt(1.0 + s * s / 3.0)
    if mode == "small_angle":
        return 2.0 * shear * psi
    raise ValueError(f"unknown mode {mode!r}")


def angle_from_div_u(shear: float, divu: float, mode: str = "planar2D") -> float:
    """Dilatancy angle recovering a given divergence, inverse of
    :func:`div_u_from_angle` in the matching mode.

    Raises:
        ValueError: If shear = 0 with divu != 0, the arcsine argument
            falls outside [-1, 1], or the mode is unknown.
    """
    if shear == 0.0:
        if divu != 0.0:
            raise ValueError("cannot infer an angle from divu != 0 at zero shear")
        return 0.0
    if shear < 0:
        raise ValueError(f"shear must be non-negative, got {shear}")
    if mode == "planar2D":
        arg = divu / (2.0 * shear)
    elif mode == "exact3D":
        denom_sq = 4.0 * shear * shear - divu * divu / 3.0
        if denom_sq <= 0.0:
            raise ValueError("divergence too large for the 3D angle relation")
        arg = divu / math.sqrt(denom_sq)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not -1.0 <= arg <= 1.0:
        raise ValueError(f"arcsine argument {arg} outside [-1, 1]")
    return math.asin(arg)
