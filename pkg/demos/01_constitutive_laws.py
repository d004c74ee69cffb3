"""Tour of the constitutive-law catalogue.

Walks through the yield/dilatancy pairs: the Drucker-Prager and mu(I)
families, power-law yield functions and their closed-form dilatancies, the
dilatancy-angle variants, and the quadrature route that derives f from an
arbitrary Z.  Run as a script; everything prints.
"""

import math

import numpy as np

from granupore import (
    DerivedNumeric,
    DruckerPrager,
    DruckerPragerDilatant,
    EquilibriumLaw,
    MuI,
    MuIDilatant,
    PowerLaw,
    derive_f_numeric,
    glass_beads,
    i_eq,
)

mat = glass_beads()
law = EquilibriumLaw()
print("material: glass beads")
print(f"  mu1 = tan 21deg = {mat.mu1:.6f}, mu2 = tan 33deg = {mat.mu2:.6f}, I0 = {mat.I0}")
print(f"  phi_max = {mat.phi_max}, delta_phi = {mat.delta_phi}, delta = 30 deg")
print()

# --- the four flagship models at one state --------------------------------
phi, p, I = 0.5, 1000.0, 1.0
print(f"state: phi = {phi} (i_eq = {i_eq(law, mat, phi):.3f}), p = {p} Pa, I = {I}")
print(f"{'model':<12} {'Z':>10} {'f':>10} {'Z - f':>10}")
for name, model in (
    ("dp", DruckerPrager(mat, law)),
    ("mui", MuI(mat, law)),
    ("dp-psi", DruckerPragerDilatant(mat, law)),
    ("mui-psi", MuIDilatant(mat, law)),
):
    z = model.yield_function(phi, I)
    f = model.dilatancy(phi, p, I)
    print(f"{name:<12} {z:>10.6f} {f:>10.6f} {z - f:>10.6f}")
print("Z - f > 0 is the local dissipation margin; it never goes negative")
print("for these four models.")
print()

# --- power-law yield functions and their dilatancies -----------------------
print("power-law yield functions Z = I^n at (i_eq = 0.5, I = 1):")
print(f"{'n':>6} {'f closed':>12} {'f derived':>12} {'difference':>12}")
for n in (0.0, 1.0, 2.0, 3.0, -0.5):
    model = PowerLaw(mat, law, n=n)
    closed = model.dilatancy(phi, p, I)
    derived = derive_f_numeric(model.yield_function, law, mat, phi, p, I)
    print(f"{n:>6.1f} {closed:>12.6f} {derived:>12.6f} {abs(closed - derived):>12.2e}")
print("n = 2 is the purely viscous case: its dilatancy vanishes identically.")
print()

# --- near-equilibrium gains -------------------------------------------------
print("critical-state gains a (f ~ a (phi - phi_eq) near equilibrium), I = 1:")
for name, model in (
    ("dp", DruckerPrager(mat, law)),
    ("mui", MuI(mat, law)),
    ("dp-psi", DruckerPragerDilatant(mat, law)),
    ("mui-psi", MuIDilatant(mat, law)),
):
    a = model.near_equilibrium_gain(1.0)
    # check against a finite-difference slope at the equilibrium packing
    phi_star, h = model.phi_eq(1.0), 1e-6
    slope = (
        model.dilatancy(phi_star + h, p, 1.0) - model.dilatancy(phi_star - h, p, 1.0)
    ) / (2 * h)
    print(f"  {name:<8} a = {a:.6f}   fd slope = {slope:.6f}")
print()

# --- derive f for a custom yield function ----------------------------------
print("custom yield function Z = sin(30deg) * (1 + phi * I/(1 + I)):")
custom = DerivedNumeric(
    mat, law, Z=lambda ph, J: math.sin(mat.delta) * (1.0 + ph * J / (1.0 + J))
)
for I_probe in np.geomspace(0.1, 5.0, 5):
    f = custom.dilatancy(phi, p, float(I_probe))
    marker = "dilates" if f > 0 else "compacts"
    print(f"  I = {I_probe:>6.3f}: f = {f:>9.5f}  ({marker})")
print("the derived f inherits the equilibrium anchor automatically:")
print(f"  f at I = i_eq(phi): {custom.dilatancy(phi, p, i_eq(law, mat, phi)):.2e}")
