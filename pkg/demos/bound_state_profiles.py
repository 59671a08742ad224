"""Sampling the hybrid light-matter wavefunction of a dissipative bound state.

A bound state with energy E below the real axis binds a photon cloud to the
emitters: each emitter contributes a piece localized upstream of it with
spatial width 1/|Im E|.  The state keeps its shape while leaking energy
into the reservoir.  For one emitter the right wavefunction is a pure
exponential on the incoming side; the left (adjoint) partner mirrors it on
the outgoing side.

Run from the repository root:

    python demos/bound_state_profiles.py [--plot]
"""

import sys

import numpy as np

from chiralqed import (
    BOUND,
    bound_wavefunction,
    build_spin_model,
    classify_model,
    preset_single_atom,
    preset_two_atom,
)

OMEGA, GAMMA, GAMMA_PRIME = 20.0, 0.2, 0.8

model = build_spin_model(*preset_single_atom(GAMMA, GAMMA_PRIME, omega_eg=OMEGA))
entry = classify_model(model).by_label(BOUND)[0]
print(f"single emitter: E = {entry.energy:.4g}, width 1/|Im E| = {1/abs(entry.energy.imag):.4g}")

zs = np.linspace(-40.0, 2.0, 4001)
right = bound_wavefunction(model, entry, "right", zs)
left = bound_wavefunction(model, entry, "left", np.linspace(-2.0, 40.0, 4001))

inside = (zs > -30) & (zs < -1)
slope = np.polyfit(zs[inside], np.log(np.abs(right.photon_amplitude[inside])), 1)[0]
print(f"fitted decay rate of log|phi|: {slope:.9f}  (gamma' - gamma = {GAMMA_PRIME - GAMMA})")
print(f"photon amplitude vanishes downstream: |phi(z>0)| = "
      f"{np.abs(right.photon_amplitude[zs > 0]).max():.1e}")

# two-emitter bound states: one photon cloud per eigenvalue below the axis
pair = build_spin_model(*preset_two_atom(0.1, 0.9, omega_eg=OMEGA))
pair_set = classify_model(pair)
print(f"\ntwo emitters at gamma/gamma_tot = 0.1: {pair_set.bound_state_count} bound states")
profiles = []
for i, e in enumerate(pair_set.by_label(BOUND)):
    width = 1.0 / abs(e.energy.imag)
    grid = np.linspace(pair.config.positions.min() - 20 * width,
                       pair.config.positions.max() + width, 3001)
    sample = bound_wavefunction(pair, e, "right", grid)
    profiles.append((e.energy, grid, sample))
    print(f"  state {i}: E = {e.energy:.4g}, peak |phi| = {np.abs(sample.photon_amplitude).max():.4g}")

if "--plot" in sys.argv[1:]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    ax1.plot(zs, np.abs(right.photon_amplitude), label="right state")
    ax1.plot(left.z_grid, np.abs(left.photon_amplitude), label="left state")
    ax1.set_xlabel("z")
    ax1.set_ylabel("|phi|")
    ax1.set_title("single emitter")
    ax1.legend()
    for energy, grid, sample in profiles:
        ax2.semilogy(grid, np.abs(sample.photon_amplitude),
                     label=f"Im E = {energy.imag:.3f}")
    ax2.set_xlabel("z")
    ax2.set_title("two emitters")
    ax2.legend()
    fig.tight_layout()
    fig.savefig("bound_state_profiles.png", dpi=150)
    print("wrote bound_state_profiles.png")
