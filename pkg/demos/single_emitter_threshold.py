"""Single emitter: the bound state appears when the reservoir wins.

One two-level emitter sits in a chiral channel, decaying at rate gamma into
the channel and gamma' into everything else.  When gamma' > gamma a
dissipative bound state exists at E = omega - i gamma' + i gamma; exactly
at gamma = gamma' the transmission vanishes on resonance and the bound
state dissolves into a scattering state with zero transmission.

Run from the repository root:

    python demos/single_emitter_threshold.py [--plot]
"""

import sys

import numpy as np

from chiralqed import (
    bound_state_threshold,
    build_spin_model,
    classify_model,
    find_transmission_zeros,
    preset_family,
    preset_single_atom,
    transmission_det,
)

GAMMA_TOT = 1.0
OMEGA = 100.0

print("ratio = gamma/gamma_tot   bound states   |t| on resonance")
for ratio in (0.1, 0.3, 0.5, 0.7, 0.9):
    model = preset_family("single_atom", GAMMA_TOT, OMEGA)(ratio)
    bound_set = classify_model(model)
    t_res = transmission_det(model, OMEGA)
    print(f"  {ratio:4.2f}                    {bound_set.bound_state_count}              {abs(t_res):.4f}")

# the classifier sees the threshold exactly where the resonant zero sits
model_at = preset_family("single_atom", GAMMA_TOT, OMEGA)(0.5)
zeros = find_transmission_zeros(classify_model(model_at))
print(f"\ntransmission zeros at ratio 0.5: {zeros}")

found = bound_state_threshold(preset_family("single_atom", GAMMA_TOT, OMEGA), 0.2, 0.8)
print(f"bisected threshold ratio: {found.value:.12f}")
print(f"crossing eigenvalue:      {found.crossing_energy:.6g}")

# spectra across the threshold
ks = np.linspace(OMEGA - 8, OMEGA + 8, 801)
curves = {}
for ratio in (0.2, 0.5, 0.8):
    gamma = ratio * GAMMA_TOT
    model = build_spin_model(*preset_single_atom(gamma, GAMMA_TOT - gamma, omega_eg=OMEGA))
    curves[ratio] = np.abs(transmission_det(model, ks)) ** 2
    dip = curves[ratio].min()
    print(f"ratio {ratio}: min |t|^2 over the window = {dip:.6f}")

if "--plot" in sys.argv[1:]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.2))
    for ratio, curve in curves.items():
        ax.plot(ks - OMEGA, curve, label=f"$\\Gamma/\\Gamma_{{tot}}$ = {ratio}")
    ax.set_xlabel("k - omega_eg")
    ax.set_ylabel("|t|^2")
    ax.legend()
    fig.tight_layout()
    fig.savefig("single_emitter_threshold.png", dpi=150)
    print("wrote single_emitter_threshold.png")
