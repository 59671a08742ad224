"""Counting bound states from the transmission phase alone.

As k runs over the real line, t_k traces a closed curve in the complex
plane that starts and ends at 1.  The number of counterclockwise turns
around the origin equals N - N_B: every bound state that forms removes one
turn.  This is measurable -- an interferometric phase scan suffices -- so
the bound-state count is observable without ever exciting a bound state.

Run from the repository root:

    python demos/winding_levinson.py [--plot]
"""

import sys

import numpy as np

from chiralqed import (
    EnsembleConfig,
    ReservoirCoupling,
    build_spin_model,
    preset_family,
    verify_levinson,
    winding_number,
)


def random_scene(seed, n):
    """Short random emitter chain plus a random dissipative reservoir."""
    rng = np.random.default_rng(seed)
    positions = np.sort(rng.uniform(0.0, 0.08, n))[::-1]
    rates = rng.uniform(0.05, 1.0, n)
    phases = np.exp(2j * np.pi * rng.uniform(size=n))
    config = EnsembleConfig(
        omega_eg=rng.uniform(100.0, 400.0),
        positions=positions,
        couplings=np.sqrt(2 * rates) * phases,
    )
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    reservoir = ReservoirCoupling(0.5 * (h + h.conj().T) - 0.3j * (a.conj().T @ a))
    return config, reservoir


print("two-emitter family (gamma_tot = 1):")
print("ratio   winding   N - N_B   consistent")
traces = {}
for ratio in (0.2, 0.65, 0.75):
    model = preset_family("two_atom")(ratio)
    check = verify_levinson(model)
    traces[ratio] = winding_number(model)
    print(
        f" {ratio:4.2f}      {check.winding}         {check.num_emitters - check.num_bound}"
        f"         {check.consistent}"
    )

print("\nrandom five-emitter scene with a random dissipative reservoir:")
model = build_spin_model(*random_scene(seed=11, n=5))
check = verify_levinson(model)
print(f" winding = {check.winding}, emitters = {check.num_emitters}, "
      f"bound states = {check.num_bound}, consistent = {check.consistent}")

if "--plot" in sys.argv[1:]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    for ratio, trace in traces.items():
        ax.plot(trace.t_values.real, trace.t_values.imag, label=f"ratio {ratio}")
    ax.plot([0], [0], "k*", markersize=10)
    ax.set_xlabel("Re t")
    ax.set_ylabel("Im t")
    ax.set_aspect("equal")
    ax.legend()
    fig.tight_layout()
    fig.savefig("winding_levinson.png", dpi=150)
    print("wrote winding_levinson.png")
