"""Walk the parameter chain of the warm-vapor reference cell.

Starting from bare cell numbers (wavelength, decay rate, drive, density,
length, pulse duration) every propagation quantity follows: scattering
cross section, optical depth, the two group velocities, the exchange
coupling, and the residual absorption.  The script prints the chain at
the reference drive and sweeps the drive to show the scaling laws
(velocities go with the square of the drive, the coupling inversely,
absorption inversely squared).
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import timebin as tb

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

GAMMA = math.tau * 3e6
cell = tb.PhysicalConfig(
    wavelength=0.8e-6,
    optical_decay=GAMMA,
    rabi_drive=10.0 * GAMMA,
    atom_density=1e18,
    medium_length=100e-6,
    pulse_duration=2e-9,
    velocity_ratio=0.3,
)

params = tb.derive_params(cell)
print("reference cell")
print(f"  cross section     {params.cross_section:.4e} m^2")
print(f"  optical depth     {params.optical_depth:.4f}")
print(f"  group velocities  v1 = {params.v1:.1f} m/s, v2 = {params.v2:.1f} m/s")
print(f"  coupling * length {params.beta_l:.4f}")
print(f"  absorption        kappa1*L = {params.kappa1_l:.4f}, "
      f"kappa2*L = {params.kappa2_l:.4f}")
print(f"  transparency window {params.eit_window:.4e} rad/s")

violations = tb.validate_regime(params)
print(f"regime violations at the reference point: {len(violations)}")
for v in violations:
    print(f"  {v}")

ratios = np.linspace(2.0, 40.0, 120)
swept = [tb.derive_params(cell.with_drive(r * GAMMA)) for r in ratios]

fig, axes = plt.subplots(1, 3, figsize=(12.5, 3.8))
axes[0].plot(ratios, [p.v2 for p in swept], label="fast channel")
axes[0].plot(ratios, [p.v1 for p in swept], label="slow channel")
axes[0].set_ylabel("group velocity (m/s)")
axes[0].legend(frameon=False)
axes[1].plot(ratios, [p.beta_l for p in swept], color="tab:green")
axes[1].set_ylabel("exchange coupling x length")
axes[2].semilogy(ratios, [p.kappa1_l for p in swept], label="slow channel")
axes[2].semilogy(ratios, [p.kappa2_l for p in swept], label="fast channel")
axes[2].axhline(0.2, color="grey", lw=0.8, ls="--", label="working bound")
axes[2].set_ylabel("residual absorption x length")
axes[2].legend(frameon=False)
for ax in axes:
    ax.set_xlabel("drive / decay rate")
fig.suptitle("drive scaling of the derived propagation parameters")
fig.tight_layout()
fig.savefig(OUT / "01_parameter_chain.png", dpi=150)
print(f"wrote {OUT / '01_parameter_chain.png'}")
