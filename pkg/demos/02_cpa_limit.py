"""Approach to the classical-optics limit at fixed collective coupling NJ.

As N grows with NJ held fixed, the coupling between neighbouring sectors
shrinks like 1/sqrt(N) relative to the intra-sector exchange. The exact
spectrum per monomer then converges on the CPA formula g / (1 - NJ g).
"""

from __future__ import annotations

import numpy as np

from aggspec import (
    AggregateConfig,
    DisplacedOscillatorSpec,
    FrequencyGrid,
    build_model,
    cpa_spectrum,
    spectrum,
)

model = build_model(DisplacedOscillatorSpec(vib_freq=0.16, huang_rhys=0.5, zero_zero_energy=2.3, m_g=1, m_e=4))
grid = FrequencyGrid(2.3 - 4 * 0.16, 2.3 + 8 * 0.16, 4001)
nj = 0.32

print(f"{'N+1':>6} {'sup|exact-cpa|/(N+1)':>22} {'k_max=1 gap':>14}")
for n in (2, 8, 32, 128, 512):
    cfg = AggregateConfig(n, nj / n, gamma=0.01, gamma_v=1e-5)
    cpa = cpa_spectrum(model, cfg, grid)
    exact = spectrum(model, cfg, grid)
    first = spectrum(model, cfg, grid, k_max=1)
    scale = n + 1
    print(
        f"{n + 1:>6} {np.abs(exact - cpa).max() / scale:>22.4f} {np.abs(exact - first).max() / scale:>14.2e}"
    )
