"""Zeroth-order spectra across a range of collective couplings.

For each NJ the k=0 block is diag(w_e,m) + NJ c c^T with c = fc[0, :], so the
line positions are its eigenvalues. A positive NJ pushes weight into the top
line (H-like), a negative one into the bottom line (J-like). Writes the log
intensity map when given an output path.

    python3 demos/03_coupling_sweep.py [surface.csv]
"""

from __future__ import annotations

import sys

import numpy as np

from aggspec import find_peak_positions, parse_config, sweep, zeroth_order_matrix

run = parse_config(preset="fig3-sweep")
surface = sweep(run.model, run.aggregate, run.sweep.axis, run.vib_freq, run.grid, k_max=0)

for x, row in zip(surface.coupling_axis[::20], surface.intensity[::20]):
    peaks = find_peak_positions(row, run.grid)
    ev = np.linalg.eigvalsh(zeroth_order_matrix(run.model, x * run.vib_freq))
    brightest = peaks[np.argmax(np.interp(peaks, run.grid.omega, row))]
    print(f"NJ/w_v = {x:+.2f}: brightest line {brightest:.4f} eV, max |peak - eigenvalue| {np.abs(peaks - ev).max():.1e}")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(surface.to_text())
    print("wrote", sys.argv[1])
