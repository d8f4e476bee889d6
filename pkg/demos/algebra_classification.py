"""Remainder sequences, their first differences and the algebra they close on."""

import numpy as np

from shapeinv.algebra import TowerState, algebra_report, structure_residuals
from shapeinv.families import FiveParamExp, HarmonicKG, MorseKG, normalizable_form, superpotential_spec
from shapeinv.numerics import build_grid

specs = {
    "harmonic": (superpotential_spec(HarmonicKG(V0=1.0, M=1.0), 1.618), (-6, 6)),
    "morse": (superpotential_spec(MorseKG(S0=1.0, V0=0.5, alpha=1.0, M=1.0), 0.43), (-3, 12)),
    "five_param": (superpotential_spec(normalizable_form(FiveParamExp(1.0, 1.0, 0.0, 3.0, 0.5))), (-6, 6)),
}
for name, (spec, (lo, hi)) in specs.items():
    grid = build_grid(lo, hi, int(round((hi - lo) / 4e-3)) + 1)
    probe = TowerState.uniform(grid, np.exp(-((grid.r - 0.5 * (lo + hi)) ** 2)), 6)
    rep = algebra_report(spec, probe=probe)
    worst = max(structure_residuals(spec, rep, probe).values())
    R = [spec.remainder(k) for k in range(1, 5)]
    print(f"{name:>10}: R = {np.round(R, 4)} mu = {rep.mu:+.4f} -> {rep.classification}"
          f"  [B-,B+] residual {rep.commutator_residual:.1e}, structure {worst:.1e}")
