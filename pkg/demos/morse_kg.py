"""Klein-Gordon-Morse levels: particle branch, antiparticle root and a truncated tower."""

from shapeinv.families import MorseKG, default_grid, superpotential_spec
from shapeinv.spectrum import analytic_spectrum, default_config, eigen_residual, level_wavefunction, numeric_spectrum
from shapeinv.susy import node_count

fam = MorseKG(S0=1.0, V0=0.5, alpha=1.0, M=1.0)
cfg = default_config(fam, max_levels=3)
ana, num = analytic_spectrum(fam, cfg), numeric_spectrum(fam, cfg)

for lv in ana.levels:
    spec = superpotential_spec(fam, lv.E)
    psi = level_wavefunction(fam, lv, default_grid(fam, lv.E))
    res = eigen_residual(fam, lv.E, lv.epsilon, psi)
    print(f"n={lv.n} E={lv.E:.10f} a1={spec.param_at(1):.4f} nodes={node_count(psi.values)} residual={res:.1e}")
for lv in num.levels:
    print(f"grid n={lv.n} E={lv.E:.10f}")
for w in ana.warnings:
    print("note:", w)
