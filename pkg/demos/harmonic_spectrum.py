"""Klein-Gordon oscillator with equal scalar and vector parts: ladder vs finite differences."""

from shapeinv.families import HarmonicKG
from shapeinv.numerics import build_grid
from shapeinv.spectrum import SolveConfig, analytic_spectrum, compare_spectra, numeric_spectrum

fam = HarmonicKG(V0=1.0, M=1.0)
cfg = SolveConfig(build_grid(-10.0, 10.0, 8001), (1 + 1e-6, 51.0), max_levels=5)
ana, num = analytic_spectrum(fam, cfg), numeric_spectrum(fam, cfg)

print(f"{'n':>2} {'E ladder':>14} {'E grid':>14} {'rel diff':>10}")
for row in compare_spectra(ana, num).rows:
    print(f"{row.n:>2} {row.E_a:14.10f} {row.E_b:14.10f} {row.rel_diff:10.2e}")
# the ground level solves (E - 1) sqrt(E + 1) = 1, whose root is the golden ratio
print("E0 - (1 + sqrt 5)/2 =", ana.levels[0].E - (1 + 5**0.5) / 2)
