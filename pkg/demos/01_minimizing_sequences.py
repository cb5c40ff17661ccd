"""Explicit minimizing families and their energy decay.

Three classical constructions drive their energies to the infimum with
bounded slopes: a linear ramp splicing into sqrt(t), a tent flattened
around its kink, and a sawtooth squeezed toward zero.
"""

from lavlab import catalog, energy, plateau_tent, sawtooth, sqrt_ramp

print("ramp + sqrt under (2 y y' - 1)^2   [energy <= 3/n, exact ramp part 1/(3n)]")
spec = catalog("sqrt_chain")
for n in (10, 100, 1000):
    e = energy(spec, sqrt_ramp(n)).value
    print(f"  n={n:5d}  F={e:.6e}   3/n={3 / n:.3e}")

print("\nflattened tent under (v^2 - 1)^2   [energy = 2/n exactly]")
spec = catalog("quartic")
for n in (10, 100, 1000):
    e = energy(spec, plateau_tent(n)).value
    print(f"  n={n:5d}  F={e:.6e}   2/n={2 / n:.3e}")

print("\nsawtooth under (v^2 - 1)^2 + y^2   [energy = 1/(12 n^2) exactly]")
spec = catalog("quartic_plus_square")
for n in (10, 100, 1000):
    e = energy(spec, sawtooth(n)).value
    print(f"  n={n:5d}  F={e:.6e}   1/(12n^2)={1 / (12 * n * n):.3e}")

print("\nThe infimum of the sawtooth problem is 0 but no trajectory attains it:")
print("zero energy would force y = 0 with |y'| = 1 a.e., which is impossible.")
