"""Classical oscillator coupled to a quantum oscillator.

Compares the mean-field flow with the extended flow that also carries the
quantum position and momentum, and tracks the conserved energy of each.
"""
import numpy as np

from quantum_ep.hybrid import (
    CanonicalOperators,
    HybridState,
    consistency_constant,
    coupled_oscillator,
    hybrid_energy,
    integrate_ehrenfest_extended,
    integrate_mean_field,
)
from quantum_ep.integrators import TimeGrid


def main():
    ops = CanonicalOperators(16, 1.0)
    H = coupled_oscillator(ops, coupling=0.5, omega=1.0, classical_omega=1.0)
    psi = ops.coherent_state([0.5, 0.0])
    rho = np.outer(psi, psi.conj())
    grid = TimeGrid(0.0, 5.0, 500)
    mf = integrate_mean_field(HybridState([1.0, 0.0], rho), H, grid)
    ex = integrate_ehrenfest_extended(HybridState(ops.expect(rho), rho), H, ops, grid)
    c0 = consistency_constant(ex.values[0], ops)
    print(f"{'t':>5} {'q (mean field)':>15} {'E mf':>12} {'E ext':>12} {'|C - C0|':>10}")
    for i in range(0, 501, 100):
        a, b = mf.values[i], ex.values[i]
        drift = np.linalg.norm(consistency_constant(b, ops) - c0)
        print(f"{grid.times()[i]:5.1f} {a.z[0]:15.6f} {hybrid_energy(a, H):12.8f} {hybrid_energy(b, H):12.8f} {drift:10.2e}")


if __name__ == "__main__":
    main()
