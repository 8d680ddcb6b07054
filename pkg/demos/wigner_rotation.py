"""A coherent state's Wigner function rotates rigidly under the harmonic oscillator."""
import numpy as np

from quantum_ep.integrators import TimeGrid
from quantum_ep.wigner_moyal import PhaseSpaceGrid, coherent_state, evolve_wigner, moyal_residual, wigner_transform


def main():
    g = PhaseSpaceGrid(32, np.sqrt(2 * np.pi / 32))
    h = g.harmonic_hamiltonian()
    psi = coherent_state(g, 1.5, 0.0)
    w0 = wigner_transform(np.outer(psi, psi.conj()), g)
    grid = TimeGrid(0.0, 2.0, 800)
    traj = evolve_wigner(h, w0, grid)
    print(f"{'t':>6} {'<x>':>9} {'<p>':>9} {'integral':>12}")
    for t, w in list(zip(grid.times(), traj.values))[::160]:
        x, p = w.moments()
        print(f"{t:6.2f} {x:9.5f} {p:9.5f} {w.integral():12.9f}")
    print(f"Moyal residual: {moyal_residual(h, traj):.2e}")


if __name__ == "__main__":
    main()
