"""Interaction picture: the split evolution reproduces the full density matrix."""
import numpy as np

from quantum_ep.heisenberg_dirac import dirac_flow, dirac_system_from_schrodinger
from quantum_ep.hilbert import random_hermitian, random_skew, random_state
from quantum_ep.integrators import TimeGrid
from quantum_ep.schrodinger import solve_von_neumann


def main():
    rng = np.random.default_rng(2)
    h0, h1 = random_hermitian(4, rng), 0.3 * random_hermitian(4, rng)
    psi0 = random_state(4, rng)
    k = random_skew(4, rng)
    grid = TimeGrid(0.0, 2.0, 400)
    traj = dirac_flow(dirac_system_from_schrodinger(h0, h1, psi0, lambda t: k * np.sin(t)), grid)
    ref = solve_von_neumann(h0 + h1, np.outer(psi0, psi0.conj()), grid, scheme="magnus4")
    print(f"{'t':>6} {'|rho - rho_ref|':>16} {'energies':>30}")
    for i in range(0, 401, 80):
        s = traj.values[i]
        gap = np.linalg.norm(s.state() - ref.values[i])
        print(f"{grid.times()[i]:6.2f} {gap:16.2e}   {np.array2string(np.asarray(s.energies()), precision=9)}")


if __name__ == "__main__":
    main()
