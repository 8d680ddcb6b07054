"""Conserved momentum maps along a gauge-extended Schrodinger flow.

The left momentum map vanishes identically and the phase momentum stays at
hbar times the squared norm.
"""
import numpy as np

from quantum_ep.hilbert import random_hermitian, random_skew, random_state
from quantum_ep.integrators import TimeGrid
from quantum_ep.momentum_maps import dirac_frenkel_fiber_derivative, j1, j2, legendre_ep
from quantum_ep.schrodinger import GaugeChoice, solve_schrodinger


def main():
    rng = np.random.default_rng(1)
    hbar = 0.8
    h = random_hermitian(4, rng)
    psi0 = random_state(4, rng)
    rho0 = np.outer(psi0, psi0.conj())
    grid = TimeGrid(0.0, 2.0, 400)
    states, props = solve_schrodinger(h, psi0, GaugeChoice.constant(random_skew(4, rng)), grid,
                                      hbar=hbar, return_propagator=True)
    print(f"{'t':>6} {'||J1||':>10} {'J2':>12}")
    for i in range(0, 401, 80):
        u, psi = props.values[i], states.values[i]
        mu = legendre_ep(dirac_frenkel_fiber_derivative(psi, hbar), psi)
        print(f"{grid.times()[i]:6.2f} {np.linalg.norm(j1(u, mu, rho0)):10.2e} {j2(u, mu, rho0):12.9f}")
    print(f"hbar = {hbar}")


if __name__ == "__main__":
    main()
