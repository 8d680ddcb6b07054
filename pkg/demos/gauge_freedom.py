"""Gauge freedom: the gauge changes the state vector but not the physical ray.

Run with ``python demos/gauge_freedom.py``.
"""
import numpy as np

from quantum_ep.hilbert import random_hermitian, random_skew, random_state
from quantum_ep.integrators import TimeGrid, piecewise_constant
from quantum_ep.schrodinger import GaugeChoice, solve_schrodinger


def main():
    rng = np.random.default_rng(0)
    h = random_hermitian(3, rng)
    psi0 = random_state(3, rng)
    grid = TimeGrid(0.0, 3.0, 600)

    plain = solve_schrodinger(h, psi0, grid=grid)
    mats = [random_skew(3, rng) for _ in range(4)]
    gauged = solve_schrodinger(h, psi0, GaugeChoice(piecewise_constant(np.linspace(0, 3, 4), mats)), grid=grid)

    # States differ by a unitary, but their projectors coincide.
    print(f"{'t':>6} {'|psi - psi_k|':>14} {'|P - P_k|':>12}")
    for i in range(0, 601, 100):
        a, b = plain.values[i], gauged.values[i]
        gap = np.linalg.norm(np.outer(a, a.conj()) - np.outer(b, b.conj()))
        print(f"{grid.times()[i]:6.2f} {np.linalg.norm(a - b):14.3e} {gap:12.3e}")


if __name__ == "__main__":
    main()
