"""Free motion on projective space follows great circles."""
import numpy as np

from quantum_ep.fubini_study import GeodesicState, fs_conserved, fs_geodesic, great_circle
from quantum_ep.integrators import TimeGrid


def main():
    e1, e2 = np.eye(3, dtype=complex)[:2]
    grid = TimeGrid(0.0, np.pi / 2, 200)
    traj = fs_geodesic(GeodesicState(e1, e2), grid)
    m0 = fs_conserved(traj.values[0])
    print(f"{'t':>6} {'|psi - circle|':>15} {'|M - M0|':>10}")
    for t, s in list(zip(grid.times(), traj.values))[::40]:
        err = np.linalg.norm(s.psi - great_circle(e1, e2, t))
        print(f"{t:6.3f} {err:15.2e} {np.linalg.norm(fs_conserved(s) - m0):10.2e}")


if __name__ == "__main__":
    main()
