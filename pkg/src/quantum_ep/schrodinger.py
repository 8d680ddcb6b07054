"""Schrodinger-picture flows: gauge generators, pure and mixed states.

A pure state evolves as ``psi(t) = U(t) psi0`` where ``U`` is generated by
any skew-Hermitian ``xi`` with ``[i hbar xi - H, rho_psi] = 0``.  The
particular family implemented here is

    xi = -i H / hbar + {1 - 2 rho_psi, kappa}

with ``kappa`` an arbitrary skew-Hermitian gauge field.  The extra term
commutes with ``rho_psi`` and only changes the phase of ``psi``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .hilbert import (
    CharacterError,
    DensityMatrix,
    as_array,
    check_character,
    require_pure,
)
from .integrators import (
    TimeGrid,
    Trajectory,
    integrate_adjoint,
    integrate_isotropy_split,
    integrate_state_coupled,
)

GAUGE_RESIDUAL_TOL = 1e-10


def _as_time_function(x) -> Callable[[float], np.ndarray]:
    if callable(x):
        return lambda t: as_array(x(t))
    m = as_array(x)
    return lambda t: m


@dataclass(frozen=True)
class GaugeChoice:
    """Time-dependent skew-Hermitian gauge field ``kappa(t)``; zero by default."""

    kappa: Optional[Callable[[float], np.ndarray]] = None

    def at(self, t: float, n: int) -> np.ndarray:
        if self.kappa is None:
            return np.zeros((n, n), dtype=complex)
        k = as_array(self.kappa(t))
        check_character(k, "skew_hermitian")
        if k.shape != (n, n):
            raise CharacterError(f"gauge has shape {k.shape}, expected {(n, n)}")
        return k

    def alpha(self, t: float, rho, hbar: float = 1.0) -> float:
        """Phase rate ``2 hbar <i rho, kappa>`` entering ``i hbar psi' = H psi + alpha psi``."""
        r = as_array(rho)
        k = self.at(t, r.shape[0])
        return 2.0 * hbar * float(np.vdot(1j * r, k).real)

    @staticmethod
    def constant(kappa) -> "GaugeChoice":
        k = check_character(kappa, "skew_hermitian")
        return GaugeChoice(lambda t: k)


def isotropy_term(rho: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    """``{1 - 2 rho, kappa}``; commutes with ``rho`` whenever ``rho`` is a projector."""
    a = np.eye(rho.shape[0]) - 2.0 * rho
    return a @ kappa + kappa @ a


def gauge_generator(H, rho, kappa, hbar: float = 1.0) -> np.ndarray:
    """``xi = -i H / hbar + {1 - 2 rho, kappa}`` for a pure ``rho``.

    Before returning, ``||[i hbar xi - H, rho]||_F <= 1e-10`` is checked.

    Raises
    ------
    CharacterError
        If ``rho`` is not pure, ``H`` not Hermitian or ``kappa`` not skew.
    """
    h = check_character(H, "hermitian")
    r = require_pure(rho)
    k = check_character(kappa, "skew_hermitian")
    xi = -1j * h / hbar + isotropy_term(r, k)
    xi = 0.5 * (xi - xi.conj().T)
    c = 1j * hbar * xi - h
    res = np.linalg.norm(c @ r - r @ c)
    if res > GAUGE_RESIDUAL_TOL * (1.0 + np.linalg.norm(h) + hbar * np.linalg.norm(k)):
        raise CharacterError(f"gauge generator residual {res:.3e}: rho is not a projector")
    return xi


def _hamiltonian_fn(H) -> Callable[[float], np.ndarray]:
    f = _as_time_function(H)

    def g(t):
        return check_character(f(t), "hermitian")

    return g


def solve_schrodinger(H, psi0, gauge: Optional[GaugeChoice] = None, grid: TimeGrid = None,
                      hbar: float = 1.0, scheme: str = "midpoint", method: str = "split",
                      return_propagator: bool = False):
    """Integrate ``i hbar psi' = H psi + alpha psi`` in the chosen gauge.

    Parameters
    ----------
    H : array_like or callable
        Hermitian Hamiltonian, constant or a function of time.
    psi0 : StateVector or array_like
        Unit initial state.
    gauge : GaugeChoice, optional
        Gauge field ``kappa``; zero if omitted.
    method : {'split', 'predictor'}
        ``'split'`` separates the Hamiltonian and gauge parts symmetrically,
        so ``rho_psi(t)`` is independent of the gauge to rounding.
        ``'predictor'`` evaluates the full state-dependent generator with a
        midpoint predictor (order 2, gauge dependent at order ``dt^2``).
    return_propagator : bool
        Also return the propagator trajectory.

    Returns
    -------
    Trajectory of ndarray state vectors (and optionally the propagators).
    """
    if grid is None:
        raise ValueError("a TimeGrid is required")
    v0 = as_array(psi0).reshape(-1)
    if abs(np.vdot(v0, v0).real - 1.0) > 1e-10:
        raise CharacterError("psi0 must have unit norm")
    n = v0.shape[0]
    gauge = gauge or GaugeChoice()
    hf = _hamiltonian_fn(H)
    rho0 = np.outer(v0, v0.conj())

    if method == "split":
        base = lambda t: -1j * hf(t) / hbar
        gterm = lambda t, r: _skew(isotropy_term(r, gauge.at(t, n)))
        props = integrate_isotropy_split(base, gterm, np.eye(n), rho0, grid, scheme)
    elif method == "predictor":
        def gen(t, r):
            return _skew(-1j * hf(t) / hbar + isotropy_term(r, gauge.at(t, n)))
        props = integrate_state_coupled(gen, np.eye(n), rho0, grid)
    else:
        raise ValueError(f"unknown method {method!r}")
    states = props.map(lambda u: u @ v0)
    if return_propagator:
        return states, props
    return states


def _skew(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x - x.conj().T)


def solve_with_density_gauge(H, rho0, coefficients, grid: TimeGrid, hbar: float = 1.0,
                             scheme: str = "midpoint") -> Trajectory:
    """Mixed-state flow with ``xi = -i (H + sum_n c_n rho^n) / hbar``.

    Functions of ``rho`` commute with ``rho``, so the density-matrix path is
    that of the plain Liouville-von Neumann flow for any real ``c_n``.
    ``coefficients[j]`` multiplies ``rho^(j+1)``.
    """
    r0 = DensityMatrix(as_array(rho0)).entries
    n = r0.shape[0]
    hf = _hamiltonian_fn(H)
    cs = [float(c) for c in coefficients]

    def poly(t, r):
        acc = np.zeros_like(r)
        p = np.eye(n, dtype=complex)
        for c in cs:
            p = p @ r
            acc = acc + c * p
        return _skew(-1j * acc / hbar)

    props = integrate_isotropy_split(lambda t: -1j * hf(t) / hbar, poly, np.eye(n), r0, grid, scheme)
    return props.map(lambda u: u @ r0 @ u.conj().T)


def projective_residual(psi, psidot, H, hbar: float = 1.0) -> np.ndarray:
    """``(1 - psi psi^dagger)(i hbar psidot - H psi)`` for unit ``psi``."""
    v = as_array(psi).reshape(-1)
    vd = as_array(psidot).reshape(-1)
    h = check_character(H, "hermitian")
    w = 1j * hbar * vd - h @ v
    return w - v * np.vdot(v, w)


def solve_von_neumann(H, rho0, grid: TimeGrid, hbar: float = 1.0,
                      scheme: str = "midpoint") -> Trajectory:
    """Liouville-von Neumann flow ``i hbar rho' = [H, rho]`` by conjugation."""
    r0 = DensityMatrix(as_array(rho0)).entries
    hf = _hamiltonian_fn(H)
    return integrate_adjoint(lambda t: -1j * hf(t) / hbar, r0, grid, sign=1, scheme=scheme)


def finite_difference(traj: Trajectory) -> Trajectory:
    """Central differences in time at the interior samples of ``traj``."""
    vals = [as_array(v) for v in traj.values]
    t = traj.times
    out = [(vals[k + 1] - vals[k - 1]) / (t[k + 1] - t[k - 1]) for k in range(1, len(vals) - 1)]
    return Trajectory(t[1:-1], out)

