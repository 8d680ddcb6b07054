"""Fubini-Study Lagrangian, its reduced form and projective geodesics.

For a unit vector the geodesic equation of the Fubini-Study metric, with
the Lagrange multiplier that keeps ``||psi|| = 1``, reads

    psi'' = 2 s psi' + c psi,   s = <psi|psi'>,   c = -||psi'||^2 - 2 s^2.

Along a solution ``s`` is constant and the skew-Hermitian operator

    M = psi' psi^dagger - psi psi'^dagger - 2 s psi psi^dagger

is conserved.  Since ``psi' = (M + s) psi``, every geodesic is the orbit
``psi(t) = exp(t (M + s)) psi(0)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import CharacterError, as_array, check_character, expm_skew, require_pure
from .integrators import TimeGrid, Trajectory


@dataclass(frozen=True)
class GeodesicState:
    """Position ``psi`` and velocity ``psidot`` on the sphere."""

    psi: np.ndarray
    psidot: np.ndarray

    def __post_init__(self):
        p = np.array(as_array(self.psi), dtype=complex).reshape(-1)
        v = np.array(as_array(self.psidot), dtype=complex).reshape(-1)
        if p.shape != v.shape:
            raise ValueError("psi and psidot must have the same dimension")
        if np.linalg.norm(p) <= 1e-12:
            raise ValueError("psi must be nonzero")
        p.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "psi", p)
        object.__setattr__(self, "psidot", v)

    @property
    def horizontal_defect(self) -> float:
        return abs(np.vdot(self.psi, self.psidot))


def fs_lagrangian(s: GeodesicState, hbar: float = 1.0) -> float:
    """``(hbar/2)(||psi||^2 ||psi'||^2 - |<psi'|psi>|^2) / ||psi||^4``."""
    p, v = s.psi, s.psidot
    n2 = np.vdot(p, p).real
    val = 0.5 * hbar * (n2 * np.vdot(v, v).real - abs(np.vdot(v, p)) ** 2) / n2 ** 2
    return float(max(val, 0.0))


def fs_reduced_lagrangian(xi, rho) -> float:
    """``-(1/2)(<rho, xi^2> + <rho, i xi>^2)`` with ``hbar = 1``.

    This is the variance of ``E = i xi`` in the pure state ``rho``.
    """
    x = check_character(xi, "skew_hermitian")
    r = require_pure(rho)
    a = np.vdot(r, x @ x).real
    b = np.vdot(r, 1j * x).real
    return float(-0.5 * (a + b * b))


def fs_variational_derivatives(xi, rho):
    """``(dl/drho, dl/dxi) = (-xi^2/2 + <rho|xi> xi, {rho, xi}/2 - <rho|xi> rho)``.

    ``<rho|xi> = Tr(rho xi)`` is purely imaginary.  Both derivatives are taken
    with respect to the real pairing ``Re Tr(A^dagger B)``.
    """
    x = as_array(xi)
    r = as_array(rho)
    m = np.trace(r @ x)
    d_rho = -0.5 * x @ x + m * x
    d_xi = 0.5 * (r @ x + x @ r) - m * r
    return d_rho, d_xi


def fs_conserved(s: GeodesicState) -> np.ndarray:
    """``M = psi' psi^dagger - psi psi'^dagger - 2 <psi|psi'> psi psi^dagger``."""
    p, v = s.psi, s.psidot
    sv = np.vdot(p, v)
    return np.outer(v, p.conj()) - np.outer(p, v.conj()) - 2.0 * sv * np.outer(p, p.conj())


def geodesic_acceleration(psi: np.ndarray, psidot: np.ndarray) -> np.ndarray:
    """Right-hand side ``2 s psi' + c psi`` of the constrained geodesic equation."""
    s = np.vdot(psi, psidot)
    c = -np.vdot(psidot, psidot).real - 2.0 * s * s
    return 2.0 * s * psidot + c * psi


def geodesic_residual(psi, psidot, psiddot) -> np.ndarray:
    """``(1 - psi psi^dagger)(psi'' - 2 <psi|psi'> psi')`` for unit ``psi``."""
    p = as_array(psi).reshape(-1)
    w = as_array(psiddot).reshape(-1) - 2.0 * np.vdot(p, as_array(psidot).reshape(-1)) * as_array(psidot).reshape(-1)
    return w - p * np.vdot(p, w)


def fs_geodesic(s0: GeodesicState, grid: TimeGrid, method: str = "lie") -> Trajectory:
    """Integrate the Fubini-Study geodesic through ``s0``.

    Parameters
    ----------
    method : {'lie', 'midpoint'}
        ``'lie'`` advances ``psi <- exp(dt (M + s)) psi`` with ``M`` and ``s``
        recomputed from the current state, which is exact for this equation
        up to rounding.  ``'midpoint'`` applies the implicit midpoint rule to
        the first-order system ``(psi, psi')`` followed by renormalization of
        ``psi`` and removal of the radial velocity component.

    Returns
    -------
    Trajectory of GeodesicState
    """
    p = s0.psi
    if abs(np.vdot(p, p).real - 1.0) > 1e-10:
        raise CharacterError("initial psi must have unit norm")
    if s0.horizontal_defect > 1e-12:
        warnings.warn("initial velocity is not horizontal; FS distances assume <psi|psi'> = 0",
                      stacklevel=2)
    dt = grid.dt
    psi, v = p.copy(), s0.psidot.copy()
    out = [s0]
    if method == "lie":
        for _ in range(grid.steps):
            s = np.vdot(psi, v)
            gen = fs_conserved(GeodesicState(psi, v)) + s * np.eye(len(psi))
            gen = 0.5 * (gen - gen.conj().T)
            psi = expm_skew(gen, dt) @ psi
            v = gen @ psi
            out.append(GeodesicState(psi, v))
    elif method == "midpoint":
        for _ in range(grid.steps):
            psi, v = _midpoint_step(psi, v, dt)
            out.append(GeodesicState(psi, v))
    else:
        raise ValueError(f"unknown method {method!r}")
    return Trajectory(grid.times(), out)


def _midpoint_step(psi, v, dt, tol=1e-15, maxiter=100):
    p1, v1 = psi.copy(), v.copy()
    for _ in range(maxiter):
        pm, vm = 0.5 * (psi + p1), 0.5 * (v + v1)
        p_new = psi + dt * vm
        v_new = v + dt * geodesic_acceleration(pm, vm)
        err = np.linalg.norm(p_new - p1) + np.linalg.norm(v_new - v1)
        p1, v1 = p_new, v_new
        if err <= tol * (1.0 + np.linalg.norm(v)):
            break
    # project back onto the sphere and its tangent space at psi
    p1 = p1 / np.linalg.norm(p1)
    v1 = v1 - np.vdot(p1, v1).real * p1
    return p1, v1


def great_circle(e1: np.ndarray, e2: np.ndarray, t) -> np.ndarray:
    """``cos(t) e1 + sin(t) e2`` for orthonormal ``e1, e2``."""
    t = np.asarray(t, dtype=float)
    return np.cos(t)[..., None] * e1 + np.sin(t)[..., None] * e2


def closed_form_geodesic(psi0, v0, t) -> np.ndarray:
    """Closed-form solution ``e^{ibt}(cos(wt) psi0 + sin(wt)/w (v0 - i b psi0))``.

    Here ``<psi0|v0> = i b`` and ``w = sqrt(||v0||^2 - b^2)``.
    """
    p = as_array(psi0).reshape(-1)
    v = as_array(v0).reshape(-1)
    b = np.vdot(p, v).imag
    w = np.sqrt(max(np.vdot(v, v).real - b * b, 0.0))
    sinc = t if w == 0 else np.sin(w * t) / w
    return np.exp(1j * b * t) * (np.cos(w * t) * p + sinc * (v - 1j * b * p))
