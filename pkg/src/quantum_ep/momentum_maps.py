"""Momentum maps of the unitary group acting on pure states.

The dual of u(n) is identified with u(n) through ``<A, B> = Re Tr(A^dagger B)``,
so every momentum here is again a (skew-Hermitian) matrix.  ``rho0`` is
the projector on the reference state; ``U(n-1)`` is its isotropy group and
``U(1)`` acts by a phase on ``psi0`` only.
"""
from __future__ import annotations

import numpy as np

from .hilbert import UNITARY_TOL, CharacterError, as_array, check_character, require_pure, unitarity_defect


def momentum_map_pure(psi, hbar: float = 1.0) -> np.ndarray:
    """``J(psi) = -i hbar psi psi^dagger``."""
    v = as_array(psi).reshape(-1)
    return -1j * hbar * np.outer(v, v.conj())


def coadjoint(U, mu) -> np.ndarray:
    """``Ad*_U mu = U^dagger mu U``."""
    u = check_character(U, "unitary")
    m = as_array(mu)
    return u.conj().T @ m @ u


def isotropy_projection(mu, rho0) -> np.ndarray:
    """``(1 - rho0) mu (1 - rho0)``, the dual of the isotropy inclusion."""
    r = as_array(rho0)
    q = np.eye(r.shape[0]) - r
    return q @ as_array(mu) @ q


def j1(U, mu, rho0) -> np.ndarray:
    """``J1 = (1/2){1 - 2 rho0, m} + <rho0|m> rho0`` with ``m = U^dagger mu U``."""
    r = require_pure(rho0, "rho0")
    m = coadjoint(U, mu)
    a = np.eye(r.shape[0]) - 2.0 * r
    return 0.5 * (a @ m + m @ a) + np.vdot(r, m) * r


def j2(U, mu, rho0) -> float:
    """``J2 = i <rho0|U^dagger mu U>``; real for skew-Hermitian ``mu``."""
    r = require_pure(rho0, "rho0")
    val = 1j * np.vdot(r, coadjoint(U, mu))
    return float(val.real)


def total_momentum_map(U, mu, rho0):
    """The pair ``(J1, J2)`` for the action of ``U(n-1) x U(1)``."""
    return j1(U, mu, rho0), j2(U, mu, rho0)


def legendre_ep(dLdpsidot, psi) -> np.ndarray:
    """``dl/dxi = (1/2)(p psi^dagger - psi p^dagger)`` with ``p = dL/dpsidot``.

    ``p`` is the gradient of the Lagrangian in the velocity with respect to
    the real pairing ``Re(a^dagger b)`` on C^n.  With this convention the
    Dirac-Frenkel Lagrangian ``<psi, i hbar psi' - H psi>`` has
    ``p = -i hbar psi`` and the map returns ``-i hbar psi psi^dagger``.
    """
    p = as_array(dLdpsidot).reshape(-1)
    v = as_array(psi).reshape(-1)
    return 0.5 * (np.outer(p, v.conj()) - np.outer(v, p.conj()))


def dirac_frenkel_fiber_derivative(psi, hbar: float = 1.0) -> np.ndarray:
    """Velocity gradient of the Dirac-Frenkel Lagrangian, ``-i hbar psi``."""
    return -1j * hbar * as_array(psi).reshape(-1)


def fubini_study_fiber_derivative(psi, psidot, hbar: float = 1.0) -> np.ndarray:
    """Velocity gradient of the Fubini-Study Lagrangian at unit ``psi``.

    ``hbar (psi' - <psi|psi'> psi)``.
    """
    p = as_array(psi).reshape(-1)
    v = as_array(psidot).reshape(-1)
    return hbar * (v - np.vdot(p, v) * p)


def phase_momentum(psi, dLdpsidot) -> float:
    """``<psi, i dL/dpsidot>``, the U(1) momentum on the sphere."""
    v = as_array(psi).reshape(-1)
    p = as_array(dLdpsidot).reshape(-1)
    return float(np.vdot(v, 1j * p).real)


def diagonal_phase_momentum(mu, omega: float) -> float:
    """``omega + Tr(i mu)``, the momentum of ordinary global phase changes."""
    val = omega + np.trace(1j * as_array(mu))
    return float(np.real(val))


def mechanical_connection(U, Udot, rho0, bundle: str = "sphere") -> np.ndarray:
    """Mechanical connection evaluated on the velocity ``Udot``.

    With ``X = U^{-1} Udot`` (the left-translated velocity, equal to
    ``Ad_{U^{-1}} xi`` for ``xi = Udot U^{-1}``):

    * ``'sphere'``:      ``(1 - rho0) X (1 - rho0)``
    * ``'projective'``:  the above plus ``a rho0``, ``a = i <rho0|X>`` real.

    The scalar ``a`` is the coordinate of ``X`` along the U(1) direction
    ``-i rho0``, so on the Hopf bundle it equals ``<psi, i psi'>``.
    """
    u = check_character(U, "unitary")
    ud = as_array(Udot)
    xi = ud @ u.conj().T
    d = np.linalg.norm(xi + xi.conj().T)
    if d > 1e-10 * (1.0 + np.linalg.norm(xi)):
        raise CharacterError(f"Udot U^-1 is not skew-Hermitian: defect {d:.3e}")
    r = require_pure(rho0, "rho0")
    x = u.conj().T @ ud
    out = isotropy_projection(x, r)
    if bundle == "sphere":
        return out
    if bundle == "projective":
        a = (1j * np.vdot(r, x)).real
        return out + a * r
    raise ValueError(f"bundle must be 'sphere' or 'projective', got {bundle!r}")


def berry_connection(psi, psidot) -> float:
    """``<psi, i psi'> = Re(psi^dagger i psi')``."""
    v = as_array(psi).reshape(-1)
    return float(np.vdot(v, 1j * as_array(psidot).reshape(-1)).real)


def reference_projector(n: int, index: int = -1) -> np.ndarray:
    """Projector on a basis vector; the default last vector is ``(0,...,0,1)``."""
    r = np.zeros((n, n), dtype=complex)
    r[index, index] = 1.0
    return r


def embed_isotropy(block, rho0) -> np.ndarray:
    """Embed an (n-1)x(n-1) matrix acting on the complement of ``rho0``.

    The complement basis is the orthonormal basis of ``range(1 - rho0)``
    returned by :func:`complement_basis`.
    """
    b = complement_basis(rho0)
    return b @ as_array(block) @ b.conj().T


def complement_basis(rho0) -> np.ndarray:
    """n x (n-1) isometry onto ``range(1 - rho0)``."""
    r = as_array(rho0)
    w, v = np.linalg.eigh(np.eye(r.shape[0]) - 0.5 * (r + r.conj().T))
    return v[:, w > 0.5]


def embed_isotropy_group(V, rho0) -> np.ndarray:
    """Unitary equal to ``V`` on the complement of ``rho0`` and 1 on ``psi0``."""
    r = as_array(rho0)
    b = complement_basis(r)
    u = b @ as_array(V) @ b.conj().T + r
    if unitarity_defect(u) > UNITARY_TOL:
        raise CharacterError("embedded element is not unitary")
    return u
