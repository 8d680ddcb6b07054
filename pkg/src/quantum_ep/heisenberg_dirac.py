"""Heisenberg and Dirac (interaction) pictures with isotropy gauge terms.

Heisenberg picture
------------------
With ``U' = -i H U / hbar + U K(t)`` and ``K = {1 - 2 rho0, kappa}`` (or any
``K`` commuting with ``rho0``), the right-trivialized generator is
``xi_H = U^{-1} U' = -i H_H / hbar + K`` and

    H_H' = [H_H, K],     A_H' = (i/hbar)[H_H, A_H] - [K, A_H].

The propagator factorizes as ``U(t) = exp(-i H t / hbar) U0 W(t)`` with
``W' = W K``; every routine below uses that factorization.

Dirac picture
-------------
For ``H = H0 + H1`` let ``U0' = -i H0 U0 / hbar + U0 K`` and ``rho_I = U0^+ rho U0``,
``H_{j,I} = U0^+ H_j U0``.  Then

    rho_I' = [G, rho_I],  G = -i H_{1,I} / hbar - K,
    H_{j,I}' = [H_{j,I}, xi0],  xi0 = -i H_{0,I} / hbar + K.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .hilbert import (
    CharacterError,
    DensityMatrix,
    as_array,
    check_character,
    expm_skew,
    require_pure,
)
from .integrators import TimeGrid, Trajectory, integrate_adjoint, step_exponent
from .schrodinger import isotropy_term

GENERATOR_TOL = 1e-10


def _zero_kappa(n):
    z = np.zeros((n, n), dtype=complex)
    return lambda t: z


@dataclass(frozen=True)
class HeisenbergSystem:
    """Heisenberg Hamiltonian at ``t = 0``, fixed reference state and gauge.

    ``mode='pure'`` uses ``K = {1 - 2 rho0, kappa}`` and requires a pure
    ``rho0``.  ``mode='commuting'`` uses ``K = kappa`` directly and accepts a
    mixed ``rho0`` provided ``[kappa(t), rho0] = 0``.
    """

    H_H: np.ndarray
    rho0: np.ndarray
    kappa: Optional[Callable[[float], np.ndarray]] = None
    hbar: float = 1.0
    mode: str = "pure"

    def __post_init__(self):
        h = check_character(self.H_H, "hermitian")
        r = DensityMatrix(as_array(self.rho0)).entries
        if h.shape != r.shape:
            raise CharacterError("H_H and rho0 have different dimensions")
        if self.mode == "pure":
            require_pure(r, "rho0")
        elif self.mode != "commuting":
            raise ValueError("mode must be 'pure' or 'commuting'")
        object.__setattr__(self, "H_H", np.array(h))
        object.__setattr__(self, "rho0", np.array(r))
        if self.kappa is None:
            object.__setattr__(self, "kappa", _zero_kappa(h.shape[0]))

    @classmethod
    def mixed(cls, H_H, rho0, kappa, hbar: float = 1.0) -> "HeisenbergSystem":
        """System for a mixed ``rho0`` with a gauge commuting with it."""
        return cls(H_H, rho0, kappa, hbar, mode="commuting")

    @property
    def dim(self) -> int:
        return self.H_H.shape[0]

    def kappa_at(self, t: float) -> np.ndarray:
        k = check_character(self.kappa(t), "skew_hermitian")
        if self.mode == "commuting":
            c = np.linalg.norm(k @ self.rho0 - self.rho0 @ k)
            if c > GENERATOR_TOL * (1.0 + np.linalg.norm(k)):
                raise CharacterError(f"kappa does not commute with rho0 at t={t}: {c:.3e}")
        return k

    def gauge_term(self, t: float) -> np.ndarray:
        """``K(t)``, the part of ``xi_H`` that commutes with ``rho0``."""
        k = self.kappa_at(t)
        if self.mode == "commuting":
            return k
        g = isotropy_term(self.rho0, k)
        return 0.5 * (g - g.conj().T)


def heisenberg_generator(sys: HeisenbergSystem, t: float, H_H=None) -> np.ndarray:
    """``xi_H = -i H_H / hbar + K(t)``, checked against ``[i hbar xi_H - H_H, rho0] = 0``.

    ``H_H`` defaults to the system's initial Heisenberg Hamiltonian.
    """
    h = sys.H_H if H_H is None else check_character(H_H, "hermitian")
    xi = -1j * h / sys.hbar + sys.gauge_term(t)
    c = 1j * sys.hbar * xi - h
    res = np.linalg.norm(c @ sys.rho0 - sys.rho0 @ c)
    if res > GENERATOR_TOL * (1.0 + np.linalg.norm(h)):
        raise CharacterError(f"Heisenberg generator residual {res:.3e}")
    return xi


def evolve_heisenberg(sys: HeisenbergSystem, grid: TimeGrid, scheme: str = "midpoint") -> Trajectory:
    """``H_H' = [H_H, K]`` integrated by conjugation."""
    return integrate_adjoint(sys.gauge_term, sys.H_H, grid, sign=-1, scheme=scheme)


def _right_factor(sys: HeisenbergSystem, grid: TimeGrid, scheme: str):
    """``W_k`` with ``W' = W K``, ``W(t0) = I``, on the grid."""
    dt = grid.dt
    times = grid.times()
    w = np.eye(sys.dim, dtype=complex)
    out = [w.copy()]
    for k in range(grid.steps):
        w = w @ expm_skew(step_exponent(sys.gauge_term, times[k], dt, scheme))
        out.append(w)
    return out


def propagator_from_heisenberg(sys: HeisenbergSystem, U0=None, grid: TimeGrid = None,
                               scheme: str = "midpoint") -> Trajectory:
    """Integrate ``U' = U xi_H`` with ``xi_H`` from :func:`heisenberg_generator`.

    The Schrodinger Hamiltonian is ``H = U0 H_H(0) U0^dagger`` and the
    propagator is advanced as ``U_{k+1} = exp(-i dt H / hbar) U_k exp(Omega_K)``.
    """
    n = sys.dim
    u0 = np.eye(n, dtype=complex) if U0 is None else check_character(U0, "unitary")
    h = u0 @ sys.H_H @ u0.conj().T
    free = expm_skew(-1j * h / sys.hbar, grid.dt)
    w = _right_factor(sys, grid, scheme)
    out = []
    left = np.eye(n, dtype=complex)
    for k in range(grid.steps + 1):
        out.append(left @ u0 @ w[k])
        left = free @ left
    return Trajectory(grid.times(), out)


def evolve_observable(A0, sys: HeisenbergSystem, grid: TimeGrid, scheme: str = "midpoint") -> Trajectory:
    """``A_H(t) = U(t)^dagger A0 U(t)``, solving ``A_H' = (i/hbar)[H_H, A_H] - [K, A_H]``."""
    a = check_character(A0, "hermitian")
    props = propagator_from_heisenberg(sys, None, grid, scheme)
    return props.map(lambda u: u.conj().T @ a @ u)


def fs_heisenberg_residual(xiH, xiHdot, rho0) -> np.ndarray:
    """``{xi', rho0} - 2<rho0|xi'> rho0 + [xi^2 - 2<rho0|xi> xi, rho0]``."""
    x = as_array(xiH)
    xd = as_array(xiHdot)
    r = require_pure(rho0, "rho0")
    a = x @ x - 2.0 * np.vdot(r, x) * x
    return xd @ r + r @ xd - 2.0 * np.vdot(r, xd) * r + a @ r - r @ a


def oscillator_heisenberg(omega: float, fock_dim: int, hbar: float = 1.0):
    """``H_H = hbar omega a^dagger a`` on a truncated Fock space with its ladder operator."""
    a = np.diag(np.sqrt(np.arange(1, fock_dim)), 1).astype(complex)
    return hbar * omega * (a.conj().T @ a), a


# Dirac picture -------------------------------------------------------------

@dataclass(frozen=True)
class DiracSystem:
    """Interaction-picture snapshot.

    ``U0`` is the free propagator at time ``t`` (identity at the start) so
    that the Schrodinger state is recovered as ``U0 rhoI U0^dagger``.
    """

    H0I: np.ndarray
    H1I: np.ndarray
    rhoI: np.ndarray
    rho_bar0: np.ndarray
    kappa: Optional[Callable[[float], np.ndarray]] = None
    hbar: float = 1.0
    U0: Optional[np.ndarray] = None
    t: float = 0.0

    def __post_init__(self):
        h0 = check_character(self.H0I, "hermitian")
        h1 = check_character(self.H1I, "hermitian")
        rI = require_pure(self.rhoI, "rhoI")
        rb = require_pure(self.rho_bar0, "rho_bar0")
        if not (h0.shape == h1.shape == rI.shape == rb.shape):
            raise CharacterError("Dirac system components have inconsistent dimensions")
        u0 = np.eye(h0.shape[0], dtype=complex) if self.U0 is None else check_character(self.U0, "unitary")
        for name, v in (("H0I", h0), ("H1I", h1), ("rhoI", rI), ("rho_bar0", rb), ("U0", u0)):
            object.__setattr__(self, name, np.array(v))
        if self.kappa is None:
            object.__setattr__(self, "kappa", _zero_kappa(h0.shape[0]))

    @property
    def dim(self) -> int:
        return self.H0I.shape[0]

    def gauge_term(self, t: float) -> np.ndarray:
        g = isotropy_term(self.rho_bar0, check_character(self.kappa(t), "skew_hermitian"))
        return 0.5 * (g - g.conj().T)

    def state(self) -> np.ndarray:
        """Schrodinger-picture density matrix ``U0 rhoI U0^dagger``."""
        return self.U0 @ self.rhoI @ self.U0.conj().T

    def energies(self):
        """``(<rhoI|H0I + H1I>, <rho_bar0|H0I>)``."""
        e_tot = np.vdot(self.rhoI, self.H0I + self.H1I).real
        e_free = np.vdot(self.rho_bar0, self.H0I).real
        return float(e_tot), float(e_free)


def dirac_generator(sys: DiracSystem, t: float) -> np.ndarray:
    """``xi0 = -i H0I / hbar + {1 - 2 rho_bar0, kappa}``."""
    return -1j * sys.H0I / sys.hbar + sys.gauge_term(t)


def dirac_flow(sys: DiracSystem, grid: TimeGrid, scheme: str = "magnus4") -> Trajectory:
    """Integrate the interaction-picture system by conjugation.

    ``U0`` is advanced as ``exp(-i dt H0 / hbar) U0 exp(Omega_K)`` with the
    Schrodinger ``H0 = U0 H0I U0^dagger`` fixed at the start.  ``H_{j,I}``
    are conjugates of the Schrodinger operators and ``rhoI`` is stepped by
    ``exp(Omega_G)`` for ``G = -i H1I(t) / hbar - K(t)``, with ``U0`` at the
    intermediate nodes obtained from the same factorization.
    """
    hb = sys.hbar
    u_start = sys.U0
    h0 = u_start @ sys.H0I @ u_start.conj().T
    h1 = u_start @ sys.H1I @ u_start.conj().T
    t0 = grid.t0
    dt = grid.dt
    times = grid.times()

    w = np.eye(sys.dim, dtype=complex)
    w_t = t0

    def u_at(t):
        # free factor exact, gauge factor advanced from the last grid node
        left = expm_skew(-1j * h0 / hb, t - t0)
        tau = t - w_t
        wk = w if tau == 0 else w @ expm_skew(step_exponent(sys.gauge_term, w_t, tau, "midpoint"))
        return left @ u_start @ wk

    def g_of(t):
        u = u_at(t)
        h1i = u.conj().T @ h1 @ u
        g = -1j * h1i / hb - sys.gauge_term(t)
        return 0.5 * (g - g.conj().T)

    rho = sys.rhoI.copy()
    out = [sys]
    for k in range(grid.steps):
        v = expm_skew(step_exponent(g_of, times[k], dt, scheme))
        rho = v @ rho @ v.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        w = w @ expm_skew(step_exponent(sys.gauge_term, times[k], dt, scheme))
        w_t = times[k + 1]
        u = expm_skew(-1j * h0 / hb, w_t - t0) @ u_start @ w
        snap = replace(sys, H0I=u.conj().T @ h0 @ u, H1I=u.conj().T @ h1 @ u,
                       rhoI=rho, U0=u, t=float(w_t))
        out.append(snap)
    return Trajectory(times, out)


def dirac_system_from_schrodinger(H0, H1, psi0, kappa=None, hbar: float = 1.0, psi_bar0=None) -> DiracSystem:
    """Initial interaction-picture data with ``U0(0) = I``.

    ``psi_bar0`` (the reference state of the free propagator) defaults to
    ``psi0``.
    """
    v = as_array(psi0).reshape(-1)
    vb = v if psi_bar0 is None else as_array(psi_bar0).reshape(-1)
    return DiracSystem(as_array(H0), as_array(H1), np.outer(v, v.conj()),
                       np.outer(vb, vb.conj()), kappa, hbar)
