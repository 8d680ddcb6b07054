"""Hybrid classical-quantum dynamics and the Heisenberg-group structures behind it.

Conventions
-----------
``J = [[0, I], [-I, 0]]`` on ``R^{2n}`` with ``z = (q, p)``.  The Heisenberg
group multiplies as ``(g, a)(h, b) = (g + h, a + b + g.Jh/2)`` and its
algebra bracket is ``ad_(z1, f1)(z2, f2) = (0, -z1.Jz2)``.  Canonical
operators ``Z = (Q, P)`` come from truncated ladder matrices, and

    iota(zeta, phi) = -i (phi + zeta . J Z) / hbar,
    U_(h, phi) = exp(iota(h, phi)) = exp(-i phi / hbar) exp(-i h . J Z / hbar).

With these conventions ``U_g U_h = U_{gh}`` and ``iota(ad_a b) = [iota(b), iota(a)]``:
the bracket ``ad`` is the one of right-invariant vector fields, the opposite
of the matrix commutator.  Identities that hold only on L^2(R) are exact on
the low-energy block of the truncated space.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .hilbert import (
    UNITARY_TOL,
    CharacterError,
    DensityMatrix,
    as_array,
    check_character,
    expm_skew,
    unitarity_defect,
)
from .integrators import TimeGrid, Trajectory


def symplectic_matrix(n: int) -> np.ndarray:
    """``J = [[0, I], [-I, 0]]`` of size 2n."""
    i = np.eye(n)
    z = np.zeros((n, n))
    return np.block([[z, i], [-i, z]])


@dataclass(frozen=True)
class HeisenbergElement:
    """Group element ``(h, phi)``: phase-space translation ``h`` and phase ``phi``."""

    h: np.ndarray
    phi: float = 0.0

    def __post_init__(self):
        h = np.array(self.h, dtype=float).reshape(-1)
        if h.size % 2 or not np.all(np.isfinite(h)) or not np.isfinite(self.phi):
            raise ValueError("h must be a finite vector of even length and phi finite")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "phi", float(self.phi))

    @property
    def n(self) -> int:
        return self.h.size // 2

    @classmethod
    def identity(cls, n: int = 1) -> "HeisenbergElement":
        return cls(np.zeros(2 * n), 0.0)

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(-self.h, -self.phi)


@dataclass(frozen=True)
class HeisenbergAlgebraElement:
    """Algebra element ``(zeta, phi)``."""

    zeta: np.ndarray
    phi: float = 0.0

    def __post_init__(self):
        z = np.array(self.zeta, dtype=float).reshape(-1)
        if z.size % 2 or not np.all(np.isfinite(z)) or not np.isfinite(self.phi):
            raise ValueError("zeta must be a finite vector of even length and phi finite")
        z.setflags(write=False)
        object.__setattr__(self, "zeta", z)
        object.__setattr__(self, "phi", float(self.phi))


def symplectic_form(u, v) -> float:
    """``u . J v = u_q . v_p - u_p . v_q``; exactly antisymmetric in floating point."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    n = u.size // 2
    return float(u[:n] @ v[n:] - u[n:] @ v[:n])


def heisenberg_multiply(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    """``(g + h, a + b + g.Jh / 2)``."""
    if g.h.size != h.h.size:
        raise ValueError("Heisenberg elements of different dimension")
    return HeisenbergElement(g.h + h.h, g.phi + h.phi + 0.5 * symplectic_form(g.h, h.h))


def heisenberg_adjoint(h: HeisenbergElement, a: HeisenbergAlgebraElement) -> HeisenbergAlgebraElement:
    """``Ad_h (zeta, phi) = (zeta, phi + h.J zeta)``."""
    return HeisenbergAlgebraElement(a.zeta, a.phi + symplectic_form(h.h, a.zeta))


def heisenberg_ad(a: HeisenbergAlgebraElement, b: HeisenbergAlgebraElement) -> HeisenbergAlgebraElement:
    """``ad_a b = (0, -zeta_a . J zeta_b)``."""
    if a.zeta.size != b.zeta.size:
        raise ValueError("algebra elements of different dimension")
    return HeisenbergAlgebraElement(np.zeros_like(a.zeta), -symplectic_form(a.zeta, b.zeta))


def heisenberg_coadjoint(h: HeisenbergElement, nu: np.ndarray, alpha: float):
    """``Ad*_h (nu, alpha) = (nu - alpha J h, alpha)``."""
    J = symplectic_matrix(h.n)
    return np.asarray(nu, dtype=float) - alpha * J @ h.h, float(alpha)


class CanonicalOperators:
    """Truncated canonical operators for ``n`` degrees of freedom.

    For ``n > 1`` the Fock space is the tensor product of ``n`` copies of a
    ``fock_dim``-level oscillator.

    Attributes
    ----------
    Z : list of ndarray
        ``[Q_1..Q_n, P_1..P_n]`` with ``Q = sqrt(hbar/2)(a + a^+)`` and
        ``P = i sqrt(hbar/2)(a^+ - a)``.
    J : ndarray
        Symplectic matrix.
    """

    def __init__(self, fock_dim: int, hbar: float = 1.0, n: int = 1):
        if fock_dim < 2 or n < 1:
            raise ValueError("fock_dim must be >= 2 and n >= 1")
        self.fock_dim = int(fock_dim)
        self.hbar = float(hbar)
        self.n = int(n)
        a1 = np.diag(np.sqrt(np.arange(1, fock_dim)), 1).astype(complex)
        eye = np.eye(fock_dim)
        ladders = []
        for k in range(n):
            m = np.array([[1.0]])
            for j in range(n):
                m = np.kron(m, a1 if j == k else eye)
            ladders.append(m.astype(complex))
        s = np.sqrt(hbar / 2.0)
        self.a = ladders
        self.Q = [s * (a + a.conj().T) for a in ladders]
        self.P = [1j * s * (a.conj().T - a) for a in ladders]
        self.Z = self.Q + self.P
        self.J = symplectic_matrix(n)
        self.dim = fock_dim ** n

    def low_projector(self, fraction: float = 0.25) -> np.ndarray:
        """Projector on Fock states with every occupation below ``fraction * fock_dim``."""
        cut = max(1, int(self.fock_dim * fraction))
        occ = np.indices((self.fock_dim,) * self.n).reshape(self.n, -1)
        keep = np.all(occ < cut, axis=0).astype(float)
        return np.diag(keep).astype(complex)

    def JZ(self) -> list:
        """Components of ``J Z`` as operators."""
        return [sum(self.J[i, j] * self.Z[j] for j in range(2 * self.n) if self.J[i, j])
                for i in range(2 * self.n)]

    def dot_JZ(self, v) -> np.ndarray:
        """``v . J Z`` as an operator."""
        jz = self.JZ()
        return sum(float(c) * op for c, op in zip(np.asarray(v, dtype=float), jz))

    def commutator_defect(self, fraction: float = 0.5) -> float:
        """``||([Q, P] - i hbar) Pi||`` restricted to the low block."""
        pi = self.low_projector(fraction)
        worst = 0.0
        for q, p in zip(self.Q, self.P):
            c = q @ p - p @ q - 1j * self.hbar * np.eye(self.dim)
            worst = max(worst, np.linalg.norm(pi @ c @ pi))
        return float(worst)

    def expect(self, rho) -> np.ndarray:
        """``<Z|rho>`` as a real 2n-vector."""
        r = as_array(rho)
        return np.array([np.vdot(z, r).real for z in self.Z])

    def coherent_state(self, z0) -> np.ndarray:
        """Displaced vacuum with ``<Z> = z0`` (normalized after truncation)."""
        vac = np.zeros(self.dim, dtype=complex)
        vac[0] = 1.0
        u = displacement_operator(HeisenbergElement(np.asarray(z0, dtype=float)), self, check=False)
        v = u @ vac
        return v / np.linalg.norm(v)


def iota(a: HeisenbergAlgebraElement, ops: CanonicalOperators) -> np.ndarray:
    """``-i (phi + zeta . J Z) / hbar``."""
    if a.zeta.size != 2 * ops.n:
        raise ValueError("algebra element does not match the canonical operators")
    m = a.phi * np.eye(ops.dim) + ops.dot_JZ(a.zeta)
    return -1j * m / ops.hbar


def displacement_operator(h: HeisenbergElement, ops: CanonicalOperators, check: bool = True) -> np.ndarray:
    """``U_h = exp(-i phi / hbar) exp(-i h . J Z / hbar)`` on the truncated space.

    ``U_h Z U_h^dagger = Z - h`` on the low-energy block.
    """
    gen = iota(HeisenbergAlgebraElement(h.h, 0.0), ops)
    u = np.exp(-1j * h.phi / ops.hbar) * expm_skew(0.5 * (gen - gen.conj().T))
    if check and unitarity_defect(u) > UNITARY_TOL:
        raise CharacterError("displacement operator lost unitarity; increase fock_dim")
    return u


def iota_star(mu, ops: CanonicalOperators):
    """``(<mu, -i J Z / hbar>, Tr(i mu / hbar))``; the first entry is a 2n-vector."""
    m = check_character(mu, "skew_hermitian")
    jz = ops.JZ()
    first = np.array([np.vdot(m, -1j * op / ops.hbar).real for op in jz])
    second = float(np.real(np.trace(1j * m / ops.hbar)))
    return first, second


def hbar_pairing(nu_alpha, a: HeisenbergAlgebraElement) -> float:
    """``<(nu, alpha), (zeta, phi)> = nu.zeta + alpha phi``."""
    nu, alpha = nu_alpha
    return float(np.asarray(nu) @ a.zeta + alpha * a.phi)


SemidirectElement = tuple  # (HeisenbergElement, unitary ndarray)


def semidirect_multiply(a: SemidirectElement, b: SemidirectElement, ops: CanonicalOperators) -> SemidirectElement:
    """``(h1, U1)(h2, U2) = (h1 h2, U1 U_{h1} U2 U_{h1}^dagger)``."""
    h1, u1 = a
    h2, u2 = b
    uh = displacement_operator(h1, ops)
    return heisenberg_multiply(h1, h2), as_array(u1) @ uh @ as_array(u2) @ uh.conj().T


def semidirect_identity(ops: CanonicalOperators) -> SemidirectElement:
    return HeisenbergElement.identity(ops.n), np.eye(ops.dim, dtype=complex)


def semidirect_coadjoint(g: SemidirectElement, nu, alpha: float, mu, ops: CanonicalOperators):
    """Coadjoint action on ``((nu, alpha), mu)``.

    ``(nu - alpha J h + <mu - U^+ mu U, i J Z / hbar>, alpha, U_h^+ U^+ mu U U_h)``.

    Returns
    -------
    ((nu', alpha), mu')
    """
    h, u = g
    u = as_array(u)
    m = as_array(mu)
    uh = displacement_operator(h, ops)
    diff = m - u.conj().T @ m @ u
    jz = ops.JZ()
    shift = np.array([np.vdot(diff, 1j * op / ops.hbar).real for op in jz])
    nu_new = np.asarray(nu, dtype=float) - alpha * ops.J @ h.h + shift
    mu_new = uh.conj().T @ u.conj().T @ m @ u @ uh
    return (nu_new, float(alpha)), mu_new


def semidirect_action(g: SemidirectElement, z, rho, ops: CanonicalOperators):
    """``Phi_(h,U)(z, rho) = (z - h + <U Z U^+ - Z>, U_h^+ U^+ rho U U_h)``.

    Expectations are taken in ``rho``.
    """
    h, u = g
    u = as_array(u)
    r = as_array(rho)
    uh = displacement_operator(h, ops)
    shift = np.array([np.vdot(u @ zk @ u.conj().T - zk, r).real for zk in ops.Z])
    z_new = np.asarray(z, dtype=float) - h.h + shift
    return z_new, uh.conj().T @ u.conj().T @ r @ u @ uh


def semidirect_evolution(h: HeisenbergElement, U, z0, rho0, ops: CanonicalOperators):
    """``(z0 + h + <U^+ Z U - Z|rho0>, U_h U rho0 U^+ U_h^+)``.

    Along any curve ``(h(t), U(t))`` this keeps ``z - <Z|rho>`` equal to
    ``z0 - <Z|rho0>`` (exactly on L^2, to truncation error here).
    """
    u = as_array(U)
    r0 = as_array(rho0)
    uh = displacement_operator(h, ops)
    shift = np.array([np.vdot(u.conj().T @ zk @ u - zk, r0).real for zk in ops.Z])
    z = np.asarray(z0, dtype=float) + h.h + shift
    return z, uh @ u @ r0 @ u.conj().T @ uh.conj().T


# hybrid dynamics -------------------------------------------------------------

@dataclass(frozen=True)
class HybridState:
    """Classical point ``z`` and density matrix ``rho``."""

    z: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=float).reshape(-1)
        if z.size % 2 or not np.all(np.isfinite(z)):
            raise ValueError("z must be a finite vector of even length")
        r = DensityMatrix(as_array(self.rho)).entries
        z.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "rho", r)


class HybridHamiltonian:
    """Operator-valued ``H(z)`` with its gradient.

    ``grad`` may be omitted, in which case central differences with step
    ``1e-6 (1 + |z|)`` are used.  When both are available the analytic
    gradient is cross-checked against finite differences at ``z_check``.
    """

    def __init__(self, H: Callable, grad: Optional[Callable] = None, z_check=None,
                 check_tol: float = 1e-5):
        self.H = H
        self._grad = grad
        if grad is not None and z_check is not None:
            ga = [as_array(g) for g in grad(np.asarray(z_check, dtype=float))]
            gf = self._fd_grad(np.asarray(z_check, dtype=float))
            err = max(np.linalg.norm(a - b) / (1.0 + np.linalg.norm(b)) for a, b in zip(ga, gf))
            if err > check_tol:
                raise ValueError(f"analytic gradient disagrees with finite differences: {err:.3e}")

    def _fd_grad(self, z: np.ndarray) -> list:
        step = 1e-6 * (1.0 + np.linalg.norm(z))
        out = []
        for i in range(z.size):
            e = np.zeros_like(z)
            e[i] = step
            out.append((as_array(self.H(z + e)) - as_array(self.H(z - e))) / (2 * step))
        return out

    def __call__(self, z) -> np.ndarray:
        return as_array(self.H(np.asarray(z, dtype=float)))

    def grad(self, z) -> list:
        z = np.asarray(z, dtype=float)
        if self._grad is None:
            return self._fd_grad(z)
        return [as_array(g) for g in self._grad(z)]


def _mean_grad(rho: np.ndarray, grads: Sequence[np.ndarray]) -> np.ndarray:
    return np.array([np.vdot(rho, g).real for g in grads])


def mean_field_rhs(s: HybridState, H: HybridHamiltonian, hbar: float = 1.0):
    """``(J <rho|grad H(z)>, -i [H(z), rho] / hbar)``."""
    n = s.z.size // 2
    J = symplectic_matrix(n)
    h = H(s.z)
    zdot = J @ _mean_grad(s.rho, H.grad(s.z))
    return zdot, -1j * (h @ s.rho - s.rho @ h) / hbar


def ehrenfest_extended_rhs(s: HybridState, H: HybridHamiltonian, ops: CanonicalOperators, hbar: float = 1.0):
    """Extended Ehrenfest right-hand side.

    ``z' = J grad<rho|H(z)> - i <Z|[H(z), rho]> / hbar``,
    ``i hbar rho' = [H(z), rho] + grad<rho|H(z)> . [Z, rho]``.
    """
    n = s.z.size // 2
    J = symplectic_matrix(n)
    h = H(s.z)
    r = s.rho
    g = _mean_grad(r, H.grad(s.z))
    com = h @ r - r @ h
    w = np.array([(-1j / hbar * np.vdot(zk, com)).real for zk in ops.Z])
    heff = h + sum(gi * zk for gi, zk in zip(g, ops.Z))
    return J @ g + w, -1j * (heff @ r - r @ heff) / hbar


def _hermitize(m):
    return 0.5 * (m + m.conj().T)


class _Flow:
    """Shared midpoint machinery for the two hybrid flows."""

    def __init__(self, H: HybridHamiltonian, hbar: float, ops: Optional[CanonicalOperators], extended: bool):
        self.H = H
        self.hbar = hbar
        self.ops = ops
        self.extended = extended

    def parts(self, z, rho):
        """``(z velocity, Hermitian generator)`` at the given point."""
        n = z.size // 2
        J = symplectic_matrix(n)
        h = self.H(z)
        g = _mean_grad(rho, self.H.grad(z))
        zdot = J @ g
        if not self.extended:
            return zdot, _hermitize(h)
        com = h @ rho - rho @ h
        zdot = zdot + np.array([(-1j / self.hbar * np.vdot(zk, com)).real for zk in self.ops.Z])
        heff = h + sum(gi * zk for gi, zk in zip(g, self.ops.Z))
        return zdot, _hermitize(heff)

    def conj(self, heff, rho, dt):
        v = expm_skew(-1j * heff / self.hbar, dt)
        return _hermitize(v @ rho @ v.conj().T)

    def predictor(self, z, rho, dt):
        zd, he = self.parts(z, rho)
        zm = z + 0.5 * dt * zd
        rm = self.conj(he, rho, 0.5 * dt)
        zd, he = self.parts(zm, rm)
        return z + dt * zd, self.conj(he, rho, dt)

    def symmetric(self, z, rho, dt, tol=1e-15, maxiter=200):
        # implicit midpoint in z, conjugation by the midpoint generator in rho
        z1, r1 = self.predictor(z, rho, dt)
        for _ in range(maxiter):
            zm = 0.5 * (z + z1)
            rm = _hermitize(0.5 * (rho + r1))
            zd, he = self.parts(zm, rm)
            z_new = z + dt * zd
            r_new = self.conj(he, rho, dt)
            err = np.linalg.norm(z_new - z1) + np.linalg.norm(r_new - r1)
            z1, r1 = z_new, r_new
            if err <= tol * (1.0 + np.linalg.norm(z)):
                break
        return z1, r1


_YOSHIDA = (1.0 / (2.0 - 2.0 ** (1.0 / 3.0)),)
_YOSHIDA = (_YOSHIDA[0], 1.0 - 2.0 * _YOSHIDA[0], _YOSHIDA[0])


def _integrate(flow: _Flow, s0: HybridState, grid: TimeGrid, scheme: str) -> Trajectory:
    z, rho = np.array(s0.z), np.array(s0.rho)
    dt = grid.dt
    out = [s0]
    for _ in range(grid.steps):
        if scheme == "predictor":
            z, rho = flow.predictor(z, rho, dt)
        elif scheme == "symmetric":
            z, rho = flow.symmetric(z, rho, dt)
        elif scheme == "composition4":
            for c in _YOSHIDA:
                z, rho = flow.symmetric(z, rho, c * dt)
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        out.append(HybridState(z, rho))
    return Trajectory(grid.times(), out)


def integrate_mean_field(s0: HybridState, H: HybridHamiltonian, grid: TimeGrid, hbar: float = 1.0,
                         scheme: str = "composition4") -> Trajectory:
    """Mean-field flow ``z' = J <rho|grad H>``, ``i hbar rho' = [H(z), rho]``.

    Parameters
    ----------
    scheme : {'predictor', 'symmetric', 'composition4'}
        ``'predictor'`` is the explicit midpoint predictor (order 2);
        ``'symmetric'`` solves the implicit midpoint equations by fixed-point
        iteration (order 2, time reversible); ``'composition4'`` composes
        three symmetric steps into a fourth-order step.  ``rho`` is always
        advanced by unitary conjugation.
    """
    return _integrate(_Flow(H, hbar, None, False), s0, grid, scheme)


def integrate_ehrenfest_extended(s0: HybridState, H: HybridHamiltonian, ops: CanonicalOperators,
                                 grid: TimeGrid, hbar: float = 1.0,
                                 scheme: str = "composition4") -> Trajectory:
    """Extended Ehrenfest flow; ``rho`` is conjugated by ``H(z) + grad<rho|H>.Z``."""
    return _integrate(_Flow(H, hbar, ops, True), s0, grid, scheme)


def hybrid_energy(s: HybridState, H: HybridHamiltonian) -> float:
    """Total energy ``<rho|H(z)>``."""
    return float(np.vdot(s.rho, H(s.z)).real)


def consistency_constant(s: HybridState, ops: CanonicalOperators) -> np.ndarray:
    """``z - <Z|rho>``."""
    return s.z - ops.expect(s.rho)


def coupled_oscillator(ops: CanonicalOperators, coupling: float = 1.0, omega: float = 1.0,
                       classical_omega: Optional[float] = None) -> HybridHamiltonian:
    """``H(z) = omega (P^2 + Q^2)/2 + c x Q [+ classical oscillator energy]`` for n = 1."""
    q, p = ops.Q[0], ops.P[0]
    h0 = 0.5 * omega * (p @ p + q @ q)
    eye = np.eye(ops.dim)
    w = classical_omega

    def H(z):
        x, pz = z[0], z[1]
        h = h0 + coupling * x * q
        if w is not None:
            h = h + 0.5 * w * (x * x + pz * pz) * eye
        return h

    def grad(z):
        x, pz = z[0], z[1]
        gx = coupling * q + (w * x * eye if w is not None else 0.0 * eye)
        gp = (w * pz * eye) if w is not None else np.zeros_like(eye, dtype=complex)
        return [gx, gp]

    return HybridHamiltonian(H, grad, z_check=np.array([0.3, -0.2]))


def phase_type(h: Callable, grad_h: Callable, dim: int) -> HybridHamiltonian:
    """``H(z) = h(z) I``."""
    eye = np.eye(dim, dtype=complex)
    return HybridHamiltonian(lambda z: h(z) * eye, lambda z: [g * eye for g in grad_h(z)])


def adjoint_semidirect(g: SemidirectElement, zeta: HeisenbergAlgebraElement, xi, ops: CanonicalOperators):
    """``Ad_(h,U)(zeta, xi) = (Ad_h zeta, U U_h (xi + iota(zeta)) U_h^+ U^+ - iota(Ad_h zeta))``."""
    h, u = g
    u = as_array(u)
    uh = displacement_operator(h, ops)
    ad = heisenberg_adjoint(h, zeta)
    m = u @ uh @ (as_array(xi) + iota(zeta, ops)) @ uh.conj().T @ u.conj().T - iota(ad, ops)
    return ad, m
