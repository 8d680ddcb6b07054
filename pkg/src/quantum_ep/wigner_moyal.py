"""Discrete Wigner and Weyl transforms on a periodic one-dimensional grid.

Grid
----
``N`` (even) position nodes ``x_j = (j - N/2) dx`` and momentum nodes
``p_k = (k - N/2) dp`` with ``N dx dp = 2 pi hbar``.  Operators act on the
position basis ``{|x_j>}``.

Transform
---------
For offset ``mu`` in ``[-N/2, N/2)`` (``y = mu dx``) the transform is

    W(x_j, p_k) = 1/(2 pi hbar) sum_mu K(j, mu) exp(-i p_k y / hbar)

with ``K(j, mu) = <x_j + y/2 | A | x_j - y/2>``.  Even offsets read matrix
elements of ``A`` directly (``<x_{j+mu/2}|A|x_{j-mu/2}>``, indices mod N).
Odd offsets land between nodes; they are read from ``T^dagger A T``, where
``T`` shifts by half a cell using the momentum band folded into
``[-N/4, N/4) dp``.  Folding makes ``T`` commute with parity, which keeps
the map exactly invertible.  The row ``mu = -N/2`` pairs ``A[j - N/4, j + N/4]``
with its Hermitian mirror, so it enters as ``Re K + Im K`` for Hermitian
``A``; general operators are handled through ``A = H1 + i H2``.

The map is linear, exactly invertible, real on Hermitian operators and
isometric: ``Tr(A B) = 2 pi hbar sum W_A W_B dx dp`` for Hermitian ``A, B``.
It integrates to the trace, ``sum W dx dp = Tr A``, so ``W(I) = 1/(2 pi hbar)``.

Weyl symbols
------------
The Weyl symbol is ``2 pi hbar W``: ``Q`` maps to ``x``, a momentum
multiplier ``g(P)`` maps to ``g(p)`` exactly.  The Moyal bracket is
defined on symbols, ``{{a, b}} = sigma([sigma^-1 a, sigma^-1 b]) / (i hbar)``,
so that ``dW/dt = {{h, W}}`` with ``h`` the Weyl symbol of ``H``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .hilbert import DensityMatrix, DimensionError, as_array, check_character
from .integrators import TimeGrid, Trajectory
from .schrodinger import solve_von_neumann

EDGE = 2  # nodes per edge excluded from pointwise interior checks


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Periodic phase-space grid with ``N dx dp = 2 pi hbar``."""

    N: int
    dx: float
    hbar: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 4 or self.N % 2:
            raise ValueError(f"N must be an even integer >= 4, got {self.N}")
        if not self.dx > 0 or not self.hbar > 0:
            raise ValueError("dx and hbar must be positive")
        object.__setattr__(self, "N", int(self.N))

    @property
    def dp(self) -> float:
        return 2.0 * np.pi * self.hbar / (self.N * self.dx)

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) * self.dx

    @property
    def p(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) * self.dp

    def mesh(self):
        """``(X, P)`` arrays indexed ``[x index, p index]``."""
        return np.meshgrid(self.x, self.p, indexing="ij")

    @property
    def cell(self) -> float:
        return self.dx * self.dp

    @cached_property
    def _tables(self):
        n = self.N
        mu = np.arange(n) - n // 2
        kp = np.arange(n) - n // 2
        fwd = np.exp(-2j * np.pi * np.outer(mu, kp) / n)
        q = np.fft.fftfreq(n) * n
        qf = ((q + n // 4) % (n // 2)) - n // 4
        t = np.exp(1j * np.pi * qf / n)
        T = np.fft.ifft(t[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)
        return mu, fwd, T

    def interior(self, edge: int = EDGE):
        """Index slices that drop ``edge`` nodes on every side."""
        s = slice(edge, self.N - edge)
        return s, s

    def momentum_operator(self) -> np.ndarray:
        """Spectral ``P`` whose Weyl symbol is exactly ``p_k``."""
        return momentum_function(self, lambda p: p)

    def position_operator(self) -> np.ndarray:
        return np.diag(self.x).astype(complex)

    def harmonic_hamiltonian(self, omega: float = 1.0, mass: float = 1.0) -> np.ndarray:
        """Operator with Weyl symbol ``p^2/(2m) + m omega^2 x^2 / 2``."""
        return (momentum_function(self, lambda p: p * p / (2 * mass))
                + np.diag(0.5 * mass * omega ** 2 * self.x ** 2))


@dataclass(frozen=True)
class WignerFunction:
    """Values on an N x N phase-space grid, indexed ``[x index, p index]``."""

    grid: PhaseSpaceGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, copy=True)
        n = self.grid.N
        if v.shape != (n, n):
            raise DimensionError(f"values have shape {v.shape}, grid needs {(n, n)}")
        if np.iscomplexobj(v) and not np.any(v.imag):
            v = v.real.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def integral(self) -> complex:
        """``sum W dx dp``."""
        s = self.values.sum() * self.grid.cell
        return float(s) if not np.iscomplexobj(s) else complex(s)

    def moments(self):
        """``(<x>, <p>)`` from the phase-space integrals."""
        X, P = self.grid.mesh()
        w = self.values.real
        c = self.grid.cell
        return float((X * w).sum() * c), float((P * w).sum() * c)

    def _check(self, other: "WignerFunction"):
        if other.grid != self.grid:
            raise DimensionError("Wigner functions live on different grids")

    def __add__(self, other):
        self._check(other)
        return WignerFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return WignerFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        return WignerFunction(self.grid, self.values * c)

    __rmul__ = __mul__


def _kernel(a: np.ndarray, grid: PhaseSpaceGrid) -> np.ndarray:
    n = grid.N
    mu, _, T = grid._tables
    b = T.conj().T @ a @ T
    j = np.arange(n)[:, None]
    k = np.empty((n, n), dtype=complex)
    ev = mu % 2 == 0
    me, mo = mu[ev], mu[~ev]
    k[:, ev] = a[(j + me // 2) % n, (j - me // 2) % n]
    k[:, ~ev] = b[(j + (mo + 1) // 2) % n, (j - (mo - 1) // 2) % n]
    return k


def _forward_hermitian(h: np.ndarray, grid: PhaseSpaceGrid) -> np.ndarray:
    _, fwd, _ = grid._tables
    k = _kernel(h, grid)
    k[:, 0] = k[:, 0].real + k[:, 0].imag
    w = (k @ fwd) / (2.0 * np.pi * grid.hbar)
    return w.real


def _inverse_real(w: np.ndarray, grid: PhaseSpaceGrid) -> np.ndarray:
    n = grid.N
    mu, fwd, T = grid._tables
    k = (2.0 * np.pi * grid.hbar / n) * (w @ fwd.conj().T)
    c = k[:, 0].real
    j = np.arange(n)
    jj = j[:, None]
    a = np.zeros((n, n), dtype=complex)
    bo = np.zeros((n, n), dtype=complex)
    odd = mu % 2 != 0
    ev = ~odd
    ev[0] = False  # mu = -N/2 is rebuilt from the Re/Im pairing below
    me, mo = mu[ev], mu[odd]
    a[(jj + me // 2) % n, (jj - me // 2) % n] = k[:, ev]
    cm = np.roll(c, -(n // 2))
    a[(j - n // 4) % n, (j + n // 4) % n] = 0.5 * (c + cm) + 0.5j * (c - cm)
    bo[(jj + (mo + 1) // 2) % n, (jj - (mo - 1) // 2) % n] = k[:, odd]
    return a + T @ bo @ T.conj().T


def wigner_transform(A, grid: PhaseSpaceGrid) -> WignerFunction:
    """Discrete Wigner transform of an operator in the position basis.

    Hermitian operators give real values; other operators give complex
    values through ``W(H1 + i H2) = W(H1) + i W(H2)``.
    """
    a = as_array(A)
    if a.shape != (grid.N, grid.N):
        raise DimensionError(f"operator has shape {a.shape}, grid needs {(grid.N, grid.N)}")
    h1 = 0.5 * (a + a.conj().T)
    h2 = -0.5j * (a - a.conj().T)
    w = _forward_hermitian(h1, grid)
    if np.any(h2):
        w = w + 1j * _forward_hermitian(h2, grid)
    return WignerFunction(grid, w)


def weyl_inverse(a: WignerFunction) -> np.ndarray:
    """Operator whose Wigner transform is ``a``; exact inverse of :func:`wigner_transform`."""
    v = a.values
    g = a.grid
    op = _inverse_real(np.real(v), g)
    if np.iscomplexobj(v) and np.any(v.imag):
        op = op + 1j * _inverse_real(np.imag(v), g)
    return op


def weyl_symbol(A, grid: PhaseSpaceGrid) -> WignerFunction:
    """Weyl symbol ``2 pi hbar W(A)``; ``Q -> x`` and ``P -> p``."""
    return wigner_transform(A, grid) * (2.0 * np.pi * grid.hbar)


def weyl_quantize(a: WignerFunction) -> np.ndarray:
    """Operator with Weyl symbol ``a`` (inverse of :func:`weyl_symbol`)."""
    return weyl_inverse(a) / (2.0 * np.pi * a.grid.hbar)


def symbol_from_function(grid: PhaseSpaceGrid, f) -> WignerFunction:
    """Sample ``f(x, p)`` on the grid."""
    X, P = grid.mesh()
    return WignerFunction(grid, np.asarray(f(X, P)) * np.ones_like(X))


def momentum_function(grid: PhaseSpaceGrid, g) -> np.ndarray:
    """Operator ``g(P)``: diagonal in the discrete Fourier basis with values ``g(p_k)``."""
    n = grid.N
    q = (np.fft.fftfreq(n) * n) * grid.dp
    vals = np.asarray(g(q), dtype=complex) * np.ones(n)
    return np.fft.ifft(vals[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)


def moyal_bracket(a: WignerFunction, b: WignerFunction) -> WignerFunction:
    """``{{a, b}} = sigma([sigma^-1 a, sigma^-1 b]) / (i hbar)`` on Weyl symbols."""
    a._check(b)
    g = a.grid
    A, B = weyl_quantize(a), weyl_quantize(b)
    c = (A @ B - B @ A) / (1j * g.hbar)
    if not (np.iscomplexobj(a.values) or np.iscomplexobj(b.values)):
        c = 0.5 * (c + c.conj().T)  # real symbols: drop rounding in the anti-Hermitian part
    return weyl_symbol(c, g)


def poisson_bracket(a: WignerFunction, b: WignerFunction) -> WignerFunction:
    """``da/dx db/dp - da/dp db/dx`` by second-order central differences.

    Edge rows and columns use one-sided differences; only interior values
    are meaningful for comparisons.
    """
    a._check(b)
    g = a.grid
    ax, ap = np.gradient(np.real(a.values), g.dx, g.dp)
    bx, bp = np.gradient(np.real(b.values), g.dx, g.dp)
    return WignerFunction(g, ax * bp - ap * bx)


def evolve_wigner(H, W0: WignerFunction, grid: TimeGrid, scheme: str = "midpoint") -> Trajectory:
    """Evolve ``W`` by pulling back the Liouville-von Neumann flow.

    The density matrix ``rho0 = weyl_inverse(W0)`` is evolved with
    :func:`solve_von_neumann` and each frame is transformed.
    """
    g = W0.grid
    h = check_character(H, "hermitian")
    rho0 = weyl_inverse(W0)
    rho0 = 0.5 * (rho0 + rho0.conj().T)
    DensityMatrix(rho0)
    traj = solve_von_neumann(h, rho0, grid, hbar=g.hbar, scheme=scheme)
    # the flow preserves Hermiticity; drop rounding so frames stay real
    return traj.map(lambda r: wigner_transform(0.5 * (r + r.conj().T), g))


def moyal_residual(H, traj: Trajectory, edge: int = EDGE) -> float:
    """Max interior ``|dW/dt - {{h, W}}|`` with ``dW/dt`` by central differences."""
    frames = traj.values
    g = frames[0].grid
    h = weyl_symbol(H, g)
    sx, sp = g.interior(edge)
    t = traj.times
    worst = 0.0
    for k in range(1, len(frames) - 1):
        wdot = (frames[k + 1].values - frames[k - 1].values) / (t[k + 1] - t[k - 1])
        mb = moyal_bracket(h, frames[k]).values
        worst = max(worst, float(np.max(np.abs(wdot - mb)[sx, sp])))
    return worst


def coherent_state(grid: PhaseSpaceGrid, x0: float, p0: float = 0.0, width: float = 1.0) -> np.ndarray:
    """Normalized Gaussian ``exp(-(x-x0)^2/(2 width^2 hbar) + i p0 x / hbar)`` on the nodes."""
    x = grid.x
    hb = grid.hbar
    psi = np.exp(-((x - x0) ** 2) / (2.0 * width ** 2 * hb) + 1j * p0 * x / hb)
    return psi / np.linalg.norm(psi)


def gaussian_wigner(grid: PhaseSpaceGrid, x0: float = 0.0, p0: float = 0.0) -> np.ndarray:
    """Continuum ``(1/(pi hbar)) exp(-((x-x0)^2 + (p-p0)^2)/hbar)`` on the grid."""
    X, P = grid.mesh()
    return np.exp(-((X - x0) ** 2 + (P - p0) ** 2) / grid.hbar) / (np.pi * grid.hbar)


def write_wigner_csv(path, w: WignerFunction) -> None:
    """CSV of ``(x, p, W)`` triples with 17 significant digits."""
    import csv

    X, P = w.grid.mesh()
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\r\n")
        wr.writerow(["x", "p", "W"])
        for xi, pi, vi in zip(X.ravel(), P.ravel(), np.real(w.values).ravel()):
            wr.writerow([f"{xi:.17g}", f"{pi:.17g}", f"{vi:.17g}"])


def write_pgm(path, w: WignerFunction, maxval: int = 255) -> None:
    """Binary PGM heat map; rows are momenta (top = largest ``p``), columns positions."""
    v = np.real(w.values).T[::-1]
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo if hi > lo else 1.0
    img = np.round((v - lo) / span * maxval).astype(np.uint8 if maxval < 256 else ">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode("ascii"))
        fh.write(img.tobytes())
