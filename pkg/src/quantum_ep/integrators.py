"""Structure-preserving time stepping on the unitary group.

All schemes here advance a unitary propagator by multiplying with matrix
exponentials of skew-Hermitian generators, so unitarity and spectra are
kept to rounding error regardless of the step size.

Schemes
-------
``midpoint``
    Exponential midpoint rule, ``exp(dt * xi(t + dt/2))``, order 2.
``magnus4``
    Fourth-order Magnus step with two Gauss-Legendre nodes.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence

import numpy as np

from .hilbert import (
    CharacterError,
    HERMITIAN_TOL,
    UNITARY_TOL,
    as_array,
    expm_skew,
    skewness_defect,
    unitarity_defect,
)

Generator = Callable[[float], np.ndarray]

_GAUSS_OFFSET = np.sqrt(3.0) / 6.0


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t0 < t1`` split into ``steps`` equal intervals."""

    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise ValueError("time grid bounds must be finite")
        if not self.t1 > self.t0:
            raise ValueError(f"t1 must exceed t0, got t0={self.t0}, t1={self.t1}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.steps

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps + 1)


class Trajectory:
    """Sampled values on a time grid.

    ``values`` is a list (one entry per time) so that it can hold matrices,
    vectors or composite snapshots alike.
    """

    def __init__(self, times: Sequence[float], values: Sequence):
        t = np.asarray(times, dtype=float)
        if t.ndim != 1 or len(t) != len(values):
            raise ValueError("times and values must have equal length")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        t.setflags(write=False)
        self.times = t
        self.values = list(values)

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    @property
    def final(self):
        return self.values[-1]

    def stack(self) -> np.ndarray:
        return np.stack([as_array(v) for v in self.values])

    def map(self, f: Callable) -> "Trajectory":
        return Trajectory(self.times, [f(v) for v in self.values])


def flat_columns(name: str, shape: tuple) -> List[str]:
    """Column names ``re_name[i,j]`` / ``im_name[i,j]`` for a flattened array."""
    idx = [",".join(map(str, ix)) for ix in np.ndindex(*shape)]
    return [f"re_{name}[{i}]" for i in idx] + [f"im_{name}[{i}]" for i in idx]


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_trajectory_csv(path, traj: Trajectory, name: str = "x") -> None:
    """Write ``time`` plus flattened real and imaginary parts, 17 digits."""
    arrs = [as_array(v) for v in traj.values]
    shape = arrs[0].shape
    header = ["time"] + flat_columns(name, shape)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for t, a in zip(traj.times, arrs):
            flat = a.reshape(-1)
            w.writerow([format_float(t)] + [format_float(v) for v in flat.real]
                       + [format_float(v) for v in flat.imag])


def read_trajectory_csv(path) -> Trajectory:
    """Inverse of :func:`write_trajectory_csv`; returns flat complex rows."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: trajectory has no rows")
    header, body = rows[0], rows[1:]
    m = (len(header) - 1) // 2
    times = [float(r[0]) for r in body]
    vals = [np.array([float(v) for v in r[1:1 + m]]) + 1j * np.array([float(v) for v in r[1 + m:]])
            for r in body]
    return Trajectory(times, vals)


# generator checks ----------------------------------------------------------

def checked_generator(gen: Callable[[float], object]) -> Generator:
    """Wrap ``gen`` so every evaluation is validated as skew-Hermitian."""

    def wrapped(t: float) -> np.ndarray:
        x = as_array(gen(t))
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise CharacterError(f"generator returned shape {x.shape} at t={t}")
        d = skewness_defect(x)
        if d > HERMITIAN_TOL * (1.0 + np.linalg.norm(x)):
            raise CharacterError(f"generator is not skew-Hermitian at t={t}: defect {d:.3e}")
        return x

    return wrapped


def constant_generator(xi) -> Generator:
    x = as_array(xi)
    return lambda t: x


def _check_unitary(u: np.ndarray, what: str, tol: float = UNITARY_TOL) -> None:
    d = unitarity_defect(u)
    if d > tol:
        raise CharacterError(f"{what} is not unitary: defect {d:.3e}")


def step_exponent(gen: Generator, t: float, dt: float, scheme: str = "midpoint") -> np.ndarray:
    """Skew-Hermitian exponent ``Omega`` with ``exp(Omega)`` the one-step map."""
    if scheme == "midpoint":
        return dt * gen(t + 0.5 * dt)
    if scheme == "magnus4":
        a1 = gen(t + (0.5 - _GAUSS_OFFSET) * dt)
        a2 = gen(t + (0.5 + _GAUSS_OFFSET) * dt)
        return 0.5 * dt * (a1 + a2) + (np.sqrt(3.0) / 12.0) * dt * dt * (a2 @ a1 - a1 @ a2)
    raise ValueError(f"unknown scheme {scheme!r}; expected 'midpoint' or 'magnus4'")


def step_unitary(gen: Generator, t: float, dt: float, scheme: str = "midpoint") -> np.ndarray:
    return expm_skew(step_exponent(gen, t, dt, scheme))


def integrate_propagator(gen: Callable[[float], object], side: str, U0, grid: TimeGrid,
                         scheme: str = "midpoint") -> Trajectory:
    """Integrate ``dU/dt = xi(t) U`` (``side='left'``) or ``U xi(t)`` (``'right'``).

    Parameters
    ----------
    gen : callable
        Maps time to a skew-Hermitian matrix; validated at every evaluation.
    side : {'left', 'right'}
        Whether the generator multiplies from the left or the right.
    U0 : array_like
        Unitary initial value.
    grid : TimeGrid
    scheme : {'midpoint', 'magnus4'}

    Returns
    -------
    Trajectory
        Propagators ``U_k`` at every grid time.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    g = checked_generator(gen)
    u = np.array(as_array(U0), dtype=complex)
    _check_unitary(u, "U0")
    dt = grid.dt
    times = grid.times()
    out = [u.copy()]
    for k in range(grid.steps):
        v = step_unitary(g, times[k], dt, scheme)
        u = v @ u if side == "left" else u @ v
        out.append(u)
    _check_unitary(u, "final propagator")
    return Trajectory(times, out)


def integrate_adjoint(gen: Callable[[float], object], X0, grid: TimeGrid, sign: int = 1,
                      scheme: str = "midpoint") -> Trajectory:
    """Isospectral flow ``dX/dt = [xi, X]`` (``sign=+1``) or ``[X, xi]`` (``-1``).

    Each step conjugates, ``X <- V X V^dagger`` with ``V = exp(sign * Omega)``,
    so eigenvalues and trace invariants are kept exactly up to rounding.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g = checked_generator(gen)
    x = np.array(as_array(X0), dtype=complex)
    dt = grid.dt
    times = grid.times()
    out = [x.copy()]
    for k in range(grid.steps):
        v = expm_skew(sign * step_exponent(g, times[k], dt, scheme))
        x = v @ x @ v.conj().T
        out.append(x)
    return Trajectory(times, out)


def integrate_isotropy_split(base: Callable[[float], object],
                             gauge: Callable[[float, np.ndarray], object],
                             U0, rho0, grid: TimeGrid, scheme: str = "midpoint") -> Trajectory:
    """Left propagator for ``xi = A(t) + G(t, rho)`` with ``[G(t, rho), rho] = 0``.

    ``rho`` is the state carried along, ``rho_k = U_k rho0 U_k^dagger``.  The
    gauge part leaves ``rho`` fixed, so a symmetric (Strang) splitting

        U_{k+1} = exp(dt/2 G(t_{k+1}, rho')) exp(Omega_A) exp(dt/2 G(t_k, rho_k)) U_k

    with ``rho' = exp(Omega_A) rho_k exp(Omega_A)^dagger`` advances ``rho``
    by the ``A`` flow only.  The projected trajectory is therefore the same
    for every gauge, up to rounding, while ``U`` still carries the gauge.
    """
    a = checked_generator(base)
    g = checked_generator(lambda t_r: gauge(*t_r))
    u = np.array(as_array(U0), dtype=complex)
    _check_unitary(u, "U0")
    r0 = np.array(as_array(rho0), dtype=complex)
    dt = grid.dt
    times = grid.times()
    rho = u @ r0 @ u.conj().T
    out = [u.copy()]
    for k in range(grid.steps):
        v1 = expm_skew(g((times[k], rho)), 0.5 * dt)
        va = step_unitary(a, times[k], dt, scheme)
        rho_next = va @ rho @ va.conj().T
        rho_next = 0.5 * (rho_next + rho_next.conj().T)
        v3 = expm_skew(g((times[k + 1], rho_next)), 0.5 * dt)
        u = v3 @ va @ v1 @ u
        rho = rho_next
        out.append(u)
    _check_unitary(u, "final propagator")
    return Trajectory(times, out)


def integrate_state_coupled(gen: Callable[[float, np.ndarray], object], U0, rho0,
                            grid: TimeGrid) -> Trajectory:
    """Left propagator for a generator that depends on the current state.

    Midpoint predictor: half an explicit step gives ``rho`` at the midpoint,
    the generator is evaluated there and a full exponential step is taken.
    """
    g = checked_generator(lambda t_r: gen(*t_r))
    u = np.array(as_array(U0), dtype=complex)
    r0 = np.array(as_array(rho0), dtype=complex)
    dt = grid.dt
    times = grid.times()
    out = [u.copy()]
    for k in range(grid.steps):
        rho = u @ r0 @ u.conj().T
        vh = expm_skew(g((times[k], rho)), 0.5 * dt)
        rho_mid = vh @ rho @ vh.conj().T
        u = expm_skew(g((times[k] + 0.5 * dt, rho_mid)), dt) @ u
        out.append(u)
    return Trajectory(times, out)


def piecewise_constant(times: Iterable[float], mats: Sequence) -> Callable[[float], np.ndarray]:
    """Schedule returning ``mats[i]`` on ``[times[i], times[i+1])``."""
    ts = np.asarray(list(times), dtype=float)
    ms = [as_array(m) for m in mats]
    if len(ts) != len(ms):
        raise ValueError("each schedule segment needs a start time")
    if len(ts) > 1 and not np.all(np.diff(ts) > 0):
        raise ValueError("schedule start times must increase")

    def f(t: float) -> np.ndarray:
        i = int(np.searchsorted(ts, t, side="right")) - 1
        return ms[max(i, 0)]

    return f
