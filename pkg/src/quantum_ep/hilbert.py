"""Complex operator algebra on finite-dimensional Hilbert spaces.

Operators are dense complex matrices carrying an algebraic *character*
(``general``, ``hermitian``, ``skew_hermitian`` or ``unitary``) that is
checked when the object is built.  The real pairing used throughout the
package is ``<A, B> = Re Tr(A^dagger B)`` and the complex one is
``<A|B> = Tr(A^dagger B)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

CHARACTERS = ("general", "hermitian", "skew_hermitian", "unitary")

# Construction-time tolerances for the character checks.
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-10
PURITY_TOL = 1e-9
NORMALIZED_TOL = 1e-10


class CharacterError(ValueError):
    """An operator or state violates its declared algebraic character."""


class DimensionError(ValueError):
    """Operands have incompatible dimensions."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_array(a: Any) -> np.ndarray:
    """Return the complex ndarray behind an operator, state or array-like."""
    if isinstance(a, (Operator, DensityMatrix)):
        return a.entries
    if isinstance(a, StateVector):
        return a.amplitudes
    return np.asarray(a, dtype=complex)


def hermiticity_defect(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - a.conj().T))


def skewness_defect(a: np.ndarray) -> float:
    return float(np.linalg.norm(a + a.conj().T))


def unitarity_defect(a: np.ndarray) -> float:
    return float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])))


def check_character(a: Any, character: str) -> np.ndarray:
    """Validate ``a`` against ``character`` and return it as an ndarray.

    Raises
    ------
    CharacterError
        If the matrix is not square or fails the tolerance for its character.
    """
    if character not in CHARACTERS:
        raise ValueError(f"unknown character {character!r}; expected one of {CHARACTERS}")
    m = as_array(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise CharacterError(f"operator must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise CharacterError("operator has non-finite entries")
    scale = 1.0 + float(np.linalg.norm(m))
    if character == "hermitian":
        d = hermiticity_defect(m)
        if d > HERMITIAN_TOL * scale:
            raise CharacterError(f"not Hermitian: ||A - A^+||_F = {d:.3e}")
    elif character == "skew_hermitian":
        d = skewness_defect(m)
        if d > HERMITIAN_TOL * scale:
            raise CharacterError(f"not skew-Hermitian: ||A + A^+||_F = {d:.3e}")
    elif character == "unitary":
        d = unitarity_defect(m)
        if d > UNITARY_TOL:
            raise CharacterError(f"not unitary: ||A^+A - I||_F = {d:.3e}")
    return m


@dataclass(frozen=True)
class Operator:
    """Dense n x n complex operator with a validated character tag."""

    entries: np.ndarray
    character: str = "general"

    def __post_init__(self):
        m = _frozen(check_character(self.entries, self.character))
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "Operator":
        ch = self.character
        return Operator(self.entries.conj().T, ch)

    def to_json(self) -> dict:
        return operator_to_json(self)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def hermitian(a: Any) -> Operator:
    return Operator(as_array(a), "hermitian")


def skew_hermitian(a: Any) -> Operator:
    return Operator(as_array(a), "skew_hermitian")


def unitary(a: Any) -> Operator:
    return Operator(as_array(a), "unitary")


@dataclass(frozen=True)
class StateVector:
    """Vector in C^n; ``normalized=True`` asserts unit norm at construction."""

    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex, copy=True).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise CharacterError("state has non-finite amplitudes")
        if self.normalized:
            d = abs(float(np.vdot(v, v).real) - 1.0)
            if d > NORMALIZED_TOL:
                raise CharacterError(f"state flagged normalized but | ||psi||^2 - 1 | = {d:.3e}")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator."""

    entries: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = check_character(self.entries, "hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise CharacterError(f"density matrix trace is {tr.real:.12g}, expected 1")
        h = 0.5 * (m + m.conj().T)
        ev = np.linalg.eigvalsh(h)
        if ev[0] < POSITIVITY_TOL:
            raise CharacterError(f"density matrix has negative eigenvalue {ev[0]:.3e}")
        ev.setflags(write=False)
        object.__setattr__(self, "entries", _frozen(m))
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def purity_defect(self) -> float:
        """``||rho^2 - rho||_F``; zero exactly for projectors."""
        m = self.entries
        return float(np.linalg.norm(m @ m - m))

    def is_pure(self, tol: float = PURITY_TOL) -> bool:
        return self.purity_defect() <= tol

    def pure_vector(self) -> np.ndarray:
        """Unit eigenvector of the largest eigenvalue (the state of a pure rho)."""
        w, v = np.linalg.eigh(0.5 * (self.entries + self.entries.conj().T))
        return v[:, -1]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def require_pure(rho: Any, what: str = "rho") -> np.ndarray:
    """Return the matrix of ``rho`` after checking it is a pure density matrix."""
    r = rho if isinstance(rho, DensityMatrix) else DensityMatrix(as_array(rho))
    if not r.is_pure():
        raise CharacterError(f"{what} must be pure: ||rho^2 - rho||_F = {r.purity_defect():.3e}")
    return r.entries


OperatorLike = Union[Operator, DensityMatrix, np.ndarray]


def _same_dims(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def inner(a: OperatorLike, b: OperatorLike) -> complex:
    """Complex pairing ``<A|B> = Tr(A^dagger B)``."""
    x, y = as_array(a), as_array(b)
    _same_dims(x, y)
    return complex(np.vdot(x, y))


def pairing(a: OperatorLike, b: OperatorLike) -> float:
    """Real pairing ``<A, B> = Re Tr(A^dagger B)``."""
    return inner(a, b).real


def _bracket_character(ca: str, cb: str, kind: str) -> str:
    herm = {"hermitian": 1, "skew_hermitian": -1}
    if ca not in herm or cb not in herm:
        return "general"
    s = herm[ca] * herm[cb]
    if kind == "commutator":
        s = -s
    return "hermitian" if s == 1 else "skew_hermitian"


def bracket(a: OperatorLike, b: OperatorLike, kind: str = "commutator") -> Operator:
    """Commutator ``AB - BA`` or anticommutator ``AB + BA``.

    The character of the result is inferred from the characters of the
    operands (for example the commutator of two Hermitian operators is
    skew-Hermitian).
    """
    x, y = as_array(a), as_array(b)
    _same_dims(x, y)
    if kind == "commutator":
        m = x @ y - y @ x
    elif kind == "anticommutator":
        m = x @ y + y @ x
    else:
        raise ValueError(f"unknown bracket kind {kind!r}")
    ca = a.character if isinstance(a, Operator) else ("hermitian" if isinstance(a, DensityMatrix) else "general")
    cb = b.character if isinstance(b, Operator) else ("hermitian" if isinstance(b, DensityMatrix) else "general")
    ch = _bracket_character(ca, cb, kind)
    # remove rounding noise in the part the character forbids
    if ch == "hermitian":
        m = 0.5 * (m + m.conj().T)
    elif ch == "skew_hermitian":
        m = 0.5 * (m - m.conj().T)
    return Operator(m, ch)


def commutator(a: OperatorLike, b: OperatorLike) -> Operator:
    return bracket(a, b, "commutator")


def anticommutator(a: OperatorLike, b: OperatorLike) -> Operator:
    return bracket(a, b, "anticommutator")


def project_pure(psi: Union[StateVector, np.ndarray]) -> DensityMatrix:
    """Projector ``psi psi^dagger / ||psi||^2``."""
    v = as_array(psi).reshape(-1)
    nrm2 = float(np.vdot(v, v).real)
    if nrm2 <= 1e-24:
        raise ValueError("cannot project the zero vector")
    return DensityMatrix(np.outer(v, v.conj()) / nrm2)


def expectation(rho: OperatorLike, a: OperatorLike) -> complex:
    """``<A|rho> = Tr(A^dagger rho)``; real whenever ``A`` is Hermitian."""
    return inner(a, rho)


def exp_generator(xi: OperatorLike, t: float = 1.0) -> Operator:
    """``exp(t xi)`` for skew-Hermitian ``xi``.

    The exponential is taken through the eigendecomposition of the Hermitian
    matrix ``i xi``, which keeps the result unitary to rounding.
    """
    x = check_character(xi, "skew_hermitian")
    return Operator(expm_skew(x, t), "unitary")


def expm_skew(xi: np.ndarray, t: float = 1.0) -> np.ndarray:
    """Unchecked ``exp(t xi)`` for a skew-Hermitian ndarray."""
    h = 1j * xi
    h = 0.5 * (h + h.conj().T)
    lam, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * t * lam)) @ v.conj().T


# serialization ------------------------------------------------------------

def operator_to_json(op: Operator) -> dict:
    m = op.entries
    return {
        "dim": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
        "character": op.character,
    }


def operator_from_json(obj: Union[dict, str]) -> Operator:
    if isinstance(obj, str):
        obj = json.loads(obj)
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.shape != im.shape:
        raise DimensionError("re and im parts have different shapes")
    dim = int(obj.get("dim", re.shape[0]))
    if re.shape != (dim, dim):
        raise DimensionError(f"declared dim {dim} does not match entries of shape {re.shape}")
    return Operator(re + 1j * im, obj.get("character", "general"))


def state_to_json(psi: StateVector) -> dict:
    v = psi.amplitudes
    return {"dim": int(v.shape[0]), "re": v.real.tolist(), "im": v.imag.tolist(),
            "normalized": bool(psi.normalized)}


def state_from_json(obj: Union[dict, str]) -> StateVector:
    if isinstance(obj, str):
        obj = json.loads(obj)
    v = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    if v.shape != (int(obj.get("dim", v.shape[0])),):
        raise DimensionError("declared dim does not match amplitudes")
    return StateVector(v, bool(obj.get("normalized", False)))


# common matrices --------------------------------------------------------

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (m + m.conj().T)


def random_skew(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return -1j * random_hermitian(n, rng, scale)


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    return expm_skew(random_skew(n, rng), 1.0)
