"""JSON run configuration: validation, defaults and builders.

A configuration is a JSON object.  Every field except ``picture``, ``time``
and the picture's required inputs has a default.  :func:`load_config`
reports all validation errors at once through :class:`ConfigError`.

Matrices and vectors are written as ``{"re": [...], "im": [...]}``; ``im``
may be omitted.  A bare nested list is read as the real part.
"""
from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from .hilbert import HERMITIAN_TOL, SIGMA_X, SIGMA_Y, SIGMA_Z, hermiticity_defect, skewness_defect

PICTURES = ("schrodinger", "von_neumann", "heisenberg", "dirac", "wigner",
            "fs_geodesic", "mean_field", "ehrenfest_extended")
HAMILTONIANS = ("pauli", "matrix", "harmonic_oscillator", "spin_in_field", "coupled_oscillator")
STATES = ("basis", "vector", "diagonal_density", "coherent")
GAUGES = ("zero", "matrix", "schedule", "random")
SCHEMES = {
    "schrodinger": ("midpoint", "magnus4"),
    "von_neumann": ("midpoint", "magnus4"),
    "heisenberg": ("midpoint", "magnus4"),
    "dirac": ("midpoint", "magnus4"),
    "wigner": ("midpoint", "magnus4"),
    "fs_geodesic": ("lie", "midpoint"),
    "mean_field": ("composition4", "symmetric", "predictor"),
    "ehrenfest_extended": ("composition4", "symmetric", "predictor"),
}
OUTPUT_ENV = "QEP_OUTPUT_DIR"

# Default invariant thresholds, per picture.  "defect" invariants must stay
# below the threshold; "conserved" ones must stay within it of their initial
# value.  Config "tolerances" entries override by name and the CLI flag
# --tolerance-scale multiplies every entry.
DEFAULT_TOLERANCES: Dict[str, Dict[str, tuple]] = {
    "schrodinger": {
        "unitarity_defect": ("defect", 1e-10),
        "norm": ("conserved", 1e-10),
        "energy": ("conserved", 1e-9),
        "j1_norm": ("defect", 1e-10),
        "j2": ("conserved", 1e-9),
    },
    "von_neumann": {
        "trace": ("conserved", 1e-9),
        "purity": ("conserved", 1e-9),
        "trace_rho3": ("conserved", 1e-9),
        "hermiticity_defect": ("defect", 1e-10),
        "energy": ("conserved", 1e-9),
    },
    "heisenberg": {
        "energy": ("conserved", 1e-9),
        "spectrum_drift": ("defect", 1e-10),
        "hermiticity_defect": ("defect", 1e-10),
        "unitarity_defect": ("defect", 1e-10),
    },
    "dirac": {
        "energy_total": ("conserved", 1e-8),
        "energy_free": ("conserved", 1e-8),
        "purity_defect": ("defect", 1e-9),
        "unitarity_defect": ("defect", 1e-10),
    },
    "wigner": {
        "normalization": ("conserved", 1e-8),
        "normalization_defect": ("defect", 1e-8),
        "energy": ("conserved", 1e-8),
        "imag_residue": ("defect", 1e-10),
    },
    "fs_geodesic": {
        "norm_defect": ("defect", 1e-10),
        "horizontal_defect": ("defect", 1e-9),
        "speed": ("conserved", 1e-9),
        "conserved_drift": ("defect", 1e-7),
    },
    "mean_field": {
        "energy": ("conserved", 1e-8),
        "purity_defect": ("defect", 1e-8),
    },
    "ehrenfest_extended": {
        "energy": ("conserved", 1e-8),
        "consistency_drift": ("defect", 1e-6),
        "purity_defect": ("defect", 1e-8),
    },
}

FIXED_DIM = {"pauli": 2, "spin_in_field": 2}
NAMED_OBSERVABLES = ("sigma_x", "sigma_y", "sigma_z", "Q", "P", "number", "H")


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every problem found."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass
class SimulationConfig:
    """Validated configuration with defaults filled in."""

    picture: str
    time: Dict[str, Any]
    hamiltonian: Optional[Dict[str, Any]] = None
    perturbation: Optional[Dict[str, Any]] = None
    initial_state: Optional[Dict[str, Any]] = None
    velocity: Optional[Any] = None
    gauge: Dict[str, Any] = field(default_factory=lambda: {"type": "zero"})
    hbar: float = 1.0
    fock_dim: Optional[int] = None
    grid: Optional[Dict[str, Any]] = None
    classical: Optional[Dict[str, Any]] = None
    observables: List[Any] = field(default_factory=list)
    tolerances: Dict[str, float] = field(default_factory=dict)
    scheme: Optional[str] = None
    seed: int = 0
    output: str = "output"

    def tolerance_table(self, scale: float = 1.0) -> Dict[str, tuple]:
        """``{name: (kind, threshold)}`` after overrides and scaling."""
        table = dict(DEFAULT_TOLERANCES[self.picture])
        out = {}
        for name, (kind, tol) in table.items():
            out[name] = (kind, float(self.tolerances.get(name, tol)) * scale)
        return out


def serialize(cfg: SimulationConfig) -> Dict[str, Any]:
    """Plain JSON-compatible dict; ``validate(serialize(c))`` reproduces ``c``."""
    out = {k: v for k, v in asdict(cfg).items() if v is not None}
    if out.get("gauge") == {"type": "zero"}:
        del out["gauge"]  # the default; gauge-free pictures reject the field
    return out


def load_config(path) -> SimulationConfig:
    """Parse and validate a JSON configuration file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read {p}: {exc.strerror}"]) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{p}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    return validate(raw)


def parse_matrix(obj, what: str, errors: List[str]) -> Optional[np.ndarray]:
    """Complex array from ``{"re", "im"}`` or a nested real list."""
    try:
        if isinstance(obj, dict):
            if "re" not in obj:
                errors.append(f"{what}: missing 're'")
                return None
            re = np.asarray(obj["re"], dtype=float)
            im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
            if re.shape != im.shape:
                errors.append(f"{what}: 're' has shape {re.shape} but 'im' has {im.shape}")
                return None
            a = re + 1j * im
        else:
            a = np.asarray(obj, dtype=float).astype(complex)
    except (TypeError, ValueError):
        errors.append(f"{what}: not a numeric array")
        return None
    if not np.all(np.isfinite(a)):
        errors.append(f"{what}: non-finite entries")
        return None
    return a


def _square(a, what, errors) -> Optional[np.ndarray]:
    if a is None:
        return None
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        errors.append(f"{what}: expected a square matrix, got shape {a.shape}")
        return None
    return a


def _number(d, key, what, errors, default=None, positive=False, integer=False):
    if key not in d:
        if default is None:
            errors.append(f"{what}.{key}: required")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        errors.append(f"{what}.{key}: expected a number, got {v!r}")
        return default
    if integer and int(v) != v:
        errors.append(f"{what}.{key}: expected an integer, got {v!r}")
        return default
    if positive and v <= 0:
        errors.append(f"{what}.{key}: must be positive, got {v!r}")
        return default
    return int(v) if integer else float(v)


def _hamiltonian_dim(h, what, cfg_raw, errors) -> Optional[int]:
    if not isinstance(h, dict) or "type" not in h:
        errors.append(f"{what}: expected an object with a 'type' field")
        return None
    t = h["type"]
    if t not in HAMILTONIANS:
        errors.append(f"{what}.type: unknown {t!r}; valid types are {', '.join(HAMILTONIANS)}")
        return None
    if t == "pauli":
        co = h.get("coefficients", {})
        if not isinstance(co, dict) or set(co) - {"I", "x", "y", "z"}:
            errors.append(f"{what}.coefficients: expected keys among I, x, y, z")
        return 2
    if t == "spin_in_field":
        _number(h, "omega", what, errors, default=1.0)
        axis = h.get("axis", [0, 0, 1])
        if not (isinstance(axis, list) and len(axis) == 3) or not np.linalg.norm(np.asarray(axis, float)) > 0:
            errors.append(f"{what}.axis: expected a nonzero 3-vector")
        return 2
    if t == "matrix":
        a = _square(parse_matrix(h.get("matrix"), f"{what}.matrix", errors), f"{what}.matrix", errors)
        if a is None:
            return None
        if hermiticity_defect(a) > HERMITIAN_TOL * (1.0 + np.linalg.norm(a)):
            errors.append(f"{what}.matrix: not Hermitian (defect {hermiticity_defect(a):.3e})")
        return a.shape[0]
    _number(h, "omega", what, errors, default=1.0)
    if cfg_raw.get("picture") == "wigner" and t == "harmonic_oscillator":
        g = cfg_raw.get("grid")
        return g.get("N") if isinstance(g, dict) else None
    if t == "coupled_oscillator":
        _number(h, "coupling", what, errors, default=1.0)
        if "classical_omega" in h:
            _number(h, "classical_omega", what, errors)
    fd = cfg_raw.get("fock_dim")
    if fd is None:
        errors.append(f"{what}: type {t!r} needs 'fock_dim'")
    return fd


def _state_dim(s, cfg_raw, errors) -> Optional[int]:
    what = "initial_state"
    if not isinstance(s, dict) or "type" not in s:
        errors.append(f"{what}: expected an object with a 'type' field")
        return None
    t = s["type"]
    if t not in STATES:
        errors.append(f"{what}.type: unknown {t!r}; valid types are {', '.join(STATES)}")
        return None
    if t == "basis":
        _number(s, "index", what, errors, integer=True)
        return None
    if t == "vector":
        v = parse_matrix(s.get("vector"), f"{what}.vector", errors)
        if v is None:
            return None
        if v.ndim != 1 or np.linalg.norm(v) == 0:
            errors.append(f"{what}.vector: expected a nonzero vector")
            return None
        return v.shape[0]
    if t == "diagonal_density":
        w = s.get("weights")
        try:
            w = np.asarray(w, dtype=float)
        except (TypeError, ValueError):
            errors.append(f"{what}.weights: not numeric")
            return None
        if w.ndim != 1 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            errors.append(f"{what}.weights: expected nonnegative weights summing to 1")
            return None
        return w.shape[0]
    c = s.get("center")
    if not (isinstance(c, list) and len(c) == 2):
        errors.append(f"{what}.center: expected [x, p]")
    if cfg_raw.get("picture") == "wigner":
        g = cfg_raw.get("grid")
        return g.get("N") if isinstance(g, dict) else None
    if cfg_raw.get("fock_dim") is None:
        errors.append(f"{what}: coherent states need 'fock_dim'")
    return cfg_raw.get("fock_dim")


def _check_gauge(g, dim, errors):
    what = "gauge"
    if not isinstance(g, dict) or g.get("type") not in GAUGES:
        t = g.get("type") if isinstance(g, dict) else g
        errors.append(f"{what}.type: unknown {t!r}; valid types are {', '.join(GAUGES)}")
        return
    t = g["type"]
    mats = []
    if t == "matrix":
        mats = [("gauge.matrix", g.get("matrix"))]
    elif t == "schedule":
        times = g.get("times")
        ms = g.get("matrices")
        if not isinstance(times, list) or not isinstance(ms, list) or len(times) != len(ms) or not times:
            errors.append("gauge: 'times' and 'matrices' must be nonempty lists of equal length")
            return
        if any(b <= a for a, b in zip(times, times[1:])):
            errors.append("gauge.times: must be strictly increasing")
        mats = [(f"gauge.matrices[{i}]", m) for i, m in enumerate(ms)]
    elif t == "random":
        _number(g, "scale", what, errors, default=1.0, positive=True)
        _number(g, "pieces", what, errors, default=1, positive=True, integer=True)
    for name, m in mats:
        a = _square(parse_matrix(m, name, errors), name, errors)
        if a is None:
            continue
        if dim is not None and a.shape[0] != dim:
            errors.append(f"{name}: dimension {a.shape[0]} does not match the state dimension {dim}")
        if skewness_defect(a) > HERMITIAN_TOL * (1.0 + np.linalg.norm(a)):
            errors.append(f"{name}: kappa must be skew-Hermitian (defect {skewness_defect(a):.3e})")


def validate(raw: Dict[str, Any]) -> SimulationConfig:
    """Validate a parsed configuration and fill defaults."""
    errors: List[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["top level must be a JSON object"])
    raw = copy.deepcopy(raw)
    known = set(SimulationConfig.__dataclass_fields__)
    for k in sorted(set(raw) - known):
        errors.append(f"unknown field {k!r}")
    pic = raw.get("picture")
    if pic not in PICTURES:
        errors.append(f"picture: unknown {pic!r}; valid pictures are {', '.join(PICTURES)}")
        raise ConfigError(errors)

    tm = raw.get("time")
    if not isinstance(tm, dict):
        errors.append("time: expected an object with t0, t1, steps")
    else:
        t0 = _number(tm, "t0", "time", errors, default=0.0)
        t1 = _number(tm, "t1", "time", errors)
        _number(tm, "steps", "time", errors, positive=True, integer=True)
        if t1 is not None and t0 is not None and t1 <= t0:
            errors.append("time.t1: must exceed time.t0")
        tm.setdefault("t0", 0.0)
    _number(raw, "hbar", "config", errors, default=1.0, positive=True)
    if raw.get("fock_dim") is not None:
        fd = _number(raw, "fock_dim", "config", errors, positive=True, integer=True)
        if fd is not None and fd < 8 and pic in ("mean_field", "ehrenfest_extended"):
            errors.append("fock_dim: hybrid pictures need fock_dim >= 8")
    if pic == "wigner":
        g = raw.get("grid")
        if not isinstance(g, dict):
            errors.append("grid: wigner picture needs {'N', 'dx'}")
        else:
            n = _number(g, "N", "grid", errors, positive=True, integer=True)
            if n is not None and (n % 2 or n < 4):
                errors.append("grid.N: must be an even integer >= 4")
            _number(g, "dx", "grid", errors, positive=True)
            _number(g, "frames_every", "grid", errors, default=1, positive=True, integer=True)
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        errors.append(f"seed: expected an integer, got {seed!r}")
    scheme = raw.get("scheme")
    if scheme is not None and scheme not in SCHEMES[pic]:
        errors.append(f"scheme: {scheme!r} is not available for {pic}; choose from {', '.join(SCHEMES[pic])}")
    if not isinstance(raw.get("output", "output"), str):
        errors.append("output: expected a path string")

    tol = raw.get("tolerances", {})
    if not isinstance(tol, dict):
        errors.append("tolerances: expected an object")
    else:
        for k, v in tol.items():
            if k not in DEFAULT_TOLERANCES[pic]:
                errors.append(f"tolerances.{k}: not an invariant of {pic}; "
                              f"known: {', '.join(DEFAULT_TOLERANCES[pic])}")
            elif isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                errors.append(f"tolerances.{k}: expected a positive number")

    # dimensions
    hdim = sdim = None
    needs_h = pic != "fs_geodesic"
    if needs_h:
        if "hamiltonian" not in raw:
            errors.append("hamiltonian: required")
        else:
            hdim = _hamiltonian_dim(raw["hamiltonian"], "hamiltonian", raw, errors)
            ht = raw["hamiltonian"].get("type") if isinstance(raw["hamiltonian"], dict) else None
            hybrid = pic in ("mean_field", "ehrenfest_extended")
            if hybrid and ht not in (None, "coupled_oscillator"):
                errors.append("hamiltonian.type: hybrid pictures need 'coupled_oscillator'")
            if not hybrid and ht == "coupled_oscillator":
                errors.append("hamiltonian.type: 'coupled_oscillator' is only for mean_field and ehrenfest_extended")
    elif "hamiltonian" in raw:
        hdim = _hamiltonian_dim(raw["hamiltonian"], "hamiltonian", raw, errors)
    if pic == "dirac":
        if "perturbation" not in raw:
            errors.append("perturbation: dirac picture needs a perturbation Hamiltonian")
        else:
            pdim = _hamiltonian_dim(raw["perturbation"], "perturbation", raw, errors)
            if hdim is not None and pdim is not None and pdim != hdim:
                errors.append(f"perturbation has dimension {pdim} but hamiltonian has dimension {hdim}")
    if "initial_state" not in raw:
        errors.append("initial_state: required")
    else:
        sdim = _state_dim(raw["initial_state"], raw, errors)
        st = raw["initial_state"].get("type") if isinstance(raw["initial_state"], dict) else None
        if st == "diagonal_density" and pic not in ("von_neumann", "heisenberg", "wigner"):
            errors.append(f"initial_state.type: mixed states are not supported by the {pic} picture")
        dim = hdim if hdim is not None else sdim
        if st == "basis" and dim is not None and isinstance(raw["initial_state"].get("index"), int):
            if not 0 <= raw["initial_state"]["index"] < dim:
                errors.append(f"initial_state.index: out of range for dimension {dim}")
        if hdim is not None and sdim is not None and hdim != sdim:
            errors.append(f"hamiltonian has dimension {hdim} but initial_state has dimension {sdim}")
    if pic == "fs_geodesic":
        if "velocity" not in raw:
            errors.append("velocity: fs_geodesic needs an initial velocity vector")
        else:
            v = parse_matrix(raw["velocity"], "velocity", errors)
            if v is not None and sdim is not None and v.shape != (sdim,):
                errors.append(f"velocity has dimension {v.shape} but initial_state has dimension {sdim}")
    if "gauge" in raw:
        if pic not in ("schrodinger", "heisenberg", "dirac"):
            errors.append(f"gauge: the {pic} picture has no gauge freedom")
        else:
            _check_gauge(raw["gauge"], hdim if hdim is not None else sdim, errors)
    if "classical" in raw:
        c = raw["classical"]
        if pic not in ("mean_field", "ehrenfest_extended"):
            errors.append("classical: only hybrid pictures have classical variables")
        elif not isinstance(c, dict) or not (isinstance(c.get("z0"), list) and len(c["z0"]) == 2):
            errors.append("classical.z0: expected [x, p]")
    elif pic == "mean_field":
        errors.append("classical.z0: mean_field needs the initial classical point")

    obs = raw.get("observables", [])
    if not isinstance(obs, list):
        errors.append("observables: expected a list")
    else:
        for i, o in enumerate(obs):
            if isinstance(o, str):
                if o not in NAMED_OBSERVABLES:
                    errors.append(f"observables[{i}]: unknown {o!r}; named observables are "
                                  f"{', '.join(NAMED_OBSERVABLES)}")
                elif o.startswith("sigma") and (hdim or sdim) not in (None, 2):
                    errors.append(f"observables[{i}]: {o} needs dimension 2")
            elif isinstance(o, dict) and isinstance(o.get("name"), str):
                a = _square(parse_matrix(o.get("matrix"), f"observables[{i}].matrix", errors),
                            f"observables[{i}].matrix", errors)
                d = hdim if hdim is not None else sdim
                if a is not None and d is not None and a.shape[0] != d:
                    errors.append(f"observables[{i}]: dimension {a.shape[0]} does not match {d}")
            else:
                errors.append(f"observables[{i}]: expected a name or {{'name', 'matrix'}}")
    if errors:
        raise ConfigError(errors)
    return SimulationConfig(**raw)


# builders -------------------------------------------------------------------

def _matrix(obj) -> np.ndarray:
    errs: List[str] = []
    a = parse_matrix(obj, "matrix", errs)
    if errs:
        raise ConfigError(errs)
    return a


def state_dimension(cfg: SimulationConfig) -> int:
    if cfg.picture == "wigner":
        return int(cfg.grid["N"])
    if cfg.hamiltonian is not None:
        t = cfg.hamiltonian["type"]
        if t in FIXED_DIM:
            return FIXED_DIM[t]
        if t == "matrix":
            return _matrix(cfg.hamiltonian["matrix"]).shape[0]
        return int(cfg.fock_dim)
    s = cfg.initial_state
    if s["type"] == "vector":
        return _matrix(s["vector"]).shape[0]
    if s["type"] == "diagonal_density":
        return len(s["weights"])
    return int(cfg.fock_dim)


def ladder(n: int) -> np.ndarray:
    """Truncated annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)


def build_hamiltonian(spec: Dict[str, Any], cfg: SimulationConfig) -> np.ndarray:
    """Hermitian matrix for a non-hybrid Hamiltonian spec."""
    t = spec["type"]
    hb = cfg.hbar
    if t == "pauli":
        c = spec.get("coefficients", {})
        return (c.get("I", 0.0) * np.eye(2) + c.get("x", 0.0) * SIGMA_X
                + c.get("y", 0.0) * SIGMA_Y + c.get("z", 0.0) * SIGMA_Z).astype(complex)
    if t == "spin_in_field":
        axis = np.asarray(spec.get("axis", [0, 0, 1]), dtype=float)
        axis = axis / np.linalg.norm(axis)
        w = float(spec.get("omega", 1.0))
        return 0.5 * hb * w * (axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z)
    if t == "matrix":
        a = _matrix(spec["matrix"])
        return 0.5 * (a + a.conj().T)
    if t == "harmonic_oscillator":
        w = float(spec.get("omega", 1.0))
        if cfg.picture == "wigner":
            from .wigner_moyal import PhaseSpaceGrid
            return PhaseSpaceGrid(cfg.grid["N"], cfg.grid["dx"], hb).harmonic_hamiltonian(w)
        a = ladder(int(cfg.fock_dim))
        return hb * w * (a.conj().T @ a + 0.5 * np.eye(a.shape[0]))
    raise ConfigError([f"hamiltonian type {t!r} cannot be built as a matrix"])


def build_state(cfg: SimulationConfig) -> np.ndarray:
    """Initial state: a unit vector for pure specs, a density matrix otherwise."""
    s = cfg.initial_state
    n = state_dimension(cfg)
    t = s["type"]
    if t == "basis":
        v = np.zeros(n, dtype=complex)
        v[int(s["index"])] = 1.0
        return v
    if t == "vector":
        v = _matrix(s["vector"]).reshape(-1)
        return v / np.linalg.norm(v)
    if t == "diagonal_density":
        return np.diag(np.asarray(s["weights"], dtype=float)).astype(complex)
    x0, p0 = (float(c) for c in s["center"])
    if cfg.picture == "wigner":
        from .wigner_moyal import PhaseSpaceGrid, coherent_state
        return coherent_state(PhaseSpaceGrid(cfg.grid["N"], cfg.grid["dx"], cfg.hbar), x0, p0)
    from .hybrid import CanonicalOperators
    return CanonicalOperators(int(cfg.fock_dim), cfg.hbar).coherent_state([x0, p0])


def build_gauge(cfg: SimulationConfig, seed: Optional[int] = None):
    """Gauge field ``kappa(t)`` as a callable."""
    from .hilbert import random_skew
    from .integrators import piecewise_constant

    n = state_dimension(cfg)
    g = cfg.gauge
    t = g["type"]
    if t == "zero":
        z = np.zeros((n, n), dtype=complex)
        return lambda _t: z
    if t == "matrix":
        k = _matrix(g["matrix"])
        return lambda _t: k
    if t == "schedule":
        return piecewise_constant(g["times"], [_matrix(m) for m in g["matrices"]])
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    pieces = int(g.get("pieces", 1))
    scale = float(g.get("scale", 1.0))
    mats = [random_skew(n, rng, scale) for _ in range(pieces)]
    times = np.linspace(cfg.time.get("t0", 0.0), cfg.time["t1"], pieces + 1)[:-1]
    return piecewise_constant(times, mats)


def build_observables(cfg: SimulationConfig, n: int, H: Optional[np.ndarray] = None):
    """``[(name, matrix)]`` for the configured observables."""
    out = []
    for o in cfg.observables:
        if isinstance(o, dict):
            out.append((o["name"], _matrix(o["matrix"])))
            continue
        if o == "sigma_x":
            m = SIGMA_X
        elif o == "sigma_y":
            m = SIGMA_Y
        elif o == "sigma_z":
            m = SIGMA_Z
        elif o == "H":
            m = H
        elif cfg.picture == "wigner":
            from .wigner_moyal import PhaseSpaceGrid
            g = PhaseSpaceGrid(cfg.grid["N"], cfg.grid["dx"], cfg.hbar)
            q, p = g.position_operator(), g.momentum_operator()
            m = {"Q": q, "P": p, "number": 0.5 * (q @ q + p @ p) / cfg.hbar - 0.5 * np.eye(n)}[o]
        else:
            a = ladder(n)
            s = np.sqrt(cfg.hbar / 2.0)
            m = {"Q": s * (a + a.conj().T), "P": 1j * s * (a.conj().T - a), "number": a.conj().T @ a}[o]
        out.append((o, np.asarray(m, dtype=complex)))
    return out
