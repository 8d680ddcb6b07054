"""Command-line runner: ``simulate``, ``report`` and ``batch``.

Exit codes: 0 when every invariant holds, 1 on an invariant violation
(including a loss of unitarity detected during integration), 2 on
configuration or input errors.

The output directory is, in decreasing precedence, ``--output``, the
``QEP_OUTPUT_DIR`` environment variable, then the config's ``output``.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import config as cfgmod
from .config import OUTPUT_ENV, ConfigError, SimulationConfig, load_config
from .hilbert import CharacterError, hermiticity_defect, unitarity_defect
from .integrators import TimeGrid, format_float

log = logging.getLogger("quantum_ep")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


@dataclass
class RunResult:
    """Columns produced by one run; every column has one entry per time."""

    times: np.ndarray
    trajectory: Dict[str, np.ndarray]
    invariants: Dict[str, np.ndarray]
    observables: Dict[str, np.ndarray] = field(default_factory=dict)
    frames: list = field(default_factory=list)


def _cols(name: str, a: np.ndarray) -> Dict[str, np.ndarray]:
    """Flatten a stack of arrays (time first) into re/im columns."""
    a = np.asarray(a)
    flat = a.reshape(a.shape[0], -1)
    idx = [",".join(map(str, ix)) for ix in np.ndindex(*a.shape[1:])]
    out = {f"re_{name}[{i}]": flat[:, k].real for k, i in enumerate(idx)}
    out.update({f"im_{name}[{i}]": flat[:, k].imag for k, i in enumerate(idx)})
    return out


def _expect(rhos, obs) -> Dict[str, np.ndarray]:
    return {name: np.array([np.vdot(r, m).real for r in rhos]) for name, m in obs}


def _grid(cfg: SimulationConfig) -> TimeGrid:
    return TimeGrid(float(cfg.time.get("t0", 0.0)), float(cfg.time["t1"]), int(cfg.time["steps"]))


def _scheme(cfg: SimulationConfig) -> str:
    return cfg.scheme or cfgmod.SCHEMES[cfg.picture][0]


def run_schrodinger(cfg: SimulationConfig, seed: int) -> RunResult:
    from .momentum_maps import dirac_frenkel_fiber_derivative, j1, j2, legendre_ep
    from .schrodinger import GaugeChoice, solve_schrodinger

    H = cfgmod.build_hamiltonian(cfg.hamiltonian, cfg)
    psi0 = cfgmod.build_state(cfg)
    grid = _grid(cfg)
    gauge = GaugeChoice(cfgmod.build_gauge(cfg, seed))
    states, props = solve_schrodinger(H, psi0, gauge, grid, cfg.hbar, _scheme(cfg), return_propagator=True)
    psis = np.array(states.values)
    rho0 = np.outer(psi0, psi0.conj())
    rhos = [np.outer(v, v.conj()) for v in psis]
    j1s, j2s = [], []
    for u, v in zip(props.values, psis):
        mu = legendre_ep(dirac_frenkel_fiber_derivative(v, cfg.hbar), v)
        j1s.append(np.linalg.norm(j1(u, mu, rho0)))
        j2s.append(j2(u, mu, rho0))
    inv = {
        "unitarity_defect": np.array([unitarity_defect(u) for u in props.values]),
        "norm": np.linalg.norm(psis, axis=1),
        "energy": np.array([np.vdot(v, H @ v).real for v in psis]),
        "j1_norm": np.array(j1s),
        "j2": np.array(j2s),
    }
    obs = cfgmod.build_observables(cfg, H.shape[0], H)
    return RunResult(grid.times(), _cols("psi", psis), inv, _expect(rhos, obs))


def _density(x: np.ndarray) -> np.ndarray:
    return x if x.ndim == 2 else np.outer(x, x.conj())


def run_von_neumann(cfg: SimulationConfig, seed: int) -> RunResult:
    from .schrodinger import solve_von_neumann

    H = cfgmod.build_hamiltonian(cfg.hamiltonian, cfg)
    rho0 = _density(cfgmod.build_state(cfg))
    grid = _grid(cfg)
    rhos = solve_von_neumann(H, rho0, grid, cfg.hbar, _scheme(cfg)).values
    inv = {
        "trace": np.array([np.trace(r).real for r in rhos]),
        "purity": np.array([np.vdot(r, r).real for r in rhos]),
        "trace_rho3": np.array([np.trace(r @ r @ r).real for r in rhos]),
        "hermiticity_defect": np.array([hermiticity_defect(r) for r in rhos]),
        "energy": np.array([np.vdot(r, H).real for r in rhos]),
    }
    obs = cfgmod.build_observables(cfg, H.shape[0], H)
    return RunResult(grid.times(), _cols("rho", np.array(rhos)), inv, _expect(rhos, obs))


def run_heisenberg(cfg: SimulationConfig, seed: int) -> RunResult:
    from .heisenberg_dirac import HeisenbergSystem, evolve_heisenberg, propagator_from_heisenberg

    H = cfgmod.build_hamiltonian(cfg.hamiltonian, cfg)
    x0 = cfgmod.build_state(cfg)
    rho0 = _density(x0)
    kappa = cfgmod.build_gauge(cfg, seed)
    mode = "pure" if x0.ndim == 1 else "commuting"
    sys_ = HeisenbergSystem(H, rho0, kappa, cfg.hbar, mode=mode)
    grid = _grid(cfg)
    hh = evolve_heisenberg(sys_, grid, _scheme(cfg)).values
    props = propagator_from_heisenberg(sys_, None, grid, _scheme(cfg)).values
    spec0 = np.linalg.eigvalsh(H)
    inv = {
        "energy": np.array([np.vdot(rho0, h).real for h in hh]),
        "spectrum_drift": np.array([np.abs(np.linalg.eigvalsh(0.5 * (h + h.conj().T)) - spec0).max() for h in hh]),
        "hermiticity_defect": np.array([hermiticity_defect(h) for h in hh]),
        "unitarity_defect": np.array([unitarity_defect(u) for u in props]),
    }
    obs = cfgmod.build_observables(cfg, H.shape[0], H)
    # Heisenberg-picture expectations <rho0 | U^dagger A U>
    vals = {name: np.array([np.vdot(rho0, u.conj().T @ m @ u).real for u in props]) for name, m in obs}
    return RunResult(grid.times(), _cols("H_H", np.array(hh)), inv, vals)


def run_dirac(cfg: SimulationConfig, seed: int) -> RunResult:
    from .heisenberg_dirac import dirac_flow, dirac_system_from_schrodinger

    H0 = cfgmod.build_hamiltonian(cfg.hamiltonian, cfg)
    H1 = cfgmod.build_hamiltonian(cfg.perturbation, cfg)
    psi0 = cfgmod.build_state(cfg)
    kappa = cfgmod.build_gauge(cfg, seed)
    grid = _grid(cfg)
    scheme = cfg.scheme or "magnus4"
    snaps = dirac_flow(dirac_system_from_schrodinger(H0, H1, psi0, kappa, cfg.hbar), grid, scheme).values
    rhos = [s.state() for s in snaps]
    e = np.array([s.energies() for s in snaps])
    inv = {
        "energy_total": e[:, 0],
        "energy_free": e[:, 1],
        "purity_defect": np.array([np.linalg.norm(s.rhoI @ s.rhoI - s.rhoI) for s in snaps]),
        "unitarity_defect": np.array([unitarity_defect(s.U0) for s in snaps]),
    }
    obs = cfgmod.build_observables(cfg, H0.shape[0], H0 + H1)
    return RunResult(grid.times(), _cols("rho", np.array(rhos)), inv, _expect(rhos, obs))


def run_wigner(cfg: SimulationConfig, seed: int) -> RunResult:
    from .schrodinger import solve_von_neumann
    from .wigner_moyal import PhaseSpaceGrid, wigner_transform

    g = PhaseSpaceGrid(int(cfg.grid["N"]), float(cfg.grid["dx"]), cfg.hbar)
    H = cfgmod.build_hamiltonian(cfg.hamiltonian, cfg)
    rho0 = _density(cfgmod.build_state(cfg))
    grid = _grid(cfg)
    rhos = solve_von_neumann(H, rho0, grid, cfg.hbar, _scheme(cfg)).values
    hsym = np.real(wigner_transform(H, g).values) * (2.0 * np.pi * g.hbar)
    every = int(cfg.grid.get("frames_every", 1))
    norms, defects, energies, residues, xs, ps, frames = [], [], [], [], [], [], []
    for k, r in enumerate(rhos):
        w = wigner_transform(r, g)
        v = w.values
        residues.append(float(np.abs(np.imag(v)).max()) if np.iscomplexobj(v) else 0.0)
        integral = float(np.real(v).sum() * g.cell)
        norms.append(integral)
        defects.append(abs(integral - np.trace(r).real))
        energies.append(float((hsym * np.real(v)).sum() * g.cell))
        x, p = w.moments()
        xs.append(x)
        ps.append(p)
        if k % every == 0 or k == len(rhos) - 1:
            frames.append((k, w))
    inv = {
        "normalization": np.array(norms),
        "normalization_defect": np.array(defects),
        "energy": np.array(energies),
        "imag_residue": np.array(residues),
    }
    obs = cfgmod.build_observables(cfg, g.N, H)
    traj = {"mean_x": np.array(xs), "mean_p": np.array(ps)}
    return RunResult(grid.times(), traj, inv, _expect(rhos, obs), frames)


def run_fs_geodesic(cfg: SimulationConfig, seed: int) -> RunResult:
    from .config import parse_matrix
    from .fubini_study import GeodesicState, fs_conserved, fs_geodesic

    psi0 = cfgmod.build_state(cfg)
    v0 = parse_matrix(cfg.velocity, "velocity", []).reshape(-1)
    grid = _grid(cfg)
    traj = fs_geodesic(GeodesicState(psi0, v0), grid, _scheme(cfg)).values
    m0 = fs_conserved(traj[0])
    inv = {
        "norm_defect": np.array([abs(np.linalg.norm(s.psi) - 1.0) for s in traj]),
        "horizontal_defect": np.array([s.horizontal_defect for s in traj]),
        "speed": np.array([np.linalg.norm(s.psidot) for s in traj]),
        "conserved_drift": np.array([np.linalg.norm(fs_conserved(s) - m0) for s in traj]),
    }
    psis = np.array([s.psi for s in traj])
    obs = cfgmod.build_observables(cfg, psis.shape[1])
    rhos = [np.outer(p, p.conj()) for p in psis]
    return RunResult(grid.times(), _cols("psi", psis), inv, _expect(rhos, obs))


def _run_hybrid(cfg: SimulationConfig, seed: int) -> RunResult:
    from .hybrid import (
        CanonicalOperators,
        HybridState,
        consistency_constant,
        coupled_oscillator,
        hybrid_energy,
        integrate_ehrenfest_extended,
        integrate_mean_field,
    )

    ops = CanonicalOperators(int(cfg.fock_dim), cfg.hbar)
    h = cfg.hamiltonian
    co = h.get("classical_omega")
    H = coupled_oscillator(ops, float(h.get("coupling", 1.0)), float(h.get("omega", 1.0)),
                           None if co is None else float(co))
    x0 = cfgmod.build_state(cfg)
    rho0 = _density(x0)
    if cfg.classical is not None:
        z0 = np.asarray(cfg.classical["z0"], dtype=float)
    else:
        z0 = ops.expect(rho0)
    grid = _grid(cfg)
    s0 = HybridState(z0, rho0)
    if cfg.picture == "mean_field":
        traj = integrate_mean_field(s0, H, grid, cfg.hbar, _scheme(cfg)).values
    else:
        traj = integrate_ehrenfest_extended(s0, H, ops, grid, cfg.hbar, _scheme(cfg)).values
    c0 = consistency_constant(s0, ops)
    inv = {
        "energy": np.array([hybrid_energy(s, H) for s in traj]),
        "purity_defect": np.array([np.linalg.norm(s.rho @ s.rho - s.rho) for s in traj]),
    }
    if cfg.picture == "ehrenfest_extended":
        inv["consistency_drift"] = np.array([np.linalg.norm(consistency_constant(s, ops) - c0) for s in traj])
    zs = np.array([s.z for s in traj])
    q = np.array([ops.expect(s.rho) for s in traj])
    traj_cols = {"x": zs[:, 0], "p": zs[:, 1], "mean_Q": q[:, 0], "mean_P": q[:, 1],
                 "energy": inv["energy"],
                 "purity": np.array([np.vdot(s.rho, s.rho).real for s in traj])}
    obs = cfgmod.build_observables(cfg, ops.dim, None)
    return RunResult(grid.times(), traj_cols, inv, _expect([s.rho for s in traj], obs))


RUNNERS = {
    "schrodinger": run_schrodinger,
    "von_neumann": run_von_neumann,
    "heisenberg": run_heisenberg,
    "dirac": run_dirac,
    "wigner": run_wigner,
    "fs_geodesic": run_fs_geodesic,
    "mean_field": _run_hybrid,
    "ehrenfest_extended": _run_hybrid,
}


# output ---------------------------------------------------------------------

def write_columns(path: Path, times: np.ndarray, cols: Dict[str, np.ndarray]) -> None:
    """RFC-4180 CSV with a ``time`` column and 17 significant digits."""
    names = list(cols)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["time"] + names)
        for k, t in enumerate(times):
            w.writerow([format_float(t)] + [format_float(cols[n][k]) for n in names])


def read_columns(path: Path):
    """``(header, rows)`` from a CSV written by :func:`write_columns`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "time":
        raise ValueError(f"{path}: missing header with a leading 'time' column")
    header, body = rows[0], rows[1:]
    if not body:
        raise ValueError(f"{path}: no data rows")
    data = []
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise ValueError(f"{path}:{i}: expected {len(header)} fields, found {len(r)}")
        try:
            data.append([float(v) for v in r])
        except ValueError:
            raise ValueError(f"{path}:{i}: non-numeric field") from None
    return header, np.array(data)


def check_invariants(res: RunResult, table: Dict[str, tuple]):
    """First violation as ``(row index, name, value, threshold)`` or None."""
    for k in range(len(res.times)):
        for name, (kind, tol) in table.items():
            col = res.invariants.get(name)
            if col is None:
                continue
            v = col[k] if kind == "defect" else abs(col[k] - col[0])
            if not v <= tol:
                return k, name, float(v), tol
    return None


def resolve_output(cli_output: Optional[str], cfg: SimulationConfig) -> Path:
    if cli_output:
        return Path(cli_output)
    env = os.environ.get(OUTPUT_ENV)
    if env:
        return Path(env)
    return Path(cfg.output)


def simulate(cfg: SimulationConfig, outdir: Path, tolerance_scale: float = 1.0,
             seed: Optional[int] = None, stream=None) -> int:
    """Run one configuration, write its files and return the exit status."""
    stream = stream or sys.stderr
    s = cfg.seed if seed is None else seed
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        res = RUNNERS[cfg.picture](cfg, s)
    except CharacterError as exc:
        print(f"invariant violation during integration: {exc}", file=stream)
        return EXIT_VIOLATION
    write_columns(outdir / "trajectory.csv", res.times, res.trajectory)
    write_columns(outdir / "invariants.csv", res.times, res.invariants)
    if res.observables:
        write_columns(outdir / "observables.csv", res.times, res.observables)
    if res.frames:
        from .wigner_moyal import write_pgm, write_wigner_csv

        for k, w in res.frames:
            write_wigner_csv(outdir / f"wigner_{k:05d}.csv", w)
            write_pgm(outdir / f"wigner_{k:05d}.pgm", w)
    table = cfg.tolerance_table(tolerance_scale)
    bad = check_invariants(res, table)
    if bad is not None:
        k, name, v, tol = bad
        row = ", ".join(f"{n}={format_float(c[k])}" for n, c in res.invariants.items())
        print(f"invariant {name} violated at t={format_float(res.times[k])}: "
              f"{format_float(v)} > {tol:.3g}", file=stream)
        print(f"row {k}: {row}", file=stream)
        return EXIT_VIOLATION
    return EXIT_OK


def summarize(directory: Path) -> dict:
    """Min, max and drift (max - min) for every invariant column."""
    path = directory / "invariants.csv"
    header, data = read_columns(path)
    summary = {"file": str(path), "rows": int(data.shape[0]),
               "t0": float(data[0, 0]), "t1": float(data[-1, 0]), "columns": {}}
    for j, name in enumerate(header[1:], start=1):
        c = data[:, j]
        summary["columns"][name] = {"min": float(c.min()), "max": float(c.max()),
                                    "drift": float(c.max() - c.min())}
    return summary


def report(directory: Path, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        summary = summarize(directory)
    except (OSError, ValueError) as exc:
        print(f"report: {exc}", file=sys.stderr)
        return EXIT_INPUT
    width = max(len(n) for n in summary["columns"])
    print(f"{summary['file']}: {summary['rows']} rows, t in [{summary['t0']:g}, {summary['t1']:g}]",
          file=stream)
    print(f"{'column':<{width}}  {'min':>24}  {'max':>24}  {'drift':>24}", file=stream)
    for name, s in summary["columns"].items():
        print(f"{name:<{width}}  {format_float(s['min']):>24}  {format_float(s['max']):>24}  "
              f"{format_float(s['drift']):>24}", file=stream)
    with open(directory / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def _simulate_path(path: str, outdir: str, scale: float, seed: Optional[int]) -> int:
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return simulate(cfg, Path(outdir), scale, seed)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quantum-ep", description=__doc__.splitlines()[0])
    p.add_argument("--tolerance-scale", type=float, default=1.0,
                   help="multiply every invariant threshold (default 1)")
    p.add_argument("--output", help=f"output directory (overrides ${OUTPUT_ENV} and the config)")
    p.add_argument("--seed", type=int, help="seed for random gauge fields (overrides the config)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", help="run one configuration")
    s.add_argument("config")
    r = sub.add_parser("report", help="summarize invariants of a finished run")
    r.add_argument("directory")
    b = sub.add_parser("batch", help="run several configurations, one subdirectory each")
    b.add_argument("configs", nargs="+")
    b.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if not args.tolerance_scale > 0:
        print("--tolerance-scale must be positive", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "report":
        return report(Path(args.directory))
    if args.command == "simulate":
        try:
            cfg = load_config(args.config)
        except ConfigError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_INPUT
        out = resolve_output(args.output, cfg)
        log.info("writing %s", out)
        return simulate(cfg, out, args.tolerance_scale, args.seed)

    # batch: validate everything first, then run into per-config directories
    cfgs: List[SimulationConfig] = []
    failed = False
    for path in args.configs:
        try:
            cfgs.append(load_config(path))
        except ConfigError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            failed = True
    if failed:
        return EXIT_INPUT
    stems = [Path(p).stem for p in args.configs]
    if len(set(stems)) != len(stems):
        stems = [f"{i:03d}_{s}" for i, s in enumerate(stems)]
    jobs = []
    for path, cfg, stem in zip(args.configs, cfgs, stems):
        base = resolve_output(args.output, cfg)
        jobs.append((path, str(base / stem), args.tolerance_scale, args.seed))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            codes = list(ex.map(_simulate_path, *zip(*jobs)))
    else:
        codes = [_simulate_path(*j) for j in jobs]
    for (path, out, _, _), c in zip(jobs, codes):
        print(f"{path}: exit {c} -> {out}")
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
