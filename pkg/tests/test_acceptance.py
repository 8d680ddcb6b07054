"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import json

import numpy as np
import pytest

import quantum_ep.integrators as integrators
from quantum_ep import cli
from quantum_ep.fubini_study import (
    GeodesicState,
    fs_conserved,
    fs_geodesic,
    fs_reduced_lagrangian,
    great_circle,
)
from quantum_ep.heisenberg_dirac import (
    HeisenbergSystem,
    dirac_flow,
    dirac_system_from_schrodinger,
    evolve_heisenberg,
    evolve_observable,
)
from quantum_ep.hilbert import (
    pairing,
    random_hermitian,
    random_skew,
    random_state,
    random_unitary,
    unitarity_defect,
)
from quantum_ep.hybrid import (
    CanonicalOperators,
    HeisenbergAlgebraElement,
    HeisenbergElement,
    HybridHamiltonian,
    HybridState,
    consistency_constant,
    coupled_oscillator,
    displacement_operator,
    hbar_pairing,
    heisenberg_ad,
    heisenberg_adjoint,
    heisenberg_multiply,
    hybrid_energy,
    integrate_ehrenfest_extended,
    integrate_mean_field,
    iota,
    iota_star,
    phase_type,
    semidirect_coadjoint,
    semidirect_multiply,
)
from quantum_ep.integrators import TimeGrid, integrate_propagator, piecewise_constant
from quantum_ep.momentum_maps import (
    dirac_frenkel_fiber_derivative,
    fubini_study_fiber_derivative,
    j1,
    j2,
    legendre_ep,
    phase_momentum,
)
from quantum_ep.schrodinger import GaugeChoice, solve_schrodinger, solve_von_neumann
from quantum_ep.wigner_moyal import (
    PhaseSpaceGrid,
    coherent_state,
    evolve_wigner,
    moyal_bracket,
    moyal_residual,
    poisson_bracket,
    symbol_from_function,
    weyl_inverse,
    wigner_transform,
)


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line per criterion, then assert every check."""

    def emit(number, title, checks):
        ok = all(v <= tol for _, v, tol in checks)
        detail = "; ".join(f"{name}={v:.3g} (<= {tol:g})" for name, v, tol in checks)
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}")
        failed = [name for name, v, tol in checks if not v <= tol]
        assert ok, f"criterion {number} failed: {', '.join(failed)}"

    return emit


def proj(v):
    return np.outer(v, v.conj())


def test_01_unitary_integrity(verdict):
    rng = np.random.default_rng(1)
    a, b = random_skew(8, rng), random_skew(8, rng)
    traj = integrate_propagator(lambda t: a * np.cos(t) + b * np.sin(2 * t), "left", np.eye(8),
                                TimeGrid(0.0, 10.0, 10_000))
    defect = max(unitarity_defect(u) for u in traj.values)
    verdict(1, "unitary integrity", [("max ||U^+U - I||", defect, 1e-10)])


def test_02_gauge_invariance(verdict):
    rng = np.random.default_rng(2)
    n = 4
    h = random_hermitian(n, rng)
    psi0 = random_state(n, rng)
    grid = TimeGrid(0.0, 2.0, 400)
    ref = solve_schrodinger(h, psi0, grid=grid)
    worst = 0.0
    for _ in range(3):
        mats = [random_skew(n, rng) for _ in range(5)]
        gauge = GaugeChoice(piecewise_constant(np.linspace(0.0, 2.0, 5), mats))
        run = solve_schrodinger(h, psi0, gauge, grid=grid)
        worst = max(worst, max(np.linalg.norm(proj(x) - proj(y)) for x, y in zip(ref.values, run.values)))
    a = random_hermitian(n, rng)
    k = random_skew(n, rng)
    heis = evolve_observable(a, HeisenbergSystem(h, proj(psi0), lambda t: k * np.cos(t)), grid)
    cross = max(abs(np.vdot(proj(psi0), x).real - np.vdot(v, a @ v).real)
                for x, v in zip(heis.values, ref.values))
    verdict(2, "gauge invariance", [("projector mismatch", worst, 1e-8),
                                    ("Heisenberg vs Schrodinger", cross, 1e-7)])


def test_03_momentum_map_laws(verdict):
    rng = np.random.default_rng(3)
    n, hbar = 4, 0.8
    h = random_hermitian(n, rng)
    psi0 = random_state(n, rng)
    rho0 = proj(psi0)
    grid = TimeGrid(0.0, 2.0, 400)
    states, props = solve_schrodinger(h, psi0, GaugeChoice.constant(random_skew(n, rng)), grid,
                                      hbar=hbar, return_propagator=True)
    j1s, j2s = [], []
    for u, v in zip(props.values, states.values):
        mu = legendre_ep(dirac_frenkel_fiber_derivative(v, hbar), v)
        j1s.append(np.linalg.norm(j1(u, mu, rho0)))
        j2s.append(j2(u, mu, rho0))
    j2_initial = abs(j2s[0] - hbar * np.linalg.norm(psi0) ** 2)
    v0 = random_state(n, rng)
    v0 = v0 - np.vdot(psi0, v0) * psi0
    geo = fs_geodesic(GeodesicState(psi0, v0), TimeGrid(0.0, 1.0, 200))
    fs_j2 = max(abs(phase_momentum(s.psi, fubini_study_fiber_derivative(s.psi, s.psidot, hbar)))
                for s in geo.values)
    verdict(3, "momentum-map laws", [("max ||J1||", max(j1s), 1e-10),
                                     ("J2 drift", max(j2s) - min(j2s), 1e-9),
                                     ("|J2(0) - hbar||psi||^2|", j2_initial, 1e-15),
                                     ("max |J2| on FS flow", fs_j2, 1e-9)])


def test_04_mixed_state_invariants(verdict):
    rng = np.random.default_rng(4)
    n = 4
    h = random_hermitian(n, rng)
    r = random_state(n, rng)
    rho0 = 0.6 * proj(r) + 0.4 * np.diag([0.1, 0.2, 0.3, 0.4])
    grid = TimeGrid(0.0, 5.0, 1000)
    traj = solve_von_neumann(h, rho0, grid)
    checks = []
    for k in (1, 2, 3):
        v = [np.trace(np.linalg.matrix_power(x, k)).real for x in traj.values]
        checks.append((f"Tr rho^{k} drift", max(v) - min(v), 1e-9))
    pure = solve_von_neumann(h, proj(r), grid)
    checks.append(("purity defect", max(np.linalg.norm(x @ x - x) for x in pure.values), 1e-9))
    verdict(4, "mixed-state invariants", checks)


def test_05_heisenberg_energy_law(verdict):
    rng = np.random.default_rng(5)
    n = 4
    rho0 = proj(random_state(n, rng))
    k = random_skew(n, rng)
    sys = HeisenbergSystem(random_hermitian(n, rng), rho0, lambda t: k)
    traj = evolve_heisenberg(sys, TimeGrid(0.0, 5.0, 1000))
    e = [np.vdot(rho0, x).real for x in traj.values]
    ev = np.array([np.linalg.eigvalsh(x) for x in traj.values])
    verdict(5, "Heisenberg energy law", [("energy drift", max(e) - min(e), 1e-9),
                                         ("spectrum drift", float(np.abs(ev - ev[0]).max()), 1e-10)])


def test_06_dirac_equivalence(verdict):
    rng = np.random.default_rng(6)
    n = 4
    h0, h1 = random_hermitian(n, rng), 0.3 * random_hermitian(n, rng)
    psi0 = random_state(n, rng)
    k = random_skew(n, rng)
    grid = TimeGrid(0.0, 2.0, 400)
    traj = dirac_flow(dirac_system_from_schrodinger(h0, h1, psi0, lambda t: k * np.sin(t)), grid)
    ref = solve_von_neumann(h0 + h1, proj(psi0), grid, scheme="magnus4")
    mismatch = max(np.linalg.norm(s.state() - r) for s, r in zip(traj.values, ref.values))
    e = np.array([s.energies() for s in traj.values])
    verdict(6, "Dirac-picture equivalence", [("state mismatch", mismatch, 1e-7),
                                             ("total energy drift", float(np.ptp(e[:, 0])), 1e-8),
                                             ("free energy drift", float(np.ptp(e[:, 1])), 1e-8)])


def test_07_fubini_study_geodesics(verdict):
    rng = np.random.default_rng(7)
    e1, e2 = np.eye(3, dtype=complex)[0], np.eye(3, dtype=complex)[1]
    gc = fs_geodesic(GeodesicState(e1, e2), TimeGrid(0.0, np.pi / 4, 100))
    gc_err = np.linalg.norm(gc.final.psi - great_circle(e1, e2, np.pi / 4))
    n = 4
    psi0 = random_state(n, rng)
    v0 = random_state(n, rng)
    v0 = v0 - np.vdot(psi0, v0) * psi0
    geo = fs_geodesic(GeodesicState(psi0, v0), TimeGrid(0.0, 1.0, 400))
    m = [fs_conserved(s) for s in geo.values]
    m_drift = max(np.linalg.norm(x - m[0]) for x in m)
    var_err = 0.0
    for _ in range(20):
        xi = random_skew(n, rng)
        rho = proj(random_state(n, rng))
        e = 1j * xi
        variance = 0.5 * (np.vdot(rho, e @ e).real - np.vdot(rho, e).real ** 2)
        var_err = max(var_err, abs(fs_reduced_lagrangian(xi, rho) - variance))
    verdict(7, "Fubini-Study geodesics", [("great circle error", gc_err, 1e-6),
                                          ("M drift", m_drift, 1e-7),
                                          ("reduced Lagrangian vs variance", var_err, 1e-12)])


def test_08_wigner_moyal(verdict):
    rng = np.random.default_rng(8)
    g = PhaseSpaceGrid(32, np.sqrt(2 * np.pi / 32))
    a = random_hermitian(32, rng)
    rt = np.linalg.norm(weyl_inverse(wigner_transform(a, g)) - a) / np.linalg.norm(a)
    h = g.harmonic_hamiltonian()
    w0 = wigner_transform(proj(coherent_state(g, 1.0, 0.5)), g)
    traj = evolve_wigner(h, w0, TimeGrid(0.0, 2.0, 800))
    resid = moyal_residual(h, traj)
    norm = max(abs(w.integral() - 1.0) for w in traj.values)
    x2 = symbol_from_function(g, lambda x, p: x ** 2)
    p2 = symbol_from_function(g, lambda x, p: p ** 2)
    sx, sp = g.interior()
    mp = float(np.abs(moyal_bracket(x2, p2).values - poisson_bracket(x2, p2).values)[sx, sp].max())
    verdict(8, "Wigner-Moyal", [("round trip", rt, 1e-10),
                                ("Moyal residual", resid, 1e-5),
                                ("normalization drift", norm, 1e-8),
                                ("Moyal vs Poisson on x^2, p^2", mp, 1e-6)])


def test_09_hybrid_dynamics(verdict):
    ops = CanonicalOperators(24, 1.0)
    H = coupled_oscillator(ops, coupling=0.5, omega=1.0, classical_omega=1.0)
    rho = proj(ops.coherent_state([0.5, 0.0]))
    grid = TimeGrid(0.0, 10.0, 1000)
    mf = integrate_mean_field(HybridState([1.0, 0.0], rho), H, grid)
    e_mf = [hybrid_energy(s, H) for s in mf.values]
    ex = integrate_ehrenfest_extended(HybridState(ops.expect(rho), rho), H, ops, grid)
    e_ex = [hybrid_energy(s, H) for s in ex.values]
    c = [consistency_constant(s, ops) for s in ex.values]
    cons = max(np.linalg.norm(x - c[0]) for x in c)

    h0 = 0.5 * (ops.P[0] @ ops.P[0] + ops.Q[0] @ ops.Q[0]) + 0.1 * ops.Q[0] @ ops.Q[0] @ ops.Q[0]
    free = HybridHamiltonian(lambda z: h0, lambda z: [0 * h0, 0 * h0])
    short = TimeGrid(0.0, 2.0, 200)
    q = integrate_ehrenfest_extended(HybridState([0.0, 0.0], rho), free, ops, short)
    ref = solve_von_neumann(h0, rho, short)
    quantum = max(np.linalg.norm(s.rho - r) for s, r in zip(q.values, ref.values))

    pt = phase_type(lambda z: 0.5 * (z[0] ** 2 + z[1] ** 2), lambda z: [z[0], z[1]], ops.dim)
    cl_grid = TimeGrid(0.0, 3.0, 300)
    cl = integrate_mean_field(HybridState([1.0, 0.5], rho), pt, cl_grid)
    classical = max(np.linalg.norm(s.z - [np.cos(t) + 0.5 * np.sin(t), 0.5 * np.cos(t) - np.sin(t)])
                    for t, s in zip(cl_grid.times(), cl.values))
    verdict(9, "hybrid dynamics", [("mean-field energy drift", max(e_mf) - min(e_mf), 1e-8),
                                   ("extended energy drift", max(e_ex) - min(e_ex), 1e-8),
                                   ("grad H = 0 vs quantum flow", quantum, 1e-10),
                                   ("phase type vs classical", classical, 1e-6),
                                   ("consistency drift", cons, 1e-6)])


def test_10_group_algebra(verdict):
    rng = np.random.default_rng(10)
    group = 0.0
    for _ in range(50):
        g, h, k = (HeisenbergElement(rng.normal(size=2), rng.normal()) for _ in range(3))
        l = heisenberg_multiply(heisenberg_multiply(g, h), k)
        r = heisenberg_multiply(g, heisenberg_multiply(h, k))
        i = heisenberg_multiply(g, g.inverse())
        e = heisenberg_multiply(g, HeisenbergElement.identity(1))
        group = max(group, np.abs(l.h - r.h).max(), abs(l.phi - r.phi), np.abs(i.h).max(), abs(i.phi),
                    np.abs(e.h - g.h).max(), abs(e.phi - g.phi))

    ops = CanonicalOperators(64, 1.0)
    pi = ops.low_projector(0.25)

    def block():
        u = np.eye(64, dtype=complex)
        u[:16, :16] = random_unitary(16, rng)
        return u

    A = (HeisenbergElement([0.6, -0.5], 0.3), block())
    B = (HeisenbergElement([-0.4, 0.7], -0.2), block())
    C = (HeisenbergElement([0.2, 0.1], 0.5), block())
    l = semidirect_multiply(semidirect_multiply(A, B, ops), C, ops)
    r = semidirect_multiply(A, semidirect_multiply(B, C, ops), ops)
    assoc = max(np.linalg.norm(pi @ (l[1] - r[1]) @ pi), np.abs(l[0].h - r[0].h).max(), abs(l[0].phi - r[0].phi))

    nu = rng.normal(size=2)
    mu = pi @ random_skew(64, rng) @ pi
    (n1, _), m1 = semidirect_coadjoint(semidirect_multiply(A, B, ops), nu, 1.0, mu, ops)
    (n2, a2), m2 = semidirect_coadjoint(A, nu, 1.0, mu, ops)
    (n2, _), m2 = semidirect_coadjoint(B, n2, a2, m2, ops)
    contra = max(np.linalg.norm(n1 - n2), np.linalg.norm(pi @ (m1 - m2) @ pi))

    h = A[0]
    uh = displacement_operator(h, ops)
    equiv = max(np.linalg.norm((uh @ z @ uh.conj().T - (z - hk * np.eye(64))) @ pi) for z, hk in zip(ops.Z, h.h))

    a = HeisenbergAlgebraElement([0.3, 0.8], 0.1)
    b = HeisenbergAlgebraElement([-0.5, 0.2], 0.4)
    ia, ib = iota(a, ops), iota(b, ops)
    hom = np.linalg.norm((iota(heisenberg_ad(a, b), ops) - (ib @ ia - ia @ ib)) @ pi)
    hom = max(hom, np.linalg.norm((iota(heisenberg_adjoint(h, a), ops) - uh @ ia @ uh.conj().T) @ pi))
    dual = abs(hbar_pairing(iota_star(mu, ops), a) - pairing(mu, ia))
    verdict(10, "group and representation algebra", [("Heisenberg group axioms", group, 1e-13),
                                                      ("semidirect associativity", assoc, 1e-6),
                                                      ("coadjoint contravariance", contra, 1e-6),
                                                      ("equivariance lemma", equiv, 1e-6),
                                                      ("iota homomorphism", hom, 1e-8),
                                                      ("iota / iota* duality", dual, 1e-8)])


def test_11_cli_determinism(verdict, tmp_path, monkeypatch):
    cfg = {
        "picture": "schrodinger",
        "hamiltonian": {"type": "matrix", "matrix": {"re": [[1, 0.5], [0.5, -1]], "im": [[0, 0.2], [-0.2, 0]]}},
        "initial_state": {"type": "basis", "index": 0},
        "gauge": {"type": "random", "scale": 0.5, "pieces": 3},
        "time": {"t1": 2.0, "steps": 200},
        "seed": 5,
        "observables": ["sigma_x"],
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    codes = [cli.main(["--output", str(tmp_path / d), "simulate", str(path)]) for d in ("a", "b")]
    differing = sum((tmp_path / "a" / f).read_bytes() != (tmp_path / "b" / f).read_bytes()
                    for f in ("trajectory.csv", "invariants.csv", "observables.csv"))
    real = integrators.expm_skew
    monkeypatch.setattr(integrators, "expm_skew", lambda xi, t=1.0: 1.01 * real(xi, t))
    bad = cli.main(["--output", str(tmp_path / "bad"), "simulate", str(path)])
    verdict(11, "CLI determinism", [("nonzero exit codes on clean runs", float(max(codes)), 0.0),
                                    ("differing output files", float(differing), 0.0),
                                    ("corrupted run exit != 1", float(bad != cli.EXIT_VIOLATION), 0.0)])
