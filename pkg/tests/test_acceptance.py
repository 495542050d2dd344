"""Acceptance criteria 1-10; each test records one PASS/FAIL line."""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from resind import chain, characters, diagrams, evolution, freeprob, limitshape, pausing, simulate, thoma
from resind.groups import QComplex, builtin, plancherel_weights

TRIVIAL = builtin("trivial")
Z2 = builtin("z2")
S3 = builtin("s3")
D4 = builtin("d4")
PRESETS = ("P1", "P2", "P3")
CLOCKS = ("exponential", "stable_half")


def _acc_groups():
    yield from ((TRIVIAL, n) for n in range(1, 6))
    yield from ((Z2, n) for n in range(1, 6))
    yield from ((S3, n) for n in range(1, 4))
    yield from ((D4, n) for n in range(1, 4))


def _square_start(n, table):
    entries = [diagrams.YoungDiagram(())] * table.n_irreps
    entries[0] = diagrams.square_diagram(n)
    return diagrams.MultiDiagram(tuple(entries))


# --- 1 -----------------------------------------------------------------------------

def test_c1_exact_algebraic_suite(criterion):
    t0 = time.perf_counter()
    failures = []
    for table, n in _acc_groups():
        cm = chain.build(n, table)
        tag = f"{table.name} n={n}"
        if any(s != 1 for s in cm.row_sums("p")):
            failures.append(f"{tag} row sums")
        if not chain.verify_detailed_balance(cm).ok:
            failures.append(f"{tag} detailed balance")
        for i, lam in enumerate(cm.states):
            for j, mu in enumerate(cm.states):
                if chain.explicit_entry(lam, mu, table) != cm.entry(i, j):
                    failures.append(f"{tag} explicit entry {lam} -> {mu}")
        if not chain.verify_spectrum(cm).ok:
            failures.append(f"{tag} eigen-identity")
    for table in (TRIVIAL, Z2, S3, D4):
        for n in range(1, 9 if table.order <= 2 else 6):
            for lam in diagrams.multi_diagrams(n, table.n_irreps):
                d = diagrams.multi_dim(lam, table)
                if sum(table.dims[z] * diagrams.multi_dim(nu, table) for nu, z in diagrams.cells(lam)) != d:
                    failures.append(f"{table.name} downward branching {lam}")
                up = sum(table.dims[z] * diagrams.multi_dim(mu, table) for mu, z in diagrams.covers(lam))
                if up != (n + 1) * table.order * d:
                    failures.append(f"{table.name} upward branching {lam}")
        for n in range(1, 7):
            total = sum(diagrams.multi_dim(s, table) ** 2 for s in diagrams.multi_diagrams(n, table.n_irreps))
            if total != math.factorial(n) * table.order**n:
                failures.append(f"{table.name} sum dim^2 n={n}")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    criterion(1, ok, f"{len(failures)} exact failures, {elapsed:.1f}s (< 120s)")
    assert not failures, failures[:5]
    assert elapsed < 120


# --- 2 -----------------------------------------------------------------------------

def test_c2_character_suite(criterion):
    failures = []
    for table in (TRIVIAL, Z2, S3):
        for n in range(1, 6 if table.order <= 2 else 4):
            for lam in diagrams.multi_diagrams(n, table.n_irreps):
                for k in range(1, n + 1):
                    for th in range(table.n_classes):
                        rho = characters.ClassType.cycle(k, th, table.n_classes)
                        if characters.cycle_character(lam, k, th, table) != \
                                characters.wreath_normalized_character(lam, rho, n, table):
                            failures.append(f"cycle formula {table.name} {lam} k={k} theta={th}")
    for table in (TRIVIAL, Z2):
        for n in range(1, 5):
            states, types, rows = characters.character_table(n, table)
            order = math.factorial(n) * table.order**n
            sizes = [characters._class_size(rho, table) for rho in types]
            dims = [diagrams.multi_dim(s, table) for s in states]
            for i in range(len(states)):
                for j in range(len(states)):
                    acc = QComplex(0)
                    for c, size in enumerate(sizes):
                        acc = acc + rows[i][c] * rows[j][c].conjugate() * (size * dims[i] * dims[j])
                    if acc != QComplex(order if i == j else 0):
                        failures.append(f"orthogonality {table.name} n={n} ({i},{j})")
    for size in range(11):
        for nu in diagrams.partitions(size):
            r = freeprob.moments_to_cumulants(diagrams.transition_measure(nu).moments(3))
            if r[2] != characters.sigma((2,), nu):
                failures.append(f"Sigma_2 {tuple(nu)}")
    criterion(2, not failures, f"{len(failures)} exact failures")
    assert not failures, failures[:5]


# --- 3 -----------------------------------------------------------------------------

def test_c3_finite_n_size_evolution(criterion):
    worst = 0.0
    for table, nmax in ((Z2, 5), (S3, 3), (D4, 3)):
        w = [float(x) for x in plancherel_weights(table)]
        for n in range(1, nmax + 1):
            cm = chain.build(n, table)
            for start in (0, len(cm.states) // 2, len(cm.states) - 1):
                m0 = np.zeros(len(cm.states))
                m0[start] = 1.0
                lam0 = cm.states[start]
                for m in (1.0, 2.5):
                    for s in (0.5, 1.0, 3.0):
                        law = chain.distribution_at(cm, m0, s, mean=m)
                        decay = math.exp(-s / (n * m))
                        for z in range(table.n_irreps):
                            sizes = np.array([sum(st[z]) for st in cm.states], dtype=float)
                            closed = n * ((1 - decay) * w[z] + decay * sum(lam0[z]) / n)
                            worst = max(worst, abs(float(law @ sizes) - closed))
    ok = worst < 1e-10
    criterion(3, ok, f"max |series - closed form| = {worst:.2e} (tol 1e-10)")
    assert ok


# --- 4 -----------------------------------------------------------------------------

C4_TIMES = (0.25, 0.5, 1.0)


@pytest.mark.slow
def test_c4_monte_carlo_diffusive(criterion):
    n = 200
    cfg = simulate.SimConfig(n, Z2, simulate.Delta(_square_start(n, Z2)), pausing.Exponential(1.0),
                             pausing.ClockMode("diffusive"), C4_TIMES, samples=2000, K=3, seed=20240)
    t0 = time.perf_counter()
    rep = simulate.estimate(cfg)
    elapsed = time.perf_counter() - t0
    init_r = {0: (0.0, 1.0, 0.0, -1.0), 1: (0.0, 0.0, 0.0, 0.0)}
    init_size = (1.0, 0.0)
    bad = []
    worst = 0.0
    for i, t in enumerate(C4_TIMES):
        a = [pausing.a_limit(k, t, "diffusive", m=1.0) for k in (1, 2, 3)]
        for z in range(2):
            expect = (1 - a[0]) * 0.5 + a[0] * init_size[z]
            dev = abs(rep.size_mean[i, z] - expect)
            worst = max(worst, dev / rep.size_se[i, z])
            if dev > 4 * rep.size_se[i, z]:
                bad.append(f"size t={t} zeta={z}")
            for k, col in ((2, 1), (3, 2)):  # R_3 = a_2 R_3(0), R_4 = a_3 R_4(0)
                expect = a[k - 1] * init_r[z][k]
                if abs(rep.r_mean[i, z, col] - expect) > 4 * rep.r_se[i, z, col] + 0.05:
                    bad.append(f"R{k + 1} t={t} zeta={z}")
    ok = not bad and elapsed < 600
    criterion(4, ok, f"{len(bad)} deviations, worst size z-score {worst:.2f}, {elapsed:.0f}s")
    assert ok, bad


# --- 5 -----------------------------------------------------------------------------

@pytest.mark.slow
def test_c5_monte_carlo_stable(criterion):
    n = 100
    times = (0.25, 1.0)
    cfg = simulate.SimConfig(n, TRIVIAL, simulate.Delta(_square_start(n, TRIVIAL)),
                             pausing.OneSidedStable(0.5), pausing.ClockMode("stable", 0.5), times,
                             samples=1000, K=3, seed=777)
    t0 = time.perf_counter()
    rep = simulate.estimate(cfg)
    elapsed = time.perf_counter() - t0
    details = []
    ok = elapsed < 900
    for i, t in enumerate(times):
        expect = -pausing.a_limit(3, t, "stable", alpha=0.5)
        got, se = rep.r_mean[i, 0, 2], rep.r_se[i, 0, 2]
        ok &= abs(got - expect) <= 4 * se + 0.05
        details.append(f"t={t}: R4 {got:.4f} vs {expect:.4f} (SE {se:.4f})")
    criterion(5, ok, "; ".join(details) + f", {elapsed:.0f}s")
    assert ok


# --- 6 -----------------------------------------------------------------------------

def test_c6_evolution_consistency(criterion):
    worst = {"exp_series": 0.0, "stable_series": 0.0, "levy_moments": 0.0, "presets": 0.0}
    for table in (TRIVIAL, Z2, S3):
        for name in PRESETS:
            p = evolution.ensemble_preset(name, table)
            for clock in CLOCKS:
                spec = p.spec(clock)
                for t in (0.3, 1.0, 3.0):
                    cums = evolution.evolve_cumulants(spec, t)
                    rs = (evolution.r_transform_exponential(spec, t) if clock == "exponential"
                          else evolution.r_transform_stable(spec, t))
                    key = "exp_series" if clock == "exponential" else "stable_series"
                    for R, c in zip(rs, cums):
                        coef = evolution.taylor_coefficients(R, p.K)
                        worst[key] = max(worst[key], float(np.max(np.abs(coef - c.as_float()))))
                    flow = (evolution.levy_flow_exponential if clock == "exponential"
                            else lambda l, t, s: evolution.levy_flow_stable(l, t, s))
                    a = evolution.a_factors(spec, t, p.K)
                    for z, l0 in enumerate(spec.levy):
                        lt = (flow(l0, t, 1.0, spec.sigma2[z]) if clock == "exponential"
                              else flow(l0, t, spec.sigma2[z]))
                        for k in range(2, p.K - 1):
                            worst["levy_moments"] = max(worst["levy_moments"],
                                                        abs(lt.moment(k - 1) - a[k - 1] * l0.moment(k - 1)))
                        closed = p.levy_closed(t, clock)[z]
                        for j in range(p.K - 1):
                            worst["presets"] = max(worst["presets"], abs(closed.moment(j) - lt.moment(j)))
                    for f, R in zip(p.r_closed(t, clock), rs):
                        w = np.array([0.05, -0.1, 0.2j, 0.15 + 0.1j])
                        worst["presets"] = max(worst["presets"], float(np.max(np.abs(f(w) - R(w)))))
                        coef = evolution.taylor_coefficients(f, p.K)
                        worst["presets"] = max(worst["presets"],
                                               float(np.max(np.abs(coef - evolution.taylor_coefficients(R, p.K)))))
    tol = {"exp_series": 1e-12, "stable_series": 1e-8, "levy_moments": 1e-6, "presets": 1e-6}
    ok = all(worst[k] < tol[k] for k in tol)
    criterion(6, ok, ", ".join(f"{k} {worst[k]:.1e} (tol {tol[k]:.0e})" for k in tol))
    assert ok


# --- 7 -----------------------------------------------------------------------------

def test_c7_pde_residual(criterion):
    z_pts = (0.3 + 1.0j, -1.2 + 0.5j, 2.0 + 0.8j)
    plan = evolution.EvolutionSpec(Z2, [freeprob.semicircle(0.5, K=8)] * 2)
    res_plan = max(abs(evolution.pde_residual(plan, 0.7, z, h=1e-3, zeta=zz)) for z in z_pts for zz in (0, 1))
    sq = evolution.EvolutionSpec(TRIVIAL, [freeprob.CumulantSeq((0, 1, 0, -1, 0, 2, 0, -5))])
    res_sq = max(abs(evolution.pde_residual(sq, 0.7, z, h=1e-3, K=8)) for z in z_pts)
    coarse = max(abs(evolution.pde_residual(sq, 0.7, z, h=1e-2, K=8)) for z in z_pts)
    ratio = coarse / res_sq
    ok = res_plan < 1e-6 and res_sq < 1e-3 and 50 < ratio < 200
    criterion(7, ok, f"Plancherel {res_plan:.1e} (< 1e-6), square {res_sq:.1e} (< 1e-3), "
                     f"h 1e-2 -> 1e-3 ratio {ratio:.0f} (O(h^2) ~ 100)")
    assert ok


# --- 8 -----------------------------------------------------------------------------

def test_c8_limit_shapes(criterion):
    x = np.linspace(-3, 3, 601)
    semi = freeprob.semicircle(1.0)
    G = lambda z: freeprob.stieltjes(semi, z)
    d = limitshape.diagram_from_measure(G, x, support=(-2.2, 2.2))
    err_vkls = float(np.max(np.abs(d.omega - limitshape.vkls(x))))
    err_round = 0.0
    for size in range(9):
        for nu in diagrams.partitions(size):
            m = diagrams.transition_measure(nu)
            co = diagrams.interlacing(nu)
            grid = np.linspace(co.x[0] - 1, co.x[-1] + 1, 401)
            # wrapped so the numeric inversion runs instead of the exact atomic path
            d2 = limitshape.diagram_from_measure(lambda z, m=m: m.stieltjes(z), grid, support=(co.x[0] - 1, co.x[-1] + 1))
            err_round = max(err_round, float(np.max(np.abs(d2.omega - diagrams.profile(co, grid)))))
    err_inf = 0.0
    for table in (TRIVIAL, Z2, S3):
        for name in PRESETS:
            spec = evolution.ensemble_preset(name, table).spec("exponential")
            for z, shape in enumerate(limitshape.shapes_at_time(spec, 50.0)):
                s = math.sqrt(float(spec.sigma2[z]))
                err_inf = max(err_inf, float(np.max(np.abs(shape.omega - limitshape.vkls(shape.x, s)))))
    ok = err_vkls < 1e-2 and err_round < 2e-2 and err_inf < 2e-2
    criterion(8, ok, f"VKLS {err_vkls:.1e} (< 1e-2), roundtrip {err_round:.1e} (< 2e-2), "
                     f"t -> inf {err_inf:.1e} (< 2e-2)")
    assert ok


# --- 9 -----------------------------------------------------------------------------

def test_c9_thoma_exact_parts(criterion):
    failures = []
    for table in (TRIVIAL, Z2, S3):
        fam = thoma.family("P1", table)
        om = fam.at(100)
        for k in range(1, 5):
            for rho in characters.class_types(k, table.n_classes):
                val = thoma.character_value(om, rho, table)
                identity = rho.entries[0] == diagrams.YoungDiagram((1,) * k) and rho.length() == k
                if val != QComplex(1 if identity else 0):
                    failures.append(f"P1 {table.name} {rho}")
    for n in (10, 100, 1000):
        fam = thoma.family("P2", TRIVIAL, a=[1], b=[0], c=[1])
        N = thoma.round_half_up(math.sqrt(n))
        for k in range(2, 6):
            val = thoma.character_value(fam.at(n), characters.ClassType.cycle(k, 0, 1), TRIVIAL)
            if val != QComplex(Fraction(1, N ** (k - 1))):
                failures.append(f"P2 n={n} k={k}")
    # product over rows for arbitrary types
    table = Z2
    om = thoma.family("P2", table).at(400)
    for rho in characters.class_types(4, 2):
        prod = QComplex(1)
        for theta, j in rho.rows():
            if theta == 0 and j == 1:
                continue
            prod = prod * thoma.character_value(om, characters.ClassType.cycle(j, theta, 2), table)
        if thoma.character_value(om, rho, table) != prod:
            failures.append(f"multiplicativity {rho}")
    criterion(9, not failures, f"exact parts: {len(failures)} failures")
    assert not failures, failures[:5]


@pytest.mark.parametrize("n", [1000, 10000])
def test_c9_scaled_characters(criterion, n):
    worst = 0.0
    where = ""
    for table in (TRIVIAL, Z2, S3):
        for name in ("P2", "P3"):
            fam = thoma.family(name, table)
            for k in range(2, 5):
                for th in range(table.n_classes):
                    lim = thoma.cycle_limit(fam, k, th)
                    if abs(lim) < 1e-12:
                        continue
                    rel = abs(thoma.scaled_cycle_value(fam, n, k, th) - lim) / abs(lim)
                    if rel > worst:
                        worst, where = rel, f"{name} {table.name} k={k} theta={th}"
    ok = worst < 0.02
    criterion(9, ok, f"n={n}: worst relative error {worst:.4f} at {where} (tol 0.02)")
    assert ok


# --- 10 ----------------------------------------------------------------------------

def test_c10_reproducibility(criterion):
    base = dict(n=60, table=Z2, ensemble=simulate.Plancherel(), t_grid=(0.0, 0.5, 1.0), samples=24, K=4, seed=99)
    blobs = {w: simulate.estimate(simulate.SimConfig(workers=w, **base)).to_bytes() for w in (1, 2, 8)}
    ok = blobs[1] == blobs[2] == blobs[8]
    criterion(10, ok, f"byte-identical across workers {{1, 2, 8}}: {ok} ({len(blobs[1])} bytes)")
    assert ok
