"""End-to-end acceptance checks.

Each test prints a single verdict line ``criterion N PASS|FAIL ...`` listing
every measured quantity next to its bound, then asserts the verdict.
"""
import math
import time

import numpy as np
import pytest

from coarsegrain.baths import BosonicBath, FermionLeads
from coarsegrain.cli import build_model, parse_config, run_scenario
from coarsegrain.engine import (
    QuadratureConfig,
    bms_liouvillian,
    compute_T,
    dcg_propagate,
    dcg_propagators,
    stationary_state,
)
from coarsegrain.exact import dephasing_gamma, fano_exact_occupation, two_spin_exact
from coarsegrain.linalg import devectorize, expm, vectorize
from coarsegrain.lindblad import certify_psd, dampening_matrix, lamb_shift, split_hermitian
from coarsegrain.models import (
    FanoParams,
    SpinBosonParams,
    TwoSpinParams,
    fano_bms_population,
    fano_coefficients,
    fano_dcg_population,
    fano_m,
    spin_boson_gibbs,
    spin_boson_m,
    spin_boson_stationary,
    two_spin_dampening,
    two_spin_dcg2,
    two_spin_lamb_shift,
)

from conftest import random_density

LAM_SB = math.sqrt(0.1)


@pytest.fixture
def verdict(request):
    reporter = request.config.pluginmanager.getplugin("terminalreporter")

    def emit(number, title, checks, elapsed, limit):
        ok = all(value <= bound for _, value, bound in checks) and elapsed < limit
        parts = [f"{label} {value:.3g} (bound {bound:g})" for label, value, bound in checks]
        parts.append(f"{elapsed:.1f}s (limit {limit}s)")
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: " + "; ".join(parts)
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        else:
            print(line)
        assert ok, line

    return emit


def interaction_picture(h_s, rho, t):
    u = expm(1j * t * h_s)
    return u @ rho @ u.conj().T


def test_pure_dephasing_is_exact_at_second_order(verdict):
    start = time.perf_counter()
    sb = SpinBosonParams(eps_d=1.0, bath=BosonicBath(1.0, 1.0, 1.0, 1.0), lam=LAM_SB, coupling="dephasing")
    rho0 = np.array([[0.7, 0.3 - 0.2j], [0.3 + 0.2j, 0.3]])
    grid = np.linspace(0.0, 10.0, 41)
    states = dcg_propagate(sb.system(), sb.bath, 2, rho0, grid)
    coherence = max(
        abs(rho[0, 1] - rho0[0, 1] * math.exp(-dephasing_gamma(t, sb.bath, sb.lam))) for t, rho in zip(grid, states)
    )
    population = max(abs(rho[0, 0] - rho0[0, 0]) for rho in states)
    verdict(
        1, "pure dephasing",
        [("coherence vs exp(-Gamma)", coherence, 1e-6), ("population drift", population, 1e-9)],
        time.perf_counter() - start, 10,
    )


def test_fourth_order_adds_nothing_for_pure_dephasing(verdict):
    start = time.perf_counter()
    sb = SpinBosonParams(eps_d=1.0, bath=BosonicBath(1.0, 1.0, 1.0, 1.0), lam=LAM_SB, coupling="dephasing")
    q = QuadratureConfig(nodes_2d=64, nodes_4d=18)
    checks = []
    for tau in (0.5, 2.0, 10.0):
        t2 = compute_T(2, tau, sb.system(), sb.bath, q)
        t4 = compute_T(4, tau, sb.system(), sb.bath, q)
        ratio = np.linalg.norm(t4 - 0.5 * t2 @ t2) / np.linalg.norm(t2) ** 2
        checks.append((f"tau={tau:g} |T4 - T2^2/2|/|T2|^2", ratio, 1e-6))
    verdict(2, "fourth order equals second order under dephasing", checks, time.perf_counter() - start, 60)


def test_two_spin_recurrence(verdict):
    start = time.perf_counter()
    params = TwoSpinParams(lam=0.25, omega=1.0, omega_b=2.0, rho_b00=0.5)
    rho_b = np.diag([0.5, 0.5])
    detuning = params.omega_b - params.omega
    # populations decouple from coherences; the gap to the exact curve scales with |rho00 - 1/2|,
    # so a pure state is the worst case
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    grid = np.linspace(0.0, 20.0, 801)
    gap = max(abs(two_spin_dcg2(params, rho0, t)[0, 0] - two_spin_exact(params, rho0, rho_b, t)[0, 0]) for t in grid)
    recurrence_time = 2 * math.pi / detuning
    exact_return = abs(two_spin_exact(params, rho0, rho_b, recurrence_time)[0, 0] - rho0[0, 0])
    closed_return = max(
        abs(two_spin_dcg2(params, rho0, k * math.pi / detuning)[0, 0] - rho0[0, 0]) for k in range(1, 7)
    )
    verdict(
        3, "two-spin recurrences",
        [
            ("max |rho00 dcg2 - exact|", gap, 0.05),
            ("exact return at (W-w)t=2pi", exact_return, 1e-8),
            ("dcg2 return at (W-w)t=k pi", closed_return, 1e-12),
        ],
        time.perf_counter() - start, 30,
    )


def positivity_cases(rng):
    rho_b = random_density(rng, 2)
    two_spin = TwoSpinParams(lam=0.25, omega=1.0, omega_b=2.0, rho_b00=float(rho_b[0, 0].real))
    sb = SpinBosonParams(eps_d=1.0, bath=BosonicBath(1.0, 1.0, 1.0, 1.0), lam=LAM_SB, coupling="dissipative")
    fano = FanoParams()
    return {
        "two-spin, non-diagonal bath": (two_spin.system(), two_spin.bath("heisenberg", rho_b)),
        "spin-boson": (sb.system(), sb.bath),
        "fano": (fano.system(), fano.leads),
    }


def random_dampening_case(rng, kind):
    tau = float(rng.uniform(0.05, 20))
    if kind == 0:
        p = TwoSpinParams(omega=rng.uniform(-2, 2), omega_b=rng.uniform(-2, 2), rho_b00=0.5)
        return tau, p.system(), p.bath("heisenberg", random_density(rng, 2))
    if kind == 1:
        bath = BosonicBath(rng.uniform(0.2, 2), rng.uniform(0.5, 3), rng.uniform(0.3, 3), rng.uniform(0.2, 5))
        sb = SpinBosonParams(rng.uniform(0.2, 3), bath, 0.3, "dissipative" if rng.integers(2) else "dephasing")
        return tau, sb.system(), sb.bath
    leads = FermionLeads(*rng.uniform(0.2, 2, size=2), *rng.uniform(0.3, 4, size=2), *rng.uniform(-2, 2, size=2))
    fano = FanoParams(rng.uniform(-2, 2), leads)
    return (tau, *split_hermitian(fano.system(), fano.leads))


def test_second_order_positivity(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(4242)
    grid = np.linspace(0.0, 20.0, 41)
    checks = []
    for name, (system, bath) in positivity_cases(rng).items():
        props = dcg_propagators(system, bath, 2, grid)
        worst = 0.0
        for _ in range(50):
            rho0 = random_density(rng, system.dim, rank=int(rng.integers(1, 3)))
            for prop in props:
                rho = devectorize(prop @ vectorize(rho0))
                worst = min(worst, np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0])
        checks.append((f"{name} -min eig", -worst, 1e-8))
    worst_psd = -math.inf
    for draw in range(200):
        tau, system, bath = random_dampening_case(rng, draw % 3)
        gamma = dampening_matrix(tau, system, bath, QuadratureConfig(panels=2))
        report = certify_psd(gamma)
        norm = np.abs(np.linalg.eigvalsh(gamma.matrix)).max()
        worst_psd = max(worst_psd, -report.min_eig / max(norm, 1e-300))
    checks.append(("200 dampening draws -min eig/norm", worst_psd, 1e-10))
    verdict(4, "second-order positivity", checks, time.perf_counter() - start, 300)


def richardson_stationary(params):
    """Long-window fourth-order fixed point from windows 10 and 20, assuming a 1/tau approach."""
    short = spin_boson_stationary(4, 10.0, params, nodes=16)
    long = spin_boson_stationary(4, 20.0, params, nodes=20)
    return 2 * long - short, long


def test_spin_boson_thermalization(verdict):
    start = time.perf_counter()
    checks = []
    for beta in (0.2, 1.0, 5.0):
        params = SpinBosonParams(eps_d=1.0, bath=BosonicBath(1.0, 1.0, 1.0, beta), lam=LAM_SB, coupling="dissipative")
        gibbs = spin_boson_gibbs(params)
        dcg2 = spin_boson_stationary(2, 1e4, params)
        bms = stationary_state(bms_liouvillian(params.system(), params.bath), 2)[0, 0].real
        dcg4, dcg4_window = richardson_stationary(params)
        checks += [
            (f"beta={beta:g} dcg2", abs(dcg2 - gibbs), 1e-3),
            (f"beta={beta:g} bms", abs(bms - gibbs), 1e-3),
            (f"beta={beta:g} dcg4 (extrapolated)", abs(dcg4 - gibbs), 1e-3),
            (f"beta={beta:g} dcg4 (tau=20)", abs(dcg4_window - gibbs), 1e-3),
        ]
    verdict(5, "spin-boson thermalization", checks, time.perf_counter() - start, 300)


def test_markov_limit_of_the_rate(verdict):
    start = time.perf_counter()
    params = SpinBosonParams(eps_d=1.0, bath=BosonicBath(1.0, 1.0, 1.0, 1.0), lam=LAM_SB, coupling="dissipative")
    eps = params.eps_d
    markov = 1.0 * eps * math.exp(-eps / 1.0) / (math.exp(eps) - 1.0)
    tau = 200.0
    rel = abs(spin_boson_m(tau, params).m11 / tau + markov) / markov
    verdict(6, "Markov limit of m11", [("relative gap at tau=200", rel, 1e-2)], time.perf_counter() - start, 30)


FIG5 = FanoParams(eps_d=1.0, leads=FermionLeads(1.0, 1.0, 2.0, 1.0, 0.0, 0.0), lam=LAM_SB)


def test_fano_anderson_ordering(verdict, tmp_path):
    start = time.perf_counter()
    grid = np.linspace(0.1, 1.0, 10)
    exact = np.array([1.0 - fano_exact_occupation(t, FIG5, 0.0) for t in grid])
    dcg2 = np.array([fano_dcg_population(2, t, t, FIG5, 1.0) for t in grid])
    dcg4 = np.array([fano_dcg_population(4, t, t, FIG5, 1.0) for t in grid])
    bms = np.array([fano_bms_population(t, FIG5, 1.0) for t in grid])
    e2, e4, eb = (float(np.abs(x - exact).max()) for x in (dcg2, dcg4, bms))

    outputs = {}
    for side, width in (("r", 1.0), ("r", 5.0), ("l", 2.0), ("l", 7.0)):
        out = tmp_path / f"{side}{width:g}"
        text = f"preset = fig5\nmethods = bms\nleads.eps_{side} = 1.0\nleads.delta_{side} = {width}\noutput = {out}\n"
        run_scenario(parse_config(text))
        outputs.setdefault(side, []).append((out / "bms.csv").read_bytes())
    mismatched = sum(len(set(v)) - 1 for v in outputs.values())
    verdict(
        7, "resonant level short-time ordering",
        [("|dcg4| - |dcg2|", e4 - e2, 0.0), ("|dcg2| - |bms|", e2 - eb, 0.0), ("differing bms csv files", mismatched, 0)],
        time.perf_counter() - start, 300,
    )


def test_flatband_cancellation(verdict):
    start = time.perf_counter()
    s = parse_config("preset = flatband\n")
    _, flat = build_model(s.model, s.params)
    checks = []
    for tau in (0.5, 2.0, 10.0):
        c = fano_coefficients(tau, flat, 4)
        net11 = c.p11 - 0.5 * (c.m11**2 + c.m14 * c.m41)
        net14 = c.p14 - 0.5 * (c.m11 * c.m14 + c.m14 * c.m44)
        checks.append((f"tau={tau:g} net/|p11|", max(abs(net11), abs(net14)) / abs(c.p11), 0.02))
    grid = np.linspace(0.5, 20.0, 40)
    gap = max(abs(fano_dcg_population(2, t, t, flat, 1.0) - (1.0 - fano_exact_occupation(t, flat, 0.0))) for t in grid)
    checks.append(("max |dcg2 - exact|", gap, 1e-3))
    verdict(8, "flatband cancellation", checks, time.perf_counter() - start, 120)


def short_time_error(order, lam, rho0, t):
    params = TwoSpinParams(lam=lam, omega=1.0, omega_b=2.0, rho_b00=1.0)
    system = params.system("sxsz")
    approx = dcg_propagate(system, params.bath("sigma_z"), order, rho0, [t])[0]
    exact = interaction_picture(system.hamiltonian, two_spin_exact(params, rho0, np.diag([1.0, 0.0]), t, "sxsz"), t)
    return np.abs(approx - exact).max()


def test_short_time_order_scaling(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    t_star = 0.1
    checks = []
    for order in (2, 4):
        bound = 2.0 ** -(order + 1) + 0.15
        worst = 0.0
        for _ in range(12):
            rho0 = random_density(rng, 2)
            worst = max(worst, short_time_error(order, 0.25, rho0, t_star) / short_time_error(order, 0.5, rho0, t_star))
        checks.append((f"dcg{order} error ratio", worst, bound))
    verdict(9, "short-time order scaling", checks, time.perf_counter() - start, 120)


def test_engine_matches_closed_forms(verdict):
    start = time.perf_counter()
    q = QuadratureConfig(panels=4)
    two_spin = TwoSpinParams(lam=0.25, omega=1.0, omega_b=2.0, rho_b00=0.7)
    sb = SpinBosonParams(eps_d=1.0, bath=BosonicBath(1.0, 1.0, 1.0, 1.0), lam=LAM_SB, coupling="dissipative")
    worst = {"two-spin gamma": 0.0, "two-spin lamb shift": 0.0, "spin-boson m": 0.0, "fano m": 0.0}

    def rel(a, b):
        return abs(a - b) / max(abs(b), 1e-300)

    for tau in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        gamma = dampening_matrix(tau, two_spin.system(), two_spin.bath(), q)
        for (a, b, c, d), value in two_spin_dampening(two_spin, tau).items():
            worst["two-spin gamma"] = max(worst["two-spin gamma"], rel(gamma.element(a, b, c, d), value))
        h = lamb_shift(2, tau, two_spin.system(), two_spin.bath(), q).matrix
        ref = two_spin_lamb_shift(two_spin, tau, 2)
        worst["two-spin lamb shift"] = max(worst["two-spin lamb shift"], np.abs(h - ref).max() / np.abs(ref).max())
        for name, (system, bath), closed in (
            ("spin-boson m", (sb.system(), sb.bath), spin_boson_m(tau, sb)),
            ("fano m", (FIG5.system(), FIG5.leads), fano_m(tau, FIG5)),
        ):
            t2 = compute_T(2, tau, system, bath, q)
            for got, want in ((t2[0, 0], closed.m11), (t2[0, 3], closed.m14), (t2[3, 0], closed.m41), (t2[3, 3], closed.m44)):
                worst[name] = max(worst[name], rel(got, want))
    verdict(
        10, "engine vs closed forms",
        [(name, value, 1e-5) for name, value in worst.items()],
        time.perf_counter() - start, 120,
    )
