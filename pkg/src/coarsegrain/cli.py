"""Scenario runner and command-line entry point.

A scenario is described by flat ``key = value`` lines (``#`` starts a
comment, dotted keys address model parameters).  Running it writes one CSV
trajectory per method plus ``report.json`` with summary metrics.

All trajectories are reported in the interaction picture with respect to
the system Hamiltonian, which is the frame the coarse-grained generators
live in; populations are frame independent.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .baths import BosonicBath, FermionLeads
from .engine import QuadratureConfig, bms_liouvillian, dcg_propagate
from .errors import ConfigError, DomainError, FormatError, NumericalFailure, UnsupportedError
from .exact import dephasing_gamma, fano_exact_occupation, two_spin_exact
from .linalg import check_density_matrix, devectorize, expm, jacobi_eigenvalues, vectorize
from .models import (
    FanoParams,
    SpinBosonParams,
    TwoSpinParams,
    fano_bms_population,
    fano_dcg_population,
    spin_boson_population,
)

SQRT_01 = math.sqrt(0.1)
# largest tolerated change of a fourth-order population under node refinement
POPULATION_CHECK = 1e-3

_TWO_SPIN = {
    "system.lam": 0.25,
    "system.omega": 1.0,
    "bath.omega_b": 2.0,
    "bath.rho_b00": 0.5,
    "bath.rho_b01_re": 0.0,
    "bath.rho_b01_im": 0.0,
}
_SPIN_BOSON = {
    "system.lam": SQRT_01,
    "system.eps_d": 1.0,
    "bath.g0": 1.0,
    "bath.s": 1.0,
    "bath.omega_c": 1.0,
    "bath.beta": 1.0,
}
_FANO = {
    "system.lam": SQRT_01,
    "system.eps_d": 1.0,
    "leads.gamma_l0": 1.0,
    "leads.gamma_r0": 1.0,
    "leads.delta_l": 2.0,
    "leads.delta_r": 1.0,
    "leads.eps_l": 0.0,
    "leads.eps_r": 0.0,
}
_DCG = {"dcg1", "dcg2", "dcg3", "dcg4"}

MODELS = {
    "two-spin-heisenberg": (_TWO_SPIN, _DCG | {"exact"}),
    "two-spin-sxsz": (_TWO_SPIN, _DCG | {"exact"}),
    "spin-boson-dephasing": (_SPIN_BOSON, _DCG | {"bms", "exact"}),
    "spin-boson-dissipative": (_SPIN_BOSON, _DCG | {"bms"}),
    "fano-anderson": (_FANO, _DCG | {"bms", "exact"}),
}

PRESETS = {
    "fig1": {
        "model": "two-spin-heisenberg",
        "methods": "dcg2,exact",
        "system.lam": "0.25",
        "system.omega": "1.0",
        "bath.omega_b": "2.0",
        "bath.rho_b00": "0.5",
        "t_max": "20",
        "n_points": "401",
        "rho0": "custom",
        "rho0.re": "0.9, 0.3; 0.3, 0.1",
    },
    "fig2": {
        "model": "two-spin-sxsz",
        "methods": "dcg1,dcg2,dcg3,dcg4,exact",
        "system.lam": "0.5",
        "system.omega": "1.0",
        "bath.rho_b00": "1.0",
        "t_max": "10",
        "n_points": "101",
        "rho0": "custom",
        "rho0.re": "0.9, 0.3; 0.3, 0.1",
    },
    "fig3": {
        "model": "spin-boson-dissipative",
        "methods": "dcg2,dcg4,bms",
        "system.lam": repr(SQRT_01),
        "system.eps_d": "1.0",
        "bath.beta": "1.0",
        "bath.omega_c": "1.0",
        "bath.g0": "1.0",
        "bath.s": "1.0",
        "t_max": "30",
        "n_points": "31",
        "rho0": "excited",
        "quad.nodes_4d": "20",
    },
    "fig5": {
        "model": "fano-anderson",
        "methods": "dcg2,dcg4,bms,exact",
        "system.lam": repr(SQRT_01),
        "system.eps_d": "1.0",
        "leads.gamma_l0": "1.0",
        "leads.gamma_r0": "1.0",
        "leads.delta_l": "2.0",
        "leads.delta_r": "1.0",
        "leads.eps_l": "0.0",
        "leads.eps_r": "0.0",
        "t_max": "20",
        "n_points": "201",
        "rho0": "ground",
    },
    "flatband": {
        "model": "fano-anderson",
        "methods": "dcg2,dcg4,bms,exact",
        "system.lam": repr(SQRT_01),
        "system.eps_d": "1.0",
        "leads.gamma_l0": "1.0",
        "leads.gamma_r0": "1.0",
        "leads.delta_l": "1000.0",
        "leads.delta_r": "1000.0",
        "leads.eps_l": "1.0",
        "leads.eps_r": "1.0",
        "t_max": "20",
        "n_points": "81",
        "rho0": "ground",
    },
}

_GENERAL_KEYS = {
    "preset", "model", "methods", "t_max", "n_points", "rho0", "rho0.re", "rho0.im",
    "output", "parallel", "quad.nodes_2d", "quad.nodes_3d", "quad.nodes_4d", "quad.tol", "quad.panels",
}
_REQUIRED = ("model", "methods", "t_max", "n_points")


@dataclass
class Scenario:
    model: str
    methods: tuple
    params: dict
    t_max: float
    n_points: int
    rho0: np.ndarray
    output: Path = Path("dcg-out")
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    parallel: bool = False

    @property
    def t_grid(self):
        return np.linspace(0.0, self.t_max, self.n_points)


@dataclass
class MethodResult:
    method: str
    states: list | None = None
    error: str | None = None
    wall_time: float = 0.0
    max_trace_deviation: float | None = None
    min_eigenvalue: float | None = None
    max_deviation_from_exact: float | None = None


@dataclass
class RunReport:
    scenario: Scenario
    results: dict
    pair_deltas: dict

    @property
    def failed(self):
        return [m for m, r in self.results.items() if r.error is not None]

    def to_dict(self):
        return {
            "model": self.scenario.model,
            "methods": {
                m: {
                    "error": r.error,
                    "wall_time": r.wall_time,
                    "max_trace_deviation": r.max_trace_deviation,
                    "min_eigenvalue": r.min_eigenvalue,
                    "max_deviation_from_exact": r.max_deviation_from_exact,
                }
                for m, r in self.results.items()
            },
            "pair_deltas": {f"{a}-{b}": v for (a, b), v in self.pair_deltas.items()},
        }


# ---------------------------------------------------------------------------
# configuration


def _parse_lines(text):
    entries, problems = {}, []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {number}: expected 'key = value'")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            problems.append(f"line {number}: empty key")
            continue
        entries[key] = value
    return entries, problems


def _parse_matrix(text):
    rows = [r for r in text.split(";") if r.strip()]
    return np.array([[float(x) for x in row.replace(",", " ").split()] for row in rows])


def _initial_state(kind, entries, h_s, problems):
    d = h_s.shape[0]
    energies, vectors = np.linalg.eigh(h_s)
    if kind == "ground":
        v = vectors[:, 0]
    elif kind == "excited":
        v = vectors[:, -1]
    elif kind == "plus":
        v = np.ones(d) / math.sqrt(d)
    elif kind == "custom":
        if "rho0.re" not in entries:
            problems.append("rho0 = custom requires rho0.re")
            return None
        try:
            rho = _parse_matrix(entries["rho0.re"]).astype(complex)
            if "rho0.im" in entries:
                rho = rho + 1j * _parse_matrix(entries["rho0.im"])
            if rho.shape != (d, d):
                raise DomainError(f"rho0 must be {d}x{d}")
            rho = check_density_matrix(rho, tol=1e-9)
            if jacobi_eigenvalues(rho)[0] < -1e-9:
                raise DomainError("rho0 is not positive semidefinite")
            return rho
        except (ValueError, DomainError) as exc:
            problems.append(f"invalid custom rho0: {exc}")
            return None
    else:
        problems.append(f"unknown rho0 {kind!r} (ground, excited, plus, custom)")
        return None
    return np.outer(v, v.conj()).astype(complex)


def build_model(model, params):
    """Model objects ``(kind, param record)`` for a scenario."""
    if model.startswith("two-spin"):
        p = TwoSpinParams(params["system.lam"], params["system.omega"], params["bath.omega_b"], params["bath.rho_b00"])
        return "two-spin", p
    if model.startswith("spin-boson"):
        bath = BosonicBath(params["bath.g0"], params["bath.s"], params["bath.omega_c"], params["bath.beta"])
        coupling = "dephasing" if model.endswith("dephasing") else "dissipative"
        return "spin-boson", SpinBosonParams(params["system.eps_d"], bath, params["system.lam"], coupling)
    leads = FermionLeads(
        params["leads.gamma_l0"], params["leads.gamma_r0"], params["leads.delta_l"],
        params["leads.delta_r"], params["leads.eps_l"], params["leads.eps_r"],
    )
    return "fano", FanoParams(params["system.eps_d"], leads, params["system.lam"])


def _bath_state(params):
    c = complex(params["bath.rho_b01_re"], params["bath.rho_b01_im"])
    p = params["bath.rho_b00"]
    return np.array([[p, c], [c.conjugate(), 1 - p]], dtype=complex)


def _system_and_bath(model, params):
    kind, p = build_model(model, params)
    if kind == "two-spin":
        variant = "heisenberg" if model.endswith("heisenberg") else "sxsz"
        coupling = "heisenberg" if variant == "heisenberg" else "sigma_z"
        return p.system(variant), p.bath(coupling, _bath_state(params))
    if kind == "spin-boson":
        return p.system(), p.bath
    return p.system(), p.leads


def parse_config(text) -> Scenario:
    """Validated scenario from ``key = value`` text; every problem is reported at once."""
    entries, problems = _parse_lines(text)
    merged = {}
    if "preset" in entries:
        name = entries["preset"]
        if name not in PRESETS:
            problems.append(f"unknown preset {name!r}")
        else:
            merged.update(PRESETS[name])
    merged.update({k: v for k, v in entries.items() if k != "preset"})

    model = merged.get("model")
    if model is not None and model not in MODELS:
        problems.append(f"unknown model {model!r}")
        model = None
    param_keys = set(MODELS[model][0]) if model else set().union(*(set(m[0]) for m in MODELS.values()))
    for key in merged:
        if key not in _GENERAL_KEYS and key not in param_keys:
            problems.append(f"unknown key {key!r}")
    missing = [k for k in _REQUIRED if k not in merged]
    if missing:
        problems.append("missing required keys: " + ", ".join(missing))

    def number(key, cast=float):
        try:
            return cast(merged[key])
        except (TypeError, ValueError):
            problems.append(f"{key} must be a number, got {merged[key]!r}")
            return None

    t_max = number("t_max") if "t_max" in merged else None
    if t_max is not None and not (math.isfinite(t_max) and t_max > 0):
        problems.append("t_max > 0 required")
    n_points = number("n_points", int) if "n_points" in merged else None
    if n_points is not None and n_points < 2:
        problems.append("n_points ≥ 2 required")

    methods = ()
    if "methods" in merged:
        methods = tuple(m.strip().lower() for m in merged["methods"].split(",") if m.strip())
        if not methods:
            problems.append("methods must not be empty")
        if model:
            allowed = MODELS[model][1]
            for m in methods:
                if m not in allowed:
                    problems.append(f"method {m!r} is not available for {model} (choose from {sorted(allowed)})")

    params = {}
    if model:
        for key, default in MODELS[model][0].items():
            params[key] = number(key) if key in merged else default

    quad_kwargs = {}
    for key, cast in (("quad.nodes_2d", int), ("quad.nodes_3d", int), ("quad.nodes_4d", int), ("quad.tol", float), ("quad.panels", int)):
        if key in merged:
            value = number(key, cast)
            if value is not None:
                quad_kwargs[key.split(".", 1)[1]] = value
    try:
        quad = QuadratureConfig(**quad_kwargs)
    except DomainError as exc:
        problems.append(str(exc))
        quad = QuadratureConfig()

    rho0 = None
    if model and None not in params.values():
        try:
            system, _ = _system_and_bath(model, params)
            rho0 = _initial_state(merged.get("rho0", "ground").lower(), merged, system.hamiltonian, problems)
        except (DomainError, ValueError) as exc:
            problems.append(f"invalid model parameters: {exc}")
        if rho0 is not None and model == "fano-anderson" and "exact" in methods:
            if abs(rho0[0, 1]) > 0:
                problems.append("exact fano-anderson solution needs a diagonal rho0")

    parallel = merged.get("parallel", "false").lower() in ("1", "true", "yes")
    if problems:
        raise ConfigError(problems)
    return Scenario(model, methods, params, t_max, n_points, rho0, Path(merged.get("output", "dcg-out")), quad, parallel)


# ---------------------------------------------------------------------------
# running


def _to_interaction_picture(h_s, rho, t):
    u = expm(1j * t * h_s)
    return u @ rho @ u.conj().T


def _diagonal(rho):
    return abs(rho[0, 1]) == 0 and abs(rho[1, 0]) == 0


def _population_states(values):
    return [np.diag([p, 1.0 - p]).astype(complex) for p in values]


def _run_method(s: Scenario, method):
    system, bath = _system_and_bath(s.model, s.params)
    kind, p = build_model(s.model, s.params)
    grid = s.t_grid
    rho0 = s.rho0
    if method == "exact":
        if kind == "two-spin":
            variant = "heisenberg" if s.model.endswith("heisenberg") else "sxsz"
            rho_b = _bath_state(s.params)
            return [
                _to_interaction_picture(system.hamiltonian, two_spin_exact(p, rho0, rho_b, t, variant), t)
                for t in grid
            ]
        if kind == "spin-boson":
            out = []
            for t in grid:
                decay = math.exp(-dephasing_gamma(t, p.bath, p.lam))
                out.append(np.array([[rho0[0, 0], rho0[0, 1] * decay], [rho0[1, 0] * decay, rho0[1, 1]]]))
            return out
        n0 = rho0[1, 1].real
        return _population_states([1.0 - fano_exact_occupation(t, p, n0) for t in grid])
    if method == "bms":
        if kind == "fano" and _diagonal(rho0):
            return _population_states([fano_bms_population(t, p, rho0[0, 0].real) for t in grid])
        gen = bms_liouvillian(system, bath)
        return [devectorize(expm(gen * t) @ vectorize(rho0)) for t in grid]
    order = int(method[3:])
    if order in (2, 4) and _diagonal(rho0) and (kind == "fano" or s.model == "spin-boson-dissipative"):
        pops = []
        for t in grid:
            if t == 0:
                pops.append(rho0[0, 0].real)
            elif kind == "fano":
                pops.append(fano_dcg_population(order, t, t, p, rho0[0, 0].real))
            else:
                pops.append(
                    spin_boson_population(order, t, p, rho0[0, 0].real, nodes=s.quad.nodes_4d, check_tol=POPULATION_CHECK)
                )
        return _population_states(pops)
    return dcg_propagate(system, bath, order, rho0, grid, s.quad)


def _metrics(result: MethodResult):
    states = result.states
    result.max_trace_deviation = float(max(abs(np.trace(r) - 1.0) for r in states))
    result.min_eigenvalue = float(min(jacobi_eigenvalues(0.5 * (r + r.conj().T))[0] for r in states))


def _timed(s, method):
    start = time.perf_counter()
    result = MethodResult(method)
    try:
        result.states = _run_method(s, method)
        _metrics(result)
    except (NumericalFailure, DomainError, UnsupportedError, FloatingPointError, np.linalg.LinAlgError) as exc:
        result.states, result.error = None, f"{type(exc).__name__}: {exc}"
    result.wall_time = time.perf_counter() - start
    return result


def format_value(x):
    return format(float(x) + 0.0, ".17g")


def csv_text(grid, states):
    d = states[0].shape[0]
    header = ["t"]
    for a in range(d):
        for b in range(d):
            header += [f"re_rho_{a}_{b}", f"im_rho_{a}_{b}"]
    lines = [",".join(header)]
    for t, rho in zip(grid, states):
        row = [format_value(t)]
        for a in range(d):
            for b in range(d):
                row += [format_value(rho[a, b].real), format_value(rho[a, b].imag)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def population_csv_text(grid, states):
    lines = ["t,rho00"] + [f"{format_value(t)},{format_value(r[0, 0].real)}" for t, r in zip(grid, states)]
    return "\n".join(lines) + "\n"


def run_scenario(s: Scenario, write=True) -> RunReport:
    """Run every method, isolating failures, and optionally write the outputs."""
    if s.parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda m: _timed(s, m), s.methods))
    else:
        results = [_timed(s, m) for m in s.methods]
    by_method = {r.method: r for r in results}
    exact = by_method.get("exact")
    if exact is not None and exact.states is not None:
        for r in results:
            if r.states is not None:
                r.max_deviation_from_exact = float(
                    max(np.abs(a - b).max() for a, b in zip(r.states, exact.states))
                )
    deltas = {}
    ok = [r for r in results if r.states is not None]
    for i, ra in enumerate(ok):
        for rb in ok[i + 1:]:
            deltas[(ra.method, rb.method)] = float(max(np.abs(a - b).max() for a, b in zip(ra.states, rb.states)))
    report = RunReport(s, by_method, deltas)
    if write:
        out = Path(s.output)
        out.mkdir(parents=True, exist_ok=True)
        for r in ok:
            (out / f"{r.method}.csv").write_bytes(csv_text(s.t_grid, r.states).encode())
            if s.model == "fano-anderson":
                (out / f"{r.method}_populations.csv").write_bytes(population_csv_text(s.t_grid, r.states).encode())
        (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return report


# ---------------------------------------------------------------------------
# comparison


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path} is empty")
    return rows[0], np.array([[float(x) for x in row] for row in rows[1:]])


def compare(csv_a, csv_b):
    """Per-column ``(max |a - b|, t at the maximum)`` of two trajectory files."""
    head_a, data_a = _read_csv(csv_a)
    head_b, data_b = _read_csv(csv_b)
    if head_a != head_b:
        raise FormatError("CSV headers differ")
    if data_a.shape != data_b.shape:
        raise FormatError("CSV row counts differ")
    table = {}
    for j, name in enumerate(head_a[1:], start=1):
        diff = np.abs(data_a[:, j] - data_b[:, j])
        k = int(np.argmax(diff)) if diff.size else 0
        table[name] = (float(diff[k]) if diff.size else 0.0, float(data_a[k, 0]) if diff.size else 0.0)
    return table


# ---------------------------------------------------------------------------
# invariant suite


def invariant_checks():
    """Fast consistency checks on default parameters; yields ``(name, passed, detail)``."""
    from .engine import build_generator, stationary_state
    from .lindblad import certify_psd, dampening_matrix, split_hermitian
    from .models import spin_boson_gibbs, two_spin_dcg2

    p = TwoSpinParams()
    rho0 = np.full((2, 2), 0.5, dtype=complex)
    engine = dcg_propagate(p.system(), p.bath(), 2, rho0, [0.5, 2.0])
    closed = [two_spin_dcg2(p, rho0, t) for t in (0.5, 2.0)]
    err = max(np.abs(a - b).max() for a, b in zip(engine, closed))
    yield "two-spin DCG2 engine matches closed form", err < 1e-8, f"{err:.2e}"

    sb = SpinBosonParams()
    fano = FanoParams()
    for name, (system, bath) in {
        "two-spin": (p.system(), p.bath()),
        "spin-boson": (sb.system(), sb.bath),
        "fano": split_hermitian(fano.system(), fano.leads),
    }.items():
        rep = certify_psd(dampening_matrix(1.0, system, bath))
        yield f"{name} dampening matrix is PSD", rep.is_psd, f"min eig {rep.min_eig:.2e}"

    deph = SpinBosonParams(coupling="dephasing")
    rho = dcg_propagate(deph.system(), deph.bath, 2, rho0, [3.0])[0]
    err = abs(rho[0, 1] - 0.5 * math.exp(-dephasing_gamma(3.0, deph.bath, deph.lam)))
    yield "pure dephasing DCG2 is exact", err < 1e-6, f"{err:.2e}"

    st = stationary_state(bms_liouvillian(sb.system(), sb.bath), 2)
    err = abs(st[0, 0].real - spin_boson_gibbs(sb))
    yield "BMS stationary state is thermal", err < 1e-10, f"{err:.2e}"

    gen = build_generator(p.system("sxsz"), p.bath("sigma_z"), 4, 1.0, QuadratureConfig(nodes_4d=6))
    prop = gen.propagator()
    drift = float(np.abs(vectorize(np.eye(2)) @ prop - vectorize(np.eye(2))).max())
    yield "DCG4 propagator preserves the trace", drift < 1e-10, f"{drift:.2e}"


# ---------------------------------------------------------------------------
# command line


def _load_scenario(arg):
    path = Path(arg)
    if path.exists():
        return parse_config(path.read_text(encoding="utf-8"))
    if arg in PRESETS:
        return parse_config(f"preset = {arg}")
    raise ConfigError(f"no config file or preset named {arg!r}")


def _apply_overrides(s: Scenario, args):
    quad_kwargs = {}
    for name in ("nodes_2d", "nodes_3d", "nodes_4d", "tol"):
        value = getattr(args, name.replace("nodes_", "quad_nodes_"), None)
        if value is not None:
            quad_kwargs[name] = value
    try:
        quad = replace(s.quad, **quad_kwargs)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    out = Path(args.out_dir) if args.out_dir else s.output
    return replace(s, quad=quad, output=out, parallel=s.parallel or args.parallel)


def _cmd_run(args):
    s = _apply_overrides(_load_scenario(args.config), args)
    report = run_scenario(s)
    for method, r in report.results.items():
        if r.error:
            print(f"{method}: FAILED {r.error}")
        else:
            extra = "" if r.max_deviation_from_exact is None else f" max|d-exact|={r.max_deviation_from_exact:.3e}"
            print(
                f"{method}: trace dev {r.max_trace_deviation:.2e}, min eig {r.min_eigenvalue:.3e},"
                f" {r.wall_time:.2f}s{extra}"
            )
    print(f"outputs written to {s.output}")
    return 2 if report.failed else 0


def _cmd_compare(args):
    table = compare(args.a, args.b)
    width = max(len(k) for k in table) if table else 1
    for name, (dev, t) in table.items():
        print(f"{name:<{width}}  {dev:.6e}  at t={t:g}")
    return 0


def _cmd_presets(_args):
    for name, values in PRESETS.items():
        print(f"{name}: " + ", ".join(f"{k}={v}" for k, v in values.items()))
    return 0


def _cmd_check(_args):
    ok = True
    for name, passed, detail in invariant_checks():
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}  ({detail})")
    return 0 if ok else 2


def build_parser():
    parser = argparse.ArgumentParser(prog="dcg", description="Coarse-grained master equation scenarios")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file or preset")
    run.add_argument("config")
    run.add_argument("--out-dir")
    run.add_argument("--quad-nodes-2d", type=int)
    run.add_argument("--quad-nodes-3d", type=int)
    run.add_argument("--quad-nodes-4d", type=int)
    run.add_argument("--tol", type=float)
    run.add_argument("--parallel", action="store_true")
    run.set_defaults(func=_cmd_run)
    cmp_ = sub.add_parser("compare", help="max deviation per column of two CSV files")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.set_defaults(func=_cmd_compare)
    sub.add_parser("presets", help="list built-in scenarios").set_defaults(func=_cmd_presets)
    sub.add_parser("check", help="run the invariant suite").set_defaults(func=_cmd_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
