"""Perturbative coarse-grained generators of orders one to four.

The propagator of the reduced state over a window ``[0, tau]`` is expanded
in powers of the coupling,

    rho(tau) = (1 + lam T1 + lam^2 T2 + lam^3 T3 + lam^4 T4 + ...) rho0,

and the generator ``L = sum_n lam^n L_n`` is fixed by demanding that
``exp(tau L)`` reproduces the same series order by order.

Each ``T_n`` is a sum over ways of distributing ``n`` coupling operators
between the left (ket) and right (bra) sides of ``rho0``.  Left operators are
time ordered with the latest time leftmost, right operators with the
earliest time leftmost.  The ordering constraints are handled exactly by
splitting ``[0, tau]^n`` into ordered simplices and integrating each with a
collapsed tensor-product Gauss-Legendre rule.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .baths import BosonicBath, CorrelationIndex, FermionLeads, TwoSpinBath
from .errors import DomainError, NumericalFailure, UnsupportedError
from .linalg import (
    HERMITIAN_TOL,
    check_density_matrix,
    commutator_superop,
    devectorize,
    expm,
    hermitian_deviation,
    is_hermitian,
    vectorize,
)

TAU_MIN = 1e-6


@dataclass(frozen=True)
class QuadratureConfig:
    nodes_2d: int = 32
    nodes_3d: int = 16
    nodes_4d: int = 10
    tol: float = 1e-6
    panels: int = 1

    def __post_init__(self):
        if min(self.nodes_2d, self.nodes_3d, self.nodes_4d) < 4:
            raise DomainError("quadrature needs at least 4 nodes per axis")
        if self.panels < 1:
            raise DomainError("panels must be positive")

    def nodes_for(self, order):
        return {1: self.nodes_2d, 2: self.nodes_2d, 3: self.nodes_3d, 4: self.nodes_4d}[order]


@dataclass(frozen=True)
class SystemSpec:
    """System Hamiltonian, coupling operators and coupling strength.

    ``couplings`` pairs each system operator ``A`` with the index of the bath
    operator it multiplies.  The interaction is
    ``lam * sum_a A_a (x) B_a`` and must be Hermitian as a whole.
    """

    hamiltonian: np.ndarray
    couplings: tuple
    coupling_strength: float = 1.0
    _spectrum: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DomainError("system Hamiltonian must be square")
        if not is_hermitian(h):
            raise DomainError("system Hamiltonian must be Hermitian")
        if not self.couplings:
            raise DomainError("at least one coupling operator is required")
        couplings = tuple((np.asarray(a, dtype=complex), int(b)) for a, b in self.couplings)
        for a, _ in couplings:
            if a.shape != h.shape:
                raise DomainError("coupling operator shape does not match the Hamiltonian")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "couplings", couplings)
        energies, vectors = np.linalg.eigh(h)
        object.__setattr__(self, "_spectrum", (energies, vectors))

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    @property
    def energies(self):
        return self._spectrum[0]

    @property
    def eigenvectors(self):
        return self._spectrum[1]

    def operator_at(self, k, times, dagger=False):
        """Interaction-picture coupling operator ``k`` at an array of times."""
        a = self.couplings[k][0]
        if dagger:
            a = a.conj().T
        energies, v = self._spectrum
        a_eig = v.conj().T @ a @ v
        gaps = energies[:, None] - energies[None, :]
        times = np.asarray(times, dtype=float)
        phased = a_eig * np.exp(1j * gaps * times[..., None, None])
        return v @ phased @ v.conj().T


def interaction_picture_op(h_s, a, t):
    """``exp(i H t) A exp(-i H t)``."""
    h_s = np.asarray(h_s, dtype=complex)
    if not is_hermitian(h_s):
        raise DomainError("system Hamiltonian must be Hermitian")
    u = expm(1j * t * h_s)
    return u @ np.asarray(a, dtype=complex) @ u.conj().T


# ---------------------------------------------------------------------------
# quadrature over ordered simplices


@lru_cache(maxsize=None)
def _gauss_legendre_unit(n, panels):
    x, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(0.0, 1.0, panels + 1)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs.append(lo + (hi - lo) * (x + 1) / 2)
        ws.append((hi - lo) * w / 2)
    return np.concatenate(xs), np.concatenate(ws)


@lru_cache(maxsize=None)
def _unit_simplex_rule(dim, n, panels):
    """Nodes of ``1 > x1 > x2 > ... > x_dim > 0`` with weights summing to 1/dim!."""
    x, w = _gauss_legendre_unit(n, panels)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    u = np.stack([g.reshape(-1) for g in grids], axis=1)
    weight = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=1), axis=1)
    pts = np.cumprod(u, axis=1)
    for k in range(dim):
        weight = weight * u[:, k] ** (dim - 1 - k)
    return pts, weight


def ordered_simplex_rule(dim, tau, n, panels=1):
    """Quadrature for ``tau > x1 > ... > x_dim > 0``; returns (points, weights)."""
    pts, weight = _unit_simplex_rule(dim, n, panels)
    return tau * pts, weight * tau**dim


def _interleavings(r, k):
    """Global descending orderings compatible with the term's chains.

    Positions ``0..r-1`` are right operators (ascending times) and positions
    ``r..r+k-1`` are left operators (descending times).  Each result lists
    the positions from latest to earliest time.
    """
    right_desc = list(range(r - 1, -1, -1))
    left_desc = list(range(r, r + k))
    n = r + k
    for slots in itertools.combinations(range(n), r):
        order, ri, li = [], 0, 0
        slot_set = set(slots)
        for s in range(n):
            if s in slot_set:
                order.append(right_desc[ri])
                ri += 1
            else:
                order.append(left_desc[li])
                li += 1
        yield order


def compute_T(n, tau, system: SystemSpec, bath, q: QuadratureConfig | None = None):
    """Superoperator of the order-``n`` propagator term (coupling factored out)."""
    if n not in (1, 2, 3, 4):
        raise UnsupportedError(f"order {n} is not supported (1..4)")
    if not tau > 0:
        raise DomainError("tau must be positive")
    q = q or QuadratureConfig()
    d = system.dim
    n_ops = len(system.couplings)
    nodes = q.nodes_for(n)
    pts, wts = ordered_simplex_rule(n, tau, nodes, q.panels)
    total = np.zeros((d, d, d, d), dtype=complex)
    for k in range(n + 1):  # number of left operators
        r = n - k
        prefactor = (-1j) ** k * (1j) ** r
        for order in _interleavings(r, k):
            times = [None] * n
            for slot, pos in enumerate(order):
                times[pos] = pts[:, slot]
            right_ops = [[system.operator_at(a, times[p], dagger=True) for a in range(n_ops)] for p in range(r)]
            left_ops = [[system.operator_at(a, times[p]) for a in range(n_ops)] for p in range(r, n)]
            for combo in itertools.product(range(n_ops), repeat=n):
                idx = [CorrelationIndex(system.couplings[a][1], p < r) for p, a in enumerate(combo)]
                corr = bath.correlation(idx, times)
                if not np.any(corr):
                    continue
                wc = prefactor * wts * corr
                left = _chain(left_ops, combo[r:], d, len(wts))
                right = _chain(right_ops, combo[:r], d, len(wts))
                total += np.einsum("p,pij,plk->ikjl", wc, left, right, optimize=True)
    return total.reshape(d * d, d * d)


def _chain(ops_by_pos, combo, d, npts):
    prod = None
    for pos, a in enumerate(combo):
        m = ops_by_pos[pos][a]
        prod = m if prod is None else prod @ m
    if prod is None:
        return np.broadcast_to(np.eye(d, dtype=complex), (npts, d, d))
    return prod


# ---------------------------------------------------------------------------
# generator extraction


def extract_L(n, tau, t_list: Sequence[np.ndarray]):
    """Generator components ``L_1 .. L_n`` from propagator terms ``T_1 .. T_n``."""
    if len(t_list) < n:
        raise DomainError(f"need propagator terms up to order {n}, got {len(t_list)}")
    t1, *rest = t_list
    comps = [t1 / tau]
    if n >= 2:
        l1 = comps[0]
        comps.append((t_list[1] - tau**2 / 2 * l1 @ l1) / tau)
    if n >= 3:
        l1, l2 = comps
        counter = tau**2 / 2 * (l1 @ l2 + l2 @ l1) + tau**3 / 6 * l1 @ l1 @ l1
        comps.append((t_list[2] - counter) / tau)
    if n >= 4:
        l1, l2, l3 = comps
        counter = (
            tau**2 / 2 * (l1 @ l3 + l2 @ l2 + l3 @ l1)
            + tau**3 / 6 * (l1 @ l1 @ l2 + l1 @ l2 @ l1 + l2 @ l1 @ l1)
            + tau**4 / 24 * l1 @ l1 @ l1 @ l1
        )
        comps.append((t_list[3] - counter) / tau)
    return comps[:n]


@dataclass
class GrainedGenerator:
    tau: float
    order: int
    components: list
    coupling_strength: float

    @property
    def assembled(self):
        lam = self.coupling_strength
        return sum(lam ** (k + 1) * c for k, c in enumerate(self.components))

    def propagator(self, t=None):
        t = self.tau if t is None else t
        return expm(self.assembled * t)


def build_generator(system: SystemSpec, bath, order, tau, q: QuadratureConfig | None = None):
    q = q or QuadratureConfig()
    tau = max(tau, TAU_MIN)
    t_list = [compute_T(n, tau, system, bath, q) for n in range(1, order + 1)]
    return GrainedGenerator(tau, order, extract_L(order, tau, t_list), system.coupling_strength)


def dcg_propagators(system: SystemSpec, bath, order, t_grid, q: QuadratureConfig | None = None):
    """``exp(L^t t)`` for each ``t`` of the grid (identity at ``t = 0``)."""
    d2 = system.dim**2
    out = []
    for t in t_grid:
        if t < 0:
            raise DomainError("times must be nonnegative")
        if t == 0:
            out.append(np.eye(d2, dtype=complex))
            continue
        gen = build_generator(system, bath, order, t, q)
        out.append(gen.propagator(max(t, TAU_MIN)))
    return out


def dcg_propagate(system: SystemSpec, bath, order, rho0, t_grid, q: QuadratureConfig | None = None):
    """Coarse-grained trajectory ``rho(t) = exp(L^t t) rho0`` on a time grid."""
    rho0 = check_density_matrix(rho0)
    t_grid = list(t_grid)
    if any(b < a for a, b in zip(t_grid, t_grid[1:])):
        raise DomainError("time grid must be sorted")
    states = []
    for t, prop in zip(t_grid, dcg_propagators(system, bath, order, t_grid, q)):
        rho = rho0.copy() if t == 0 else devectorize(prop @ vectorize(rho0))
        if abs(np.trace(rho) - 1.0) > (q.tol if q else 1e-6):
            raise NumericalFailure(f"trace drifted to {np.trace(rho)} at t={t}")
        states.append(rho)
    return states


# ---------------------------------------------------------------------------
# Born-Markov-secular limit


def bohr_components(system: SystemSpec, k, tol=1e-9):
    """Split coupling ``k`` into parts ``A(w)`` with ``A(t) = sum_w A(w) exp(-i w t)``."""
    energies, v = system.energies, system.eigenvectors
    a_eig = v.conj().T @ system.couplings[k][0] @ v
    parts: dict[float, np.ndarray] = {}
    for i, j in itertools.product(range(system.dim), repeat=2):
        if a_eig[i, j] == 0:
            continue
        w = energies[j] - energies[i]
        key = next((kk for kk in parts if abs(kk - w) <= tol), None)
        if key is None:
            key = float(w)
            parts[key] = np.zeros_like(a_eig)
        parts[key][i, j] += a_eig[i, j]
    return {w: v @ m @ v.conj().T for w, m in parts.items()}


def bath_rate(bath, i: CorrelationIndex, j: CorrelationIndex, omega):
    """``int C_ij(s, 0) exp(i w s) ds`` over the real line, in closed form."""
    if isinstance(bath, BosonicBath):
        return float(bath.spectrum(-omega)) if omega != 0 else _zero_frequency_bosonic(bath)
    if isinstance(bath, FermionLeads):
        a = i.op ^ int(i.conjugated)
        b = j.op ^ int(j.conjugated)
        if (a, b) == (0, 1):
            return float(bath.tunneling_rate("L", -omega))
        if (a, b) == (1, 0):
            return float(bath.tunneling_rate("R", omega))
        return 0.0
    raise UnsupportedError(f"no Markov limit for {type(bath).__name__}")


def _zero_frequency_bosonic(bath):
    if bath.s > 1:
        return 0.0
    if bath.s == 1:
        return bath.g0 / bath.beta
    raise UnsupportedError("zero-frequency rate diverges for S < 1")


def bms_liouvillian(system: SystemSpec, bath):
    """Secular Born-Markov generator, including the first-order mean field.

    Rates are the Fourier transforms of the two-point functions at the Bohr
    frequencies; the principal-value (Lamb shift) part is not included.
    """
    if not isinstance(bath, (BosonicBath, FermionLeads)):
        raise UnsupportedError("Born-Markov limit needs a bath with a continuous spectrum")
    d = system.dim
    lam = system.coupling_strength
    generator = np.zeros((d * d, d * d), dtype=complex)
    comps = [bohr_components(system, k) for k in range(len(system.couplings))]
    first = np.zeros((d, d), dtype=complex)
    for k, (_, b) in enumerate(system.couplings):
        c1 = complex(np.asarray(bath.correlation([CorrelationIndex(b)], [0.0])))
        first += c1 * comps[k].get(0.0, np.zeros((d, d)))
    generator += lam * commutator_superop(first)
    eye = np.eye(d)
    for ka, (_, ba) in enumerate(system.couplings):
        for kb, (_, bb) in enumerate(system.couplings):
            for w, a_b in comps[kb].items():
                a_a = next((m for ww, m in comps[ka].items() if abs(ww - w) <= 1e-9), None)
                if a_a is None:
                    continue
                rate = bath_rate(bath, CorrelationIndex(ba, True), CorrelationIndex(bb), w)
                if rate == 0:
                    continue
                a_a_dag = a_a.conj().T
                jump = np.kron(a_b, a_a_dag.T)
                anti = a_a_dag @ a_b
                generator += lam**2 * rate * (jump - 0.5 * (np.kron(anti, eye) + np.kron(eye, anti.T)))
    return generator


def stationary_state(generator, d):
    """Normalized kernel vector of a trace-preserving generator."""
    trace_row = vectorize(np.eye(d)).conj()
    augmented = np.vstack([generator, trace_row])
    rhs = np.zeros(d * d + 1, dtype=complex)
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(augmented, rhs, rcond=None)
    return devectorize(sol)


# ---------------------------------------------------------------------------


def _theta(x):
    return np.heaviside(x, 0.5)


def heaviside_identity_check(t1, t2, t3, t4):
    """Five-term step-function combination that vanishes identically."""
    th = lambda a, b: _theta(a - b)
    return (
        th(t4, t3) * th(t3, t2) * th(t2, t1)
        + th(t3, t4) * th(t2, t1)
        + th(t1, t2) * th(t2, t3) * th(t3, t4)
        - th(t2, t3) * th(t3, t4)
        - th(t3, t2) * th(t2, t1)
    )
