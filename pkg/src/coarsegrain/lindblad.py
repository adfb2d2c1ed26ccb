"""Lindblad structure of second-order generators.

Builds the dampening matrix and effective Hamiltonians of the second-order
coarse-grained generator, certifies positivity, and splits an arbitrary
generator back into a commutator and a dissipator.

Matrices indexed by operator pairs use the row-major pair index
``(a, b) -> a * d + b``, matching ``linalg.vectorize``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baths import CorrelationIndex, FermionLeads
from .engine import QuadratureConfig, SystemSpec, ordered_simplex_rule
from .errors import DomainError, MalformedGenerator, UnsupportedError
from .linalg import (
    commutator_superop,
    hermitian_deviation,
    is_hermitian,
    jacobi_eigenvalues,
    sandwich,
    vectorize,
)

PSD_RELATIVE_TOL = 1e-10


@dataclass(frozen=True)
class DampeningMatrix:
    matrix: np.ndarray
    tau: float

    @property
    def dim(self):
        return int(round(np.sqrt(self.matrix.shape[0])))

    def element(self, a, b, c, d):
        n = self.dim
        return self.matrix[a * n + b, c * n + d]


@dataclass(frozen=True)
class LambShift:
    order: int
    matrix: np.ndarray
    tau: float


@dataclass(frozen=True)
class PsdReport:
    min_eig: float
    is_psd: bool
    gershgorin_pass: bool


# ---------------------------------------------------------------------------
# Hermitian splitting


class LinearCombinationBath:
    """Bath whose operators are fixed linear combinations of another bath's.

    ``combos[i]`` lists ``(coefficient, CorrelationIndex)`` pairs of the
    underlying bath; correlations follow by multilinearity.
    """

    def __init__(self, base, combos, hermitian_operators=True):
        self.base = base
        self.combos = [list(c) for c in combos]
        self.hermitian_operators = hermitian_operators
        self.stationary = getattr(base, "stationary", True)

    @property
    def n_ops(self):
        return len(self.combos)

    def _expand(self, idx: CorrelationIndex):
        terms = self.combos[idx.op]
        if not idx.conjugated:
            return terms
        return [(np.conj(c), CorrelationIndex(j.op, not j.conjugated)) for c, j in terms]

    def correlation(self, indices, times):
        indices = [CorrelationIndex(*i) if isinstance(i, tuple) else CorrelationIndex(int(i)) for i in indices]
        for i in indices:
            if not 0 <= i.op < self.n_ops:
                raise IndexError(f"operator index {i.op} out of range")
        times = np.broadcast_arrays(*[np.asarray(t, dtype=float) for t in times])
        total = np.zeros(times[0].shape if times else (), dtype=complex)
        expansions = [self._expand(i) for i in indices]
        for choice in np.ndindex(*[len(e) for e in expansions]):
            coef = 1.0 + 0j
            base_idx = []
            for e, k in zip(expansions, choice):
                c, j = e[k]
                coef *= c
                base_idx.append(j)
            if coef != 0:
                total = total + coef * self.base.correlation(base_idx, times)
        return total


def _bath_is_hermitian(bath):
    flag = getattr(bath, "hermitian_operators", None)
    if flag is not None:
        return flag
    return not isinstance(bath, FermionLeads)


def split_hermitian(system: SystemSpec, bath):
    """Rewrite ``sum A (x) B`` with Hermitian system and bath operators.

    With ``A = X + iY`` the Hermitian interaction equals
    ``sum X (x) (B + B^+)/2 + Y (x) i(B - B^+)/2``, which doubles the
    operator list (parts that vanish are dropped).
    """
    couplings, combos = [], []
    for a, b in system.couplings:
        x = 0.5 * (a + a.conj().T)
        y = -0.5j * (a - a.conj().T)
        if np.any(np.abs(x) > 0):
            couplings.append((x, len(combos)))
            combos.append([(0.5, CorrelationIndex(b)), (0.5, CorrelationIndex(b, True))])
        if np.any(np.abs(y) > 0):
            couplings.append((y, len(combos)))
            combos.append([(0.5j, CorrelationIndex(b)), (-0.5j, CorrelationIndex(b, True))])
    new_system = SystemSpec(system.hamiltonian, tuple(couplings), system.coupling_strength)
    return new_system, LinearCombinationBath(bath, combos)


def _require_hermitian_couplings(system: SystemSpec, bath):
    for a, _ in system.couplings:
        if not is_hermitian(a):
            raise DomainError("coupling operators must be Hermitian; split them first")
    if not _bath_is_hermitian(bath):
        raise DomainError("bath operators must be Hermitian; split the couplings first")


# ---------------------------------------------------------------------------
# second-order structure


def _square_nodes(tau, q: QuadratureConfig):
    """Nodes and weights on ``[0, tau]^2``, split along the diagonal."""
    pts, w = ordered_simplex_rule(2, tau, q.nodes_2d, q.panels)
    t1 = np.concatenate([pts[:, 0], pts[:, 1]])
    t2 = np.concatenate([pts[:, 1], pts[:, 0]])
    sign = np.concatenate([np.ones_like(w), -np.ones_like(w)])
    return t1, t2, np.concatenate([w, w]), sign


def _rotate(op, basis):
    return op if basis is None else basis.conj().T @ op @ basis


def dampening_matrix(tau, system: SystemSpec, bath, q: QuadratureConfig | None = None, basis=None):
    """Dampening matrix of the second-order generator, per unit ``lam**2``.

    Uses connected two-point correlations.  ``basis`` (columns) selects the
    operator basis ``|a><b|``; the default is the computational basis.
    """
    if not tau > 0:
        raise DomainError("tau must be positive")
    _require_hermitian_couplings(system, bath)
    q = q or QuadratureConfig()
    d = system.dim
    t1, t2, w, _ = _square_nodes(tau, q)
    n_ops = len(system.couplings)
    ops1 = [_rotate(system.operator_at(k, t1), basis) for k in range(n_ops)]
    ops2 = [_rotate(system.operator_at(k, t2), basis) for k in range(n_ops)]
    gamma = np.zeros((d * d, d * d), dtype=complex)
    for ka, (_, ba) in enumerate(system.couplings):
        c_a = bath.correlation([CorrelationIndex(ba)], [t1])
        for kb, (_, bb) in enumerate(system.couplings):
            c_b = bath.correlation([CorrelationIndex(bb)], [t2])
            connected = bath.correlation([CorrelationIndex(ba), CorrelationIndex(bb)], [t1, t2]) - c_a * c_b
            if not np.any(connected):
                continue
            vb = ops2[kb].reshape(len(w), -1)
            va = ops1[ka].reshape(len(w), -1)
            gamma += np.einsum("p,px,py->xy", w * connected, vb, va.conj(), optimize=True)
    return DampeningMatrix(gamma / tau, float(tau))


def lamb_shift(order, tau, system: SystemSpec, bath, q: QuadratureConfig | None = None):
    """Effective Hamiltonian of the order-1 or order-2 generator (per ``lam**order``)."""
    if order not in (1, 2):
        raise UnsupportedError("Lamb shift is defined for orders 1 and 2")
    if not tau > 0:
        raise DomainError("tau must be positive")
    _require_hermitian_couplings(system, bath)
    q = q or QuadratureConfig()
    d = system.dim
    h = np.zeros((d, d), dtype=complex)
    if order == 1:
        pts, w = ordered_simplex_rule(1, tau, q.nodes_2d, q.panels)
        t = pts[:, 0]
        for k, (_, b) in enumerate(system.couplings):
            c = bath.correlation([CorrelationIndex(b)], [t])
            h += np.einsum("p,pij->ij", w * c, system.operator_at(k, t))
        return LambShift(1, h / tau, float(tau))
    t1, t2, w, sign = _square_nodes(tau, q)
    for ka, (_, ba) in enumerate(system.couplings):
        a1 = system.operator_at(ka, t1)
        for kb, (_, bb) in enumerate(system.couplings):
            c = bath.correlation([CorrelationIndex(ba), CorrelationIndex(bb)], [t1, t2])
            if not np.any(c):
                continue
            h += np.einsum("p,pij,pjk->ik", w * sign * c, a1, system.operator_at(kb, t2), optimize=True)
    return LambShift(2, h / (2j * tau), float(tau))


def certify_psd(gamma) -> PsdReport:
    """Smallest eigenvalue and Gershgorin test of a Hermitian dampening matrix."""
    g = np.asarray(getattr(gamma, "matrix", gamma), dtype=complex)
    if hermitian_deviation(g) > 1e-10 * max(1.0, np.abs(g).max()):
        raise DomainError("dampening matrix is not Hermitian")
    eigs = jacobi_eigenvalues(g)
    norm = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    floor = -PSD_RELATIVE_TOL * norm
    radii = np.abs(g).sum(axis=1) - np.abs(np.diag(g))
    gersh = bool(np.all(np.real(np.diag(g)) - radii >= floor))
    min_eig = float(eigs[0]) if eigs.size else 0.0
    return PsdReport(min_eig, min_eig >= floor, gersh)


# ---------------------------------------------------------------------------
# generator assembly and decomposition


def energy_basis(h_s, tol=1e-9):
    """Eigenvectors of ``h_s`` as columns, ordered by energy.

    Inside a degenerate eigenspace the vectors are made canonical by
    Gram-Schmidt on the projected computational basis vectors, taken in
    index order, so ties fall back to the original index.
    """
    energies, vectors = np.linalg.eigh(np.asarray(h_s, dtype=complex))
    columns, start, d = [], 0, len(energies)
    while start < d:
        stop = start + 1
        while stop < d and energies[stop] - energies[start] <= tol * max(1.0, abs(energies[start])):
            stop += 1
        block = vectors[:, start:stop]
        proj = block @ block.conj().T
        found = []
        for k in range(d):
            v = proj[:, k].copy()
            for u in found:
                v -= (u.conj() @ v) * u
            norm = np.linalg.norm(v)
            if norm > 1e-6:
                v /= norm
                j = int(np.argmax(np.abs(v) > 1e-12))  # first nonzero entry made real positive
                found.append(v * abs(v[j]) / v[j])
            if len(found) == stop - start:
                break
        columns += found
        start = stop
    return np.column_stack(columns)


def _unit(d, a, b):
    m = np.zeros((d, d), dtype=complex)
    m[a, b] = 1.0
    return m


def _change_basis(superop, basis):
    """Express ``rho -> L rho`` in the basis whose vectors are ``basis`` columns."""
    if basis is None:
        return superop
    to_new = sandwich(basis.conj().T, basis)
    to_old = sandwich(basis, basis.conj().T)
    return to_new @ superop @ to_old


def assemble_generator(h, gamma, basis=None):
    """Superoperator ``-i[H, .] + sum gamma_xy (L_x . L_y^+ - {L_y^+ L_x, .}/2)``.

    ``gamma`` is given over ``L_ab = |a><b|`` in ``basis``; ``h`` in the
    computational basis.
    """
    h = np.asarray(h, dtype=complex)
    g = np.asarray(getattr(gamma, "matrix", gamma), dtype=complex)
    d = h.shape[0]
    if g.shape != (d * d, d * d):
        raise DomainError("dampening matrix shape does not match the Hamiltonian")
    eye = np.eye(d)
    g4 = g.reshape(d, d, d, d)
    # sum_xy g_xy L_x rho L_y^+ has matrix g reshuffled
    jump = g4.transpose(0, 2, 1, 3).reshape(d * d, d * d)
    # sum_xy g_xy L_y^+ L_x, using L_{ce}^+ L_{ab} = delta_ca |e><b|
    k = np.einsum("abae->eb", g4)
    dissipator = jump - 0.5 * (sandwich(k, eye) + sandwich(eye, k))
    return commutator_superop(h) + _change_basis(dissipator, None if basis is None else basis.conj().T)


def _traceless_frame(d):
    """Orthonormal operator basis (as columns of vec space) led by ``1/sqrt(d)``."""
    seed = np.eye(d * d, dtype=complex)
    seed = np.column_stack([vectorize(np.eye(d)) / np.sqrt(d), seed])
    q, _ = np.linalg.qr(seed)
    q = q[:, : d * d]
    q[:, 0] *= np.sign(q[0, 0].real) or 1.0
    return q


def _check_generator(superop, d, tol):
    scale = max(1.0, float(np.abs(superop).max()))
    trace_row = vectorize(np.eye(d))
    if np.abs(trace_row @ superop).max() > tol * scale:
        raise MalformedGenerator("generator does not preserve the trace")
    for a in range(d):
        for b in range(d):
            img = superop @ vectorize(_unit(d, a, b))
            img_adj = superop @ vectorize(_unit(d, b, a))
            if np.abs(img.reshape(d, d).conj().T - img_adj.reshape(d, d)).max() > tol * scale:
                raise MalformedGenerator("generator does not preserve Hermiticity")


def decompose_generator(superop, basis=None, tol=1e-8):
    """Split a generator into ``-i[H, .]`` and a dissipator.

    Gauge: ``H`` is traceless and the dissipator has no component along the
    identity operator, which makes the split unique.  Returns ``(H, gamma)``
    with ``H`` in the computational basis and ``gamma`` over ``|a><b|`` in
    ``basis`` (default computational).
    """
    superop = np.asarray(superop, dtype=complex)
    d = int(round(np.sqrt(superop.shape[0])))
    if superop.shape != (d * d, d * d):
        raise MalformedGenerator("generator must be a d^2 x d^2 matrix")
    _check_generator(superop, d, tol)
    local = _change_basis(superop, basis)
    # coefficients c_{x,y} of rho -> sum c_xy L_x rho L_y^+
    coeff = local.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
    frame = _traceless_frame(d)
    rotated = frame.conj().T @ coeff @ frame
    rotated[0, :] = 0.0
    rotated[:, 0] = 0.0
    gamma = frame @ rotated @ frame.conj().T
    gamma = 0.5 * (gamma + gamma.conj().T)
    residual = superop - assemble_generator(np.zeros((d, d)), gamma, basis)
    # residual = -i (H (x) 1 - 1 (x) H^T); solve for H by least squares
    design = np.column_stack([commutator_superop(_unit(d, a, b)).reshape(-1) for a in range(d) for b in range(d)])
    sol, *_ = np.linalg.lstsq(design, residual.reshape(-1), rcond=None)
    h = sol.reshape(d, d)
    h = 0.5 * (h + h.conj().T)
    h -= np.trace(h) / d * np.eye(d)
    return h, gamma
