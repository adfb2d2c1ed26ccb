"""Multi-time bath correlation functions for the supported reservoirs.

A correlation ``C_{i1 ... in}(t1, ..., tn)`` is the thermal trace of the
product of bath coupling operators, each optionally daggered, taken in the
order given.  Times may be numpy arrays; they broadcast against each other.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError
from .linalg import PAULI_X, PAULI_Y, PAULI_Z

log = logging.getLogger(__name__)


class CorrelationIndex(NamedTuple):
    op: int
    conjugated: bool = False


def _normalize(indices) -> list[CorrelationIndex]:
    out = []
    for idx in indices:
        if isinstance(idx, CorrelationIndex):
            out.append(idx)
        elif isinstance(idx, (tuple, list)):
            out.append(CorrelationIndex(int(idx[0]), bool(idx[1])))
        else:
            out.append(CorrelationIndex(int(idx), False))
    return out


# ---------------------------------------------------------------------------
# Hurwitz zeta

_BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0)  # B2, B4, B6, B8
_EM_TERMS = 30


def hurwitz_zeta(s, a):
    """Hurwitz zeta ``sum_{n>=0} (n + a)**-s`` for real ``s > 1``, ``Re a > 0``.

    Euler-Maclaurin: 30 explicit terms, then the integral tail, the half
    endpoint term and Bernoulli corrections through B8.  ``a`` may be an array.
    """
    s = float(s)
    if not s > 1.0:
        raise DomainError(f"hurwitz_zeta requires s > 1, got {s}")
    a = np.asarray(a, dtype=complex)
    if np.any(a.real <= 0):
        raise DomainError("hurwitz_zeta requires Re a > 0")
    total = np.zeros_like(a)
    for n in range(_EM_TERMS):
        total += (n + a) ** (-s)
    x = _EM_TERMS + a
    total += x ** (1.0 - s) / (s - 1.0) + 0.5 * x ** (-s)
    rising = s  # s (s+1) ... (s+2k-2)
    power = x ** (-s - 1.0)
    for k, b2k in enumerate(_BERNOULLI, start=1):
        total += b2k / math.factorial(2 * k) * rising * power
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power = power / (x * x)
    return total if total.ndim else complex(total)


# ---------------------------------------------------------------------------
# Bath models


@dataclass(frozen=True)
class TwoSpinBath:
    """A single bath spin with ``H_B = omega_b * sigma_z``.

    ``coupling`` is ``"heisenberg"`` (operators sx, sy, sz) or ``"sigma_z"``.
    ``rho_b`` overrides the diagonal initial state ``diag(rho_b00, 1 - rho_b00)``
    and may carry coherences.
    """

    omega_b: float
    rho_b00: float = 0.5
    coupling: str = "heisenberg"
    rho_b: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.rho_b00 <= 1.0:
            raise DomainError("rho_b00 must lie in [0, 1]")
        if self.coupling not in ("heisenberg", "sigma_z"):
            raise DomainError(f"unknown coupling set {self.coupling!r}")

    @property
    def operators(self):
        if self.coupling == "heisenberg":
            return [PAULI_X, PAULI_Y, PAULI_Z]
        return [PAULI_Z]

    @property
    def n_ops(self):
        return len(self.operators)

    @property
    def state(self):
        if self.rho_b is not None:
            return np.asarray(self.rho_b, dtype=complex)
        return np.diag([self.rho_b00, 1.0 - self.rho_b00]).astype(complex)

    @property
    def stationary(self):
        st = self.state
        return abs(st[0, 1]) == 0.0 and abs(st[1, 0]) == 0.0

    def hamiltonian(self):
        return self.omega_b * PAULI_Z

    def _op_at(self, idx: CorrelationIndex, t):
        b = self.operators[idx.op]
        if idx.conjugated:
            b = b.conj().T
        energies = np.array([self.omega_b, -self.omega_b])
        gaps = energies[:, None] - energies[None, :]
        t = np.asarray(t, dtype=float)
        return b * np.exp(1j * gaps * t[..., None, None])

    def correlation(self, indices, times):
        indices = _normalize(indices)
        _check_indices(self, indices)
        times = np.broadcast_arrays(*[np.asarray(t, dtype=float) for t in times])
        shape = times[0].shape if times else ()
        prod = np.broadcast_to(np.eye(2, dtype=complex), shape + (2, 2))
        for idx, t in zip(indices, times):
            prod = prod @ self._op_at(idx, t)
        return np.einsum("...ij,ji->...", prod, self.state)


@dataclass(frozen=True)
class BosonicBath:
    """Thermal bosons with spectral density ``G0 * w**S * exp(-w / wc)``."""

    g0: float = 1.0
    s: float = 1.0
    omega_c: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ("g0", "omega_c", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive")
        if not self.s > 0:
            raise DomainError("spectral exponent S must be positive")

    n_ops = 1
    stationary = True

    def spectral_density(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0):
            raise DomainError("spectral density is defined for omega > 0")
        return self.g0 * omega**self.s * np.exp(-omega / self.omega_c)

    def occupation(self, omega):
        """Bose factor ``1 / (exp(beta w) - 1)``."""
        return 1.0 / np.expm1(self.beta * np.asarray(omega, dtype=float))

    def spectrum(self, omega):
        """Fourier weight ``G(|w|) / |exp(beta w) - 1|`` of the two-point function."""
        omega = np.asarray(omega, dtype=float)
        w = np.abs(omega)
        zero = w == 0
        safe = np.where(zero, 1.0, w)
        value = self.g0 * safe**self.s * np.exp(-safe / self.omega_c) / np.abs(np.expm1(self.beta * np.where(zero, 1.0, omega)))
        if np.any(zero):
            # w**S / (beta w) as w -> 0
            limit = self.g0 / self.beta if self.s == 1 else (0.0 if self.s > 1 else np.inf)
            value = np.where(zero, limit, value)
        return value if value.ndim else float(value)

    def two_point(self, delta):
        """``C(t1, t2)`` as a function of ``delta = t1 - t2`` (zeta closed form)."""
        delta = np.asarray(delta, dtype=float)
        p = 1.0 + self.s
        shift = 1.0 / (self.beta * self.omega_c)
        pref = self.g0 * math.gamma(p) / (2.0 * math.pi * self.beta**p)
        return pref * (
            hurwitz_zeta(p, shift + 1j * delta / self.beta)
            + hurwitz_zeta(p, 1.0 + shift - 1j * delta / self.beta)
        )

    def correlation(self, indices, times):
        indices = _normalize(indices)
        _check_indices(self, indices)
        times = np.broadcast_arrays(*[np.asarray(t, dtype=float) for t in times])
        n = len(indices)
        if n % 2:
            return np.zeros(times[0].shape, dtype=complex)
        return _wick(times, lambda i, j: self.two_point(times[i] - times[j]), fermionic=False)


@dataclass(frozen=True)
class FermionLeads:
    """Two Lorentzian leads at infinite bias (left filled, right empty).

    Operator 0 creates a lead electron, operator 1 annihilates one; they are
    each other's adjoints.
    """

    gamma_l0: float = 1.0
    gamma_r0: float = 1.0
    delta_l: float = 2.0
    delta_r: float = 1.0
    eps_l: float = 0.0
    eps_r: float = 0.0

    def __post_init__(self):
        if not (self.delta_l > 0 and self.delta_r > 0):
            raise DomainError("Lorentzian widths must be positive")
        if self.gamma_l0 < 0 or self.gamma_r0 < 0:
            raise DomainError("tunneling amplitudes must be nonnegative")

    n_ops = 2
    stationary = True

    def tunneling_rate(self, side, omega):
        g0, width, centre = self._lead(side)
        omega = np.asarray(omega, dtype=float)
        return g0 * width**2 / ((omega - centre) ** 2 + width**2)

    def _lead(self, side):
        side = side.upper()
        if side == "L":
            return self.gamma_l0, self.delta_l, self.eps_l
        if side == "R":
            return self.gamma_r0, self.delta_r, self.eps_r
        raise DomainError(f"unknown lead {side!r}")

    def lead_correlation(self, side, s):
        """``(1/2pi) int Gamma(w) exp(i w s) dw`` in closed form."""
        g0, width, centre = self._lead(side)
        s = np.asarray(s, dtype=float)
        return 0.5 * g0 * width * np.exp(-width * np.abs(s) + 1j * centre * s)

    def _pair(self, a: int, b: int, ta, tb):
        if a == 0 and b == 1:
            return self.lead_correlation("L", ta - tb)
        if a == 1 and b == 0:
            return self.lead_correlation("R", tb - ta)
        return np.zeros(np.broadcast(ta, tb).shape, dtype=complex)

    def correlation(self, indices, times):
        indices = _normalize(indices)
        _check_indices(self, indices)
        times = np.broadcast_arrays(*[np.asarray(t, dtype=float) for t in times])
        # the adjoint of one lead operator is the other one
        ops = [idx.op ^ int(idx.conjugated) for idx in indices]
        shape = times[0].shape if times else ()
        if len(ops) % 2 or ops.count(0) != ops.count(1):
            log.debug("fermionic correlation %s vanishes by number balance", ops)
            return np.zeros(shape, dtype=complex)
        return _wick(times, lambda i, j: self._pair(ops[i], ops[j], times[i], times[j]), fermionic=True)


BathModel = TwoSpinBath | BosonicBath | FermionLeads


def _check_indices(bath, indices: Sequence[CorrelationIndex]):
    for idx in indices:
        if not 0 <= idx.op < bath.n_ops:
            raise IndexError(f"operator index {idx.op} out of range for {type(bath).__name__}")


def _pairings(items):
    """All perfect matchings of ``items`` with their permutation sign."""
    if not items:
        yield [], 1
        return
    first, rest = items[0], items[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for sub, sign in _pairings(remaining):
            yield [(first, partner)] + sub, sign * (-1) ** k


def _wick(times, pair, fermionic):
    total = np.zeros(times[0].shape if times else (), dtype=complex)
    for matching, sign in _pairings(list(range(len(times)))):
        term = np.ones_like(total)
        for i, j in matching:
            term = term * pair(i, j)
        total = total + (sign if fermionic else 1) * term
    return total


def corr1(bath, i, t1):
    return bath.correlation([i], [t1])


def corr2(bath, i, j, t1, t2):
    return bath.correlation([i, j], [t1, t2])


def corr3(bath, i, j, k, t1, t2, t3):
    return bath.correlation([i, j, k], [t1, t2, t3])


def corr4(bath, i, j, k, l, t1, t2, t3, t4):
    return bath.correlation([i, j, k, l], [t1, t2, t3, t4])


def spectral_density(bath: BosonicBath, omega):
    return bath.spectral_density(omega)


def tunneling_rate(bath: FermionLeads, side, omega):
    return bath.tunneling_rate(side, omega)
