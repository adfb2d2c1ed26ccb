"""Closed-form coefficients for the two-spin, spin-boson and resonant-level models."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .baths import BosonicBath, FermionLeads, TwoSpinBath
from .engine import SystemSpec, ordered_simplex_rule
from .errors import DomainError, NumericalFailure
from .linalg import PAULI_X, PAULI_Y, PAULI_Z, IDENTITY2, check_density_matrix, expm


def sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


# ---------------------------------------------------------------------------
# two spins with Heisenberg exchange


@dataclass(frozen=True)
class TwoSpinParams:
    lam: float = 0.25
    omega: float = 1.0
    omega_b: float = 2.0
    rho_b00: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.rho_b00 <= 1.0:
            raise DomainError("rho_b00 must lie in [0, 1]")

    def bath(self, coupling="heisenberg", rho_b=None):
        return TwoSpinBath(self.omega_b, self.rho_b00, coupling, rho_b)

    def system(self, variant="heisenberg"):
        if variant == "heisenberg":
            ops = [(PAULI_X, 0), (PAULI_Y, 1), (PAULI_Z, 2)]
        elif variant == "sxsz":
            ops = [(PAULI_X, 0)]
        else:
            raise DomainError(f"unknown two-spin variant {variant!r}")
        return SystemSpec(self.omega * PAULI_Z, ops, self.lam)


def two_spin_dcg2(params: TwoSpinParams, rho0, t):
    """Second-order coarse-grained state of the exchange-coupled spin pair."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    rho0 = check_density_matrix(rho0)
    lam, pb = params.lam, params.rho_b00
    detuning = params.omega_b - params.omega
    if detuning == 0:
        pop_exponent = -4 * lam**2 * t**2
        shift = 0.0  # (1 - sinc(2 x)) / detuning -> 0
    else:
        pop_exponent = -4 * lam**2 * math.sin(t * detuning) ** 2 / detuning**2
        shift = 2 * lam**2 * (1 - sinc(2 * t * detuning)) / detuning
    decay = math.exp(pop_exponent)
    rho00 = decay * rho0[0, 0].real + (1 - decay) * pb
    magnitude = math.exp(-8 * lam**2 * t**2 * pb * (1 - pb) - 2 * lam**2 * t**2 * sinc(t * detuning) ** 2)
    phase = np.exp(1j * t * (shift + 2 * lam * (1 - 2 * pb)))
    rho01 = magnitude * phase * rho0[0, 1]
    return np.array([[rho00, rho01], [np.conj(rho01), 1 - rho00]], dtype=complex)


def two_spin_dampening(params: TwoSpinParams, tau):
    """Nonzero entries of the second-order rate matrix (per lam**2), keyed ``(a, b, c, d)``."""
    pb = params.rho_b00
    detuning = params.omega_b - params.omega
    g = 4 * tau * pb * (1 - pb)
    s2 = sinc(tau * detuning) ** 2
    return {
        (0, 0, 0, 0): g,
        (1, 1, 1, 1): g,
        (0, 0, 1, 1): -g,
        (1, 1, 0, 0): -g,
        (0, 1, 0, 1): 4 * tau * pb * s2,
        (1, 0, 1, 0): 4 * tau * (1 - pb) * s2,
    }


def two_spin_lamb_shift(params: TwoSpinParams, tau, order):
    pb = params.rho_b00
    if order == 1:
        return (2 * pb - 1) * PAULI_Z
    detuning = params.omega_b - params.omega
    if detuning == 0:
        return np.zeros((2, 2), dtype=complex)
    amp = 2 / detuning * (1 - sinc(2 * tau * detuning))
    return amp * ((pb - 0.5) * IDENTITY2 - 0.5 * PAULI_Z)


# ---------------------------------------------------------------------------
# spin-boson model


@dataclass(frozen=True)
class SpinBosonParams:
    eps_d: float = 1.0
    bath: BosonicBath = field(default_factory=BosonicBath)
    lam: float = math.sqrt(0.1)
    coupling: str = "dissipative"

    def __post_init__(self):
        if not self.eps_d > 0:
            raise DomainError("eps_d must be positive")
        if self.coupling not in ("dissipative", "dephasing"):
            raise DomainError(f"unknown coupling {self.coupling!r}")

    def system(self):
        h = 0.5 * self.eps_d * (IDENTITY2 - PAULI_Z)
        a = PAULI_X if self.coupling == "dissipative" else PAULI_Z
        return SystemSpec(h, [(a, 0)], self.lam)


@dataclass(frozen=True)
class RateCoefficients:
    tau: float
    m11: complex
    m14: complex
    m41: complex
    m44: complex
    p11: complex = 0.0
    p14: complex = 0.0

    def tilde(self, lam):
        """Population generator entries times tau, through fourth order."""
        lam2, lam4 = lam**2, lam**4
        t11 = lam2 * self.m11 - lam4 / 2 * (self.m11 * self.m11 + self.m14 * self.m41) + lam4 * self.p11
        t14 = lam2 * self.m14 - lam4 / 2 * (self.m11 * self.m14 + self.m14 * self.m44) + lam4 * self.p14
        return t11, t14


def _band_filter_integral(bath: BosonicBath, tau, centre):
    """``int G(|w|)/|e^{beta w}-1| sinc^2[(w - centre) tau/2] dw``.

    Adaptive quadrature on sinc lobes near the peak, coarse panels elsewhere.
    """
    w_max = max(40 / bath.beta, 40 * bath.omega_c) + abs(centre)

    def f(w):
        return bath.spectrum(w) * sinc((w - centre) * tau / 2) ** 2

    lobe = 2 * math.pi / tau
    near = 40 * lobe
    cuts = {-w_max, w_max, 0.0}
    lo, hi = max(centre - near, -w_max), min(centre + near, w_max)
    cuts.update(np.arange(lo, hi, lobe / 2).tolist())
    cuts.update(np.linspace(-w_max, w_max, 81).tolist())
    cuts = sorted(c for c in cuts if -w_max <= c <= w_max)
    # away from the peak sinc^2 = g (1 - cos(tau (w - centre))) with smooth g,
    # so the oscillating part goes to the Fourier-weighted rule
    g = lambda w: 2 * bath.spectrum(w) / ((w - centre) * tau) ** 2
    c, s = math.cos(tau * centre), math.sin(tau * centre)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if lo <= a and b <= hi:
            total += quad(f, a, b, limit=200, epsabs=0.0, epsrel=1e-11)[0]
            continue
        total += quad(g, a, b, limit=200, epsabs=1e-16, epsrel=1e-11)[0]
        total -= c * quad(g, a, b, weight="cos", wvar=tau, limit=200, epsabs=1e-16, epsrel=1e-11)[0]
        total -= s * quad(g, a, b, weight="sin", wvar=tau, limit=200, epsabs=1e-16, epsrel=1e-11)[0]
    return total


def spin_boson_m(tau, params: SpinBosonParams):
    """Second-order population coefficients of the dissipative spin-boson model."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    bath, eps = params.bath, params.eps_d
    scale = tau**2 / (2 * math.pi)
    m11 = -scale * _band_filter_integral(bath, tau, eps)
    m14 = scale * _band_filter_integral(bath, tau, -eps)
    return RateCoefficients(tau, m11, m14, -m11, -m14)


def _p_integrand_orderings():
    """Orderings (latest first) of four times where t1 is free and t2 > t3 > t4."""
    for pos in range(4):
        order = [1, 2, 3]
        order.insert(pos, 0)
        yield order


def spin_boson_p(tau, params: SpinBosonParams, nodes=12):
    """Fourth-order population coefficients by ordered-simplex quadrature."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    bath, eps = params.bath, params.eps_d
    pts, wts = ordered_simplex_rule(4, tau, nodes)
    p11 = p14 = 0.0
    for order in _p_integrand_orderings():
        t = [None] * 4
        for slot, pos in enumerate(order):
            t[pos] = pts[:, slot]
        c4 = bath.correlation([0, 0, 0, 0], t)
        phase = t[0] - t[1] + t[2] - t[3]
        p11 += 2 * np.sum(wts * np.real(c4 * np.exp(-1j * eps * phase)))
        p14 -= 2 * np.sum(wts * np.real(c4 * np.exp(1j * eps * phase)))
    return p11, p14


def _population(rho00_0, g11, g14, time_ratio=1.0):
    """Solve the population rate equation with trace conservation."""
    decay = np.exp((g11 - g14) * time_ratio)
    return float(np.real(rho00_0 * decay + (1 - decay) / (1 - g11 / g14)))


def spin_boson_coefficients(tau, params: SpinBosonParams, order=2, nodes=12):
    m = spin_boson_m(tau, params)
    if order == 4:
        p11, p14 = spin_boson_p(tau, params, nodes)
        m = RateCoefficients(tau, m.m11, m.m14, m.m41, m.m44, p11, p14)
    return m


def spin_boson_population(order, tau, params: SpinBosonParams, rho00_0, nodes=12, check_tol=None):
    """Coarse-grained population at ``t = tau``.

    With ``check_tol`` set, the fourth-order result is recomputed with four
    fewer nodes per axis and a difference above ``check_tol`` raises
    ``NumericalFailure``; long windows need more nodes than short ones.
    """
    if order not in (2, 4):
        raise DomainError("order must be 2 or 4")
    if not 0 <= rho00_0 <= 1:
        raise DomainError("rho00_0 must lie in [0, 1]")
    coeffs = spin_boson_coefficients(tau, params, order, nodes)
    g11, g14 = coeffs.tilde(params.lam) if order == 4 else (params.lam**2 * coeffs.m11, params.lam**2 * coeffs.m14)
    value = _population(rho00_0, g11, g14)
    if order == 4 and check_tol is not None:
        coarse = max(4, nodes - 4)
        p11, p14 = spin_boson_p(tau, params, coarse)
        rough = RateCoefficients(tau, coeffs.m11, coeffs.m14, coeffs.m41, coeffs.m44, p11, p14)
        diff = abs(value - _population(rho00_0, *rough.tilde(params.lam)))
        if diff > check_tol:
            raise NumericalFailure(
                f"fourth-order quadrature unresolved at tau={tau:g} ({nodes} vs {coarse} nodes differ by {diff:.1e})"
            )
    return value


def stationary_population(g11, g14):
    """Fixed point of the population rate equation at a given coarse-graining time."""
    return float(np.real(1.0 / (1.0 - g11 / g14)))


def spin_boson_stationary(order, tau, params: SpinBosonParams, nodes=12):
    """Long-time population of the order-2 or order-4 generator at fixed ``tau``."""
    coeffs = spin_boson_coefficients(tau, params, order, nodes)
    lam2 = params.lam**2
    g11, g14 = coeffs.tilde(params.lam) if order == 4 else (lam2 * coeffs.m11, lam2 * coeffs.m14)
    return stationary_population(g11, g14)


def spin_boson_gibbs(params: SpinBosonParams):
    return 1.0 / (1.0 + math.exp(-params.bath.beta * params.eps_d))


# ---------------------------------------------------------------------------
# resonant level between two leads


@dataclass(frozen=True)
class FanoParams:
    eps_d: float = 1.0
    leads: FermionLeads = field(default_factory=FermionLeads)
    lam: float = math.sqrt(0.1)

    def system(self):
        # basis: |0> empty dot, |1> filled dot
        h = np.diag([0.0, self.eps_d]).astype(complex)
        a1 = -np.array([[0, 1], [0, 0]], dtype=complex)
        a2 = -np.array([[0, 0], [1, 0]], dtype=complex)
        return SystemSpec(h, [(a1, 0), (a2, 1)], self.lam)


def ordered_exponential_integral(coeffs, tau):
    """``int_{tau > x1 > ... > xn > 0} exp(sum_k c_k x_k) dx``.

    With tail sums ``S_k = c_k + ... + c_n`` the iterated integral solves a
    linear system with a bidiagonal matrix; its exponential gives the result.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = len(c)
    tails = np.cumsum(c[::-1])[::-1]
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[np.arange(n), np.arange(n)] = -tails
    m[np.arange(n), np.arange(1, n + 1)] = 1.0
    return np.exp(tails[0] * tau) * expm(m * tau)[0, n]


def _lead_factor(leads: FermionLeads, side, x, y):
    """``C_side(t_x - t_y)`` as (amplitude, width, centre, x, y)."""
    g0, width, centre = leads._lead(side)
    return (0.5 * g0 * width, width, centre, x, y)


def _integrate_exponential_products(terms, phase, mask, tau):
    """Integrate sums of lead-correlation products over ``[0, tau]^4``.

    ``terms`` is a list of factor lists from ``_lead_factor``; ``phase`` the
    coefficient vector of ``i * t`` in the extra oscillating factor; ``mask``
    decides from a descending ordering whether it contributes.
    """
    n = 4
    total = 0.0
    for order in itertools.permutations(range(n)):
        if not mask(order):
            continue
        rank = {pos: r for r, pos in enumerate(order)}
        for factors in terms:
            amp = 1.0
            coef = 1j * np.asarray(phase, dtype=complex)
            for a, width, centre, x, y in factors:
                amp *= a
                sign = 1.0 if rank[x] < rank[y] else -1.0
                coef[x] += -width * sign + 1j * centre
                coef[y] += width * sign - 1j * centre
            total += amp * ordered_exponential_integral([coef[p] for p in order], tau)
    return total


def _p_mask(order):
    rank = {pos: r for r, pos in enumerate(order)}
    later = lambda a, b: rank[a] < rank[b]
    return (later(2, 1) and later(1, 0)) or (later(1, 2) and later(2, 3))


def fano_m(tau, params: FanoParams):
    """Second-order population coefficients in closed form."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    leads, eps = params.leads, params.eps_d

    def window(side):
        g0, width, centre = leads._lead(side)
        z = width - 1j * (centre - eps)
        inner = tau / z - (-np.expm1(-z * tau)) / z**2
        return g0 * width * inner.real

    m11 = -window("L")
    m14 = window("R")
    return RateCoefficients(tau, m11, m14, -m11, -m14)


def fano_p(tau, params: FanoParams):
    """Fourth-order population coefficients, integrated exactly per time ordering."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    leads, eps = params.leads, params.eps_d
    f = lambda side, x, y: _lead_factor(leads, side, x, y)
    t1, t2, t3, t4 = range(4)
    terms11 = [[f("L", t1, t2), f("L", t3, t4)], [f("L", t1, t4), f("R", t3, t2)]]
    terms14 = [[f("R", t2, t1), f("R", t4, t3)], [f("R", t4, t1), f("L", t2, t3)]]
    phase = np.array([1.0, -1.0, 1.0, -1.0])
    p11 = _integrate_exponential_products(terms11, -eps * phase, _p_mask, tau)
    p14 = -_integrate_exponential_products(terms14, eps * phase, _p_mask, tau)
    return p11, p14


def fano_p_quadrature(tau, params: FanoParams, nodes=12):
    """Same coefficients as ``fano_p`` by ordered-simplex Gauss-Legendre."""
    leads, eps = params.leads, params.eps_d
    cl = lambda s: leads.lead_correlation("L", s)
    cr = lambda s: leads.lead_correlation("R", s)
    pts, wts = ordered_simplex_rule(4, tau, nodes)
    p11 = p14 = 0.0
    for order in itertools.permutations(range(4)):
        if not _p_mask(order):
            continue
        t = [None] * 4
        for slot, pos in enumerate(order):
            t[pos] = pts[:, slot]
        ph = t[0] - t[1] + t[2] - t[3]
        f11 = cl(t[0] - t[1]) * cl(t[2] - t[3]) + cl(t[0] - t[3]) * cr(t[2] - t[1])
        f14 = cr(t[1] - t[0]) * cr(t[3] - t[2]) + cr(t[3] - t[0]) * cl(t[1] - t[2])
        p11 += np.sum(wts * np.exp(-1j * eps * ph) * f11)
        p14 -= np.sum(wts * np.exp(1j * eps * ph) * f14)
    return p11, p14


def fano_coefficients(tau, params: FanoParams, order=2):
    m = fano_m(tau, params)
    if order == 4:
        p11, p14 = fano_p(tau, params)
        m = RateCoefficients(tau, m.m11, m.m14, m.m41, m.m44, p11, p14)
    return m


def fano_dcg_population(order, tau, t, params: FanoParams, rho00_0):
    if order not in (2, 4):
        raise DomainError("order must be 2 or 4")
    if not tau > 0 or t < 0:
        raise DomainError("need tau > 0 and t >= 0")
    coeffs = fano_coefficients(tau, params, order)
    lam2 = params.lam**2
    g11, g14 = coeffs.tilde(params.lam) if order == 4 else (lam2 * coeffs.m11, lam2 * coeffs.m14)
    return _population(rho00_0, g11, g14, t / tau)


def fano_bms_population(t, params: FanoParams, rho00_0):
    if t < 0:
        raise DomainError("t must be nonnegative")
    gl = float(params.leads.tunneling_rate("L", params.eps_d))
    gr = float(params.leads.tunneling_rate("R", params.eps_d))
    if gl + gr == 0:
        raise DomainError("total tunneling rate vanishes at the dot level")
    decay = math.exp(-params.lam**2 * (gl + gr) * t)
    return gr / (gl + gr) * (1 - decay) + rho00_0 * decay
