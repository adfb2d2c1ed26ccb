"""Reference solutions that do not rely on any perturbative expansion."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .baths import BosonicBath
from .errors import DomainError, NumericalFailure
from .linalg import IDENTITY2, PAULI_X, PAULI_Y, PAULI_Z, check_density_matrix, expm, partial_trace_bath
from .models import FanoParams, TwoSpinParams


# ---------------------------------------------------------------------------
# two spins, brute force


def two_spin_hamiltonian(params: TwoSpinParams, variant="heisenberg"):
    """Full ``4 x 4`` Hamiltonian, system factor first."""
    h = params.omega * np.kron(PAULI_Z, IDENTITY2) + params.omega_b * np.kron(IDENTITY2, PAULI_Z)
    if variant == "heisenberg":
        pairs = [(PAULI_X, PAULI_X), (PAULI_Y, PAULI_Y), (PAULI_Z, PAULI_Z)]
    elif variant == "sxsz":
        pairs = [(PAULI_X, PAULI_Z)]
    else:
        raise DomainError(f"unknown two-spin variant {variant!r}")
    for a, b in pairs:
        h = h + params.lam * np.kron(a, b)
    return h


def two_spin_exact(params: TwoSpinParams, rho_s0, rho_b0, t, variant="heisenberg"):
    """Reduced state after unitary evolution of the spin pair."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    rho_s0 = check_density_matrix(rho_s0)
    rho_b0 = check_density_matrix(rho_b0)
    u = expm(-1j * t * two_spin_hamiltonian(params, variant))
    full = u @ np.kron(rho_s0, rho_b0) @ u.conj().T
    return partial_trace_bath(full, 2, 2)


# ---------------------------------------------------------------------------
# pure dephasing


def dephasing_gamma(t, bath: BosonicBath, lam):
    """Decay exponent of the coherence under pure dephasing."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    if not bath.s > 0:
        raise DomainError("dephasing integral diverges for S <= 0")
    if t == 0:
        return 0.0

    def integrand(w):
        if w == 0.0:
            return 0.0
        return (
            bath.g0 * w**bath.s * math.exp(-w / bath.omega_c)
            * math.sin(w * t / 2) ** 2 / w**2
            / math.tanh(bath.beta * w / 2)
        )

    upper = bath.omega_c * (60.0 + 4.0 * bath.s)
    n_osc = max(1, int(upper * t / (2 * math.pi)))
    points = np.linspace(0.0, upper, min(n_osc, 400) + 1)
    total = 0.0
    for lo, hi in zip(points[:-1], points[1:]):
        value, _ = quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-11, limit=200)
        total += value
    return 8 * lam**2 / (2 * math.pi) * total


# ---------------------------------------------------------------------------
# resonant level, residue solution


@dataclass(frozen=True)
class CubicRoots:
    roots: tuple
    degenerate: bool
    residuals: tuple


def _cubic_coefficients(params: FanoParams):
    leads, lam2 = params.leads, params.lam**2
    al = leads.delta_l + 1j * leads.eps_l
    ar = leads.delta_r + 1j * leads.eps_r
    ed = 1j * params.eps_d
    gl = 0.5 * lam2 * leads.gamma_l0 * leads.delta_l
    gr = 0.5 * lam2 * leads.gamma_r0 * leads.delta_r
    c2 = ed + al + ar
    c1 = ed * (al + ar) + al * ar + gl + gr
    c0 = ed * al * ar + gl * ar + gr * al
    return c2, c1, c0


def solve_cubic(c2, c1, c0, polish=2):
    """Roots of ``z^3 + c2 z^2 + c1 z + c0`` by Cardano plus Newton polishing."""
    shift = c2 / 3
    p = c1 - c2 * c2 / 3
    q = 2 * c2**3 / 27 - c2 * c1 / 3 + c0
    disc = cmath.sqrt((q / 2) ** 2 + (p / 3) ** 3)
    u3 = -q / 2 + disc
    if abs(u3) < abs(-q / 2 - disc):
        u3 = -q / 2 - disc
    scale = max(1.0, abs(c2), abs(c1) ** 0.5, abs(c0) ** (1 / 3))
    if abs(u3) == 0:
        ys = [0j, 0j, 0j]
    else:
        u = u3 ** (1 / 3)
        unity = [1, cmath.exp(2j * math.pi / 3), cmath.exp(-2j * math.pi / 3)]
        ys = [w * u - p / (3 * w * u) for w in unity]
    poly = lambda z: ((z + c2) * z + c1) * z + c0
    dpoly = lambda z: (3 * z + 2 * c2) * z + c1
    roots = []
    for y in ys:
        z = y - shift
        for _ in range(polish):
            dz = dpoly(z)
            if dz != 0:
                z = z - poly(z) / dz
        roots.append(z)
    degenerate = any(
        abs(roots[i] - roots[j]) < 1e-8 * scale for i in range(3) for j in range(i + 1, 3)
    )
    coeff_scale = max(1.0, abs(c2), abs(c1), abs(c0))
    residuals = tuple(abs(poly(z)) / (coeff_scale * max(1.0, abs(z)) ** 3) for z in roots)
    return CubicRoots(tuple(roots), degenerate, residuals)


def fano_roots(params: FanoParams):
    return solve_cubic(*_cubic_coefficients(params))


def _split_degenerate(roots, scale):
    """Spread clustered roots symmetrically by ``1e-6 * scale``."""
    roots = list(roots)
    h = 1e-6 * scale
    used = set()
    for i in range(3):
        if i in used:
            continue
        cluster = [j for j in range(3) if abs(roots[j] - roots[i]) < 1e-8 * scale]
        if len(cluster) > 1:
            centre = sum(roots[j] for j in cluster) / len(cluster)
            for k, j in enumerate(cluster):
                roots[j] = centre + h * cmath.exp(2j * math.pi * k / len(cluster))
        used.update(cluster)
    return roots


def _fano_amplitudes(params: FanoParams, roots, t):
    """Coherent amplitude and the two parts of the frequency kernel.

    The kernel is ``pole_part(w) + free_part(w) * exp(-i w t)``; only the
    second factor oscillates in ``w``.
    """
    leads = params.leads
    al = leads.delta_l + 1j * leads.eps_l
    ar = leads.delta_r + 1j * leads.eps_r
    numer = lambda z: (z + al) * (z + ar)
    weights = []
    for i, zi in enumerate(roots):
        others = [zj for j, zj in enumerate(roots) if j != i]
        weights.append(numer(zi) * cmath.exp(zi * t) / ((zi - others[0]) * (zi - others[1])))

    def pole_part(w):
        s = -1j * w
        return sum(wt / (zi - s) for wt, zi in zip(weights, roots))

    def free_part(w):
        s = -1j * w
        return numer(s) / ((s - roots[0]) * (s - roots[1]) * (s - roots[2]))

    return sum(weights), pole_part, free_part


def _integrate(func, lo, hi, weight=None, t=0.0):
    kwargs = {"limit": 400}
    if weight is not None:
        kwargs.update(weight=weight, wvar=t)
    if math.isinf(hi):
        value, err = quad(func, lo, hi, epsabs=1e-12, **kwargs)
    else:
        value, err = quad(func, lo, hi, epsabs=1e-12, epsrel=1e-10, **kwargs)
    return value, err


def fano_exact_occupation(t, params: FanoParams, n0):
    """Dot occupation at infinite bias from the residue solution."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    if not 0.0 <= n0 <= 1.0:
        raise DomainError("n0 must lie in [0, 1]")
    if t == 0:
        return float(n0)
    leads = params.leads
    found = fano_roots(params)
    scale = max(1.0, *(abs(z) for z in found.roots))
    roots = _split_degenerate(found.roots, scale) if found.degenerate else list(found.roots)
    coherent, pole_part, free_part = _fano_amplitudes(params, roots, t)
    rate = lambda w: float(leads.tunneling_rate("L", w))

    smooth = lambda w: rate(w) * (abs(pole_part(w)) ** 2 + abs(free_part(w)) ** 2)
    # cross term 2 Re[conj(pole) free exp(-i w t)], folded onto w >= 0
    cross = lambda w: rate(w) * np.conj(pole_part(w)) * free_part(w)
    cos_part = lambda w: 2 * (cross(w).real + cross(-w).real)
    sin_part = lambda w: 2 * (cross(w).imag - cross(-w).imag)

    width = max(leads.delta_l, leads.delta_r)
    half = max(abs(params.eps_d), abs(leads.eps_l) + leads.delta_l, abs(leads.eps_r) + leads.delta_r) + 40 * width
    # kernel poles sit at w = i z, so their real parts are -Im z
    marks = {-z.imag for z in roots} | {leads.eps_l, params.eps_d}
    # geometric breakpoints resolve the Lorentzian shoulders of wide leads
    ladder = set(np.geomspace(1.0, half, 24)) if half > 1.0 else set()
    points = sorted({-half, half} | {m for m in marks if -half < m < half} | ladder | {-x for x in ladder})
    folded = sorted({0.0, half} | {abs(m) for m in marks if abs(m) < half} | ladder)

    total, err = 0.0, 0.0
    pieces = [(smooth, lo, hi, None) for lo, hi in zip(points[:-1], points[1:])]
    pieces += [(smooth, -np.inf, -half, None), (smooth, half, np.inf, None)]
    for part, weight in ((cos_part, "cos"), (sin_part, "sin")):
        pieces += [(part, lo, hi, weight) for lo, hi in zip(folded[:-1], folded[1:])]
        pieces.append((part, half, np.inf, weight))
    for func, lo, hi, weight in pieces:
        if math.isinf(lo):
            # quad's Fourier mode needs a finite lower limit; the smooth part does not
            value, e = quad(func, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=400)
        else:
            value, e = _integrate(func, lo, hi, weight, t)
        total, err = total + value, err + e
    if not math.isfinite(total) or err > 1e-7 * max(1.0, abs(total)):
        raise NumericalFailure(f"occupation integral did not converge (error estimate {err:g})")
    return abs(coherent) ** 2 * n0 + params.lam**2 / (2 * math.pi) * total


# ---------------------------------------------------------------------------
# spin-boson equation-of-motion steady states


def spin_boson_eom_steady(coupling, beta, eps_d, sz0=0.0):
    """Stationary Bloch vector ``(<sx>, <sy>, <sz>)`` from the factorized moment equations."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    kind = coupling.lower()
    if kind == "dephasing":
        return 0.0, 0.0, float(sz0)
    if kind == "dissipative":
        return 0.0, 0.0, math.tanh(beta * eps_d / 2)
    raise DomainError(f"unknown coupling {coupling!r}")
