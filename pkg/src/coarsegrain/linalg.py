"""Dense linear algebra for small Hilbert spaces.

Density matrices are vectorized row-major: the element ``rho[a, b]`` sits at
index ``a * d + b``.  With that convention the map ``rho -> X @ rho @ Y`` has
the matrix ``kron(X, Y.T)``; every superoperator in the package follows it.
"""
import math

import numpy as np

from .errors import DimensionError, DomainError

HERMITIAN_TOL = 1e-10
POSITIVITY_FLOOR = -1e-8

_TAYLOR_DEGREE = 20


def _as_square(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    return a


def expm(a):
    """Matrix exponential by scaling and squaring a truncated Taylor series.

    The matrix is scaled by ``2**-s`` until its 1-norm is at most 0.5, the
    series is summed to degree 20 and the result squared ``s`` times.
    """
    a = _as_square(a)
    n = a.shape[0]
    norm = np.abs(a).sum(axis=0).max() if n else 0.0
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    scaled = a / 2.0**squarings
    # Horner form of sum_k scaled^k / k!
    result = np.eye(n, dtype=complex)
    for k in range(_TAYLOR_DEGREE, 0, -1):
        result = np.eye(n, dtype=complex) + scaled @ result / k
    for _ in range(squarings):
        result = result @ result
    return result


def partial_trace_bath(rho_full, d_s, d_b):
    """Trace out the second tensor factor of a ``system (x) bath`` operator."""
    rho_full = np.asarray(rho_full, dtype=complex)
    if rho_full.shape != (d_s * d_b, d_s * d_b):
        raise DimensionError(
            f"expected a {d_s * d_b}x{d_s * d_b} matrix, got {rho_full.shape}"
        )
    return np.einsum("ikjk->ij", rho_full.reshape(d_s, d_b, d_s, d_b))


def hermitian_deviation(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def is_hermitian(a, tol=HERMITIAN_TOL):
    return hermitian_deviation(a) <= tol


def jacobi_eigenvalues(h, tol=1e-15, max_sweeps=60):
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations."""
    h = np.array(h, dtype=complex)
    h = 0.5 * (h + h.conj().T)
    n = h.shape[0]
    scale = max(np.abs(h).max(), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(np.triu(h, 1)) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = h[p, q]
                mag = abs(hpq)
                if mag <= tol * scale * 1e-3:
                    continue
                phase = hpq.conjugate() / mag
                app, aqq = h[p, p].real, h[q, q].real
                zeta = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # U = diag(1, phase) @ [[c, s], [-s, c]] restricted to (p, q)
                u = np.array([[c, s], [-s * phase, c * phase]])
                cols = [p, q]
                h[:, cols] = h[:, cols] @ u
                h[cols, :] = u.conj().T @ h[cols, :]
                h[p, q] = h[q, p] = 0.0
    return np.sort(np.real(np.diag(h)))


def min_eigenvalue_hermitian(h, tol=1e-8):
    h = _as_square(h)
    if hermitian_deviation(h) > tol:
        raise DomainError("matrix is not Hermitian within tolerance")
    return float(jacobi_eigenvalues(h)[0])


def vectorize(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1).copy()


def devectorize(v):
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = math.isqrt(v.size)
    if d * d != v.size:
        raise DimensionError(f"vector length {v.size} is not a perfect square")
    return v.reshape(d, d).copy()


def sandwich(left, right):
    """Superoperator of ``rho -> left @ rho @ right``."""
    return np.kron(left, np.asarray(right).T)


def left_multiplication(x):
    return sandwich(x, np.eye(x.shape[0]))


def right_multiplication(y):
    return sandwich(np.eye(y.shape[0]), y)


def commutator_superop(h):
    """Superoperator of ``rho -> -i [h, rho]``."""
    h = np.asarray(h, dtype=complex)
    return -1j * (left_multiplication(h) - right_multiplication(h))


def apply_superop(superop, rho):
    return devectorize(superop @ vectorize(rho))


def superop_from_map(func, d):
    """Matrix of a linear map on d x d matrices, built from basis images."""
    out = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[a, b] = 1.0
            out[:, a * d + b] = vectorize(func(unit))
    return out


def check_density_matrix(rho, tol=HERMITIAN_TOL):
    rho = _as_square(rho, "density matrix")
    if hermitian_deviation(rho) > tol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise DomainError("density matrix does not have unit trace")
    return rho


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
