"""Dense Hermitian operators, Cayley transform, resolvents and the operator metrics.

Conventions
-----------
``resolvent(T, z)`` is ``(T - z)^{-1}`` throughout.  The other common
convention, ``(z - T)^{-1}``, is its negative; the contour quadrature in
:mod:`specflow.projections` uses that one and negates explicitly.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    CayleyRangeError,
    DimensionMismatchError,
    HermiticityError,
    RadiusExceededError,
    SpectralPointError,
)
from .jacobi import jacobi_eigh

HERMITICITY_RTOL = 1e-12
UNITARITY_TOL = 1e-12
SINGULARITY_RTOL = 1e-12


def _scale(m):
    return max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0


def op_norm(m):
    """Operator 2-norm: square root of the largest eigenvalue of ``M* M``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    gram = m.conj().T @ m
    top = np.linalg.eigvalsh((gram + gram.conj().T) / 2)[-1]
    return float(np.sqrt(max(top, 0.0)))


def max_abs(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Immutable Hermitian matrix.

    Inputs within ``tol * max(1, max|entry|)`` of Hermitian are symmetrized
    to ``(M + M*) / 2``; anything further off is rejected.
    """

    matrix: np.ndarray
    tol: float = field(default=HERMITICITY_RTOL, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise HermiticityError(f"matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise HermiticityError("matrix has non-finite entries")
        defect = max_abs(m - m.conj().T)
        if defect > self.tol * _scale(m):
            raise HermiticityError(f"matrix is not Hermitian: max|M - M*| = {defect:.3e}")
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def norm(self):
        return float(np.max(np.abs(self.eigenvalues()))) if self.dim else 0.0

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def __add__(self, other):
        if isinstance(other, HermitianOperator):
            return HermitianOperator(self.matrix + other.matrix)
        return HermitianOperator(self.matrix + float(other) * np.eye(self.dim))

    def __sub__(self, other):
        if isinstance(other, HermitianOperator):
            return HermitianOperator(self.matrix - other.matrix)
        return HermitianOperator(self.matrix - float(other) * np.eye(self.dim))

    def scaled(self, c):
        return HermitianOperator(float(c) * self.matrix)

    @classmethod
    def diag(cls, values):
        return cls(np.diag(np.asarray(values, dtype=float)))


def as_hermitian(obj):
    return obj if isinstance(obj, HermitianOperator) else HermitianOperator(obj)


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    matrix: np.ndarray
    tol: float = field(default=UNITARITY_TOL, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        n = m.shape[0]
        defect = max_abs(m @ m.conj().T - np.eye(n))
        if defect > self.tol * max(n, 1):
            raise ValueError(f"matrix is not unitary: max|UU* - I| = {defect:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicity; the essential spectrum is always empty here."""

    eigenvalues: tuple
    essential: frozenset = frozenset()

    @property
    def dim(self):
        return len(self.eigenvalues)

    def multiplicities(self, tol=1e-9):
        groups = []
        for mu in self.eigenvalues:
            if groups and abs(mu - groups[-1][0]) <= tol * max(1.0, abs(mu)):
                groups[-1][1] += 1
            else:
                groups.append([mu, 1])
        return [(mu, k) for mu, k in groups]


def eigh(T, method="lapack"):
    """Ascending eigenvalues and orthonormal eigenvectors of ``T``.

    ``method="jacobi"`` uses the in-package cyclic Jacobi solver; the default
    calls LAPACK through numpy.  Ties keep solver order (stable sort).
    """
    T = as_hermitian(T)
    if method == "jacobi":
        w, v = jacobi_eigh(T.matrix)
    elif method == "lapack":
        w, v = np.linalg.eigh(T.matrix)
        order = np.argsort(w, kind="stable")
        w, v = w[order], v[:, order]
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return EigenDecomposition(w, v)


def spectrum(T):
    return Spectrum(tuple(float(x) for x in as_hermitian(T).eigenvalues()))


def inertia(values, tol):
    """(positive, negative, null) counts with ``|x| <= tol`` counted as null."""
    values = np.asarray(values, dtype=float)
    null = int(np.sum(np.abs(values) <= tol))
    pos = int(np.sum(values > tol))
    neg = int(np.sum(values < -tol))
    return pos, neg, null


def resolvent(T, z, rtol=SINGULARITY_RTOL):
    """``(T - z)^{-1}``; raises SpectralPointError when z is (numerically) an eigenvalue."""
    T = as_hermitian(T)
    w = T.eigenvalues()
    if w.size:
        dist = np.abs(w - z)
        j = int(np.argmin(dist))
        if dist[j] <= rtol * max(1.0, float(np.max(np.abs(w)))):
            raise SpectralPointError(z, float(w[j]))
    n = T.dim
    return np.linalg.solve(T.matrix - z * np.eye(n), np.eye(n, dtype=complex))


def resolvent_series(T, z0, z, terms):
    """Neumann expansion of the resolvent around ``z0``.

    Returns ``sum_{k < terms} (z - z0)^k R(z0)^{k+1}``, which converges to
    ``resolvent(T, z)`` whenever ``|z - z0| < 1 / ||R(z0)||``.
    """
    r0 = resolvent(T, z0)
    radius = 1.0 / op_norm(r0)
    step = z - z0
    if abs(step) >= radius:
        raise RadiusExceededError(abs(step), radius)
    term = r0.copy()
    total = r0.copy()
    for _ in range(1, terms):
        term = step * (r0 @ term)
        total = total + term
    return total


def cayley(T):
    """``kappa(T) = (T - i)(T + i)^{-1}``."""
    T = as_hermitian(T)
    n = T.dim
    eye = np.eye(n)
    u = (T.matrix - 1j * eye) @ np.linalg.inv(T.matrix + 1j * eye)
    return UnitaryMatrix(u)


def cayley_identity_form(T):
    """The same transform written as ``I - 2i (T + i)^{-1}``."""
    T = as_hermitian(T)
    n = T.dim
    return np.eye(n) - 2j * np.linalg.inv(T.matrix + 1j * np.eye(n))


def inverse_cayley(U, rtol=SINGULARITY_RTOL):
    """``T = i (I + U)(I - U)^{-1}`` for a unitary ``U`` without eigenvalue 1."""
    u = U.matrix if isinstance(U, UnitaryMatrix) else np.asarray(U, dtype=complex)
    n = u.shape[0]
    eye = np.eye(n)
    smin = float(np.linalg.svd(eye - u, compute_uv=False)[-1]) if n else 1.0
    if smin <= rtol:
        raise CayleyRangeError(smin)
    t = 1j * (eye + u) @ np.linalg.inv(eye - u)
    # rounding grows like the condition number of I - U
    return HermitianOperator(t, tol=max(HERMITICITY_RTOL, 1e-14 / smin**2))


def _check_dims(T1, T2):
    if T1.dim != T2.dim:
        raise DimensionMismatchError(f"dimension mismatch: {T1.dim} vs {T2.dim}")


def gap_distance(T1, T2):
    """Gap metric ``||kappa(T1) - kappa(T2)||``."""
    T1, T2 = as_hermitian(T1), as_hermitian(T2)
    _check_dims(T1, T2)
    return op_norm(cayley(T1).matrix - cayley(T2).matrix)


def delta_distance(T1, T2):
    """``||(T1 + i)^{-1} - (T2 + i)^{-1}||``; equals half the gap metric."""
    T1, T2 = as_hermitian(T1), as_hermitian(T2)
    _check_dims(T1, T2)
    eye = np.eye(T1.dim)
    return op_norm(np.linalg.inv(T1.matrix + 1j * eye) - np.linalg.inv(T2.matrix + 1j * eye))


def norm_distance(T1, T2):
    T1, T2 = as_hermitian(T1), as_hermitian(T2)
    _check_dims(T1, T2)
    return op_norm(T1.matrix - T2.matrix)


def riesz_map(T):
    """``T (I + T^2)^{-1/2}``, evaluated through the eigendecomposition."""
    w, v = eigh(T)
    f = w / np.sqrt(1.0 + w * w)
    return HermitianOperator((v * f) @ v.conj().T)


def riesz_distance(T1, T2):
    T1, T2 = as_hermitian(T1), as_hermitian(T2)
    _check_dims(T1, T2)
    return op_norm(riesz_map(T1).matrix - riesz_map(T2).matrix)


def random_hermitian(dim, rng, scale=1.0):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * (x + x.conj().T) / 2)


def random_unitary(dim, rng):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(x)
    d = np.diag(r)
    return q * (d / np.abs(d))
