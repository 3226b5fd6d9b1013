"""Spectral projections: eigenvector sums and contour quadrature of the resolvent.

The contour projection is the Riesz integral

    P = (1 / 2 pi i) * integral over the circle of (lambda - T)^{-1} d lambda

evaluated with the trapezoidal rule on a circle, doubling the node count
until successive iterates agree.  For a circle centred on the real axis it
coincides with the eigenvector projection onto the real window
``[center - radius, center + radius]``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    ContourNearSpectrumError,
    DimensionMismatchError,
    EndpointInSpectrumError,
    QuadratureStagnationError,
)
from .hermitian import as_hermitian, eigh, max_abs, op_norm

ENDPOINT_RTOL = 1e-9
CONTOUR_MARGIN_RTOL = 1e-6
NODE_CAP = 2**14
QUADRATURE_TOL = 1e-10


@dataclass(frozen=True)
class ContourDescriptor:
    center: complex
    radius: float
    nodes: int = 32

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"contour radius must be positive, got {self.radius!r}")
        if self.nodes < 8:
            raise ValueError(f"contour needs at least 8 nodes, got {self.nodes}")

    @classmethod
    def for_window(cls, a, b, nodes=32):
        """The circle over the real window [a, b]."""
        return cls((a + b) / 2, (b - a) / 2, nodes)

    @property
    def length(self):
        return 2 * np.pi * self.radius

    @property
    def window(self):
        c = complex(self.center).real
        return (c - self.radius, c + self.radius)

    def points(self, nodes=None):
        n = self.nodes if nodes is None else nodes
        theta = 2 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * theta)


@dataclass(frozen=True, eq=False)
class SpectralProjection:
    matrix: np.ndarray
    rank: int
    window: object
    nodes: int = 0

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def trace(self):
        return float(np.trace(self.matrix).real)


def _scale(w):
    return max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0


def eigen_projection(T, a, b):
    """Orthogonal projection onto the eigenvectors with eigenvalue in [a, b]."""
    if not a < b:
        raise ValueError(f"empty window [{a}, {b}]")
    w, v = eigh(T)
    tol = ENDPOINT_RTOL * _scale(w)
    for edge in (a, b):
        hit = np.abs(w - edge) <= tol
        if np.any(hit):
            raise EndpointInSpectrumError(edge, float(w[hit][0]))
    inside = (w >= a) & (w <= b)
    vs = v[:, inside]
    p = vs @ vs.conj().T
    return SpectralProjection(p, int(np.sum(inside)), (float(a), float(b)))


def _check_contour(w, contour):
    if not w.size:
        return
    dist = np.abs(np.abs(w - contour.center) - contour.radius)
    j = int(np.argmin(dist))
    if dist[j] < CONTOUR_MARGIN_RTOL * _scale(w):
        raise ContourNearSpectrumError(float(w[j]), float(dist[j]))


def _node_sum(T, contour, theta):
    """sum_k r e^{i theta_k} (lambda_k - T)^{-1} over the given angles."""
    n = T.dim
    eye = np.eye(n)
    acc = np.zeros((n, n), dtype=complex)
    for phase in np.exp(1j * theta):
        lam = contour.center + contour.radius * phase
        acc += contour.radius * phase * np.linalg.inv(lam * eye - T.matrix)
    return acc


def contour_ladder(T, contour, max_nodes=NODE_CAP):
    """Yield ``(nodes, P_nodes)`` for node counts doubling from ``contour.nodes``.

    Each doubling reuses the previous sum and evaluates only the midpoints.
    """
    T = as_hermitian(T)
    _check_contour(T.eigenvalues(), contour)
    nodes = contour.nodes
    total = _node_sum(T, contour, 2 * np.pi * np.arange(nodes) / nodes)
    yield nodes, total / nodes
    while nodes * 2 <= max_nodes:
        total = total + _node_sum(T, contour, 2 * np.pi * (np.arange(nodes) + 0.5) / nodes)
        nodes *= 2
        yield nodes, total / nodes


def contour_projection(T, contour, tol=QUADRATURE_TOL, max_nodes=NODE_CAP):
    """Riesz projection of ``T`` for a circle, by trapezoidal quadrature.

    Stops once two successive doublings differ by at most ``tol`` entrywise.
    """
    previous = None
    last_diff = np.inf
    for nodes, p in contour_ladder(T, contour, max_nodes):
        if previous is not None:
            last_diff = max_abs(p - previous)
            if last_diff <= tol:
                trace = float(np.trace(p).real)
                return SpectralProjection(p, int(round(trace)), contour, nodes)
        previous = p
    raise QuadratureStagnationError(max_nodes, last_diff)


class RankStability(NamedTuple):
    distance: float
    rank_p: int
    rank_q: int
    satisfied: bool


def projection_rank_stability(P, Q):
    """Check that projections closer than 1 in norm have equal rank."""
    if P.dim != Q.dim:
        raise DimensionMismatchError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    d = op_norm(P.matrix - Q.matrix)
    vacuous = d >= 1 - 1e-10
    return RankStability(d, P.rank, Q.rank, bool(vacuous or P.rank == Q.rank))


class ContinuityReport(NamedTuple):
    lhs: float
    rhs: float
    slack: float
    holds: bool


def projection_continuity_bound(T, S, contour, slack=1e-9):
    """Compare ``||P(T) - P(S)||`` with ``|circle|/(2 pi) * max ||R_T - R_S||`` over the nodes."""
    T, S = as_hermitian(T), as_hermitian(S)
    if T.dim != S.dim:
        raise DimensionMismatchError(f"dimension mismatch: {T.dim} vs {S.dim}")
    pt = contour_projection(T, contour)
    ps = contour_projection(S, contour)
    lhs = op_norm(pt.matrix - ps.matrix)
    eye = np.eye(T.dim)
    nodes = max(pt.nodes, ps.nodes)
    worst = 0.0
    for lam in contour.points(nodes):
        diff = np.linalg.inv(lam * eye - T.matrix) - np.linalg.inv(lam * eye - S.matrix)
        worst = max(worst, op_norm(diff))
    rhs = contour.length / (2 * np.pi) * worst
    return ContinuityReport(lhs, rhs, slack, bool(lhs <= rhs + slack))


def is_orthogonal_projection(p, tol=1e-10):
    return max_abs(p @ p - p) <= tol and max_abs(p - p.conj().T) <= tol
