"""Paths of Hermitian operators over a compact parameter interval."""

from functools import lru_cache

import numpy as np

from .errors import DerivativeUnavailableError, DescriptorError, EndpointMismatchError
from .hermitian import HermitianOperator, max_abs

FD_RELATIVE_STEP = 1e-5


class OperatorPath:
    """``t -> A(t)`` on ``[t0, t1]`` with an optional analytic derivative.

    ``evaluator`` and ``derivative`` return square complex arrays (or
    HermitianOperator instances) and must be pure functions of ``t``;
    evaluations are memoized per path instance.  ``breakpoints`` lists interior
    parameters where the derivative may jump (knots of a sampled path).
    """

    def __init__(self, evaluator, t0, t1, derivative=None, name=None, descriptor=None, breakpoints=()):
        t0, t1 = float(t0), float(t1)
        if not t0 < t1:
            raise ValueError(f"parameter interval must satisfy t0 < t1, got [{t0}, {t1}]")
        self.t0 = t0
        self.t1 = t1
        self._evaluator = evaluator
        self._derivative = derivative
        self.name = name
        self.descriptor = descriptor
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints if t0 < b < t1))
        self._cache = lru_cache(maxsize=4096)(self._evaluate)
        self._eig_cache = lru_cache(maxsize=4096)(self._eigh)
        self.dim = self.matrix(t0).shape[0]

    def _evaluate(self, t):
        m = self._evaluator(t)
        op = m if isinstance(m, HermitianOperator) else HermitianOperator(m)
        return op

    def _eigh(self, t):
        w, v = np.linalg.eigh(self(t).matrix)
        return w, v

    def __call__(self, t):
        op = self._cache(float(t))
        if op.dim != getattr(self, "dim", op.dim):
            raise ValueError(f"path changed dimension at t={t}")
        return op

    def matrix(self, t):
        return self(t).matrix

    def eigenvalues(self, t):
        return self._eig_cache(float(t))[0]

    def eigh(self, t):
        return self._eig_cache(float(t))

    @property
    def length(self):
        return self.t1 - self.t0

    @property
    def has_derivative(self):
        return self._derivative is not None

    def derivative(self, t, allow_one_sided=True):
        """``dA/dt`` at ``t``: analytic if available, else a second-order difference.

        Central differences use ``h = 1e-5 * (t1 - t0)``; within ``h`` of an
        endpoint a one-sided second-order stencil is used instead.
        """
        t = float(t)
        if self._derivative is not None:
            d = self._derivative(t)
            return d.matrix if isinstance(d, HermitianOperator) else np.asarray(d, dtype=complex)
        h = FD_RELATIVE_STEP * self.length
        if t - h >= self.t0 and t + h <= self.t1:
            return (self.matrix(t + h) - self.matrix(t - h)) / (2 * h)
        if not allow_one_sided:
            raise DerivativeUnavailableError(f"derivative unavailable at boundary t={t}")
        if t - h < self.t0:
            return (-3 * self.matrix(t) + 4 * self.matrix(t + h) - self.matrix(t + 2 * h)) / (2 * h)
        return (3 * self.matrix(t) - 4 * self.matrix(t - h) + self.matrix(t - 2 * h)) / (2 * h)

    def grid(self, n):
        return np.linspace(self.t0, self.t1, n + 1)

    def shifted(self, delta):
        """The path ``A + delta * I``."""
        eye = np.eye(self.dim)
        deriv = self._derivative
        return OperatorPath(
            lambda t: self.matrix(t) + delta * eye,
            self.t0,
            self.t1,
            derivative=deriv,
            name=f"{self.name or 'path'}+{delta:g}I",
            breakpoints=self.breakpoints,
        )

    def restrict(self, a, b):
        if not (self.t0 <= a < b <= self.t1):
            raise ValueError(f"[{a}, {b}] is not inside [{self.t0}, {self.t1}]")
        return OperatorPath(
            self.matrix, a, b, derivative=self._derivative, name=self.name, breakpoints=self.breakpoints
        )

    def __repr__(self):
        return f"OperatorPath({self.name or 'anonymous'}, [{self.t0:g}, {self.t1:g}], dim={self.dim})"


def constant_path(T, t0=0.0, t1=1.0):
    T = T if isinstance(T, HermitianOperator) else HermitianOperator(T)
    zero = np.zeros_like(T.matrix)
    return OperatorPath(lambda t: T, t0, t1, derivative=lambda t: zero, name="constant")


def concatenate(p1, p2, tol=1e-10):
    """Traverse ``p1`` and then ``p2``; ``p2``'s parameter is shifted to start at ``p1.t1``."""
    gap = max_abs(p1.matrix(p1.t1) - p2.matrix(p2.t0))
    if p1.dim != p2.dim or gap > tol:
        raise EndpointMismatchError(gap if p1.dim == p2.dim else float("inf"))
    offset = p2.t0 - p1.t1
    joint = p1.t1

    def evaluate(t):
        return p1.matrix(t) if t <= joint else p2.matrix(t + offset)

    derivative = None
    if p1.has_derivative and p2.has_derivative:
        def derivative(t):
            return p1.derivative(t) if t <= joint else p2.derivative(t + offset)

    return OperatorPath(
        evaluate,
        p1.t0,
        p1.t1 + p2.length,
        derivative=derivative,
        name=f"({p1.name or 'path'})*({p2.name or 'path'})",
        breakpoints=p1.breakpoints + (joint,) + tuple(b - offset for b in p2.breakpoints),
    )


def reverse(p):
    """``t -> A(t0 + t1 - t)`` on the same interval."""
    s = p.t0 + p.t1
    derivative = None
    if p.has_derivative:
        def derivative(t):
            return -p.derivative(s - t)

    return OperatorPath(
        lambda t: p.matrix(s - t),
        p.t0,
        p.t1,
        derivative=derivative,
        name=f"reverse({p.name or 'path'})",
        breakpoints=tuple(s - b for b in p.breakpoints),
    )


def sampled_path(ts, matrices, interpolation="linear"):
    """Piecewise-linear path through explicit samples."""
    if interpolation != "linear":
        raise DescriptorError(f"unsupported interpolation {interpolation!r}")
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or len(ts) < 2 or np.any(np.diff(ts) <= 0):
        raise DescriptorError("samples need at least two strictly increasing parameters")
    mats = np.array([np.asarray(m, dtype=complex) for m in matrices])
    for m in mats:
        HermitianOperator(m)

    def locate(t):
        return int(np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2))

    def evaluate(t):
        k = locate(t)
        w = (t - ts[k]) / (ts[k + 1] - ts[k])
        return (1 - w) * mats[k] + w * mats[k + 1]

    def derivative(t):
        k = locate(t)
        return (mats[k + 1] - mats[k]) / (ts[k + 1] - ts[k])

    return OperatorPath(evaluate, ts[0], ts[-1], derivative=derivative, name="sampled", breakpoints=ts[1:-1])


def derivative_check(path, points=5, seed=0, h=None):
    """Max discrepancy between the analytic derivative and a central difference.

    Returns a list of ``(t, error)``; callers compare against ``C * h**2``.
    """
    if not path.has_derivative:
        raise DerivativeUnavailableError("path has no analytic derivative to check")
    rng = np.random.default_rng(seed)
    h = h if h is not None else 1e-3 * path.length
    out = []
    for t in rng.uniform(path.t0 + h, path.t1 - h, size=points):
        fd = (path.matrix(t + h) - path.matrix(t - h)) / (2 * h)
        out.append((float(t), max_abs(fd - path.derivative(t))))
    return out
