"""Named operator families with known spectral flow, plus random test paths.

``twisted_fourier`` is the operator ``i d/dx`` on [0, 1] with boundary
condition ``u(0) = exp(i lambda) u(1)``, written in its eigenbasis and
truncated to the modes ``|k| <= K``; its eigenvalues are ``2 pi k + lambda``.
``twisted_fd`` discretizes the same operator with a centred difference and a
phase-twisted cyclic wrap.
"""

import numpy as np

from .errors import DescriptorError, DimensionMismatchError
from .hermitian import HermitianOperator, as_hermitian
from .io import hermitian_from_json
from .paths import OperatorPath, constant_path, sampled_path

FAMILIES = ("twisted_fourier", "twisted_fd", "normalization", "linear_pencil", "random_smooth", "constant")


def twisted_fourier(K, lam):
    if K < 1:
        raise ValueError("K must be at least 1")
    k = np.arange(-K, K + 1)
    return HermitianOperator.diag(2 * np.pi * k + lam)


def twisted_fourier_path(K, t0=-np.pi, t1=np.pi):
    eye = np.eye(2 * K + 1)
    return OperatorPath(
        lambda lam: twisted_fourier(K, lam), t0, t1, derivative=lambda lam: eye, name=f"twisted_fourier(K={K})"
    )


def _twisted_shift(n, lam):
    s = np.eye(n, k=1, dtype=complex)
    s[n - 1, 0] = np.exp(-1j * lam)
    return s


def twisted_fd(n, lam):
    """``(i / 2h)(S+ - S-)`` with ``h = 1/n``; S+ wraps with factor ``exp(-i lambda)``."""
    if n < 8:
        raise ValueError("twisted_fd needs n >= 8")
    sp = _twisted_shift(n, lam)
    return HermitianOperator(1j * n / 2 * (sp - sp.conj().T))


def twisted_fd_derivative(n, lam):
    d = np.zeros((n, n), dtype=complex)
    d[n - 1, 0] = -1j * np.exp(-1j * lam)
    return 1j * n / 2 * (d - d.conj().T)


def twisted_fd_path(n, t0=-np.pi, t1=np.pi):
    return OperatorPath(
        lambda lam: twisted_fd(n, lam),
        t0,
        t1,
        derivative=lambda lam: twisted_fd_derivative(n, lam),
        name=f"twisted_fd(n={n})",
    )


def normalization_operator(n_side, lam):
    """``lam P0 + P+ - P-`` with ``n_side``-dimensional P+ and P-."""
    if n_side < 1:
        raise ValueError("n_side must be at least 1")
    return HermitianOperator.diag([-1.0] * n_side + [lam] + [1.0] * n_side)


def normalization_path(n_side, t0=-1.0, t1=1.0):
    d = np.zeros((2 * n_side + 1, 2 * n_side + 1))
    d[n_side, n_side] = 1.0
    return OperatorPath(
        lambda lam: normalization_operator(n_side, lam), t0, t1, derivative=lambda lam: d,
        name=f"normalization(n_side={n_side})",
    )


def linear_pencil(A0, A1, t0=0.0, t1=1.0):
    """``(1 - s) A0 + s A1`` with ``s`` the affine rescaling of ``t`` to [0, 1]."""
    A0, A1 = as_hermitian(A0), as_hermitian(A1)
    if A0.dim != A1.dim:
        raise DimensionMismatchError(f"dimension mismatch: {A0.dim} vs {A1.dim}")
    diff = (A1.matrix - A0.matrix) / (t1 - t0)
    return OperatorPath(
        lambda t: A0.matrix + (t - t0) * diff, t0, t1, derivative=lambda t: diff, name="linear_pencil"
    )


def random_smooth(dim, seed, knots=3):
    """Seeded Hermitian path ``sum_k C_k cos(k pi t) + S_k sin(k pi t)`` on [0, 1].

    The frequencies are multiples of pi, not 2 pi, so the path is not closed.
    """
    if dim < 1 or knots < 2:
        raise ValueError("random_smooth needs dim >= 1 and knots >= 2")
    rng = np.random.default_rng([int(seed), int(dim), int(knots)])

    def herm():
        x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return (x + x.conj().T) / 2

    cos_c = np.array([herm() / (1 + k) for k in range(knots)])
    sin_c = np.array([herm() / (1 + k) for k in range(knots)])
    freqs = np.pi * np.arange(knots)

    def evaluate(t):
        return np.tensordot(np.cos(freqs * t), cos_c, axes=1) + np.tensordot(np.sin(freqs * t), sin_c, axes=1)

    def derivative(t):
        return np.tensordot(-freqs * np.sin(freqs * t), cos_c, axes=1) + np.tensordot(
            freqs * np.cos(freqs * t), sin_c, axes=1
        )

    return OperatorPath(evaluate, 0.0, 1.0, derivative=derivative, name=f"random_smooth(dim={dim}, seed={seed})")


def _param(params, key, cast, default=None):
    if key in params:
        try:
            return cast(params[key])
        except (TypeError, ValueError):
            raise DescriptorError(f"parameter {key}={params[key]!r} is not a valid {cast.__name__}") from None
    if default is None:
        raise DescriptorError(f"missing parameter {key!r}")
    return default


def _constant_operator(params):
    if "matrix" in params:
        return hermitian_from_json(params["matrix"])
    if "diag" in params:
        return HermitianOperator.diag([float(x) for x in params["diag"]])
    dim = _param(params, "dim", int, 1)
    value = _param(params, "value", float, 1.0)
    return HermitianOperator(value * np.eye(dim))


def path_from_descriptor(desc):
    """Build a path from a family descriptor or a sampled descriptor."""
    if not isinstance(desc, dict):
        raise DescriptorError("path descriptor must be a JSON object")
    if "samples" in desc:
        if "interpolation" not in desc:
            raise DescriptorError("sampled descriptor must declare its interpolation")
        try:
            ts = [float(s["t"]) for s in desc["samples"]]
            mats = [hermitian_from_json(s["matrix"]).matrix for s in desc["samples"]]
        except (KeyError, TypeError):
            raise DescriptorError('samples must be objects {"t": x, "matrix": {...}}') from None
        path = sampled_path(ts, mats, desc["interpolation"])
        path.descriptor = desc
        return path
    family = desc.get("family")
    if family not in FAMILIES:
        raise DescriptorError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    params = desc.get("params", {}) or {}
    t0 = desc.get("t0")
    t1 = desc.get("t1")
    if family == "twisted_fourier":
        path = twisted_fourier_path(_param(params, "K", int), *_bounds(t0, t1, -np.pi, np.pi))
    elif family == "twisted_fd":
        path = twisted_fd_path(_param(params, "n", int), *_bounds(t0, t1, -np.pi, np.pi))
    elif family == "normalization":
        path = normalization_path(_param(params, "n_side", int), *_bounds(t0, t1, -1.0, 1.0))
    elif family == "linear_pencil":
        if "A0" not in params or "A1" not in params:
            raise DescriptorError("linear_pencil needs matrix parameters A0 and A1")
        path = linear_pencil(
            hermitian_from_json(params["A0"]), hermitian_from_json(params["A1"]), *_bounds(t0, t1, 0.0, 1.0)
        )
    elif family == "random_smooth":
        path = random_smooth(_param(params, "dim", int), _param(params, "seed", int, 0), _param(params, "knots", int, 3))
        if (t0 is not None and float(t0) != 0.0) or (t1 is not None and float(t1) != 1.0):
            path = path.restrict(*_bounds(t0, t1, 0.0, 1.0))
    else:
        path = constant_path(_constant_operator(params), *_bounds(t0, t1, 0.0, 1.0))
    path.descriptor = desc
    return path


def _bounds(t0, t1, d0, d1):
    try:
        return (float(d0 if t0 is None else t0), float(d1 if t1 is None else t1))
    except (TypeError, ValueError):
        raise DescriptorError(f"invalid parameter bounds t0={t0!r}, t1={t1!r}") from None
