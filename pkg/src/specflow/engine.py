"""Spectral flow of a path of Hermitian operators.

Three routes to the same integer:

* :func:`sfl_partition` evaluates the partition definition.  It finds
  instants ``t0 = s_0 < ... < s_n = t1`` and radii ``a_i`` such that no
  eigenvalue of ``A(s)`` passes through ``+-a_i`` for ``s`` in
  ``[s_{i-1}, s_i]``, and sums
  ``dim E_[0, a_i](A(s_i)) - dim E_[0, a_i](A(s_{i-1}))``.
* :func:`sfl_tracking` follows the sorted eigenvalue curves and counts signed
  zero crossings.
* :func:`sfl_morse_oracle` uses the finite-dimensional collapse of the
  definition: negative-eigenvalue count at the start minus at the end.

Zero convention: an eigenvalue ``mu >= -eps0`` counts as lying in
``[0, a]``, with ``eps0 = 1e-9 * max(1, ||A(t)||)`` by default.  A kernel at
the start of a path is therefore counted before the crossing, which matches
the ``-m^-`` / ``+m^+`` endpoint terms of the crossing-form formula.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    BoundaryDegenerateError,
    CertificateInvalid,
    DegenerateEndpointError,
    PartitionFailure,
    PathDiscontinuityError,
    TrackingAmbiguityError,
)
from .hermitian import HermitianOperator, cayley, op_norm
from .paths import OperatorPath


@dataclass(frozen=True)
class SflOptions:
    eps0: float = 1e-9
    samples: int = 8
    tracking_samples: int = 64
    max_depth: int = 20
    continuity_budget: float = 0.5
    verify_factor: int = 4
    min_width: float = 1e-10
    seed: Optional[int] = None


@dataclass(frozen=True)
class PartitionCertificate:
    """Instants, window radii and the window ranks witnessing a partition evaluation.

    ``margins[i]`` is the clearance guaranteed between ``+-radii[i]`` and the
    spectrum on subinterval ``i``: half of the smallest distance observed on
    the construction grid.  ``grid`` is the number of construction steps per
    subinterval.
    """

    instants: tuple
    radii: tuple
    window_ranks: tuple
    margins: tuple
    grid: int

    @property
    def margin(self):
        return min(self.margins) if self.margins else float("inf")

    def __len__(self):
        return len(self.radii)

    def to_json(self):
        return {
            "instants": list(self.instants),
            "radii": list(self.radii),
            "window_ranks": list(self.window_ranks),
            "margins": list(self.margins),
            "grid": self.grid,
        }


@dataclass(frozen=True)
class SflResult:
    value: int
    method: str
    certificate: object = None
    diagnostics: dict = field(default_factory=dict)


def zero_tolerance(w, rel=1e-9):
    return rel * max(1.0, float(np.max(np.abs(w)))) if len(w) else rel


def window_dim(w, a, rel=1e-9):
    """``dim E_[0, a]`` under the signed zero convention."""
    eps = zero_tolerance(w, rel)
    return int(np.sum((w >= -eps) & (w <= a)))


def negative_count(w, rel=1e-9):
    return int(np.sum(w < -zero_tolerance(w, rel)))


def _grid(l, r, n, rng):
    ts = np.linspace(l, r, n + 1)
    if rng is not None and n > 1:
        h = (r - l) / n
        ts[1:-1] += rng.uniform(-0.3, 0.3, size=n - 1) * h
    return ts


def _choose_radius(abs_vals, drift, floor):
    """Midpoint of the widest gap in ``abs_vals`` that clears ``4 * drift``.

    The unbounded gap above the largest value is given width ``max(1, top)``.
    Returns ``(a, half_width)`` or None.
    """
    vals = np.unique(abs_vals)
    lows = np.concatenate([[0.0], vals])
    highs = np.concatenate([vals, [vals[-1] + max(1.0, vals[-1])]])
    halves = (highs - lows) / 2
    ok = (halves >= 4 * drift) & (halves >= floor) & (highs > 0)
    if not np.any(ok):
        return None
    j = int(np.argmax(np.where(ok, halves, -1.0)))
    return float((lows[j] + highs[j]) / 2), float(halves[j])


def _try_window(path, l, r, opts, rng):
    ts = _grid(l, r, opts.samples, rng)
    eigs = [path.eigenvalues(t) for t in ts]
    if opts.continuity_budget is not None:
        kappas = [cayley(path(t)).matrix for t in ts]
        jumps = [op_norm(kappas[k + 1] - kappas[k]) for k in range(len(ts) - 1)]
        worst = max(jumps)
        if worst > opts.continuity_budget:
            return ("discontinuous", worst)
    drift = max(float(np.max(np.abs(eigs[k + 1] - eigs[k]))) for k in range(len(ts) - 1))
    scale = max(max(1.0, float(np.max(np.abs(w)))) for w in eigs)
    choice = _choose_radius(np.abs(np.concatenate(eigs)), drift, 1e-8 * scale)
    if choice is None:
        return None
    a, half = choice
    ranks = {int(np.sum(np.abs(w) <= a)) for w in eigs}
    if len(ranks) != 1:
        return None
    return (a, ranks.pop(), half / 2)


def build_partition(path, opts=None):
    """Construct a PartitionCertificate by adaptive bisection."""
    opts = opts or SflOptions()
    rng = np.random.default_rng(opts.seed) if opts.seed is not None else None
    instants = [path.t0]
    radii, ranks, margins = [], [], []
    stack = [(path.t0, path.t1, 0)]
    while stack:
        l, r, depth = stack.pop()
        piece = _try_window(path, l, r, opts, rng)
        if piece is None or piece[0] == "discontinuous":
            if depth >= opts.max_depth:
                if piece is not None:
                    raise PathDiscontinuityError(l, r, piece[1], opts.continuity_budget)
                raise PartitionFailure(l, r)
            if rng is not None:
                m = l + (r - l) * rng.uniform(0.35, 0.65)
            else:
                m = (l + r) / 2
            stack.append((m, r, depth + 1))
            stack.append((l, m, depth + 1))
            continue
        a, rank, margin = piece
        instants.append(r)
        radii.append(a)
        ranks.append(rank)
        margins.append(margin)
    return PartitionCertificate(tuple(instants), tuple(radii), tuple(ranks), tuple(margins), opts.samples)


def evaluate_certificate(path, cert, eps0=1e-9):
    """The telescoped window-dimension sum a certificate witnesses."""
    total = 0
    for i, a in enumerate(cert.radii):
        total += window_dim(path.eigenvalues(cert.instants[i + 1]), a, eps0)
        total -= window_dim(path.eigenvalues(cert.instants[i]), a, eps0)
    return total


def verify_certificate(path, cert, factor=4):
    """Re-check a certificate on a grid ``factor`` times finer than its construction grid.

    Returns True or raises CertificateInvalid naming the offending instant.
    """
    if cert.instants[0] != path.t0 or cert.instants[-1] != path.t1:
        raise CertificateInvalid("certificate does not span the path's parameter interval")
    for i, a in enumerate(cert.radii):
        l, r = cert.instants[i], cert.instants[i + 1]
        if not l <= r:
            raise CertificateInvalid(f"instants not ordered at index {i}")
        for t in np.linspace(l, r, factor * cert.grid + 1):
            w = path.eigenvalues(t)
            clearance = float(np.min(np.abs(np.abs(w) - a))) if len(w) else np.inf
            if clearance < cert.margins[i]:
                raise CertificateInvalid(
                    f"eigenvalue within {clearance:.3e} of +-{a:.6g} at t={t!r} (margin {cert.margins[i]:.3e})"
                )
            if int(np.sum(np.abs(w) <= a)) != cert.window_ranks[i]:
                raise CertificateInvalid(f"window rank changes at t={t!r} on subinterval {i}")
    return True


def certify(path, instants, radii, grid=32):
    """Certificate for user-chosen instants and radii, with margins measured on a grid."""
    instants = tuple(float(t) for t in instants)
    radii = tuple(float(a) for a in radii)
    if len(instants) != len(radii) + 1:
        raise CertificateInvalid("need exactly one radius per subinterval")
    ranks, margins = [], []
    for i, a in enumerate(radii):
        if not a > 0:
            raise CertificateInvalid(f"radius {a!r} is not positive")
        seen_ranks = set()
        clearance = np.inf
        for t in np.linspace(instants[i], instants[i + 1], grid + 1):
            w = path.eigenvalues(t)
            seen_ranks.add(int(np.sum(np.abs(w) <= a)))
            clearance = min(clearance, float(np.min(np.abs(np.abs(w) - a))))
        if len(seen_ranks) != 1 or clearance == 0.0:
            raise CertificateInvalid(f"+-{a:g} is crossed by the spectrum on subinterval {i}")
        ranks.append(seen_ranks.pop())
        margins.append(clearance / 2)
    return PartitionCertificate(instants, radii, tuple(ranks), tuple(margins), grid)


def sfl_partition(path, opts=None):
    opts = opts or SflOptions()
    cert = build_partition(path, opts)
    verify_certificate(path, cert, opts.verify_factor)
    value = evaluate_certificate(path, cert, opts.eps0)
    return SflResult(
        value,
        "partition",
        cert,
        {"eps0": opts.eps0, "subintervals": len(cert), "margin": cert.margin, "seed": opts.seed},
    )


def sfl_morse_oracle(path, opts=None):
    opts = opts or SflOptions()
    counts = []
    for t in (path.t0, path.t1):
        w = path.eigenvalues(t)
        eps = zero_tolerance(w, opts.eps0)
        small = np.abs(w) <= eps
        if np.any(small):
            raise DegenerateEndpointError(t, float(w[small][0]))
        counts.append((int(np.sum(w > 0)), int(np.sum(w < 0))))
    value = counts[0][1] - counts[1][1]
    cert = {"start_inertia": counts[0], "end_inertia": counts[1]}
    return SflResult(value, "morse", cert, {"eps0": opts.eps0})


class CrossingEvent(NamedTuple):
    left: float
    right: float
    change: int
    degenerate: bool


def _local_gap(wl, wr, involved):
    n = len(wl)
    lo = max(min(involved) - 1, 0)
    hi = min(max(involved) + 1, n - 1)
    if hi == lo:
        return np.inf
    return float(min(np.min(np.diff(wl[lo : hi + 1])), np.min(np.diff(wr[lo : hi + 1]))))


def sfl_tracking(path, opts=None):
    """Signed zero crossings of the sorted eigenvalue curves on an adaptive grid.

    Step control: on every step where an eigenvalue changes sign class or
    comes within its own movement of zero, the largest movement of those
    eigenvalues must be at most half the spacing to their neighbours.
    Steps are bisected until this holds.  Steps that shrink below
    ``min_width * (t1 - t0)`` are accepted only if the involved eigenvalues
    barely move there (a genuine multiple crossing); otherwise the path is
    reported as ambiguous.
    """
    opts = opts or SflOptions()
    ts = path.grid(opts.tracking_samples)
    stack = [(ts[k], ts[k + 1]) for k in range(len(ts) - 2, -1, -1)]
    min_width = opts.min_width * path.length
    value = 0
    events = []
    steps = 0
    while stack:
        l, r = stack.pop()
        steps += 1
        wl, wr = path.eigenvalues(l), path.eigenvalues(r)
        cl = wl >= -zero_tolerance(wl, opts.eps0)
        cr = wr >= -zero_tolerance(wr, opts.eps0)
        changes = cr.astype(int) - cl.astype(int)
        move = np.abs(wr - wl)
        near = (changes != 0) | (np.minimum(np.abs(wl), np.abs(wr)) <= move)
        if not np.any(near):
            continue
        involved = np.flatnonzero(near)
        movement = float(np.max(move[involved]))
        if movement <= _local_gap(wl, wr, involved) / 2:
            degenerate = False
        elif r - l <= min_width:
            scale = max(1.0, float(np.max(np.abs(wl))))
            if movement > 1e-6 * scale:
                raise TrackingAmbiguityError(l, r)
            degenerate = True
        else:
            m = (l + r) / 2
            stack.append((m, r))
            stack.append((l, m))
            continue
        delta = int(np.sum(changes))
        value += delta
        if np.any(changes):
            events.append(CrossingEvent(float(l), float(r), delta, degenerate))
    return SflResult(value, "tracking", events, {"eps0": opts.eps0, "steps": steps})


class HomotopyVerdict(NamedTuple):
    s_values: tuple
    values: tuple
    passed: bool


def homotopy_invariance_check(h, s_values, t0, t1, method="partition", opts=None):
    """Spectral flow of ``t -> h(s, t)`` for each ``s``; passes iff all values agree."""
    opts = opts or SflOptions()
    compute = {"partition": sfl_partition, "tracking": sfl_tracking, "morse": sfl_morse_oracle}[method]
    values = []
    for s in s_values:
        for t in (t0, t1):
            w = np.linalg.eigvalsh(HermitianOperator(h(s, t)).matrix)
            eps = zero_tolerance(w, opts.eps0)
            if np.any(np.abs(w) <= eps):
                raise BoundaryDegenerateError(s, t, float(w[np.argmin(np.abs(w))]))
        path = OperatorPath(lambda t, s=s: h(s, t), t0, t1, name=f"h(s={s:g}, .)")
        values.append(compute(path, opts).value)
    return HomotopyVerdict(tuple(float(s) for s in s_values), tuple(values), len(set(values)) <= 1)
