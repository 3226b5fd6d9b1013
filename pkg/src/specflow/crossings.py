"""Crossings, crossing forms and the crossing-form formula for spectral flow.

At a crossing ``t*`` (an instant where ``A(t*)`` has a kernel) the crossing
form is ``V* A'(t*) V`` for an orthonormal kernel basis ``V``.  When every
crossing is regular (the form is non-degenerate) the spectral flow is

    -m^-(form at t0) + sum of signatures at interior crossings + m^+(form at t1).

Detection: the parameter interval is split adaptively; a subinterval is
discarded when no sorted eigenvalue changes sign across it and each one stays
farther from zero than twice its movement plus its second difference over the
endpoints and midpoint.  Subintervals
that survive down to ``min_width`` are grouped, and each group is resolved by
root finding on the sorted eigenvalues (sign changes) or by minimizing the
smallest ``|eigenvalue|`` (touching crossings).

A crossing sitting on a path breakpoint (a knot where the derivative jumps)
is regular only if the one-sided crossing forms have the same inertia;
otherwise it is reported as irregular so that ``regularize`` moves it off
the knot.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .engine import SflOptions, SflResult, zero_tolerance
from .errors import CrossingClusterError, IrregularCrossingError, RegularizationFailed
from .hermitian import HermitianOperator, inertia, op_norm

KERNEL_RTOL = 1e-8
FORM_RTOL = 1e-8
PARAM_RTOL = 1e-10
ENDPOINT_RTOL = 1e-9
BREAKPOINT_RTOL = 1e-9


class Inertia(NamedTuple):
    plus: int
    minus: int
    null: int

    @property
    def signature(self):
        return self.plus - self.minus


@dataclass(frozen=True, eq=False)
class Crossing:
    t: float
    kernel_basis: np.ndarray
    form: np.ndarray
    inertia: Inertia

    @property
    def regular(self):
        return self.inertia.null == 0

    @property
    def signature(self):
        return self.inertia.signature


@dataclass(frozen=True)
class RegularityReport:
    crossings: tuple
    all_regular: bool
    min_form_eigenvalue_magnitude: float


@dataclass(frozen=True)
class CrossingOptions:
    samples: int = 32
    min_width: float = 1e-6
    max_intervals: int = 200_000
    kernel_rtol: float = KERNEL_RTOL
    form_rtol: float = FORM_RTOL
    param_rtol: float = PARAM_RTOL


def _kernel_tol(w, rtol):
    return rtol * max(1.0, float(np.max(np.abs(w))))


def crossing_form(path, t, kernel_basis, form_rtol=FORM_RTOL):
    """``(form, inertia)`` of ``V* A'(t) V`` with a scale-aware null threshold."""
    return _form(path.derivative(t), kernel_basis, form_rtol)


def _form(d, kernel_basis, form_rtol):
    v = np.asarray(kernel_basis, dtype=complex)
    form = v.conj().T @ d @ v
    form = (form + form.conj().T) / 2
    thresh = form_rtol * max(1.0, op_norm(d))
    mu = np.linalg.eigvalsh(form) if form.size else np.zeros(0)
    return form, Inertia(*inertia(mu, thresh))


def _crossing_at(path, t, indices, opts):
    w, v = path.eigh(t)
    tol = _kernel_tol(w, opts.kernel_rtol)
    kernel = np.flatnonzero(np.abs(w) <= tol)
    if indices is not None and len(kernel) < len(indices):
        raise CrossingClusterError(
            t, f"{len(indices)} eigenvalues change sign here but the numerical kernel has dimension {len(kernel)}"
        )
    if len(kernel) == 0:
        return None
    basis = v[:, kernel]
    form, inert = crossing_form(path, t, basis, opts.form_rtol)
    eta = BREAKPOINT_RTOL * path.length
    if any(abs(t - b) <= eta for b in path.breakpoints):
        # the derivative jumps here; the form is only meaningful if both sides agree
        sides = [
            _form(path.derivative(min(max(s, path.t0), path.t1)), basis, opts.form_rtol)[1]
            for s in (t - eta, t + eta)
        ]
        if sides[0] != sides[1]:
            inert = Inertia(0, 0, basis.shape[1])
    return Crossing(float(t), basis, form, inert)


def _candidate_regions(path, opts):
    """Merged parameter intervals where a crossing cannot be excluded."""
    scale_dt = path.length
    min_width = opts.min_width * scale_dt
    stack = [(a, b) for a, b in zip(path.grid(opts.samples)[:-1], path.grid(opts.samples)[1:])][::-1]
    flagged = []
    seen = 0
    while stack:
        l, r = stack.pop()
        seen += 1
        if seen > opts.max_intervals:
            raise CrossingClusterError(l, "kernel persists over a whole subinterval or crossings accumulate")
        m = (l + r) / 2
        wl, wm, wr = path.eigenvalues(l), path.eigenvalues(m), path.eigenvalues(r)
        # endpoint movement alone misses an eigenvalue that dips to zero and returns,
        # so the second difference enters the reach as a curvature allowance
        spread = np.maximum(np.abs(wr - wl), np.maximum(np.abs(wm - wl), np.abs(wr - wm)))
        reach = 2.0 * (spread + np.abs(wl - 2 * wm + wr))
        lowest = np.minimum(np.minimum(np.abs(wl), np.abs(wr)), np.abs(wm))
        if np.all(lowest > reach) and not np.any(wl * wr <= 0) and not np.any(wl * wm <= 0):
            continue
        if r - l <= min_width:
            flagged.append((l, r))
            continue
        stack.append((m, r))
        stack.append((l, m))
    regions = []
    for l, r in flagged:
        if regions and l <= regions[-1][1]:
            regions[-1][1] = max(regions[-1][1], r)
        else:
            regions.append([l, r])
    return [tuple(x) for x in regions]


def _roots_in_region(path, l, r, opts):
    """(t, eigen-index) pairs where sorted eigenvalues vanish in [l, r]."""
    xtol = opts.param_rtol * path.length
    ts = np.linspace(l, r, 17)
    ws = [path.eigenvalues(t) for t in ts]
    roots = []
    for k in range(len(ts) - 1):
        for j in np.flatnonzero(ws[k] * ws[k + 1] < 0):
            f = lambda t, j=j: path.eigenvalues(t)[j]
            roots.append((brentq(f, ts[k], ts[k + 1], xtol=xtol), int(j)))
    if not roots:
        res = minimize_scalar(
            lambda t: float(np.min(np.abs(path.eigenvalues(t)))),
            bounds=(l, r),
            method="bounded",
            options={"xatol": xtol},
        )
        candidates = [(float(res.x), float(res.fun))] + [(t, float(np.min(np.abs(w)))) for t, w in zip(ts, ws)]
        t_best, val = min(candidates, key=lambda c: c[1])
        if val <= _kernel_tol(path.eigenvalues(t_best), opts.kernel_rtol):
            roots.append((_refine_touch(path, l, r, t_best, xtol), None))
    return roots


def _refine_touch(path, l, r, t_best, xtol):
    """Sharpen a touching zero to the stationary point of the eigenvalue.

    |mu| is flat to second order there, so its minimizer is only accurate to
    about sqrt(machine eps); the slope v* A' v crosses zero linearly instead.
    """
    j = int(np.argmin(np.abs(path.eigenvalues(t_best))))

    def slope(t):
        v = path.eigh(t)[1][:, j]
        return float(np.real(v.conj() @ path.derivative(t) @ v))

    width = max(r - l, 1e-6 * path.length)
    lo, hi = max(path.t0, t_best - width), min(path.t1, t_best + width)
    try:
        if slope(lo) * slope(hi) < 0:
            t = brentq(slope, lo, hi, xtol=xtol)
            if abs(path.eigenvalues(t)[j]) <= abs(path.eigenvalues(t_best)[j]) + _kernel_tol(
                path.eigenvalues(t), KERNEL_RTOL
            ):
                return float(t)
    except ValueError:
        pass
    return t_best


def find_crossings(path, opts=None):
    """All crossings of ``path``, sorted by parameter, with kernel bases and forms."""
    opts = opts or CrossingOptions()
    merge = max(opts.param_rtol, opts.min_width) * path.length
    raw = []
    for t in (path.t0, path.t1):
        w = path.eigenvalues(t)
        if np.min(np.abs(w)) <= _kernel_tol(w, opts.kernel_rtol):
            raw.append((t, None))
    for l, r in _candidate_regions(path, opts):
        raw.extend(_roots_in_region(path, l, r, opts))
    raw.sort(key=lambda x: x[0])

    groups = []
    for t, j in raw:
        if groups and t - groups[-1][-1][0] <= merge:
            groups[-1].append((t, j))
        else:
            groups.append([(t, j)])

    crossings = []
    end_tol = ENDPOINT_RTOL * path.length
    for group in groups:
        ts = [t for t, _ in group]
        indices = {j for _, j in group if j is not None}
        # endpoint crossings are pinned to the endpoint itself
        if min(abs(t - path.t0) for t in ts) <= max(end_tol, merge) and any(t == path.t0 for t in ts):
            t_star = path.t0
        elif min(abs(t - path.t1) for t in ts) <= max(end_tol, merge) and any(t == path.t1 for t in ts):
            t_star = path.t1
        else:
            t_star = min(ts, key=lambda t: float(np.min(np.abs(path.eigenvalues(t)))))
        c = _crossing_at(path, t_star, indices or None, opts)
        if c is not None:
            crossings.append(c)
    return crossings


def regularity_report(path, opts=None):
    crossings = find_crossings(path, opts)
    mags = [float(np.min(np.abs(np.linalg.eigvalsh(c.form)))) for c in crossings if c.form.size]
    return RegularityReport(
        tuple(crossings), all(c.regular for c in crossings), min(mags) if mags else float("inf")
    )


def sfl_crossings(path, opts=None):
    """Spectral flow from the crossing-form formula; every crossing must be regular."""
    opts = opts or CrossingOptions()
    crossings = find_crossings(path, opts)
    end_tol = ENDPOINT_RTOL * path.length
    value = 0
    for c in crossings:
        if not c.regular:
            raise IrregularCrossingError(c.t)
        if c.t - path.t0 <= end_tol:
            value -= c.inertia.minus
        elif path.t1 - c.t <= end_tol:
            value += c.inertia.plus
        else:
            value += c.signature
    cert = [
        {"t": c.t, "kernel_dim": c.kernel_basis.shape[1], "inertia": list(c.inertia)} for c in crossings
    ]
    return SflResult(value, "crossing", cert, {"kernel_rtol": opts.kernel_rtol, "form_rtol": opts.form_rtol})


def regularize(path, scan=40, opts=None, eps0=SflOptions.eps0):
    """Smallest shift ``delta`` on a symmetric grid making ``A + delta I`` regular.

    The scan covers ``(-eps, eps)`` with ``eps`` half the smallest endpoint
    eigenvalue magnitude (at least 1e-4); negative shifts are tried first at
    each magnitude.  Returns ``(delta, shifted_path)``.
    """
    ends = [path.eigenvalues(path.t0), path.eigenvalues(path.t1)]
    eps = max(0.5 * min(float(np.min(np.abs(w))) for w in ends), 1e-4)
    candidates = [0.0]
    for k in range(1, scan + 1):
        d = eps * k / (scan + 1)
        candidates += [-d, d]
    for delta in candidates:
        shifted = path if delta == 0.0 else path.shifted(delta)
        ok_ends = all(
            np.min(np.abs(w + delta)) > zero_tolerance(w + delta, eps0) for w in ends
        )
        if not ok_ends:
            continue
        try:
            crossings = find_crossings(shifted, opts)
        except CrossingClusterError:
            continue
        if all(c.regular for c in crossings):
            return delta, shifted
    raise RegularizationFailed(f"no regularizing shift found among {len(candidates)} candidates in (-{eps:g}, {eps:g})")


def rebased_form(form, unitary):
    """The crossing form expressed in another orthonormal kernel basis."""
    g = unitary.conj().T @ form @ unitary
    return HermitianOperator((g + g.conj().T) / 2)
