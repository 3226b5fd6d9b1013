"""Seeded invariant suite behind ``specflow verify``.

Each group is a list of named checks; a check returns True/False or raises.
Exceptions count as failures and their message is kept in the report.
"""

import numpy as np

from . import crossings as cx
from . import engine, gallery, hermitian as hm, paths, projections as pj

GROUPS = ("hermitian", "projection", "specflow", "crossing", "gallery")
FAULTS = ("hermiticity",)


def _corpus(rng, count=20, max_dim=8):
    return [hm.random_hermitian(int(rng.integers(1, max_dim + 1)), rng) for _ in range(count)]


def _hermitian_checks(rng, fault):
    corpus = _corpus(rng)
    raw = [T.matrix for T in corpus]
    if fault == "hermiticity":
        bad = np.array(raw[0], dtype=complex)
        if bad.shape[0] == 1:
            bad = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        else:
            bad[0, -1] += 1e-3
        raw.append(bad)

    def hermiticity():
        return all(hm.max_abs(m - m.conj().T) <= hm.HERMITICITY_RTOL * max(1.0, hm.max_abs(m)) for m in raw)

    def cayley_roundtrip():
        return all(hm.max_abs(hm.inverse_cayley(hm.cayley(T)).matrix - T.matrix) <= 1e-10 for T in corpus)

    def unitarity():
        return all(
            hm.max_abs(U @ U.conj().T - np.eye(len(U))) <= 1e-12 for U in (hm.cayley(T).matrix for T in corpus)
        )

    def spectral_mapping():
        for T in corpus:
            mu = T.eigenvalues()
            expected = np.sort_complex((mu - 1j) / (mu + 1j))
            got = np.linalg.eigvals(hm.cayley(T).matrix)
            if _setwise(got, expected) > 1e-10:
                return False
        return True

    def gap_identity():
        pairs = zip(corpus[::2], corpus[1::2])
        for a, b in pairs:
            if a.dim != b.dim:
                b = hm.random_hermitian(a.dim, rng)
            dg, dd = hm.gap_distance(a, b), hm.delta_distance(a, b)
            if abs(dg - 2 * dd) > 1e-12 * max(dg, 1e-300):
                return False
        return True

    def resolvent_bound():
        for T in corpus:
            beta = float(rng.uniform(0.05, 3.0)) * rng.choice([-1, 1])
            lam = float(rng.normal()) + 1j * beta
            if hm.op_norm(-hm.resolvent(T, lam)) > 1 / abs(beta) + 1e-12:
                return False
        return True

    def neumann_series():
        for T in corpus[:8]:
            z0 = 2j
            radius = 1 / hm.op_norm(hm.resolvent(T, z0))
            z = z0 + 0.5 * radius * np.exp(1j * rng.uniform(0, 2 * np.pi))
            if hm.max_abs(hm.resolvent_series(T, z0, z, 80) - hm.resolvent(T, z)) > 1e-8:
                return False
        return True

    return {
        "hermiticity": hermiticity,
        "cayley_roundtrip": cayley_roundtrip,
        "unitarity": unitarity,
        "spectral_mapping": spectral_mapping,
        "gap_identity": gap_identity,
        "resolvent_bound": resolvent_bound,
        "neumann_series": neumann_series,
    }


def _setwise(a, b):
    """Largest distance from any point of one set to the nearest point of the other."""
    a, b = np.asarray(a), np.asarray(b)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _gap_window(w, rng):
    """A window [a, b] whose edges sit in spectral gaps of ``w``."""
    w = np.sort(w)
    i = int(rng.integers(0, len(w)))
    j = int(rng.integers(i, len(w)))
    a = (w[i - 1] + w[i]) / 2 if i > 0 else w[0] - 1.0
    b = (w[j] + w[j + 1]) / 2 if j + 1 < len(w) else w[-1] + 1.0
    return a, b


def spaced_hermitian(dim, rng, min_gap=0.5):
    """Random Hermitian matrix whose eigenvalues are at least ``min_gap`` apart."""
    w = np.cumsum(rng.uniform(min_gap, 3 * min_gap, size=dim))
    w -= w.mean()
    u = hm.random_unitary(dim, rng)
    return hm.HermitianOperator(u @ np.diag(w) @ u.conj().T)


def _projection_checks(rng):
    corpus = [spaced_hermitian(int(rng.integers(2, 9)), rng) for _ in range(8)]

    def oracle_equivalence():
        for T in corpus:
            a, b = _gap_window(T.eigenvalues(), rng)
            p = pj.contour_projection(T, pj.ContourDescriptor.for_window(a, b))
            q = pj.eigen_projection(T, a, b)
            if hm.max_abs(p.matrix - q.matrix) > 1e-8 or p.rank != q.rank:
                return False
        return True

    def idempotence():
        for T in corpus:
            a, b = _gap_window(T.eigenvalues(), rng)
            p = pj.contour_projection(T, pj.ContourDescriptor.for_window(a, b)).matrix
            if not pj.is_orthogonal_projection(p, 1e-10):
                return False
        return True

    def rank_additivity():
        for T in corpus:
            w = np.sort(T.eigenvalues())
            cuts = np.concatenate([[w[0] - 1], (w[:-1] + w[1:]) / 2, [w[-1] + 1]])
            i, j, k = sorted(rng.choice(len(cuts), size=3, replace=False))
            p = pj.eigen_projection(T, cuts[i], cuts[j])
            q = pj.eigen_projection(T, cuts[j], cuts[k])
            u = pj.eigen_projection(T, cuts[i], cuts[k])
            if p.rank + q.rank != u.rank or hm.max_abs(p.matrix + q.matrix - u.matrix) > 1e-9:
                return False
            if hm.op_norm(p.matrix @ q.matrix - q.matrix @ p.matrix) > 1e-9:
                return False
        return True

    def continuity_bound():
        for T in corpus:
            S = hm.HermitianOperator(T.matrix + 1e-3 * hm.random_hermitian(T.dim, rng).matrix)
            a, b = _gap_window(T.eigenvalues(), rng)
            if not pj.projection_continuity_bound(T, S, pj.ContourDescriptor.for_window(a, b)).holds:
                return False
        return True

    def rank_stability():
        for T in corpus:
            S = hm.HermitianOperator(T.matrix + 1e-2 * hm.random_hermitian(T.dim, rng).matrix)
            a, b = _gap_window(np.concatenate([T.eigenvalues(), S.eigenvalues()]), rng)
            if not pj.projection_rank_stability(pj.eigen_projection(T, a, b), pj.eigen_projection(S, a, b)).satisfied:
                return False
        return True

    return {
        "oracle_equivalence": oracle_equivalence,
        "idempotence": idempotence,
        "rank_additivity": rank_additivity,
        "continuity_bound": continuity_bound,
        "rank_stability": rank_stability,
    }


def _specflow_checks(rng):
    seeds = [int(s) for s in rng.integers(0, 2**31, size=10)]
    corpus = [gallery.random_smooth(2 + k % 7, s) for k, s in enumerate(seeds)]

    def method_agreement():
        for p in corpus:
            values = {engine.sfl_partition(p).value, engine.sfl_tracking(p).value, engine.sfl_morse_oracle(p).value}
            if len(values) != 1:
                return False
        return True

    def additivity():
        for p in corpus:
            m = float(rng.uniform(0.2, 0.8))
            left, right = p.restrict(p.t0, m), p.restrict(m, p.t1)
            whole = engine.sfl_partition(paths.concatenate(left, right)).value
            if whole != engine.sfl_partition(left).value + engine.sfl_partition(right).value:
                return False
            if whole != engine.sfl_partition(p).value:
                return False
        return True

    def antisymmetry():
        return all(engine.sfl_tracking(paths.reverse(p)).value == -engine.sfl_tracking(p).value for p in corpus)

    def invertible_zero():
        for p in corpus:
            shift = 1.0 + max(float(np.max(np.abs(p.eigenvalues(t)))) for t in p.grid(64))
            q = p.shifted(shift)
            if engine.sfl_partition(q).value != 0:
                return False
        return True

    def certificate_soundness():
        return all(engine.verify_certificate(p, engine.sfl_partition(p).certificate, 4) for p in corpus)

    def well_definedness():
        for p in corpus:
            a = engine.sfl_partition(p, engine.SflOptions(seed=1)).value
            b = engine.sfl_partition(p, engine.SflOptions(seed=2, samples=11)).value
            if a != b:
                return False
        return True

    def normalization():
        return all(engine.sfl_partition(gallery.normalization_path(n)).value == 1 for n in (1, 3, 10))

    return {
        "method_agreement": method_agreement,
        "additivity": additivity,
        "antisymmetry": antisymmetry,
        "invertible_zero": invertible_zero,
        "certificate_soundness": certificate_soundness,
        "well_definedness": well_definedness,
        "normalization": normalization,
    }


def _crossing_checks(rng):
    seeds = [int(s) for s in rng.integers(0, 2**31, size=10)]
    corpus = [gallery.random_smooth(2 + k % 7, s) for k, s in enumerate(seeds)]

    def crossing_formula():
        for p in corpus:
            _, q = cx.regularize(p)
            if cx.sfl_crossings(q).value != engine.sfl_partition(p).value:
                return False
        return True

    def basis_invariance():
        for p in corpus:
            for c in cx.find_crossings(p):
                u = hm.random_unitary(c.kernel_basis.shape[1], rng)
                _, inert = cx.crossing_form(p, c.t, c.kernel_basis @ u)
                if inert != c.inertia:
                    return False
        return True

    def endpoint_convention():
        families = [lambda t: [[t - 0.5]], lambda t: [[t]], lambda t: [[-t]]]
        for f in families:
            p = paths.OperatorPath(f, 0.0, 1.0)
            if cx.sfl_crossings(p).value != engine.sfl_partition(p).value:
                return False
        return True

    def derivative_consistency():
        for p in corpus[:5]:
            t = float(rng.uniform(0.1, 0.9))
            errs = []
            for h in (1e-3, 5e-4):
                fd = (p.matrix(t + h) - p.matrix(t - h)) / (2 * h)
                errs.append(hm.max_abs(fd - p.derivative(t)))
            if errs[0] > 1e-12 and not 3.0 <= errs[0] / max(errs[1], 1e-300) <= 5.0:
                return False
        return True

    return {
        "crossing_formula": crossing_formula,
        "basis_invariance": basis_invariance,
        "endpoint_convention": endpoint_convention,
        "derivative_consistency": derivative_consistency,
    }


def _gallery_checks(rng):
    def twisted_fourier_loop():
        for K in range(1, 9):
            p = gallery.twisted_fourier_path(K)
            if {engine.sfl_partition(p).value, engine.sfl_tracking(p).value, cx.sfl_crossings(p).value} != {1}:
                return False
        return True

    def fd_convergence_order():
        lam = float(rng.uniform(-1, 1))
        ns = [50, 100, 200, 400]
        errs = []
        for n in ns:
            w = gallery.twisted_fd(n, lam).eigenvalues()
            target = 2 * np.pi + lam
            errs.append(float(np.min(np.abs(w - target))))
        slope = -np.polyfit(np.log(ns), np.log(errs), 1)[0]
        return abs(slope - 2.0) <= 0.2

    def normalization_independence():
        return all(engine.sfl_tracking(gallery.normalization_path(n)).value == 1 for n in (1, 2, 5))

    return {
        "twisted_fourier_loop": twisted_fourier_loop,
        "fd_convergence_order": fd_convergence_order,
        "normalization_independence": normalization_independence,
    }


def run_suite(seed=0, groups=None, inject=None):
    """Run the selected groups; returns ``{"seed", "groups": {group: {check: result}}, "passed"}``."""
    groups = list(groups) if groups else list(GROUPS)
    unknown = [g for g in groups if g not in GROUPS]
    if unknown:
        raise ValueError(f"unknown group(s): {', '.join(unknown)}")
    if inject is not None and inject not in FAULTS:
        raise ValueError(f"unknown fault {inject!r}")
    report = {}
    passed = True
    for name in GROUPS:
        if name not in groups:
            continue
        rng = np.random.default_rng([seed, GROUPS.index(name)])
        checks = {
            "hermitian": lambda: _hermitian_checks(rng, inject),
            "projection": lambda: _projection_checks(rng),
            "specflow": lambda: _specflow_checks(rng),
            "crossing": lambda: _crossing_checks(rng),
            "gallery": lambda: _gallery_checks(rng),
        }[name]()
        results = {}
        for check, fn in checks.items():
            try:
                ok = bool(fn())
                results[check] = {"passed": ok}
            except Exception as exc:  # a raising check is a failing check
                ok = False
                results[check] = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
            passed &= ok
        report[name] = results
    return {"seed": seed, "groups": report, "passed": passed, "inject": inject}
