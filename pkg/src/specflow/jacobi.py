"""Cyclic Jacobi eigensolver for dense complex Hermitian matrices.

Each rotation first removes the phase of the pivot ``a[p, q]`` and then
applies the classical real Jacobi rotation, so the composite 2x2 unitary is
``diag(1, exp(-i phi)) @ [[c, s], [-s, c]]``.  Pivots are visited in row
order, which makes the result a deterministic function of the input bits.
"""

import numpy as np

from .errors import ConvergenceError


def _off_norm(a):
    return np.linalg.norm(a - np.diag(np.diag(a)))


def jacobi_eigh(matrix, tol=1e-14, max_sweeps=60):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Raises ConvergenceError carrying the off-diagonal residual if the
    off-diagonal Frobenius norm has not dropped below ``tol * ||A||_F``
    after ``max_sweeps`` cyclic sweeps.
    """
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        w = np.real(np.diag(a)).copy()
        order = np.argsort(w, kind="stable")
        return w[order], v[:, order]

    threshold = tol * scale
    skip = 1e-3 * tol * scale / n
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                # tiny pivots are skipped; their phase is unreliable near underflow
                if r <= skip:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    else:
        residual = _off_norm(a)
        if residual > threshold:
            raise ConvergenceError("Jacobi iteration did not converge", residual)

    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
