"""Small dense symmetric eigenproblems.

Matrices here are at most the size of a 2-ball, so a cyclic Jacobi sweep
is plenty fast and keeps the eigen-decomposition self-contained.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PSD_TOL = 1e-10
JACOBI_TOL = 1e-12


class PencilError(ValueError):
    """The right-hand matrix of a pencil is not positive semidefinite."""


def jacobi_eigh(a, *, tol: float = JACOBI_TOL, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with ascending eigenvalues ``w`` and orthonormal
    eigenvectors in the columns of ``v``. Iterates until the off-diagonal
    Frobenius norm drops below ``tol`` times the matrix norm.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0.0:
        order = np.argsort(np.diag(a), kind="stable")
        return np.diag(a)[order], v[:, order]
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-20 * scale:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _split(b, tol: float):
    wb, vb = jacobi_eigh(b)
    scale = max(np.max(np.abs(wb)), 1.0) if wb.size else 1.0
    if wb.size and wb[0] < -tol * scale:
        raise PencilError(f"matrix is indefinite (eigenvalue {wb[0]:.3e})")
    keep = wb > tol * scale
    return wb[keep], vb[:, keep], vb[:, ~keep]


@dataclass(frozen=True)
class PencilResult:
    eigenvalues: np.ndarray  # ascending, on range(B)
    a_psd_on_kernel: bool
    rank: int


def sym_geig(a, b, *, tol: float = PSD_TOL) -> PencilResult:
    """Eigenvalues of the pencil ``A f = lambda B f`` on the range of ``B``.

    ``ker(B)`` is projected out through an eigen-decomposition of ``B``, and
    ``A`` is congruence-transformed onto the remaining directions. Whether
    ``A`` is positive semidefinite on ``ker(B)`` is reported separately,
    since the pencil eigenvalues cannot see those directions.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    wr, vr, vn = _split(b, tol)
    w_half = vr / np.sqrt(wr)
    eig = jacobi_eigh(w_half.T @ a @ w_half)[0] if wr.size else np.empty(0)
    if vn.shape[1]:
        a_nn = vn.T @ a @ vn
        a_scale = max(np.linalg.norm(a), 1.0)
        psd = bool(jacobi_eigh(a_nn)[0][0] >= -tol * a_scale)
    else:
        psd = True
    return PencilResult(eig, psd, int(wr.size))


def max_psd_shift(a, b, *, tol: float = PSD_TOL) -> float:
    """Largest ``k`` with ``A - k B`` positive semidefinite (``B`` PSD).

    Unlike the bare pencil spectrum this accounts for the coupling between
    ``range(B)`` and ``ker(B)``: those directions are eliminated with a
    Schur complement. Returns ``-inf`` when no shift works and ``inf`` when
    ``B`` vanishes and ``A`` is PSD.
    """
    a = np.asarray(a, dtype=float)
    a = 0.5 * (a + a.T)
    b = np.asarray(b, dtype=float)
    wr, vr, vn = _split(b, tol)
    a_scale = max(np.linalg.norm(a), 1.0)
    a_rr = vr.T @ a @ vr
    if vn.shape[1]:
        a_nn = vn.T @ a @ vn
        a_rn = vr.T @ a @ vn
        wn, un = jacobi_eigh(a_nn)
        if wn[0] < -tol * a_scale:
            return -np.inf
        pos = wn > tol * a_scale
        # kernel directions of A_NN must not couple into range(B)
        if np.any(np.abs(a_rn @ un[:, ~pos]) > 1e3 * tol * a_scale):
            return -np.inf
        z = un[:, pos]
        a_rr = a_rr - (a_rn @ z) @ np.diag(1.0 / wn[pos]) @ (a_rn @ z).T
    if not wr.size:
        return np.inf
    w_half = 1.0 / np.sqrt(wr)
    return float(jacobi_eigh(w_half[:, None] * a_rr * w_half[None, :])[0][0])
