"""Residualization against confounder column spaces.

The projector ``P = I - Q Q^T`` onto the orthogonal complement of a
confounder's column space is never formed; it is applied as
``y - Q (Q^T y)`` with ``Q`` an orthonormal basis from a column-pivoted QR
factorization. Memory stays ``O(T r)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import StructuralError

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class OrthonormalBasis:
    q: np.ndarray
    rank: int
    tol_used: float

    @property
    def t_len(self) -> int:
        return self.q.shape[0]


def orthonormal_basis(m, tol: float = DEFAULT_TOL) -> OrthonormalBasis:
    """Rank-revealing orthonormal basis for the column space of ``m``.

    Columns whose pivoted-QR diagonal falls below ``tol * |R[0, 0]|`` are
    treated as linearly dependent and dropped. Column signs are fixed so
    that the retained diagonal of ``R`` is positive.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    t_len, k = m.shape
    if k == 0 or t_len == 0:
        return OrthonormalBasis(np.zeros((t_len, 0)), 0, tol)
    q, r, _ = scipy.linalg.qr(m, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[0] == 0.0:
        return OrthonormalBasis(np.zeros((t_len, 0)), 0, tol)
    rank = int(np.count_nonzero(diag > tol * diag[0]))
    signs = np.sign(np.diag(r)[:rank])
    signs[signs == 0] = 1.0
    return OrthonormalBasis(q[:, :rank] * signs, rank, tol)


def residualize(y, basis: OrthonormalBasis) -> np.ndarray:
    """Apply ``I - Q Q^T`` to ``y``."""
    y = np.asarray(y, dtype=float)
    squeeze = y.ndim == 1
    if squeeze:
        y = y[:, None]
    if y.shape[0] != basis.t_len:
        raise StructuralError(
            f"row mismatch: y has {y.shape[0]} rows, basis has {basis.t_len}"
        )
    if basis.rank == 0:
        out = y.copy()
    else:
        out = y - basis.q @ (basis.q.T @ y)
    return out[:, 0] if squeeze else out


def joint_basis(z_a, z_b, tol: float = DEFAULT_TOL) -> OrthonormalBasis:
    """Basis for the union of the column spaces of ``z_a`` and ``z_b``."""
    z_a = np.asarray(z_a, dtype=float)
    z_b = np.asarray(z_b, dtype=float)
    if z_a.ndim == 1:
        z_a = z_a[:, None]
    if z_b.ndim == 1:
        z_b = z_b[:, None]
    if z_a.shape[0] != z_b.shape[0]:
        raise StructuralError(
            f"row mismatch between confounders: {z_a.shape[0]} vs {z_b.shape[0]}"
        )
    return orthonormal_basis(np.hstack([z_a, z_b]), tol)


def joint_residualize(y, z_a, z_b, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Residual of ``y`` orthogonal to the columns of both ``z_a`` and ``z_b``."""
    return residualize(y, joint_basis(z_a, z_b, tol))
