"""Association measures rho(X; Y): how well Y can be predicted from X.

Three built-in measures are provided:

``pearson1d``
    Sample Pearson correlation; both series must be one-dimensional.
``linreg_r2``
    In-sample fraction of variance of Y explained by an ordinary least
    squares fit on X.
``ridge_r2``
    The same with a ridge penalty on the non-intercept coefficients.

Scores are training (in-sample) scores. ``linreg_r2`` is computed through a
pivoted-QR projection and ``ridge_r2`` through an SVD shrinkage, so that with
``lambda = 0`` the two act as independent cross-checks of each other.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError, DegenerateSeries, IllConditioned
from .projection import DEFAULT_TOL, orthonormal_basis, residualize

KINDS = ("pearson1d", "linreg_r2", "ridge_r2")

# A centered series whose norm is this small relative to its raw norm is
# treated as constant.
_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class RhoMeasure:
    kind: str = "pearson1d"
    ridge_lambda: float = 0.0
    add_intercept: bool = True
    standardize: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown rho measure {self.kind!r}; choose from {KINDS}")
        if not self.ridge_lambda >= 0:
            raise ConfigError(f"ridge_lambda must be >= 0, got {self.ridge_lambda}")

    def check_dims(self, p: int, q: int):
        if self.kind == "pearson1d" and (p != 1 or q != 1):
            raise ConfigError(f"pearson1d needs 1-D x and y, got p={p}, q={q}")

    def to_dict(self) -> dict:
        return asdict(self)


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def _centered(v: np.ndarray, name: str) -> np.ndarray:
    c = v - v.mean(axis=0)
    if np.linalg.norm(c) <= _DEGENERATE_RTOL * np.linalg.norm(v):
        raise DegenerateSeries(f"{name} has zero variance")
    return c


def rho_pearson(x, y) -> float:
    """Sample Pearson correlation of two length-``T`` series."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ConfigError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise DegenerateSeries("need at least 2 timepoints")
    xc = _centered(x, "x")
    yc = _centered(y, "y")
    r = float(np.dot(xc, yc)) / (float(np.linalg.norm(xc)) * float(np.linalg.norm(yc)))
    return min(1.0, max(-1.0, r))


def _design(x: np.ndarray, add_intercept: bool, standardize: bool) -> np.ndarray:
    if add_intercept:
        x = x - x.mean(axis=0)
    if standardize:
        sd = x.std(axis=0)
        sd[sd == 0] = 1.0
        x = x / sd
    return x


def _check_sizes(x: np.ndarray, y: np.ndarray, add_intercept: bool):
    if x.shape[0] != y.shape[0]:
        raise ConfigError(f"row mismatch: x has {x.shape[0]} rows, y has {y.shape[0]}")
    n_params = x.shape[1] + int(add_intercept)
    if x.shape[0] <= n_params:
        raise IllConditioned(
            f"T={x.shape[0]} timepoints cannot support {n_params} unpenalized parameters"
        )


def rho_linreg(x, y, add_intercept: bool = True, standardize: bool = False) -> float:
    """Least-squares R^2 of ``y`` on ``x``, via orthogonal projection."""
    x, y = _as_matrix(x), _as_matrix(y)
    _check_sizes(x, y, add_intercept)
    sst = float(np.sum(_centered(y, "y") ** 2))
    target = y - y.mean(axis=0) if add_intercept else y
    resid = residualize(target, orthonormal_basis(_design(x, add_intercept, standardize)))
    return 1.0 - float(np.sum(resid**2)) / sst


def rho_ridge(
    x, y, lam: float, add_intercept: bool = True, standardize: bool = False
) -> float:
    """Ridge R^2 of ``y`` on ``x`` (training score), via SVD shrinkage.

    The intercept, when fitted, is not penalized. ``lam = 0`` reduces to
    ordinary least squares on the numerically nonzero singular directions.
    """
    if lam < 0:
        raise ConfigError(f"ridge penalty must be >= 0, got {lam}")
    x, y = _as_matrix(x), _as_matrix(y)
    if lam == 0:
        _check_sizes(x, y, add_intercept)
    elif x.shape[0] != y.shape[0]:
        raise ConfigError(f"row mismatch: x has {x.shape[0]} rows, y has {y.shape[0]}")
    sst = float(np.sum(_centered(y, "y") ** 2))
    target = y - y.mean(axis=0) if add_intercept else y
    design = _design(x, add_intercept, standardize)
    if design.shape[1] == 0:
        fitted = np.zeros_like(target)
    else:
        u, s, _ = np.linalg.svd(design, full_matrices=False)
        keep = s > DEFAULT_TOL * s[0] if s.size and s[0] > 0 else np.zeros(s.shape, bool)
        u, s = u[:, keep], s[keep]
        shrink = s**2 / (s**2 + lam)
        fitted = u @ (shrink[:, None] * (u.T @ target))
    sse = float(np.sum((target - fitted) ** 2))
    return 1.0 - sse / sst


def rho_r2(x, y, lam: float = 0.0, add_intercept: bool = True, standardize: bool = False) -> float:
    """Fraction of variance of ``y`` explained by a (ridge) regression on ``x``.

    Returns ``1 - SSE / SST`` with SSE pooled over all columns of ``y`` and
    SST the pooled squared deviation of ``y`` from its column means.
    """
    if lam == 0:
        return rho_linreg(x, y, add_intercept, standardize)
    return rho_ridge(x, y, lam, add_intercept, standardize)


def apply_rho(measure: RhoMeasure, x, y) -> float:
    x, y = _as_matrix(x), _as_matrix(y)
    measure.check_dims(x.shape[1], y.shape[1])
    if measure.kind == "pearson1d":
        return rho_pearson(x, y)
    if measure.kind == "linreg_r2":
        return rho_linreg(x, y, measure.add_intercept, measure.standardize)
    return rho_ridge(x, y, measure.ridge_lambda, measure.add_intercept, measure.standardize)
