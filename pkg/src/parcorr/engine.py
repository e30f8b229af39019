"""Pair tables, G statistics and the t-test on their mean.

For every ordered pair of experiments ``(i, j)`` the target ``Y_i`` is
residualized against the confounders of *both* experiments, and two scores
are recorded::

    a[i, j] = rho(X_i; P_ij Y_i)      (same-experiment predictor)
    b[i, j] = rho(X_j; P_ij Y_i)      (other-experiment predictor)

``G_i`` is the row mean of ``a - b`` over all ``N`` columns (the diagonal
contributes exactly zero). Under the null hypothesis that ``Y_i`` is a linear
function of ``Z_i`` plus noise independent of every ``X`` and ``Z``, the
``G_i`` are exchangeable with zero mean, and a one-sample t-test on them is
valid when their distribution is close to symmetric. The skewness and QQ
points returned with every report are there to check that.

``mode="invalid_single"`` residualizes ``Y_i`` against ``Z_i`` only. It is
*not* a valid test and exists to demonstrate the bias it produces.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .association import RhoMeasure, apply_rho, rho_pearson
from .errors import ConfigError, DegenerateSeries
from .model import Dataset, validate_dataset
from .projection import DEFAULT_TOL, OrthonormalBasis, joint_basis, orthonormal_basis, residualize

MODES = ("valid_joint", "invalid_single")
ALTERNATIVES = ("two-sided", "greater", "less")

ZERO_VAR_WARNING = "zero-variance G (degenerate, likely noiseless simulation)"
SKEW_LIMIT = 1.0

# G values live on the scale of rho, which is O(1) for the built-in measures.
G_ZERO_TOL = 1e-12

# A residual whose centered norm is below this fraction of ||Y_i|| is
# considered fully explained by the confounders.
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class PairTables:
    a: np.ndarray
    b: np.ndarray
    mode: str
    substituted: tuple[tuple[int, int], ...] = ()

    @property
    def n(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    df: int
    p_value: float
    warnings: tuple[str, ...] = ()


@dataclass
class TestReport:
    g: list[float]
    t_stat: float
    df: int
    p_value: float
    skewness: float
    qq_points: list[tuple[float, float]]
    mode: str
    rho_config: dict
    n: int
    t_len: int
    warnings: list[str] = field(default_factory=list)
    alternative: str = "two-sided"
    alpha: float = 0.05
    z_intercept: bool = True
    tables: PairTables | None = field(default=None, repr=False, compare=False)

    __test__ = False  # not a pytest class

    @property
    def reject(self) -> bool:
        return self.p_value < self.alpha

    @property
    def mean_g(self) -> float:
        return math.fsum(self.g) / len(self.g)


def _threads(n_jobs: int | None) -> int:
    if n_jobs is None:
        try:
            n_jobs = int(os.environ.get("PARCORR_THREADS", "1"))
        except ValueError:
            n_jobs = 1
    return max(1, n_jobs)


def confounder(z: np.ndarray, intercept: bool) -> np.ndarray:
    if intercept:
        return np.hstack([z, np.ones((z.shape[0], 1))])
    return z


def _check_measure(d: Dataset, measure: RhoMeasure):
    for e in d:
        measure.check_dims(e.x.shape[1], e.y.shape[1])


def _degenerate_residual(r: np.ndarray, y: np.ndarray) -> bool:
    return np.linalg.norm(r - r.mean(axis=0)) <= RESIDUAL_RTOL * np.linalg.norm(y)


def pair_tables(
    d: Dataset,
    measure: RhoMeasure,
    mode: str = "valid_joint",
    *,
    z_intercept: bool = True,
    tol: float = DEFAULT_TOL,
    degenerate_zero: bool = False,
    n_jobs: int | None = None,
) -> PairTables:
    """Fill the ``N x N`` tables ``a`` and ``b``.

    Raises :class:`DegenerateSeries` naming the pair when a score is undefined,
    unless ``degenerate_zero`` is set, in which case that score becomes 0 and
    the pair is listed in ``PairTables.substituted``.
    """
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; choose from {MODES}")
    _check_measure(d, measure)
    n = len(d)
    conf = [confounder(e.z, z_intercept) for e in d]

    # P_ij == P_ji, so one basis per unordered pair.
    bases: dict[tuple[int, int], OrthonormalBasis] = {}
    if mode == "valid_joint":
        for i in range(n):
            for j in range(i, n):
                bases[i, j] = joint_basis(conf[i], conf[j], tol)
    else:
        for i in range(n):
            bases[i, i] = orthonormal_basis(conf[i], tol)

    a = np.zeros((n, n))
    b = np.zeros((n, n))

    def score(x, r, i, j, which):
        try:
            return apply_rho(measure, x, r), False
        except DegenerateSeries as err:
            if degenerate_zero:
                return 0.0, True
            raise DegenerateSeries(
                f"{which} score undefined for experiments {d[i].label!r} (i={i}) and "
                f"{d[j].label!r} (j={j}): {err}"
            ) from err

    def fill_row(i):
        subs = []
        ei = d[i]
        single = None
        if mode == "invalid_single":
            single = residualize(ei.y, bases[i, i])
        for j in range(n):
            r = single if single is not None else residualize(ei.y, bases[min(i, j), max(i, j)])
            if _degenerate_residual(r, ei.y):
                if not degenerate_zero:
                    raise DegenerateSeries(
                        f"residual of {ei.label!r} (i={i}) after projecting out the confounders "
                        f"of {ei.label!r} and {d[j].label!r} (j={j}) is constant"
                    )
                a[i, j] = b[i, j] = 0.0
                subs.append((i, j))
                continue
            a[i, j], sub_a = score(ei.x, r, i, j, "same-experiment")
            if i == j:
                b[i, j], sub_b = a[i, j], sub_a
            else:
                b[i, j], sub_b = score(d[j].x, r, i, j, "cross-experiment")
            if sub_a or sub_b:
                subs.append((i, j))
        return subs

    workers = min(_threads(n_jobs), n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(fill_row, range(n)))
    else:
        rows = [fill_row(i) for i in range(n)]

    a.flags.writeable = False
    b.flags.writeable = False
    return PairTables(a, b, mode, tuple(p for row in rows for p in row))


def g_statistics(tables: PairTables) -> np.ndarray:
    """``G_i = (1/N) sum_j (a[i, j] - b[i, j])``, summed exactly."""
    diff = tables.a - tables.b
    n = tables.n
    return np.array([math.fsum(row) / n for row in diff])


def student_t_pvalue(t: float, df: float, alternative: str = "two-sided") -> float:
    """p-value of a Student t statistic with ``df`` degrees of freedom."""
    if alternative == "two-sided":
        p = 2.0 * float(stats.t.sf(abs(t), df))
    elif alternative == "greater":
        p = float(stats.t.sf(t, df))
    elif alternative == "less":
        p = float(stats.t.cdf(t, df))
    else:
        raise ConfigError(f"unknown alternative {alternative!r}; choose from {ALTERNATIVES}")
    return min(1.0, p)


def t_test(g, alternative: str = "two-sided", zero_tol: float = G_ZERO_TOL) -> TTestResult:
    """One-sample Student t-test that the mean of ``g`` is zero.

    When the ``g`` are all equal (to within ``zero_tol``) the statistic is
    undefined; the p-value is then 0 if the common value is nonzero and 1
    if it is zero, with a warning attached instead of an error.
    """
    if alternative not in ALTERNATIVES:
        raise ConfigError(f"unknown alternative {alternative!r}; choose from {ALTERNATIVES}")
    g = np.asarray(g, dtype=float)
    n = g.size
    if n < 3:
        raise ConfigError(f"t-test needs at least 3 values, got {n}")
    df = n - 1
    mean = math.fsum(g) / n
    sd = float(np.std(g, ddof=1))
    scale = zero_tol * max(1.0, float(np.max(np.abs(g))))
    if sd <= scale:
        if abs(mean) <= scale:
            return TTestResult(0.0, df, 1.0, (ZERO_VAR_WARNING,))
        t = math.copysign(math.inf, mean)
        if alternative == "two-sided":
            p = 0.0
        elif alternative == "greater":
            p = 0.0 if mean > 0 else 1.0
        else:
            p = 0.0 if mean < 0 else 1.0
        return TTestResult(t, df, p, (ZERO_VAR_WARNING,))
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t, df, student_t_pvalue(t, df, alternative))


def symmetry_diagnostics(g, zero_tol: float = G_ZERO_TOL):
    """Sample skewness ``m3 / m2**1.5`` and normal QQ points of ``g``.

    Returns ``(skewness, qq_points, warnings)``; ``qq_points`` pairs the
    standard-normal quantile at ``(k - 0.5) / N`` with the k-th smallest g.
    """
    g = np.asarray(g, dtype=float)
    n = g.size
    if n < 3:
        raise ConfigError(f"symmetry diagnostics need at least 3 values, got {n}")
    warnings = []
    dev = g - math.fsum(g) / n
    m2 = float(np.mean(dev**2))
    scale = zero_tol * max(1.0, float(np.max(np.abs(g))))
    if math.sqrt(m2) <= scale:
        skew = 0.0
        warnings.append(ZERO_VAR_WARNING)
    else:
        skew = float(np.mean(dev**3)) / m2**1.5
        if abs(skew) > SKEW_LIMIT:
            warnings.append(
                f"G distribution is skewed (skewness {skew:.3f}); the t-test assumes near symmetry"
            )
    theo = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    qq = [(float(q), float(v)) for q, v in zip(theo, np.sort(g))]
    return skew, qq, warnings


def run_test(
    d: Dataset,
    measure: RhoMeasure | None = None,
    mode: str = "valid_joint",
    *,
    z_intercept: bool = True,
    alternative: str = "two-sided",
    alpha: float = 0.05,
    degenerate_zero: bool = False,
    tol: float = DEFAULT_TOL,
    n_jobs: int | None = None,
) -> TestReport:
    """Validate ``d`` and run the full test, returning a :class:`TestReport`."""
    measure = measure or RhoMeasure()
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    checked = validate_dataset(d)
    checked.raise_if_invalid()
    warnings = list(checked.warnings)

    tables = pair_tables(
        d, measure, mode, z_intercept=z_intercept, tol=tol,
        degenerate_zero=degenerate_zero, n_jobs=n_jobs,
    )
    if tables.substituted:
        warnings.append(f"rho set to 0 for {len(tables.substituted)} degenerate pair(s)")
    if mode == "invalid_single":
        warnings.append("invalid_single mode projects out Z_i only; the test is not valid")

    g = g_statistics(tables)
    tt = t_test(g, alternative)
    skew, qq, sym_warnings = symmetry_diagnostics(g)
    for w in (*tt.warnings, *sym_warnings):
        if w not in warnings:
            warnings.append(w)

    return TestReport(
        g=[float(v) for v in g],
        t_stat=tt.t_stat,
        df=tt.df,
        p_value=tt.p_value,
        skewness=skew,
        qq_points=qq,
        mode=mode,
        rho_config=measure.to_dict(),
        n=len(d),
        t_len=d.t_len,
        warnings=warnings,
        alternative=alternative,
        alpha=alpha,
        z_intercept=z_intercept,
        tables=tables,
    )


def naive_pearson_pvalues(d: Dataset, z_intercept: bool = True) -> np.ndarray:
    """Per-experiment p-values of a pointwise partial-correlation test.

    ``X_i`` and ``Y_i`` (first columns) are both residualized against
    ``Z_i`` and their Pearson correlation is tested as if the ``T``
    timepoints were independent, with ``T - 2 - k`` degrees of freedom for
    ``k`` independent confounder columns.
    This is the textbook test that autocorrelation breaks; it is provided
    only as a baseline.
    """
    out = []
    for e in d:
        basis = orthonormal_basis(confounder(e.z, z_intercept))
        rx = residualize(e.x[:, :1], basis)
        ry = residualize(e.y[:, :1], basis)
        r = rho_pearson(rx, ry)
        df = e.t_len - basis.rank - (0 if z_intercept else 1) - 1
        df = max(df, 1)
        if abs(r) >= 1.0:
            out.append(0.0)
            continue
        out.append(student_t_pvalue(r * math.sqrt(df / (1.0 - r * r)), df))
    return np.array(out)
