"""Synthetic datasets and Monte Carlo calibration.

Two families of generators:

* The step-function scenarios ``fig1``, ``fig2`` and ``fig3``. Every
  experiment has ``X_i = Y_i = S0 + S_i``, where ``S0`` is a shared step
  (0 then 1 at mid-series) and ``S_i`` a unit pulse at an
  experiment-specific time. ``fig1`` uses ``Z_i = S0``, which leaves a
  genuine partial correlation; ``fig2`` uses ``Z_i = S_i``, which explains
  it away. ``fig3`` is ``fig2`` data analysed with the invalid
  single-projection variant.
* Null generators (``ar1`` or ``random_walk``) drawing
  ``Y_i = Z_i W_i + E_i`` with autocorrelated ``Z``, ``X`` and ``E``,
  optionally coupling ``X`` to ``Z``.

Generation is fully determined by the config's seed via
:func:`numpy.random.default_rng`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import lfilter

from .association import RhoMeasure
from .engine import naive_pearson_pvalues, run_test
from .errors import ConfigError, ParcorrError
from .model import Dataset

SCENARIOS = ("fig1", "fig2", "fig3")
GENERATORS = ("ar1", "random_walk")

# The step scenarios project out the columns of Z only, with no added
# constant; the null generators keep the engine default.
SCENARIO_Z_INTERCEPT = False


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "fig1"
    n: int = 10
    t_len: int = 100
    pulse_width: int = 5
    noise_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.pulse_width < 1:
            raise ConfigError("pulse_width must be >= 1")
        if self.t_len < 4 * self.pulse_width:
            raise ConfigError("t_len must be at least 4 * pulse_width")
        if self.noise_sd < 0:
            raise ConfigError("noise_sd must be >= 0")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def mode(self) -> str:
        return "invalid_single" if self.scenario == "fig3" else "valid_joint"

    @property
    def z_intercept(self) -> bool:
        return SCENARIO_Z_INTERCEPT

    def pulse_slots(self) -> np.ndarray:
        """Admissible pulse start indices (0-based).

        Pulses sit in the second half, at least one pulse width clear of
        the step edge and of the series end.
        """
        half = self.t_len // 2
        return np.arange(half + self.pulse_width, self.t_len - 2 * self.pulse_width + 1)


@dataclass(frozen=True)
class NullGenConfig:
    generator: str = "ar1"
    ar_coeff: float = 0.9
    n: int = 10
    t_len: int = 100
    dims: tuple[int, int, int] = (1, 1, 1)
    w_scale: float = 1.0
    x_z_coupling: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}; choose from {GENERATORS}")
        if self.generator == "ar1" and not -1 < self.ar_coeff < 1:
            raise ConfigError("ar_coeff must lie in (-1, 1)")
        p, q, r = self.dims
        if p < 1 or q < 1 or r < 0:
            raise ConfigError(f"dims must satisfy p >= 1, q >= 1, r >= 0; got {self.dims}")
        if self.n < 1 or self.t_len < 2:
            raise ConfigError("need n >= 1 and t_len >= 2")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


def step_function(t_len: int) -> np.ndarray:
    s0 = np.zeros(t_len)
    s0[t_len // 2:] = 1.0
    return s0


def pulse(t_len: int, start: int, width: int) -> np.ndarray:
    s = np.zeros(t_len)
    s[start:start + width] = 1.0
    return s


def gen_scenario(cfg: ScenarioConfig) -> Dataset:
    rng = np.random.default_rng(cfg.seed)
    slots = cfg.pulse_slots()
    if cfg.n > slots.size:
        raise ConfigError(
            f"cannot place {cfg.n} distinct pulses of width {cfg.pulse_width} "
            f"in a series of length {cfg.t_len} ({slots.size} admissible positions)"
        )
    starts = rng.permutation(slots)[: cfg.n]
    s0 = step_function(cfg.t_len)
    xs, ys, zs = [], [], []
    for start in starts:
        si = pulse(cfg.t_len, int(start), cfg.pulse_width)
        clean = s0 + si
        xs.append(clean + cfg.noise_sd * rng.standard_normal(cfg.t_len))
        ys.append(clean + cfg.noise_sd * rng.standard_normal(cfg.t_len))
        zs.append(s0.copy() if cfg.scenario == "fig1" else si)
    return Dataset.from_arrays(xs, ys, zs)


def _process(rng: np.random.Generator, cfg: NullGenConfig, n_cols: int) -> np.ndarray:
    e = rng.standard_normal((cfg.t_len, n_cols))
    if cfg.generator == "random_walk":
        return np.cumsum(e, axis=0)
    phi = cfg.ar_coeff
    # Start at the stationary distribution: var = 1 / (1 - phi^2).
    e[0] /= math.sqrt(1.0 - phi * phi)
    return lfilter([1.0], [1.0, -phi], e, axis=0)


def _lift(z: np.ndarray, p: int) -> np.ndarray:
    """Map ``T x r`` to ``T x p`` by cycling through the columns of ``z``."""
    if z.shape[1] == 0:
        return np.zeros((z.shape[0], p))
    return z[:, [k % z.shape[1] for k in range(p)]]


def gen_null(cfg: NullGenConfig) -> Dataset:
    """Draw a dataset satisfying the null ``Y_i = Z_i W_i + E_i``."""
    rng = np.random.default_rng(cfg.seed)
    p, q, r = cfg.dims
    xs, ys, zs = [], [], []
    for _ in range(cfg.n):
        z = _process(rng, cfg, r)
        x = cfg.x_z_coupling * _lift(z, p) + _process(rng, cfg, p)
        w = cfg.w_scale * rng.standard_normal((r, q))
        y = z @ w + _process(rng, cfg, q)
        xs.append(x)
        ys.append(y)
        zs.append(z)
    return Dataset.from_arrays(xs, ys, zs)


def generate(cfg: ScenarioConfig | NullGenConfig) -> Dataset:
    if isinstance(cfg, ScenarioConfig):
        return gen_scenario(cfg)
    return gen_null(cfg)


@dataclass
class MonteCarloResult:
    rejection_rate: float
    n_rejections: int
    reps: int
    alpha: float
    seeds: list[int]
    p_values: list[float]
    mean_g: list[float]
    naive_rejection_rate: float | None = None
    mode: str = "valid_joint"
    z_intercept: bool = True
    warnings: dict[str, int] = field(default_factory=dict)

    def mean_g_summary(self) -> dict:
        m = np.asarray(self.mean_g)
        return {
            "mean": float(m.mean()),
            "sd": float(m.std(ddof=1)) if m.size > 1 else 0.0,
            "min": float(m.min()),
            "q25": float(np.quantile(m, 0.25)),
            "median": float(np.median(m)),
            "q75": float(np.quantile(m, 0.75)),
            "max": float(m.max()),
            "fraction_negative": float(np.mean(m < 0)),
            "fraction_positive": float(np.mean(m > 0)),
        }


def monte_carlo(
    datagen: ScenarioConfig | NullGenConfig,
    reps: int,
    alpha: float = 0.05,
    measure: RhoMeasure | None = None,
    mode: str | None = None,
    *,
    z_intercept: bool | None = None,
    alternative: str = "two-sided",
    naive_baseline: bool = True,
) -> MonteCarloResult:
    """Repeat generate -> run_test ``reps`` times with seeds ``seed + rep``.

    ``mode`` and ``z_intercept`` default to what the generator implies
    (invalid_single for ``fig3``; no added constant for step scenarios).

    With ``naive_baseline`` the pointwise partial-correlation test is also
    run on every experiment of every replicate; its rejection rate is pooled
    over all of them.
    """
    if reps < 1:
        raise ConfigError("reps must be >= 1")
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    scenario = isinstance(datagen, ScenarioConfig)
    if mode is None:
        mode = datagen.mode if scenario else "valid_joint"
    if z_intercept is None:
        z_intercept = datagen.z_intercept if scenario else True
    measure = measure or RhoMeasure()

    seeds, pvals, mean_g = [], [], []
    naive_hits = naive_total = 0
    warn_counts: dict[str, int] = {}
    for rep in range(reps):
        seed = (datagen.seed + rep) % 2**64
        try:
            data = generate(replace(datagen, seed=seed))
            report = run_test(
                data, measure, mode, z_intercept=z_intercept,
                alternative=alternative, alpha=alpha,
            )
            if naive_baseline:
                naive = naive_pearson_pvalues(data, z_intercept)
                naive_hits += int(np.sum(naive < alpha))
                naive_total += naive.size
        except ParcorrError as err:
            raise type(err)(f"rep {rep} (seed {seed}): {err}") from err
        seeds.append(seed)
        pvals.append(report.p_value)
        mean_g.append(report.mean_g)
        for w in report.warnings:
            warn_counts[w] = warn_counts.get(w, 0) + 1

    hits = sum(p < alpha for p in pvals)
    return MonteCarloResult(
        rejection_rate=hits / reps,
        n_rejections=hits,
        reps=reps,
        alpha=alpha,
        seeds=seeds,
        p_values=pvals,
        mean_g=mean_g,
        naive_rejection_rate=naive_hits / naive_total if naive_baseline else None,
        mode=mode,
        z_intercept=z_intercept,
        warnings=warn_counts,
    )
