"""Dataset data model and structural validation.

An experiment holds three series observed over the same ``T`` timepoints:

* ``x`` -- the candidate predictor, ``T x p``
* ``y`` -- the target, ``T x q``
* ``z`` -- the confounder, ``T x r`` (``r`` may be zero)

A dataset is an ordered collection of ``N`` statistically independent
experiments sharing the same ``T``. Column counts may differ between
experiments. Arrays are stored as read-only float64 copies so that a dataset
can be shared between threads without defensive copying.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import StructuralError, ValidationError

MIN_EXPERIMENTS = 3
RECOMMENDED_EXPERIMENTS = 8
MIN_TIMEPOINTS = 2


def as_series(values, n_rows: int | None = None) -> np.ndarray:
    """Coerce ``values`` to a read-only ``T x k`` float64 matrix.

    A 1-D input becomes a single column. ``None`` yields a ``T x 0`` matrix,
    which needs ``n_rows``.
    """
    if values is None:
        if n_rows is None:
            raise StructuralError("an empty series needs an explicit row count")
        arr = np.zeros((n_rows, 0))
    else:
        arr = np.array(values, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        elif arr.ndim != 2:
            raise StructuralError(f"series must be 1-D or 2-D, got {arr.ndim}-D")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Experiment:
    """One experiment: the triple (x, y, z) plus a label."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        x = as_series(self.x)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", as_series(self.y))
        object.__setattr__(self, "z", as_series(self.z, n_rows=x.shape[0]))

    @property
    def t_len(self) -> int:
        return self.x.shape[0]

    @property
    def dims(self) -> tuple[int, int, int]:
        """Column counts ``(p, q, r)``."""
        return self.x.shape[1], self.y.shape[1], self.z.shape[1]


@dataclass(frozen=True)
class Dataset:
    experiments: tuple[Experiment, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "experiments", tuple(self.experiments))

    @classmethod
    def from_arrays(
        cls,
        xs: Sequence,
        ys: Sequence,
        zs: Sequence | None = None,
        labels: Iterable[str] | None = None,
    ) -> "Dataset":
        n = len(xs)
        if len(ys) != n or (zs is not None and len(zs) != n):
            raise StructuralError("xs, ys and zs must have the same length")
        zs = zs if zs is not None else [None] * n
        labels = list(labels) if labels is not None else [f"exp{i + 1:02d}" for i in range(n)]
        return cls(tuple(Experiment(x, y, z, lab) for x, y, z, lab in zip(xs, ys, zs, labels)))

    def __len__(self) -> int:
        return len(self.experiments)

    def __iter__(self):
        return iter(self.experiments)

    def __getitem__(self, i):
        return self.experiments[i]

    @property
    def n(self) -> int:
        return len(self.experiments)

    @property
    def t_len(self) -> int:
        return self.experiments[0].t_len if self.experiments else 0

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.experiments]

    def reordered(self, order: Sequence[int]) -> "Dataset":
        return Dataset(tuple(self.experiments[i] for i in order))


@dataclass(frozen=True)
class Violation:
    label: str
    rule: str

    def __str__(self):
        return f"{self.label}: {self.rule}" if self.label else self.rule


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def raise_if_invalid(self):
        if self.violations:
            msg = "; ".join(str(v) for v in self.violations)
            raise ValidationError(f"invalid dataset: {msg}", self.violations)


def validate_dataset(d: Dataset) -> ValidationResult:
    """Check every structural precondition; violations are returned, not raised."""
    violations: list[Violation] = []
    warnings: list[str] = []

    n = len(d)
    if n < MIN_EXPERIMENTS:
        violations.append(Violation("", f"N below minimum {MIN_EXPERIMENTS} (got {n})"))
    elif n < RECOMMENDED_EXPERIMENTS:
        warnings.append(f"only {n} experiments; the t-test may be unreliable for N < {RECOMMENDED_EXPERIMENTS}")

    seen = set()
    for i, e in enumerate(d):
        label = e.label or f"#{i}"
        if label in seen:
            violations.append(Violation(label, "duplicate label"))
        seen.add(label)
        lens = {name: arr.shape[0] for name, arr in (("x", e.x), ("y", e.y), ("z", e.z))}
        if len(set(lens.values())) > 1:
            violations.append(Violation(label, f"t_len mismatch within experiment {lens}"))
        if e.t_len < MIN_TIMEPOINTS:
            violations.append(Violation(label, f"t_len below minimum {MIN_TIMEPOINTS}"))
        if e.x.shape[1] < 1:
            violations.append(Violation(label, "x has no columns"))
        if e.y.shape[1] < 1:
            violations.append(Violation(label, "y has no columns"))
        for name, arr in (("x", e.x), ("y", e.y), ("z", e.z)):
            if not np.all(np.isfinite(arr)):
                violations.append(Violation(label, f"{name} has non-finite values"))

    if n:
        t0 = d[0].t_len
        odd = [e.label or f"#{i}" for i, e in enumerate(d) if e.t_len != t0]
        if odd:
            violations.append(
                Violation(", ".join(odd), f"t_len mismatch across experiments (expected {t0})")
            )

    return ValidationResult(tuple(violations), tuple(warnings))
