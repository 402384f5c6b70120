"""Asymptotic models, leading-constant fitting, and envelope verdicts.

A model is a sum of terms c * x^p * log(x)^k * loglog(x)^j plus an error
envelope (big-O or little-o) with a shape of the same form.  Growth claims
are judged at finite x by the behaviour of |residual| / shape across the
checkpoint grid:

- big-O is consistent when the top-of-grid ratios do not grow past the
  early ones (max over the window <= 3x the first-half median, or simply
  no larger than the first-half max);
- little-o is consistent when the last-decade median ratio falls below
  half the first-decade median;
- either kind is violated when per-decade ratio medians grow monotonically
  by more than 10% per decade across at least three decade steps;
- anything else is inconclusive.

These finite-x rules are artifact policy, fixed here and recorded in every
report so a verdict can be reproduced from the stored sequences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError, UsageError
from .summation import CheckpointGrid, SummatorySeries

BIG_O = "big-O"
LITTLE_O = "little-o"

CONSISTENT = "consistent"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

# verdict policy knobs (see module docstring)
GROWTH_FACTOR_CAP = 3.0
GROWTH_PER_DECADE = 1.10
MIN_GROWTH_DECADES = 3
LITTLE_O_DECAY = 0.5
MIN_ENVELOPE_POINTS = 8


@dataclass(frozen=True)
class AsymptoticTerm:
    """One term c * x^x_power * log(x)^log_power * loglog(x)^loglog_power.

    ``coefficient`` may be None, marking a constant still to be fitted.
    Negative log powers are allowed so envelope shapes like x/log^2(x)
    can be expressed.
    """

    coefficient: float | None
    x_power: float = 0.0
    log_power: int = 0
    loglog_power: int = 0
    name: str = ""

    def shape_at(self, x):
        """Evaluate the term with coefficient 1 at x (scalar or array)."""
        x = np.asarray(x, dtype=np.float64)
        if self.log_power != 0 and np.any(x <= 1.0):
            raise DomainError("log powers need x > 1")
        if self.loglog_power > 0 and np.any(x <= math.e):
            raise DomainError("loglog powers need x > e")
        v = np.ones_like(x)
        if self.x_power:
            v = v * x**self.x_power
        if self.log_power:
            v = v * np.log(x) ** self.log_power
        if self.loglog_power:
            v = v * np.log(np.log(x)) ** self.loglog_power
        return v if v.ndim else float(v)

    def value_at(self, x):
        if self.coefficient is None:
            raise UsageError(f"term {self.name or self!r} has no fitted coefficient")
        v = self.coefficient * self.shape_at(x)
        return v if isinstance(v, np.ndarray) else float(v)

    def _growth_key(self):
        return (self.x_power, self.log_power, self.loglog_power)


@dataclass(frozen=True)
class ErrorEnvelope:
    """O(shape) or o(shape) error claim; the shape carries coefficient 1."""

    kind: str
    shape: AsymptoticTerm

    def __post_init__(self):
        if self.kind not in (BIG_O, LITTLE_O):
            raise UsageError(f"envelope kind must be {BIG_O!r} or {LITTLE_O!r}")
        if self.shape.coefficient != 1:
            raise UsageError("envelope shapes carry coefficient 1")


@dataclass(frozen=True)
class AsymptoticModel:
    """Main terms plus an error envelope, valid for x >= x_min.

    ``main_terms`` may be empty for pure envelope claims (the empirical
    series is then its own residual).
    """

    main_terms: tuple
    error: ErrorEnvelope
    x_min: float = 2.0

    def __post_init__(self):
        if any(t.loglog_power > 0 for t in self.main_terms) and self.x_min < 3:
            raise UsageError("models with loglog terms need x_min >= 3")

    def unresolved(self) -> tuple:
        return tuple(t for t in self.main_terms if t.coefficient is None)

    def resolve(self, value: float) -> "AsymptoticModel":
        """Copy of the model with its single to-fit coefficient set."""
        open_terms = self.unresolved()
        if len(open_terms) != 1:
            raise UsageError(f"expected exactly one to-fit term, found {len(open_terms)}")
        terms = tuple(
            AsymptoticTerm(float(value), t.x_power, t.log_power, t.loglog_power, t.name)
            if t.coefficient is None
            else t
            for t in self.main_terms
        )
        return AsymptoticModel(terms, self.error, self.x_min)


def _eval_terms(model: AsymptoticModel, xs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(xs, dtype=np.float64)
    for t in model.main_terms:
        out = out + t.value_at(xs)
    return out


def eval_model(model: AsymptoticModel, x: float) -> float:
    """Sum of the resolved main terms at x."""
    if model.unresolved():
        raise UsageError("model still has a to-fit coefficient")
    if x < model.x_min:
        raise DomainError(f"x={x} below model x_min={model.x_min}")
    return float(_eval_terms(model, np.asarray([x], dtype=np.float64))[0])


def fit_leading(model: AsymptoticModel, empirical: SummatorySeries) -> float:
    """Fit the single open coefficient by a median of point ratios.

    Uses the top half of the grid: the candidate is the median of
    (empirical - fixed terms) / shape there, which shrugs off the slowly
    varying lower-order contributions the envelope absorbs.
    """
    open_terms = [t for t in model.main_terms if t.coefficient is None]
    if len(open_terms) != 1:
        raise UsageError(f"fit_leading needs exactly one to-fit term, found {len(open_terms)}")
    term = open_terms[0]
    xs = empirical.grid.as_array()
    if len(xs) < MIN_ENVELOPE_POINTS:
        raise UsageError(f"fit needs >= {MIN_ENVELOPE_POINTS} grid points, got {len(xs)}")
    fixed = [t for t in model.main_terms if t.coefficient is not None]
    if any(t._growth_key() >= term._growth_key() for t in fixed):
        raise UsageError("to-fit term must dominate every fixed term")
    emp = np.asarray([float(v) for v in empirical.sums])
    resid = emp - sum((t.value_at(xs) for t in fixed), np.zeros_like(xs))
    top = slice(len(xs) // 2, None)
    return float(np.median(resid[top] / term.shape_at(xs[top])))


def residual_series(empirical: SummatorySeries, model: AsymptoticModel) -> list:
    """Per-checkpoint (x, residual, ratio) against the resolved model.

    residual = empirical - main terms; ratio = |residual| / error shape.
    A model with no main terms passes the empirical values through.
    """
    if model.unresolved():
        raise UsageError("model still has a to-fit coefficient")
    if len(empirical.sums) != len(empirical.grid):
        raise ShapeError("series and grid lengths differ")
    xs = empirical.grid.as_array()
    emp = np.asarray([float(v) for v in empirical.sums])
    resid = emp - _eval_terms(model, xs)
    ratio = np.abs(resid) / model.error.shape.shape_at(xs)
    return list(zip(xs.tolist(), resid.tolist(), ratio.tolist()))


def decade_medians(xs, values) -> tuple[list, list]:
    """Group values by floor(log10 x); return (decades, per-decade medians)."""
    buckets: dict[int, list] = {}
    for x, v in zip(xs, values):
        buckets.setdefault(int(math.floor(math.log10(x) + 1e-9)), []).append(v)
    decades = sorted(buckets)
    return decades, [float(np.median(buckets[d])) for d in decades]


def _grows_per_decade(xs, ratios) -> bool:
    """Monotone growth > 10%/decade across at least MIN_GROWTH_DECADES steps."""
    decades, meds = decade_medians(xs, ratios)
    if len(decades) < MIN_GROWTH_DECADES + 1:
        return False
    for a, b in zip(meds, meds[1:]):
        if a == 0.0:
            if b <= 0.0:
                return False
        elif b <= GROWTH_PER_DECADE * a:
            return False
    return True


def check_envelope(residuals, envelope: ErrorEnvelope, window: float = 0.5) -> str:
    """Verdict for a sequence of (x, residual, ratio) points.

    ``window`` is the top fraction of grid points (by x) examined for
    growth; the default 0.5 compares the top half against the first half.
    """
    if len(residuals) < MIN_ENVELOPE_POINTS:
        raise UsageError(
            f"envelope check needs >= {MIN_ENVELOPE_POINTS} points, got {len(residuals)}"
        )
    if not 0.0 < window <= 1.0:
        raise UsageError(f"window must be in (0, 1], got {window}")
    xs = [r[0] for r in residuals]
    ratios = [r[2] for r in residuals]
    q = len(ratios)

    if envelope.kind == BIG_O:
        count = max(1, math.ceil(window * q))
        windowed = ratios[q - count :]
        first_half = ratios[: max(1, q // 2)]
        med = float(np.median(first_half))
        if max(windowed) <= GROWTH_FACTOR_CAP * med or max(windowed) <= max(first_half):
            return CONSISTENT
        if _grows_per_decade(xs, ratios):
            return VIOLATED
        return INCONCLUSIVE

    decades, meds = decade_medians(xs, ratios)
    if len(decades) >= 2 and meds[-1] < LITTLE_O_DECAY * meds[0]:
        return CONSISTENT
    if _grows_per_decade(xs, ratios):
        return VIOLATED
    return INCONCLUSIVE


@dataclass
class ClaimReport:
    """Everything needed to audit one verified claim.

    ``residual[i]`` is empirical minus the resolved main terms at grid
    point i, and ``ratio[i]`` divides its magnitude by the error shape;
    the verdict follows the rules in the module docstring (windows and
    thresholds are module constants).
    """

    claim_id: str
    n_max: int
    grid: CheckpointGrid
    empirical: list = field(repr=False)
    model_value: list = field(repr=False)
    residual: list = field(repr=False)
    ratio: list = field(repr=False)
    fitted_constants: dict = field(default_factory=dict)
    verdict: str = INCONCLUSIVE
    notes: str = ""


def report_to_dict(report: ClaimReport) -> dict:
    return {
        "claim_id": report.claim_id,
        "n_max": report.n_max,
        "grid": list(report.grid.points),
        "empirical": [float(v) for v in report.empirical],
        "model_value": [float(v) for v in report.model_value],
        "residual": [float(v) for v in report.residual],
        "ratio": [float(v) for v in report.ratio],
        "fitted_constants": {k: float(v) for k, v in report.fitted_constants.items()},
        "verdict": report.verdict,
        "notes": report.notes,
    }


def report_to_json(report: ClaimReport) -> str:
    """Deterministic JSON for one report (fields in declaration order)."""
    return json.dumps(report_to_dict(report))


def reports_to_json(reports) -> str:
    """A bundle: JSON array of reports in the given order."""
    return json.dumps([report_to_dict(r) for r in reports])
