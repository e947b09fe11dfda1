"""Monte Carlo estimates with confidence intervals.

Proportions get Wilson score intervals, means get t-intervals.  Intervals are
two-sided at the stated confidence; one-sided checks at confidence q are run
by building the estimate at two-sided confidence 2q - 1 and reading one edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import stats

from .errors import PreconditionError


@dataclass(frozen=True)
class Estimate:
    kind: str                 # "proportion" | "mean"
    n_samples: int
    successes: int | None     # proportions only
    value_sum: float | None   # means only
    mean: float
    ci_low: float
    ci_high: float
    confidence: float

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_samples": self.n_samples,
            "successes": self.successes,
            "value_sum": self.value_sum,
            "mean": self.mean,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "confidence": self.confidence,
        }


def wilson(successes: int, n: int, confidence: float = 0.99) -> Estimate:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise PreconditionError("Wilson interval needs at least one sample")
    if not 0 <= successes <= n:
        raise PreconditionError("successes out of range")
    if not 0 < confidence < 1:
        raise PreconditionError("confidence must be in (0, 1)")
    z = float(stats.norm.ppf(0.5 + confidence / 2))
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return Estimate(kind="proportion", n_samples=n, successes=successes,
                    value_sum=None, mean=phat,
                    ci_low=max(0.0, center - half),
                    ci_high=min(1.0, center + half),
                    confidence=confidence)


def mean_estimate(n: int, total: float, total_sq: float,
                  confidence: float = 0.99) -> Estimate:
    """t-interval from streaming first and second moments."""
    if n <= 1:
        raise PreconditionError("t-interval needs at least two samples")
    if not 0 < confidence < 1:
        raise PreconditionError("confidence must be in (0, 1)")
    mean = total / n
    var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    half = float(stats.t.ppf(0.5 + confidence / 2, n - 1)) * math.sqrt(var / n)
    return Estimate(kind="mean", n_samples=n, successes=None, value_sum=total,
                    mean=mean, ci_low=mean - half, ci_high=mean + half,
                    confidence=confidence)


def one_sided_confidence(q: float) -> float:
    """Two-sided confidence whose interval edges are one-sided level-q bounds."""
    if not 0.5 < q < 1:
        raise PreconditionError("one-sided confidence must be in (0.5, 1)")
    return 2 * q - 1
