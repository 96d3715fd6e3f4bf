"""Physics-consistency scores: FVA, fitted velocity scaling, DCS and its sign variant."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DataError, DegenerateCorrelationError, DegenerateFitError,
                     UndefinedScoreError)

DEFAULT_ALPHAS = tuple(round(0.1 * k, 1) for k in range(1, 11))


def _values(x) -> np.ndarray:
    return np.asarray(getattr(x, "values", x), dtype=float)


def _same_length(a, b):
    if a.shape != b.shape or a.ndim != 1:
        raise DataError(f"series lengths differ: {a.shape} vs {b.shape}")


def pearson(a, b) -> float:
    a, b = _values(a), _values(b)
    _same_length(a, b)
    if len(a) < 2:
        raise DataError(f"correlation needs at least 2 samples, got {len(a)}")
    da, db = a - a.mean(), b - b.mean()
    saa, sbb = float(da @ da), float(db @ db)
    # relative test: a series equal to a constant up to rounding is still constant
    if saa <= 1e-24 * max(1.0, float(a @ a)) or sbb <= 1e-24 * max(1.0, float(b @ b)):
        raise DegenerateCorrelationError("zero variance in a correlated series")
    r = float(da @ db) / math.sqrt(saa * sbb)
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True)
class FvaResult:
    value: float
    degenerate: bool = False

    def __float__(self):
        return self.value


def fva(pred, ref) -> FvaResult:
    """Pearson correlation of predicted and reference centroid trajectories.

    A constant trajectory has no defined correlation; it scores 0.0 and the
    result is flagged ``degenerate``.
    """
    if hasattr(pred, "framing") and hasattr(ref, "framing") and pred.framing != ref.framing:
        raise DataError(f"centroid framing differs: {pred.framing} vs {ref.framing}")
    try:
        return FvaResult(pearson(pred, ref))
    except DegenerateCorrelationError:
        return FvaResult(0.0, degenerate=True)


def fit_alpha(base, scaled) -> float:
    """Least-squares factor ``a`` minimizing ``|scaled - a * base|^2``."""
    base, scaled = _values(base), _values(scaled)
    _same_length(base, scaled)
    energy = float(base @ base)
    if energy <= 0:
        raise DegenerateFitError("baseline centroid is identically zero")
    return float(base @ scaled) / energy


def dcs(alphas, alpha_preds) -> float:
    """1 - SSE(applied vs fitted factors) / total variance of applied factors."""
    a, p = np.asarray(alphas, dtype=float), np.asarray(alpha_preds, dtype=float)
    _same_length(a, p)
    if len(a) < 2:
        raise UndefinedScoreError(f"DCS needs at least 2 scaling factors, got {len(a)}")
    ss_tot = float(np.sum((a - a.mean()) ** 2))
    if ss_tot == 0:
        raise UndefinedScoreError("all applied scaling factors are equal")
    return 1.0 - float(np.sum((a - p) ** 2)) / ss_tot


def dcs_sign(base, flipped) -> float:
    """Fraction-style agreement between sign(-base) and sign(flipped), in [0, 1]."""
    base, flipped = _values(base), _values(flipped)
    _same_length(base, flipped)
    if len(base) == 0:
        raise DataError("empty centroid series")
    agreement = np.sign(-base) * np.sign(flipped)
    return 0.5 * (1.0 + float(agreement.mean()))


@dataclass(frozen=True)
class DcsResult:
    alphas: tuple
    alpha_preds: tuple
    score: float
    sign_score: float | None = None

    def __post_init__(self):
        if len(self.alphas) != len(self.alpha_preds):
            raise DataError("alphas and alpha_preds differ in length")
        if len(self.alphas) < 2 or len(set(self.alphas)) < 2:
            raise UndefinedScoreError("need at least 2 distinct scaling factors")

    @classmethod
    def from_fits(cls, alphas, alpha_preds, sign_score=None) -> DcsResult:
        alphas = tuple(float(a) for a in alphas)
        preds = tuple(float(a) for a in alpha_preds)
        return cls(alphas, preds, dcs(alphas, preds), sign_score)
