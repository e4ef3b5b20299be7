"""Paired significance testing over per-seed metric samples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import t as student_t


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    p_value: float
    significant: bool
    degenerate: bool = False


def paired_t_test(sample_a, sample_b, alpha: float = 0.05) -> TTestResult:
    """Two-sided paired t-test; samples are paired by shared rng seed.

    Zero-variance differences with nonzero mean are flagged degenerate and
    reported significant with p -> 0; all-zero differences give t=0, p=1.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("samples must be 1-d and equally sized")
    n = len(a)
    if n < 2:
        raise ValueError("need at least 2 paired observations")
    d = a - b
    mean = d.mean()
    sd = d.std(ddof=1)
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, 1.0, False)
        return TTestResult(math.copysign(math.inf, mean), 0.0, True, degenerate=True)
    t_stat = mean / (sd / math.sqrt(n))
    p = 2.0 * float(student_t.sf(abs(t_stat), n - 1))
    return TTestResult(float(t_stat), p, p < alpha)
