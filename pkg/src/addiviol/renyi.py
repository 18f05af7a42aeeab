"""Renyi entropies of probability spectra, in bits."""

from __future__ import annotations

import math

import numpy as np

DEFAULT_RANK_EPS = 1e-9
# orders closer than this to 1 use the von Neumann formula
VN_WINDOW = 1e-9


def parse_order(p) -> float:
    """Accept a float or the literals ``'inf'``/``'infinity'``; reject negatives."""
    if isinstance(p, str):
        text = p.strip().lower()
        p = math.inf if text in ("inf", "infinity", "oo") else float(text)
    p = float(p)
    if math.isnan(p) or p < 0:
        raise ValueError(f"Renyi order must be in [0, inf], got {p}")
    return p


def format_order(p: float) -> str:
    if math.isinf(p):
        return "inf"
    p = float(p)
    return str(int(p)) if p.is_integer() else repr(p)


def _probabilities(spectrum, tol: float = 1e-8) -> np.ndarray:
    lam = np.asarray(spectrum, dtype=np.float64).reshape(-1)
    if lam.size == 0:
        raise ValueError("empty spectrum")
    if lam.min() < -tol:
        raise ValueError(f"negative spectrum entry {lam.min():.3e}")
    if abs(lam.sum() - 1) > tol:
        raise ValueError(f"spectrum sums to {lam.sum():.12f}, not 1")
    return np.clip(lam, 0, None)


def rank_eps(spectrum, eps: float = DEFAULT_RANK_EPS) -> int:
    """Number of spectrum entries strictly above ``eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return int(np.count_nonzero(np.asarray(spectrum) > eps))


def renyi_entropy(spectrum, p, eps: float = DEFAULT_RANK_EPS) -> float:
    """Renyi entropy ``log2(sum lam^p) / (1 - p)`` with the p = 0, 1, inf limits.

    ``eps`` is the rank threshold used only for p = 0.
    """
    p = parse_order(p)
    lam = _probabilities(spectrum)
    if p == 0:
        return math.log2(rank_eps(lam, eps))
    lmax = lam.max()
    if math.isinf(p):
        return -math.log2(lmax)
    if abs(p - 1) < VN_WINDOW:
        nz = lam[lam > 0]
        return float(-np.sum(nz * np.log2(nz)))
    nz = lam[lam > 0] / lmax
    # factor out lam_max so large p does not underflow
    log_sum = p * math.log2(lmax) + math.log2(np.sum(nz**p))
    return log_sum / (1 - p)


def binary_entropy(x: float) -> float:
    if not 0 <= x <= 1:
        raise ValueError(f"binary entropy argument {x} outside [0, 1]")
    if x == 0 or x == 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)
