"""Input validation for array-shaped entry points."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .uncertainty import N_MODELS, RE_MAX, RE_MIN, UncertainInput


def check_uncertain_inputs(X) -> list[UncertainInput]:
    """Validate an ``(m, 2)`` array of ``(re_c, model_id)`` rows."""
    X = check_array(X, dtype=float, ensure_min_samples=1)
    if X.shape[1] != 2:
        raise ValueError(f"expected 2 columns (re_c, model_id), got {X.shape[1]}")
    re, model = X[:, 0], X[:, 1]
    if np.any((re < RE_MIN) | (re > RE_MAX)):
        raise ValueError(f"re_c must lie in [{RE_MIN:g}, {RE_MAX:g}]")
    if np.any(model != np.round(model)) or np.any((model < 1) | (model > N_MODELS)):
        raise ValueError(f"model_id must be an integer in 1..{N_MODELS}")
    return [UncertainInput(float(r), int(m)) for r, m in zip(re, model)]


def inputs_to_array(inputs) -> np.ndarray:
    return np.array([[xi.re_c, xi.model_id] for xi in inputs], dtype=float)


def check_theta(theta, n_theta: int) -> np.ndarray:
    theta = check_array(np.atleast_2d(theta), dtype=float).ravel()
    if theta.size != n_theta:
        raise ValueError(f"expected {n_theta} design variables, got {theta.size}")
    return theta
