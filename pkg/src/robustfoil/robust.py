"""Mean-plus-variance objective, squared-violation penalties and their batch estimates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .aero import AeroResponse
from .geometry import DesignVector
from .uncertainty import UncertainInput

CONSTRAINT_NAMES = ("lift", "volume_upper", "volume_lower")


class NonFiniteResponseError(FloatingPointError):
    def __init__(self, sample: int, xi: UncertainInput):
        self.sample = sample
        self.xi = xi
        super().__init__(
            f"non-finite response for sample {sample} (re_c={xi.re_c:.6g}, model={xi.model_id})"
        )


@dataclass(frozen=True)
class RobustConfig:
    lam: float = 0.0
    kappa: tuple[float, ...] = (1.0, 1.0, 1.0)
    c_l_star: float = 0.375
    vol_tol: float = 1.0e-3

    def __post_init__(self):
        object.__setattr__(self, "kappa", tuple(float(k) for k in self.kappa))
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if len(self.kappa) != len(CONSTRAINT_NAMES) or min(self.kappa) < 0:
            raise ValueError(f"kappa needs {len(CONSTRAINT_NAMES)} non-negative weights")
        if not self.c_l_star > 0:
            raise ValueError("c_l_star must be positive")
        if self.vol_tol < 0:
            raise ValueError("vol_tol must be >= 0")


@dataclass(frozen=True)
class SampleBatch:
    entries: list[tuple[UncertainInput, AeroResponse]]
    design: DesignVector
    area_ratio: float
    area_ratio_grad: np.ndarray = field(repr=False)  # d(area ratio)/d theta, alpha entry 0

    def __post_init__(self):
        if not self.entries:
            raise ValueError("a sample batch needs at least one entry")

    @property
    def n(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class StochasticEstimate:
    objective_value: float
    gradient: np.ndarray
    mean_cd: float
    mean_cl: float
    var_cd: float
    mean_violation: np.ndarray  # mean of max(0, g_j) per constraint


def constraint_values(
    response: AeroResponse, area_ratio: float, area_ratio_grad, cfg: RobustConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Constraints ``g <= 0`` and their gradients, shape ``(3,)`` and ``(3, n_theta)``.

    The area equality is split into two one-sided tolerances.
    """
    area_ratio_grad = np.asarray(area_ratio_grad, dtype=float)
    g = np.array([
        (cfg.c_l_star - response.c_l) / cfg.c_l_star,
        (area_ratio - 1.0) - cfg.vol_tol,
        (1.0 - area_ratio) - cfg.vol_tol,
    ])
    grad = np.vstack([-response.grad_c_l / cfg.c_l_star, area_ratio_grad, -area_ratio_grad])
    return g, grad


def violation_transform(g, grad_g):
    """``G = max(0, g)^2`` with ``dG = 2 max(0, g) dg``; works on stacked constraints."""
    g = np.asarray(g, dtype=float)
    pos = np.maximum(0.0, g)
    return pos**2, 2.0 * pos[..., None] * np.asarray(grad_g, dtype=float)


def sample_mean_variance(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot summarise an empty sample")
    if np.all(v == v.flat[0]):
        return float(v.flat[0]), 0.0  # exact, free of summation roundoff
    return float(np.mean(v)), float(np.var(v, ddof=1))


def _moment_gradients(values: np.ndarray, grads: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of the sample mean and unbiased sample variance over the leading axis."""
    n = values.shape[0]
    g_mean = grads.mean(axis=0)
    if n == 1:
        return g_mean, np.zeros_like(g_mean)
    dev = values - values.mean(axis=0)
    g_var = 2.0 / (n - 1) * np.einsum("i...,i...k->...k", dev, grads - g_mean)
    return g_mean, g_var


def estimate(batch: SampleBatch, cfg: RobustConfig) -> StochasticEstimate:
    """Value and gradient of the penalised mean-plus-variance objective on ``batch``.

    The gradient is the exact derivative of the returned value with the
    batch held fixed; with one sample it reduces to the plain single-sample
    stochastic gradient.
    """
    f, grad_f, G, grad_G, viol, cl = [], [], [], [], [], []
    for i, (xi, resp) in enumerate(batch.entries):
        if not resp.is_finite():
            raise NonFiniteResponseError(i, xi)
        g, dg = constraint_values(resp, batch.area_ratio, batch.area_ratio_grad, cfg)
        Gi, dGi = violation_transform(g, dg)
        f.append(resp.c_d)
        grad_f.append(resp.grad_c_d)
        G.append(Gi)
        grad_G.append(dGi)
        viol.append(np.maximum(0.0, g))
        cl.append(resp.c_l)

    f, grad_f = np.array(f), np.array(grad_f)
    G, grad_G = np.array(G), np.array(grad_G)  # (n, 3), (n, 3, n_theta)
    kappa = np.array(cfg.kappa)

    mean_f, var_f = sample_mean_variance(f)
    dmean_f, dvar_f = _moment_gradients(f, grad_f)
    mean_G = G.mean(axis=0)
    var_G = G.var(axis=0, ddof=1) if batch.n > 1 else np.zeros(G.shape[1])
    dmean_G, dvar_G = _moment_gradients(G, grad_G)

    value = mean_f + cfg.lam * var_f + float(kappa @ (mean_G + cfg.lam * var_G))
    grad = dmean_f + cfg.lam * dvar_f + kappa @ (dmean_G + cfg.lam * dvar_G)
    return StochasticEstimate(
        objective_value=float(value),
        gradient=grad,
        mean_cd=mean_f,
        mean_cl=float(np.mean(cl)),
        var_cd=var_f,
        mean_violation=np.mean(viol, axis=0),
    )


def build_batch(
    design: DesignVector,
    inputs: Sequence[UncertainInput],
    responses: Sequence[AeroResponse],
    area_ratio: float,
    d_area_ratio_dffd,
) -> SampleBatch:
    return SampleBatch(
        entries=list(zip(inputs, responses)),
        design=design,
        area_ratio=area_ratio,
        area_ratio_grad=np.append(d_area_ratio_dffd, 0.0),
    )
