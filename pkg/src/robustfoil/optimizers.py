"""Plain SGD and AdaGrad updates plus the stochastic optimization loop."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .aero import SurrogateEvaluator, model_catalog
from .config import CampaignConfig
from .geometry import DegenerateGeometryError, DesignVector, GeometryContext
from .robust import RobustConfig, build_batch, estimate
from .uncertainty import RngStream, dsp_input, sample_batch

MAX_PULLBACKS = 5


class NumericalAbort(RuntimeError):
    def __init__(self, iteration: int, reason: str):
        self.iteration = iteration
        self.reason = reason
        super().__init__(f"iteration {iteration}: {reason}")


@dataclass(frozen=True)
class OptimizerState:
    theta: np.ndarray
    accumulator: np.ndarray
    k: int = 1
    eta: float = 0.02
    epsilon: float = 1.0e-8

    @classmethod
    def initial(cls, theta, eta: float = 0.02, epsilon: float = 1.0e-8) -> "OptimizerState":
        theta = np.array(theta, dtype=float)
        return cls(theta, np.zeros_like(theta), 1, eta, epsilon)


def _check_gradient(state: OptimizerState, h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape != state.theta.shape:
        raise ValueError(f"gradient shape {h.shape} != parameter shape {state.theta.shape}")
    if not np.all(np.isfinite(h)):
        raise NumericalAbort(state.k, "non-finite gradient")
    return h


def _clamp(theta, lower, upper):
    if lower is None and upper is None:
        return theta
    return np.clip(theta, lower, upper)


def sgd_step(state: OptimizerState, h, lower=None, upper=None) -> OptimizerState:
    h = _check_gradient(state, h)
    theta = _clamp(state.theta - state.eta * h, lower, upper)
    return dataclasses.replace(state, theta=theta, k=state.k + 1)


def adagrad_step(state: OptimizerState, h, lower=None, upper=None) -> OptimizerState:
    h = _check_gradient(state, h)
    a = state.accumulator + h**2
    step = state.eta * h / (np.sqrt(a) + np.sqrt(state.epsilon))
    theta = _clamp(state.theta - step, lower, upper)
    return dataclasses.replace(state, theta=theta, accumulator=a, k=state.k + 1)


STEPS = {"adagrad": adagrad_step, "sgd": sgd_step}


@dataclass(frozen=True)
class IterationRecord:
    k: int
    normalized_cost: int
    mean_cd: float
    mean_cl: float
    objective: float
    g_lift_violation: float
    g_vol_violation: float
    theta: np.ndarray

    @property
    def alpha_deg(self) -> float:
        return float(self.theta[-1])


@dataclass
class RunResult:
    records: list[IterationRecord]
    design: DesignVector
    n_evaluations: int
    pullbacks: int = 0


def build_context(cfg: CampaignConfig) -> GeometryContext:
    return GeometryContext(
        n_per_surface=cfg.n_per_surface,
        nx=cfg.nx,
        ny=cfg.ny,
        margin=(cfg.margin_x, cfg.margin_y),
        n_quad=cfg.n_quad,
    )


def build_evaluator(cfg: CampaignConfig, workers: int = 1, ctx: GeometryContext | None = None):
    catalog = model_catalog(cfg.lift_slope_factors, cfg.lift_drag_factors)
    return SurrogateEvaluator(ctx or build_context(cfg), catalog, workers=workers)


def design_bounds(cfg: CampaignConfig, n_free: int) -> tuple[np.ndarray, np.ndarray]:
    lower = np.append(np.full(n_free, -cfg.dy_max), cfg.alpha_min)
    upper = np.append(np.full(n_free, cfg.dy_max), cfg.alpha_max)
    return lower, upper


def run(
    config: CampaignConfig,
    evaluator=None,
    on_record: Callable[[IterationRecord], None] | None = None,
    sampler: Callable = sample_batch,
) -> RunResult:
    """Fixed-budget stochastic optimization from the baseline airfoil.

    Each iteration draws a fresh batch keyed by the iteration index (or the
    fixed operating point in DSP mode), evaluates it, forms the batch
    estimate and takes one optimizer step. A self-intersecting design is
    pulled halfway back towards the previous iterate, up to five times.
    """
    cfg = config.normalized()
    evaluator = evaluator or build_evaluator(cfg)
    n_free = evaluator.ctx.n_free
    lower, upper = design_bounds(cfg, n_free)
    rcfg = RobustConfig(cfg.lam, cfg.kappa, cfg.c_l_star, cfg.vol_tol)
    stream = RngStream(
        cfg.seed, re_bounds=(cfg.re_min, cfg.re_max), log_uniform_re=cfg.log_uniform_re
    )
    step = STEPS[cfg.algorithm]

    state = OptimizerState.initial(
        DesignVector.zeros(n_free, cfg.alpha0).theta, cfg.eta, cfg.epsilon
    )
    previous = state.theta
    records: list[IterationRecord] = []
    pullbacks = 0

    for k in range(1, cfg.n_iterations + 1):
        inputs = [dsp_input()] if cfg.mode == "dsp" else sampler(stream, k, cfg.n)
        theta = state.theta
        for attempt in range(MAX_PULLBACKS + 1):
            design = DesignVector.from_theta(theta)
            try:
                geo, responses = evaluator.evaluate_batch(design, inputs)
                break
            except DegenerateGeometryError as exc:
                if attempt == MAX_PULLBACKS:
                    raise NumericalAbort(k, f"degenerate geometry after {MAX_PULLBACKS} pullbacks: {exc}")
                theta = 0.5 * (theta + previous)
                pullbacks += 1
        if theta is not state.theta:
            state = dataclasses.replace(state, theta=theta)

        batch = build_batch(design, inputs, responses, geo.area_ratio, geo.d_area_ratio)
        est = estimate(batch, rcfg)
        vol_violation = max(est.mean_violation[1], est.mean_violation[2])
        record = IterationRecord(
            k=k,
            normalized_cost=k * len(inputs),
            mean_cd=est.mean_cd,
            mean_cl=est.mean_cl,
            objective=est.objective_value,
            g_lift_violation=float(est.mean_violation[0]),
            g_vol_violation=float(vol_violation),
            theta=np.array(state.theta),
        )
        records.append(record)
        if on_record is not None:
            on_record(record)

        previous = state.theta
        try:
            state = step(state, est.gradient, lower, upper)
        except NumericalAbort as exc:
            raise NumericalAbort(k, exc.reason) from None

    final = DesignVector.from_theta(state.theta)
    try:
        evaluator.ctx.deform(final)
    except DegenerateGeometryError:
        final = DesignVector.from_theta(records[-1].theta)
    return RunResult(records, final, evaluator.n_evaluations, pullbacks)
