"""Differentiable aerodynamic surrogate: thin-airfoil lift and correlation-based drag.

Five model variants stand in for five turbulence closures. Each pairs a
turbulent flat-plate skin-friction law with its own lift-slope factor and
lift-dependent drag factor, so the family has genuine model-form spread.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import DesignVector, GeometricState, GeometryContext
from .uncertainty import RE_MAX, RE_MIN, UncertainInput

DEG = np.pi / 180.0


def _log10(re):
    return np.log10(re)


FRICTION_LAWS: dict[str, Callable[[float], float]] = {
    "prandtl_power": lambda re: 0.074 * re ** (-0.2),
    "prandtl_schlichting": lambda re: 0.455 / _log10(re) ** 2.58,
    "ittc1957": lambda re: 0.075 / (_log10(re) - 2.0) ** 2,
    "schultz_grunow": lambda re: 0.427 / (_log10(re) - 0.407) ** 2.64,
    "power_0576": lambda re: 0.0576 * re ** (-0.2),
}

DEFAULT_FRICTION_LAWS = (
    "prandtl_power",
    "prandtl_schlichting",
    "ittc1957",
    "schultz_grunow",
    "power_0576",
)
DEFAULT_LIFT_SLOPE_FACTORS = (1.00, 0.97, 0.99, 1.02, 1.04)
DEFAULT_LIFT_DRAG_FACTORS = (0.0060, 0.0075, 0.0068, 0.0055, 0.0050)


@dataclass(frozen=True)
class AeroModelVariant:
    id: int
    friction_law: str
    lift_slope_factor: float
    lift_drag_factor: float

    def __post_init__(self):
        if self.friction_law not in FRICTION_LAWS:
            raise ValueError(f"unknown friction law {self.friction_law!r}")
        if not self.lift_slope_factor > 0:
            raise ValueError("lift_slope_factor must be positive")
        if not self.lift_drag_factor >= 0:
            raise ValueError("lift_drag_factor must be non-negative")

    def skin_friction(self, re: float) -> float:
        return float(FRICTION_LAWS[self.friction_law](re))


def model_catalog(
    lift_slope_factors: Sequence[float] | None = None,
    lift_drag_factors: Sequence[float] | None = None,
    friction_laws: Sequence[str] | None = None,
) -> list[AeroModelVariant]:
    m = DEFAULT_LIFT_SLOPE_FACTORS if lift_slope_factors is None else tuple(lift_slope_factors)
    kp = DEFAULT_LIFT_DRAG_FACTORS if lift_drag_factors is None else tuple(lift_drag_factors)
    laws = DEFAULT_FRICTION_LAWS if friction_laws is None else tuple(friction_laws)
    if not len(m) == len(kp) == len(laws) == 5:
        raise ValueError("the catalog needs exactly 5 entries per variant constant")
    return [
        AeroModelVariant(i + 1, laws[i], float(m[i]), float(kp[i])) for i in range(5)
    ]


@dataclass(frozen=True)
class LiftResult:
    c_l: float
    dcl_dalpha_deg: float
    dcl_dslopes: np.ndarray


def lift_coefficient(camber_slopes, alpha_deg: float, variant: AeroModelVariant) -> LiftResult:
    """Thin-airfoil lift with midpoint quadrature of the zero-lift angle.

    ``camber_slopes`` must be sampled at the midpoint Glauert nodes
    ``theta_q = (q + 1/2) pi / n``.
    """
    s = np.asarray(camber_slopes, dtype=float)
    n = s.size
    theta = (np.arange(n) + 0.5) * np.pi / n
    # alpha_L0 = -(1/pi) * sum(w_q * s_q * (cos theta_q - 1)), w_q = pi/n
    kernel = (1.0 - np.cos(theta)) / n
    alpha_l0 = float(kernel @ s)
    slope = variant.lift_slope_factor * 2.0 * np.pi
    return LiftResult(
        c_l=slope * (alpha_deg * DEG - alpha_l0),
        dcl_dalpha_deg=slope * DEG,
        dcl_dslopes=-slope * kernel,
    )


@dataclass(frozen=True)
class DragResult:
    c_d: float
    dcd_dcl: float
    dcd_dt: float
    dcd_dperimeter: float


def form_factor(t_over_c: float) -> float:
    return 1.0 + 2.0 * t_over_c + 60.0 * t_over_c**4


def drag_coefficient(
    c_l: float, t_over_c: float, perimeter: float, re: float, variant: AeroModelVariant
) -> DragResult:
    if not RE_MIN <= re <= RE_MAX:
        raise ValueError(f"Reynolds number {re:.6g} outside [{RE_MIN:g}, {RE_MAX:g}]")
    cf = variant.skin_friction(re)
    ff = form_factor(t_over_c)
    kp = variant.lift_drag_factor
    return DragResult(
        c_d=cf * ff * perimeter + kp * c_l**2,
        dcd_dcl=2.0 * kp * c_l,
        dcd_dt=cf * perimeter * (2.0 + 240.0 * t_over_c**3),
        dcd_dperimeter=cf * ff,
    )


@dataclass(frozen=True)
class AeroResponse:
    c_l: float
    c_d: float
    grad_c_l: np.ndarray
    grad_c_d: np.ndarray

    def is_finite(self) -> bool:
        return bool(
            np.isfinite(self.c_l)
            and np.isfinite(self.c_d)
            and np.all(np.isfinite(self.grad_c_l))
            and np.all(np.isfinite(self.grad_c_d))
        )


def response_from_geometry(
    geo: GeometricState, alpha_deg: float, xi: UncertainInput, variant: AeroModelVariant
) -> AeroResponse:
    """Chain-rule lift and drag partials through the geometric sensitivities."""
    lift = lift_coefficient(geo.camber_slopes, alpha_deg, variant)
    drag = drag_coefficient(lift.c_l, geo.t_over_c, geo.perimeter, xi.re_c, variant)

    grad_cl = np.append(lift.dcl_dslopes @ geo.d_camber_slopes, lift.dcl_dalpha_deg)
    grad_shape = drag.dcd_dt * geo.d_t_over_c + drag.dcd_dperimeter * geo.d_perimeter
    grad_cd = drag.dcd_dcl * grad_cl + np.append(grad_shape, 0.0)
    return AeroResponse(lift.c_l, drag.c_d, grad_cl, grad_cd)


def evaluate(
    design: DesignVector,
    xi: UncertainInput,
    ctx: GeometryContext,
    catalog: Sequence[AeroModelVariant] | None = None,
) -> AeroResponse:
    catalog = model_catalog() if catalog is None else catalog
    return response_from_geometry(ctx.analyze(design), design.alpha_deg, xi, catalog[xi.model_id - 1])


class SurrogateEvaluator:
    """Response-with-gradient evaluator with an evaluation counter.

    Any object exposing ``evaluate_batch(design, inputs)`` returning
    ``(GeometricState, [AeroResponse, ...])`` can replace it in the optimizer,
    e.g. an adapter around an external flow and adjoint solver.
    """

    def __init__(self, ctx: GeometryContext, catalog=None, workers: int = 1):
        self.ctx = ctx
        self.catalog = model_catalog() if catalog is None else list(catalog)
        self.workers = max(1, int(workers))
        self.n_evaluations = 0
        self._lock = threading.Lock()

    def evaluate(self, design: DesignVector, xi: UncertainInput) -> AeroResponse:
        return self.evaluate_batch(design, [xi])[1][0]

    def evaluate_batch(self, design: DesignVector, inputs: Sequence[UncertainInput]):
        geo = self.ctx.analyze(design)

        def one(xi):
            return response_from_geometry(geo, design.alpha_deg, xi, self.catalog[xi.model_id - 1])

        if self.workers > 1 and len(inputs) > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                responses = list(pool.map(one, inputs))  # map keeps sample order
        else:
            responses = [one(xi) for xi in inputs]
        with self._lock:
            self.n_evaluations += len(inputs)
        return geo, responses
