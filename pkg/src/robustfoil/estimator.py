"""scikit-learn style wrapper around the stochastic robust design loop."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .config import CampaignConfig
from .optimizers import build_evaluator, run
from .robust import RobustConfig, build_batch, estimate
from .validation import check_uncertain_inputs


class RobustAirfoilDesigner(BaseEstimator):
    """Optimise an FFD-parameterised NACA-0012 under Reynolds and model uncertainty.

    ``fit`` runs the stochastic optimisation; ``X`` rows are uncertain
    inputs ``(re_c, model_id)``. ``predict`` returns ``[c_d, c_l]`` of the
    fitted design for each row, and ``score`` is the negated penalised
    mean-plus-variance objective on the given rows (higher is better), so
    hyperparameters such as ``lam`` can be tuned with the usual model
    selection tools.

    Parameters
    ----------
    mode : {"dsp", "average", "robust"}
    n_samples : int
        Uncertain-input samples per iteration (forced to 1 in DSP mode).
    lam : float
        Variance weight of objective and constraints (forced to 0 unless robust).
    eta : float
        Step size.
    n_iter : int or None
        Iteration budget; ``None`` targets a normalized cost of 2000.
    algorithm : {"adagrad", "sgd"}
    random_state : int
    kappa : tuple of 3 floats
        Penalty weights for the lift and the two area constraints.
    c_l_star, vol_tol : float
    dy_max : float
        Bound on every FFD displacement, in chords.
    alpha_bounds : tuple of 2 floats
        Angle-of-attack bounds in degrees.
    """

    def __init__(
        self,
        mode="robust",
        n_samples=4,
        lam=0.0,
        eta=0.02,
        n_iter=None,
        algorithm="adagrad",
        random_state=0,
        kappa=(1.0, 1.0, 1.0),
        c_l_star=0.375,
        vol_tol=1.0e-3,
        dy_max=0.05,
        alpha_bounds=(-5.0, 10.0),
    ):
        self.mode = mode
        self.n_samples = n_samples
        self.lam = lam
        self.eta = eta
        self.n_iter = n_iter
        self.algorithm = algorithm
        self.random_state = random_state
        self.kappa = kappa
        self.c_l_star = c_l_star
        self.vol_tol = vol_tol
        self.dy_max = dy_max
        self.alpha_bounds = alpha_bounds

    def _config(self) -> CampaignConfig:
        return CampaignConfig(
            mode=self.mode,
            n=self.n_samples,
            lam=self.lam,
            eta=self.eta,
            iterations=self.n_iter,
            seed=int(self.random_state),
            algorithm=self.algorithm,
            kappa=tuple(self.kappa),
            c_l_star=self.c_l_star,
            vol_tol=self.vol_tol,
            dy_max=self.dy_max,
            alpha_min=self.alpha_bounds[0],
            alpha_max=self.alpha_bounds[1],
        ).normalized()

    def fit(self, X=None, y=None):
        """Run the optimisation. ``X`` and ``y`` are accepted for API compatibility and ignored."""
        cfg = self._config()
        evaluator = build_evaluator(cfg)
        result = run(cfg, evaluator)
        self.config_ = cfg
        self.design_ = result.design
        self.theta_ = result.design.theta
        self.history_ = result.records
        self.n_evaluations_ = result.n_evaluations
        self.n_features_in_ = 2
        self._evaluator = evaluator
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "design_")
        inputs = check_uncertain_inputs(X)
        _, responses = self._evaluator.evaluate_batch(self.design_, inputs)
        return np.array([[r.c_d, r.c_l] for r in responses])

    def score(self, X, y=None) -> float:
        check_is_fitted(self, "design_")
        inputs = check_uncertain_inputs(X)
        geo, responses = self._evaluator.evaluate_batch(self.design_, inputs)
        batch = build_batch(self.design_, inputs, responses, geo.area_ratio, geo.d_area_ratio)
        cfg = self.config_
        est = estimate(batch, RobustConfig(cfg.lam, cfg.kappa, cfg.c_l_star, cfg.vol_tol))
        return -est.objective_value

    def shape(self):
        """Airfoil polyline of the fitted design."""
        check_is_fitted(self, "design_")
        return self._evaluator.ctx.deform(self.design_)

