"""Stochastic-gradient robust airfoil design under Reynolds-number and model uncertainty."""

from .aero import AeroModelVariant, AeroResponse, SurrogateEvaluator, evaluate, model_catalog
from .config import CampaignConfig, ConfigError, load_config
from .estimator import RobustAirfoilDesigner
from .geometry import (
    AirfoilShape,
    DegenerateGeometryError,
    DesignVector,
    FfdLattice,
    GeometryContext,
    baseline_naca0012,
    build_lattice,
    camber_thickness,
    deform,
    shape_sensitivities,
)
from .harness import compare_designs, parameter_space_study, run_campaign
from .optimizers import NumericalAbort, OptimizerState, adagrad_step, run, sgd_step
from .robust import RobustConfig, SampleBatch, StochasticEstimate, estimate
from .uncertainty import RngStream, UncertainInput, dsp_input, sample_batch

__version__ = "0.1.0"
