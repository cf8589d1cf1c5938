"""Value of information of non-destructive evaluation (NDE) systems.

Quality models of an inspection (base model, PoD curve, ROC model,
confusion matrix), Bayesian preposterior decision analysis for
repair-or-not decisions, a two-step inspect-and-repair problem, and the
built-in reference scenarios.
"""

from .bayes import A0, AR, Action, BinaryPrior, FailureModel, lognormal_cdf_failure
from .config import ScenarioConfig, load_scenario
from .decision import (
    OneStepProblem,
    PolicyReport,
    calibrate_threshold,
    cost_surface,
    experimental_design_report,
    optimal_policy,
    preposterior_cost,
    prior_optimal,
    solve_one_step,
)
from .distributions import Exponential, Lognormal, Normal, Uniform
from .errors import (
    ConfigError,
    DegenerateDesign,
    NdeVoiError,
    NonConvergence,
    NonFiniteIntegrand,
    NonFiniteObjective,
    UnknownScenario,
    ZeroEvidence,
)
from .nde_models import (
    BaseModel,
    ConfusionMatrix,
    PodCurve,
    RocModel,
    SignalOrientation,
    lognormal_polynomial_base,
    pod_curve_from_base,
    roc_from_base,
    roc_given,
    roc_point,
)
from .quadrature import Interval, integrate
from .scenarios import builtin
from .twostep import TwoStepProblem, memoryless_policy_cost, two_step_solve

__version__ = "0.1.0"
