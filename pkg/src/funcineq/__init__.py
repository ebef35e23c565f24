"""Explicit perturbation bounds for Poincare, Cheeger and log-Sobolev
constants of measures ``exp(-F) mu``, verified against numerical spectral
oracles, with an unadjusted Langevin sampler whose relaxation rate the
bounds certify.

Layout: ``measures`` (models, perturbations, quadrature moments),
``bounds`` (one calculator per transfer principle), ``oracle`` (1D
spectral-gap, Cheeger and Muckenhoupt ground truth), ``mollify``
(convolutions of atomic measures), ``langevin`` (ULA and diagnostics),
``regress`` (sparse Bayesian regression application), ``instances``
(randomized soundness-sweep corpora) and ``cli`` (scenario runner).
"""

from . import bounds, instances, langevin, measures, mollify, oracle, regress
from .bounds import BoundResult, ParamSearch
from .langevin import ChainConfig, ChainTrace
from .measures import MeasureModel, MomentSet, Perturbation, QuadratureSpec
from .mollify import AtomicMeasure
from .oracle import GridMeasure1D, OracleResult

__version__ = "0.1.0"

__all__ = [
    "bounds", "instances", "langevin", "measures", "mollify", "oracle",
    "regress", "BoundResult", "ParamSearch", "ChainConfig", "ChainTrace",
    "MeasureModel", "MomentSet", "Perturbation", "QuadratureSpec",
    "AtomicMeasure", "GridMeasure1D", "OracleResult", "__version__",
]
