"""Discrete-time macroalgae-coral reef map: equilibria, stability, bifurcations and chaos control."""

from .control import (hybrid_design, hybrid_simulate, ogy_design, ogy_lines_from,
                      ogy_simulate)
from .equilibria import (EquilibriumSet, closed_form_equilibria, equilibria,
                         interior_equilibria)
from .errors import (DegenerateTransform, DomainError, InsufficientSamples, InternalInconsistency,
                     NotAFixedPoint, NotInFlipRegion, NotInNsRegion, ReefError)
from .flip import FlipReport, flip_discriminants, flip_normal_form, flip_point
from .model import MapConfig, ModelParams, State, continuous_rhs, step, validate
from .neimark_sacker import NsFrame, NsReport, ns_discriminant, ns_frame
from .orbits import (AttractorKind, AttractorSummary, SweepSpec, classify_attractor, iterate,
                     lyapunov, sweep)
from .stability import (CharData, Jacobian2, StabilityClass, StabilityReport, char_data,
                        classify, jacobian, lemma1_case)
from .taylor import TaylorCoeffs, taylor_coeffs

__all__ = [
    "AttractorKind", "AttractorSummary", "CharData", "DegenerateTransform", "DomainError",
    "EquilibriumSet", "FlipReport", "InsufficientSamples", "InternalInconsistency", "Jacobian2",
    "MapConfig", "ModelParams", "NotAFixedPoint", "NotInFlipRegion", "NotInNsRegion", "NsFrame",
    "NsReport", "ReefError", "StabilityClass", "StabilityReport", "State", "SweepSpec",
    "TaylorCoeffs", "char_data", "classify", "classify_attractor", "closed_form_equilibria",
    "continuous_rhs", "equilibria", "flip_discriminants", "flip_normal_form", "flip_point",
    "hybrid_design", "hybrid_simulate", "interior_equilibria", "iterate", "jacobian",
    "lemma1_case", "lyapunov", "ns_discriminant", "ns_frame", "ogy_design", "ogy_lines_from",
    "ogy_simulate", "step", "sweep", "taylor_coeffs", "validate",
]
