"""Global centers of the periodic piecewise-linear equation x' = a(t)|x| + b(t)."""

from .analysis import (AnalysisConfig, ClassificationReport, band_structure, center_classify,
                       cycle_invariants, hypothesis_check)
from .decompose import (CompositionWitness, DecompositionOutcome, construct_from_witness,
                        find_common_witness, verify_witness)
from .flow import PwlOde, displacement, integrate, outer_band_displacement, poincare
from .trigpoly import RealPoly, TrigPoly, zeros_on_period

__all__ = [
    "AnalysisConfig", "ClassificationReport", "CompositionWitness", "DecompositionOutcome",
    "PwlOde", "RealPoly", "TrigPoly", "band_structure", "center_classify",
    "construct_from_witness", "cycle_invariants", "displacement", "find_common_witness",
    "hypothesis_check", "integrate", "outer_band_displacement", "poincare",
    "verify_witness", "zeros_on_period",
]
