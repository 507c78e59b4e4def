"""Simplex-embedding noise robustness of qubit fragments."""

from .cones import PolyhedralCone, facet_enumerate
from .embedding import (GptFragment, NoiseLPError, NoiseModel, RobustnessResult,
                        SweepStats, bloch_devectorize, bloch_vectorize,
                        canonical_fragment, embeddable_at, fixed_effects,
                        min_noise_bisect, min_noise_lp, random_fragment_sweep,
                        validate_certificate)
from .simplex import LPResult, solve_lp

__all__ = [
    "GptFragment", "LPResult", "NoiseLPError", "NoiseModel", "PolyhedralCone",
    "RobustnessResult", "SweepStats", "bloch_devectorize", "bloch_vectorize",
    "canonical_fragment", "embeddable_at", "facet_enumerate", "fixed_effects",
    "min_noise_bisect", "min_noise_lp", "random_fragment_sweep", "solve_lp",
    "validate_certificate",
]
