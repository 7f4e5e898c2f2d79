"""Soliton dynamics under rough, slowly varying nonlinear perturbations.

Closed-form NLS solitons, the symmetry group acting on them, a split-step
spectral solver, modulation-parameter extraction and the effective ODEs.
"""
from .config import StudyConfig, load_config, parse_config
from .errors import SolitonLabError
from .grid import GridSpec
from .manifold import SolitonParams
from .profile import NonlinearityParams

__all__ = ["GridSpec", "NonlinearityParams", "SolitonLabError", "SolitonParams", "StudyConfig",
           "load_config", "parse_config"]
