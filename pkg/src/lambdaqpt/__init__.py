"""Three-level atoms in two cavity modes: phase diagram, symmetry-adapted states and quantum correlations."""

from .hilbert import FockCutoffs, HilbertSpace, build_space
from .operators import PRESETS, ModelParams, build_hamiltonian

__all__ = ["FockCutoffs", "HilbertSpace", "ModelParams", "PRESETS", "build_hamiltonian", "build_space"]
__version__ = "0.1.0"
