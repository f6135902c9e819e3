"""Symmetry analysis and gauging of matrix product states under matrix
product unitary group actions."""

from .defects import (action_tensors, build_defect_system,
                      block_independence, fix_gauge)
from .gauging import (gauss_laws, onsite_gauss_laws, projector_report,
                      projection_gauging, promote, state_level_gauging)
from .groups import Group
from .models import BUILTIN_MODELS, get_model, load_model, random_instance
from .mps import BlockMps
from .mpu import Mpu
from .symmetry import build_rep, compute_omega, compute_zeta

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_MODELS", "BlockMps", "Group", "Mpu",
    "action_tensors", "block_independence", "build_defect_system",
    "build_rep", "compute_omega", "compute_zeta", "fix_gauge",
    "gauss_laws", "get_model", "load_model", "onsite_gauss_laws",
    "projection_gauging", "projector_report", "promote", "random_instance",
    "state_level_gauging",
]
