"""Random motions with orthogonal directions: telegraph, planar three-direction,
and three-dimensional orthogonal motions, with simulators, analytic laws and
verification harnesses."""

from . import events, grids, occupation, ortho3d, planar3, rng, specfun, telegraph
from .events import RateFunction
from .ortho3d import MotionKind
from .planar3 import Planar3Params
from .telegraph import DomainError, TelegraphParams, TwoSpeedParams

__version__ = "0.1.0"

__all__ = [
    "events", "grids", "occupation", "ortho3d", "planar3", "rng", "specfun", "telegraph",
    "RateFunction", "MotionKind", "Planar3Params", "TelegraphParams", "TwoSpeedParams", "DomainError",
]
