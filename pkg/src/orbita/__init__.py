"""orbita: classical and semiclassical dynamics on u(3) coadjoint orbits
reduced by rotations, with action-angle variables and Bohr-Sommerfeld
quantization of the wobbling momentum.
"""

__version__ = "0.1.0"

from .errors import DomainError, NumericalError, OrbitaError  # noqa: F401
from .poisson import ReducedState, WeightVector  # noqa: F401
