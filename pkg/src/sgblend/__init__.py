"""SG-Blend adaptive activations with a small numpy training harness."""

from .activations import ActivationKind, ActivationParams, d_input, forward
from .params import ParamStore

__all__ = ["ActivationKind", "ActivationParams", "ParamStore", "d_input", "forward"]
__version__ = "0.1.0"
