"""Explicit dynamics of continuum-based 9-node thick shells."""

from .errors import ShellError
from .material import MaterialLaw
from .mesh import Model, load_model, model_from_dict, save_model
from .solver import Assembler, initial_state, run, step

__all__ = [
    "Assembler",
    "MaterialLaw",
    "Model",
    "ShellError",
    "initial_state",
    "load_model",
    "model_from_dict",
    "run",
    "save_model",
    "step",
]
__version__ = "0.1.0"
