"""
minirec - Recurrence experiments on the torus

Bohr and Bohr-Hamming neighborhoods, simultaneous Diophantine
approximation, rotation systems, Kleitman-type Hamming ball checks and
Cantor-type Kronecker measure constructions, all with certified
ambiguity handling.
"""

__version__ = "0.1.0"

from .core.workbench import Workbench
from .core.config import RunConfig
from .core.cli import main

__all__ = ["Workbench", "RunConfig", "main"]
