"""
This module provides evrep: coherent-state spin tomography in the expectation-value representation.
"""

from .cli.src.main import main
from .evrep.src import *

__version__ = "1.0.0"
