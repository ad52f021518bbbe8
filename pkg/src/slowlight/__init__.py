"""Stopping a slow-light soliton with a decaying control field.

Exact analytic solution (``core``), complex-order special functions
(``specfun``), a Maxwell-Bloch integrator with a residual oracle
(``integrator``), scenario I/O (``scenario``) and the ``slowlight`` CLI.
"""

from .core import (
    AtomState,
    ControlField,
    FieldSample,
    MediumParams,
    SolitonParams,
    atom_state,
    fields,
    group_velocity,
    memory_width,
    stopping_distance,
    w_initial,
    wz,
    wz_limit,
)
from .integrator import Grid2D, SolutionGrid, integrate, residual
from .scenario import Scenario, parse_scenario, sample

__version__ = "0.1.0"
