"""Shortcut-to-adiabaticity trap protocols for a 1D condensate.

Width dynamics come from the Gaussian variational (generalized Ermakov)
equation; protocols are checked against split-step GPE simulation.
"""
__version__ = "0.1.0"

from .core import (  # noqa: E402
    ErmakovState, ErmakovTrajectory, Model, PhysicalParams, effective_energy,
    effective_potential, ermakov_rhs, integrate_ermakov, omega_squared_from_width,
    solve_boundary_widths,
)
from .design import (  # noqa: E402
    DesignReport, Scheme, bang_bang_linear_closed_form, design, design_bang_bang,
    design_bang_bang_tf, design_inverse_engineering, design_two_jump, verify_protocol,
)
from .protocol import ConstantU, SampledU, Segment, TrapProtocol  # noqa: E402
from .quadrature import singular_time_quadrature  # noqa: E402
