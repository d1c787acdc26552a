"""Phase diagrams of two-parameter exponential random graph models."""

from .free_energy import H2, psi_gradient, psi_hessian, psi_infinity, psi_report
from .maximizer import classify, global_maximizers, inflection_points, local_maximizers
from .phase import transition_q, transition_q_inverse, trace_curves, v_bounds
from .scalar import ModelParams, critical_point

__version__ = "0.1.0"
