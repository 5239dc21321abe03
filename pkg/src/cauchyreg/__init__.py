"""Regularized Cauchy problem for nonlinear elliptic equations u_tt = A u + f(t, u)."""

from .kernels import RegParams, cosh_reg, picard_contraction_depth, sinh_reg, sinh_reg_diff, sobolev_bound, stability_factor
from .model import BenchmarkProblem, CauchyData, SourceSpec, forward_residual, source_eval
from .noise import NoiseModel, benchmark_noisy_data
from .solver import (Grid, ModalData, RegularizedSolution, assemble_terminal, mild_homogeneous,
                     mild_inhomogeneous, nodal_data, picard_solve, regularized_march, terminal_time)
from .spectral import EigenBasis, QuadratureRule, eigenvalue, forward_coeff, synthesize

__version__ = "0.1.0"
