# numerics/__init__.py

"""
Numerical kernels.
- linalg: symmetric Jacobi eigensolver and matrix checks
- qp: box/sum constrained QP by projected gradient
- halton: low-discrepancy sequences
"""

from numerics.halton import halton, halton_point, halton_points
from numerics.linalg import symmetric_eig
from numerics.qp import QpProblem, QpSolution, solve_qp
