"""Numerical Finsler geometry on a single coordinate chart.

From a fundamental function L(x, y) — declared as a Riemannian or Randers
structure or an arbitrary 1-homogeneous expression — the package computes the
metric tensor, Cartan tensor, canonical spray, Barthel nonlinear connection,
the Cartan / Chern / Hashiguchi / Berwald connection triples, their torsions,
covariant derivatives and curvature tensors, and verifies the identities
relating all of these at seeded random points.
"""

from .calculus import (TensorField, TensorValue, cartan_tensor_field,
                       connection_h_torsion, connection_hv_torsion, curvature,
                       curvature_relations_residuals,
                       fundamental_function_field, h_cov_derivative,
                       h_torsion, hv_torsion, metric_tensor_field,
                       v_cov_derivative)
from .conformance import (Region, Tolerances, VerificationReport, fd_oracle,
                          run_suite)
from .connections import (ConnectionTriple, berwald_connection, c_process,
                          cartan_connection, chern_connection, connection,
                          custom_connection, expression_field,
                          hashiguchi_connection, p1_process)
from .errors import (ConvexityError, EvaluationDomainError, ExpressionError,
                     FinslerError, NotPositiveDefiniteError, SpecError,
                     TruncationError)
from .expressions import parse_expression
from .geometry import (AdaptedFrame, CartanTensorValue, MetricTensorValue,
                       PointGeometry, SprayValue, adapted_frame,
                       canonical_spray, cartan_tensor, energy,
                       formal_christoffel, metric_tensor)
from .jets import ChartPoint, Jet, extract, seed_chart, seed_variables
from .metrics import (FinslerMetric, MetricSpec, build_metric,
                      verify_homogeneity)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
