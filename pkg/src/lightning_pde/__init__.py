"""Lightning solvers for Laplace and Helmholtz problems on polygons.

Solutions are expansions in singular functions clustered exponentially at
the corners, fitted by least squares on the boundary.

>>> from lightning_pde import make_polygon, LaplaceProblem, solve_laplace_dirichlet
>>> square = make_polygon([0, 1, 1 + 1j, 1j])
>>> sol, report = solve_laplace_dirichlet(
...     LaplaceProblem(square, lambda x, y: x**2 - y**2, tolerance=1e-12))
>>> report.converged
True
"""

from .basis import (BasisSpec, ErrorCertificate, OutsideDomainWarning, PlaneWave, PointSource,
                    Solution, eval_helmholtz, eval_laplace, incident_field)
from .exprlang import ExprDomainError, ExprSyntaxError, eval_expr, parse
from .geometry import Location, Point, Polygon, PolygonError, make_polygon, point_in_polygon
from .lstsq import LsProblem, solve_ls
from .placement import ClusteringParams, place_poles, place_samples
from .solver import (ConvergenceReport, HelmholtzProblem, LaplaceProblem, Schedule, certify,
                     solve_helmholtz_soundsoft, solve_laplace_dirichlet)
from .specfun import bessel_j, bessel_y, hankel1

__version__ = "0.1.0"

__all__ = [
    "BasisSpec", "ClusteringParams", "ConvergenceReport", "ErrorCertificate",
    "ExprDomainError", "ExprSyntaxError", "HelmholtzProblem", "LaplaceProblem", "Location",
    "LsProblem", "OutsideDomainWarning", "PlaneWave", "Point", "PointSource", "Polygon",
    "PolygonError", "Schedule", "Solution", "bessel_j", "bessel_y", "certify", "eval_expr",
    "eval_helmholtz", "eval_laplace", "hankel1", "incident_field", "make_polygon", "parse",
    "place_poles", "place_samples", "point_in_polygon", "solve_helmholtz_soundsoft",
    "solve_laplace_dirichlet", "solve_ls",
]
