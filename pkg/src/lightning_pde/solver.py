"""Adaptive lightning solvers for Laplace (Dirichlet) and Helmholtz (sound-soft).

Each refinement step ``s = 1, 2, ...`` places ``poles_per_step * s``
singularities at every corner, fits the expansion by least squares on the
boundary, and measures the unweighted residual on an independent, denser
boundary grid.  The loop stops once that residual is below the tolerance or
the next basis would exceed ``max_dof``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .basis import (HELMHOLTZ, LAPLACE, BasisSpec, ErrorCertificate, PlaneWave, PointSource,
                    Solution, eval_helmholtz, eval_laplace, helmholtz_matrix, laplace_matrix)
from .geometry import BOUNDARY, OUTSIDE, Polygon, boundary_distance, classify
from .lstsq import LsProblem, residual_sup, solve_ls
from .specfun import MAX_ORDER, hankel1_orders
from .placement import (EXTERIOR, INTERIOR, UNIFORM, ClusteringParams, place_poles, place_samples,
                        validation_samples)

log = logging.getLogger(__name__)

BoundaryData = Callable[[np.ndarray, np.ndarray], np.ndarray]
Incident = Union[PlaneWave, PointSource]

LAPLACE_STATEMENT = ("maximum principle: |u_exact - u| <= {r:.3e} everywhere in the closed "
                     "domain, where {r:.3e} is the largest boundary residual on a "
                     "{n}-point validation grid")
HELMHOLTZ_STATEMENT = ("largest |scattered + incident| on a {n}-point validation grid of the "
                       "scatterer boundary is {r:.3e}; no interior bound is implied")


@dataclass(frozen=True)
class Schedule:
    """Basis growth per refinement step.

    Step ``s`` uses ``poles_per_step * s`` singularities per corner and
    smooth-part degree ``ceil(degree_per_step * s)``; the Helmholtz
    multipole degree is additionally offset by ``ceil(k R)``.
    """

    poles_per_step: int = 3
    degree_per_step: float = 2.5
    multipole_per_step: int = 4

    def per_corner(self, step: int) -> int:
        return self.poles_per_step * step

    def degree(self, step: int) -> int:
        return math.ceil(self.degree_per_step * step - 1e-12)

    def multipole_degree(self, step: int, kr: float) -> int:
        return math.ceil(kr) + self.multipole_per_step * step


@dataclass
class LaplaceProblem:
    polygon: Polygon
    boundary_data: BoundaryData
    tolerance: float = 1e-10
    max_dof: int = 1200
    sigma: float = 4.0
    oversample: int = 3
    weighting: str = UNIFORM
    center: Optional[complex] = None
    schedule: Schedule = field(default_factory=Schedule)
    validation_refinement: int = 4

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_dof < 1:
            raise ValueError("max_dof must be positive")


@dataclass
class HelmholtzProblem:
    scatterer: Polygon
    incident: Incident
    k: float
    tolerance: float = 1e-3
    max_dof: int = 1500
    sigma: float = 4.0
    oversample: int = 3
    weighting: str = UNIFORM
    center: Optional[complex] = None
    schedule: Schedule = field(default_factory=Schedule)
    validation_refinement: int = 4

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"wavenumber k must be positive, got {self.k}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if isinstance(self.incident, PointSource):
            where = classify(self.scatterer, complex(self.incident.z0))
            if where != OUTSIDE:
                place = "on the boundary of" if where == BOUNDARY else "inside"
                raise ValueError(f"point source z0={self.incident.z0} lies {place} the scatterer")


@dataclass(frozen=True)
class Step:
    N: int
    fit_residual_sup: float
    validation_residual_sup: float
    elapsed_seconds: float


@dataclass
class ConvergenceReport:
    steps: list[Step] = field(default_factory=list)
    converged: bool = False
    final_certificate: Optional[ErrorCertificate] = None

    @property
    def dofs(self) -> np.ndarray:
        return np.array([s.N for s in self.steps])

    @property
    def residuals(self) -> np.ndarray:
        return np.array([s.validation_residual_sup for s in self.steps])


def _boundary_values(h: BoundaryData, z: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(h(z.real, z.imag), dtype=float)
    except Exception as exc:
        raise ValueError(f"boundary data could not be evaluated: {exc}") from exc
    values = np.broadcast_to(values, z.shape)
    if not np.all(np.isfinite(values)):
        raise ValueError("boundary data is not finite at every sample point")
    return values


def _center(poly: Polygon, override) -> complex:
    return poly.centroid if override is None else complex(override)


def _laplace_step(prob: LaplaceProblem, step: int):
    sched = prob.schedule
    params = ClusteringParams(prob.sigma, sched.per_corner(step), prob.oversample,
                              prob.weighting)
    poles = place_poles(prob.polygon, params, EXTERIOR)
    spec = BasisSpec(LAPLACE, poles, sched.degree(step), _center(prob.polygon, prob.center),
                     polygon=prob.polygon)
    return params, spec


def _solve_laplace_basis(prob: LaplaceProblem, params: ClusteringParams, spec: BasisSpec):
    samples = place_samples(prob.polygon, spec.poleset, spec.dof, params)
    h = _boundary_values(prob.boundary_data, samples.points)
    ls = LsProblem(laplace_matrix(samples, spec), h * samples.weights)
    coef, _ = solve_ls(ls)
    fit_sup = residual_sup(ls, coef, samples.weights)
    return Solution(spec, coef), fit_sup, len(samples)


def _laplace_certificate(prob: LaplaceProblem, sol: Solution, params: ClusteringParams,
                         refinement: int, fit_count: int = 0) -> ErrorCertificate:
    grid = validation_samples(prob.polygon, params, sol.spec.dof, refinement)
    h = _boundary_values(prob.boundary_data, grid.points)
    err = float(np.max(np.abs(eval_laplace(sol, grid.points, check_domain=False) - h)))
    return ErrorCertificate(err, len(grid), LAPLACE_STATEMENT.format(r=err, n=len(grid)),
                            fit_count)


def solve_laplace_dirichlet(prob: LaplaceProblem) -> tuple[Solution, ConvergenceReport]:
    """Adaptive Dirichlet solve; returns the best solution and the convergence history."""
    report = ConvergenceReport()
    best = None
    step = 0
    while True:
        step += 1
        params, spec = _laplace_step(prob, step)
        if spec.dof > prob.max_dof:
            if best is None:
                raise ValueError(f"max_dof={prob.max_dof} is below the first basis size "
                                 f"{spec.dof}")
            break
        t0 = time.perf_counter()
        sol, fit_sup, fit_count = _solve_laplace_basis(prob, params, spec)
        cert = _laplace_certificate(prob, sol, params, prob.validation_refinement, fit_count)
        elapsed = time.perf_counter() - t0
        report.steps.append(Step(spec.dof, fit_sup, cert.boundary_sup_residual, elapsed))
        log.info("laplace step %d: N=%d fit=%.3e validation=%.3e (%.2fs)", step, spec.dof,
                 fit_sup, cert.boundary_sup_residual, elapsed)
        if best is None or cert.boundary_sup_residual < best[0].certificate.boundary_sup_residual:
            sol.certificate = cert
            best = (sol, params)
        if cert.boundary_sup_residual <= prob.tolerance:
            report.converged = True
            break
    sol = best[0]
    report.final_certificate = sol.certificate
    return sol, report


# -------------------------------------------------------------- Helmholtz

def _multipole_cap(kr: float, limit: float = 1e150) -> int:
    """Largest order whose Hankel function at ``kr`` stays below ``limit``.

    Y_n grows factorially in n at fixed argument; beyond this order the
    multipole columns overflow on the boundary point nearest the center.
    """
    n = 16
    while n < MAX_ORDER:
        with np.errstate(over="ignore", invalid="ignore"):
            mag = np.abs(hankel1_orders(n, kr))
        bad = ~(mag < limit)
        if bad.any():
            return max(int(np.argmax(bad)) - 1, 0)
        n *= 2
    return MAX_ORDER


def _helmholtz_step(prob: HelmholtzProblem, step: int):
    sched = prob.schedule
    poly = prob.scatterer
    center = _center(poly, prob.center)
    params = ClusteringParams(prob.sigma, sched.per_corner(step), prob.oversample,
                              prob.weighting)
    charges = place_poles(poly, params, INTERIOR)
    degree = sched.multipole_degree(step, prob.k * poly.circumradius(center))
    rmin = float(np.min(boundary_distance(poly, np.array([center]))))
    degree = min(degree, _multipole_cap(prob.k * rmin))
    spec = BasisSpec(HELMHOLTZ, charges, degree, center, prob.k, polygon=poly)
    return params, spec


def _helmholtz_certificate(prob: HelmholtzProblem, sol: Solution, params: ClusteringParams,
                           refinement: int, fit_count: int = 0) -> ErrorCertificate:
    grid = validation_samples(prob.scatterer, params, sol.spec.dof, refinement)
    total = (eval_helmholtz(sol, grid.points, check_domain=False)
             + prob.incident(prob.k, grid.points))
    err = float(np.max(np.abs(total)))
    return ErrorCertificate(err, len(grid), HELMHOLTZ_STATEMENT.format(r=err, n=len(grid)),
                            fit_count)


def solve_helmholtz_soundsoft(prob: HelmholtzProblem) -> tuple[Solution, ConvergenceReport]:
    """Adaptive sound-soft scattering solve (total field zero on the scatterer)."""
    report = ConvergenceReport()
    best = None
    step = 0
    while True:
        step += 1
        params, spec = _helmholtz_step(prob, step)
        if spec.dof > prob.max_dof:
            if best is None:
                raise ValueError(f"max_dof={prob.max_dof} is below the first basis size "
                                 f"{spec.dof}")
            break
        t0 = time.perf_counter()
        samples = place_samples(prob.scatterer, spec.poleset, spec.dof, params)
        rhs = -prob.incident(prob.k, samples.points) * samples.weights
        ls = LsProblem(helmholtz_matrix(samples, spec), rhs)
        coef, _ = solve_ls(ls)
        fit_sup = residual_sup(ls, coef, samples.weights)
        sol = Solution(spec, coef)
        cert = _helmholtz_certificate(prob, sol, params, prob.validation_refinement,
                                      len(samples))
        elapsed = time.perf_counter() - t0
        report.steps.append(Step(spec.dof, fit_sup, cert.boundary_sup_residual, elapsed))
        log.info("helmholtz step %d: N=%d fit=%.3e validation=%.3e (%.2fs)", step, spec.dof,
                 fit_sup, cert.boundary_sup_residual, elapsed)
        if best is None or cert.boundary_sup_residual < best[0].certificate.boundary_sup_residual:
            sol.certificate = cert
            best = (sol, params)
        if cert.boundary_sup_residual <= prob.tolerance:
            report.converged = True
            break
    sol = best[0]
    report.final_certificate = sol.certificate
    return sol, report


def certify(sol: Solution, prob: Union[LaplaceProblem, HelmholtzProblem],
            refinement: int = 4) -> ErrorCertificate:
    """Recompute the boundary residual on a grid ``refinement`` times denser than the fit."""
    if refinement < 4:
        raise ValueError("refinement must be at least 4")
    params = ClusteringParams(prob.sigma, _step_per_corner(prob, sol.spec), prob.oversample,
                              prob.weighting)
    if isinstance(prob, LaplaceProblem):
        return _laplace_certificate(prob, sol, params, refinement)
    return _helmholtz_certificate(prob, sol, params, refinement)


def _step_per_corner(prob, spec: BasisSpec) -> int:
    """Per-corner count the basis was built with (discarded poles included)."""
    n_corners = (prob.polygon if isinstance(prob, LaplaceProblem) else prob.scatterer).n
    return (spec.n_poles + spec.poleset.discarded) // n_corners
