import math

import numpy as np
import pytest

from conftest import random_interior_points
from lightning_pde.basis import PlaneWave, PointSource, eval_helmholtz, eval_laplace
from lightning_pde.geometry import make_polygon
from lightning_pde.placement import random_boundary_points
from lightning_pde.solver import (HelmholtzProblem, LaplaceProblem, Schedule, certify,
                                  solve_helmholtz_soundsoft, solve_laplace_dirichlet)

EXACT = 1.02679192610


def test_schedule_rule():
    s = Schedule()
    assert [s.per_corner(i) for i in (1, 2, 3)] == [3, 6, 9]
    # N2(s) = 2s + ceil(s/2)
    assert [s.degree(i) for i in range(1, 9)] == [2 * i + math.ceil(i / 2) for i in range(1, 9)]
    assert s.multipole_degree(2, 70.7) == 71 + 8


def test_first_step_near_fifty_on_hexagon(lshape):
    prob = LaplaceProblem(lshape, lambda x, y: x**2, tolerance=1.0)
    sol, report = solve_laplace_dirichlet(prob)
    assert report.steps[0].N == 2 * 3 * 6 + 2 * 3 + 1 == 43


def test_constant_data_converges_immediately(lshape):
    sol, report = solve_laplace_dirichlet(LaplaceProblem(lshape, lambda x, y: 7 + 0 * x))
    assert report.converged and len(report.steps) == 1
    assert report.steps[0].validation_residual_sup <= 1e-13
    z = np.array([0.5 + 0.5j, 1.5 + 0.2j, 0.2 + 1.9j])
    assert np.allclose(sol(z), 7, rtol=0, atol=1e-13)


def test_harmonic_polynomial_on_square(square, rng):
    prob = LaplaceProblem(square, lambda x, y: x**2 - y**2, tolerance=1e-12)
    sol, report = solve_laplace_dirichlet(prob)
    assert report.converged and len(report.steps) == 1     # N2 = 3 already at step 1
    z = random_interior_points(square, 50, rng)
    assert np.allclose(sol(z), z.real**2 - z.imag**2, rtol=0, atol=1e-11)
    assert certify(sol, prob).boundary_sup_residual <= 1e-12


def test_report_structure(lshape_run):
    _, sol, report, _ = lshape_run
    n = report.dofs
    assert np.all(np.diff(n) > 0)
    assert n[-1] <= 1200
    assert report.final_certificate is sol.certificate
    best = report.residuals.min()
    assert sol.certificate.boundary_sup_residual == best
    for s in report.steps:
        assert s.fit_residual_sup >= 0 and s.elapsed_seconds > 0


def test_lshape_value_within_certificate(lshape_run):
    _, sol, report, _ = lshape_run
    err = abs(sol(0.99 + 0.99j) - EXACT)
    assert err <= 5e-9
    assert err <= report.final_certificate.boundary_sup_residual + 5e-12


def test_lshape_refinement_is_nearly_monotone(lshape_run):
    _, _, report, _ = lshape_run
    r = report.residuals
    jumps = np.sum(r[1:] > 2 * r[:-1])
    assert jumps <= 1


def test_certificate_against_monte_carlo_boundary_sup(lshape):
    prob = LaplaceProblem(lshape, lambda x, y: x**2, tolerance=1e-5)
    sol, report = solve_laplace_dirichlet(prob)
    z = random_boundary_points(lshape, 100_000, np.random.default_rng(5))
    mc = np.max(np.abs(eval_laplace(sol, z, check_domain=False) - z.real**2))
    cert = report.final_certificate.boundary_sup_residual
    assert 0.5 * mc <= cert <= 2 * mc


def test_certify_recomputes_on_a_denser_grid(lshape):
    prob = LaplaceProblem(lshape, lambda x, y: x**2, tolerance=1e-4)
    sol, report = solve_laplace_dirichlet(prob)
    c4 = certify(sol, prob)
    c8 = certify(sol, prob, refinement=8)
    assert c4.boundary_sup_residual == pytest.approx(sol.certificate.boundary_sup_residual)
    assert c8.validation_point_count > c4.validation_point_count
    assert c8.boundary_sup_residual == pytest.approx(c4.boundary_sup_residual, rel=0.5)
    assert "maximum principle" in c4.statement
    with pytest.raises(ValueError):
        certify(sol, prob, refinement=2)


def test_non_convergence_returns_best(lshape):
    prob = LaplaceProblem(lshape, lambda x, y: x**2, tolerance=1e-14, max_dof=200)
    sol, report = solve_laplace_dirichlet(prob)
    assert not report.converged
    assert sol.spec.dof <= 200
    assert sol.certificate.boundary_sup_residual == report.residuals.min()


def test_determinism(lshape):
    prob = LaplaceProblem(lshape, lambda x, y: np.sin(x) * np.exp(y), tolerance=1e-6)
    a = solve_laplace_dirichlet(prob)
    b = solve_laplace_dirichlet(prob)
    assert [(s.N, s.fit_residual_sup, s.validation_residual_sup) for s in a[1].steps] == \
           [(s.N, s.fit_residual_sup, s.validation_residual_sup) for s in b[1].steps]
    assert np.array_equal(a[0].coefficients, b[0].coefficients)


def test_laplace_errors(lshape):
    with pytest.raises(ValueError, match="tolerance"):
        LaplaceProblem(lshape, lambda x, y: x, tolerance=0)
    with pytest.raises(ValueError, match="max_dof"):
        solve_laplace_dirichlet(LaplaceProblem(lshape, lambda x, y: x, max_dof=10))
    with pytest.raises(ValueError, match="boundary data"), np.errstate(invalid="ignore"):
        solve_laplace_dirichlet(LaplaceProblem(lshape, lambda x, y: np.log(x - 5)))

    def broken(x, y):
        raise RuntimeError("no")
    with pytest.raises(ValueError, match="boundary data"):
        solve_laplace_dirichlet(LaplaceProblem(lshape, broken))


def test_custom_center(lshape):
    prob = LaplaceProblem(lshape, lambda x, y: x * y, tolerance=1e-6, center=0.5 + 0.5j)
    sol, report = solve_laplace_dirichlet(prob)
    assert sol.spec.center == 0.5 + 0.5j
    assert report.converged
    prob.center = 1.5 + 1.5j
    with pytest.raises(ValueError, match="not inside"):
        solve_laplace_dirichlet(prob)


# -------------------------------------------------------------- Helmholtz

SQUARE2 = make_polygon([-1 - 1j, 1 - 1j, 1 + 1j, -1 + 1j])


def test_zero_incident_gives_zero_solution():
    prob = HelmholtzProblem(SQUARE2, PlaneWave(0.3, amplitude=0.0), k=5.0)
    sol, report = solve_helmholtz_soundsoft(prob)
    assert report.converged and len(report.steps) == 1
    assert report.steps[0].validation_residual_sup == 0.0
    assert np.all(sol.coefficients == 0)


def test_low_frequency_plane_wave():
    prob = HelmholtzProblem(SQUARE2, PlaneWave.from_degrees(30), k=3.0, tolerance=1e-7)
    sol, report = solve_helmholtz_soundsoft(prob)
    assert report.converged
    # total field vanishes on the boundary, checked at fresh random points
    z = random_boundary_points(SQUARE2, 5000, np.random.default_rng(1))
    total = eval_helmholtz(sol, z, check_domain=False) + prob.incident(prob.k, z)
    assert np.max(np.abs(total)) <= 2e-7
    assert "no interior bound" in report.final_certificate.statement


def test_scattered_field_is_outgoing():
    prob = HelmholtzProblem(SQUARE2, PlaneWave(0.0), k=2.0, tolerance=1e-6)
    sol, _ = solve_helmholtz_soundsoft(prob)
    # far field decays like r^(-1/2)
    r1, r2 = 40.0, 160.0
    theta = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    a1 = np.abs(sol(r1 * np.exp(1j * theta))).max()
    a2 = np.abs(sol(r2 * np.exp(1j * theta))).max()
    assert a2 / a1 == pytest.approx(math.sqrt(r1 / r2), rel=0.05)


def test_helmholtz_errors():
    with pytest.raises(ValueError, match="wavenumber"):
        HelmholtzProblem(SQUARE2, PlaneWave(0.0), k=0.0)
    with pytest.raises(ValueError, match="inside"):
        HelmholtzProblem(SQUARE2, PointSource(0.2j), k=1.0)
    with pytest.raises(ValueError, match="boundary"):
        HelmholtzProblem(SQUARE2, PointSource(0.5 + 1j), k=1.0)


@pytest.mark.parametrize("kr", [0.5, 3.0, 50.0])
def test_multipole_cap_keeps_columns_finite(kr):
    from lightning_pde.solver import _multipole_cap
    from lightning_pde.specfun import hankel1_orders
    n = _multipole_cap(kr)
    with np.errstate(over="ignore", invalid="ignore"):
        h = np.abs(hankel1_orders(n + 1, kr))
    assert np.all(h[: n + 1] < 1e150)
    assert not h[n + 1] < 1e150
