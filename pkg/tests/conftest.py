from contextlib import contextmanager

import numpy as np
import pytest

from lightning_pde.geometry import make_polygon
from lightning_pde.solver import LaplaceProblem, solve_laplace_dirichlet

L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


@pytest.fixture(scope="session")
def lshape():
    return make_polygon(L_SHAPE)


@pytest.fixture(scope="session")
def square():
    return make_polygon(UNIT_SQUARE)


@pytest.fixture(scope="session")
def lshape_run(lshape):
    """The L-shape challenge (h = x^2, tolerance 1e-10), solved once per session."""
    import time
    prob = LaplaceProblem(lshape, lambda x, y: x**2, tolerance=1e-10, max_dof=1200)
    t0 = time.perf_counter()
    sol, report = solve_laplace_dirichlet(prob)
    return prob, sol, report, time.perf_counter() - t0


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_interior_points(poly, count, rng):
    from lightning_pde.geometry import INSIDE, classify
    xmin, xmax, ymin, ymax = poly.bounding_box
    out = []
    while len(out) < count:
        z = rng.uniform(xmin, xmax, 4 * count) + 1j * rng.uniform(ymin, ymax, 4 * count)
        out.extend(z[classify(poly, z) == INSIDE])
    return np.array(out[:count])


# ------------------------------------------------------- acceptance summary

ACCEPTANCE: dict = {}


@contextmanager
def criterion(name: str, description: str):
    """Record the outcome of an acceptance criterion for the end-of-run summary."""
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE[name] = ("FAIL", f"{description} ({type(exc).__name__}: {exc})".strip())
        raise
    ACCEPTANCE[name] = ("PASS", description)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: (int(k[1:].split("-")[0]), k)):
        status, text = ACCEPTANCE[name]
        terminalreporter.write_line(f"{name}: {status} - {text.splitlines()[0]}")
