"""Expansion bases, design matrices and evaluation of fitted expansions.

Laplace.  ``u(z) = Re r(z)`` with

    r(z) = sum_j a_j / (z - z_j) + sum_{j=0}^{N2} b_j (z - c)^j,

unknowns are the real and imaginary parts of ``a_j`` and ``b_j`` with ``b_0``
real, so a basis with ``N1`` poles has ``2*N1 + 2*N2 + 1`` real columns laid
out as::

    Re w_1, Im w_1, ..., Re w_N1, Im w_N1, 1, Re p_1, Im p_1, ..., Re p_N2, Im p_N2

where ``w_j = 1/(z - z_j)`` and ``p_j = (z - c)^j``.  A column pair
``(Re w, Im w)`` with real coefficients ``(s, t)`` encodes ``Re(a w)`` for
``a = s - i t``.

Helmholtz.  The scattered field is a complex combination of monopoles
``H_0(k|z - z_j|)``, dipoles ``H_1(k|z - z_j|) (z - z_j)/|z - z_j|`` and
multipoles ``H_|m|(k|z - c|) ((z - c)/|z - c|)^m`` for ``m = -N2..N2``, in that
column order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import INSIDE, Polygon, classify
from .placement import PoleSet, SampleSet
from .specfun import hankel1_01, hankel1_orders

LAPLACE = "laplace"
HELMHOLTZ = "helmholtz"

_CHUNK = 2048


class OutsideDomainWarning(UserWarning):
    """Evaluation requested at points where the boundary value problem is not posed."""


@dataclass(frozen=True, eq=False)
class BasisSpec:
    kind: str
    poleset: PoleSet
    degree: int
    center: complex
    wavenumber: Optional[float] = None
    polygon: Optional[Polygon] = None

    def __post_init__(self):
        if self.kind not in (LAPLACE, HELMHOLTZ):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.degree < 0:
            raise ValueError("polynomial degree must be nonnegative")
        object.__setattr__(self, "center", complex(self.center))
        if self.kind == HELMHOLTZ:
            if self.wavenumber is None or not self.wavenumber > 0:
                raise ValueError("helmholtz basis needs a positive wavenumber")
        if self.polygon is not None and classify(self.polygon, self.center) != INSIDE:
            where = "domain" if self.kind == LAPLACE else "scatterer"
            raise ValueError(f"expansion center {self.center} is not inside the {where}")

    @property
    def n_poles(self) -> int:
        return len(self.poleset)

    @property
    def multipole_orders(self) -> range:
        return range(-self.degree, self.degree + 1)

    @property
    def dof(self) -> int:
        """Number of columns: real unknowns for Laplace, complex ones for Helmholtz."""
        return 2 * self.n_poles + 2 * self.degree + 1

    def translated(self, t: complex) -> "BasisSpec":
        poly = self.polygon.translated(t) if self.polygon is not None else None
        return BasisSpec(self.kind, self.poleset.translated(t), self.degree,
                         self.center + t, self.wavenumber, poly)


@dataclass(frozen=True)
class ErrorCertificate:
    boundary_sup_residual: float
    validation_point_count: int
    statement: str = ""
    fit_point_count: int = 0

    def __post_init__(self):
        if not self.boundary_sup_residual >= 0:
            raise ValueError("certificate must be nonnegative")
        if self.fit_point_count and self.validation_point_count <= self.fit_point_count:
            raise ValueError("validation grid must be denser than the fit grid")


@dataclass(eq=False)
class Solution:
    spec: BasisSpec
    coefficients: np.ndarray
    certificate: Optional[ErrorCertificate] = field(default=None)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients)
        if self.coefficients.shape != (self.spec.dof,):
            raise ValueError(f"expected {self.spec.dof} coefficients, "
                             f"got {self.coefficients.shape}")

    def __call__(self, pts):
        if self.spec.kind == LAPLACE:
            return eval_laplace(self, pts)
        return eval_helmholtz(self, pts)


# ---------------------------------------------------------------- Laplace

def _check_poles(z: np.ndarray, poles: np.ndarray, what: str):
    if poles.size and np.any(z.ravel()[:, None] == poles[None, :]):
        raise ValueError(f"{what} coincides with a singularity of the basis")


def laplace_columns(spec: BasisSpec, z) -> np.ndarray:
    """Unweighted real Laplace columns at the points ``z`` (shape ``(len(z), dof)``)."""
    z = np.asarray(z, dtype=complex).ravel()
    poles = spec.poleset.poles
    _check_poles(z, poles, "a sample point")
    cols = np.empty((z.size, spec.dof))
    n1 = len(poles)
    if n1:
        w = 1.0 / (z[:, None] - poles[None, :])
        cols[:, 0:2 * n1:2] = w.real
        cols[:, 1:2 * n1:2] = w.imag
    cols[:, 2 * n1] = 1.0
    if spec.degree:
        p = np.cumprod(np.broadcast_to((z - spec.center)[:, None], (z.size, spec.degree)), axis=1)
        cols[:, 2 * n1 + 1::2] = p.real
        cols[:, 2 * n1 + 2::2] = p.imag
    return cols


def laplace_matrix(samples: SampleSet, spec: BasisSpec) -> np.ndarray:
    if spec.kind != LAPLACE:
        raise ValueError("laplace_matrix needs a laplace basis")
    return laplace_columns(spec, samples.points) * samples.weights[:, None]


def laplace_complex_coefficients(sol: Solution) -> tuple[np.ndarray, np.ndarray]:
    """Residues ``a_j`` and polynomial coefficients ``b_0..b_N2`` from the real vector."""
    c = sol.coefficients
    n1 = sol.spec.n_poles
    a = c[0:2 * n1:2] - 1j * c[1:2 * n1:2]
    b = np.empty(sol.spec.degree + 1, dtype=complex)
    b[0] = c[2 * n1]
    b[1:] = c[2 * n1 + 1::2] - 1j * c[2 * n1 + 2::2]
    return a, b


def laplace_coefficients_from_complex(spec: BasisSpec, a, b) -> np.ndarray:
    """Inverse of :func:`laplace_complex_coefficients`; ``Im b_0`` is discarded."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n1 = spec.n_poles
    c = np.empty(spec.dof)
    c[0:2 * n1:2] = a.real
    c[1:2 * n1:2] = -a.imag
    c[2 * n1] = b[0].real
    c[2 * n1 + 1::2] = b[1:].real
    c[2 * n1 + 2::2] = -b[1:].imag
    return c


def _warn_outside(spec: BasisSpec, z: np.ndarray, wanted: int):
    if spec.polygon is None or z.size == 0:
        return
    codes = classify(spec.polygon, z)
    bad = (codes != wanted) & (codes != 2)
    if bad.any():
        warnings.warn(f"{int(bad.sum())} evaluation points lie outside the problem domain",
                      OutsideDomainWarning, stacklevel=3)


def eval_laplace(sol: Solution, pts, *, check_domain: bool = True) -> np.ndarray:
    """``u = Re r`` at the given points."""
    spec = sol.spec
    if spec.kind != LAPLACE:
        raise ValueError("eval_laplace needs a laplace solution")
    z = np.asarray(pts, dtype=complex)
    shape = z.shape
    z = z.ravel()
    if check_domain:
        _warn_outside(spec, z, INSIDE)
    a, b = laplace_complex_coefficients(sol)
    poles = spec.poleset.poles
    _check_poles(z, poles, "an evaluation point")
    out = np.empty(z.size)
    for s in range(0, z.size, _CHUNK):
        zz = z[s:s + _CHUNK]
        r = np.zeros(zz.size, dtype=complex)
        if poles.size:
            r = (1.0 / (zz[:, None] - poles[None, :])) @ a
        dz = zz - spec.center
        poly = np.full(zz.size, b[-1])
        for coef in b[-2::-1]:
            poly = poly * dz + coef
        out[s:s + _CHUNK] = (r + poly).real
    return out.reshape(shape)


# -------------------------------------------------------------- Helmholtz

def helmholtz_columns(spec: BasisSpec, z) -> np.ndarray:
    """Unweighted complex Helmholtz columns at the points ``z``."""
    z = np.asarray(z, dtype=complex).ravel()
    charges = spec.poleset.poles
    _check_poles(z, charges, "a sample point")
    if np.any(z == spec.center):
        raise ValueError("a sample point coincides with the multipole center")
    k = spec.wavenumber
    n1 = len(charges)
    cols = np.empty((z.size, spec.dof), dtype=complex)
    if n1:
        d = z[:, None] - charges[None, :]
        r = np.abs(d)
        h0, h1 = hankel1_01(k * r)
        cols[:, :n1] = h0
        cols[:, n1:2 * n1] = h1 * (d / r)
    d = z - spec.center
    rho = np.abs(d)
    e = d / rho
    h = hankel1_orders(spec.degree, k * rho)
    for col, m in enumerate(spec.multipole_orders, start=2 * n1):
        cols[:, col] = h[abs(m)] * e ** m
    return cols


def helmholtz_matrix(samples: SampleSet, spec: BasisSpec) -> np.ndarray:
    if spec.kind != HELMHOLTZ:
        raise ValueError("helmholtz_matrix needs a helmholtz basis")
    return helmholtz_columns(spec, samples.points) * samples.weights[:, None]


def eval_helmholtz(sol: Solution, pts, *, check_domain: bool = True) -> np.ndarray:
    """Scattered field at the given points (add the incident field for the total)."""
    spec = sol.spec
    if spec.kind != HELMHOLTZ:
        raise ValueError("eval_helmholtz needs a helmholtz solution")
    z = np.asarray(pts, dtype=complex)
    shape = z.shape
    z = z.ravel()
    if check_domain:
        _warn_outside(spec, z, 0)
    out = np.empty(z.size, dtype=complex)
    for s in range(0, z.size, _CHUNK):
        out[s:s + _CHUNK] = helmholtz_columns(spec, z[s:s + _CHUNK]) @ sol.coefficients
    return out.reshape(shape)


# --------------------------------------------------------------- incident

@dataclass(frozen=True)
class PlaneWave:
    """``amplitude * exp(ik(x cos(angle) + y sin(angle)))``, angle in radians."""

    angle: float
    amplitude: complex = 1.0

    @classmethod
    def from_degrees(cls, degrees: float, amplitude: complex = 1.0) -> "PlaneWave":
        return cls(np.deg2rad(degrees), amplitude)

    def __call__(self, k: float, pts) -> np.ndarray:
        z = np.asarray(pts, dtype=complex)
        phase = k * (z.real * np.cos(self.angle) + z.imag * np.sin(self.angle))
        return self.amplitude * np.exp(1j * phase)


@dataclass(frozen=True)
class PointSource:
    """``amplitude * H_0(k|z - z0|)``."""

    z0: complex
    amplitude: complex = 1.0

    def __call__(self, k: float, pts) -> np.ndarray:
        z = np.asarray(pts, dtype=complex)
        r = np.abs(z - self.z0)
        if np.any(r == 0):
            raise ValueError("incident field evaluated at the point source")
        h0, _ = hankel1_01(k * r)
        return self.amplitude * h0


def incident_field(kind, k: float, pts) -> np.ndarray:
    if not k > 0:
        raise ValueError("wavenumber must be positive")
    return kind(k, pts)
