"""Normalized actuator model: parameters, energies, forces, first integral.

A movable electrode of unit normalized travel faces a fixed electrode whose
dielectric coating shifts the electrostatic singularity to x = xi + 1.
Physical contact occurs at x = 1; all model functions are defined on
[0, xi + 1) and callers enforce the contact boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvexityError, InvalidParameterError, SingularityError

VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m

# Initial states with x in [-NEGATIVE_X_CLAMP, 0) are snapped to 0; anywhere
# else a negative displacement is treated as an integrator bug, not noise.
NEGATIVE_X_CLAMP = 1e-12


def convexity_bound(xi: float) -> float:
    """Supremum of cubic stiffness values keeping the first-integral residual strictly convex."""
    return 16.0 / (3.0 * (xi + 1.0) ** 2)


@dataclass(frozen=True)
class PhysicalParams:
    """Device parameters in SI units.

    Attributes
    ----------
    m : electrode mass (kg)
    k : linear spring constant (N/m)
    area : electrode area (m^2)
    gap : initial gap between electrode and dielectric surface (m)
    voltage : applied step voltage (V)
    k3 : cubic spring constant (N/m^3)
    d0 : dielectric coating thickness (m)
    eps_r : relative permittivity of the coating
    eps0 : vacuum permittivity (F/m)
    """

    m: float
    k: float
    area: float
    gap: float
    voltage: float
    k3: float = 0.0
    d0: float = 0.0
    eps_r: float = 1.0
    eps0: float = VACUUM_PERMITTIVITY

    def __post_init__(self) -> None:
        for name in ("m", "k", "area", "gap", "eps0"):
            if not getattr(self, name) > 0.0:
                raise InvalidParameterError(f"{name} must be strictly positive")
        for name in ("voltage", "k3", "d0"):
            if getattr(self, name) < 0.0:
                raise InvalidParameterError(f"{name} must be nonnegative")
        if self.eps_r < 1.0:
            raise InvalidParameterError("eps_r must be >= 1")


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless actuator parameters.

    xi is the effective insulator thickness d0/(gap*eps_r), v the normalized
    voltage, kappa the normalized cubic stiffness and mu an optional linear
    damping coefficient (0 for the conservative model).
    """

    xi: float = 0.0
    v: float = 0.0
    kappa: float = 0.0
    mu: float = 0.0

    def __post_init__(self) -> None:
        for name in ("xi", "v", "kappa", "mu"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val >= 0.0):
                raise InvalidParameterError(f"{name} must be finite and nonnegative")

    @property
    def x_singular(self) -> float:
        """Location of the electrostatic singularity."""
        return self.xi + 1.0

    def require_convex(self) -> None:
        """Raise unless kappa satisfies the strict convexity condition."""
        bound = convexity_bound(self.xi)
        if self.kappa >= bound:
            raise ConvexityError(
                f"kappa={self.kappa} violates kappa < 16/(3(xi+1)^2) = {bound}"
            )


@dataclass(frozen=True)
class PhaseState:
    """One point (t, x, v) of the normalized motion.

    Admissible displacements satisfy 0 <= x <= 1. A displacement above 1 is a
    hard error; a negative one within the clamp band is snapped to 0 here and
    only here.
    """

    t: float
    x: float
    v: float

    def __post_init__(self) -> None:
        if self.x > 1.0:
            raise InvalidParameterError(f"displacement x={self.x} beyond contact surface x=1")
        if self.x < 0.0:
            if self.x < -NEGATIVE_X_CLAMP:
                raise InvalidParameterError(f"displacement x={self.x} below 0")
            object.__setattr__(self, "x", 0.0)


@dataclass(frozen=True)
class ElasticPotential:
    """Normalized elastic potential density Phi with its derivative.

    Phi(0) = 0 and Phi >= 0 on the travel range.
    """

    phi: Callable[[float], float]
    phi_prime: Callable[[float], float]

    def __post_init__(self) -> None:
        if abs(self.phi(0.0)) > 0.0:
            raise InvalidParameterError("elastic potential must vanish at x=0")

    @classmethod
    def linear(cls) -> "ElasticPotential":
        return cls(phi=lambda x: 0.5 * x * x, phi_prime=lambda x: x)

    @classmethod
    def cubic(cls, kappa: float) -> "ElasticPotential":
        if kappa < 0.0:
            raise InvalidParameterError("kappa must be nonnegative")
        return cls(
            phi=lambda x: 0.5 * x * x + 0.25 * kappa * x**4,
            phi_prime=lambda x: x + kappa * x**3,
        )


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of a convexity diagnostic (never raised as an error)."""

    ok: bool
    margin: float
    bound: float | None
    method: str


def normalize_physical(p: PhysicalParams) -> ModelParams:
    """Convert SI device parameters to the dimensionless parameter set.

    Displacement is scaled by the gap, time by sqrt(k/m), and the voltage
    enters through v^2 = eps0*area*voltage^2 / (k*gap^3).
    """
    xi = p.d0 / (p.gap * p.eps_r)
    v = math.sqrt(p.eps0 * p.area * p.voltage**2 / (p.k * p.gap**3))
    kappa = p.k3 * p.gap**2 / p.k
    return ModelParams(xi=xi, v=v, kappa=kappa, mu=0.0)


def _check_domain(x: float, m: ModelParams) -> None:
    if x >= m.x_singular:
        raise SingularityError(f"x={x} at or beyond singularity x=xi+1={m.x_singular}")


def hamiltonian(s: PhaseState, m: ModelParams) -> float:
    """Total normalized energy of a phase state."""
    _check_domain(s.x, m)
    x = s.x
    return (
        0.5 * s.v * s.v
        + 0.5 * x * x
        + 0.25 * m.kappa * x**4
        - 0.5 * m.v * m.v / (m.x_singular - x)
    )


def force(x: float, m: ModelParams) -> float:
    """Normalized acceleration -x - kappa x^3 + v^2 / (2 (xi+1-x)^2)."""
    _check_domain(x, m)
    return -x - m.kappa * x**3 + 0.5 * m.v * m.v / (m.x_singular - x) ** 2


def make_force(m: ModelParams) -> Callable[[float], float]:
    """Return a fast scalar force closure for integrator hot loops.

    Same expression as :func:`force`; the singularity guard is kept, the
    dataclass attribute lookups are not.
    """
    xs = m.x_singular
    kappa = m.kappa
    v2h = 0.5 * m.v * m.v

    def f(x: float) -> float:
        if x >= xs:
            raise SingularityError(f"x={x} at or beyond singularity x=xi+1={xs}")
        return -x - kappa * x**3 + v2h / (xs - x) ** 2

    return f


def first_integral_rhs(x, m: ModelParams):
    """Squared velocity as a function of displacement for rest-start motion.

    Energy conservation from the rest initial state gives
    v^2 = (x/(xi+1-x)) * (v^2_applied/(xi+1) - (xi+1-x)x - (kappa/2)(xi+1-x)x^3).
    Accepts a scalar or an ndarray of displacements in [0, xi+1).
    """
    xs = m.x_singular
    if np.any(np.asarray(x) >= xs):
        raise SingularityError(f"x at or beyond singularity x=xi+1={xs}")
    rem = xs - x
    g = m.v * m.v / xs - rem * x - 0.5 * m.kappa * rem * x**3
    return x / rem * g


# Psi-grid convexity check parameters: dense uniform sampling with a strictly
# positive threshold on second divided differences.
_PSI_GRID_POINTS = 10_001
_PSI_EDGE = 1e-9
_PSI_THRESHOLD = 1e-12


def check_convexity(
    params_or_potential: ModelParams | ElasticPotential,
    xi: float | None = None,
    v: float = 0.0,
) -> ConvexityReport:
    """Diagnose strict convexity of the first-integral residual.

    For cubic parameters the closed-form criterion kappa < 16/(3(xi+1)^2) is
    used and the margin is the distance to the bound. For a general elastic
    potential, Psi(x) = v^2/(xi+1) - 2(xi+1-x)Phi(x)/x is sampled on a dense
    grid of (0, xi+1) and the report passes iff all second divided differences
    exceed a strictly positive threshold; the margin is their minimum. The
    curvature of Psi does not depend on v (it only shifts Psi), so v may be
    left at 0.
    """
    if isinstance(params_or_potential, ModelParams):
        m = params_or_potential
        bound = convexity_bound(m.xi)
        margin = bound - m.kappa
        return ConvexityReport(ok=margin > 0.0, margin=margin, bound=bound, method="closed-form")

    pot = params_or_potential
    if xi is None:
        raise InvalidParameterError("xi is required for a general-potential convexity check")
    xs = xi + 1.0
    grid = np.linspace(_PSI_EDGE, xs - _PSI_EDGE, _PSI_GRID_POINTS)
    phi_vals = np.array([pot.phi(float(x)) for x in grid])
    psi = v * v / xs - 2.0 * (xs - grid) * phi_vals / grid
    h = grid[1] - grid[0]
    second = (psi[2:] - 2.0 * psi[1:-1] + psi[:-2]) / (2.0 * h * h)
    margin = float(second.min())
    return ConvexityReport(ok=margin > _PSI_THRESHOLD, margin=margin, bound=None, method="grid")
