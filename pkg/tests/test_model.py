import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pullin_dyn import (
    ConvexityReport,
    ElasticPotential,
    InvalidParameterError,
    ModelParams,
    PhaseState,
    PhysicalParams,
    SingularityError,
    check_convexity,
    convexity_bound,
    first_integral_rhs,
    force,
    hamiltonian,
    normalize_physical,
)
from pullin_dyn.model import make_force


def test_normalize_physical_worked_example():
    p = PhysicalParams(
        m=1e-9, k=1.0, area=1e-8, gap=1e-6, voltage=2.0,
        k3=1e11, d0=1e-7, eps_r=2.0, eps0=8.854e-12,
    )
    m = normalize_physical(p)
    assert m.xi == pytest.approx(0.05, abs=1e-15)
    assert m.v == pytest.approx(0.59511343456520959, rel=1e-12)
    assert m.kappa == pytest.approx(0.1, rel=1e-12)
    assert m.mu == 0.0


def test_normalize_zero_voltage_and_uncoated():
    p = PhysicalParams(m=1.0, k=2.0, area=1e-6, gap=1e-5, voltage=0.0)
    m = normalize_physical(p)
    assert m.v == 0.0
    assert m.xi == 0.0  # d0 = 0


def test_normalize_rejects_nonpositive_core_parameters():
    with pytest.raises(InvalidParameterError):
        PhysicalParams(m=0.0, k=1.0, area=1.0, gap=1.0, voltage=1.0)
    with pytest.raises(InvalidParameterError):
        PhysicalParams(m=1.0, k=-1.0, area=1.0, gap=1.0, voltage=1.0)
    with pytest.raises(InvalidParameterError):
        PhysicalParams(m=1.0, k=1.0, area=1.0, gap=1.0, voltage=1.0, eps_r=0.5)


@given(st.floats(1e-3, 1e3), st.floats(1e-6, 100.0))
@settings(max_examples=50, deadline=None)
def test_normalize_voltage_scaling(c, voltage):
    base = PhysicalParams(m=1.0, k=1.0, area=1e-6, gap=1e-4, voltage=voltage)
    scaled = PhysicalParams(m=1.0, k=1.0, area=1e-6, gap=1e-4, voltage=c * voltage)
    assert normalize_physical(scaled).v == pytest.approx(
        c * normalize_physical(base).v, rel=1e-12
    )
    zero = PhysicalParams(m=1.0, k=1.0, area=1e-6, gap=1e-4, voltage=0.0)
    assert normalize_physical(zero).v == 0.0


def test_hamiltonian_rest_values():
    rest = PhaseState(t=0.0, x=0.0, v=0.0)
    assert hamiltonian(rest, ModelParams(xi=0.0, v=0.5)) == pytest.approx(-0.125, abs=1e-16)
    assert hamiltonian(rest, ModelParams(xi=2.0, v=0.0)) == 0.0
    assert hamiltonian(rest, ModelParams(xi=1.0, v=1.0)) == pytest.approx(-0.25, abs=1e-16)


def test_force_values():
    assert force(0.0, ModelParams(xi=0.0, v=0.5)) == pytest.approx(0.125, abs=1e-16)
    assert force(0.0, ModelParams(xi=3.0, v=0.0)) == 0.0
    assert force(0.2, ModelParams(xi=0.0, v=0.4)) == pytest.approx(-0.075, abs=1e-15)


def test_force_and_hamiltonian_reject_singular_displacement():
    m = ModelParams(xi=0.5, v=0.3)
    with pytest.raises(SingularityError):
        force(1.5, m)
    with pytest.raises(SingularityError):
        hamiltonian(PhaseState(t=0.0, x=1.0, v=0.0), ModelParams(xi=0.0, v=0.3))
    with pytest.raises(SingularityError):
        first_integral_rhs(1.5, m)


def test_make_force_matches_force():
    m = ModelParams(xi=0.3, v=0.45, kappa=0.7)
    f = make_force(m)
    for x in np.linspace(0.0, 1.0, 17):
        assert f(float(x)) == force(float(x), m)


def test_first_integral_rhs_values():
    m = ModelParams(xi=0.0, v=0.4)
    assert first_integral_rhs(0.0, m) == 0.0
    # the stagnation position is a root
    assert first_integral_rhs(0.2, m) == pytest.approx(0.0, abs=1e-16)
    assert first_integral_rhs(0.1, m) == pytest.approx((0.1 / 0.9) * (0.16 - 0.09), rel=1e-14)


@given(
    st.floats(0.0, 3.0),
    st.floats(0.01, 0.99),
    st.floats(0.0, 1.0),
    st.floats(0.0, 0.95),
)
@settings(max_examples=100, deadline=None)
def test_first_integral_is_energy_identity(xi, xfrac, kappa, vfrac):
    # v^2(x) == -2 (H(x, 0) - H(0, 0)) pointwise, for any parameters
    v = vfrac * (xi + 1.0)
    m = ModelParams(xi=xi, v=v, kappa=kappa)
    x = xfrac * min(1.0, xi + 1.0 - 1e-9)
    lhs = first_integral_rhs(x, m)
    rhs = -2.0 * (
        hamiltonian(PhaseState(t=0.0, x=x, v=0.0), m)
        - hamiltonian(PhaseState(t=0.0, x=0.0, v=0.0), m)
    )
    assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-13)


@given(st.floats(0.0, 2.0), st.floats(0.01, 0.99), st.floats(0.01, 0.9))
@settings(max_examples=60, deadline=None)
def test_first_integral_kappa_zero_matches_linear_form(xi, xfrac, v):
    m = ModelParams(xi=xi, v=v, kappa=0.0)
    xs = xi + 1.0
    x = xfrac * min(1.0, xs - 1e-9)
    linear = v * v / xs * x / (xs - x) - x * x
    assert first_integral_rhs(x, m) == pytest.approx(linear, rel=1e-12, abs=1e-15)


def test_phase_state_bounds():
    with pytest.raises(InvalidParameterError):
        PhaseState(t=0.0, x=1.0 + 1e-9, v=0.0)
    with pytest.raises(InvalidParameterError):
        PhaseState(t=0.0, x=-1e-11, v=0.0)
    clamped = PhaseState(t=0.0, x=-1e-13, v=0.0)
    assert clamped.x == 0.0


def test_model_params_validation():
    with pytest.raises(InvalidParameterError):
        ModelParams(xi=-0.1)
    with pytest.raises(InvalidParameterError):
        ModelParams(v=-1.0)
    with pytest.raises(InvalidParameterError):
        ModelParams(mu=float("nan"))


def test_check_convexity_closed_form():
    rep = check_convexity(ModelParams(xi=0.0, kappa=0.0))
    assert rep.ok and rep.method == "closed-form"
    assert rep.margin == pytest.approx(16.0 / 3.0, rel=1e-15)
    assert not check_convexity(ModelParams(xi=0.0, kappa=5.4)).ok
    assert convexity_bound(0.0) == pytest.approx(16.0 / 3.0, rel=1e-15)


def test_check_convexity_grid_matches_closed_form():
    # quadratic elastic potential: residual is convex for any voltage
    rep = check_convexity(ElasticPotential.linear(), xi=0.0, v=0.4)
    assert isinstance(rep, ConvexityReport)
    assert rep.ok and rep.method == "grid"
    assert rep.margin == pytest.approx(1.0, rel=1e-6)  # half the curvature of Psi
    # cubic stiffness beyond the closed-form bound fails the grid check too
    bad = check_convexity(ElasticPotential.cubic(10.0), xi=0.0)
    assert not bad.ok
    good = check_convexity(ElasticPotential.cubic(1.0), xi=0.0)
    assert good.ok


def test_elastic_potential_constructors():
    lin = ElasticPotential.linear()
    assert lin.phi(0.5) == pytest.approx(0.125)
    cub = ElasticPotential.cubic(2.0)
    assert cub.phi(0.5) == pytest.approx(0.125 + 0.5 * 0.0625)
    assert cub.phi_prime(0.5) == pytest.approx(0.5 + 2.0 * 0.125)
    with pytest.raises(InvalidParameterError):
        ElasticPotential(phi=lambda x: x + 1.0, phi_prime=lambda x: 1.0)
