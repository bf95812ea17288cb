import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy.special import erf

from qhoprice.errors import DomainError, NumericalError
from qhoprice.hermite import psi, psi_derivative, psi_table
from qhoprice.numerics import composite_rule
from qhoprice.susy import (
    ALPHA_BOUND,
    SusyBasis,
    SusyParams,
    apply_A,
    g_alpha,
    g_alpha_derivative,
    phi_zero,
    susy_phi,
    u_alpha,
)

NORM_RULE = composite_rule((-12.0, 12.0), 48, 16)


def g_reference(alpha, x):
    return math.exp(-x * x) / (alpha + 0.5 * math.sqrt(math.pi) * erf(x))


def gram(basis):
    V = basis.evaluate(NORM_RULE.nodes)
    return (V * NORM_RULE.weights) @ V.T


def fd_schrodinger_residual(basis, x, h=1e-4):
    centre, plus, minus = basis.evaluate(x), basis.evaluate(x + h), basis.evaluate(x - h)
    second = (plus - 2 * centre + minus) / h**2
    levels = (np.arange(basis.size) + 0.5)[:, None]
    return -0.5 * second + u_alpha(basis.params, x) * centre - levels * centre


@pytest.mark.parametrize("alpha", [0.0, 0.5, ALPHA_BOUND, -ALPHA_BOUND - 1e-10, math.inf])
def test_inadmissible_alpha(alpha):
    with pytest.raises(DomainError, match="sqrt"):
        SusyParams(alpha)


@pytest.mark.parametrize("alpha", [0.9, 1.0, -1.5, 100.0])
def test_g_at_origin(alpha):
    assert g_alpha(SusyParams(alpha), 0.0) == pytest.approx(1 / alpha, rel=1e-15)


def test_g_reference_value():
    # e^{-1} / 1.7468241 = 0.2105990, quoted to six places as 0.210600
    assert g_alpha(SusyParams(1.0), 1.0) == pytest.approx(0.210600, abs=2e-6)


@pytest.mark.parametrize("alpha", [1.0, -1.2, 3.0])
@pytest.mark.parametrize("x", [-4.0, -0.6, 0.0, 1.1, 5.0])
def test_g_against_erf(alpha, x):
    assert g_alpha(SusyParams(alpha), x) == pytest.approx(g_reference(alpha, x), rel=1e-12)


def test_g_decays():
    p = SusyParams(1.5)
    assert abs(g_alpha(p, 10.0)) < 1e-40
    assert abs(g_alpha(p, -10.0)) < 1e-40


@pytest.mark.parametrize("x", [-1.0, 0.2, 2.0])
def test_g_derivative_matches_finite_difference(x):
    p, h = SusyParams(1.5), 1e-5
    fd = (g_alpha(p, x + h) - g_alpha(p, x - h)) / (2 * h)
    assert abs(g_alpha_derivative(p, x) - fd) < 1e-7


def test_g_solves_riccati():
    p = SusyParams(-2.0)
    x = np.linspace(-5, 5, 41)
    g = g_alpha(p, x)
    np.testing.assert_allclose(g_alpha_derivative(p, x), -2 * x * g - g * g, atol=1e-15)


@pytest.mark.parametrize("alpha", [1.0, 1.5, -3.0])
def test_potential_at_origin(alpha):
    p, h = SusyParams(alpha), 1e-6
    fd = (g_alpha(p, h) - g_alpha(p, -h)) / (2 * h)
    assert u_alpha(p, 0.0) == pytest.approx(1 / alpha**2, rel=1e-14)
    assert u_alpha(p, 0.0) == pytest.approx(-fd, rel=1e-8)


def test_large_alpha_potential_is_oscillator():
    x = np.linspace(-3, 3, 61)
    assert np.max(np.abs(u_alpha(SusyParams(100.0), x) - x * x / 2)) < 3e-2


def test_phi_zero_examples():
    p = SusyParams(1.0)
    assert phi_zero(p, 0.0) == 1.0
    assert 0.0 < phi_zero(p, 8.0) < 1e-12
    integral, _ = sp_integrate.quad(lambda u: g_reference(1.0, u), 0.0, 1.0, epsabs=1e-14)
    assert phi_zero(p, 1.0) == pytest.approx(math.exp(-0.5 - integral), rel=1e-10)


def test_phi_zero_is_the_ground_state():
    # (d/dx + x + g) phi_0 = 0 holds for exp(-x^2/2 - int g); the opposite
    # sign in the second exponent leaves a residual of order one
    p, h = SusyParams(1.5), 1e-5
    x = np.linspace(-3, 3, 25)
    d = (phi_zero(p, x + h) - phi_zero(p, x - h)) / (2 * h)
    annihilated = d + (x + g_alpha(p, x)) * phi_zero(p, x)
    assert np.max(np.abs(annihilated)) < 1e-8

    plus_sign = np.exp(-x * x / 2) / (phi_zero(p, x) * np.exp(x * x / 2))
    d_plus = np.gradient(plus_sign, x)
    assert np.max(np.abs(d_plus + (x + g_alpha(p, x)) * plus_sign)) > 0.1


def test_apply_A_at_origin():
    alpha = 1.7
    expected = math.pi**-0.25 / alpha / math.sqrt(2)
    assert apply_A(SusyParams(alpha), 0, 0.0) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("n", [0, 3, 7])
def test_apply_A_three_terms(n):
    p = SusyParams(-1.3)
    x = np.linspace(-3, 3, 7)
    expected = (-psi_derivative(n, x) + x * psi(n, x) + g_alpha(p, x) * psi(n, x)) / math.sqrt(2)
    np.testing.assert_allclose(apply_A(p, n, x), expected, atol=1e-15)


def test_ground_state_orthogonal_to_first_partner():
    p = SusyParams(1.5)
    x, w = NORM_RULE.nodes, NORM_RULE.weights
    assert abs(np.sum(w * phi_zero(p, x) * apply_A(p, 0, x))) < 1e-6


@pytest.mark.parametrize("n", [0, 2, 5])
def test_large_alpha_raising_operator(n):
    x = np.linspace(-4, 4, 33)
    raised = math.sqrt(n + 1) * psi(n + 1, x)
    assert np.max(np.abs(apply_A(SusyParams(1e6), n, x) - raised)) < 1e-5


@pytest.mark.parametrize("alpha", [1.5, -1.5])
def test_gram_matrix(alpha):
    basis = SusyBasis.build(SusyParams(alpha), 10)
    assert np.max(np.abs(gram(basis) - np.eye(11))) < 1e-6
    assert np.all(np.isfinite(basis.norms)) and np.all(basis.norms > 0)


def test_norms_against_adaptive_quadrature():
    p = SusyParams(1.5)
    basis = SusyBasis.build(p, 3)
    ref, _ = sp_integrate.quad(lambda u: apply_A(p, 2, u) ** 2, -np.inf, np.inf, epsabs=1e-13)
    assert basis.norms[3] == pytest.approx(math.sqrt(ref), rel=1e-10)


def test_partner_norms_up_to_seventeen():
    basis = SusyBasis.build(SusyParams(2.5), 17)
    assert np.all(np.isfinite(basis.norms)) and np.all(basis.norms > 0)


@pytest.mark.parametrize("alpha", [1.5, -1.5])
def test_schrodinger_residual(alpha):
    basis = SusyBasis.build(SusyParams(alpha), 8)
    x = np.linspace(-4, 4, 33)
    assert np.max(np.abs(fd_schrodinger_residual(basis, x))) < 1e-4


def test_large_alpha_reduction():
    basis = SusyBasis.build(SusyParams(1e6), 9)
    x = np.linspace(-4, 4, 81)
    assert np.max(np.abs(basis.evaluate(x)[1:] - psi_table(9, x)[1:])) < 1e-4


def test_susy_phi_matches_basis_rows():
    basis = SusyBasis.build(SusyParams(-2.0), 5)
    x = np.array([-1.0, 0.5, 2.0])
    rows = basis.evaluate(x)
    for n in range(6):
        np.testing.assert_allclose(susy_phi(basis, n, x), rows[n], rtol=1e-14)
    with pytest.raises(DomainError):
        susy_phi(basis, 6, x)


def test_degenerate_norm_is_reported():
    basis = SusyBasis.build(SusyParams(1.5), 2)
    broken = SusyBasis(basis.params, 2, np.array([basis.norms[0], 1e-14, basis.norms[2]]))
    with pytest.raises(NumericalError, match="n=1"):
        susy_phi(broken, 1, 0.3)
    with pytest.raises(NumericalError):
        broken.evaluate(np.zeros(3))
