import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sgthermal.errors import DegenerateBC, DomainError
from sgthermal.robin_basis import RobinBasis, RobinBC, eval_basis, robin_basis_coeffs

ALPHA = 2 / 0.028


def normalized_residuals(basis):
    bc = basis.bc
    scale = max(abs(bc.a_plus), abs(bc.b_plus), abs(bc.a_minus), abs(bc.b_minus))
    return np.abs(basis.bc_residuals()) / scale


@pytest.mark.parametrize("n", range(10))
def test_dirichlet_coefficients(n):
    assert robin_basis_coeffs(n, RobinBC(1, 0, 1, 0)) == (0.0, -1.0)


@pytest.mark.parametrize("n", range(10))
def test_neumann_coefficients(n):
    zeta, eta = robin_basis_coeffs(n, RobinBC(0, 1, 0, 1))
    assert zeta == 0.0
    assert eta == -(n * n) / (n + 2) ** 2


def test_neumann_first_function_is_constant():
    basis = RobinBasis(3, RobinBC(0, 1, 0, 1))
    np.testing.assert_allclose(basis.eval(0, np.linspace(-1, 1, 7)), 1.0)


def test_case1_radial_residuals():
    basis = RobinBasis(15, RobinBC(100 / 0.66, ALPHA, 0.0, ALPHA))
    assert normalized_residuals(basis).max() < 1e-10


def test_eval_basis_examples():
    dirichlet = RobinBasis(2, RobinBC(1, 0, 1, 0))
    assert eval_basis(dirichlet, 0, 0.0) == pytest.approx(2.0)
    assert eval_basis(dirichlet, 0, 1.0) == pytest.approx(0.0, abs=1e-15)
    neumann = RobinBasis(2, RobinBC(0, 1, 0, 1))
    assert eval_basis(neumann, 1, -1.0, deriv=1) == pytest.approx(0.0, abs=1e-15)


def test_eval_basis_index_error():
    basis = RobinBasis(2, RobinBC(1, 0, 1, 0))
    with pytest.raises(IndexError):
        basis.eval(2, 0.0)


def test_degenerate_bc_names_index():
    # a+ = 0, b+ = 1, a- = 0, b- = 0 leaves DET_n = 0 for every n
    with pytest.raises(DegenerateBC) as info:
        robin_basis_coeffs(3, RobinBC(0.0, 1.0, 0.0, 0.0))
    assert info.value.n == 3


def test_all_zero_bc_rejected():
    with pytest.raises(DomainError):
        RobinBC(0, 0, 0, 0)


def test_degenerate_threshold_is_relative():
    # large convective coefficients (h = 500 on k_r = 0.66) must not trip the guard
    basis = RobinBasis(15, RobinBC(500 / 0.66, ALPHA, -500 / 0.66, ALPHA))
    assert normalized_residuals(basis).max() < 1e-10


robin_side = st.tuples(st.floats(0, 1000), st.floats(0.01, 100))


@settings(max_examples=100, deadline=None)
@given(robin_side, robin_side, st.integers(1, 15))
def test_random_convective_bc_residuals(plus, minus, count):
    # physical convection: a+ >= 0 at +1, a- <= 0 at -1, b > 0
    bc = RobinBC(plus[0], plus[1], -minus[0], minus[1])
    basis = RobinBasis(count, bc)
    assert normalized_residuals(basis).max() < 1e-10


@settings(max_examples=50, deadline=None)
@given(robin_side, robin_side, st.integers(0, 12))
def test_degree_is_n_plus_2(plus, minus, n):
    bc = RobinBC(plus[0], plus[1], -minus[0], minus[1])
    basis = RobinBasis(n + 1, bc)
    zeta, eta = basis.coeffs[n]
    assume(eta != 0.0)
    assert len(np.polynomial.chebyshev.chebtrim(basis.series(n), tol=0)) == n + 3


def test_gram_matrix_well_posed():
    basis = RobinBasis(10, RobinBC(100 / 0.66, ALPHA, 0.0, ALPHA))
    x = np.polynomial.chebyshev.chebpts2(80)
    phi = basis.table(x)
    assert np.isfinite(np.linalg.cond(phi @ phi.T))
    assert np.linalg.matrix_rank(phi) == 10
