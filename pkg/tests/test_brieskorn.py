import numpy as np
import pytest

from foliation_kit.algebra.forms import DifferentialForm
from foliation_kit.algebra.poly import ZERO_DEGREE
from foliation_kit.brieskorn import (basis_form, decompose, degree_bound, expand,
                                     extract_P1Q1, is_relatively_exact, relative_module,
                                     weighted_degree)
from foliation_kit.config import Tolerances
from foliation_kit.errors import DegreeError, EscalationCapReached
from foliation_kit.foliation import (affine_ring, correction_form, critical_point_count,
                                     omega0_affine, random_first_integral)


def test_relative_module_has_the_generic_dimension(module):
    assert module.dimension == module.expected == 7
    assert all(len(monom) == 2 for monom in module.monomials)
    assert (0, 0) in module.monomials


def test_basis_forms_differentiate_to_their_monomials(basis):
    ring = affine_ring()
    assert basis.count == 7
    for monom, form in zip(basis.monomials, basis.forms):
        assert form.d() == DifferentialForm.top_form(ring.one.mul_monom(monom))


def test_basis_form_normalization():
    ring = affine_ring()
    x, y = ring.gens
    form = basis_form((1, 2), ring)
    assert form.coeffs == (ring.zero, (x ** 2 * y ** 2).mul_ground(ring.domain(1, 2)))


def test_weighted_degree(first_integral):
    ring = affine_ring()
    x, y = ring.gens
    form = DifferentialForm(ring, 1, [ring.zero, x ** 3], first_integral.Q_affine, 1)
    assert weighted_degree(form, first_integral.n) == 1


def test_degree_bound_of_a_basis_form_is_zero(first_integral, basis):
    for form in basis.forms:
        assert degree_bound(form, form, first_integral) == 0


def test_negative_degree_bound_forces_a_zero_coefficient(first_integral, basis):
    ring = affine_ring()
    x, _ = ring.gens
    alpha = DifferentialForm(ring, 1, [ring.zero, x])
    assert degree_bound(alpha, basis_form((3, 0), ring), first_integral) == ZERO_DEGREE
    result = decompose(alpha, first_integral, basis)
    assert result.bound_ok
    for bound, coefficient in zip(result.degree_bounds, result.coefficients):
        if bound == ZERO_DEGREE:
            assert not coefficient


def test_basis_forms_have_unit_coordinates(first_integral, basis):
    for j, form in enumerate(basis.forms):
        result = decompose(form, first_integral, basis)
        assert result.is_exact
        assert result.bound_ok
        assert result.coefficients[j] == 1
        assert not any(c for k, c in enumerate(result.coefficients) if k != j)


def test_linear_combination(first_integral, basis):
    alpha = basis.forms[0] * 2 + basis.forms[1] * 3
    result = decompose(alpha, first_integral, basis)
    assert result.is_exact
    assert result.coefficients[0] == 2
    assert result.coefficients[1] == 3
    assert not any(result.coefficients[2:])


def test_exact_forms_have_zero_coordinates(first_integral, basis):
    ring = affine_ring()
    x, y = ring.gens
    exact = DifferentialForm.function(x ** 2 * y - y ** 3).d()
    result = decompose(exact, first_integral, basis)
    assert result.is_exact
    assert not any(result.coefficients)
    assert expand(result, basis) == exact


def test_zero_form(first_integral, basis):
    result = decompose(DifferentialForm.zero(affine_ring(), 1), first_integral, basis)
    assert result.is_exact
    assert not any(result.coefficients)


def test_multiple_of_df_has_zero_coordinates(first_integral, basis):
    ring = affine_ring()
    x, _ = ring.gens
    alpha = DifferentialForm.function(x) * first_integral.differential()
    result = decompose(alpha, first_integral, basis)
    assert result.is_exact
    assert not any(result.coefficients)


def test_decompose_rejects_homogeneous_forms(first_integral, basis):
    ring = first_integral.ring
    with pytest.raises(DegreeError):
        decompose(DifferentialForm(ring, 1, [ring.one, ring.zero, ring.zero]),
                  first_integral, basis)


def test_decompose_is_exact_or_reports_the_cap(first_integral, basis):
    ring = affine_ring()
    x, y = ring.gens
    alpha = DifferentialForm(ring, 1, [y ** 3 - x, x * y ** 2 + 1], first_integral.Q_affine, 1)
    tight = Tolerances(escalation_rounds=0, max_unknowns=400)
    try:
        result = decompose(alpha, first_integral, basis, tight)
    except EscalationCapReached as exc:
        assert exc.exit_code == 3
        assert 'rounds' in exc.details
    else:
        assert result.is_exact
        assert expand(result, basis).same_as(alpha)


def test_omega0_is_relatively_exact(first_integral):
    certificate = is_relatively_exact(omega0_affine(first_integral), first_integral)
    assert certificate.valid
    assert certificate.to_dict()['valid'] is True


def test_differential_of_a_rational_function_is_relatively_exact(first_integral):
    ring = affine_ring()
    omega = DifferentialForm.function(ring.one, first_integral.Q_affine, 1).d()
    certificate = is_relatively_exact(omega, first_integral)
    assert certificate.valid
    omega0 = omega0_affine(first_integral)
    assert omega.same_as(certificate.g.d() + certificate.T.wedge(omega0))


def test_area_form_is_not_relatively_exact(first_integral):
    ring = affine_ring()
    x, _ = ring.gens
    certificate = is_relatively_exact(DifferentialForm(ring, 1, [ring.zero, x]), first_integral)
    assert not certificate.valid
    assert certificate.to_dict() == {'valid': False}


def test_extract_recovers_the_pair(first_integral, square_map):
    f, F = first_integral, square_map
    x, y, z = F.domain.gens
    P1 = x ** 6 - 2 * y ** 3 * z ** 3 + x * y * z ** 4
    Q1 = x ** 2 * y ** 2 + 3 * y * z ** 3
    omega = correction_form(F.pull(f.P), F.pull(f.Q), P1, Q1, f.p, f.q)
    assert extract_P1Q1(omega, f, F) == (P1, Q1)


def test_extract_of_zero(first_integral, square_map):
    zero = DifferentialForm.zero(square_map.domain, 1)
    P1, Q1 = extract_P1Q1(zero, first_integral, square_map)
    assert not P1 and not Q1


@pytest.mark.parametrize('a, b', [(1, 1), (2, -3), (-1, 5)])
def test_decompose_is_linear(first_integral, basis, a, b):
    ring = affine_ring()
    x, y = ring.gens
    first = basis.forms[2] + DifferentialForm.function(x ** 2 * y).d()
    second = basis.forms[5] * 3 - basis.forms[0] + DifferentialForm.function(x * y ** 2).d()
    combined = decompose(first * a + second * b, first_integral, basis)
    left = decompose(first, first_integral, basis)
    right = decompose(second, first_integral, basis)
    assert combined.is_exact
    for c, u, v in zip(combined.coefficients, left.coefficients, right.coefficients):
        assert c == u * a + v * b


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(4))
@pytest.mark.parametrize('m, n, p, q', [(3, 2, 3, 2), (4, 2, 2, 1), (4, 3, 4, 3), (5, 2, 5, 2)])
def test_random_instances_have_the_generic_dimension(m, n, p, q, seed):
    f = random_first_integral(m, n, p, q, np.random.default_rng(seed))
    module = relative_module(f, strict=False)
    assert module.dimension == module.expected == critical_point_count(m, n)
