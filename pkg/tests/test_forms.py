import pytest

from foliation_kit.algebra.forms import (DifferentialForm, exterior_d, form_basis, pullback_form,
                                         wedge)
from foliation_kit.algebra.parser import format_poly
from foliation_kit.algebra.poly import polynomial_ring
from foliation_kit.errors import DegreeError, InputError
from foliation_kit.pullback import morphism


@pytest.fixture
def plane():
    return polynomial_ring(('x', 'y'))


@pytest.fixture
def space():
    return polynomial_ring(('X', 'Y', 'Z'))


def test_form_basis_labels():
    assert form_basis(3, 2) == ((0, 1), (0, 2), (1, 2))
    assert form_basis(2, 0) == ((),)


def test_d_of_x_dy_is_the_area_form(plane):
    x, y = plane.gens
    alpha = DifferentialForm(plane, 1, [plane.zero, x])
    assert alpha.d() == DifferentialForm.top_form(plane.one)


def test_wedge_is_antisymmetric(plane):
    dx = DifferentialForm.differential_of(0, plane)
    dy = DifferentialForm.differential_of(1, plane)
    assert (dy * dx).coeffs == (-plane.one,)
    assert (dx * dx).is_zero()


def test_module_level_operations(plane):
    x, y = plane.gens
    left = DifferentialForm(plane, 1, [plane.zero, x])
    right = DifferentialForm(plane, 1, [y, plane.zero])
    assert wedge(left, right) == DifferentialForm.top_form(-x * y)
    gradient = exterior_d(DifferentialForm.function(x ** 2 * y))
    assert gradient.coeffs == (2 * x * y, x ** 2)


def test_d_squared_vanishes(space):
    X, Y, Z = space.gens
    omega = DifferentialForm(space, 1, [X * Y ** 2, Z ** 3 - X, X * Y * Z], X + Y, 2)
    assert omega.d().d().is_zero()


def test_leibniz_rule(space):
    X, Y, Z = space.gens
    g = DifferentialForm.function(X ** 2 * Z - Y)
    omega = DifferentialForm(space, 1, [Y, Z * X, X ** 3])
    assert (g * omega).d() == g.d() * omega + g * omega.d()


def test_quotient_rule_for_functions(plane):
    x, y = plane.gens
    Q = x ** 2 + y ** 2 + 1
    g = DifferentialForm.function(plane.one, Q, 1)
    expected = DifferentialForm(plane, 1, [-2 * x, -2 * y], Q, 2)
    assert g.d() == expected


def test_common_factors_cancel(plane):
    x, y = plane.gens
    Q = x + 1
    form = DifferentialForm(plane, 1, [Q * y, Q ** 2], Q, 1)
    assert form.pole_order == 0
    assert form.coeffs == (y, Q)
    assert form.divisor == plane.one


def test_over_keeps_the_rational_form(plane):
    x, y = plane.gens
    form = DifferentialForm(plane, 1, [y, plane.one], x + 1, 1)
    moved = form.over((x + 1) * (y - 2))
    assert moved.divisor == (x + 1) * (y - 2)
    assert moved.same_as(form)
    with pytest.raises(InputError):
        form.over(y - 2)


def test_adding_forms_over_different_divisors_is_rejected(plane):
    x, y = plane.gens
    left = DifferentialForm(plane, 1, [plane.one, plane.zero], x, 1)
    right = DifferentialForm(plane, 1, [plane.one, plane.zero], y, 1)
    with pytest.raises(InputError):
        left + right


def test_top_degree_has_no_derivative(plane):
    with pytest.raises(DegreeError):
        DifferentialForm.top_form(plane.one).d()


def test_wrong_coefficient_count(plane):
    with pytest.raises(DegreeError):
        DifferentialForm(plane, 1, [plane.one])


def test_homogenized_form_satisfies_euler(plane, space):
    x, y = plane.gens
    eta = DifferentialForm(plane, 1, [plane.zero, x])
    lifted = eta.homogenize(space)
    assert [format_poly(c) for c in lifted.coeffs] == ["0", "X*Z", "-X*Y"]
    assert not lifted.contract_euler()
    assert lifted.dehomogenize(plane) == eta


def test_pullback_of_dX_under_squares(space):
    domain = polynomial_ring(('x', 'y', 'z'))
    x, y, z = domain.gens
    F = morphism([x ** 2, y ** 2, z ** 2], space)
    dX = DifferentialForm.differential_of(0, space)
    assert pullback_form(F, dX) == DifferentialForm(domain, 1, [2 * x, domain.zero, domain.zero])


def test_pullback_commutes_with_d(space):
    domain = polynomial_ring(('x', 'y', 'z'))
    x, y, z = domain.gens
    X, Y, Z = space.gens
    F = morphism([x * y, y ** 2 - z ** 2, x ** 2 + y * z], space)
    omega = DifferentialForm(space, 1, [Y * Z, X ** 2, Z - Y])
    assert pullback_form(F, omega).d() == pullback_form(F, omega.d())


def test_to_dict(plane):
    x, y = plane.gens
    form = DifferentialForm(plane, 1, [y, x], x ** 2 + 1, 1)
    assert form.to_dict() == {
        'degree': 1,
        'coefficients': {'dx': 'y', 'dy': 'x'},
        'divisor': 'x^2 + 1',
        'pole_order': 1,
    }
