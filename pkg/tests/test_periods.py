import numpy as np
import pytest
from numpy.polynomial import Polynomial

from foliation_kit.algebra.forms import DifferentialForm, pullback_form
from foliation_kit.errors import NumericFailure
from foliation_kit.foliation import affine_ring, alpha0, omega0_affine
from foliation_kit.periods import (LOOP_TAIL_RTOL, NumericPoly, PeriodSample, circle_loop,
                                   critical_values, determinant_function, determinant_ratios,
                                   from_nodes, loop_integral, melnikov1, spectral_tail,
                                   transport_loop, vanishing_loop, vanishing_offset,
                                   wronskian_samples)
from foliation_kit.pullback import domain_ring, omega_W, pullback_integral, random_direction


def area_form():
    ring = affine_ring()
    x, _ = ring.gens
    return DifferentialForm(ring, 1, [ring.zero, x])


@pytest.fixture(scope='module')
def critical_data(first_integral, module):
    return critical_values(first_integral, module=module)


@pytest.fixture(scope='module')
def vanishing_loops(first_integral, critical_data):
    """(loop, c, offset) at every critical point, offset from the local geometry."""
    loops = []
    for point, c in zip(critical_data.points, critical_data.point_values):
        offset = vanishing_offset(first_integral, point, critical_data)
        loop = vanishing_loop(first_integral, c, c + offset, point=point, data=critical_data)
        loops.append((loop, complex(c), offset))
    return loops


@pytest.fixture(scope='module')
def vanishing(vanishing_loops):
    return vanishing_loops[0]


def test_numeric_poly_matches_exact_evaluation():
    ring = affine_ring()
    x, y = ring.gens
    p = NumericPoly(x ** 3 - 2 * x * y + 5)
    assert complex(p(2.0, 1.5)) == pytest.approx(7.0)
    assert complex(p.derivative(0)(1.0, 1.0)) == pytest.approx(1.0)


def test_circle_loop_lies_on_a_hyperbola():
    loop = circle_loop(radius=0.5, count=64)
    assert len(loop) == 64
    np.testing.assert_allclose(loop.nodes[:, 0] * loop.nodes[:, 1], 0.25)
    assert loop.spectral_tail < 1e-12


def test_a_jumping_node_shows_in_the_spectral_tail():
    nodes = circle_loop(radius=0.5, count=64).nodes.copy()
    nodes[[10, 40]] = nodes[[40, 10]]
    assert spectral_tail(nodes) > 1e-3


def test_logarithmic_form_integrates_to_two_pi_i():
    ring = affine_ring()
    x, _ = ring.gens
    dlog = DifferentialForm(ring, 1, [ring.one, ring.zero], x, 1)
    result = loop_integral(dlog, circle_loop())
    assert result.value == pytest.approx(2j * np.pi, abs=1e-12)
    assert result.error < 1e-10


def test_area_integral_on_circle():
    result = loop_integral(area_form(), circle_loop(radius=0.5))
    assert result.value == pytest.approx(-0.5j * np.pi, abs=1e-12)


def test_exact_form_integrates_to_zero():
    ring = affine_ring()
    x, y = ring.gens
    exact = DifferentialForm.function(x ** 2 * y + y ** 3).d()
    assert abs(loop_integral(exact, circle_loop((0.3, -0.2), 0.7)).value) < 1e-12


def test_unresolved_integral_is_rejected():
    ring = affine_ring()
    x, _ = ring.gens
    # x⁹ dy is the single mode e^{8iθ}: invisible on 16 nodes, aliased on 8
    form = DifferentialForm(ring, 1, [ring.zero, x ** 9])
    with pytest.raises(NumericFailure):
        loop_integral(form, circle_loop(count=16))


def test_loop_through_a_pole_is_rejected():
    ring = affine_ring()
    x, _ = ring.gens
    form = DifferentialForm(ring, 1, [ring.one, ring.zero], x, 1)
    with pytest.raises(NumericFailure):
        loop_integral(form, circle_loop(center=(-1.0, 0.0), radius=1.0))


def test_loop_integral_needs_an_affine_form():
    ring = domain_ring()
    form = DifferentialForm(ring, 1, [ring.one, ring.zero, ring.zero])
    with pytest.raises(NumericFailure):
        loop_integral(form, circle_loop())


def test_from_nodes_checks_the_fiber(first_integral):
    with pytest.raises(NumericFailure):
        from_nodes(circle_loop().nodes, t=1.0, f=first_integral)


def test_determinant_function():
    delta = determinant_function([1.0, 2.0], [1, 2])
    np.testing.assert_allclose(delta.coef, [-4.0, 8.0, -5.0, 1.0])
    assert determinant_function([], []).coef.tolist() == [1.0]


def test_critical_values_of_reference_instance(critical_data):
    assert critical_data.count == 7
    assert len(critical_data.points) == 7
    assert np.max(critical_data.residuals) < 1e-6
    assert all(mu == 1 for mu in critical_data.multiplicities)
    assert critical_data.delta.degree() == 7


def test_vanishing_offset_is_positive(first_integral, critical_data):
    for point in critical_data.points:
        offset = vanishing_offset(first_integral, point, critical_data)
        assert offset > 0
        assert vanishing_offset(first_integral, point, critical_data, fraction=0.1) \
            == pytest.approx(4 * offset)


def test_vanishing_loops_are_smooth_and_on_the_fiber(vanishing_loops):
    for loop, c, offset in vanishing_loops:
        assert loop.kind == 'vanishing-loop'
        assert loop.t == c + offset
        assert loop.residual <= 1e-10
        assert loop.spectral_tail <= LOOP_TAIL_RTOL
        assert len(loop) == 128


def test_vanishing_loop_shrinks_like_a_square_root(first_integral, critical_data, vanishing):
    loop, c, offset = vanishing
    point = np.asarray(loop.center)
    small = vanishing_loop(first_integral, c, c + offset / 4, point=point, data=critical_data)
    size = np.max(np.linalg.norm(loop.nodes - point, axis=1))
    smaller = np.max(np.linalg.norm(small.nodes - point, axis=1))
    assert 0.4 < smaller / size < 0.6


def test_far_base_value_is_reached_by_transport(first_integral, critical_data, vanishing):
    loop, c, offset = vanishing
    far = vanishing_loop(first_integral, c, c + 4 * offset, point=loop.center,
                         data=critical_data)
    assert far.kind == 'vanishing-loop'
    assert far.t == c + 4 * offset
    assert far.residual <= 1e-10
    moved = transport_loop(first_integral, loop, c + 4 * offset)
    direct = loop_integral(area_form(), far).value
    assert loop_integral(area_form(), moved).value == pytest.approx(direct, rel=1e-8)


def test_relatively_exact_forms_have_zero_periods_on_every_loop(first_integral,
                                                                 vanishing_loops):
    omega0 = omega0_affine(first_integral)
    exact = DifferentialForm.function(affine_ring().one, first_integral.Q_affine, 1).d()
    areas = []
    for loop, _, _ in vanishing_loops:
        assert abs(loop_integral(omega0, loop).value) < 1e-8
        assert abs(loop_integral(exact, loop).value) < 1e-8
        areas.append(abs(loop_integral(area_form(), loop).value))
    assert len(areas) >= 5
    assert max(areas) > 1e-4


def test_transport_keeps_the_loop_on_the_fiber(first_integral, vanishing):
    loop, c, offset = vanishing
    moved = transport_loop(first_integral, loop, c + offset / 2)
    assert moved.t == c + offset / 2
    assert moved.residual <= 1e-10
    assert moved.kind == 'transported'
    assert moved.spectral_tail <= LOOP_TAIL_RTOL
    assert abs(loop_integral(omega0_affine(first_integral), moved).value) < 1e-8


def test_transport_rejects_a_loop_that_is_not_smooth(first_integral, vanishing):
    loop, _, _ = vanishing
    nodes = loop.nodes.copy()
    nodes[[10, 70]] = nodes[[70, 10]]
    broken = from_nodes(nodes, loop.t, 'vanishing-loop', first_integral)
    assert broken.spectral_tail > LOOP_TAIL_RTOL
    with pytest.raises(NumericFailure):
        transport_loop(first_integral, broken, loop.t)


def test_period_shrinks_toward_every_critical_value(first_integral, vanishing_loops):
    for loop, c, offset in vanishing_loops:
        samples = wronskian_samples(first_integral, [loop],
                                    [c + offset, c + offset / 2, c + offset / 4],
                                    forms=[area_form()])
        sizes = [abs(sample.determinant) for sample in samples]
        assert sizes[0] > sizes[1] > sizes[2] > 0
        assert 0.4 < sizes[1] / sizes[0] < 0.6
        assert 0.4 < sizes[2] / sizes[1] < 0.6
        assert not any(sample.degenerate for sample in samples)


def test_dependent_loops_are_reported_degenerate(first_integral, basis, vanishing):
    loop, c, offset = vanishing
    sample, = wronskian_samples(first_integral, [loop, loop], [c + offset],
                                forms=basis.forms[:2])
    assert sample.matrix.shape == (2, 2)
    assert sample.degenerate
    assert sample.to_dict()['degenerate'] is True


def test_non_square_period_matrix_has_no_determinant(first_integral, basis, vanishing):
    loop, c, offset = vanishing
    sample, = wronskian_samples(first_integral, [loop], [c + offset], forms=basis.forms[:2])
    assert sample.matrix.shape == (1, 2)
    assert sample.determinant is None
    assert not sample.degenerate
    assert sample.to_dict()['determinant'] is None


def test_loops_must_share_a_base_value(first_integral, basis, vanishing):
    loop, c, offset = vanishing
    moved = transport_loop(first_integral, loop, c + offset / 2)
    with pytest.raises(NumericFailure):
        wronskian_samples(first_integral, [loop, moved], [c + offset / 4],
                          forms=basis.forms[:2])


def test_determinant_ratios():
    delta = determinant_function([1.0, 2.0 + 1j], [1, 1])
    ts = [3.0, 4.0 - 1j, 0.5j, 5.0, -2.0]
    proportional = [PeriodSample(complex(t), np.eye(1), complex(3 * delta(t))) for t in ts]
    ratios, spread = determinant_ratios(proportional, delta)
    np.testing.assert_allclose(ratios, 3.0)
    assert spread < 1e-12

    drifting = [PeriodSample(complex(t), np.eye(1), complex((3 + k) * delta(t)))
                for k, t in enumerate(ts)]
    assert determinant_ratios(drifting, delta)[1] > 0.1

    skipped = [PeriodSample(1j, np.ones((1, 2)), None)]
    ratios, spread = determinant_ratios(skipped, delta)
    assert ratios.size == 0 and spread is None


def _fold_center():
    """A critical point of f(x², y²) on the fold x = 0 of the square map."""
    P0 = Polynomial([-3.0, 0.0, 1.0, 2.0])     # P(0, Y, 1)
    Q0 = Polynomial([5.0, -1.0, 3.0])          # Q(0, Y, 1)
    candidates = (2 * P0.deriv() * Q0 - 3 * P0 * Q0.deriv()).roots()
    Y0 = max(candidates, key=lambda Y: min(abs(Y), abs(P0(Y)), abs(Q0(Y))))
    y0 = np.sqrt(complex(Y0))
    return (0j, y0), P0(Y0) ** 2 / Q0(Y0) ** 3


@pytest.mark.slow
def test_melnikov_vanishes_at_a_tangency_center(first_integral, square_map):
    f, F = first_integral, square_map
    center, c = _fold_center()
    offset = vanishing_offset(pullback_integral(f, F), center)
    ts = [c + offset, c + offset / 2, c + offset / 4]

    trivial = melnikov1(f, F, pullback_form(F, alpha0(f)), ts, center)
    assert all(abs(sample.value) < 1e-8 for sample in trivial)

    x, y, z = F.domain.gens
    transverse = DifferentialForm(F.domain, 1, [y * z ** 8, F.domain.zero, F.domain.zero])
    reference = melnikov1(f, F, transverse, ts, center)
    assert all(abs(sample.value) > 0 for sample in reference)

    for seed in range(5):
        direction = random_direction(f, F, np.random.default_rng(seed))
        tangent = omega_W(F, direction.components, alpha0(f), direction.alpha1)
        for sample, base in zip(melnikov1(f, F, tangent, ts, center), reference):
            assert sample.t == base.t
            assert abs(sample.value) < 1e-6 * abs(base.value)
