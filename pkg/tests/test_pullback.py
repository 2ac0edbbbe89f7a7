from fractions import Fraction

import numpy as np
import pytest

from foliation_kit.algebra.forms import DifferentialForm, pullback_form
from foliation_kit.algebra.poly import dehomogenize
from foliation_kit.brieskorn import extract_P1Q1, is_relatively_exact
from foliation_kit.config import Tolerances
from foliation_kit.errors import DegreeError, EscalationCapReached, InputError
from foliation_kit.foliation import (affine_ring, alpha0, correction_form, euler_check, milnor_f,
                                     omega0_affine, random_first_integral)
from foliation_kit.pullback import (DeformationDirection, check_morphism, domain_ring,
                                    hf_injection_check, injection_degree_bound, jacobian_data,
                                    jacobian_transport, morphism, omega_e, omega_pl, omega_W,
                                    p1_lemma, p1_remark, pullback_integral, q1_lemma, q1_remark,
                                    random_direction, random_morphism, rank_account,
                                    verify_identity_3_32)


def test_morphism_validation(first_integral):
    x, y, z = domain_ring().gens
    codomain = first_integral.ring
    with pytest.raises(DegreeError):
        morphism([x, y, z], codomain)
    with pytest.raises(DegreeError):
        morphism([x ** 2, y ** 2 + z, z ** 2], codomain)
    with pytest.raises(DegreeError):
        morphism([x ** 2, y ** 3, z ** 2], codomain)
    with pytest.raises(DegreeError):
        morphism([x ** 2, y ** 2], codomain)


def test_square_map_is_generic(first_integral, square_map):
    x, y, z = square_map.domain.gens
    assert jacobian_data(square_map).discriminant == 8 * x * y * z
    report = check_morphism(square_map)
    assert report.jacobian_nonzero and report.coprime
    assert report.separated is None
    assert report.to_dict()['degree'] == 2


def test_degenerate_morphism_is_flagged(first_integral):
    x, y, z = domain_ring().gens
    F = morphism([x ** 2, x * y, x * z], first_integral.ring)
    report = check_morphism(F)
    assert not report.coprime
    assert not report.generic


def test_pullback_integral_degrees(first_integral, square_map):
    pulled = pullback_integral(first_integral, square_map)
    assert (pulled.m, pulled.n) == (6, 4)
    assert (pulled.p, pulled.q) == (first_integral.p, first_integral.q)


def test_random_morphism_has_a_nonzero_jacobian(first_integral, rng):
    F = random_morphism(2, first_integral.ring, rng)
    assert F.degree == 2
    assert jacobian_data(F).discriminant


def test_direction_degrees_are_checked(first_integral, square_map):
    x, y, z = square_map.domain.gens
    with pytest.raises(DegreeError):
        DeformationDirection((x ** 3, y ** 2, z ** 2)).check(first_integral, square_map)
    ring = first_integral.ring
    X, _, _ = ring.gens
    radial_breaking = DifferentialForm(ring, 1, [X ** 4, ring.zero, ring.zero])
    with pytest.raises(DegreeError):
        DeformationDirection((x ** 2, y ** 2, z ** 2), radial_breaking).check(first_integral,
                                                                               square_map)


def test_random_direction_satisfies_euler(first_integral, square_map, rng):
    direction = random_direction(first_integral, square_map, rng)
    assert len(direction.components) == 3
    assert euler_check(direction.alpha1)


def test_remark_and_lemma_conventions(first_integral, square_map, rng):
    f, F = first_integral, square_map
    F1 = random_direction(f, F, rng, with_alpha1=False).components
    assert p1_lemma(f, F, F1) == p1_remark(f, F, F1) * f.q
    assert q1_lemma(f, F, F1) == q1_remark(f, F, F1) * (-f.p)


def test_tangent_vector_splits_into_plane_part_and_alpha1(first_integral, square_map, rng):
    f, F = first_integral, square_map
    direction = random_direction(f, F, rng)
    tangent = omega_W(F, direction.components, alpha0(f), direction.alpha1)
    rebuilt = omega_pl(f, F, direction.components) + pullback_form(F, direction.alpha1)
    assert (tangent - rebuilt).is_zero()
    assert euler_check(tangent)


def test_radial_direction_has_no_extra_part(first_integral, square_map):
    assert omega_e(first_integral, square_map, square_map.components).is_zero()


@pytest.mark.parametrize('seed', range(2))
def test_extra_part_is_relatively_exact_for_the_pulled_integral(first_integral, square_map,
                                                                 seed):
    f, F = first_integral, square_map
    F1 = random_direction(f, F, np.random.default_rng(seed), with_alpha1=False).components
    pulled = pullback_integral(f, F)
    ring = affine_ring()
    omega = omega_e(f, F, F1)
    assert not omega.is_zero()
    affine = DifferentialForm(ring, 1, [dehomogenize(c, ring) for c in omega.coeffs[:2]],
                              pulled.P_affine * pulled.Q_affine, 1)
    certificate = is_relatively_exact(affine, pulled)
    assert certificate.valid
    rebuilt = certificate.g.d() + certificate.T.wedge(omega0_affine(pulled))
    assert affine.same_as(rebuilt)


@pytest.mark.parametrize('seed', range(2))
def test_extract_recovers_the_lemma_pair_up_to_the_kernel(first_integral, square_map, seed):
    f, F = first_integral, square_map
    F1 = random_direction(f, F, np.random.default_rng(seed), with_alpha1=False).components
    Pt, Qt = F.pull(f.P), F.pull(f.Q)
    omega = omega_e(f, F, F1)
    P1, Q1 = extract_P1Q1(omega, f, F)
    assert correction_form(Pt, Qt, P1, Q1, f.p, f.q) == omega
    shift, remainder = (P1 - p1_lemma(f, F, F1)).div(Pt)
    assert not remainder
    assert shift.is_ground
    assert Q1 - q1_lemma(f, F, F1) == Qt * shift


def test_omega_W_rejects_rational_forms(first_integral, square_map):
    ring = first_integral.ring
    form = DifferentialForm(ring, 1, list(alpha0(first_integral).coeffs), first_integral.Q, 1)
    with pytest.raises(DegreeError):
        omega_W(square_map, square_map.components, form)


@pytest.mark.parametrize('seed', range(3))
def test_epsilon_identity_on_square_map(first_integral, square_map, seed):
    direction = random_direction(first_integral, square_map, np.random.default_rng(seed),
                                 with_alpha1=False)
    assert verify_identity_3_32(first_integral, square_map, direction.components)


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(10))
def test_epsilon_identity_on_random_instances(seed):
    rng = np.random.default_rng(seed)
    f = random_first_integral(3, 2, 3, 2, rng)
    F = random_morphism(2, f.ring, rng)
    direction = random_direction(f, F, rng, with_alpha1=False)
    assert verify_identity_3_32(f, F, direction.components)


def test_jacobian_transport(first_integral, square_map):
    lam, rho = jacobian_transport(first_integral, square_map)
    assert lam == alpha0(first_integral).coeffs
    assert rho == pullback_form(square_map, alpha0(first_integral)).coeffs


def test_rank_account():
    account = rank_account(3, 2, 2)
    assert account.to_dict() == {'mu_f': 10, 'mu': 57, 'rho_D': 17, 'ker_rank': 47,
                                 'h_rank': 47}
    assert rank_account(4, 3, 2).rho_D == 25
    assert rank_account(3, 2, 2, rho_D=17).mu == 57


@pytest.mark.parametrize('m, n, s', [(3, 2, 2), (3, 2, 3), (3, 2, 5), (4, 2, 2), (4, 3, 2),
                                     (4, 3, 3), (5, 2, 2), (5, 3, 2), (5, 4, 3), (6, 5, 2),
                                     (7, 2, 4)])
def test_rank_account_is_consistent(m, n, s):
    account = rank_account(m, n, s)
    assert account.mu == milnor_f(m * s, n * s)
    assert account.rho_D == (s - 1) * ((2 * (m + n) - 1) * s - 1)
    assert account.mu == s * s * account.mu_f + account.rho_D
    assert account.ker_rank == account.h_rank == (s * s - 1) * account.mu_f + account.rho_D
    assert rank_account(m, n, s, rho_D=account.rho_D) == account


@pytest.mark.parametrize('rho_D', [-1, 5])
def test_rank_account_rejects_bad_rho(rho_D):
    with pytest.raises(InputError):
        rank_account(3, 2, 2, rho_D=rho_D)


def test_rank_account_degree_guards():
    with pytest.raises(DegreeError):
        rank_account(3, 2, 1)


def test_injection_degree_bound(first_integral, square_map):
    assert injection_degree_bound(first_integral, square_map) == Fraction(7, 12)


@pytest.mark.slow
def test_injection_check_on_square_map(first_integral, square_map):
    report = hf_injection_check(first_integral, square_map)
    assert report.degree_bound == Fraction(7, 12)
    assert report.constant
    assert report.rank == report.expected_rank == 7
    assert report.passed
    assert len(report.coordinates) == 7
    assert report.to_dict() == {'passed': True, 'constant': True, 'rank': 7,
                                'expected_rank': 7, 'degree_bound': "7/12"}


@pytest.mark.slow
def test_injection_check_reports_the_unknown_cap(first_integral, square_map):
    tight = Tolerances(escalation_rounds=0, max_unknowns=50)
    with pytest.raises(EscalationCapReached) as raised:
        hf_injection_check(first_integral, square_map, tight)
    assert raised.value.exit_code == 3
    assert raised.value.details['rounds'] == 0
