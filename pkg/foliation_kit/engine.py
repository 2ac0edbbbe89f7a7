# ============================================================
# foliation_kit/engine.py — Command Execution Engine
# ============================================================
# `foliation-kit run problem.json` ends up here:
#
#   1. The problem file is loaded and validated (models/problem.py).
#   2. The instance is built: f, and when present the morphism F
#      and the deformation (F₁, α₁). Random instances are drawn
#      from the seed and re-sampled until check_conditions passes.
#   3. Each command is dispatched through COMMAND_HANDLERS; every
#      handler returns a plain dict.
#   4. Results and errors become report blocks in input order,
#      and the process exit code is derived from them.
#
# Exit codes:
#   0  every command succeeded
#   1  an asserted identity or genericity condition failed
#   2  input error (schema, parse, degrees, missing fields)
#   3  resource or escalation cap, numeric failure
# The first failing block in input order decides the code.
# ============================================================

import time
from dataclasses import dataclass

import numpy as np

from foliation_kit.algebra.forms import DifferentialForm, pullback_form
from foliation_kit.algebra.parser import format_monomial, format_poly, parse_poly
from foliation_kit.algebra.poly import positional
from foliation_kit.brieskorn import decompose, extract_P1Q1, hf_basis, is_relatively_exact
from foliation_kit.config import Config, Tolerances
from foliation_kit.errors import FoliationKitError, GenericityError, InputError
from foliation_kit.extensions import command_executor, logger
from foliation_kit.foliation import (AFFINE_VARIABLES, affine_ring, alpha0, check_conditions,
                                     critical_point_count, euler_check,
                                     first_integral_from_text, milnor_f, random_first_integral)
from foliation_kit.models.problem import ProblemFile
from foliation_kit.periods import critical_values, melnikov1
from foliation_kit.pullback import (DOMAIN_VARIABLES, DeformationDirection, check_morphism,
                                    domain_ring, jacobian_transport, morphism, omega_e,
                                    omega_pl, omega_W, random_direction, random_morphism,
                                    rank_account, verify_identity_3_32)
from foliation_kit.report import build_report, complex_pair

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


@dataclass
class Instance:
    """Everything a handler may need, built once per run."""

    problem: ProblemFile
    f: object
    tolerances: Tolerances
    seed: int
    F: object = None
    direction: DeformationDirection = None
    genericity: object = None

    def require(self, *names):
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise InputError(f"Command needs: {', '.join(missing)}", {'missing': missing})


# ============================================================
# Problem text → algebraic objects
# ============================================================

def _homogeneous_names(problem):
    """The problem's variable names when P and Q were given homogeneously."""
    return problem.variables if len(problem.variables) == 3 else None


def _parse_form(section, f, variables=None):
    """
    Build a DifferentialForm from a Form sub-document.

    Two coefficients live on the affine chart (x, y); three on the
    homogeneous ring of f. The divisor is Q or PQ of the matching chart.
    """
    texts = section['coefficients']
    if len(texts) == 2:
        ring, P, Q = affine_ring(), f.P_affine, f.Q_affine
        default = AFFINE_VARIABLES
    else:
        ring, P, Q = f.ring, f.P, f.Q
        default = variables or tuple(str(s) for s in ring.symbols)
    variables = tuple(section.get('variables', default))
    if len(variables) != len(texts):
        raise InputError("A form needs one variable per coefficient",
                         {'variables': list(variables), 'coefficients': len(texts)})
    coeffs = [positional(parse_poly(text, variables), ring) for text in texts]
    divisor = P * Q if section.get('divisor', 'Q') == 'PQ' else Q
    return DifferentialForm(ring, 1, coeffs, divisor, section.get('pole_order', 0))


def _build_first_integral(problem, rng, tolerances):
    """f from text, or a seeded generic draw re-sampled until check_conditions passes."""
    if not problem.is_random:
        return first_integral_from_text(problem.P, problem.Q, problem.p, problem.q,
                                        problem.variables), None

    section = problem.random
    for attempt in range(1, tolerances.resample_attempts + 1):
        f = random_first_integral(section['m'], section['n'], section['p'], section['q'], rng,
                                  section.get('bound', 5))
        report = check_conditions(f, tolerances)
        if report.generic:
            logger.info("✅ Random instance accepted on attempt %d", attempt)
            return f, report
        logger.warning("⚠️  Attempt %d: re-sampling, failed %s", attempt,
                       ', '.join(report.failed()))
    raise GenericityError(f"No generic instance in {tolerances.resample_attempts} attempts",
                          {'attempts': tolerances.resample_attempts})


def _build_morphism(problem, f, rng, tolerances):
    section = problem.morphism
    if section is None:
        return None
    if 'components' in section:
        variables = tuple(section.get('variables', DOMAIN_VARIABLES))
        ring = domain_ring()
        components = [positional(parse_poly(text, variables), ring)
                      for text in section['components']]
        return morphism(components, f.ring)

    options = section['random']
    for attempt in range(1, tolerances.resample_attempts + 1):
        F = random_morphism(options['s'], f.ring, rng, options.get('bound', 3))
        if check_morphism(F).generic:
            return F
        logger.warning("⚠️  Attempt %d: re-sampling the morphism", attempt)
    raise GenericityError("No generic morphism found",
                          {'attempts': tolerances.resample_attempts})


def _build_direction(problem, f, F, rng):
    section = problem.deformation
    if section is None or F is None:
        return None
    if 'random' in section:
        options = section['random']
        return random_direction(f, F, rng, options.get('bound', 3), options.get('alpha1', True))

    domain = F.domain
    components = tuple(positional(parse_poly(text, DOMAIN_VARIABLES), domain)
                       for text in section['F1'])
    alpha1 = None
    if 'alpha1' in section:
        names = _homogeneous_names(problem) or tuple(str(s) for s in f.ring.symbols)
        alpha1 = DifferentialForm(f.ring, 1, [positional(parse_poly(text, names), f.ring)
                                              for text in section['alpha1']])
    return DeformationDirection(components, alpha1).check(f, F)


def build_instance(problem, seed=None, tolerances=None):
    """
    Turn a validated ProblemFile into an Instance.

    Args:
        seed (int): overrides the problem's seed (the --seed flag).
        tolerances (Tolerances): base tolerances before the problem's
                                 own overrides (the --tol-file flag).
    """
    seed = seed if seed is not None else (problem.seed or 0)
    tolerances = (tolerances or Tolerances()).with_overrides(problem.tolerances)
    rng = np.random.default_rng(seed)

    f, genericity = _build_first_integral(problem, rng, tolerances)
    F = _build_morphism(problem, f, rng, tolerances)
    direction = _build_direction(problem, f, F, rng)
    return Instance(problem, f, tolerances, seed, F, direction, genericity)


# ============================================================
# Command Handlers
# ============================================================
# Each handler receives the Instance and returns a dict. A
# result carrying "passed": False is reported as a failed
# verification (exit code 1); exceptions map through errors.py.
# ============================================================

def handle_check(instance):
    """
    CHECK — genericity of f, and of F when a morphism is given.
    """
    report = instance.genericity or check_conditions(instance.f, instance.tolerances)
    result = {'passed': report.generic, 'first_integral': report.to_dict()}
    if instance.F is not None:
        morphism_report = check_morphism(instance.F, instance.f)
        result['morphism'] = morphism_report.to_dict()
        result['passed'] = result['passed'] and morphism_report.generic
    return result


def handle_milnor(instance):
    """
    MILNOR — μ_f, the affine critical-point count and, with a morphism,
    the rank arithmetic of ker F_*.
    """
    f = instance.f
    result = {'mu_f': milnor_f(f.m, f.n), 'critical_points': critical_point_count(f.m, f.n)}
    if instance.F is not None:
        account = rank_account(f.m, f.n, instance.F.degree)
        result.update(account.to_dict())
    return result


def handle_basis(instance):
    """
    BASIS — standard monomials of M(*D) and the forms α_j.
    """
    basis = hf_basis(instance.f, strict=False)
    return {
        'dimension': basis.module.dimension,
        'expected': basis.module.expected,
        'monomials': [format_monomial(m, AFFINE_VARIABLES) or '1' for m in basis.monomials],
        'forms': [form.to_dict() for form in basis.forms],
    }


def _function_text(g):
    """A 0-form N / D^k as text: "N" or "(N)/(D)^k"."""
    numerator = format_poly(g.coeffs[0])
    if not g.pole_order:
        return numerator
    return f"({numerator})/({format_poly(g.divisor)})^{g.pole_order}"


def handle_decompose(instance):
    """
    DECOMPOSE — coordinates of `alpha` in the H_f basis.
    """
    problem = instance.problem
    if problem.alpha is None:
        raise InputError("decompose needs an 'alpha' form", {'missing': ['alpha']})
    f = instance.f
    alpha = _parse_form(problem.alpha, f, _homogeneous_names(problem))
    result = decompose(alpha, f, hf_basis(f, strict=False), instance.tolerances)
    return {
        'coefficients': list(result.coefficients),
        'zeta1': _function_text(result.zeta1),
        'zeta2': _function_text(result.zeta2),
        'degree_bounds': list(result.degree_bounds),
        'bound_ok': result.bound_ok,
        'pole_cap': result.pole_cap,
        'rounds': result.rounds,
    }


def handle_exactness(instance):
    """
    EXACTNESS — certificate ω = dg + Tω₀ for `omega` (or `alpha`).
    """
    problem = instance.problem
    section = problem.omega or problem.alpha
    if section is None:
        raise InputError("exactness needs an 'omega' or 'alpha' form", {'missing': ['omega']})
    omega = _parse_form(section, instance.f, _homogeneous_names(problem))
    certificate = is_relatively_exact(omega, instance.f, instance.tolerances)
    return certificate.to_dict()


def handle_pullback_tangent(instance):
    """
    PULLBACK-TANGENT — ω_W, ω_pl and ω_e for the deformation, with the
    checks ω_W = ω_pl + F*(α₁), the Euler condition and the recovery of
    (P₁, Q₁) from ω_e.
    """
    instance.require('F', 'direction')
    f, F, direction = instance.f, instance.F, instance.direction
    F1 = direction.components

    tangent = omega_W(F, F1, alpha0(f), direction.alpha1)
    plane = omega_pl(f, F, F1)
    extra = omega_e(f, F, F1)
    shift = pullback_form(F, direction.alpha1) if direction.alpha1 is not None else None
    rebuilt = plane + shift if shift is not None else plane
    P1, Q1 = extract_P1Q1(extra, f, F)
    lam, rho = jacobian_transport(f, F)

    checks = {
        'remark_identity': tangent == rebuilt,
        'euler': euler_check(tangent),
    }
    return {
        'passed': all(checks.values()),
        'checks': checks,
        'omega_W': tangent,
        'omega_pl': plane,
        'omega_e': extra,
        'extracted': {'P1': P1, 'Q1': Q1},
        'jacobian_transport': {'lambda': list(lam), 'rho': list(rho)},
    }


def handle_verify_332(instance):
    """
    VERIFY-332 — the ε¹ identity for (f, F, F₁).
    """
    instance.require('F', 'direction')
    verdict = verify_identity_3_32(instance.f, instance.F, instance.direction.components)
    return {'passed': verdict}


def handle_melnikov(instance):
    """
    MELNIKOV — samples of M₁(t) around a tangency center of F*(f).

    The direction is ω_W (default), ω_e, or the trivial F*(α₀).
    """
    instance.require('F')
    problem = instance.problem
    if problem.melnikov is None:
        raise InputError("melnikov needs a 'melnikov' block", {'missing': ['melnikov']})
    f, F = instance.f, instance.F
    section = problem.melnikov
    kind = section.get('direction', 'omega_W')

    if kind == 'pullback':
        omega1 = pullback_form(F, alpha0(f))
    else:
        instance.require('direction')
        F1 = instance.direction.components
        if kind == 'omega_e':
            omega1 = omega_e(f, F, F1)
        else:
            omega1 = omega_W(F, F1, alpha0(f), instance.direction.alpha1)

    center = tuple(section['center']) if 'center' in section else None
    samples = melnikov1(f, F, omega1, section['ts'], center, instance.tolerances)
    return {'direction': kind, 'samples': [sample.to_dict() for sample in samples]}


def handle_critical_values(instance):
    """
    CRITICAL-VALUES — numeric critical values of f, multiplicities and Δ(t).
    """
    data = critical_values(instance.f, instance.tolerances)
    return {
        'count': data.count,
        'values': [complex_pair(v) for v in data.values],
        'multiplicities': list(data.multiplicities),
        'delta': [complex_pair(c) for c in data.delta.coef],
        'points': [[complex_pair(x), complex_pair(y)] for x, y in data.points],
        'max_residual': float(np.max(data.residuals)) if len(data.residuals) else 0.0,
    }


# ============================================================
# Handler Registry
# ============================================================
# Maps command names to their handler functions.
# When adding a new command, add an entry here and to
# models.problem.COMMANDS.
# ============================================================

COMMAND_HANDLERS = {
    'check':            handle_check,
    'milnor':           handle_milnor,
    'basis':            handle_basis,
    'decompose':        handle_decompose,
    'exactness':        handle_exactness,
    'pullback-tangent': handle_pullback_tangent,
    'verify-332':       handle_verify_332,
    'melnikov':         handle_melnikov,
    'critical-values':  handle_critical_values,
}


# ============================================================
# Main Execution Function
# ============================================================

def _error_block(command, exc):
    return {
        'command': command,
        'status': 'error',
        'error': type(exc).__name__,
        'message': exc.message,
        'details': exc.details,
        'exit_code': exc.exit_code,
    }


def run_command(command, instance):
    """
    Execute one command and wrap the outcome as a report block.

    Never raises for library errors; they become error blocks.
    """
    handler = COMMAND_HANDLERS.get(command)
    if handler is None:
        return _error_block(command, InputError(f"Unknown command: {command}"))

    logger.info("▶ %s", command)
    started = time.perf_counter()
    try:
        result = handler(instance)
    except FoliationKitError as exc:
        logger.error("❌ %s failed: %s", command, exc.message)
        block = _error_block(command, exc)
    else:
        passed = result.get('passed', True)
        block = {
            'command': command,
            'status': 'ok' if passed else 'failed',
            'result': result,
            'exit_code': EXIT_OK if passed else EXIT_VERIFICATION,
        }
        if passed:
            logger.info("✅ %s done", command)
        else:
            logger.error("❌ %s: verification failed", command)
    block['elapsed'] = time.perf_counter() - started
    return block


def run(problem, seed=None, tolerances=None, report_timing=None, max_workers=None):
    """
    Run every command of a problem file.

    Args:
        problem (ProblemFile): the validated problem.
        seed (int): --seed override.
        tolerances (Tolerances): base tolerances (--tol-file).
        report_timing (bool): include wall-clock timings; defaults to
                              Config.REPORT_TIMING.
        max_workers (int): concurrent commands; defaults to Config.MAX_WORKERS.

    Returns:
        (dict, int): the report and the process exit code.
    """
    report_timing = Config.REPORT_TIMING if report_timing is None else report_timing
    max_workers = Config.MAX_WORKERS if max_workers is None else max_workers
    seed_used = seed if seed is not None else (problem.seed or 0)

    # --- Step 1: build the instance ---
    try:
        instance = build_instance(problem, seed, tolerances)
    except FoliationKitError as exc:
        logger.error("❌ Instance rejected: %s", exc.message)
        block = _error_block('load', exc)
        return build_report(problem.raw, seed_used, None, [block], exc.exit_code), exc.exit_code

    # --- Step 2: run the commands, keeping input order ---
    executor = command_executor(max_workers)
    if executor is None:
        blocks = [run_command(command, instance) for command in problem.commands]
    else:
        with executor:
            blocks = list(executor.map(lambda c: run_command(c, instance), problem.commands))

    # --- Step 3: exit code and timing ---
    exit_code = next((b['exit_code'] for b in blocks if b['exit_code'] != EXIT_OK), EXIT_OK)
    timing = None
    if report_timing:
        timing = {b['command']: b['elapsed'] for b in blocks}
    for block in blocks:
        del block['elapsed']

    described = instance.f.describe()
    if instance.F is not None:
        described['morphism'] = list(instance.F.components)
    if instance.direction is not None:
        described['F1'] = list(instance.direction.components)
        if instance.direction.alpha1 is not None:
            described['alpha1'] = list(instance.direction.alpha1.coeffs)
    return build_report(problem.raw, seed_used, described, blocks, exit_code, timing), exit_code
