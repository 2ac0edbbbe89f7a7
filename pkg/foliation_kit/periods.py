# ============================================================
# foliation_kit/periods.py — Critical Values, Loops, Periods
# ============================================================
# The only floating-point module of the package. It works on
# the affine chart (x, y) and covers:
#
#   - critical points of f from the multiplication matrices of
#     M(*D) (eigenvectors), polished by Newton
#   - fiber loops: vanishing loops from the local quadratic
#     model, transport of a loop to another base value, and a
#     Fourier-tail check that every loop is still smooth
#   - loop integrals by spectral differentiation and the
#     periodic trapezoid rule
#   - sampled period determinants and the first Melnikov function
#
# Polynomials are evaluated from their exact sympy form, so the
# only rounding happens here; nothing numeric flows back into the
# exact modules.
# ============================================================

from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import Polynomial
from scipy import linalg

from foliation_kit.algebra.groebner import multiplication_matrix
from foliation_kit.algebra.poly import dehomogenize
from foliation_kit.config import Tolerances
from foliation_kit.errors import GenericityError, NumericFailure
from foliation_kit.extensions import logger
from foliation_kit.foliation import affine_ring, critical_point_count

# Relative distance under which two critical values count as one.
VALUE_MERGE_RTOL = 1e-7

NEWTON_ITERATIONS = 50
CORRECTOR_ITERATIONS = 8

# Vanishing-loop radius as a fraction of the local length scale.
LOOP_FRACTION = 0.05
# Largest Newton displacement off the quadratic model, relative to its radius.
MODEL_DEFECT = 0.1
SHRINK_ATTEMPTS = 8

# Fourier content above N/4 a smooth closed loop may carry.
LOOP_TAIL_RTOL = 1e-6

# Transport: corrector displacement per step against the smallest node
# spacing, and the growth of an accepted step.
STEP_SPACING = 0.25
STEP_GROWTH = 1.5

# |det| against Hadamard's bound below which a period matrix is degenerate.
DEGENERATE_RTOL = 1e-8


class NumericPoly:
    """Vectorised evaluation of an exact polynomial (complex arguments)."""

    def __init__(self, poly):
        terms = list(poly.iterterms())
        self.nvars = poly.ring.ngens
        self.exponents = np.array([m for m, _ in terms], dtype=int).reshape(len(terms), self.nvars)
        self.coefficients = np.array([float(c) for _, c in terms], dtype=complex)
        self.poly = poly

    def __call__(self, *points):
        points = [np.asarray(p, dtype=complex) for p in points]
        result = np.zeros(np.broadcast(*points).shape, dtype=complex)
        for exponent, coeff in zip(self.exponents, self.coefficients):
            term = coeff
            for value, e in zip(points, exponent):
                if e:
                    term = term * value ** e
            result = result + term
        return result

    def derivative(self, index):
        return NumericPoly(self.poly.diff(self.poly.ring.gens[index]))


class _FirstIntegralEvaluator:
    """P, Q, their derivatives, and the fiber equation P^q − tQ^p on the affine chart."""

    def __init__(self, f):
        self.f = f
        self.P = NumericPoly(f.P_affine)
        self.Q = NumericPoly(f.Q_affine)
        self.dP = [self.P.derivative(i) for i in range(2)]
        self.dQ = [self.Q.derivative(i) for i in range(2)]
        self.ddP = [[d.derivative(j) for j in range(2)] for d in self.dP]
        self.ddQ = [[d.derivative(j) for j in range(2)] for d in self.dQ]

    def value(self, x, y):
        return self.P(x, y) ** self.f.q / self.Q(x, y) ** self.f.p

    def critical_equations(self, x, y):
        """The affine components of α₀."""
        P, Q = self.P(x, y), self.Q(x, y)
        q, p = self.f.q, self.f.p
        return np.array([q * Q * self.dP[i](x, y) - p * P * self.dQ[i](x, y) for i in range(2)])

    def critical_scale(self, x, y):
        """Size of the terms of α₀ at a point, for relative residuals."""
        P, Q = np.abs(self.P(x, y)), np.abs(self.Q(x, y))
        return max(1.0, float(max(self.f.q * Q * np.abs(self.dP[i](x, y))
                                  + self.f.p * P * np.abs(self.dQ[i](x, y)) for i in range(2))))

    def critical_jacobian(self, x, y):
        P, Q = self.P(x, y), self.Q(x, y)
        q, p = self.f.q, self.f.p
        dP = [d(x, y) for d in self.dP]
        dQ = [d(x, y) for d in self.dQ]
        rows = []
        for i in range(2):
            rows.append([q * dQ[j] * dP[i] + q * Q * self.ddP[i][j](x, y)
                         - p * dP[j] * dQ[i] - p * P * self.ddQ[i][j](x, y) for j in range(2)])
        return np.array(rows, dtype=complex)

    def fiber(self, x, y, t):
        """h = P^q − tQ^p, its gradient, and a scale for relative residuals."""
        P, Q = self.P(x, y), self.Q(x, y)
        q, p = self.f.q, self.f.p
        Pq1, Qp1 = P ** (q - 1), Q ** (p - 1)
        gradient = [q * Pq1 * self.dP[i](x, y) - t * p * Qp1 * self.dQ[i](x, y) for i in range(2)]
        scale = np.abs(P) ** q + np.abs(t) * np.abs(Q) ** p
        return P * Pq1 - t * Q * Qp1, gradient, np.maximum(scale, 1.0)

    def log_hessian(self, x, y):
        """Hessian of log f; at a critical point Hess f = f · Hess log f."""
        P, Q = self.P(x, y), self.Q(x, y)
        q, p = self.f.q, self.f.p
        dP = [d(x, y) for d in self.dP]
        dQ = [d(x, y) for d in self.dQ]
        H = np.empty((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                H[i, j] = (q * (self.ddP[i][j](x, y) / P - dP[i] * dP[j] / P ** 2)
                           - p * (self.ddQ[i][j](x, y) / Q - dQ[i] * dQ[j] / Q ** 2))
        return H


# ------------------------------------------------------------
# Critical points and values
# ------------------------------------------------------------
@dataclass(frozen=True)
class CriticalData:
    """
    Attributes:
        points:         affine critical points, shape (k, 2).
        point_values:   f at each point.
        residuals:      relative |α₀| at each polished point.
        values:         distinct critical values.
        multiplicities: how many points share each value.
        delta:          Δ(t) = Π (t − t_i)^μ_i as a numpy Polynomial.
    """

    points: np.ndarray
    point_values: np.ndarray
    residuals: np.ndarray
    values: tuple
    multiplicities: tuple
    delta: Polynomial

    @property
    def count(self):
        return int(sum(self.multiplicities))


def _polish(evaluator, point, tolerances):
    z = np.array(point, dtype=complex)
    for _ in range(NEWTON_ITERATIONS):
        F = evaluator.critical_equations(*z)
        if np.max(np.abs(F)) < tolerances.newton_tol * evaluator.critical_scale(*z):
            break
        try:
            step = np.linalg.solve(evaluator.critical_jacobian(*z), -F)
        except np.linalg.LinAlgError:
            break
        z = z + step
        if np.max(np.abs(step)) < tolerances.newton_tol * (1 + np.max(np.abs(z))):
            break
    residual = np.max(np.abs(evaluator.critical_equations(*z))) / evaluator.critical_scale(*z)
    return z, float(residual)


def critical_points(f, tolerances=None, module=None, strict=True):
    """
    Affine critical points of f, one per standard monomial of M(*D).

    The left eigenvectors of a generic combination of the
    multiplication matrices by x and y are the evaluation vectors of
    the standard monomials at the points; coordinates are read off
    through the x and y matrices and then Newton-polished.

    Returns:
        (points, residuals): arrays of shape (k, 2) and (k,).
    """
    from foliation_kit.brieskorn import relative_module

    tolerances = tolerances or Tolerances()
    module = module if module is not None else relative_module(f, strict=strict)
    G, basis = module.basis, module.standard
    x, y, _ = G.ring.gens
    Mx = np.array(multiplication_matrix(x, G, basis), dtype=float)
    My = np.array(multiplication_matrix(y, G, basis), dtype=float)

    # --- Step 1: eigenvectors of a generic combination ---
    combination = Mx + 0.5772156649015329 * My
    _, vectors = linalg.eig(combination.T)

    # --- Step 2: coordinates by Rayleigh quotients ---
    evaluator = _FirstIntegralEvaluator(f)
    points, residuals = [], []
    for v in vectors.T:
        k = int(np.argmax(np.abs(v)))
        point = ((v @ Mx)[k] / v[k], (v @ My)[k] / v[k])
        polished, residual = _polish(evaluator, point, tolerances)
        points.append(polished)
        residuals.append(residual)
    return np.array(points, dtype=complex).reshape(-1, 2), np.array(residuals)


def determinant_function(values, multiplicities):
    """Δ(t) = Π (t − t_i)^μ_i."""
    roots = []
    for value, mu in zip(values, multiplicities):
        roots.extend([value] * mu)
    return Polynomial.fromroots(roots) if roots else Polynomial([1.0])


def _merge(values):
    merged, counts = [], []
    for value in values:
        for i, existing in enumerate(merged):
            if abs(value - existing) <= VALUE_MERGE_RTOL * max(1.0, abs(existing)):
                counts[i] += 1
                break
        else:
            merged.append(value)
            counts.append(1)
    return merged, counts


def critical_values(f, tolerances=None, module=None, strict=True):
    """
    Critical values with multiplicities and Δ(t).

    Raises:
        GenericityError: the number of points differs from
                         critical_point_count(m, n) (strict mode), or a
                         polished point keeps a large residual.
    """
    tolerances = tolerances or Tolerances()
    points, residuals = critical_points(f, tolerances, module, strict)
    expected = critical_point_count(f.m, f.n)
    if strict and len(points) != expected:
        raise GenericityError(f"Found {len(points)} critical points, expected {expected}",
                              {'residuals': residuals.tolist()})
    loose = residuals > np.sqrt(tolerances.newton_tol)
    if np.any(loose):
        raise GenericityError("Critical point polishing did not converge",
                              {'residuals': residuals.tolist()})

    evaluator = _FirstIntegralEvaluator(f)
    point_values = np.array([evaluator.value(*z) for z in points], dtype=complex)
    order = np.lexsort((point_values.imag, point_values.real))
    merged, counts = _merge(point_values[order])
    logger.info("Critical values: %d distinct among %d points", len(merged), len(points))
    return CriticalData(points, point_values, residuals, tuple(complex(v) for v in merged),
                        tuple(counts), determinant_function(merged, counts))


# ------------------------------------------------------------
# Fiber loops
# ------------------------------------------------------------
@dataclass(frozen=True)
class FiberLoop:
    """
    Closed path sampled at equally spaced parameters θ_k = 2πk/N.

    Attributes:
        t:              base value (None for loops not tied to a fiber).
        nodes:          complex array of shape (N, 2), endpoint not repeated.
        kind:           'lifted-circle', 'vanishing-loop' or 'transported'.
        residual:       max relative |P^q − tQ^p| over the nodes.
        spectral_tail:  Fourier content of the nodes above N/4 relative to
                        the largest nonconstant mode; a seam between the
                        last and first node or a node that jumped to
                        another sheet shows up here.
        center:         the critical point a vanishing loop shrinks to.
    """

    t: object
    nodes: np.ndarray
    kind: str
    residual: float = 0.0
    spectral_tail: float = 0.0
    center: tuple = field(default=None)

    def __len__(self):
        return len(self.nodes)


def spectral_tail(nodes):
    """Largest Fourier mode above N/4 over the largest nonconstant mode."""
    nodes = np.asarray(nodes, dtype=complex).reshape(len(nodes), -1)
    count = len(nodes)
    modes = np.abs(np.fft.fftfreq(count, d=1.0 / count))
    spectrum = np.abs(np.fft.fft(nodes, axis=0))
    top = float(np.max(spectrum[modes > 0])) if count > 1 else 0.0
    if top == 0.0:
        return 0.0
    return float(np.max(spectrum[modes > count // 4]) / top)


def _spacing(nodes):
    return np.linalg.norm(np.roll(nodes, -1, axis=0) - nodes, axis=1)


def from_nodes(nodes, t=None, kind='lifted-circle', f=None, tolerances=None):
    """
    Wrap explicit nodes as a loop, checking the fiber residual when f is given.

    Raises:
        NumericFailure: nodes are off the fiber f = t.
    """
    nodes = np.asarray(nodes, dtype=complex).reshape(-1, 2)
    residual = 0.0
    if f is not None:
        tolerances = tolerances or Tolerances()
        h, _, scale = _FirstIntegralEvaluator(f).fiber(nodes[:, 0], nodes[:, 1], t)
        residual = float(np.max(np.abs(h) / scale))
        if residual > tolerances.fiber_residual:
            raise NumericFailure(f"Loop is off the fiber (residual {residual:.3e})")
    return FiberLoop(t, nodes, kind, residual, spectral_tail(nodes))


def circle_loop(center=(0.0, 0.0), radius=1.0, count=128):
    """
    The loop (c_x + r e^{iθ}, c_y + r e^{−iθ}).

    In the coordinates u = (x + y)/2, v = (x − y)/(2i) this is the real
    circle of radius r, and it lies on xy = r² when the center is 0.
    """
    theta = 2 * np.pi * np.arange(count) / count
    nodes = np.stack([center[0] + radius * np.exp(1j * theta),
                      center[1] + radius * np.exp(-1j * theta)], axis=1)
    return FiberLoop(None, nodes, 'lifted-circle', 0.0, spectral_tail(nodes))


def _newton_to_fiber(evaluator, nodes, t, tolerances, iterations=NEWTON_ITERATIONS):
    """
    Minimum-norm Newton steps z ← z − h·conj(∇h)/|∇h|² on every node.

    One more step is taken once the residual is below fiber_residual, so
    the nodes sit on the fiber to rounding rather than to the tolerance.
    """
    x, y = nodes[:, 0].copy(), nodes[:, 1].copy()
    converged = False
    for _ in range(iterations):
        h, (hx, hy), scale = evaluator.fiber(x, y, t)
        if np.max(np.abs(h) / scale) < tolerances.fiber_residual:
            if converged:
                break
            converged = True
        norm = np.abs(hx) ** 2 + np.abs(hy) ** 2
        if np.any(norm == 0):
            raise NumericFailure("Fiber equation is singular at a loop node")
        x = x - h * np.conj(hx) / norm
        y = y - h * np.conj(hy) / norm
    h, _, scale = evaluator.fiber(x, y, t)
    return np.stack([x, y], axis=1), float(np.max(np.abs(h) / scale))


def _morse_model(evaluator, z0):
    """H = Hess f at z₀ as c·Hess(log f), rejected when degenerate."""
    c = complex(evaluator.value(*z0))
    H = c * evaluator.log_hessian(*z0)
    det = H[0, 0] * H[1, 1] - H[0, 1] ** 2
    scale = max(1.0, float(np.max(np.abs(H))))
    if max(abs(H[0, 0]), abs(H[1, 1])) < 1e-12 * scale or abs(det) < 1e-12 * scale ** 2:
        raise NumericFailure("Critical point is not Morse", {'value': [c.real, c.imag]})
    return c, H


def _model_nodes(z0, H, offset, count):
    """The circle w₁² + w₂² = offset of the completed square, mapped back to z₀ + u."""
    swap = abs(H[0, 0]) < abs(H[1, 1])
    if swap:
        H = H[::-1, ::-1]
    h11, h12 = H[0, 0], H[0, 1]
    det = H[0, 0] * H[1, 1] - H[0, 1] ** 2
    theta = 2 * np.pi * np.arange(count) / count
    radius = np.sqrt(complex(offset))
    w1, w2 = radius * np.cos(theta), radius * np.sin(theta)
    u2 = w2 / np.sqrt(det / (2 * h11))
    u1 = w1 / np.sqrt(h11 / 2) - (h12 / h11) * u2
    u = np.stack([u2, u1], axis=1) if swap else np.stack([u1, u2], axis=1)
    return z0[None, :] + u


def _critical_point(f, c, tolerances, point, data):
    if point is not None:
        return np.asarray(point, dtype=complex), data
    data = data or critical_values(f, tolerances)
    index = int(np.argmin(np.abs(data.point_values - c)))
    return data.points[index], data


def vanishing_offset(f, point, data=None, fraction=LOOP_FRACTION):
    """
    A base-value offset |t − c| whose vanishing loop stays well inside
    the region where the quadratic model of f at `point` holds.

    The loop of the model has radius √(2|t − c| / σ_min(H)); it is set to
    `fraction` of the distance to the nearest other critical point (when
    `data` is given) and to the first-order distances |P|/|∇P| and
    |Q|/|∇Q| to the curves P = 0 and Q = 0.

    Returns:
        float: the offset, positive real.
    """
    evaluator = _FirstIntegralEvaluator(f)
    z0 = np.asarray(point, dtype=complex)
    _, H = _morse_model(evaluator, z0)
    sigma = float(np.linalg.svd(H, compute_uv=False)[-1])

    distances = []
    for value, partials in ((evaluator.P, evaluator.dP), (evaluator.Q, evaluator.dQ)):
        slope = float(np.hypot(*(abs(d(*z0)) for d in partials)))
        if slope:
            distances.append(abs(complex(value(*z0))) / slope)
    if data is not None:
        gaps = np.linalg.norm(np.asarray(data.points) - z0[None, :], axis=1)
        gaps = gaps[gaps > 1e-9 * max(1.0, float(np.max(np.abs(z0))))]
        if gaps.size:
            distances.append(float(np.min(gaps)))
    if not distances:
        raise NumericFailure("No length scale around the critical point")
    radius = fraction * min(distances)
    return sigma * radius ** 2 / 2


def vanishing_loop(f, c, t, tolerances=None, point=None, data=None):
    """
    Loop on f = t shrinking to the critical point of value c as t → c.

    The local model f(z₀ + u) ≈ c + ½ uᵀHu is brought to w₁² + w₂² = t − c
    by completing the square; the circle w = √(t − c)(cos θ, sin θ) is
    mapped back and Newton-corrected onto the fiber.

    The model is only trusted where the correction moves the nodes by a
    small fraction of the loop size and the corrected nodes stay smooth.
    The construction starts at min(|t − c|, vanishing_offset) along the
    direction of t − c, shrinks by 4 until both checks pass, and
    transports the accepted loop out to t.

    Args:
        c:      critical value.
        t:      base value near c.
        point:  the critical point; looked up in `data` (or a fresh
                critical_values run) when omitted.

    Raises:
        NumericFailure: degenerate Hessian (non-Morse point), no trial
                        offset passed the checks, or transport failed.
    """
    tolerances = tolerances or Tolerances()
    evaluator = _FirstIntegralEvaluator(f)
    z0, data = _critical_point(f, c, tolerances, point, data)
    c, H = _morse_model(evaluator, z0)
    offset = complex(t - c)
    if offset == 0:
        raise NumericFailure("Base value equals the critical value")

    # --- Step 1: first trial offset ---
    safe = vanishing_offset(f, z0, data)
    trial = offset if abs(offset) <= safe else offset / abs(offset) * safe

    # --- Step 2: shrink until the quadratic model holds ---
    count = tolerances.loop_nodes
    for _ in range(SHRINK_ATTEMPTS):
        model = _model_nodes(z0, H, trial, count)
        nodes, residual = _newton_to_fiber(evaluator, model, c + trial, tolerances)
        size = float(np.max(np.linalg.norm(model - z0[None, :], axis=1)))
        defect = float(np.max(np.linalg.norm(nodes - model, axis=1))) / size
        tail = spectral_tail(nodes)
        if (residual <= tolerances.fiber_residual and defect <= MODEL_DEFECT
                and tail <= LOOP_TAIL_RTOL):
            break
        logger.debug("vanishing loop at |t − c| = %.3e rejected (defect %.2e, tail %.2e)",
                     abs(trial), defect, tail)
        trial = trial / 4
    else:
        raise NumericFailure("Vanishing loop could not be resolved near the critical point",
                             {'value': [c.real, c.imag], 'attempts': SHRINK_ATTEMPTS})

    if trial == offset:
        return FiberLoop(complex(t), nodes, 'vanishing-loop', residual, tail, tuple(z0))
    loop = FiberLoop(c + trial, nodes, 'vanishing-loop', residual, tail, tuple(z0))

    # --- Step 3: transport out to the requested base value ---
    moved = transport_loop(f, loop, t, tolerances)
    return replace(moved, t=complex(t), kind='vanishing-loop')


def transport_loop(f, loop, t_new, tolerances=None, steps=16):
    """
    Continue every node of `loop` along the straight path loop.t → t_new.

    Predictor dz = Δt · Q^p conj(∇h)/|∇h|², corrector Newton at the new
    base value. A step is halved whenever the corrector misses the fiber
    residual or moves a node by more than STEP_SPACING of the smallest
    node spacing, and grown by STEP_GROWTH after it is accepted.

    Raises:
        NumericFailure: more than max_steps steps were needed, or the
                        transported loop lost smoothness.
    """
    tolerances = tolerances or Tolerances()
    evaluator = _FirstIntegralEvaluator(f)
    nodes = np.array(loop.nodes, dtype=complex)
    t, target = complex(loop.t), complex(t_new)
    step = (target - t) / steps
    taken = 0
    done = False
    while not done:
        final = abs(step) >= abs(target - t)
        if final:
            step = target - t
        x, y = nodes[:, 0], nodes[:, 1]
        _, (hx, hy), _ = evaluator.fiber(x, y, t)
        weight = evaluator.Q(x, y) ** f.p * step / (np.abs(hx) ** 2 + np.abs(hy) ** 2)
        predicted = np.stack([x + weight * np.conj(hx), y + weight * np.conj(hy)], axis=1)
        corrected, residual = _newton_to_fiber(evaluator, predicted, t + step, tolerances,
                                               CORRECTOR_ITERATIONS)
        taken += 1
        if taken > tolerances.max_steps:
            raise NumericFailure("Loop transport exceeded the step ceiling",
                                 {'max_steps': tolerances.max_steps})
        jump = float(np.max(np.linalg.norm(corrected - predicted, axis=1)))
        if residual > tolerances.fiber_residual or jump > STEP_SPACING * np.min(_spacing(nodes)):
            step = step / 2
            continue
        nodes = corrected
        t = target if final else t + step
        step = step * STEP_GROWTH
        done = final

    h, _, scale = evaluator.fiber(nodes[:, 0], nodes[:, 1], target)
    tail = spectral_tail(nodes)
    if tail > LOOP_TAIL_RTOL:
        raise NumericFailure("Transported loop is no longer smooth",
                             {'spectral_tail': tail, 't': [target.real, target.imag]})
    logger.debug("transport to t = %s in %d steps", target, taken)
    return FiberLoop(target, nodes, 'transported', float(np.max(np.abs(h) / scale)),
                     tail, loop.center)


# ------------------------------------------------------------
# Integrals
# ------------------------------------------------------------
@dataclass(frozen=True)
class LoopIntegral:
    value: complex
    error: float

    def __complex__(self):
        return self.value


def _spectral_derivative(samples):
    count = len(samples)
    modes = np.fft.fftfreq(count, d=1.0 / count)
    if count % 2 == 0:
        modes[count // 2] = 0
    return np.fft.ifft(1j * modes * np.fft.fft(samples))


def _trapezoid(form, nodes):
    """(∮ω, 2π·mean |integrand|); the second sets the scale of the error."""
    x, y = nodes[:, 0], nodes[:, 1]
    dx, dy = _spectral_derivative(x), _spectral_derivative(y)
    A = NumericPoly(form.coeffs[0])(x, y)
    B = NumericPoly(form.coeffs[1])(x, y)
    integrand = A * dx + B * dy
    if form.pole_order:
        D = NumericPoly(form.divisor)(x, y)
        if np.min(np.abs(D)) < 1e-14 * max(1.0, float(np.max(np.abs(D)))):
            raise NumericFailure("Loop passes through a pole of the form")
        integrand = integrand / D ** form.pole_order
    return complex(2 * np.pi * np.mean(integrand)), float(2 * np.pi * np.mean(np.abs(integrand)))


def loop_integral(form, loop, tolerances=None):
    """
    ∮ ω over the loop by the periodic trapezoid rule.

    The error estimate is the difference with the same rule on every
    second node. It must stay below integral_tol · max(1, 2π·mean|ω(γ')|).

    Raises:
        NumericFailure: the loop meets a pole of ω, or the error estimate
                        exceeds the tolerance.
    """
    tolerances = tolerances or Tolerances()
    if form.degree != 1 or form.ring.ngens != 2:
        raise NumericFailure("Loop integrals take affine 1-forms in (x, y)")
    value, magnitude = _trapezoid(form, loop.nodes)
    coarse = _trapezoid(form, loop.nodes[::2])[0] if len(loop) >= 8 else value
    error = float(abs(value - coarse))
    bound = tolerances.integral_tol * max(1.0, magnitude)
    if error > bound:
        raise NumericFailure("Loop integral did not converge",
                             {'error': error, 'bound': bound, 'nodes': len(loop)})
    return LoopIntegral(value, error)


# ------------------------------------------------------------
# Period matrices and Melnikov functions
# ------------------------------------------------------------
@dataclass(frozen=True)
class PeriodSample:
    """
    Attributes:
        t:            base value.
        matrix:       [∮_{γ_i} α_j].
        determinant:  det of the matrix, None when it is not square.
        degenerate:   |det| ≤ DEGENERATE_RTOL · Π‖row‖, i.e. the loop
                      family is numerically dependent at t.
    """

    t: complex
    matrix: np.ndarray
    determinant: object
    degenerate: bool = False

    def to_dict(self):
        det = None if self.determinant is None else [self.determinant.real, self.determinant.imag]
        return {
            't': [self.t.real, self.t.imag],
            'matrix': [[[v.real, v.imag] for v in row] for row in self.matrix],
            'determinant': det,
            'degenerate': self.degenerate,
        }


def _is_degenerate(matrix, det):
    """Compare |det| against Hadamard's bound Π‖row‖."""
    bound = float(np.prod(np.linalg.norm(matrix, axis=1)))
    return bound == 0.0 or abs(det) <= DEGENERATE_RTOL * bound


def wronskian_samples(f, loops, ts, forms=None, tolerances=None):
    """
    Period matrices [∮_{γ_i} α_j] along a grid of base values.

    All loops must share one base value; each is transported from grid
    point to grid point. The determinant is reported when the matrix is
    square, and a sample whose determinant vanishes against Hadamard's
    bound is marked degenerate: the loops failed to span there. Whether
    the loops span H₁ of the fiber is not certified otherwise.
    """
    from foliation_kit.brieskorn import hf_basis

    tolerances = tolerances or Tolerances()
    if forms is None:
        forms = hf_basis(f, strict=False).forms
    bases = {loop.t for loop in loops}
    if len(bases) != 1:
        raise NumericFailure("Loops must share a base value")
    current = list(loops)
    samples = []
    for t in ts:
        current = [transport_loop(f, loop, t, tolerances) for loop in current]
        matrix = np.array([[loop_integral(form, loop, tolerances).value for form in forms]
                           for loop in current], dtype=complex)
        det, degenerate = None, False
        if matrix.shape[0] == matrix.shape[1]:
            det = complex(np.linalg.det(matrix))
            degenerate = _is_degenerate(matrix, det)
            if degenerate:
                logger.warning("⚠️  Period determinant vanishes at t = %s: the %d loops are "
                               "numerically dependent", complex(t), len(current))
        samples.append(PeriodSample(complex(t), matrix, det, degenerate))
    return samples


def determinant_ratios(samples, delta):
    """
    det / Δ(t) over the samples with a determinant, and the relative
    spread max|r − r̄| / |r̄| of those ratios.

    For a family spanning H₁ the ratio is constant; the spread measures
    how far a sampled family is from that.
    """
    ratios = np.array([s.determinant / delta(s.t) for s in samples
                       if s.determinant is not None], dtype=complex)
    if not ratios.size:
        return ratios, None
    mean = ratios.mean()
    if mean == 0:
        return ratios, float('inf')
    return ratios, float(np.max(np.abs(ratios - mean)) / abs(mean))


@dataclass(frozen=True)
class MelnikovSample:
    t: complex
    value: complex
    error: float

    def to_dict(self):
        return {'t': [self.t.real, self.t.imag], 'value': [self.value.real, self.value.imag],
                'error': self.error}


def tangency_centers(f, F, tolerances=None):
    """Critical points of F*(f) lying on V(det J_F), on the chart z = 1."""
    from foliation_kit.pullback import jacobian_data, pullback_integral

    tolerances = tolerances or Tolerances()
    pulled = pullback_integral(f, F)
    points, residuals = critical_points(pulled, tolerances, strict=False)
    det = NumericPoly(dehomogenize(jacobian_data(F).discriminant, affine_ring()))
    scale = max(1.0, float(np.max(np.abs(det.coefficients))))
    return [tuple(z) for z, r in zip(points, residuals)
            if abs(det(*z)) < np.sqrt(tolerances.fiber_residual) * scale]


def melnikov1(f, F, omega1, ts, center=None, tolerances=None):
    """
    M₁(t) = −t ∮_{δ_t} ω₁ / F*(PQ) over the vanishing cycle δ_t of a
    tangency center of F*(f).

    Args:
        omega1: polynomial 1-form on the domain of F (x, y, z).
        ts:     base values near the critical value of the center.
        center: affine point (x, y) of the tangency center; found with
                tangency_centers when omitted.

    Returns:
        list[MelnikovSample]
    """
    from foliation_kit.algebra.forms import DifferentialForm
    from foliation_kit.pullback import pullback_integral

    tolerances = tolerances or Tolerances()
    pulled = pullback_integral(f, F)
    if center is None:
        centers = tangency_centers(f, F, tolerances)
        if not centers:
            raise NumericFailure("No tangency center found on V(det J_F)")
        center = centers[0]

    affine = affine_ring()
    divisor = dehomogenize(pulled.P * pulled.Q, affine)
    numerators = [dehomogenize(c, affine) for c in omega1.coeffs[:2]]
    form = DifferentialForm(affine, 1, numerators, divisor, 1)

    evaluator = _FirstIntegralEvaluator(pulled)
    c = complex(evaluator.value(*center))
    samples = []
    for t in ts:
        loop = vanishing_loop(pulled, c, t, tolerances, point=center)
        integral = loop_integral(form, loop, tolerances)
        samples.append(MelnikovSample(complex(t), -complex(t) * integral.value,
                                      abs(t) * integral.error))
    logger.info("M₁ sampled at %d base values", len(samples))
    return samples
