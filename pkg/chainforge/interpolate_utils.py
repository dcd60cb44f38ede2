"""
@file: interpolate_utils.py
@time: 2026/10/17 13:20
@desc: rational interpolation of J²P_A/Q_A and Jacobi reconstruction from it
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.polynomial import Polynomial, Chebyshev
from mpmath import mp

from chainforge.error_utils import (DegenerateSystemError, UnattainablePointError, InfeasibleExtensionError,
                                    IllPosedTargetError)
from chainforge.logger import logger


class _Pole(object):
    """Marker for a target at which P_B vanishes: the constraint becomes Q_A(x) = 0"""

    def __repr__(self):
        return 'Pole'

    def __reduce__(self):
        return 'POLE'


POLE = _Pole()


@dataclass(frozen=True)
class UnknownJ(object):
    """Junction coupling is solved for; J² is the numerator's leading coefficient"""

    @property
    def squared(self):
        return None


@dataclass(frozen=True)
class KnownJ(object):
    """Junction coupling fixed in advance"""
    value: float

    @property
    def squared(self):
        return float(self.value) ** 2


UNKNOWN_J = UnknownJ()


@dataclass(frozen=True)
class TargetValue(object):
    """Interpolation datum f(node) = Q_B/P_B as a projective pair

    Attributes:
        node: target eigenvalue (or its reduced image)
        value: Q_B/P_B, or POLE when P_B vanishes
        weights: (α, β) proportional to (Q_B, P_B) with unit norm
    """
    node: float
    value: object
    weights: tuple

    @classmethod
    def from_value(cls, node, value):
        return cls(float(node), value, _projective(value))

    @classmethod
    def from_pair(cls, node, q_value, p_value, pole_tol=1e-12):
        norm = math.hypot(q_value, p_value)
        alpha, beta = q_value / norm, p_value / norm
        if abs(beta) <= pole_tol:
            return cls(float(node), POLE, (math.copysign(1.0, alpha), 0.0))
        return cls(float(node), alpha / beta, (alpha, beta))


def _projective(value):
    if value is POLE:
        return 1.0, 0.0
    value = float(value)
    if abs(value) > 1.0:
        inverse = 1.0 / abs(value)
        norm = math.hypot(1.0, inverse)
        return math.copysign(1.0, value) / norm, inverse / norm
    norm = math.hypot(value, 1.0)
    return value / norm, 1.0 / norm


def _as_target_values(data):
    return [item if isinstance(item, TargetValue) else TargetValue.from_value(*item) for item in data]


def leading_coefficient(poly):
    """Leading monomial coefficient of a Polynomial or Chebyshev series, domain included."""
    degree = len(poly.coef) - 1
    _, scale = poly.mapparms()
    coefficient = poly.coef[-1] * scale ** degree
    if isinstance(poly, Chebyshev) and degree >= 1:
        coefficient *= 2.0 ** (degree - 1)
    return float(coefficient)


def _to_monomial(poly):
    return poly.convert(kind=Polynomial, domain=[-1, 1], window=[-1, 1])


def _polish_roots(series, roots, steps=4):
    """Newton steps on the stored series, each kept only if |series| drops

    Steps longer than half the distance to the nearest other root are
    skipped so two roots never merge.
    """
    roots = np.asarray(roots)
    if len(roots) == 0:
        return roots
    derivative = series.deriv()
    if len(roots) > 1:
        distance = np.abs(roots[:, None] - roots[None, :])
        np.fill_diagonal(distance, np.inf)
        reach = 0.5 * np.min(distance, axis=1)
    else:
        reach = np.full(1, np.inf)
    for _ in range(steps):
        with np.errstate(divide='ignore', invalid='ignore'):
            step = series(roots) / derivative(roots)
        step = np.where(np.isfinite(step) & (np.abs(step) < reach), step, 0.0)
        candidate = roots - step
        roots = np.where(np.abs(series(candidate)) <= np.abs(series(roots)), candidate, roots)
    return roots


def _interleave(coefficients, odd):
    result = np.zeros(2 * len(coefficients) - 1 + (1 if odd else 0))
    result[(1 if odd else 0)::2] = coefficients
    return result


@dataclass(frozen=True, eq=False)
class RationalFunction(object):
    """f(x) = N(x)/Q(x) with Q monic, housing (J²P_A, Q_A)

    With lift='even' the stored series are in z = x² and
    f(x) = x·p(x²)/q(x²); with lift='odd', f(x) = p(x²)/(x·q(x²)).

    Attributes:
        numerator: numpy polynomial series
        denominator: numpy polynomial series of the same kind
        lift: None, 'even' or 'odd'
    """
    numerator: object
    denominator: object
    lift: str = None

    def __post_init__(self):
        lead = leading_coefficient(self.denominator)
        if lead == 0.0 or not np.isfinite(lead):
            raise DegenerateSystemError('denominator has a vanishing leading coefficient')
        object.__setattr__(self, 'numerator', self.numerator / lead)
        object.__setattr__(self, 'denominator', self.denominator / lead)

    @classmethod
    def from_coefficients(cls, numerator, denominator):
        """Ascending monomial coefficients in x."""
        return cls(Polynomial(np.asarray(numerator, dtype=float)), Polynomial(np.asarray(denominator, dtype=float)))

    @property
    def numerator_degree(self):
        degree = len(self.numerator.coef) - 1
        if self.lift == 'even':
            return 2 * degree + 1
        if self.lift == 'odd':
            return 2 * degree
        return degree

    @property
    def denominator_degree(self):
        degree = len(self.denominator.coef) - 1
        if self.lift == 'even':
            return 2 * degree
        if self.lift == 'odd':
            return 2 * degree + 1
        return degree

    @property
    def numerator_coefficients(self):
        coefficients = _to_monomial(self.numerator).coef
        if self.lift is None:
            return coefficients
        return _interleave(coefficients, odd=(self.lift == 'even'))

    @property
    def denominator_coefficients(self):
        coefficients = _to_monomial(self.denominator).coef
        if self.lift is None:
            return coefficients
        return _interleave(coefficients, odd=(self.lift == 'odd'))

    @property
    def leading_numerator(self):
        return leading_coefficient(self.numerator)

    def pair(self, x):
        """(N(x), Q(x)) evaluated through the stored series."""
        x = np.asarray(x, dtype=float)
        if self.lift == 'even':
            return x * self.numerator(x * x), self.denominator(x * x)
        if self.lift == 'odd':
            return self.numerator(x * x), x * self.denominator(x * x)
        return self.numerator(x), self.denominator(x)

    def __call__(self, x):
        numerator, denominator = self.pair(x)
        return numerator / denominator

    def poles_and_residues(self):
        """Roots μ_k of Q and residues N(μ_k)/Q'(μ_k), in decreasing pole order

        Companion-matrix roots are polished by Newton steps on the stored
        series before the residues are taken.
        """
        if self.lift is None:
            poles = _polish_roots(self.denominator, self.denominator.roots())
            residues = self.numerator(poles) / self.denominator.deriv()(poles)
        else:
            squares = self.denominator.roots() if len(self.denominator.coef) > 1 else np.zeros(0)
            squares = _polish_roots(self.denominator, squares)
            roots = np.sqrt(squares.astype(complex))
            slope = self.denominator.deriv()(squares) if len(squares) else squares
            if self.lift == 'even':
                branch = self.numerator(squares) / (2.0 * slope)
                poles = np.concatenate([roots, -roots])
                residues = np.concatenate([branch, branch])
            else:
                branch = self.numerator(squares) / (2.0 * squares * slope)
                poles = np.concatenate([[0.0], roots, -roots])
                residues = np.concatenate([[self.numerator(0.0) / self.denominator(0.0)], branch, branch])
        order = np.argsort(-np.real(poles))
        return np.asarray(poles)[order], np.asarray(residues)[order]

    def __repr__(self):
        return 'RationalFunction(deg {0}/{1}, lift={2})'.format(
            self.numerator_degree, self.denominator_degree, self.lift)


class RationalInterpolation(object):
    """Fits Q_A·Q_B = J²·P_A·P_B at the targets

    The linear reading of the extension condition: every target gives one
    homogeneous equation α·q(x) - β·p(x) = 0 in the coefficients. The system
    is written in a Chebyshev basis over the node interval, columns are
    equilibrated, and the coefficient vector is the smallest right singular
    vector. Poles (β = 0) need no special case.

    Attributes:
        NOISE_DIGITS: trailing digits of an extended-precision solve taken as rounding noise
    """

    NOISE_DIGITS = 8

    def __init__(self):
        pass

    @staticmethod
    def _reduce_pairs(nodes, pairs, odd):
        reduced = []
        for node, (alpha, beta) in zip(nodes, pairs):
            if node == 0.0:
                raise IllPosedTargetError('field-free reduction needs nonzero nodes', node)
            alpha, beta = (alpha * node, beta) if odd else (alpha, beta * node)
            norm = math.hypot(alpha, beta)
            reduced.append((alpha / norm, beta / norm))
        return reduced

    @staticmethod
    def fieldfree_reduce(nodes, values, odd=False):
        """Map data of an odd function f onto g with g(x²) = f(x)/x

        :param nodes: positive target eigenvalues
        :param values: f at the nodes (POLE allowed)
        :param odd: True for odd extension length, where g(x²) = x·f(x)
        :return: (reduced nodes, reduced values)
        """
        nodes = [float(x) for x in nodes]
        if any(x <= 0.0 for x in nodes):
            raise IllPosedTargetError('field-free reduction needs positive nodes')
        reduced = []
        for node, value in zip(nodes, values):
            if value is POLE:
                reduced.append(POLE)
            else:
                reduced.append(value * node if odd else value / node)
        return [x * x for x in nodes], reduced

    @staticmethod
    def fieldfree_reduce_targets(targets, odd=False):
        """fieldfree_reduce on TargetValue data, keeping the projective pairs exact."""
        nodes = [t.node for t in targets]
        if any(x <= 0.0 for x in nodes):
            raise IllPosedTargetError('field-free reduction needs positive nodes')
        pairs = RationalInterpolation._reduce_pairs(nodes, [t.weights for t in targets], odd)
        reduced = []
        for node, (alpha, beta) in zip(nodes, pairs):
            value = POLE if beta == 0.0 else alpha / beta
            reduced.append(TargetValue(node * node, value, (alpha, beta)))
        return reduced

    @staticmethod
    def fieldfree_lift(rational, odd=False):
        """g = p/q in z = x² becomes f(x) = x·p(x²)/q(x²) (or p(x²)/(x·q(x²)) when odd)."""
        if rational.lift is not None:
            raise ValueError('rational function is already lifted')
        return RationalFunction(rational.numerator, rational.denominator, 'odd' if odd else 'even')

    @staticmethod
    def _basis(points, degree, domain):
        low, high = domain
        mapped = (2.0 * np.asarray(points) - (low + high)) / (high - low)
        return np.polynomial.chebyshev.chebvander(mapped, degree)

    @staticmethod
    def _leading_row(deg_num, deg_den, squared, domain):
        lead_q = leading_coefficient(Chebyshev(np.eye(deg_den + 1)[deg_den], domain))
        lead_p = leading_coefficient(Chebyshev(np.eye(deg_num + 1)[deg_num], domain))
        row = np.zeros(deg_den + deg_num + 2)
        row[deg_den] = -squared * lead_q
        row[deg_den + 1 + deg_num] = lead_p
        return row / np.max(np.abs(row))

    @staticmethod
    def _null_vector_extended(targets, deg_num, deg_den, domain, leading_row, column_scale, dps):
        """Null vector of the same system rebuilt in mpmath at dps digits

        :return: (vector, condition) with condition = σ_max/σ_(C-1)
        """
        low, high = domain
        with mp.workdps(dps):
            low, high = mp.mpf(low), mp.mpf(high)
            columns = deg_den + deg_num + 2
            rows = []
            for target in targets:
                y = (2 * mp.mpf(target.node) - (low + high)) / (high - low)
                chebyshev = [mp.mpf(1), y]
                for _ in range(2, max(deg_num, deg_den) + 1):
                    chebyshev.append(2 * y * chebyshev[-1] - chebyshev[-2])
                alpha, beta = mp.mpf(target.weights[0]), mp.mpf(target.weights[1])
                rows.append([alpha * chebyshev[k] for k in range(deg_den + 1)]
                            + [-beta * chebyshev[k] for k in range(deg_num + 1)])
            if leading_row is not None:
                rows.append([mp.mpf(v) for v in leading_row])
            # zero rows keep the factorisation square when the system is exactly determined
            rows.extend([mp.mpf(0)] * columns for _ in range(columns - len(rows)))
            scale = [mp.mpf(s) for s in column_scale]
            matrix = mp.matrix([[row[j] * scale[j] for j in range(columns)] for row in rows])
            _, singular, right = mp.svd_r(matrix, full_matrices=True)
            order = sorted(range(columns), key=lambda i: singular[i])
            rank_floor, largest = singular[order[1]], singular[order[-1]]
            condition = largest / rank_floor if rank_floor > 0 else mp.inf
            vector = np.array([float(right[order[0], j]) for j in range(columns)])
            return vector, float(condition)

    @staticmethod
    def interpolate_rational(data, deg_num, deg_den, mode=UNKNOWN_J, domain=None, tol=1e-10,
                             precision_threshold=1e12, dps=40):
        """Rational p/q with deg p = deg_num, monic q of degree deg_den, through the data

        :param data: TargetValue items or (node, value) tuples, value may be POLE
        :param deg_num: numerator degree
        :param deg_den: denominator degree
        :param mode: UnknownJ, or KnownJ whose J² the numerator's leading coefficient must equal
        :param domain: interval of the Chebyshev basis, defaults to the node hull
        :param tol: residual tolerance at the nodes
        :param precision_threshold: conditioning above which the solve is redone in mpmath
        :param dps: digits of the mpmath solve
        :return: RationalFunction
        """
        targets = _as_target_values(data)
        nodes = np.array([t.node for t in targets])
        if len(set(nodes.tolist())) != len(nodes):
            raise DegenerateSystemError('interpolation nodes must be distinct')
        unknowns = deg_num + deg_den + 1 - (0 if mode.squared is None else 1)
        if len(targets) < unknowns:
            raise DegenerateSystemError('{0} constraints for {1} unknowns'.format(len(targets), unknowns))
        if len(targets) > unknowns:
            logger.warning('{0} constraints for {1} unknowns, solving in the least-squares sense'.format(
                len(targets), unknowns))

        if domain is None:
            low, high = float(np.min(nodes)), float(np.max(nodes))
            if high - low < 1e-12 * max(abs(high), 1.0):
                low, high = low - 1.0, high + 1.0
            domain = (low, high)
        weights = np.array([t.weights for t in targets])
        matrix = np.hstack([weights[:, :1] * RationalInterpolation._basis(nodes, deg_den, domain),
                            -weights[:, 1:] * RationalInterpolation._basis(nodes, deg_num, domain)])
        leading_row = None
        if mode.squared is not None:
            leading_row = RationalInterpolation._leading_row(deg_num, deg_den, mode.squared, domain)
            matrix = np.vstack([matrix, leading_row])

        column_scale = 1.0 / np.maximum(np.linalg.norm(matrix, axis=0), np.finfo(float).tiny)
        _, singular, right = scipy.linalg.svd(matrix * column_scale, full_matrices=True)
        columns = matrix.shape[1]
        rank_floor = singular[columns - 2] if len(singular) >= columns - 1 else 0.0
        condition = singular[0] / rank_floor if rank_floor > 0 else np.inf
        logger.debug('interpolation system {0}x{1}, condition {2:.3e}'.format(
            matrix.shape[0], columns, condition))
        vector = right[-1]
        if not np.isfinite(condition) or condition > precision_threshold:
            logger.info('condition {0:.3e} above {1:.1e}, re-solving with {2} digits'.format(
                condition, precision_threshold, dps))
            vector, condition = RationalInterpolation._null_vector_extended(
                targets, deg_num, deg_den, domain, leading_row, column_scale, dps)
            logger.debug('extended-precision condition {0:.3e}'.format(condition))
            noise_floor = 10.0 ** (RationalInterpolation.NOISE_DIGITS - dps)
            if not np.isfinite(condition) or condition * columns * noise_floor > 1.0:
                raise DegenerateSystemError(
                    'rank-deficient interpolation system (condition {0:.3e} at {1} digits)'.format(condition, dps),
                    condition)
        elif condition * columns * np.finfo(float).eps > 1.0:
            raise DegenerateSystemError('rank-deficient interpolation system (condition {0:.3e})'.format(condition),
                                        condition)
        vector = vector * column_scale
        denominator = Chebyshev(vector[:deg_den + 1], domain)
        numerator = Chebyshev(vector[deg_den + 1:], domain)
        if abs(leading_coefficient(denominator)) <= np.finfo(float).eps * np.max(np.abs(denominator.coef)):
            raise DegenerateSystemError('solution lost the denominator degree (condition {0:.3e})'.format(condition),
                                        condition)
        rational = RationalFunction(numerator, denominator)
        RationalInterpolation._check_residuals(rational, targets, tol)
        return rational

    @staticmethod
    def _check_residuals(rational, targets, tol):
        nodes = np.array([t.node for t in targets])
        q_values = rational.denominator(nodes)
        p_values = rational.numerator(nodes)
        scale = np.max(np.abs(q_values) + np.abs(p_values))
        unattainable = []
        worst = 0.0
        for target, q_value, p_value in zip(targets, q_values, p_values):
            alpha, beta = target.weights
            worst = max(worst, abs(alpha * q_value - beta * p_value) / scale)
            if abs(q_value) <= tol * scale and abs(p_value) <= tol * scale:
                unattainable.append(target.node)
        if unattainable:
            raise UnattainablePointError('numerator and denominator vanish together at {0}'.format(unattainable),
                                         unattainable)
        if worst > tol:
            logger.warning('interpolation residual {0:.3e} above tolerance {1:.1e}'.format(worst, tol))
        else:
            logger.debug('interpolation residual {0:.3e}'.format(worst))
        return worst


class JacobiReconstruction(object):
    """Rebuilds the extension A from f = J²P_A/Q_A

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    def lanczos(poles, weights):
        """Jacobi matrix with eigenvalues `poles` and squared first components `weights`

        Lanczos on diag(poles) from √weights, re-orthogonalised twice per step.

        :return: (diagonal, off-diagonal)
        """
        poles = np.asarray(poles, dtype=float)
        size = len(poles)
        basis = np.zeros((size, size))
        basis[:, 0] = np.sqrt(weights) / np.linalg.norm(np.sqrt(weights))
        diagonal = np.zeros(size)
        offdiagonal = np.zeros(max(size - 1, 0))
        for k in range(size):
            vector = poles * basis[:, k]
            diagonal[k] = basis[:, k] @ vector
            if k == size - 1:
                break
            for _ in range(2):
                vector -= basis[:, :k + 1] @ (basis[:, :k + 1].T @ vector)
            offdiagonal[k] = np.linalg.norm(vector)
            if offdiagonal[k] <= 1e-14 * max(np.max(np.abs(poles)), 1.0):
                raise InfeasibleExtensionError('Lanczos broke down at step {0}: repeated poles'.format(k + 1))
            basis[:, k + 1] = vector / offdiagonal[k]
        return diagonal, offdiagonal

    @staticmethod
    def _euclid(rational, squared):
        numerator = Polynomial(rational.numerator_coefficients)
        remainder_q = Polynomial(rational.denominator_coefficients)
        remainder_p = numerator / squared
        diagonal, offdiagonal = [], []
        while True:
            degree_p = len(remainder_p.coef) - 1
            quotient, remainder = divmod(remainder_q, remainder_p)
            quotient = Polynomial(np.pad(quotient.coef, (0, max(0, 2 - len(quotient.coef))))[:2])
            diagonal.append(-quotient.coef[0] / quotient.coef[1])
            if degree_p == 0:
                break
            coefficients = np.pad(remainder.coef, (0, max(0, degree_p - len(remainder.coef))))[:degree_p]
            coupling_sq = -coefficients[-1]
            if coupling_sq <= 0.0:
                raise InfeasibleExtensionError('negative squared coupling {0:.3e} at step {1}'.format(
                    coupling_sq, len(diagonal)))
            offdiagonal.append(math.sqrt(coupling_sq))
            remainder_q, remainder_p = remainder_p, Polynomial(coefficients / -coupling_sq)
        return np.array(diagonal), np.array(offdiagonal)

    @staticmethod
    def reconstruct_chain(rational, mode=UNKNOWN_J, method='lanczos', tol=1e-8):
        """Continued-fraction expansion Q/P = (x - a_1) - b_1²/((x - a_2) - ...)

        :param rational: f = J²P_A/Q_A
        :param mode: UnknownJ (J² from the numerator's leading coefficient) or KnownJ
        :param method: 'lanczos' (poles and residues, stable) or 'euclid' (polynomial division)
        :param tol: relative tolerance of the realness and consistency checks
        :return: (couplings b_k, fields a_k, J)
        """
        squared = rational.leading_numerator if mode.squared is None else mode.squared
        if method == 'euclid':
            if squared <= 0.0:
                raise InfeasibleExtensionError('non-positive J² = {0:.3e}'.format(squared))
            fields, couplings = JacobiReconstruction._euclid(rational, squared)
            return couplings, fields, math.sqrt(squared)
        if method != 'lanczos':
            raise ValueError('unknown reconstruction method {0}'.format(method))

        poles, residues = rational.poles_and_residues()
        if not np.all(np.isfinite(residues)):
            raise InfeasibleExtensionError('Q_A has a repeated root at zero')
        scale = max(float(np.max(np.abs(poles), initial=0.0)), 1.0)
        if np.any(np.abs(np.imag(poles)) > tol * scale):
            raise InfeasibleExtensionError('Q_A has complex roots: no real chain realises these targets')
        poles = np.real(poles)
        residues = np.real(residues)
        if len(poles) > 1 and np.min(-np.diff(poles)) <= tol * scale:
            raise InfeasibleExtensionError('Q_A has repeated roots')
        if np.any(residues <= 0.0):
            raise InfeasibleExtensionError('roots of P_A and Q_A do not interlace ({0} negative residues)'.format(
                int(np.sum(residues <= 0.0))))
        total = float(np.sum(residues))
        if mode.squared is not None and abs(total - squared) > tol * squared:
            logger.warning('residue sum {0:.12g} differs from the known J² {1:.12g}'.format(total, squared))
        if mode.squared is None:
            squared = total
        fields, couplings = JacobiReconstruction.lanczos(poles, residues / total)
        return couplings, fields, math.sqrt(squared)
