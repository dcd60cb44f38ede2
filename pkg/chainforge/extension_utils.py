"""
@file: extension_utils.py
@time: 2026/10/17 14:05
@desc: symmetric extensions of a fixed central chain that pin chosen eigenvalues
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import least_squares

from chainforge.chain_utils import ChainSpec, JacobiMatrix, ChainHamiltonian, ChainSpectrum
from chainforge.error_utils import (ChainSpecError, SymmetryError, IllPosedTargetError, DegenerateSystemError,
                                    VerificationError)
from chainforge.interpolate_utils import (POLE, TargetValue, UnknownJ, KnownJ, UNKNOWN_J, RationalFunction,
                                          RationalInterpolation,
                                          JacobiReconstruction)
from chainforge.logger import logger

SYMMETRIES = ('+', '-')


@dataclass(frozen=True)
class SolverOptions(object):
    """Explicit solver options; the CLI fills them from config.ini

    Attributes:
        tolerance: relative residual tolerance of interpolation and extension-condition checks
        spectral_tolerance: target match tolerance, relative to max|target|
        precision_threshold: conditioning that triggers the mpmath null-vector solve
        dps: digits of that solve
        refine: polish the extension against the target eigenvalues
        method: 'lanczos' or 'euclid' reconstruction
        verify: raise VerificationError when the assembled chain misses a target
    """
    tolerance: float = 1e-10
    spectral_tolerance: float = 1e-8
    precision_threshold: float = 1e12
    dps: int = 40
    refine: bool = True
    method: str = 'lanczos'
    verify: bool = True

    @classmethod
    def from_settings(cls, setting, **overrides):
        options = dict(tolerance=setting.get_float('tolerance'),
                       spectral_tolerance=setting.get_float('spectral_tolerance'),
                       precision_threshold=setting.get_float('extended_precision_threshold'),
                       dps=setting.get_int('extended_precision_dps'),
                       refine=setting.get_boolean('refine'))
        options.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**options)


@dataclass(frozen=True, eq=False)
class ExtensionProblem(object):
    """Central chain B, extension length M, junction mode and labelled targets

    In field-free mode the targets list only positive eigenvalues; each
    (λ, σ) implies (-λ, -σ), or (-λ, σ) when the central chain is odd.

    Attributes:
        central: mirror-symmetric ChainSpec
        extension_size: M >= 1
        junction_mode: KnownJ or UnknownJ
        targets: tuple of (eigenvalue, '+'|'-')
        field_free: extension carries no fields
        delta: ladder spacing the targets were generated from, if any
    """
    central: ChainSpec
    extension_size: int
    junction_mode: object = UNKNOWN_J
    targets: tuple = ()
    field_free: bool = True
    delta: float = None

    def __post_init__(self):
        targets = tuple((float(value), str(label)) for value, label in self.targets)
        object.__setattr__(self, 'targets', targets)
        if self.extension_size < 1:
            raise ChainSpecError('extension needs at least one site, got M={0}'.format(self.extension_size))
        if not isinstance(self.junction_mode, (KnownJ, UnknownJ)):
            raise ChainSpecError('junction mode must be KnownJ or UnknownJ')
        if not ChainHamiltonian.mirror_symmetric(self.central):
            raise SymmetryError('central chain is not mirror-symmetric')
        if self.central.size < 2:
            raise ChainSpecError('central chain needs at least two sites')
        if any(label not in SYMMETRIES for _, label in targets):
            raise ChainSpecError('target symmetry must be "+" or "-"')
        if len(set(targets)) != len(targets) or len({v for v, _ in targets}) != len(targets):
            raise ChainSpecError('targets must be distinct')
        if self.field_free:
            if not self.central.field_free:
                raise ChainSpecError('field-free extension needs a field-free central chain')
            if any(value <= 0.0 for value, _ in targets):
                raise ChainSpecError('field-free targets list only the positive member of each pair')
        expected = self.required_targets()
        if len(targets) not in expected:
            raise DegenerateSystemError('M={0} in this mode needs {1} targets, got {2}'.format(
                self.extension_size, ' or '.join(str(e) for e in expected), len(targets)))

    @property
    def known_junction(self):
        return isinstance(self.junction_mode, KnownJ)

    def required_targets(self):
        m = self.extension_size
        if self.field_free:
            return (m - 1, m) if self.known_junction else (m,)
        return (2 * m - 1,) if self.known_junction else (2 * m,)

    def all_targets(self):
        """Listed targets plus the implied mirror partners in field-free mode."""
        if not self.field_free:
            return list(self.targets)
        if self.central.size % 2:
            return list(self.targets) + [(-value, label) for value, label in self.targets]
        mirrored = [(-value, '-' if label == '+' else '+') for value, label in self.targets]
        return list(self.targets) + mirrored


@dataclass(frozen=True)
class TargetResidual(object):
    node: float
    symmetry: str
    condition_residual: float
    spectral_residual: float


@dataclass(frozen=True, eq=False)
class ExtensionSolution(object):
    """Solved extension and its residual report

    Attributes:
        extension: M-site ChainSpec, site 0 at the junction
        junction: coupling J
        assembled: reversed(extension) - J - central - J - extension
        achieved_targets: TargetResidual per listed target
        diagnostics: solver path details (degrees, refinement, method)
    """
    extension: ChainSpec
    junction: float
    assembled: ChainSpec
    achieved_targets: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def max_condition_residual(self):
        return max((r.condition_residual for r in self.achieved_targets), default=0.0)

    @property
    def max_spectral_residual(self):
        return max((r.spectral_residual for r in self.achieved_targets), default=0.0)


class ExtensionSolver(object):
    """Designs the boundary extension

    Each target (λ, σ) turns the eigenvalue condition of the folded
    assembled chain, Q_A·Q_B^σ = J²·P_A·P_B^σ, into one interpolation datum
    for f = J²P_A/Q_A. The fitted f is expanded back into the extension.

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    def _sector(central, symmetry):
        plus, minus = ChainHamiltonian.fold_symmetric(central)
        return plus if symmetry == '+' else minus

    @staticmethod
    def _submatrix(block):
        if block.size == 1:
            return None
        return JacobiMatrix(block.diag[1:], block.offdiag[1:])

    @staticmethod
    def target_values(central, targets, tol=1e-10):
        """Values f(λ) = Q_B^σ(λ)/P_B^σ(λ) on the folded central blocks

        :param central: mirror-symmetric ChainSpec
        :param targets: iterable of (λ, σ)
        :param tol: relative distance at which λ counts as a root
        :return: list of TargetValue, value POLE where P_B^σ(λ) vanishes
        """
        blocks = dict(zip(SYMMETRIES, ChainHamiltonian.fold_symmetric(central)))
        roots = {}
        for symmetry, block in blocks.items():
            submatrix = ExtensionSolver._submatrix(block)
            roots[symmetry] = (ChainSpectrum.eigenvalues(block),
                               ChainSpectrum.eigenvalues(submatrix) if submatrix is not None else np.zeros(0))
        data = []
        for node, symmetry in targets:
            block = blocks[symmetry]
            scale = max(block.norm(), abs(node), 1.0)
            block_roots, sub_roots = roots[symmetry]
            on_q = len(block_roots) and np.min(np.abs(block_roots - node)) <= tol * scale
            on_p = len(sub_roots) and np.min(np.abs(sub_roots - node)) <= tol * scale
            if on_q and on_p:
                raise IllPosedTargetError('target {0!r} ({1}) is a root of both Q_B and P_B'.format(node, symmetry),
                                          node)
            if on_p:
                data.append(TargetValue(float(node), POLE, (1.0, 0.0)))
                continue
            q_value, p_value, _ = ChainSpectrum.char_poly_eval_scaled(block, node)
            data.append(TargetValue.from_pair(node, float(q_value), float(p_value), pole_tol=0.0))
        return data

    @staticmethod
    def pst_target_spectrum(extension_size, delta):
        """Ladder targets δ(M-2k-½) (symmetric) and δ(M-2k-3/2) (antisymmetric)

        :return: (symmetric list, antisymmetric list), each in decreasing order
        """
        if extension_size < 1 or delta <= 0.0:
            raise ChainSpecError('need M >= 1 and delta > 0')
        k = np.arange(extension_size)
        symmetric = delta * (extension_size - 2 * k - 0.5)
        antisymmetric = delta * (extension_size - 2 * k - 1.5)
        return symmetric.tolist(), antisymmetric.tolist()

    @staticmethod
    def targets_from_spectrum(symmetric, antisymmetric, field_free=True):
        """Label ladder sets; field-free mode keeps only the positive members."""
        targets = [(float(v), '+') for v in symmetric] + [(float(v), '-') for v in antisymmetric]
        if field_free:
            targets = [t for t in targets if t[0] > 0.0]
        return sorted(targets, key=lambda t: -t[0])

    @staticmethod
    def problem_from_delta(central, extension_size, delta, junction_mode=UNKNOWN_J, field_free=True):
        symmetric, antisymmetric = ExtensionSolver.pst_target_spectrum(extension_size, delta)
        targets = ExtensionSolver.targets_from_spectrum(symmetric, antisymmetric, field_free)
        return ExtensionProblem(central, extension_size, junction_mode, tuple(targets), field_free, delta)

    @staticmethod
    def _degrees(problem):
        m = problem.extension_size
        if problem.field_free:
            return (m // 2 - 1, m // 2) if m % 2 == 0 else (m // 2, m // 2)
        return m - 1, m

    @staticmethod
    def solve_extension(problem, options=None):
        """Extension of problem.central whose assembled chain has every target

        :param problem: ExtensionProblem
        :param options: SolverOptions
        :return: ExtensionSolution
        """
        options = options or SolverOptions()
        m = problem.extension_size
        data = ExtensionSolver.target_values(problem.central, problem.targets, options.tolerance)
        deg_num, deg_den = ExtensionSolver._degrees(problem)
        odd = m % 2 == 1
        if problem.field_free:
            reduced = RationalInterpolation.fieldfree_reduce_targets(data, odd=odd)
            if deg_den == 0 and deg_num == 0 and problem.known_junction:
                # M = 1 with J fixed: f(x) = J²/x, nothing left to fit
                logger.warning('{0} constraints for 0 unknowns, checking them only'.format(len(reduced)))
                g = RationalFunction(Polynomial([problem.junction_mode.squared]), Polynomial([1.0]))
            else:
                g = RationalInterpolation.interpolate_rational(
                    reduced, deg_num, deg_den, problem.junction_mode, tol=options.tolerance,
                    precision_threshold=options.precision_threshold, dps=options.dps)
            rational = RationalInterpolation.fieldfree_lift(g, odd=odd)
        else:
            rational = RationalInterpolation.interpolate_rational(
                data, deg_num, deg_den, problem.junction_mode, tol=options.tolerance,
                precision_threshold=options.precision_threshold, dps=options.dps)
        couplings, fields, junction = JacobiReconstruction.reconstruct_chain(
            rational, problem.junction_mode, method=options.method)
        if problem.field_free:
            fields = np.zeros(m)
        if problem.known_junction:
            junction = abs(problem.junction_mode.value)
        logger.debug('reconstructed M={0} extension, J={1:.17g}'.format(m, junction))

        diagnostics = {'method': options.method, 'deg_num': deg_num, 'deg_den': deg_den, 'refined': False}
        solution = ExtensionSolver._package(problem, couplings, fields, junction, options, diagnostics)
        if options.refine:
            solution = ExtensionSolver.refine_extension(problem, solution, options)
        if options.verify:
            ExtensionSolver.verify_solution(problem, solution, options)
        return solution

    @staticmethod
    def _package(problem, couplings, fields, junction, options, diagnostics):
        extension = ChainSpec(couplings, fields)
        assembled = ChainHamiltonian.assemble_chain(problem.central, couplings, fields, junction)
        report = ExtensionSolver.residual_report(problem, extension, junction, assembled)
        return ExtensionSolution(extension, float(junction), assembled, tuple(report), diagnostics)

    @staticmethod
    def condition_residual(central, extension, junction, node, symmetry):
        """|Q_A Q_B^σ - J² P_A P_B^σ| relative to (|Q_A| + J²|P_A|)(|Q_B^σ| + |P_B^σ|)

        Each side's pair shares one power-of-two exponent, which cancels in
        the ratio. The factor scale stays finite at pole targets, where
        Q_A and P_B^σ vanish together.
        """
        block = ExtensionSolver._sector(central, symmetry)
        q_b, p_b, _ = ChainSpectrum.char_poly_eval_scaled(block, node)
        q_a, p_a, _ = ChainSpectrum.char_poly_eval_scaled(ChainHamiltonian.build_hamiltonian(extension), node)
        squared = junction ** 2
        scale = (abs(q_a) + squared * abs(p_a)) * (abs(q_b) + abs(p_b))
        scale = max(float(scale), np.finfo(float).tiny)
        return float(abs(q_a * q_b - squared * p_a * p_b) / scale)

    @staticmethod
    def residual_report(problem, extension, junction, assembled):
        decomposition = ChainSpectrum.eigendecompose(assembled)
        report = []
        for node, symmetry in problem.targets:
            sector = decomposition.eigenvalues[decomposition.sector(symmetry)]
            spectral = float(np.min(np.abs(sector - node))) if len(sector) else math.inf
            report.append(TargetResidual(node, symmetry,
                                         ExtensionSolver.condition_residual(problem.central, extension, junction,
                                                                      node, symmetry),
                                         spectral))
        return report

    @staticmethod
    def verify_solution(problem, solution, options):
        """Every target, mirror partners included, in the right sector of the assembled spectrum."""
        decomposition = ChainSpectrum.eigendecompose(solution.assembled)
        targets = problem.all_targets()
        tolerance = options.spectral_tolerance * max(abs(v) for v, _ in targets)
        missed = []
        for node, symmetry in targets:
            sector = decomposition.eigenvalues[decomposition.sector(symmetry)]
            if not len(sector) or np.min(np.abs(sector - node)) > tolerance:
                missed.append((node, symmetry))
        if missed:
            raise VerificationError('assembled chain misses {0} of {1} targets, first {2}'.format(
                len(missed), len(targets), missed[0]), solution)
        logger.debug('all {0} targets within {1:.3e}'.format(len(targets), tolerance))

    @staticmethod
    def _site_maps(problem):
        m = problem.extension_size
        size = 2 * m + problem.central.size
        coupling_sites = [(m - 2 - k, size - m + k) for k in range(m - 1)]
        field_sites = [(m - 1 - k, size - m + k) for k in range(m)]
        junction_sites = (m - 1, size - m - 1)
        return coupling_sites, field_sites, junction_sites

    @staticmethod
    def _unpack(problem, solution, params):
        m = problem.extension_size
        couplings = params[:m - 1]
        fields = np.zeros(m) if problem.field_free else params[m - 1:2 * m - 1]
        junction = solution.junction if problem.known_junction else params[-1]
        return np.abs(couplings), fields, abs(junction)

    @staticmethod
    def refine_extension(problem, solution, options=None):
        """Least-squares polish of the extension against the target eigenvalues

        Residuals are assembled-chain eigenvalues minus their targets; the
        Jacobian is Hellmann-Feynman (dλ/dJ_n = 2v_n v_{n+1}, dλ/dB_n = v_n²)
        summed over both mirror copies of every parameter.

        :return: the refined solution, or the input one if nothing improved
        """
        options = options or SolverOptions()
        targets = np.array([v for v, _ in problem.targets])
        labels = [s for _, s in problem.targets]
        coupling_sites, field_sites, junction_sites = ExtensionSolver._site_maps(problem)

        def match(assembled):
            decomposition = ChainSpectrum.eigendecompose(assembled)
            chosen = []
            for node, symmetry in zip(targets, labels):
                sector = decomposition.sector(symmetry)
                chosen.append(sector[np.argmin(np.abs(decomposition.eigenvalues[sector] - node))])
            return decomposition, chosen

        initial, chosen = match(solution.assembled)
        if len(set(chosen)) != len(chosen):
            logger.warning('target to eigenvalue matching is not one-to-one, refinement skipped')
            return solution

        def assemble(params):
            couplings, fields, junction = ExtensionSolver._unpack(problem, solution, params)
            return ChainHamiltonian.assemble_chain(problem.central, couplings, fields, junction)

        def residuals(params):
            decomposition, picked = match(assemble(params))
            return decomposition.eigenvalues[picked] - targets

        def jacobian(params):
            decomposition, picked = match(assemble(params))
            vectors = decomposition.eigenvectors[:, picked]
            columns = [sum(2.0 * vectors[i] * vectors[i + 1] for i in sites) for sites in coupling_sites]
            if not problem.field_free:
                columns += [sum(vectors[i] ** 2 for i in sites) for sites in field_sites]
            if not problem.known_junction:
                columns.append(sum(2.0 * vectors[i] * vectors[i + 1] for i in junction_sites))
            return np.column_stack(columns) if columns else np.zeros((len(targets), 0))

        start = list(solution.extension.couplings)
        if not problem.field_free:
            start += list(solution.extension.fields)
        if not problem.known_junction:
            start.append(solution.junction)
        start = np.array(start, dtype=float)
        if len(start) == 0:
            return solution

        before = float(np.max(np.abs(residuals(start))))
        result = least_squares(residuals, start, jac=jacobian, xtol=1e-15, ftol=1e-15, gtol=1e-15,
                               max_nfev=50)
        after = float(np.max(np.abs(result.fun)))
        logger.debug('refinement {0} evaluations, max eigenvalue error {1:.3e} -> {2:.3e}'.format(
            result.nfev, before, after))
        if not after < before:
            return solution
        couplings, fields, junction = ExtensionSolver._unpack(problem, solution, result.x)
        diagnostics = dict(solution.diagnostics, refined=True, refinement_before=before, refinement_after=after)
        return ExtensionSolver._package(problem, couplings, fields, junction, options, diagnostics)

    @staticmethod
    def uniform_extension(central, extension_size, coupling=1.0):
        """central extended by extension_size uniformly coupled sites on both ends."""
        return ChainHamiltonian.assemble_chain(central, np.full(extension_size - 1, coupling),
                                               np.zeros(extension_size), coupling)
