"""
@file: check_utils.py
@time: 2026/10/17 17:30
@desc: seeded randomized self-checks run by `chainforge verify`
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.polynomial import Chebyshev

from chainforge.chain_utils import ChainSpec, ChainHamiltonian, ChainSpectrum
from chainforge.error_utils import ChainforgeError
from chainforge.interpolate_utils import RationalFunction, JacobiReconstruction, UNKNOWN_J
from chainforge.extension_utils import ExtensionSolver, SolverOptions
from chainforge.transfer_utils import TransferAnalysis, SingleExcitationState
from chainforge.logger import logger


@dataclass(frozen=True)
class CheckResult(object):
    name: str
    cases: int
    max_error: float
    tolerance: float
    warning_only: bool = False

    @property
    def passed(self):
        return self.max_error <= self.tolerance


def random_chain(rng, size, with_fields=True):
    couplings = rng.uniform(0.5, 1.5, size - 1)
    fields = rng.uniform(-1.0, 1.0, size) if with_fields else np.zeros(size)
    return ChainSpec(couplings, fields)


def random_symmetric_chain(rng, size, with_fields=True):
    half = rng.uniform(0.5, 1.5, size // 2)
    couplings = np.concatenate([half, half[:(size - 1) - size // 2][::-1]])
    fields = rng.uniform(-1.0, 1.0, (size + 1) // 2) if with_fields else np.zeros((size + 1) // 2)
    fields = np.concatenate([fields, fields[:size // 2][::-1]])
    return ChainSpec(couplings, fields)


def extension_function(fragment, junction):
    """f = J²P/Q of a fragment, built from its spectra in a Chebyshev basis."""
    matrix = ChainHamiltonian.build_hamiltonian(fragment)
    roots = ChainSpectrum.eigenvalues(matrix)
    low, high = float(np.min(roots)) - 1.0, float(np.max(roots)) + 1.0
    denominator = Chebyshev.fromroots(roots, domain=[low, high])
    if fragment.size == 1:
        numerator = Chebyshev([1.0], domain=[low, high])
    else:
        sub_roots = ChainSpectrum.eigenvalues(ChainSpec(fragment.couplings[1:], fragment.fields[1:]))
        numerator = Chebyshev.fromroots(sub_roots, domain=[low, high])
    return RationalFunction(junction ** 2 * numerator, denominator)


class RandomizedChecks(object):
    """Property checks over random chains

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    def reconstruction_roundtrip(rng, cases=200, max_size=12):
        worst = 0.0
        for case in range(cases):
            fragment = random_chain(rng, int(rng.integers(1, max_size + 1)), with_fields=bool(case % 2))
            junction = rng.uniform(0.5, 1.5)
            couplings, fields, rebuilt = JacobiReconstruction.reconstruct_chain(
                extension_function(fragment, junction), UNKNOWN_J)
            worst = max(worst, abs(rebuilt - junction),
                        float(np.max(np.abs(couplings - fragment.couplings), initial=0.0)),
                        float(np.max(np.abs(fields - fragment.fields))))
        return CheckResult('reconstruction round-trip', cases, worst, 1e-8)

    @staticmethod
    def folding_interlacing(rng, cases=100, max_size=60):
        worst = 0.0
        for _ in range(cases):
            size = 2 * int(rng.integers(1, max_size // 2 + 1))
            chain = random_symmetric_chain(rng, size)
            decomposition = ChainSpectrum.eigendecompose(chain)
            plus, minus = ChainHamiltonian.fold_symmetric(chain)
            union = np.sort(np.concatenate([ChainSpectrum.eigenvalues(plus),
                                            ChainSpectrum.eigenvalues(minus)]))[::-1]
            worst = max(worst, float(np.max(np.abs(union - decomposition.eigenvalues))))
            expected = tuple('+-'[i % 2] for i in range(size))
            if decomposition.symmetry_labels != expected:
                worst = np.inf
        return CheckResult('folding and interlacing', cases, worst, 1e-10)

    @staticmethod
    def dense_oracle(rng, cases=20, max_size=8):
        worst = 0.0
        for _ in range(cases):
            size = int(rng.integers(2, max_size + 1))
            chain = random_chain(rng, size)
            t = rng.uniform(0.0, 5.0)
            dense = ChainHamiltonian.dense_hamiltonian(chain)
            evolved = ChainHamiltonian.single_excitation_block(scipy.linalg.expm(-1j * t * dense), size)
            offset = np.exp(0.5j * t * np.sum(chain.fields))
            for site in range(size):
                state = TransferAnalysis.propagate(chain, SingleExcitationState.basis(size, site), t)
                worst = max(worst, float(np.max(np.abs(offset * state.amplitudes - evolved[:, site]))))
        return CheckResult('dense-oracle equivalence', cases, worst, 1e-10)

    @staticmethod
    def char_poly_consistency(rng, cases=50, max_size=30):
        worst = 0.0
        for _ in range(cases):
            chain = random_chain(rng, int(rng.integers(2, max_size + 1)))
            matrix = ChainHamiltonian.build_hamiltonian(chain)
            roots = ChainSpectrum.eigenvalues(matrix)
            sub_roots = ChainSpectrum.eigenvalues(ChainSpec(chain.couplings[1:], chain.fields[1:]))
            samples = rng.choice([-1.0, 1.0], 5) * rng.uniform(4.5, 6.0, 5)
            q, p = ChainSpectrum.char_poly_eval(matrix, samples)
            expected_q = np.prod(samples[:, None] - roots[None, :], axis=1)
            expected_p = np.prod(samples[:, None] - sub_roots[None, :], axis=1)
            worst = max(worst, float(np.max(np.abs(q - expected_q) / np.abs(expected_q))),
                        float(np.max(np.abs(p - expected_p) / np.abs(expected_p))))
        return CheckResult('characteristic polynomials', cases, worst, 1e-9)

    @staticmethod
    def nested_monotonicity(central_size=10, extension_sizes=(2, 4, 6)):
        """Growing M with nested ladder targets should not worsen shared targets (warning only)."""
        central = ChainHamiltonian.uniform_chain(central_size)
        delta = 4.0 / (central_size + 2 * max(extension_sizes))
        options = SolverOptions(verify=False)
        previous = None
        worst = 0.0
        for extension_size in extension_sizes:
            try:
                problem = ExtensionSolver.problem_from_delta(central, extension_size, delta)
                solution = ExtensionSolver.solve_extension(problem, options)
            except ChainforgeError as e:
                logger.warning('nested check skipped at M={0}: {1}'.format(extension_size, e))
                return CheckResult('nested-M monotonicity', 0, 0.0, 0.0, warning_only=True)
            residuals = {r.node: r.spectral_residual for r in solution.achieved_targets}
            if previous is not None:
                for node, residual in previous.items():
                    if node in residuals and residuals[node] > residual + 1e-13:
                        worst = max(worst, residuals[node] - residual)
            previous = residuals
        if worst > 0.0:
            logger.warning('shared-target residual grew by {0:.3e} with M'.format(worst))
        return CheckResult('nested-M monotonicity', len(extension_sizes), worst, 0.0, warning_only=True)

    @staticmethod
    def run_all(seed, cases=None):
        rng = np.random.default_rng(seed)
        scale = 1.0 if cases is None else cases / 200.0
        return [
            RandomizedChecks.reconstruction_roundtrip(rng, max(1, int(200 * scale))),
            RandomizedChecks.folding_interlacing(rng, max(1, int(100 * scale))),
            RandomizedChecks.dense_oracle(rng, max(1, int(20 * scale))),
            RandomizedChecks.char_poly_consistency(rng, max(1, int(50 * scale))),
            RandomizedChecks.nested_monotonicity(),
        ]
