"""
@file: transfer_utils.py
@time: 2026/10/17 15:10
@desc: time evolution, transfer fidelity, eigenvalue classification, encodings and state creation
"""

import os
import math
from dataclasses import dataclass, field
from multiprocessing.pool import ThreadPool

import numpy as np
import scipy.linalg

from chainforge.chain_utils import ChainHamiltonian, ChainSpectrum, RegionPartition
from chainforge.error_utils import ChainSpecError, SymmetryError, EmptyNullSpaceError
from chainforge.extension_utils import ExtensionSolver
from chainforge.logger import logger


@dataclass(frozen=True, eq=False)
class SingleExcitationState(object):
    """Amplitudes a_n of Σ a_n|n>, normalised to 1e-12

    Attributes:
        amplitudes: complex vector of length N
    """
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > 1e-12:
            raise ChainSpecError('state norm is {0!r}, expected 1'.format(norm))
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def normalized(cls, amplitudes):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amplitudes)
        if norm == 0.0:
            raise ChainSpecError('cannot normalise the zero vector')
        return cls(amplitudes / norm)

    @classmethod
    def basis(cls, size, site):
        amplitudes = np.zeros(size, dtype=complex)
        amplitudes[site] = 1.0
        return cls(amplitudes)

    @classmethod
    def embed(cls, size, sites, amplitudes):
        """State with the given amplitudes on `sites` and zero elsewhere."""
        full = np.zeros(size, dtype=complex)
        full[np.asarray(sites)] = amplitudes
        return cls.normalized(full)

    @property
    def size(self):
        return len(self.amplitudes)

    @property
    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def restrict(self, region):
        return self.amplitudes[np.asarray(region)]

    def mirrored(self):
        return SingleExcitationState(self.amplitudes[::-1])

    def overlap(self, other):
        """<self|other>"""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class EigenvalueClassification(object):
    """Split of the spectrum by the perfect-transfer condition at t0

    An eigenpair (λ_n, σ_n) is in Γ_P when λ_n·t0 (+π for antisymmetric
    vectors) equals the common phase modulo 2π.

    Attributes:
        satisfied: indices of Γ_P
        violated: indices of Γ_P̄
        phase: common phase in [0, 2π)
        delta: ladder spacing π/t0
        t0: transfer time
        deviations: distance of each eigenvalue to the nearest admissible value
        tolerance: absolute eigenvalue tolerance used for the split
    """
    satisfied: tuple
    violated: tuple
    phase: float
    delta: float
    t0: float
    deviations: np.ndarray
    tolerance: float


@dataclass(frozen=True, eq=False)
class TransferReport(object):
    """Pointwise transfer_fidelity over a time grid

    Attributes:
        times: grid times
        fidelity: F = σ² per time
        sigma: largest singular value of the propagator window
        input_states: optimal Ψ_in per time
        output_states: matching Ψ_out per time
        average_fidelity: ⅓ + ⅙(1+√F)²
        relative_phase: phase of <mirror(Ψ_in)|Ψ_out>
    """
    times: np.ndarray
    fidelity: np.ndarray
    sigma: np.ndarray
    input_states: tuple = ()
    output_states: tuple = ()
    average_fidelity: np.ndarray = None
    relative_phase: np.ndarray = None

    def rows(self):
        for i, t in enumerate(self.times):
            yield t, self.fidelity[i], self.sigma[i], self.average_fidelity[i]


@dataclass(frozen=True, eq=False)
class EncodingResult(object):
    """Orthonormal encodings on Λ_in that avoid every violating eigenvector

    Attributes:
        states: SingleExcitationState per null-space basis vector
        fidelities: transfer fidelity of each state at t0
        null_dimension: number of encodable states
        violated: eigenvector indices the encoding avoids
        smallest_singular_value: smallest singular value of the avoided overlaps
    """
    states: tuple
    fidelities: tuple
    null_dimension: int
    violated: tuple = ()
    smallest_singular_value: float = field(default=0.0)


def _decomposition(spec, decomposition=None):
    if decomposition is not None:
        return decomposition
    return ChainSpectrum.eigendecompose(spec)


def _normalise_phase(vector, *companions):
    pivot = np.argmax(np.abs(vector))
    rotation = np.conj(vector[pivot]) / abs(vector[pivot]) if abs(vector[pivot]) > 0 else 1.0
    return (vector * rotation,) + tuple(c * rotation for c in companions)


class TransferAnalysis(object):
    """Spectral propagation and transfer figures of merit

    Attributes:
        LADDER_PHASES: common phases of a spectrum on the half-integer ladder
    """

    LADDER_PHASES = (math.pi / 2.0, 3.0 * math.pi / 2.0)

    def __init__(self):
        pass

    @staticmethod
    def propagator(decomposition, t, rows=None, columns=None):
        """Block of U(t) = V·diag(e^{-iλt})·Vᵀ"""
        vectors = decomposition.eigenvectors
        left = vectors if rows is None else vectors[np.asarray(rows)]
        right = vectors if columns is None else vectors[np.asarray(columns)]
        return (left * np.exp(-1j * decomposition.eigenvalues * t)) @ right.T

    @staticmethod
    def propagate(spec, state, t, decomposition=None):
        """e^{-iHt}|state> through the eigendecomposition; the norm is kept to 1e-12."""
        decomposition = _decomposition(spec, decomposition)
        vectors = decomposition.eigenvectors
        coefficients = vectors.T @ state.amplitudes
        evolved = vectors @ (np.exp(-1j * decomposition.eigenvalues * t) * coefficients)
        return SingleExcitationState(evolved / np.linalg.norm(evolved))

    @staticmethod
    def transfer_fidelity(spec, partition, t, decomposition=None):
        """Best transfer from Λ_in to Λ_out at time t

        :param spec: ChainSpec
        :param partition: RegionPartition with non-empty input and output
        :param t: time
        :return: (F, Ψ_in, Ψ_out) with U(t)Ψ_in = √F·Ψ_out on Λ_out
        """
        decomposition = _decomposition(spec, decomposition)
        inputs = RegionPartition.require(partition.input, 'input')
        outputs = RegionPartition.require(partition.output, 'output')
        window = TransferAnalysis.propagator(decomposition, t, outputs, inputs)
        left, singular, right = scipy.linalg.svd(window)
        sigma = float(singular[0])
        psi_in, psi_out = _normalise_phase(np.conj(right[0]), left[:, 0])
        size = decomposition.size
        return (min(sigma * sigma, 1.0), SingleExcitationState.embed(size, inputs, psi_in),
                SingleExcitationState.embed(size, outputs, psi_out))

    @staticmethod
    def average_state_fidelity(fidelity):
        """⅓ + ⅙(1 + √F)², averaged over input qubit states."""
        fidelity = np.clip(np.asarray(fidelity, dtype=float), 0.0, 1.0)
        return 1.0 / 3.0 + (1.0 + np.sqrt(fidelity)) ** 2 / 6.0

    @staticmethod
    def relative_phase(psi_in, psi_out):
        return float(np.angle(psi_in.mirrored().overlap(psi_out)))

    @staticmethod
    def fidelity_sweep(spec, partition, times, threads=None):
        """transfer_fidelity over a time grid, in grid order

        :param threads: worker threads, None or 0 for the cpu count
        :return: TransferReport
        """
        decomposition = ChainSpectrum.eigendecompose(spec)
        times = np.asarray(times, dtype=float)
        threads = threads or os.cpu_count() or 1
        thread_list = list()
        pool = ThreadPool(min(threads, max(len(times), 1)))
        for t in times:
            thread = pool.apply_async(TransferAnalysis.transfer_fidelity,
                                      args=(spec, partition, t, decomposition))
            thread_list.append(thread)
        pool.close()
        pool.join()
        results = [thread.get() for thread in thread_list]
        fidelity = np.array([r[0] for r in results])
        logger.debug('swept {0} times on {1} threads, max F {2:.6f}'.format(
            len(times), threads, float(np.max(fidelity, initial=0.0))))
        return TransferReport(times, fidelity, np.sqrt(fidelity),
                              tuple(r[1] for r in results), tuple(r[2] for r in results),
                              TransferAnalysis.average_state_fidelity(fidelity),
                              np.array([TransferAnalysis.relative_phase(r[1], r[2]) for r in results]))

    @staticmethod
    def classify_eigenvalues(decomposition, delta=None, t0=None, phase=None, tolerance=1e-6):
        """Γ_P / Γ_P̄ split of a mirror-symmetric spectrum

        Ladder eigenvalues λ = δ(j+½) put every satisfying eigenpair at phase
        π/2 or 3π/2, so by default the phase is whichever of the two most
        eigenpairs sit on. phase='cluster' takes the largest cluster of
        eigenpair phases instead, for spectra off that ladder.

        :param decomposition: SpectralDecomposition with symmetry labels
        :param delta: ladder spacing, t0 = π/δ when t0 is not given
        :param t0: transfer time
        :param phase: common phase, None for the ladder phases, 'cluster' to infer it
        :param tolerance: Γ_P tolerance in units of δ
        :return: EigenvalueClassification
        """
        if decomposition.symmetry_labels is None:
            raise SymmetryError('classification needs a mirror-symmetric chain')
        if t0 is None and delta is None:
            raise ValueError('classification needs delta or t0')
        t0 = math.pi / delta if t0 is None else float(t0)
        delta = math.pi / t0 if delta is None else float(delta)
        absolute = tolerance * delta
        shift = np.array([0.0 if s == '+' else math.pi for s in decomposition.symmetry_labels])
        phases = np.mod(decomposition.eigenvalues * t0 + shift, 2.0 * math.pi)

        def distance(a, b):
            gap = np.abs(np.mod(a - b + math.pi, 2.0 * math.pi) - math.pi)
            return gap / t0

        if phase is None:
            # most members first, then the smaller total deviation
            phase = min(TransferAnalysis.LADDER_PHASES,
                        key=lambda p: (-int(np.sum(distance(phases, p) <= absolute)),
                                       float(np.sum(distance(phases, p)))))
        elif phase == 'cluster':
            counts = [int(np.sum(distance(phases, p) <= absolute)) for p in phases]
            centre = phases[int(np.argmax(counts))]
            members = phases[distance(phases, centre) <= absolute]
            phase = float(np.mod(centre + np.angle(np.mean(np.exp(1j * (members - centre)))), 2.0 * math.pi))
        phase = float(phase)
        deviations = distance(phases, phase)
        satisfied = tuple(int(i) for i in np.flatnonzero(deviations <= absolute))
        violated = tuple(int(i) for i in np.flatnonzero(deviations > absolute))
        logger.debug('classified {0} eigenvalues: {1} violate at t0={2:.6g}'.format(
            decomposition.size, len(violated), t0))
        return EigenvalueClassification(satisfied, violated, phase, delta, t0, deviations, absolute)

    @staticmethod
    def select_worst_offenders(decomposition, classification, partition, count=None):
        """Violating eigenvectors ranked by input weight × deviation, |Λ_in|-1 of them by default."""
        inputs = RegionPartition.require(partition.input, 'input')
        count = len(inputs) - 1 if count is None else count
        weight = np.sum(decomposition.eigenvectors[inputs] ** 2, axis=0)
        score = weight * classification.deviations
        ranked = [int(i) for i in np.argsort(-score, kind='stable') if score[i] > 0.0]
        return tuple(sorted(ranked[:count]))

    @staticmethod
    def null_space_encoding(spec, partition, classification, strategy='exact', decomposition=None, rcond=None):
        """States on Λ_in orthogonal to Π_in|λ_n> for every violating n

        :param strategy: 'exact' avoids all of Γ_P̄, 'worst' the worst offenders only
        :param rcond: relative singular value cut-off of the null space
        :return: EncodingResult with the fidelity of each state at classification.t0
        """
        decomposition = _decomposition(spec, decomposition)
        inputs = RegionPartition.require(partition.input, 'input')
        outputs = RegionPartition.require(partition.output, 'output')
        if strategy == 'exact':
            violated = classification.violated
        elif strategy == 'worst':
            violated = TransferAnalysis.select_worst_offenders(decomposition, classification, partition)
        else:
            raise ValueError('unknown encoding strategy {0}'.format(strategy))

        size = decomposition.size
        if not violated:
            basis = np.eye(len(inputs))
            smallest = 0.0
        else:
            overlaps = decomposition.eigenvectors[np.ix_(inputs, np.array(violated))].T
            singular = scipy.linalg.svdvals(overlaps)
            smallest = float(singular[-1]) if len(violated) >= len(inputs) else 0.0
            basis = scipy.linalg.null_space(overlaps, rcond=rcond)
            if basis.shape[1] == 0:
                raise EmptyNullSpaceError('no state on {0} input sites avoids {1} eigenvectors '
                                          '(smallest singular value {2:.3e})'.format(len(inputs), len(violated),
                                                                                     smallest), smallest)
        window = TransferAnalysis.propagator(decomposition, classification.t0, outputs, inputs)
        states, fidelities = [], []
        for column in basis.T:
            column = column * np.sign(column[np.argmax(np.abs(column))])
            states.append(SingleExcitationState.embed(size, inputs, column))
            fidelities.append(float(np.linalg.norm(window @ column) ** 2))
        logger.debug('null space of dimension {0}, fidelities {1}'.format(basis.shape[1], fidelities))
        return EncodingResult(tuple(states), tuple(fidelities), basis.shape[1], tuple(violated), smallest)

    @staticmethod
    def creation_spectrum(spec, partition, t0, decomposition=None):
        """Eigenvalues of Π_bulk U(t0) Π_out U(t0)† Π_bulk, descending, one per bulk site."""
        decomposition = _decomposition(spec, decomposition)
        bulk = RegionPartition.require(partition.bulk, 'bulk')
        outputs = RegionPartition.require(partition.output, 'output')
        window = TransferAnalysis.propagator(decomposition, t0, bulk, outputs)
        singular = scipy.linalg.svdvals(window)
        values = np.zeros(len(bulk))
        values[:len(singular)] = np.clip(singular ** 2, 0.0, 1.0)
        return np.sort(values)[::-1]

    @staticmethod
    def creation_modes(spec, partition, t0, decomposition=None):
        """Bulk eigenvectors of the creation operator, columns in creation_spectrum order."""
        decomposition = _decomposition(spec, decomposition)
        bulk = RegionPartition.require(partition.bulk, 'bulk')
        outputs = RegionPartition.require(partition.output, 'output')
        window = TransferAnalysis.propagator(decomposition, t0, bulk, outputs)
        left, _, _ = scipy.linalg.svd(window)
        return left

    @staticmethod
    def best_creation_state(spec, target, partition, t0, decomposition=None):
        """Ψ_in ∝ Π_out U(t0)†|Ψ> and its fidelity ||Π_out U(t0)†Ψ||²

        :return: (Ψ_in or None when the projection vanishes, fidelity)
        """
        decomposition = _decomposition(spec, decomposition)
        bulk = RegionPartition.require(partition.bulk, 'bulk')
        outputs = RegionPartition.require(partition.output, 'output')
        outside = np.delete(target.amplitudes, bulk)
        if np.any(np.abs(outside) > 1e-12):
            raise ChainSpecError('creation target must be supported on the bulk region')
        window = TransferAnalysis.propagator(decomposition, t0, bulk, outputs)
        projected = window.conj().T @ target.amplitudes[bulk]
        fidelity = float(np.linalg.norm(projected) ** 2)
        if fidelity <= np.finfo(float).eps:
            logger.warning('target has no overlap with the output region at t0={0:.6g}'.format(t0))
            return None, 0.0
        return SingleExcitationState.embed(decomposition.size, outputs, projected), min(fidelity, 1.0)

    @staticmethod
    def optimal_uniform_error(central_size, extension_size, times, threads=None):
        """1 - max_t F for a uniform chain of central_size + 2M sites, encoding over M end sites

        :return: (error, time of the best fidelity)
        """
        chain = ChainHamiltonian.uniform_chain(central_size + 2 * extension_size)
        partition = RegionPartition.symmetric(chain.size, extension_size)
        report = TransferAnalysis.fidelity_sweep(chain, partition, times, threads)
        best = int(np.argmax(report.fidelity))
        return 1.0 - float(report.fidelity[best]), float(report.times[best])

    @staticmethod
    def extension_error_trend(central, extension_sizes, delta, options=None):
        """Encoded and end-to-end errors at t0 = π/δ of ladder extensions of `central`

        The encoded error is that of the optimal encoding over the M end sites,
        which stays defined when Γ_P̄ outnumbers the input sites.

        :return: list of dicts with M, N, encoded_error, end_to_end_error, violated
        """
        t0 = math.pi / delta
        trend = []
        for extension_size in extension_sizes:
            problem = ExtensionSolver.problem_from_delta(central, extension_size, delta)
            solution = ExtensionSolver.solve_extension(problem, options)
            chain = solution.assembled
            decomposition = ChainSpectrum.eigendecompose(chain)
            classification = TransferAnalysis.classify_eigenvalues(decomposition, t0=t0)
            partition = RegionPartition.symmetric(chain.size, extension_size)
            fidelity, _, _ = TransferAnalysis.transfer_fidelity(chain, partition, t0, decomposition)
            end_to_end = TransferAnalysis.propagator(decomposition, t0, [chain.size - 1], [0])
            trend.append({'M': extension_size, 'N': chain.size,
                          'encoded_error': 1.0 - fidelity,
                          'end_to_end_error': 1.0 - float(abs(end_to_end[0, 0]) ** 2),
                          'violated': len(classification.violated)})
            logger.info('M={0}: encoded error {1:.3e}'.format(extension_size, trend[-1]['encoded_error']))
        return trend
