"""
@file: chain_utils.py
@time: 2026/10/17 11:05
@desc: chain specs, single-excitation Hamiltonians, mirror folding and spectra
"""

import math
import functools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from chainforge.error_utils import ChainSpecError, ReducibleChainError, SymmetryError, EmptyRegionError
from chainforge.logger import logger

# largest chain the 2^N dense oracle will build
DENSE_MAX_SITES = 12


def _frozen_array(values, name):
    array = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(array)):
        raise ChainSpecError('{0} must be finite'.format(name))
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ChainSpec(object):
    """Couplings J_n and fields B_n of an XX chain (hbar = 1)

    Couplings are stored positive: a sign flip is a similarity transform
    that leaves every |amplitude| unchanged.

    Attributes:
        couplings: N-1 nonzero couplings
        fields: N fields
        comment: free text carried through chain-spec files
    """
    couplings: np.ndarray
    fields: np.ndarray
    comment: str = None

    def __post_init__(self):
        couplings = _frozen_array(self.couplings, 'couplings')
        fields = _frozen_array(self.fields, 'fields')
        if len(fields) == 0:
            raise ChainSpecError('a chain needs at least one site')
        if len(fields) != len(couplings) + 1:
            raise ChainSpecError('expected {0} fields for {1} couplings, got {2}'.format(
                len(couplings) + 1, len(couplings), len(fields)))
        if np.any(couplings == 0.0):
            raise ReducibleChainError('zero coupling at bond(s) {0}'.format(
                (np.flatnonzero(couplings == 0.0) + 1).tolist()))
        couplings = np.abs(couplings)
        couplings.setflags(write=False)
        object.__setattr__(self, 'couplings', couplings)
        object.__setattr__(self, 'fields', fields)

    @property
    def size(self):
        return len(self.fields)

    @property
    def field_free(self):
        return not np.any(self.fields)

    def reversed(self):
        return ChainSpec(self.couplings[::-1], self.fields[::-1], self.comment)

    def __repr__(self):
        return 'ChainSpec(N={0}, couplings={1}, fields={2})'.format(
            self.size, self.couplings.tolist(), self.fields.tolist())


@dataclass(frozen=True, eq=False)
class JacobiMatrix(object):
    """Symmetric tridiagonal matrix stored by its two diagonals

    Index 0 is the junction end: char_poly_eval removes it to form P.
    """
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = _frozen_array(self.diag, 'diag')
        offdiag = _frozen_array(self.offdiag, 'offdiag')
        if len(diag) == 0 or len(offdiag) != len(diag) - 1:
            raise ChainSpecError('diag/offdiag lengths {0}/{1} do not form a Jacobi matrix'.format(
                len(diag), len(offdiag)))
        object.__setattr__(self, 'diag', diag)
        object.__setattr__(self, 'offdiag', offdiag)

    @property
    def size(self):
        return len(self.diag)

    @property
    def irreducible(self):
        return bool(np.all(self.offdiag != 0.0))

    def norm(self):
        """Infinity norm, used as the scale of residual checks."""
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.offdiag)
        row[1:] += np.abs(self.offdiag)
        return float(np.max(row))

    def matvec(self, vectors):
        vectors = np.asarray(vectors)
        result = self.diag.reshape((-1,) + (1,) * (vectors.ndim - 1)) * vectors
        off = self.offdiag.reshape((-1,) + (1,) * (vectors.ndim - 1))
        result[:-1] += off * vectors[1:]
        result[1:] += off * vectors[:-1]
        return result

    def to_dense(self):
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def reversed(self):
        return JacobiMatrix(self.diag[::-1], self.offdiag[::-1])


@dataclass(frozen=True)
class RegionPartition(object):
    """Input, bulk and output site ranges (0-based, contiguous)

    Attributes:
        size: number of sites N
        input: Λ_in
        bulk: Λ_bulk
        output: Λ_out
    """
    size: int
    input: range
    bulk: range
    output: range

    @classmethod
    def symmetric(cls, size, m_in):
        """Prefix of m_in sites and its mirror image; every invariant is checked."""
        partition = cls.from_sizes(size, m_in, m_in)
        partition.validate()
        return partition

    @classmethod
    def from_sizes(cls, size, m_in, m_out):
        if m_in < 1 or m_out < 1:
            raise EmptyRegionError('input and output regions need at least one site')
        if m_in + m_out > size:
            raise ChainSpecError('regions of {0}+{1} sites overlap on a {2}-site chain'.format(m_in, m_out, size))
        return cls(size, range(0, m_in), range(m_in, size - m_out), range(size - m_out, size))

    @classmethod
    def explicit(cls, size, input=None, output=None, bulk=None):
        """Free-form ranges for state-creation analysis; regions may overlap."""
        empty = range(0, 0)
        partition = cls(size, input if input is not None else empty,
                        bulk if bulk is not None else empty,
                        output if output is not None else empty)
        for name in ('input', 'bulk', 'output'):
            region = getattr(partition, name)
            if len(region) and (region.start < 0 or region.stop > size or region.step != 1):
                raise ChainSpecError('{0} region {1} is not a contiguous range inside 0..{2}'.format(
                    name, region, size - 1))
        return partition

    def validate(self):
        regions = (self.input, self.bulk, self.output)
        covered = sorted(i for region in regions for i in region)
        if covered != list(range(self.size)):
            raise ChainSpecError('regions must be disjoint and cover all {0} sites'.format(self.size))
        mirror = sorted(self.size - 1 - i for i in self.input)
        if mirror != list(self.output):
            raise ChainSpecError('output region is not the mirror image of the input region')

    @staticmethod
    def require(region, name):
        if len(region) == 0:
            raise EmptyRegionError('{0} region is empty'.format(name))
        return np.arange(region.start, region.stop)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition(object):
    """Eigenpairs in strictly decreasing order

    Attributes:
        eigenvalues: λ_1 > λ_2 > ...
        eigenvectors: orthonormal columns, first component made positive
        symmetry_labels: '+'/'-' per eigenvector for mirror-symmetric matrices, else None
        max_residual: largest ||Hv - λv|| over the pairs
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    symmetry_labels: tuple = None
    max_residual: float = field(default=0.0)

    @property
    def size(self):
        return len(self.eigenvalues)

    def sector(self, label):
        if self.symmetry_labels is None:
            raise SymmetryError('symmetry labels exist only for mirror-symmetric chains')
        return np.array([i for i, s in enumerate(self.symmetry_labels) if s == label], dtype=int)


def _as_matrix(chain):
    if isinstance(chain, JacobiMatrix):
        return chain
    return ChainHamiltonian.build_hamiltonian(chain)


class ChainHamiltonian(object):
    """Builds and folds single-excitation Hamiltonians

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    def build_hamiltonian(spec):
        """Single-excitation block of the XX Hamiltonian

        The constant ½ΣB of the Z-sum is a global phase and is dropped; site m
        carries +B_m on the diagonal.

        :param spec: ChainSpec
        :return: JacobiMatrix with diag B and offdiag J
        """
        if np.any(spec.couplings == 0.0):
            raise ReducibleChainError('zero coupling in chain')
        return JacobiMatrix(spec.fields, spec.couplings)

    @staticmethod
    def mirror_symmetric(spec, tol=1e-12):
        """True iff J_n = J_{N-n} and B_n = B_{N+1-n} to relative tolerance tol."""
        if isinstance(spec, JacobiMatrix):
            couplings, fields = np.abs(spec.offdiag), spec.diag
        else:
            couplings, fields = spec.couplings, spec.fields
        scale = max(np.max(np.abs(couplings), initial=0.0), np.max(np.abs(fields)), np.finfo(float).tiny)
        return bool(np.all(np.abs(couplings - couplings[::-1]) <= tol * scale)
                    and np.all(np.abs(fields - fields[::-1]) <= tol * scale))

    @staticmethod
    def fold_symmetric(spec, tol=1e-12):
        """Split a mirror-symmetric chain into its symmetric and antisymmetric blocks

        Even N: both blocks are the left half-chain with the innermost field
        shifted by ±J_mid. Odd N: the symmetric block keeps the middle site,
        joined by √2·J; the antisymmetric block drops it. Site 0 of each block
        is the chain end.

        :param spec: mirror-symmetric ChainSpec
        :return: (H_plus, H_minus)
        """
        if not ChainHamiltonian.mirror_symmetric(spec, tol):
            raise SymmetryError('fold_symmetric needs a mirror-symmetric chain')
        size = spec.size
        if size == 1:
            raise SymmetryError('a single site has no antisymmetric sector')
        half = size // 2
        couplings = np.array(spec.couplings[:half - 1])
        fields = np.array(spec.fields[:half])
        if size % 2 == 0:
            middle = spec.couplings[half - 1]
            plus_fields = fields.copy()
            minus_fields = fields.copy()
            plus_fields[-1] += middle
            minus_fields[-1] -= middle
            return JacobiMatrix(plus_fields, couplings), JacobiMatrix(minus_fields, couplings)
        plus = JacobiMatrix(np.append(fields, spec.fields[half]),
                            np.append(couplings, math.sqrt(2.0) * spec.couplings[half - 1]))
        return plus, JacobiMatrix(fields, couplings)

    @staticmethod
    def assemble_chain(central, extension_couplings, extension_fields, junction):
        """reversed(A) - J - central - J - A, where A's site 1 touches the junction."""
        extension_couplings = np.asarray(extension_couplings, dtype=float)
        extension_fields = np.asarray(extension_fields, dtype=float)
        couplings = np.concatenate([extension_couplings[::-1], [junction], central.couplings,
                                    [junction], extension_couplings])
        fields = np.concatenate([extension_fields[::-1], central.fields, extension_fields])
        return ChainSpec(couplings, fields)

    @staticmethod
    def uniform_chain(size, coupling=1.0, bias=0.0):
        return ChainSpec(np.full(size - 1, coupling), np.full(size, bias))

    @staticmethod
    def make_pst_chain(size, scale=None):
        """Engineered perfect-transfer chain J_n = scale·√(n(N-n))

        :param size: N >= 2
        :param scale: coupling scale; None rescales so that max J_n = 1
        """
        if size < 2:
            raise ChainSpecError('a transfer chain needs at least two sites')
        n = np.arange(1, size)
        profile = np.sqrt(n * (size - n))
        if scale is None:
            scale = 1.0 / np.max(profile)
        return ChainSpec(scale * profile, np.zeros(size),
                         comment='perfect transfer chain N={0}'.format(size))

    @staticmethod
    def pst_scale(size):
        n = np.arange(1, size)
        return 1.0 / float(np.max(np.sqrt(n * (size - n))))

    @staticmethod
    def pst_transfer_time(size, scale=None):
        """Transfer time π/(2·scale) of make_pst_chain(size, scale)."""
        if scale is None:
            scale = ChainHamiltonian.pst_scale(size)
        return math.pi / (2.0 * scale)

    @staticmethod
    def dense_hamiltonian(spec):
        """Full 2^N matrix of -½ΣB_nZ_n + ½ΣJ_n(X_nX_{n+1} + Y_nY_{n+1})

        The Z-sum carries a minus sign so that the single-excitation block is
        build_hamiltonian(spec) - ½ΣB. Qubit 1 is the leftmost tensor factor.
        """
        size = spec.size
        if size > DENSE_MAX_SITES:
            raise ChainSpecError('dense Hamiltonian limited to {0} sites'.format(DENSE_MAX_SITES))
        identity = np.eye(2)
        pauli_z = np.diag([1.0, -1.0])
        raising = np.array([[0.0, 1.0], [0.0, 0.0]])
        hop = np.kron(raising, raising.T) + np.kron(raising.T, raising)

        def pad(op, site, width=1):
            return functools.reduce(np.kron, [identity] * site + [op] + [identity] * (size - site - width))

        dimension = 2 ** size
        hamiltonian = np.zeros((dimension, dimension))
        for n in range(size):
            hamiltonian -= 0.5 * spec.fields[n] * pad(pauli_z, n)
        for n in range(size - 1):
            hamiltonian += spec.couplings[n] * pad(hop, n, 2)
        return hamiltonian

    @staticmethod
    def single_excitation_block(dense, size):
        """Project a 2^N operator onto span{|n>}, |n> having qubit n in |1>."""
        index = np.array([2 ** (size - 1 - n) for n in range(size)])
        return dense[np.ix_(index, index)]


class ChainSpectrum(object):
    """Eigendecomposition and characteristic polynomials of Jacobi matrices

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    def eigendecompose(matrix, tol=1e-12):
        """Tridiagonal eigensolver (LAPACK via scipy), decreasing order

        Labels come from the sign of <Sv|v> after undoing the coupling-sign
        gauge, and are only attached to mirror-symmetric matrices.

        :param matrix: JacobiMatrix or ChainSpec
        :param tol: relative tolerance of the symmetry test
        :return: SpectralDecomposition
        """
        matrix = _as_matrix(matrix)
        if matrix.size == 1:
            return SpectralDecomposition(matrix.diag.copy(), np.ones((1, 1)), ('+',), 0.0)
        values, vectors = eigh_tridiagonal(matrix.diag, matrix.offdiag)
        values = values[::-1].copy()
        vectors = vectors[:, ::-1].copy()
        pivot = np.argmax(np.abs(vectors) > 1e-300, axis=0)
        signs = np.sign(vectors[pivot, np.arange(matrix.size)])
        signs[signs == 0] = 1.0
        vectors *= signs

        residual = float(np.max(np.linalg.norm(matrix.matvec(vectors) - vectors * values, axis=0)))
        if residual > tol * max(matrix.norm(), 1.0):
            logger.debug('eigen residual {0:.3e} above {1:.1e}·||H||'.format(residual, tol))

        labels = None
        if ChainHamiltonian.mirror_symmetric(matrix, tol):
            gauge = np.concatenate([[1.0], np.cumprod(np.where(matrix.offdiag < 0, -1.0, 1.0))])
            gauged = gauge[:, None] * vectors
            parity = np.sum(gauged * gauged[::-1], axis=0)
            labels = tuple('+' if p > 0 else '-' for p in parity)
        return SpectralDecomposition(values, vectors, labels, residual)

    @staticmethod
    def eigenvalues(matrix):
        matrix = _as_matrix(matrix)
        if matrix.size == 1:
            return matrix.diag.copy()
        return eigh_tridiagonal(matrix.diag, matrix.offdiag, eigvals_only=True)[::-1].copy()

    @staticmethod
    def char_poly_eval_scaled(matrix, x):
        """Three-term recurrence with running power-of-two rescaling

        The recurrence runs from the last site towards site 0, so the
        penultimate value P omits site 0 (the junction end).

        :param matrix: JacobiMatrix
        :param x: point or array of points
        :return: (Q mantissa, P mantissa, exponent) with Q = mantissa·2^exponent
        """
        matrix = _as_matrix(matrix)
        x = np.asarray(x, dtype=float)
        diag = matrix.diag[::-1]
        offdiag_sq = (matrix.offdiag[::-1]) ** 2
        previous = np.ones_like(x)
        current = x - diag[0]
        exponent = np.zeros(x.shape, dtype=int)
        for k in range(1, matrix.size):
            following = (x - diag[k]) * current - offdiag_sq[k - 1] * previous
            previous, current = current, following
            _, shift = np.frexp(np.maximum(np.abs(previous), np.abs(current)))
            previous = np.ldexp(previous, -shift)
            current = np.ldexp(current, -shift)
            exponent = exponent + shift
        return current, previous, exponent

    @staticmethod
    def char_poly_eval(matrix, x):
        """Q(x) = det(xI - m) and P(x) = det(xI - m') with m' lacking site 0."""
        q, p, exponent = ChainSpectrum.char_poly_eval_scaled(matrix, x)
        with np.errstate(over='ignore'):
            q, p = np.ldexp(q, exponent), np.ldexp(p, exponent)
        if np.ndim(q) == 0:
            return float(q), float(p)
        return q, p
