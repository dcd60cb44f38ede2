import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from chainforge.bound_utils import TransferBounds
from chainforge.chain_utils import ChainSpec, ChainHamiltonian, ChainSpectrum, RegionPartition
from chainforge.check_utils import random_chain
from chainforge.error_utils import ChainSpecError, EmptyNullSpaceError, SymmetryError
from chainforge.extension_utils import ExtensionSolver
from chainforge.transfer_utils import SingleExcitationState, TransferAnalysis

ROOT = math.sqrt(185.0)
EIGHT_SITE_T0 = math.pi / (4.0 * ROOT)
DESIGN_DELTA = math.pi / 94.5


def eight_site_chain():
    couplings = [10 * math.sqrt(5), 12 * math.sqrt(14), 37 * math.sqrt(6), 5 * ROOT,
                 37 * math.sqrt(6), 12 * math.sqrt(14), 10 * math.sqrt(5)]
    return ChainSpec(couplings, np.zeros(8))


def eight_site_encoding():
    return np.array([3 * math.sqrt(7), 0.0, 8 * math.sqrt(10)]) / math.sqrt(703.0)


@pytest.fixture(scope='module')
def design():
    problem = ExtensionSolver.problem_from_delta(ChainHamiltonian.uniform_chain(40), 42, DESIGN_DELTA)
    return ExtensionSolver.solve_extension(problem).assembled


def test_state_validation():
    with pytest.raises(ChainSpecError):
        SingleExcitationState([1.0, 1.0])
    with pytest.raises(ChainSpecError):
        SingleExcitationState.normalized([0.0, 0.0])
    state = SingleExcitationState.embed(5, range(1, 3), [1.0, 1.0j])
    assert_allclose(state.probabilities, [0.0, 0.5, 0.5, 0.0, 0.0])
    assert_allclose(state.mirrored().probabilities, [0.0, 0.0, 0.5, 0.5, 0.0])


def test_propagate_pair():
    chain = ChainHamiltonian.uniform_chain(2)
    evolved = TransferAnalysis.propagate(chain, SingleExcitationState.basis(2, 0), math.pi / 2.0)
    assert_allclose(evolved.amplitudes, [0.0, -1.0j], atol=1e-12)
    state = SingleExcitationState.normalized([0.6, 0.8j])
    assert_allclose(TransferAnalysis.propagate(chain, state, 0.0).amplitudes, state.amplitudes, atol=1e-15)


def test_eight_site_transfer():
    chain = eight_site_chain()
    partition = RegionPartition.symmetric(8, 3)
    fidelity, psi_in, psi_out = TransferAnalysis.transfer_fidelity(chain, partition, EIGHT_SITE_T0)
    assert abs(1.0 - fidelity) <= 1e-12
    assert abs(abs(np.vdot(eight_site_encoding(), psi_in.restrict(partition.input))) - 1.0) <= 1e-10
    assert_allclose(psi_out.probabilities, psi_in.mirrored().probabilities, atol=1e-10)
    fidelity, _, _ = TransferAnalysis.transfer_fidelity(chain, partition, 0.0)
    assert fidelity <= 1e-24


def test_eight_site_classification():
    decomposition = ChainSpectrum.eigendecompose(eight_site_chain())
    classification = TransferAnalysis.classify_eigenvalues(decomposition, t0=EIGHT_SITE_T0)
    assert classification.violated == (3, 4)
    assert_allclose(decomposition.eigenvalues[list(classification.violated)], [ROOT, -ROOT], rtol=1e-12)
    assert math.isclose(classification.delta, 4.0 * ROOT)
    assert math.isclose(classification.phase, math.pi / 2.0, rel_tol=1e-10)
    with pytest.raises(SymmetryError):
        TransferAnalysis.classify_eigenvalues(ChainSpectrum.eigendecompose(ChainSpec([1.0, 2.0], np.zeros(3))),
                                              delta=1.0)


def test_eight_site_encoding():
    chain = eight_site_chain()
    partition = RegionPartition.symmetric(8, 3)
    decomposition = ChainSpectrum.eigendecompose(chain)
    classification = TransferAnalysis.classify_eigenvalues(decomposition, t0=EIGHT_SITE_T0)
    for strategy in ('exact', 'worst'):
        encoding = TransferAnalysis.null_space_encoding(chain, partition, classification, strategy)
        assert encoding.null_dimension == 1
        assert_allclose(encoding.states[0].restrict(partition.input).real, eight_site_encoding(), atol=1e-10)
        assert encoding.fidelities[0] >= 1.0 - 1e-12
    with pytest.raises(EmptyNullSpaceError) as info:
        TransferAnalysis.null_space_encoding(chain, RegionPartition.symmetric(8, 1), classification)
    assert info.value.smallest_singular_value > 0.0


def test_encoding_without_violations():
    chain = ChainHamiltonian.make_pst_chain(6)
    t0 = ChainHamiltonian.pst_transfer_time(6)
    classification = TransferAnalysis.classify_eigenvalues(ChainSpectrum.eigendecompose(chain), t0=t0)
    assert classification.violated == ()
    encoding = TransferAnalysis.null_space_encoding(chain, RegionPartition.symmetric(6, 1), classification)
    assert encoding.null_dimension == 1
    assert_allclose(encoding.states[0].amplitudes, [1, 0, 0, 0, 0, 0], atol=1e-15)
    assert encoding.fidelities[0] >= 1.0 - 1e-12


def test_relative_phase():
    chain = ChainHamiltonian.make_pst_chain(4)
    t0 = ChainHamiltonian.pst_transfer_time(4)
    _, psi_in, psi_out = TransferAnalysis.transfer_fidelity(chain, RegionPartition.symmetric(4, 2), t0)
    phase = TransferAnalysis.relative_phase(psi_in, psi_out)
    evolved = TransferAnalysis.propagate(chain, psi_in, t0)
    assert_allclose(evolved.amplitudes, np.exp(1j * phase) * psi_in.mirrored().amplitudes, atol=1e-10)


def test_pst_wavepacket_is_binomial():
    size = 20
    chain = ChainHamiltonian.make_pst_chain(size)
    t0 = ChainHamiltonian.pst_transfer_time(size)
    decomposition = ChainSpectrum.eigendecompose(chain)
    sites = np.arange(1, size + 1)
    for t in np.linspace(0.0, t0, 20):
        evolved = TransferAnalysis.propagate(chain, SingleExcitationState.basis(size, 0), t, decomposition)
        mean, spread, distribution = TransferBounds.wavepacket_stats(size, t, t0)
        assert_allclose(evolved.probabilities, distribution, atol=1e-10)
        measured_mean = float(np.sum(sites * evolved.probabilities))
        measured_spread = math.sqrt(max(float(np.sum((sites - measured_mean) ** 2 * evolved.probabilities)), 0.0))
        assert abs(mean - measured_mean) <= 1e-9
        assert abs(spread - measured_spread) <= 1e-9


def test_sweep():
    chain = ChainHamiltonian.make_pst_chain(6)
    t0 = ChainHamiltonian.pst_transfer_time(6)
    partition = RegionPartition.symmetric(6, 1)
    times = t0 * np.array([1.0, 3.0, 5.0, 7.0])
    report = TransferAnalysis.fidelity_sweep(chain, partition, times, threads=2)
    assert_allclose(report.fidelity, 1.0, atol=1e-12)
    assert_allclose(report.average_fidelity, 1.0, atol=1e-12)
    rng = np.random.default_rng(9)
    chain = random_chain(rng, 10)
    partition = RegionPartition.symmetric(10, 3)
    grid = np.linspace(0.0, 6.0, 25)
    single = TransferAnalysis.fidelity_sweep(chain, partition, grid, threads=1)
    pooled = TransferAnalysis.fidelity_sweep(chain, partition, grid, threads=4)
    assert np.array_equal(single.fidelity, pooled.fidelity)
    assert np.all((single.fidelity >= 0.0) & (single.fidelity <= 1.0))
    assert_allclose(single.average_fidelity, 1.0 / 3.0 + (1.0 + np.sqrt(single.fidelity)) ** 2 / 6.0)
    assert len(list(single.rows())) == 25


def test_uniform_chain_never_perfect():
    chain = ChainHamiltonian.uniform_chain(40)
    report = TransferAnalysis.fidelity_sweep(chain, RegionPartition.symmetric(40, 1), np.linspace(0.0, 200.0, 801))
    assert np.max(report.fidelity) < 0.99
    classification = TransferAnalysis.classify_eigenvalues(ChainSpectrum.eigendecompose(chain), DESIGN_DELTA)
    assert len(classification.violated) > 0


def test_classification_stays_on_ladder():
    decomposition = ChainSpectrum.eigendecompose(ChainHamiltonian.uniform_chain(40))
    classification = TransferAnalysis.classify_eigenvalues(decomposition, DESIGN_DELTA)
    assert classification.phase in TransferAnalysis.LADDER_PHASES
    for i in classification.satisfied:
        offset = decomposition.eigenvalues[i] / DESIGN_DELTA - 0.5
        assert abs(offset - round(offset)) <= 1e-6
    # the cluster phase is an explicit choice and can sit off the ladder
    clustered = TransferAnalysis.classify_eigenvalues(decomposition, DESIGN_DELTA, phase='cluster')
    assert len(clustered.satisfied) >= 1
    assert len(clustered.satisfied) + len(clustered.violated) == 40


def test_average_state_fidelity():
    assert_allclose(TransferAnalysis.average_state_fidelity([0.0, 1.0]), [0.5, 1.0])


def test_creation_on_pst_chain():
    size = 20
    chain = ChainHamiltonian.make_pst_chain(size)
    t0 = ChainHamiltonian.pst_transfer_time(size)
    partition = RegionPartition.explicit(size, output=range(10, 20), bulk=range(0, 10))
    values = TransferAnalysis.creation_spectrum(chain, partition, t0)
    assert_allclose(values, 1.0, atol=1e-10)


def test_creation_suite():
    rng = np.random.default_rng(4)
    chain = random_chain(rng, 12)
    partition = RegionPartition.explicit(12, output=range(6, 12), bulk=range(0, 6))
    values = TransferAnalysis.creation_spectrum(chain, partition, 3.0)
    assert np.all((values >= 0.0) & (values <= 1.0))
    assert np.all(np.diff(values) <= 0.0)
    modes = TransferAnalysis.creation_modes(chain, partition, 3.0)
    target = SingleExcitationState.embed(12, partition.bulk, modes[:, 0])
    state, fidelity = TransferAnalysis.best_creation_state(chain, target, partition, 3.0)
    assert abs(fidelity - values[0]) <= 1e-10
    assert np.all(np.abs(state.amplitudes[:6]) == 0.0)
    with pytest.raises(ChainSpecError):
        TransferAnalysis.best_creation_state(chain, SingleExcitationState.basis(12, 11), partition, 3.0)


def test_extension_trend():
    central = ChainHamiltonian.uniform_chain(40)
    trend = TransferAnalysis.extension_error_trend(central, (2, 4, 6, 8, 10, 12), DESIGN_DELTA)
    errors = [row['encoded_error'] for row in trend]
    # past M = 8 the error can sit at the rounding floor
    assert all(later < earlier or later <= 1e-12 for earlier, later in zip(errors, errors[1:]))
    assert errors[3] <= 1e-7
    uniform, _ = TransferAnalysis.optimal_uniform_error(40, 8, np.linspace(10.0, 120.0, 2201))
    assert 1e-5 <= uniform <= 1e-3


def test_design_encoding(design):
    decomposition = ChainSpectrum.eigendecompose(design)
    classification = TransferAnalysis.classify_eigenvalues(decomposition, t0=94.5)
    partition = RegionPartition.symmetric(124, 42)
    encoding = TransferAnalysis.null_space_encoding(design, partition, classification, decomposition=decomposition)
    assert encoding.null_dimension >= 2
    assert min(encoding.fidelities) >= 1.0 - 1e-8


def test_design_end_to_end_bound(design):
    fidelity, _, _ = TransferAnalysis.transfer_fidelity(design, RegionPartition.symmetric(124, 1), 94.5)
    integral, closed = TransferBounds.endtoend_error_bound(124)
    assert 1.0 - fidelity <= integral <= closed


def test_design_creation(design):
    # bulk is the first half of the uniform centre, its mirror sits inside the output region
    partition = RegionPartition.explicit(124, output=range(62, 124), bulk=range(42, 62))
    values = TransferAnalysis.creation_spectrum(design, partition, 94.5)
    assert len(values) == 20
    assert np.all((values >= 0.0) & (values <= 1.0))
    assert np.count_nonzero(values >= 1.0 - 1e-6) >= 10


if __name__ == '__main__':
    test_state_validation()
    test_propagate_pair()
    test_eight_site_transfer()
    test_eight_site_classification()
    test_eight_site_encoding()
    test_encoding_without_violations()
    test_relative_phase()
    test_pst_wavepacket_is_binomial()
    test_sweep()
    test_uniform_chain_never_perfect()
    test_classification_stays_on_ladder()
    test_average_state_fidelity()
    test_creation_on_pst_chain()
    test_creation_suite()
    test_extension_trend()
