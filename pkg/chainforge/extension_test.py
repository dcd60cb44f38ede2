import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from chainforge.chain_utils import ChainSpec, ChainHamiltonian, ChainSpectrum
from chainforge.check_utils import random_chain, random_symmetric_chain
from chainforge.error_utils import ChainSpecError, SymmetryError, DegenerateSystemError
from chainforge.extension_utils import ExtensionProblem, ExtensionSolver, SolverOptions
from chainforge.interpolate_utils import POLE, KnownJ, UNKNOWN_J

DESIGN_DELTA = math.pi / 94.5


def four_site_problem():
    return ExtensionProblem(ChainHamiltonian.uniform_chain(4), 2, UNKNOWN_J, ((1.0, '+'), (2.0, '+')))


def test_four_site_extension():
    solution = ExtensionSolver.solve_extension(four_site_problem())
    assert_allclose(solution.extension.couplings, [1.0], atol=1e-10)
    assert abs(solution.junction - math.sqrt(1.5)) <= 1e-10
    root = math.sqrt(1.5)
    assert_allclose(solution.assembled.couplings, [1.0, root, 1.0, 1.0, 1.0, root, 1.0], atol=1e-10)
    assert_allclose(solution.assembled.fields, np.zeros(8))
    assert solution.max_spectral_residual <= 1e-10
    assert solution.max_condition_residual <= 1e-10


def test_condition_residual_at_pole_target():
    # λ = 1 is a root of P_B^+ for the 4-site uniform chain, so Q_A(1) = 0 as well
    solution = ExtensionSolver.solve_extension(four_site_problem())
    central = ChainHamiltonian.uniform_chain(4)
    residual = ExtensionSolver.condition_residual(central, solution.extension, solution.junction, 1.0, '+')
    assert residual <= 1e-12
    assert [r.condition_residual <= 1e-10 for r in solution.achieved_targets] == [True, True]
    # a perturbed junction is still reported as a miss at the ordinary target
    assert ExtensionSolver.condition_residual(central, solution.extension, 1.1 * solution.junction, 2.0, '+') > 1e-3


def test_known_junction_single_site():
    problem = ExtensionProblem(ChainHamiltonian.uniform_chain(2), 1, KnownJ(math.sqrt(2.0)), ((2.0, '+'),))
    solution = ExtensionSolver.solve_extension(problem)
    assert_allclose(solution.assembled.couplings, [math.sqrt(2.0), 1.0, math.sqrt(2.0)], atol=1e-12)
    decomposition = ChainSpectrum.eigendecompose(solution.assembled)
    assert_allclose(decomposition.eigenvalues, [2.0, 1.0, -1.0, -2.0], atol=1e-12)
    assert decomposition.symmetry_labels == ('+', '-', '+', '-')


def test_target_values():
    central = ChainHamiltonian.uniform_chain(4)
    data = ExtensionSolver.target_values(central, [(2.0, '+'), (1.0, '+')])
    assert math.isclose(data[0].value, 1.0, rel_tol=1e-12)
    assert data[1].value is POLE
    # B+ = [1] for a single pair: f(x) = x - 1
    pair = ChainHamiltonian.uniform_chain(2)
    for x in (0.25, 3.0, -2.0):
        assert math.isclose(ExtensionSolver.target_values(pair, [(x, '+')])[0].value, x - 1.0, rel_tol=1e-12)
    # a root of Q_B^+ is an ordinary zero value
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    assert abs(ExtensionSolver.target_values(central, [(golden, '+')])[0].value) <= 1e-12


def test_pst_target_spectrum():
    symmetric, antisymmetric = ExtensionSolver.pst_target_spectrum(2, 1.0)
    assert symmetric == [1.5, -0.5] and antisymmetric == [0.5, -1.5]
    assert ExtensionSolver.targets_from_spectrum(symmetric, antisymmetric) == [(1.5, '+'), (0.5, '-')]
    symmetric, antisymmetric = ExtensionSolver.pst_target_spectrum(42, DESIGN_DELTA)
    union = np.sort(symmetric + antisymmetric)
    assert math.isclose(union[-1], 41.5 * DESIGN_DELTA)
    assert_allclose(np.diff(union), DESIGN_DELTA)
    assert_allclose(union, -union[::-1])
    problem = ExtensionSolver.problem_from_delta(ChainHamiltonian.uniform_chain(40), 42, DESIGN_DELTA)
    assert len(problem.targets) == 42 and len(problem.all_targets()) == 84
    with pytest.raises(ChainSpecError):
        ExtensionSolver.pst_target_spectrum(0, 1.0)


def test_problem_validation():
    central = ChainHamiltonian.uniform_chain(4)
    with pytest.raises(ChainSpecError):
        ExtensionProblem(central, 0, UNKNOWN_J, ())
    with pytest.raises(SymmetryError):
        ExtensionProblem(ChainSpec([1.0, 2.0, 1.5], np.zeros(4)), 1, UNKNOWN_J, ((1.0, '+'),))
    with pytest.raises(DegenerateSystemError):
        ExtensionProblem(central, 2, UNKNOWN_J, ((1.0, '+'),))
    with pytest.raises(ChainSpecError):
        ExtensionProblem(central, 1, UNKNOWN_J, ((-1.0, '+'),))
    with pytest.raises(ChainSpecError):
        ExtensionProblem(central, 1, UNKNOWN_J, ((1.0, 'x'),))
    with pytest.raises(ChainSpecError):
        ExtensionProblem(central, 2, UNKNOWN_J, ((1.0, '+'), (1.0, '-')))
    problem = ExtensionProblem(central, 2, KnownJ(1.0), ((1.0, '+'),))
    assert problem.required_targets() == (1, 2)
    assert ExtensionProblem(central, 2, UNKNOWN_J, ((1.0, '+'), (2.0, '-'), (0.5, '+'), (3.0, '-')),
                            field_free=False).required_targets() == (4,)


def test_mirror_partners():
    even = four_site_problem()
    assert (-2.0, '-') in even.all_targets() and (-1.0, '-') in even.all_targets()
    odd = ExtensionProblem(ChainHamiltonian.uniform_chain(3), 1, UNKNOWN_J, ((1.5, '+'),))
    assert odd.all_targets() == [(1.5, '+'), (-1.5, '+')]


def _recover(rng, central, extension, field_free, count):
    """Targets read off a known assembled chain, then solved for again."""
    junction = float(rng.uniform(0.6, 1.4))
    assembled = ChainHamiltonian.assemble_chain(central, extension.couplings, extension.fields, junction)
    decomposition = ChainSpectrum.eigendecompose(assembled)
    pairs = list(zip(decomposition.eigenvalues, decomposition.symmetry_labels))
    if field_free:
        pairs = [p for p in pairs if p[0] > 1e-9]
    problem = ExtensionProblem(central, extension.size, UNKNOWN_J, tuple(pairs[:count]), field_free)
    return ExtensionSolver.solve_extension(problem), junction


def test_recovers_known_extension():
    rng = np.random.default_rng(2022)
    for central_size, size in ((4, 3), (5, 4), (6, 2), (5, 1)):
        central = random_symmetric_chain(rng, central_size, with_fields=False)
        extension = random_chain(rng, size, with_fields=False)
        solution, junction = _recover(rng, central, extension, True, size)
        assert_allclose(solution.extension.couplings, extension.couplings, atol=1e-7)
        assert abs(solution.junction - junction) <= 1e-7
    central = random_symmetric_chain(rng, 4)
    extension = random_chain(rng, 3)
    solution, junction = _recover(rng, central, extension, False, 6)
    assert_allclose(solution.extension.couplings, extension.couplings, atol=1e-7)
    assert_allclose(solution.extension.fields, extension.fields, atol=1e-7)
    assert abs(solution.junction - junction) <= 1e-7


def test_backends_give_same_extension():
    problem = four_site_problem()
    for method in ('lanczos', 'euclid'):
        solution = ExtensionSolver.solve_extension(problem, SolverOptions(method=method, refine=False))
        assert_allclose(solution.extension.couplings, [1.0], atol=1e-10)
        assert solution.diagnostics['method'] == method


def test_refinement_repairs_perturbation():
    problem = four_site_problem()
    options = SolverOptions(refine=False, verify=False)
    exact = ExtensionSolver.solve_extension(problem, options)
    perturbed = ExtensionSolver._package(problem, exact.extension.couplings * 1.01, np.zeros(2),
                                         exact.junction * 0.99, options, {})
    assert perturbed.max_spectral_residual > 1e-4
    refined = ExtensionSolver.refine_extension(problem, perturbed, options)
    assert refined.diagnostics['refined']
    assert refined.max_spectral_residual <= 1e-10
    assert abs(refined.junction - math.sqrt(1.5)) <= 1e-8


def test_uniform_extension():
    chain = ExtensionSolver.uniform_extension(ChainHamiltonian.uniform_chain(40), 8)
    assert chain.size == 56
    assert_allclose(chain.couplings, np.ones(55))


def test_124_site_design():
    problem = ExtensionSolver.problem_from_delta(ChainHamiltonian.uniform_chain(40), 42, DESIGN_DELTA)
    solution = ExtensionSolver.solve_extension(problem)
    assert solution.assembled.size == 124
    assert ChainHamiltonian.mirror_symmetric(solution.assembled)
    decomposition = ChainSpectrum.eigendecompose(solution.assembled)
    for node, symmetry in problem.all_targets():
        sector = decomposition.eigenvalues[decomposition.sector(symmetry)]
        assert np.min(np.abs(sector - node)) <= 1e-8 * DESIGN_DELTA


def test_design_solves_in_extended_precision(caplog):
    caplog.set_level(logging.DEBUG, logger='chainforge')
    problem = ExtensionSolver.problem_from_delta(ChainHamiltonian.uniform_chain(40), 42, DESIGN_DELTA)
    solution = ExtensionSolver.solve_extension(problem)
    assert any('re-solving' in record.getMessage() for record in caplog.records)
    assert solution.max_spectral_residual <= 1e-8 * DESIGN_DELTA


if __name__ == '__main__':
    test_four_site_extension()
    test_condition_residual_at_pole_target()
    test_known_junction_single_site()
    test_target_values()
    test_pst_target_spectrum()
    test_problem_validation()
    test_mirror_partners()
    test_recovers_known_extension()
    test_backends_give_same_extension()
    test_refinement_repairs_perturbation()
    test_uniform_extension()
    test_124_site_design()
