import math

import numpy as np
import pytest
from numpy.polynomial import Polynomial, Chebyshev
from numpy.testing import assert_allclose

from chainforge.chain_utils import ChainSpec, ChainHamiltonian, ChainSpectrum
from chainforge.check_utils import random_chain, extension_function
from chainforge.error_utils import DegenerateSystemError, InfeasibleExtensionError, IllPosedTargetError
from chainforge.interpolate_utils import (POLE, TargetValue, KnownJ, UNKNOWN_J, RationalFunction,
                                          RationalInterpolation, JacobiReconstruction, leading_coefficient,
                                          _polish_roots)


def test_leading_coefficient_with_domain():
    poly = Polynomial([1.0, -2.0, 0.0, 3.0])
    for kind, domain in ((Chebyshev, [-1, 1]), (Chebyshev, [0.5, 7.0]), (Polynomial, [2.0, 5.0])):
        converted = poly.convert(kind=kind, domain=domain)
        assert math.isclose(leading_coefficient(converted), 3.0, rel_tol=1e-12)


def test_projective_weights():
    assert TargetValue.from_value(1.0, POLE).weights == (1.0, 0.0)
    alpha, beta = TargetValue.from_value(2.0, 0.5).weights
    assert math.isclose(alpha / beta, 0.5) and math.isclose(math.hypot(alpha, beta), 1.0)
    alpha, beta = TargetValue.from_value(2.0, -1e8).weights
    assert math.isclose(alpha / beta, -1e8)
    assert TargetValue.from_pair(3.0, 2.0, 0.0).value is POLE


def test_fieldfree_reduce():
    nodes, values = RationalInterpolation.fieldfree_reduce([1.0, 2.0], [3.0, 5.0])
    assert nodes == [1.0, 4.0] and values == [3.0, 2.5]
    nodes, values = RationalInterpolation.fieldfree_reduce([1.0, 2.0], [POLE, 5.0], odd=True)
    assert values[0] is POLE and values[1] == 10.0
    with pytest.raises(IllPosedTargetError):
        RationalInterpolation.fieldfree_reduce([0.0], [1.0])


def test_fieldfree_lift_identity():
    g = RationalFunction(Polynomial([1.0]), Polynomial([1.0]))
    f = RationalInterpolation.fieldfree_lift(g)
    assert_allclose(f(np.array([-2.0, 0.5, 3.0])), [-2.0, 0.5, 3.0])
    assert f.numerator_degree == 1 and f.denominator_degree == 0
    assert_allclose(f.numerator_coefficients, [0.0, 1.0])


def test_reduce_fit_lift_round_trip():
    # odd f(x) = 2x(x² - 5)/((x² - 1)(x² - 9)), even extension length
    def f(x):
        return 2.0 * x * (x * x - 5.0) / ((x * x - 1.0) * (x * x - 9.0))
    nodes = np.array([0.5, 1.7, 2.4, 3.5])
    data = [TargetValue.from_value(x, f(x)) for x in nodes]
    reduced = RationalInterpolation.fieldfree_reduce_targets(data)
    g = RationalInterpolation.interpolate_rational(reduced, 1, 2)
    lifted = RationalInterpolation.fieldfree_lift(g)
    samples = np.array([0.3, 1.2, 2.0, 4.0])
    assert_allclose(lifted(samples), f(samples), rtol=1e-10)
    assert_allclose(lifted(-samples), -f(samples), rtol=1e-10)
    assert math.isclose(lifted.leading_numerator, 2.0, rel_tol=1e-10)


def test_four_site_interpolation():
    # g(z) = p/q with a pole at z=1 and g(4) = 1/2
    g = RationalInterpolation.interpolate_rational([(1.0, POLE), (4.0, 0.5)], 0, 1)
    assert_allclose(g.denominator_coefficients, [-1.0, 1.0], atol=1e-12)
    assert math.isclose(g.leading_numerator, 1.5, rel_tol=1e-12)
    f = RationalInterpolation.fieldfree_lift(g)
    assert_allclose(f.numerator_coefficients, [0.0, 1.5], atol=1e-12)
    assert_allclose(f.denominator_coefficients, [-1.0, 0.0, 1.0], atol=1e-12)
    couplings, fields, junction = JacobiReconstruction.reconstruct_chain(f)
    assert_allclose(couplings, [1.0], rtol=1e-12)
    assert_allclose(fields, [0.0, 0.0], atol=1e-12)
    assert math.isclose(junction, math.sqrt(1.5), rel_tol=1e-12)


def test_known_junction_row():
    # f = J²P/Q with Q = x² - 2, P = x, J² = 3: three values fix Q and P once J is known
    def f(x):
        return 3.0 * x / (x * x - 2.0)
    data = [(x, f(x)) for x in (0.5, 1.0, 3.0)]
    rational = RationalInterpolation.interpolate_rational(data, 1, 2, KnownJ(math.sqrt(3.0)))
    assert_allclose(rational.denominator_coefficients, [-2.0, 0.0, 1.0], atol=1e-10)
    assert_allclose(rational.numerator_coefficients, [0.0, 3.0], atol=1e-10)


def test_underdetermined_system():
    with pytest.raises(DegenerateSystemError):
        RationalInterpolation.interpolate_rational([(1.0, 2.0)], 1, 2)
    with pytest.raises(DegenerateSystemError):
        RationalInterpolation.interpolate_rational([(1.0, 2.0), (1.0, 3.0), (2.0, 1.0), (3.0, 1.0)], 1, 2)


def test_overdetermined_system_warns(caplog):
    def f(x):
        return 2.0 / (x - 1.0)
    rational = RationalInterpolation.interpolate_rational([(x, f(x)) for x in (2.0, 3.0, 5.0)], 0, 1)
    assert_allclose(rational.denominator_coefficients, [-1.0, 1.0], atol=1e-12)
    assert any("least-squares" in record.getMessage() for record in caplog.records)


def test_single_site_reconstruction():
    rational = RationalFunction.from_coefficients([2.0], [-0.75, 1.0])
    couplings, fields, junction = JacobiReconstruction.reconstruct_chain(rational)
    assert len(couplings) == 0
    assert_allclose(fields, [0.75])
    assert math.isclose(junction, math.sqrt(2.0))


def test_reconstruction_backends_agree():
    rng = np.random.default_rng(17)
    for size in (1, 2, 4, 6):
        fragment = random_chain(rng, size)
        rational = extension_function(fragment, 1.3)
        for method in ('lanczos', 'euclid'):
            couplings, fields, junction = JacobiReconstruction.reconstruct_chain(rational, method=method)
            assert_allclose(couplings, fragment.couplings, atol=1e-8)
            assert_allclose(fields, fragment.fields, atol=1e-8)
            assert math.isclose(junction, 1.3, rel_tol=1e-10)


def test_reconstruction_round_trip():
    rng = np.random.default_rng(20220601)
    for case in range(200):
        fragment = random_chain(rng, int(rng.integers(1, 13)), with_fields=bool(case % 2))
        junction = float(rng.uniform(0.5, 1.5))
        couplings, fields, rebuilt = JacobiReconstruction.reconstruct_chain(
            extension_function(fragment, junction), UNKNOWN_J)
        assert np.max(np.abs(couplings - fragment.couplings), initial=0.0) <= 1e-8
        assert np.max(np.abs(fields - fragment.fields)) <= 1e-8
        assert abs(rebuilt - junction) <= 1e-8
        # char_poly of the rebuilt fragment reproduces Q and P at sample points
        matrix = ChainHamiltonian.build_hamiltonian(ChainSpec(couplings, fields))
        samples = rng.uniform(-4.0, 4.0, fragment.size)
        q, p = ChainSpectrum.char_poly_eval(matrix, samples)
        q_ref, p_ref = ChainSpectrum.char_poly_eval(ChainHamiltonian.build_hamiltonian(fragment), samples)
        scale = (np.abs(samples) + 4.0) ** fragment.size
        assert np.all(np.abs(q - q_ref) <= 1e-8 * scale)
        assert np.all(np.abs(p - p_ref) <= 1e-8 * scale)


def test_negative_residue_is_infeasible():
    # P and Q roots do not interlace: residue at one pole is negative
    rational = RationalFunction.from_coefficients([-3.0, 1.0], [-1.0, 0.0, 1.0])
    with pytest.raises(InfeasibleExtensionError):
        JacobiReconstruction.reconstruct_chain(rational)
    complex_poles = RationalFunction.from_coefficients([0.0, 1.0], [1.0, 0.0, 1.0])
    with pytest.raises(InfeasibleExtensionError):
        JacobiReconstruction.reconstruct_chain(complex_poles)


def test_lanczos_known_matrix():
    diag, offdiag = np.array([0.3, -0.2, 0.5]), np.array([1.1, 0.7])
    spec = ChainSpec(offdiag, diag)
    decomposition = ChainSpectrum.eigendecompose(spec)
    weights = decomposition.eigenvectors[0] ** 2
    fields, couplings = JacobiReconstruction.lanczos(decomposition.eigenvalues, weights)
    assert_allclose(fields, diag, atol=1e-12)
    assert_allclose(couplings, offdiag, atol=1e-12)


def test_exact_rank_deficient_system():
    # f = 1/(x - 1) fits with any common factor (x - c): a two-dimensional null space.
    # The weights are exact, so the extended-precision solve sees the same degeneracy.
    data = [TargetValue(node, 1.0 / scale, (1.0, scale))
            for node, scale in ((2.0, 1.0), (3.0, 2.0), (5.0, 4.0), (9.0, 8.0))]
    with pytest.raises(DegenerateSystemError):
        RationalInterpolation.interpolate_rational(data, 1, 2)


def test_poles_are_polished():
    rng = np.random.default_rng(12)
    fragment = random_chain(rng, 12)
    eigenvalues = np.sort(ChainSpectrum.eigenvalues(ChainHamiltonian.build_hamiltonian(fragment)))[::-1]
    poles, residues = extension_function(fragment, 1.1).poles_and_residues()
    assert_allclose(np.real(poles), eigenvalues, atol=1e-9)
    assert math.isclose(float(np.sum(np.real(residues))), 1.21, rel_tol=1e-8)
    # roots pushed off by 1e-4 return to the eigenvalues
    denominator = Chebyshev.fromroots(eigenvalues, domain=[-4.0, 4.0])
    shifted = eigenvalues + 1e-4 * rng.choice([-1.0, 1.0], len(eigenvalues))
    assert_allclose(_polish_roots(denominator, shifted), eigenvalues, atol=1e-9)


if __name__ == '__main__':
    test_leading_coefficient_with_domain()
    test_projective_weights()
    test_fieldfree_reduce()
    test_fieldfree_lift_identity()
    test_reduce_fit_lift_round_trip()
    test_four_site_interpolation()
    test_known_junction_row()
    test_underdetermined_system()
    test_single_site_reconstruction()
    test_reconstruction_backends_agree()
    test_reconstruction_round_trip()
    test_negative_residue_is_infeasible()
    test_lanczos_known_matrix()
    test_exact_rank_deficient_system()
    test_poles_are_polished()
