from fractions import Fraction

import numpy as np
import pytest

from mumkit.exceptions import InvalidStateError
from mumkit.linalg import dagger, schmidt_decompose, tensor
from mumkit.mum import build_mum_family, mub_unitaries
from mumkit.spectra import synthesize_spectrum
from mumkit.states import (
    DensityMatrix,
    as_density,
    canonical_pure,
    dicke,
    dicke_schmidt,
    isotropic,
    max_entangled,
    mub_schmidt_mixture,
    noisy_dicke,
    ppt_bound_state,
    random_density,
    random_product_state,
    random_pure,
    random_unitary,
    schmidt_aligned,
    schmidt_frame,
)
from mumkit.witness import WitnessConfig, entanglement_monotone, evaluate


def test_density_matrix_validation():
    with pytest.raises(InvalidStateError):
        DensityMatrix((2, 2), np.eye(4))
    with pytest.raises(InvalidStateError):
        DensityMatrix((2, 2), np.diag([1.5, -0.5, 0, 0]))
    bad = np.eye(4) / 4
    bad[0, 1] = 0.1
    with pytest.raises(InvalidStateError):
        DensityMatrix((2, 2), bad)
    with pytest.raises(InvalidStateError):
        DensityMatrix((2, 3), np.eye(4) / 4)
    with pytest.raises(InvalidStateError):
        as_density(np.eye(5) / 5)


def test_isotropic_endpoints_and_ppt():
    np.testing.assert_allclose(isotropic(3, 0.0).matrix, np.eye(9) / 9)
    for d in (2, 3, 4):
        edge = 1 / (d + 1)
        assert isotropic(d, edge - 1e-3).is_ppt()
        assert not isotropic(d, edge + 1e-3).is_ppt()
    with pytest.raises(ValueError):
        isotropic(3, 1.0)


def test_isotropic_twirl_invariance(rng):
    rho = isotropic(3, 0.37).matrix
    for _ in range(10):
        u = random_unitary(3, rng)
        op = tensor(np.conj(u), u)
        assert np.max(np.abs(rho - op @ rho @ dagger(op))) < 1e-10


def test_dicke_vectors():
    np.testing.assert_allclose(dicke(2, 1), np.array([0, 1, 1, 0]) / np.sqrt(2))
    psi = dicke(4, 2)
    assert np.count_nonzero(psi) == 6
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    for n, k in [(5, 2), (6, 3), (3, 0)]:
        v = dicke(n, k)
        for idx in np.flatnonzero(v):
            assert bin(idx).count("1") == k
    with pytest.raises(ValueError):
        dicke(3, 4)


def test_dicke_schmidt_examples():
    assert dicke_schmidt(2, 2, exact=True) == [Fraction(1, 6), Fraction(2, 3), Fraction(1, 6)]
    assert dicke_schmidt(1, 1, exact=True) == [Fraction(1, 2), Fraction(1, 2)]


@pytest.mark.parametrize("n,k", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_dicke_schmidt_matches_svd(n, k):
    lam, _, _ = schmidt_decompose(dicke(2 * n, k), (2**n, 2**n))
    nonzero = np.sort(lam[lam > 1e-12])
    np.testing.assert_allclose(nonzero, np.sort(dicke_schmidt(n, k)), atol=1e-10)


def test_dicke_schmidt_normalised():
    for n in range(1, 7):
        for k in range(2 * n + 1):
            assert sum(dicke_schmidt(n, k, exact=True)) == 1


def test_noisy_dicke():
    np.testing.assert_allclose(noisy_dicke(4, 2, 1.0).matrix, np.eye(16) / 16)
    rho = noisy_dicke(4, 2, 0.0)
    assert rho.dims == (4, 4)
    psi = dicke(4, 2)
    assert np.real(psi @ rho.matrix @ psi) == pytest.approx(1.0)
    lam, _, _ = schmidt_decompose(psi, (4, 4))
    assert entanglement_monotone(lam, 4) == pytest.approx(5 / 9)
    with pytest.raises(ValueError):
        noisy_dicke(3, 1, 0.1)
    with pytest.raises(ValueError):
        noisy_dicke(4, 2, 1.5)


def test_ppt_bound_state():
    rho = ppt_bound_state()
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-15)
    ev = np.linalg.eigvalsh(rho.matrix)
    np.testing.assert_allclose(ev, [0] * 4 + [0.2] * 5, atol=1e-12)
    assert np.linalg.eigvalsh(rho.partial_transpose()).min() >= -1e-10
    assert rho.is_ppt()


def test_schmidt_alignment(rng):
    psi = random_pure(9, rng)
    lam, a, b = schmidt_frame(psi, (3, 3))
    aligned = tensor(dagger(a), dagger(b)) @ psi
    np.testing.assert_allclose(np.abs(aligned), canonical_pure(lam), atol=1e-12)
    rho = schmidt_aligned(DensityMatrix.from_vector(psi, (3, 3)), psi)
    np.testing.assert_allclose(np.abs(rho.matrix), np.abs(np.outer(canonical_pure(lam), canonical_pure(lam))), atol=1e-12)


def test_mixture_single_product_component():
    rho = mub_schmidt_mixture([(1.0, [1, 0, 0])], 3)
    assert np.linalg.matrix_rank(rho.matrix, tol=1e-10) == 1
    assert rho.is_ppt()
    np.testing.assert_allclose(rho.matrix[0, 0], 1.0)


def test_mixture_components_have_unbiased_schmidt_bases():
    rho = mub_schmidt_mixture([(0.5, np.full(3, 1 / 3)), (0.5, [0.5, 0.3, 0.2])], 3)
    us = mub_unitaries(3)
    psi1 = tensor(np.conj(us[1]), us[1]) @ canonical_pure([0.5, 0.3, 0.2])
    lam, a, b = schmidt_decompose(psi1, (3, 3))
    np.testing.assert_allclose(lam, [0.5, 0.3, 0.2], atol=1e-12)
    np.testing.assert_allclose(np.abs(b), 1 / np.sqrt(3), atol=1e-12)
    assert np.trace(rho.matrix).real == pytest.approx(1.0)


def test_mixture_validation():
    with pytest.raises(ValueError):
        mub_schmidt_mixture([(0.5, [1, 0]), (0.6, [1, 0])], 2)
    with pytest.raises(ValueError):
        mub_schmidt_mixture([(1.0, [0.5, 0.6])], 2)
    with pytest.raises(ValueError):
        mub_schmidt_mixture([(0.25, [1, 0])] * 4, 2)


def test_example4_two_maximally_entangled():
    kappa = 0.8
    f = build_mum_family(synthesize_spectrum(3, kappa, [0.0]), mub_unitaries(3))
    rho = mub_schmidt_mixture([(0.5, np.full(3, 1 / 3)), (0.5, np.full(3, 1 / 3))], 3)
    res = evaluate(WitnessConfig.identity(f, [0, 1]), rho)
    assert res.m_total == pytest.approx(2 * (kappa - 1 / 3), abs=1e-8)


def test_example4_rank_two_formula():
    rng = np.random.default_rng(44)
    kappa = 0.7
    f = build_mum_family(synthesize_spectrum(3, kappa, [0.0]), mub_unitaries(3))
    cfg = WitnessConfig.identity(f, [0, 1])
    for _ in range(20):
        p0 = rng.uniform()
        lam0, lam1 = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
        rho = mub_schmidt_mixture([(p0, lam0), (1 - p0, lam1)], 3)
        expected = (kappa - 1 / 3) * (1 + p0 * entanglement_monotone(lam0) + (1 - p0) * entanglement_monotone(lam1))
        assert evaluate(cfg, rho).m_total == pytest.approx(expected, abs=1e-8)


def test_random_generators(rng):
    u = random_unitary(4, rng)
    np.testing.assert_allclose(u @ dagger(u), np.eye(4), atol=1e-12)
    rho = random_density(6, rng, rank=2)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 2
    prod = random_product_state(2, 3, rng)
    assert prod.dims == (2, 3) and prod.is_ppt()
    pure = random_product_state(3, 3, rng, pure=True)
    assert np.trace(pure.matrix @ pure.matrix).real == pytest.approx(1.0)


def test_max_entangled():
    phi = max_entangled(3)
    lam, _, _ = schmidt_decompose(phi, (3, 3))
    np.testing.assert_allclose(lam, [1 / 3] * 3)
