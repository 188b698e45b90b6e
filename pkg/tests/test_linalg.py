import numpy as np
import pytest

from qduality import linalg
from qduality.errors import NotPSDError, ShapeError
from qduality.randomgen import complex_gaussian, random_density, random_unitary


def test_hermitize_and_is_hermitian(rng):
    g = complex_gaussian(rng, (4, 4))
    h = linalg.hermitize(g)
    assert linalg.is_hermitian(h)
    assert not linalg.is_hermitian(g + np.diag([1j, 0, 0, 0]))


def test_herm_eig_reconstructs_and_sorts(rng):
    h = linalg.hermitize(complex_gaussian(rng, (5, 5)))
    eig = linalg.herm_eig(h)
    assert np.all(np.diff(eig.eigenvalues) <= 0)
    assert np.allclose(eig.reconstruct(), h, atol=1e-12)
    # columns orthonormal
    v = eig.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(5), atol=1e-12)


def test_psd_sqrt_squares_back(rng):
    p = random_density(4, rng).matrix
    r = linalg.psd_sqrt(p)
    assert np.allclose(r @ r, p, atol=1e-12)
    assert linalg.is_hermitian(r)


def test_psd_sqrt_rejects_indefinite():
    with pytest.raises(NotPSDError):
        linalg.psd_sqrt(np.diag([1.0, -0.5]))


def test_partial_trace_against_einsum(rng):
    m = linalg.hermitize(complex_gaussian(rng, (6, 6)))
    t = m.reshape(2, 3, 2, 3)
    assert np.allclose(
        linalg.partial_trace(m, (2, 3), "A"), np.einsum("ijkj->ik", t), atol=1e-13
    )
    assert np.allclose(
        linalg.partial_trace(m, (2, 3), "B"), np.einsum("ijil->jl", t), atol=1e-13
    )


def test_partial_trace_of_product(rng):
    a = random_density(2, rng).matrix
    b = random_density(3, rng).matrix
    m = np.kron(a, b)
    assert np.allclose(linalg.partial_trace(m, (2, 3), "A"), a, atol=1e-12)
    assert np.allclose(linalg.partial_trace(m, (2, 3), "B"), b, atol=1e-12)


def test_support_pinv_properties(rng):
    p = random_density(5, rng, rank=3).matrix
    inv, rank = linalg.support_pinv(p, -1.0)
    assert rank == 3
    proj = linalg.support_projector(p)
    assert np.allclose(inv @ p, proj, atol=1e-10)
    inv_root, _ = linalg.support_pinv(p, -0.5)
    assert np.allclose(inv_root @ p @ inv_root, proj, atol=1e-10)


def test_support_isometry_spans_support(rng):
    p = random_density(4, rng, rank=2).matrix
    v = linalg.support_isometry(p)
    assert v.shape == (4, 2)
    assert np.allclose(v.conj().T @ v, np.eye(2), atol=1e-12)
    assert np.allclose(v @ v.conj().T, linalg.support_projector(p), atol=1e-10)


def test_schmidt_reconstructs(rng):
    v = complex_gaussian(rng, 12)
    v /= np.linalg.norm(v)
    dec = linalg.schmidt(v, (3, 4))
    w = dec.reconstruct()
    # global phase fixed by construction
    assert np.allclose(w, v, atol=1e-12) or np.allclose(w, -v, atol=1e-12)
    assert dec.rank == 3


def test_schmidt_rank_of_product_state(rng):
    a = complex_gaussian(rng, 3)
    b = complex_gaussian(rng, 2)
    v = np.kron(a, b)
    assert linalg.schmidt_rank(v / np.linalg.norm(v), (3, 2)) == 1


def test_kron_dimension_guard():
    big = np.eye(70)
    with pytest.raises(ShapeError):
        linalg.kron(big, big)


def test_random_unitary_is_unitary(rng):
    u = random_unitary(4, rng)
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
