import numpy as np
import pytest

from qduality import fixedpoints as fp
from qduality.duality import BipartiteState
from qduality.errors import PreconditionError
from qduality.qobjects import (
    DensityOperator,
    Ensemble,
    KrausChannel,
    identity_channel,
    max_entangled,
    pure_state,
    unitary_channel,
)
from qduality.randomgen import random_channel, random_density, random_unitary


def dephasing_channel(d):
    eye = np.eye(d, dtype=complex)
    return KrausChannel(
        tuple(np.outer(eye[:, i], eye[:, i]) for i in range(d)), d, d
    )


def depolarizing_channel(d):
    eye = np.eye(d, dtype=complex)
    kraus = tuple(
        np.outer(eye[:, i], eye[:, j]) / np.sqrt(d) for i in range(d) for j in range(d)
    )
    return KrausChannel(kraus, d, d)


def block_channel_4():
    """Measure {block(0,1), block(2,3)}; identity on the first block,
    flatten to the maximally mixed state inside the second."""
    eye = np.eye(4, dtype=complex)
    p1 = np.diag([1, 1, 0, 0]).astype(complex)
    kraus = [p1] + [
        np.outer(eye[:, i], eye[:, j]) / np.sqrt(2) for i in (2, 3) for j in (2, 3)
    ]
    return KrausChannel(tuple(kraus), 4, 4)


def test_fixed_space_dimensions():
    for d in (2, 3):
        assert fp.fixed_point_space(identity_channel(d)).dim == d * d
        assert fp.fixed_point_space(dephasing_channel(d)).dim == d
        assert fp.fixed_point_space(depolarizing_channel(d)).dim == 1


def test_fixed_space_basis_is_invariant_and_orthonormal(rng):
    e = dephasing_channel(3)
    space = fp.fixed_point_space(e)
    for i, x in enumerate(space.basis):
        assert np.max(np.abs(e(x) - x)) < 1e-9
        for j, y in enumerate(space.basis):
            ip = np.trace(x.conj().T @ y)
            assert abs(ip - (1.0 if i == j else 0.0)) < 1e-9


def test_fixed_space_invariant_under_kraus_remixing(rng):
    e = dephasing_channel(3)
    u = random_unitary(3, rng)
    remixed = tuple(
        sum(u[i, j] * k for j, k in enumerate(e.kraus)) for i in range(3)
    )
    e2 = KrausChannel(remixed, 3, 3)
    assert fp.fixed_point_space(e2).dim == fp.fixed_point_space(e).dim


def test_invariant_state_is_fixed(rng):
    e = random_channel(3, 3, rng)
    rho = fp.invariant_state(e)
    assert np.max(np.abs(e(rho.matrix) - rho.matrix)) < 1e-9


def test_invariant_state_of_unitary_channel(rng):
    # generic-phase unitary: only the maximally mixed state survives averaging
    u = random_unitary(4, rng)
    rho = fp.invariant_state(unitary_channel(u))
    assert np.allclose(rho.matrix, np.eye(4) / 4, atol=1e-9)
    assert np.max(np.abs(unitary_channel(u)(rho.matrix) - rho.matrix)) < 1e-9


def test_decompose_identity():
    blocks = fp.decompose_fixed_algebra(identity_channel(3))
    assert [(b.d1, b.d2) for b in blocks] == [(3, 1)]


def test_decompose_dephasing():
    blocks = fp.decompose_fixed_algebra(dephasing_channel(3))
    assert [(b.d1, b.d2) for b in blocks] == [(1, 1)] * 3


def test_decompose_depolarizing():
    blocks = fp.decompose_fixed_algebra(depolarizing_channel(3))
    assert [(b.d1, b.d2) for b in blocks] == [(1, 3)]
    assert np.allclose(blocks[0].nu.matrix, np.eye(3) / 3, atol=1e-8)


def test_decompose_block_channel():
    e = block_channel_4()
    blocks = fp.decompose_fixed_algebra(e)
    assert [(b.d1, b.d2) for b in blocks] == [(2, 1), (1, 2)]
    assert np.allclose(blocks[1].nu.matrix, np.eye(2) / 2, atol=1e-8)


def test_decompose_reconstruction_invariant(rng):
    e = block_channel_4()
    for block in fp.decompose_fixed_algebra(e):
        for _ in range(10):
            mu = random_density(block.d1, rng).matrix
            x = block.embed(mu)
            assert np.max(np.abs(e(x) - x)) < 1e-8


def test_decompose_covers_fixed_space():
    e = block_channel_4()
    blocks = fp.decompose_fixed_algebra(e)
    assert sum(b.d1 * b.d1 for b in blocks) == fp.fixed_point_space(e).dim


def test_decompose_amplitude_damping_uses_recurrent_support():
    k0 = np.array([[1.0, 0.0], [0.0, 0.0]])
    k1 = np.array([[0.0, 1.0], [0.0, 0.0]])
    blocks = fp.decompose_fixed_algebra(KrausChannel((k0, k1), 2, 2))
    assert [(b.d1, b.d2) for b in blocks] == [(1, 1)]
    assert np.allclose(blocks[0].projector, np.diag([1.0, 0.0]), atol=1e-9)


def test_decompose_unitary_conjugation(rng):
    # commutant of a two-distinct-eigenvalue unitary on C^3
    u_basis = random_unitary(3, rng)
    u = u_basis @ np.diag([1.0, 1.0, 1j]) @ u_basis.conj().T
    blocks = fp.decompose_fixed_algebra(unitary_channel(u))
    assert [(b.d1, b.d2) for b in blocks] == [(2, 1), (1, 1)]


def test_decompose_weight_from_reference():
    e = block_channel_4()
    ref = DensityOperator(np.diag([0.3, 0.3, 0.2, 0.2]).astype(complex))
    blocks = fp.decompose_fixed_algebra(e, reference=ref)
    assert abs(blocks[0].weight - 0.6) < 1e-10
    assert abs(blocks[1].weight - 0.4) < 1e-10


def qubit_example():
    s1 = pure_state(np.array([1.0, 0.0]))
    s2 = pure_state(np.array([1.0, 1.0]) / np.sqrt(2))
    return s1, s2, identity_channel(2), identity_channel(2)


def test_broadcast_obstruction_qubit():
    s1, s2, e1, e2 = qubit_example()
    w = fp.broadcast_obstruction(s1, s2, e1, e2)
    assert abs(w.overlap - 1 / np.sqrt(2)) < 1e-10
    assert 1e-8 < w.overlap < 1 - 1e-8
    v1, v2 = w.clonable_states
    for vec in (v1, v2):
        full = w.block.embed(np.outer(vec, vec.conj()))
        assert np.max(np.abs(e1(full) - full)) < 1e-8
        assert np.max(np.abs(e2(full) - full)) < 1e-8


def test_broadcast_obstruction_rejects_commuting_states():
    s1 = DensityOperator(np.diag([0.8, 0.2]))
    s2 = DensityOperator(np.diag([0.3, 0.7]))
    with pytest.raises(PreconditionError):
        fp.broadcast_obstruction(s1, s2, identity_channel(2), identity_channel(2))


def test_broadcast_obstruction_rejects_unfixed_states(rng):
    s1, s2, _, _ = qubit_example()
    with pytest.raises(PreconditionError):
        fp.broadcast_obstruction(s1, s2, depolarizing_channel(2), identity_channel(2))


def test_monogamy_demo_qubit():
    s1, s2, e1, e2 = qubit_example()
    res = fp.monogamy_demo(0.5, s1, s2, e1, e2)
    assert all(c["pass"] for c in res["checks"])
    for r in res["results"].values():
        assert r["block_probability"] > 0.1
        assert r["factor_purity"] >= 1 - 1e-8
        assert r["schmidt_rank"] >= 2


def test_monogamy_demo_rejects_bad_weight():
    s1, s2, e1, e2 = qubit_example()
    with pytest.raises(PreconditionError):
        fp.monogamy_demo(1.0, s1, s2, e1, e2)


def test_cloning_demo_qubit():
    s1, s2, e1, e2 = qubit_example()
    ens = Ensemble(((0.5, s1), (0.5, s2)))
    res = fp.cloning_demo(ens, e1, e2)
    assert all(c["pass"] for c in res["checks"])


def test_cloning_demo_rejects_orthogonal_ensemble():
    s1 = pure_state(np.array([1.0, 0.0]))
    s2 = pure_state(np.array([0.0, 1.0]))
    ens = Ensemble(((0.5, s1), (0.5, s2)))
    with pytest.raises(PreconditionError):
        fp.cloning_demo(ens, identity_channel(2), identity_channel(2))


def test_cloning_demo_rejects_mixed_member():
    s1 = pure_state(np.array([1.0, 0.0]))
    s2 = DensityOperator(np.array([[0.6, 0.2], [0.2, 0.4]]))
    ens = Ensemble(((0.5, s1), (0.5, s2)))
    with pytest.raises(PreconditionError):
        fp.cloning_demo(ens, identity_channel(2), identity_channel(2))


def test_universal_direction_a():
    res = fp.universal_broadcast_equiv("a", identity_channel(2), identity_channel(2))
    assert res["verdict"]
    for c in res["checks"]:
        assert c["value"] <= 1e-10


def test_universal_direction_a_rejects_nonidentity(rng):
    with pytest.raises(PreconditionError):
        fp.universal_broadcast_equiv(
            "a", unitary_channel(random_unitary(2, rng)), identity_channel(2)
        )


def test_universal_direction_b_rotated(rng):
    d = 3
    phi = max_entangled(d)
    u = random_unitary(d, rng)
    vec = np.kron(np.eye(d), u) @ phi
    t = BipartiteState(pure_state(vec), (d, d))
    res = fp.universal_broadcast_equiv("b", t, t)
    assert res["verdict"]


def test_universal_direction_b_negative_verdict():
    t = BipartiteState(pure_state(np.eye(4, dtype=complex)[:, 0]), (2, 2))
    res = fp.universal_broadcast_equiv("b", t, t)
    assert not res["verdict"]
