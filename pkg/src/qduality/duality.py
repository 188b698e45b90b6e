"""Channel-state dualities.

Two bijections between channels and bipartite operators:

* the standard one, pairing a CP map E with (I x E)(|Phi+><Phi+|), and
* the conditional variant, pairing (rho, E-restricted-to-support(rho))
  with a bipartite state whose A-marginal is rho^T.

Both are basis dependent; the computational basis is the default and an
optional unitary selects another basis.  Subsystem A is the slow index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ShapeError, ValidationError, ZeroProbabilityError
from .linalg import as_matrix, dagger, hermitize
from .qobjects import (
    DensityOperator,
    KrausChannel,
    Povm,
    _apply_on_second,
    kraus_from_choi,
    max_entangled,
    reduced_channel,
)

TP_ON_SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class BipartiteState:
    """Density operator on A x B with declared factor dimensions."""

    state: DensityOperator
    dims: tuple[int, int]

    def __post_init__(self):
        da, db = self.dims
        if da * db != self.state.dim:
            raise ShapeError(f"dims {self.dims} do not multiply to {self.state.dim}")

    def marginal(self, keep: str) -> np.ndarray:
        return linalg.partial_trace(self.state.matrix, self.dims, keep)


@dataclass(frozen=True)
class IsoPair:
    """A state together with a channel trace-preserving on its support."""

    rho: DensityOperator
    channel: KrausChannel
    support_rank: int = field(default=None)

    def __post_init__(self):
        if self.channel.din != self.rho.dim:
            raise ShapeError("channel input dimension does not match the state")
        proj = linalg.support_projector(self.rho.matrix)
        total = self.channel.kraus_sum
        if np.max(np.abs(proj @ total @ proj - proj)) > TP_ON_SUPPORT_TOL:
            raise ValidationError(
                "channel is not trace-preserving on the support of the state"
            )
        rank = linalg.support_rank(self.rho.matrix)
        if self.support_rank is not None and self.support_rank != rank:
            raise ValidationError(
                f"declared support rank {self.support_rank} != computed {rank}"
            )
        object.__setattr__(self, "support_rank", rank)

    @property
    def dims(self) -> tuple[int, int]:
        return self.channel.din, self.channel.dout


def eigenbasis(rho: DensityOperator) -> np.ndarray:
    """Deterministic eigenbasis of a state, eigenvalues descending."""
    return linalg.herm_eig(rho.matrix).eigenvectors


def std_iso_forward(e: KrausChannel) -> np.ndarray:
    """(I x E)(|Phi+><Phi+|); trace 1 iff E is trace preserving."""
    return e.choi()


def std_iso_reverse(tau: np.ndarray, dims: tuple[int, int], sigma: np.ndarray) -> np.ndarray:
    """Channel action recovered from its dual state.

    E(sigma) = dA^2 <Phi+| sigma x tau |Phi+>, contracting the A and A' legs.
    """
    da, db = dims
    tau = as_matrix(tau)
    sigma = as_matrix(sigma)
    if tau.shape != (da * db, da * db):
        raise ShapeError(f"state shape {tau.shape} does not match dims {dims}")
    if sigma.shape != (da, da):
        raise ShapeError(f"input shape {sigma.shape} != ({da}, {da})")
    t = tau.reshape(da, db, da, db)
    return da * np.einsum("jk,jmkn->mn", sigma, t)


def operator_to_state(r: np.ndarray) -> np.ndarray:
    """Vector (1/sqrt(dA)) sum_j |j> x R|j> for a dB x dA operator."""
    r = as_matrix(r)
    da = r.shape[1]
    return r.T.reshape(-1) / np.sqrt(da)


def state_to_operator(psi: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Inverse of operator_to_state: reshape plus the sqrt(dA) factor."""
    da, db = dims
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != da * db:
        raise ShapeError(f"vector length {psi.size} does not match dims {dims}")
    return np.sqrt(da) * psi.reshape(da, db).T


def _rotate_pair(pair: IsoPair, basis: np.ndarray):
    """Express the pair in the given basis (channel precomposed with it)."""
    u = as_matrix(basis)
    rho_c = dagger(u) @ pair.rho.matrix @ u
    kraus_c = tuple(k @ u for k in pair.channel.kraus)
    return hermitize(rho_c), kraus_c


def iso_forward(pair: IsoPair, basis: np.ndarray | None = None) -> BipartiteState:
    """Bipartite state dual to (rho, channel-on-support) in the chosen basis."""
    da, db = pair.dims
    if basis is None:
        rho_c = pair.rho.matrix
        kraus_c = pair.channel.kraus
    else:
        rho_c, kraus_c = _rotate_pair(pair, basis)
    # sqrt(dA) ((rho^T)^{1/2} x I)|Phi+> is just the row-major flattening
    # of (rho^T)^{1/2}
    phi = linalg.psd_sqrt(rho_c.T).reshape(-1)
    chan = KrausChannel(kraus_c, da, db)
    tau = _apply_on_second(chan, np.outer(phi, np.conj(phi)), da)
    if basis is not None:
        u = as_matrix(basis)
        rot = np.kron(u, np.eye(db))
        tau = rot @ tau @ dagger(rot)
    return BipartiteState(DensityOperator(hermitize(tau)), (da, db))


def iso_reverse(tau: BipartiteState) -> IsoPair:
    """Recover (rho, channel-on-support) from a bipartite state.

    The channel is returned on the full input space, trace preserving on the
    support of rho and zero off it.
    """
    da, db = tau.dims
    tau_a = hermitize(tau.marginal("A"))
    rho = hermitize(tau_a.T)
    inv_root, rank = linalg.support_pinv(tau_a, -0.5)
    big = np.kron(inv_root, np.eye(db))
    sigma = hermitize(big @ tau.state.matrix @ big)
    # compress the A leg to the support of tau_A
    w = linalg.support_isometry(tau_a)
    comp = np.kron(w, np.eye(db))
    choi = hermitize(dagger(comp) @ sigma @ comp) / rank
    small = kraus_from_choi(choi, rank, db)
    # the channel input vectors are the conjugated support vectors of tau_A,
    # which span the support of rho = tau_A^T
    v = np.conj(w)
    kraus = tuple(k @ dagger(v) for k in small.kraus)
    channel = KrausChannel(kraus, da, db)
    return IsoPair(DensityOperator(rho), channel)


def compress_channel(e: KrausChannel, isometry: np.ndarray) -> KrausChannel:
    """Restrict a channel's input to the range of an isometry."""
    v = as_matrix(isometry)
    return KrausChannel(tuple(k @ v for k in e.kraus), v.shape[1], e.dout)


def channel_distance_on_support(
    e1: KrausChannel, e2: KrausChannel, rho: DensityOperator
) -> float:
    """Choi distance between two channels restricted to support(rho)."""
    v = linalg.support_isometry(rho.matrix)
    c1 = compress_channel(e1, v).choi()
    c2 = compress_channel(e2, v).choi()
    return float(np.max(np.abs(c1 - c2)))


def verify_roundtrip(pair: IsoPair) -> dict:
    """Forward-then-reverse deviations for the conditional isomorphism."""
    tau = iso_forward(pair)
    back = iso_reverse(tau)
    rho_dev = float(np.max(np.abs(pair.rho.matrix - back.rho.matrix)))
    chan_dev = channel_distance_on_support(pair.channel, back.channel, pair.rho)
    return {
        "rho_deviation": rho_dev,
        "channel_deviation": chan_dev,
        "support_rank": pair.support_rank,
    }


def verify_trace_commute(
    rho: DensityOperator, e: KrausChannel, dims_out: tuple[int, int]
) -> float:
    """Deviation between tracing C after or before the isomorphism."""
    db, dc = dims_out
    if db * dc != e.dout:
        raise ShapeError(f"output dim {e.dout} does not factor as {dims_out}")
    da = e.din
    tau_full = iso_forward(IsoPair(rho, e))
    t = tau_full.state.matrix.reshape(da, db, dc, da, db, dc)
    traced = np.trace(t, axis1=2, axis2=5).reshape(da * db, da * db)
    e_red = reduced_channel(e, dims_out, "C")
    tau_red = iso_forward(IsoPair(rho, e_red))
    return float(np.max(np.abs(traced - tau_red.state.matrix)))


def verify_measure_commute(
    rho: DensityOperator,
    e: KrausChannel,
    m: Povm,
    outcome: int,
    basis: np.ndarray | None = None,
) -> float:
    """Deviation between measuring on the dual state and on the preparation.

    Compares sqrt(M) x I tau sqrt(M) x I (unnormalized) with the forward
    image of the transposed-measurement update of rho.  The diagram holds
    when the POVM element commutes with rho in the isomorphism basis.
    """
    da, db = e.din, e.dout
    el = m.elements[outcome]
    tau = iso_forward(IsoPair(rho, e), basis)
    root = np.kron(linalg.psd_sqrt(el), np.eye(db))
    path1 = root @ tau.state.matrix @ root
    el_t = m.transpose(basis).elements[outcome]
    root_t = linalg.psd_sqrt(el_t)
    updated = hermitize(root_t @ rho.matrix @ root_t)
    prob = float(np.trace(updated).real)
    if prob <= 1e-12:
        raise ZeroProbabilityError(f"outcome {outcome} has probability {prob:.3e}")
    pair2 = IsoPair(DensityOperator(updated / prob), e)
    path2 = prob * iso_forward(pair2, basis).state.matrix
    return float(np.max(np.abs(path1 - path2)))
