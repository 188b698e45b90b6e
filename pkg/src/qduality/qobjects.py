"""Validated quantum objects and the measurement/preparation machinery.

Density operators, Kraus channels, POVMs and ensembles, plus the generalized
Born rule, the square-root update rule, ensemble preparations and the
POVM/ensemble correspondence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .classical import Distribution
from .errors import (
    NotPSDError,
    ShapeError,
    ValidationError,
    ZeroProbabilityError,
)
from .linalg import as_matrix, dagger, hermitize, kron, partial_trace

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
TP_TOL = 1e-10
ZERO_PROB = 1e-12


@dataclass(frozen=True)
class DensityOperator:
    """Unit-trace PSD Hermitian matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ShapeError("density operator must be square")
        if not linalg.is_hermitian(m, HERM_TOL):
            raise ValidationError("density operator is not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density operator has trace {tr}, not 1")
        w = np.linalg.eigvalsh(hermitize(m))
        if w[0] < -PSD_TOL:
            raise NotPSDError(f"density operator has negative eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def pure_state(vec: np.ndarray) -> DensityOperator:
    """Projector onto a (normalized) state vector."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n <= 0:
        raise ValidationError("zero vector is not a state")
    v = v / n
    return DensityOperator(np.outer(v, np.conj(v)))


@dataclass(frozen=True)
class KrausChannel:
    """CP map given by a finite Kraus family of dout x din matrices."""

    kraus: tuple
    din: int
    dout: int

    def __post_init__(self):
        ks = tuple(as_matrix(k) for k in self.kraus)
        if not ks:
            raise ValidationError("channel needs at least one Kraus operator")
        for k in ks:
            if k.shape != (self.dout, self.din):
                raise ShapeError(
                    f"Kraus operator shape {k.shape} != ({self.dout}, {self.din})"
                )
        total = self.kraus_sum_from(ks)
        w = np.linalg.eigvalsh(hermitize(total))
        if w[-1] > 1 + TP_TOL:
            raise ValidationError(
                "sum of K†K exceeds the identity; not trace-nonincreasing"
            )
        object.__setattr__(self, "kraus", ks)

    @staticmethod
    def kraus_sum_from(ks) -> np.ndarray:
        return sum(dagger(k) @ k for k in ks)

    @property
    def kraus_sum(self) -> np.ndarray:
        """Sum of K†K; equals the identity for trace-preserving channels."""
        return self.kraus_sum_from(self.kraus)

    @property
    def is_trace_preserving(self) -> bool:
        return bool(
            np.max(np.abs(self.kraus_sum - np.eye(self.din))) <= TP_TOL
        )

    @property
    def tp_class(self) -> str:
        return "trace-preserving" if self.is_trace_preserving else "trace-decreasing"

    @property
    def tp_deficit(self) -> np.ndarray:
        return np.eye(self.din) - self.kraus_sum

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        m = as_matrix(rho)
        if m.shape != (self.din, self.din):
            raise ShapeError(f"input shape {m.shape} != ({self.din}, {self.din})")
        return sum(k @ m @ dagger(k) for k in self.kraus)

    def choi(self) -> np.ndarray:
        """Choi state (I x E)(|Phi+><Phi+|); trace 1 for TP channels."""
        phi = max_entangled(self.din)
        rho = np.outer(phi, np.conj(phi))
        return _apply_on_second(self, rho, self.din)

    def superoperator(self) -> np.ndarray:
        """din^2 -> dout^2 matrix acting on row-major vectorized operators."""
        return sum(np.kron(k, np.conj(k)) for k in self.kraus)

    def dual(self) -> "KrausChannel":
        """Adjoint (Heisenberg-picture) map with Kraus operators K†."""
        return KrausChannel(tuple(dagger(k) for k in self.kraus), self.dout, self.din)


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d),), d, d)


def unitary_channel(u: np.ndarray) -> KrausChannel:
    u = as_matrix(u)
    return KrausChannel((u,), u.shape[1], u.shape[0])


def apply_channel(e: KrausChannel, rho: DensityOperator) -> np.ndarray:
    """Sum_k K rho K†."""
    return e(rho.matrix)


def _apply_on_second(e: KrausChannel, m: np.ndarray, da: int) -> np.ndarray:
    """(I_A x E)(m) for m on A x din, output on A x dout."""
    big = np.zeros((da * e.dout, da * e.dout), dtype=complex)
    eye = np.eye(da)
    for k in e.kraus:
        kk = np.kron(eye, k)
        big += kk @ m @ dagger(kk)
    return big


def max_entangled(d: int) -> np.ndarray:
    """(1/sqrt(d)) sum_j |j>|j> as a vector of length d^2."""
    if d < 1:
        raise ValidationError("dimension must be >= 1")
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return v


@dataclass(frozen=True)
class Povm:
    """Positive operators summing to the identity, with outcome labels."""

    elements: tuple
    labels: tuple = field(default=None)

    def __post_init__(self):
        els = tuple(as_matrix(m) for m in self.elements)
        if not els:
            raise ValidationError("POVM needs at least one element")
        d = els[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for m in els:
            if m.shape != (d, d):
                raise ShapeError("POVM elements must share one square shape")
            if not linalg.is_hermitian(m, HERM_TOL):
                raise ValidationError("POVM element is not Hermitian")
            if np.linalg.eigvalsh(hermitize(m))[0] < -PSD_TOL:
                raise NotPSDError("POVM element is not positive semidefinite")
            total += m
        if np.max(np.abs(total - np.eye(d))) > TP_TOL:
            raise ValidationError("POVM elements do not sum to the identity")
        labels = self.labels
        if labels is None:
            labels = tuple(str(i) for i in range(len(els)))
        labels = tuple(str(l) for l in labels)
        if len(labels) != len(els):
            raise ValidationError("label count must match element count")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def transpose(self, basis: np.ndarray | None = None) -> "Povm":
        """Elementwise transpose, optionally in a rotated basis."""
        if basis is None:
            els = tuple(m.T for m in self.elements)
        else:
            u = as_matrix(basis)
            els = tuple(u @ (dagger(u) @ m @ u).T @ dagger(u) for m in self.elements)
        return Povm(els, self.labels)


def computational_povm(d: int) -> Povm:
    eye = np.eye(d)
    return Povm(tuple(np.outer(eye[i], eye[i]).astype(complex) for i in range(d)))


@dataclass(frozen=True)
class Ensemble:
    """Weighted family of density operators on one space."""

    members: tuple  # of (weight, DensityOperator)

    def __post_init__(self):
        ms = tuple((float(w), s) for w, s in self.members)
        if not ms:
            raise ValidationError("ensemble needs at least one member")
        d = ms[0][1].dim
        total = 0.0
        for w, s in ms:
            if w < -ZERO_PROB:
                raise ValidationError("ensemble weights must be nonnegative")
            if s.dim != d:
                raise ShapeError("ensemble states must share one dimension")
            total += w
        if abs(total - 1.0) > TRACE_TOL:
            raise ValidationError(f"ensemble weights sum to {total}, not 1")
        object.__setattr__(self, "members", ms)

    @property
    def dim(self) -> int:
        return self.members[0][1].dim

    def average(self) -> np.ndarray:
        return sum(w * s.matrix for w, s in self.members)


def born(m: Povm, rho: DensityOperator) -> Distribution:
    """Outcome distribution Tr(M rho)."""
    if m.dim != rho.dim:
        raise ShapeError("POVM and state dimensions differ")
    w = np.array([np.trace(el @ rho.matrix).real for el in m.elements])
    total = float(w.sum())
    if abs(total - 1.0) > TRACE_TOL:
        raise ValidationError(f"Born probabilities sum to {total}, not 1")
    return Distribution(np.maximum(w, 0.0) / w.sum())


def m_measure(
    m: Povm, outcome: int, rho: DensityOperator
) -> tuple[float, DensityOperator]:
    """Outcome probability and square-root-rule updated state."""
    if m.dim != rho.dim:
        raise ShapeError("POVM and state dimensions differ")
    el = m.elements[outcome]
    prob = float(np.trace(el @ rho.matrix).real)
    if prob <= ZERO_PROB:
        raise ZeroProbabilityError(
            f"outcome {outcome} has probability {prob:.3e}; conditional undefined"
        )
    root = linalg.psd_sqrt(el)
    post = hermitize(root @ rho.matrix @ root) / prob
    return prob, DensityOperator(post)


def m_prepare(m: Povm, rho: DensityOperator) -> Ensemble:
    """Ensemble {(Tr(M rho), sqrt(rho) M sqrt(rho)/Tr(M rho))}.

    Zero-probability outcomes are dropped.
    """
    if m.dim != rho.dim:
        raise ShapeError("POVM and state dimensions differ")
    root = linalg.psd_sqrt(rho.matrix)
    members = []
    for el in m.elements:
        prob = float(np.trace(el @ rho.matrix).real)
        if prob <= ZERO_PROB:
            continue
        state = hermitize(root @ el @ root) / prob
        members.append((prob, DensityOperator(state)))
    return Ensemble(tuple(members))


def povm_from_ensemble(ens: Ensemble, rho: DensityOperator) -> Povm:
    """POVM whose preparation of rho reproduces the given ensemble.

    On the support of rho the elements are P(M) rho^{-1/2} rho(M) rho^{-1/2};
    the off-support remainder is split uniformly across the elements so the
    family sums to the identity.
    """
    if ens.dim != rho.dim:
        raise ShapeError("ensemble and state dimensions differ")
    if np.max(np.abs(ens.average() - rho.matrix)) > 1e-9:
        raise ValidationError("ensemble does not average to the given state")
    inv_root, _ = linalg.support_pinv(rho.matrix, -0.5)
    proj = linalg.support_projector(rho.matrix)
    perp = np.eye(rho.dim) - proj
    k = len(ens.members)
    elements = tuple(
        hermitize(w * inv_root @ s.matrix @ inv_root) + perp / k
        for w, s in ens.members
    )
    return Povm(elements)


def kraus_from_choi(choi: np.ndarray, din: int, dout: int) -> KrausChannel:
    """Extract a Kraus family from a Choi state (A-index slow, trace-1 scale)."""
    c = as_matrix(choi)
    if c.shape != (din * dout, din * dout):
        raise ShapeError(f"Choi shape {c.shape} != ({din * dout}, {din * dout})")
    eig = linalg._psd_eig(c)
    w = eig.eigenvalues
    tol = 1e-10 * (w[0] if w.size else 0.0)
    ks = []
    for lam, vec in zip(w, eig.eigenvectors.T):
        if lam <= tol:
            continue
        # vec[(j, m)] with j the input index: Kraus[m, j] = sqrt(din*lam)*vec
        k = np.sqrt(din * lam) * vec.reshape(din, dout).T
        ks.append(k)
    return KrausChannel(tuple(ks), din, dout)


def reduced_channel(
    e: KrausChannel, dims_out: tuple[int, int], trace: str
) -> KrausChannel:
    """Compose a two-output channel with the partial trace over one factor."""
    db, dc = dims_out
    if db * dc != e.dout:
        raise ShapeError(f"output dim {e.dout} does not factor as {dims_out}")
    if trace not in ("B", "C"):
        raise ValidationError(f"trace must be 'B' or 'C', got {trace!r}")
    choi = e.choi().reshape(e.din, db, dc, e.din, db, dc)
    if trace == "C":
        reduced = np.trace(choi, axis1=2, axis2=5).reshape(
            e.din * db, e.din * db
        )
        keep = db
    else:
        reduced = np.trace(choi, axis1=1, axis2=4).reshape(
            e.din * dc, e.din * dc
        )
        keep = dc
    return kraus_from_choi(reduced, e.din, keep)


def choi_distance(e1: KrausChannel, e2: KrausChannel) -> float:
    """Max-abs entrywise distance between Choi states; compares channel action."""
    if (e1.din, e1.dout) != (e2.din, e2.dout):
        raise ShapeError("channels act between different spaces")
    return float(np.max(np.abs(e1.choi() - e2.choi())))
