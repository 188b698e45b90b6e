"""Dense complex linear-algebra kernel.

Everything here works on plain complex numpy arrays.  Subsystem A is always
the slow (leftmost) tensor index: an operator on A x B with dims (dA, dB) has
row index i*dB + k for A-index i and B-index k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DIM = 4096

HERM_TOL = 1e-10
PSD_TOL = 1e-10
RANK_TOL_FACTOR = 1e-10
RANK_TOL_FLOOR = 1e-12


def as_matrix(m) -> np.ndarray:
    """Coerce to a 2-d complex array, rejecting non-finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        from .errors import ShapeError

        raise ShapeError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        from .errors import ValidationError

        raise ValidationError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (m + m†)/2, used to absorb roundoff."""
    return (m + dagger(m)) / 2


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    return np.max(np.abs(m - dagger(m))) <= tol * (1 + np.max(np.abs(m)))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with A as the slow index."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] * b.shape[0] > MAX_DIM or a.shape[1] * b.shape[1] > MAX_DIM:
        from .errors import ShapeError

        raise ShapeError(
            f"kron result would exceed the configured maximum dimension {MAX_DIM}"
        )
    return np.kron(a, b)


def partial_trace(m: np.ndarray, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Trace out one tensor factor of an operator on A x B.

    keep="A" returns the dA x dA reduction, keep="B" the dB x dB one.
    """
    m = as_matrix(m)
    da, db = dims
    if m.shape != (da * db, da * db):
        from .errors import ShapeError

        raise ShapeError(f"matrix shape {m.shape} does not match dims {dims}")
    t = m.reshape(da, db, da, db)
    if keep == "A":
        return np.trace(t, axis1=1, axis2=3)
    if keep == "B":
        return np.trace(t, axis1=0, axis2=2)
    from .errors import ValidationError

    raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")


@dataclass(frozen=True)
class HermEigResult:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""

    eigenvalues: np.ndarray  # real, shape (d,)
    eigenvectors: np.ndarray  # columns paired with eigenvalues, shape (d, d)

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ dagger(self.eigenvectors)


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Make each column's largest-modulus component real nonnegative."""
    out = vecs.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        z = out[k, j]
        if abs(z) > 0:
            out[:, j] *= np.conj(z) / abs(z)
    return out


def herm_eig(h: np.ndarray) -> HermEigResult:
    """Eigendecomposition with descending eigenvalues and fixed phases."""
    h = as_matrix(h)
    if not is_hermitian(h):
        from .errors import ValidationError

        raise ValidationError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(hermitize(h))
    order = np.argsort(w)[::-1]
    return HermEigResult(eigenvalues=w[order], eigenvectors=_fix_phases(v[:, order]))


def _psd_eig(p: np.ndarray) -> HermEigResult:
    """herm_eig plus a PSD check, with small negatives clipped to zero."""
    eig = herm_eig(p)
    w = eig.eigenvalues
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    if w.size and w[-1] < -PSD_TOL * scale:
        from .errors import NotPSDError

        raise NotPSDError(f"matrix has negative eigenvalue {w[-1]:.3e}")
    return HermEigResult(eigenvalues=np.maximum(w, 0.0), eigenvectors=eig.eigenvectors)


def psd_sqrt(p: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix.

    Eigenvalues below the rank threshold are zeroed first; otherwise noise
    of order eps under the square root becomes sqrt(eps) off the support.
    """
    eig = _psd_eig(p)
    w = eig.eigenvalues.copy()
    w[w <= _rank_tol(w)] = 0.0
    return hermitize((eig.eigenvectors * np.sqrt(w)) @ dagger(eig.eigenvectors))


def _rank_tol(w: np.ndarray) -> float:
    top = float(w[0]) if w.size else 0.0
    return max(RANK_TOL_FACTOR * top, RANK_TOL_FLOOR)


def support_pinv(p: np.ndarray, power: float) -> tuple[np.ndarray, int]:
    """Raise a PSD matrix to a (possibly negative) power on its support.

    Eigenvalues below the rank threshold stay exactly zero.  Returns the
    matrix and the support rank.
    """
    eig = _psd_eig(p)
    w = eig.eigenvalues
    tol = _rank_tol(w)
    pw = np.zeros_like(w)
    mask = w > tol
    pw[mask] = w[mask] ** power
    rank = int(np.count_nonzero(mask))
    return hermitize((eig.eigenvectors * pw) @ dagger(eig.eigenvectors)), rank


def support_rank(p: np.ndarray) -> int:
    eig = _psd_eig(p)
    return int(np.count_nonzero(eig.eigenvalues > _rank_tol(eig.eigenvalues)))


def support_projector(p: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the support of a PSD Hermitian matrix."""
    proj, _ = support_pinv(p, 0.0)
    return proj


def support_isometry(p: np.ndarray) -> np.ndarray:
    """d x r matrix whose orthonormal columns span the support of p."""
    eig = _psd_eig(p)
    mask = eig.eigenvalues > _rank_tol(eig.eigenvalues)
    return eig.eigenvectors[:, mask]


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Bipartite pure-state decomposition v = sum_k c_k |l_k> x |r_k>."""

    coefficients: np.ndarray  # nonincreasing positive reals
    left_basis: np.ndarray  # columns in H_A
    right_basis: np.ndarray  # columns in H_B
    dims: tuple[int, int]

    @property
    def rank(self) -> int:
        c = self.coefficients
        if c.size == 0:
            return 0
        return int(np.count_nonzero(c > 1e-8 * c[0]))

    def reconstruct(self) -> np.ndarray:
        da, db = self.dims
        v = np.zeros(da * db, dtype=complex)
        for c, l, r in zip(self.coefficients, self.left_basis.T, self.right_basis.T):
            v += c * np.kron(l, r)
        return v


def schmidt(v: np.ndarray, dims: tuple[int, int]) -> SchmidtDecomposition:
    """Schmidt decomposition of a bipartite vector (A slow index)."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    da, db = dims
    if v.size != da * db:
        from .errors import ShapeError

        raise ShapeError(f"vector length {v.size} does not match dims {dims}")
    norm = np.linalg.norm(v)
    if norm <= 0:
        from .errors import ValidationError

        raise ValidationError("cannot Schmidt-decompose the zero vector")
    u, s, vh = np.linalg.svd(v.reshape(da, db), full_matrices=False)
    keep = s > 0
    return SchmidtDecomposition(
        coefficients=s[keep],
        left_basis=u[:, keep],
        right_basis=vh[keep, :].T,
        dims=(da, db),
    )


def schmidt_rank(v: np.ndarray, dims: tuple[int, int]) -> int:
    return schmidt(v, dims).rank
