"""Dense complex linear algebra shared by the rest of the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` (or ``float64``
where the object is real). Indexing is 0-based everywhere.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    InvalidDimensionError,
    InvalidOffsetError,
    InvalidShapeError,
    NormalizationError,
)

HERMITIAN_TOL = 1e-12


def _check_dim(d):
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def dagger(a):
    return np.conj(a).T


def is_hermitian(a, tol=HERMITIAN_TOL):
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.max(np.abs(a - dagger(a)), initial=0.0) <= tol


def unitarity_residual(u):
    u = np.asarray(u)
    return float(np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))))


def is_unitary(u, tol=1e-12):
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and unitarity_residual(u) <= tol


def eigh(h):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Thin wrapper over LAPACK ``zheevd`` via :func:`numpy.linalg.eigh`. The
    input is symmetrised first so that round-off asymmetry in ``h`` does not
    leak into the result; the routine is deterministic for identical input.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidShapeError(f"expected a square matrix, got shape {h.shape}")
    return np.linalg.eigh(0.5 * (h + dagger(h)))


def eigvalsh(h):
    h = np.asarray(h)
    return np.linalg.eigvalsh(0.5 * (h + dagger(h)))


def tensor(*ops):
    """Kronecker product of any number of matrices (or vectors)."""
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op))
    return out


@dataclass(frozen=True, eq=False)
class GellMannBasis:
    """Generalized Gell-Mann matrices normalised to ``Tr(l_k l_l) = delta_kl / 2``.

    ``generators`` has shape ``(d*d - 1, d, d)``. Ordering: all symmetric
    off-diagonal generators, then antisymmetric ones, then the ``d - 1``
    diagonal (Cartan) generators, whose positions are in ``cartan_indices``.
    """

    d: int
    generators: np.ndarray
    cartan_indices: tuple

    def __len__(self):
        return len(self.generators)

    @property
    def cartan(self):
        return self.generators[list(self.cartan_indices)]

    def components(self, m):
        """Bloch components ``2 Tr(M l_k)`` (real part)."""
        return 2.0 * np.einsum("kij,ji->k", self.generators, np.asarray(m)).real

    def reconstruct(self, r):
        return np.einsum("k,kij->ij", np.asarray(r, dtype=float), self.generators)


def gellmann_basis(d):
    d = _check_dim(d)
    sym, anti, diag = [], [], []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 0.5
            sym.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -0.5j
            a[k, j] = 0.5j
            anti.append(a)
    for j in range(1, d):
        entries = np.zeros(d)
        entries[:j] = 1.0
        entries[j] = -j
        diag.append(np.diag(entries / np.sqrt(2 * j * (j + 1))).astype(complex))
    gens = np.array(sym + anti + diag)
    n_off = len(sym) + len(anti)
    gens.setflags(write=False)
    return GellMannBasis(d, gens, tuple(range(n_off, n_off + d - 1)))


def fourier_unitary(d):
    """DFT matrix ``U[k, l] = w^(k l) / sqrt(d)`` with ``w = exp(2 pi i / d)``."""
    d = _check_dim(d)
    k = np.arange(d)
    # reduce the exponent mod d before exponentiating to keep phases exact
    return np.exp(2j * np.pi * (np.outer(k, k) % d) / d) / np.sqrt(d)


def shift_matrix(d, n):
    """Cyclic permutation with ``S[i, j] = 1`` iff ``j == (i + n) mod d``."""
    d = _check_dim(d)
    if int(n) != n or not 0 <= n < d:
        raise InvalidOffsetError(f"offset must satisfy 0 <= n < {d}, got {n!r}")
    s = np.zeros((d, d))
    idx = np.arange(d)
    s[idx, (idx + int(n)) % d] = 1.0
    return s


def clock_matrix(d):
    d = _check_dim(d)
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def partial_transpose(rho, dims, side="A"):
    """Transpose the indices of one party of a bipartite operator.

    Parameters
    ----------
    rho : array_like
        Square matrix of size ``d_A * d_B``.
    dims : tuple of int
        ``(d_A, d_B)``.
    side : {"A", "B"}
        Which party to transpose.
    """
    rho = np.asarray(rho)
    da, db = dims
    if rho.shape != (da * db, da * db):
        raise InvalidShapeError(f"matrix of shape {rho.shape} does not match dims {dims}")
    t = rho.reshape(da, db, da, db)
    if side in ("A", 0):
        t = t.transpose(2, 1, 0, 3)
    elif side in ("B", 1):
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return t.reshape(da * db, da * db)


def schmidt_decompose(psi, dims, tol=1e-10):
    """Schmidt decomposition of a bipartite pure state.

    Returns ``(lam, a, b)`` with ``lam`` the Schmidt coefficients (squared
    singular values, descending, summing to one) and ``a``, ``b`` matrices
    whose columns are the local Schmidt vectors, so that
    ``psi = sum_i sqrt(lam[i]) * kron(a[:, i], b[:, i])``.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    da, db = dims
    if psi.size != da * db:
        raise InvalidShapeError(f"vector of length {psi.size} does not match dims {dims}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise NormalizationError(f"state vector has norm {norm:.3e}, expected 1")
    u, s, vh = np.linalg.svd(psi.reshape(da, db))
    lam = s**2
    return lam, u[:, : lam.size], vh[: lam.size].T


def matrix_to_json(a):
    a = np.asarray(a)
    rows, cols = a.shape
    flat = a.astype(complex).ravel()
    return {
        "rows": int(rows),
        "cols": int(cols),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj):
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if len(entries) != rows * cols:
        raise InvalidShapeError(f"expected {rows * cols} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(rows, cols)
