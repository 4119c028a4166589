"""Bipartite test states: isotropic, Dicke, a 3x3 PPT entangled state and
mixtures of pure states whose Schmidt bases are mutually unbiased.

Vectors use the ``kron`` ordering, party A first; for qubit registers the
first qubit is the most significant bit.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial

import numpy as np

from .exceptions import InvalidStateError
from .linalg import dagger, eigvalsh, partial_transpose, schmidt_decompose, tensor

STATE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dims: tuple
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        da, db = self.dims
        if m.shape != (da * db, da * db):
            raise InvalidStateError(f"matrix shape {m.shape} does not match dims {self.dims}")
        asym = float(np.max(np.abs(m - dagger(m))))
        if asym > 1e-12:
            raise InvalidStateError(f"matrix is not Hermitian (max asymmetry {asym:.2e})")
        m = 0.5 * (m + dagger(m))
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidStateError(f"trace is {tr:.12g}, expected 1")
        low = float(eigvalsh(m).min())
        if low < -STATE_TOL:
            raise InvalidStateError(f"matrix has negative eigenvalue {low:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", (int(da), int(db)))
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.dims[0] * self.dims[1]

    def partial_transpose(self, side="A"):
        return partial_transpose(self.matrix, self.dims, side)

    def is_ppt(self, tol=STATE_TOL):
        return float(eigvalsh(self.partial_transpose()).min()) >= -tol

    @classmethod
    def from_vector(cls, psi, dims):
        psi = np.asarray(psi, dtype=complex).ravel()
        return cls(dims, np.outer(psi, psi.conj()))


def as_density(rho, dims=None):
    """Coerce an array or :class:`DensityMatrix` to a :class:`DensityMatrix`."""
    if isinstance(rho, DensityMatrix):
        return rho
    rho = np.asarray(rho)
    if dims is None:
        d = int(round(np.sqrt(rho.shape[0])))
        if d * d != rho.shape[0]:
            raise InvalidStateError("cannot infer bipartite dims from a non-square size")
        dims = (d, d)
    return DensityMatrix(dims, rho)


def max_entangled(d):
    """``|phi+> = sum_i |ii> / sqrt(d)``."""
    psi = np.zeros(d * d, dtype=complex)
    psi[:: d + 1] = 1.0 / np.sqrt(d)
    return psi


def isotropic(d, alpha):
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    phi = max_entangled(d)
    rho = alpha * np.outer(phi, phi.conj()) + (1.0 - alpha) * np.eye(d * d) / d**2
    return DensityMatrix((d, d), rho)


def dicke(n_qubits, k):
    if not 0 <= k <= n_qubits:
        raise ValueError(f"excitations k={k} out of range for N={n_qubits}")
    if n_qubits > 20:
        raise ValueError("N > 20 qubits is not supported")
    psi = np.zeros(2**n_qubits)
    for ones in combinations(range(n_qubits), k):
        psi[sum(1 << (n_qubits - 1 - q) for q in ones)] = 1.0
    return psi / np.sqrt(comb(n_qubits, k))


def dicke_schmidt(n, k, exact=False):
    """Schmidt coefficients of ``D_{2n}^k`` across the balanced ``(n|n)`` cut.

    Ordered by the excitation count ``q`` on party A, from ``max(0, k - n)``
    to ``min(n, k)``. With ``exact=True`` the values are :class:`Fraction`.
    """
    big = 2 * n
    if not 0 <= k <= big:
        raise ValueError(f"excitations k={k} out of range for N={big}")
    pref = Fraction(factorial(big), comb(big, k) * comb(big, n))
    lam = []
    for q in range(max(0, k - n), min(n, k) + 1):
        denom = factorial(q) * factorial(n - q) * factorial(k - q) * factorial(n - k + q)
        lam.append(pref / denom)
    return lam if exact else np.array([float(x) for x in lam])


def noisy_dicke(n_qubits, k, p):
    if n_qubits % 2:
        raise ValueError("the balanced bipartition needs an even number of qubits")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise weight p must lie in [0, 1], got {p}")
    psi = dicke(n_qubits, k)
    dim = 2**n_qubits
    half = 2 ** (n_qubits // 2)
    rho = (1.0 - p) * np.outer(psi, psi) + p * np.eye(dim) / dim
    return DensityMatrix((half, half), rho)


_PPT_3X3 = np.array(
    [
        [1, 0, 0, 0, 1, 0, 0, 0, 1],
        [0, 2, 0, 0, 0, -1, -1, 0, 0],
        [0, 0, 2, -1, 0, 0, 0, -1, 0],
        [0, 0, -1, 2, 0, 0, 0, -1, 0],
        [1, 0, 0, 0, 1, 0, 0, 0, 1],
        [0, -1, 0, 0, 0, 2, -1, 0, 0],
        [0, -1, 0, 0, 0, -1, 2, 0, 0],
        [0, 0, -1, -1, 0, 0, 0, 2, 0],
        [1, 0, 0, 0, 1, 0, 0, 0, 1],
    ],
    dtype=float,
)


def ppt_bound_state():
    """Rank-five PPT entangled two-qutrit state; its nonzero eigenvalues are all 1/5."""
    return DensityMatrix((3, 3), _PPT_3X3 / 15.0)


def schmidt_frame(psi, dims):
    """Schmidt coefficients and full local unitaries ``(lam, A, B)``.

    Columns of ``A`` and ``B`` are the local Schmidt vectors (completed to
    bases), so ``kron(A, B)^dagger psi = sum_i sqrt(lam[i]) |ii>``.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    da, db = dims
    lam, _, _ = schmidt_decompose(psi, dims)
    u, _, vh = np.linalg.svd(psi.reshape(da, db))
    return lam, u, vh.T


def apply_local(rho, a, b):
    """``(a x b) rho (a x b)^dagger`` on a density matrix or raw array."""
    dense = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    op = tensor(a, b)
    out = op @ dense @ dagger(op)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(rho.dims, 0.5 * (out + dagger(out)))
    return out


def schmidt_aligned(rho, psi):
    """Rotate ``rho`` locally so that ``psi`` takes the canonical form ``sum sqrt(lam) |ii>``."""
    rho = as_density(rho)
    _, a, b = schmidt_frame(psi, rho.dims)
    return apply_local(rho, dagger(a), dagger(b))


def canonical_pure(lam):
    """``sum_i sqrt(lam[i]) |ii>``."""
    lam = np.asarray(lam, dtype=float)
    d = lam.size
    psi = np.zeros(d * d, dtype=complex)
    psi[:: d + 1] = np.sqrt(np.clip(lam, 0.0, None))
    return psi


def mub_schmidt_mixture(specs, d, unitaries=None):
    """Mixture of pure states whose Schmidt bases are the columns of ``U_b``.

    Component ``b`` is ``sum_n sqrt(lam_n) conj(U_b)|n> (x) U_b|n>``: the A side
    is conjugated to match the witness pairing ``conj(P) (x) P``.

    Parameters
    ----------
    specs : sequence of (weight, coefficients)
    d : int
    unitaries : sequence of arrays, optional
        Defaults to :func:`mumkit.mum.mub_unitaries`.
    """
    from .mum import mub_unitaries

    us = mub_unitaries(d) if unitaries is None else list(unitaries)
    if len(specs) > len(us):
        raise ValueError(f"at most {len(us)} components are supported for d={d}")
    weights = np.array([w for w, _ in specs], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be nonnegative and sum to one")
    rho = np.zeros((d * d, d * d), dtype=complex)
    for (w, lam), u in zip(specs, us):
        lam = np.asarray(lam, dtype=float)
        if lam.size != d or np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-10:
            raise ValueError(f"invalid Schmidt coefficients {lam}")
        psi = tensor(np.conj(u), u) @ canonical_pure(lam)
        rho += w * np.outer(psi, psi.conj())
    return DensityMatrix((d, d), rho)


# ---------------------------------------------------------------------------
# random sampling


def random_unitary(d, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_product_state(da, db, rng, pure=False):
    if pure:
        a, b = random_pure(da, rng), random_pure(db, rng)
        ra, rb = np.outer(a, a.conj()), np.outer(b, b.conj())
    else:
        ra, rb = random_density(da, rng), random_density(db, rng)
    return DensityMatrix((da, db), tensor(ra, rb))
