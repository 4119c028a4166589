"""Mutually unbiased measurement families built from a spectrum.

Element ``n`` of measurement ``b`` is ``U_b diag(1/d + mu[(n + j) % d]) U_b^dagger``.
All elements share one spectrum and the elements of one measurement commute.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    InvalidSpectrumError,
    NotTracelessError,
    NotUnitaryError,
    OrthonormalityError,
    UnsupportedDimensionError,
)
from .linalg import (
    dagger,
    eigvalsh,
    fourier_unitary,
    is_unitary,
    matrix_from_json,
    matrix_to_json,
    unitarity_residual,
)
from .spectra import Spectrum, validate_spectrum


@dataclass(frozen=True, eq=False)
class Povm:
    d: int
    elements: np.ndarray

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, n):
        return self.elements[n]

    @property
    def traceless(self):
        return self.elements - np.eye(self.d) / self.d


@dataclass(frozen=True, eq=False)
class MumFamily:
    d: int
    kappa: float
    spectrum: Spectrum
    unitaries: np.ndarray
    povms: tuple

    def __len__(self):
        return len(self.povms)

    @property
    def size(self):
        """Number of measurements, ``Delta + 1``."""
        return len(self.povms)

    def elements(self):
        """All elements as an array of shape ``(Delta + 1, d, d, d)``."""
        return np.array([p.elements for p in self.povms])

    def traceless(self):
        return self.elements() - np.eye(self.d) / self.d

    def subset(self, blocks):
        blocks = list(blocks)
        return MumFamily(
            self.d,
            self.kappa,
            self.spectrum,
            self.unitaries[blocks],
            tuple(self.povms[b] for b in blocks),
        )

    def to_json(self):
        return {
            "d": self.d,
            "kappa": float(self.kappa),
            "mu": [float(x) for x in self.spectrum.mu],
            "unitaries": [matrix_to_json(u) for u in self.unitaries],
        }

    @classmethod
    def from_json(cls, obj):
        spectrum = Spectrum(int(obj["d"]), float(obj["kappa"]), obj["mu"])
        unitaries = [matrix_from_json(u) for u in obj["unitaries"]]
        return build_mum_family(spectrum, unitaries)


def base_povm(s):
    report = validate_spectrum(s)
    if not report.passed:
        raise InvalidSpectrumError(f"spectrum fails validation: {report}")
    d = s.d
    elements = np.array([np.diag(1.0 / d + s.shifted(n)).astype(complex) for n in range(d)])
    elements.setflags(write=False)
    return Povm(d, elements)


def build_mum_family(s, unitaries, tol=1e-12):
    """Rotate the diagonal POVM of ``s`` by each unitary in turn.

    Raises
    ------
    NotUnitaryError
        If ``unitaries[i]`` is not unitary within ``tol``; ``index`` is ``i``.
    """
    base = base_povm(s)
    us = np.array([np.asarray(u, dtype=complex) for u in unitaries])
    for i, u in enumerate(us):
        if u.shape != (s.d, s.d) or not is_unitary(u, tol):
            raise NotUnitaryError(f"unitaries[{i}] is not a {s.d}x{s.d} unitary", index=i)
    povms = []
    for u in us:
        el = np.einsum("ij,njk,lk->nil", u, base.elements, u.conj())
        el = 0.5 * (el + np.conj(np.transpose(el, (0, 2, 1))))
        el.setflags(write=False)
        povms.append(Povm(s.d, el))
    us.setflags(write=False)
    return MumFamily(s.d, s.kappa, s, us, tuple(povms))


# ---------------------------------------------------------------------------
# complete MUB unitaries


def _is_prime(n):
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n**0.5) + 1))


def _two_qubit_table():
    i = 1j
    rows = [
        np.eye(4),
        np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1]]) / 2,
        np.array([[1, -1, -i, -i], [1, 1, -i, i], [1, 1, i, -i], [1, -1, i, i]]) / 2,
        np.array([[1, -i, -i, -1], [1, i, i, -1], [1, -i, i, 1], [1, i, -i, 1]]) / 2,
        np.array([[1, -i, -1, -i], [1, i, -1, i], [1, -i, 1, i], [1, i, 1, -i]]) / 2,
    ]
    # each row above is one basis vector; unitaries carry them as columns
    return [r.T.astype(complex) for r in rows]


_D4_TABLE = _two_qubit_table()


def mub_unitaries(d):
    """``d + 1`` unitaries whose columns form a complete set of MUBs.

    For odd prime ``d``: ``U_0 = I`` and ``U_b = diag(w^((b-1) j^2)) F`` with
    ``F`` the Fourier matrix; for ``d = 3`` this is exactly ``F, VF, V^2 F``
    with ``V = diag(1, w, w)``. Each ``U_b`` diagonalises a Weyl-Heisenberg
    operator ``X Z^a``. ``d = 2`` uses the Pauli eigenbases and ``d = 4`` a
    fixed two-qubit table.
    """
    if d == 4:
        return [u.copy() for u in _D4_TABLE]
    if not _is_prime(d):
        raise UnsupportedDimensionError(
            f"no built-in complete MUB set for d={d}; supported: primes and 4"
        )
    if d == 2:
        h = fourier_unitary(2)
        return [np.eye(2, dtype=complex), h, np.diag([1.0, 1j]) @ h]
    f = fourier_unitary(d)
    j = np.arange(d)
    us = [np.eye(d, dtype=complex)]
    for b in range(1, d + 1):
        phase = np.exp(2j * np.pi * (((b - 1) * j * j) % d) / d)
        us.append(phase[:, None] * f)
    return us


# ---------------------------------------------------------------------------
# verification


@dataclass
class MumReport:
    max_residual: float
    location: tuple
    trace_residual: float
    purity_residual: float
    min_eigenvalue: float
    completeness_residual: float
    tol: float

    @property
    def passed(self):
        return (
            self.max_residual <= self.tol
            and self.trace_residual <= self.tol
            and self.purity_residual <= self.tol
            and self.min_eigenvalue >= -self.tol
            and self.completeness_residual <= self.tol
        )


def mum_gram_target(d, kappa, size):
    """Right-hand side of the defining trace relations, indexed ``[b, n, b', n']``."""
    slope = (kappa * d - 1.0) / (d - 1.0)
    same_b = np.eye(size)[:, None, :, None]
    same_n = np.eye(d)[None, :, None, :]
    return 1.0 / d + same_b * (same_n - 1.0 / d) * slope


def verify_mum(f, tol=1e-10):
    d = f.d
    el = f.elements()
    size = el.shape[0]
    gram = np.einsum("aij,bji->ab", el.reshape(-1, d, d), el.reshape(-1, d, d)).real
    gram = gram.reshape(size, d, size, d)
    resid = np.abs(gram - mum_gram_target(d, f.kappa, size))
    loc = tuple(int(i) for i in np.unravel_index(np.argmax(resid), resid.shape))
    traces = np.einsum("bnii->bn", el).real
    purities = np.einsum("bnij,bnji->bn", el, el).real
    min_eig = min(float(eigvalsh(p).min()) for p in el.reshape(-1, d, d))
    completeness = max(float(np.max(np.abs(p.sum(axis=0) - np.eye(d)))) for p in el)
    return MumReport(
        max_residual=float(resid.max()),
        location=loc,
        trace_residual=float(np.max(np.abs(traces - 1.0))),
        purity_residual=float(np.max(np.abs(purities - f.kappa))),
        min_eigenvalue=min_eig,
        completeness_residual=completeness,
        tol=tol,
    )


@dataclass
class UnistochasticReport:
    quadratic_residual: float
    flatness_deviation: float
    bistochastic: np.ndarray = field(repr=False)


def unistochastic_check(u, s):
    u = np.asarray(u)
    b = np.abs(u) ** 2
    quad = [float(s.shifted(n) @ b @ s.shifted(n)) for n in range(s.d)]
    return UnistochasticReport(
        quadratic_residual=float(np.max(np.abs(quad))),
        flatness_deviation=float(np.max(np.abs(b - 1.0 / s.d))),
        bistochastic=b,
    )


def bloch_vector(m, basis, tol=1e-10):
    m = np.asarray(m)
    tr = np.trace(m)
    if abs(tr) > tol:
        raise NotTracelessError(f"matrix has trace {tr:.3e}")
    return basis.components(m)


@dataclass
class SimplexReport:
    length_residual: float
    angle_residual: float
    cross_residual: float
    inner_product_residual: float
    degenerate: bool
    tol: float

    @property
    def passed(self):
        if self.degenerate:
            return self.inner_product_residual <= self.tol
        return (
            self.length_residual <= self.tol
            and self.angle_residual <= self.tol
            and self.cross_residual <= self.tol
            and self.inner_product_residual <= self.tol
        )


def family_bloch_vectors(f, basis):
    """Bloch vectors of every element, shape ``(Delta + 1, d, d*d - 1)``."""
    return np.array([[basis.components(m) for m in p.traceless] for p in f.povms])


def simplex_check(f, basis, tol=1e-10):
    d, excess = f.d, f.kappa - 1.0 / f.d
    r = family_bloch_vectors(f, basis)
    size = r.shape[0]
    flat = r.reshape(size * d, -1)
    gram = (flat @ flat.T).reshape(size, d, size, d)
    same_b = np.eye(size)[:, None, :, None]
    same_n = np.eye(d)[None, :, None, :]
    target = 2.0 * same_b * excess * (d * same_n - 1.0) / (d - 1.0)
    inner = float(np.max(np.abs(gram - target)))

    degenerate = excess <= tol
    lengths = np.linalg.norm(r, axis=2)
    length_res = float(np.max(np.abs(lengths - np.sqrt(2.0 * max(excess, 0.0)))))
    cross = gram * (1.0 - same_b)
    cross_res = float(np.max(np.abs(cross)))
    if degenerate:
        angle_res = 0.0
    else:
        cos = np.array([gram[b, :, b, :] for b in range(size)]) / (2.0 * excess)
        off = ~np.eye(d, dtype=bool)
        # compared as cosines: arccos is ill-conditioned near -1 (the d = 2 case)
        angle_res = float(np.max(np.abs(cos[:, off] + 1.0 / (d - 1))))
    return SimplexReport(length_res, angle_res, cross_res, inner, degenerate, tol)


def rotation_from_unitary(u, basis, tol=1e-12):
    """Adjoint action of ``u`` on Bloch vectors.

    ``R[k, l] = 2 Tr(l_k u l_l u^dagger)``. The factor two compensates the
    ``1/2`` normalisation of the generators and makes ``R`` orthogonal.
    """
    u = np.asarray(u)
    if not is_unitary(u, tol):
        raise NotUnitaryError(f"matrix is not unitary (residual {unitarity_residual(u):.2e})")
    gens = basis.generators
    rotated = np.einsum("ij,ljk,mk->lim", u, gens, u.conj())
    return 2.0 * np.einsum("kij,lji->kl", gens, rotated).real


@dataclass
class CartanReport:
    max_overlap: float
    pair: tuple
    tol: float

    @property
    def passed(self):
        return self.max_overlap <= self.tol


def cartan_orthogonality_check(unitaries, basis, tol=1e-10):
    cartan = basis.cartan
    subspaces = [np.einsum("ij,cjk,lk->cil", u, cartan, np.conj(u)) for u in unitaries]
    worst, pair = 0.0, None
    for b in range(len(subspaces)):
        for c in range(b + 1, len(subspaces)):
            ov = np.abs(np.einsum("xji,yji->xy", subspaces[b].conj(), subspaces[c]))
            if pair is None or ov.max() > worst:
                worst, pair = float(ov.max()), (b, c)
    return CartanReport(worst, pair, tol)


@dataclass
class MubReport:
    max_deviation: float
    pair: tuple
    tol: float

    @property
    def passed(self):
        return self.max_deviation <= self.tol


def check_mub(bases, tol=1e-10):
    """Unbiasedness of orthonormal bases given as matrices with vectors in columns."""
    bases = [np.asarray(b, dtype=complex) for b in bases]
    for i, b in enumerate(bases):
        if b.ndim != 2 or b.shape[0] != b.shape[1] or unitarity_residual(dagger(b)) > tol:
            raise OrthonormalityError(f"basis {i} is not orthonormal")
    d = bases[0].shape[0]
    worst, pair = 0.0, None
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            dev = float(np.max(np.abs(np.abs(dagger(bases[i]) @ bases[j]) - 1.0 / np.sqrt(d))))
            if pair is None or dev > worst:
                worst, pair = dev, (i, j)
    return MubReport(worst, pair, tol)


def _verify_table():
    report = check_mub(_D4_TABLE, tol=1e-12)
    if not report.passed:  # pragma: no cover - guards against a corrupted table
        raise RuntimeError(f"built-in d=4 MUB table failed verification: {report}")


_verify_table()

