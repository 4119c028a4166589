"""Entanglement witnesses built from a MUM family and rotations fixing ``n*``.

For measurement ``b`` with elements ``P_k = I/d + M_k`` and an orthogonal
``O_b`` whose rows and columns sum to one, the witness is

    W = (d kappa + s - 1)/d * I - sum_b sum_kl O_b[k, l] conj(P_l) (x) P_k

with ``s`` the number of included measurements. Its expectation reduces to
``(kappa - 1/d) - Tr(rho M)`` where ``M`` is the same sum over the traceless
parts. The default pairing conjugates party A; ``pairing="plain"`` drops the
conjugation, which gives the partial transpose (on A) of the same witness.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    IncompleteFamilyError,
    InvalidConfigError,
    InvalidStateError,
    UnsupportedPurityError,
)
from .linalg import dagger, tensor
from .mum import check_mub
from .ortho import (
    anticyclic_permutation,
    q_matrix,
    rotation_d3,
    unconjugate_rotation,
)
from .states import DensityMatrix, as_density

DETECTION_TOL = 1e-10
PAIRINGS = ("conjugate", "plain")


def _rotation_entries(o):
    return np.asarray(o.entries if hasattr(o, "entries") else o, dtype=float)


@dataclass(frozen=True, eq=False)
class WitnessConfig:
    family: object
    rotations: tuple
    included_blocks: tuple = None
    pairing: str = "conjugate"

    def __post_init__(self):
        f = self.family
        rots = tuple(_rotation_entries(o) for o in self.rotations)
        if len(rots) != f.size:
            raise InvalidConfigError(
                f"{len(rots)} rotations given for a family of {f.size} measurements"
            )
        for b, o in enumerate(rots):
            if o.shape != (f.d, f.d):
                raise InvalidConfigError(f"rotation {b} has shape {o.shape}, expected ({f.d}, {f.d})")
        blocks = tuple(range(f.size)) if self.included_blocks is None else tuple(
            sorted({int(b) for b in self.included_blocks})
        )
        if not blocks or blocks[0] < 0 or blocks[-1] >= f.size:
            raise InvalidConfigError(f"included_blocks {self.included_blocks} invalid for {f.size} measurements")
        if self.pairing not in PAIRINGS:
            raise InvalidConfigError(f"pairing must be one of {PAIRINGS}, got {self.pairing!r}")
        object.__setattr__(self, "rotations", rots)
        object.__setattr__(self, "included_blocks", blocks)

    @property
    def d(self):
        return self.family.d

    @property
    def kappa(self):
        return self.family.kappa

    @classmethod
    def identity(cls, family, blocks=None, pairing="conjugate"):
        return cls(family, tuple(np.eye(family.d) for _ in range(family.size)), blocks, pairing)

    @classmethod
    def from_thetas(cls, family, thetas, blocks=None):
        """d = 3 only: ``O_b`` is the rotation by ``thetas[b]`` about ``n*``."""
        if family.d != 3:
            raise InvalidConfigError("angle parametrisation is only available for d = 3")
        if len(thetas) != family.size:
            raise InvalidConfigError(f"need {family.size} angles, got {len(thetas)}")
        return cls(family, tuple(rotation_d3(t) for t in thetas), blocks)


@dataclass
class WitnessResult:
    kappa: float
    block_values: list
    m_total: float
    w_expectation: float
    detected: bool
    blocks: tuple = field(default=())

    def to_json(self):
        return {
            "kappa": float(self.kappa),
            "blocks": [float(v) for v in self.block_values],
            "m_total": float(self.m_total),
            "w_expectation": float(self.w_expectation),
            "detected": bool(self.detected),
        }


def _side_a(m, pairing):
    return np.conj(m) if pairing == "conjugate" else m


def block_operator(cfg, b, traceless=True):
    """``sum_kl O_b[k, l] conj(X_l) (x) X_k`` with ``X = M`` (or ``P``)."""
    p = cfg.family.povms[b]
    ops = p.traceless if traceless else p.elements
    o = cfg.rotations[b]
    d = cfg.d
    # sum_l O[k, l] conj(X_l), then contract over k with X_k
    mixed_a = np.einsum("kl,lij->kij", o, _side_a(ops, cfg.pairing))
    return np.einsum("kij,kab->iajb", mixed_a, ops).reshape(d * d, d * d)


def m_kappa(cfg):
    d = cfg.d
    out = np.zeros((d * d, d * d), dtype=complex)
    for b in cfg.included_blocks:
        out += block_operator(cfg, b)
    return out


def witness_matrix(cfg):
    d, s = cfg.d, len(cfg.included_blocks)
    const = (d * cfg.kappa + s - 1.0) / d
    w = const * np.eye(d * d, dtype=complex)
    for b in cfg.included_blocks:
        w -= block_operator(cfg, b, traceless=False)
    return w


def _check_state(rho, d):
    rho = as_density(rho)
    if rho.dims != (d, d):
        raise InvalidStateError(f"state dims {rho.dims} do not match family dimension {d}")
    return rho


def rotated_state(rho, u, pairing="conjugate"):
    """``rho_b = (conj(U)^dagger (x) U^dagger) rho (conj(U) (x) U)``."""
    dense = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    op = tensor(_side_a(u, pairing), u)
    return dagger(op) @ dense @ op


def block_gram(family, rho, b, pairing="conjugate"):
    """``G[k, l] = Tr(rho_b M_l (x) M_k)`` in the frame where measurement ``b`` is diagonal.

    The block value for a rotation ``O`` is ``sum(O * G)``. Only the diagonal
    of the rotated state enters because the base elements are diagonal.
    """
    d = family.d
    dense = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    probs = np.real(np.diag(rotated_state(dense, family.unitaries[b], pairing))).reshape(d, d)
    idx = np.arange(d)
    shifted = np.asarray(family.spectrum.mu)[(idx[:, None] + idx[None, :]) % d]
    # shifted[k, j] = mu[(k + j) % d] is the j-th diagonal entry of M_k
    return shifted @ probs.T @ shifted.T


def evaluate(cfg, rho):
    rho = _check_state(rho, cfg.d)
    values = [
        float(np.sum(cfg.rotations[b] * block_gram(cfg.family, rho, b, cfg.pairing)))
        for b in cfg.included_blocks
    ]
    total = float(np.sum(values))
    w = (cfg.kappa - 1.0 / cfg.d) - total
    return WitnessResult(cfg.kappa, values, total, w, w < -DETECTION_TOL, cfg.included_blocks)


def expectation(op, rho):
    dense = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(np.real(np.trace(dense @ op)))


# ---------------------------------------------------------------------------
# pure states


def _check_coefficients(lam, tol=1e-10):
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size == 0 or np.any(lam < -tol) or abs(lam.sum() - 1.0) > tol:
        raise ValueError(f"Schmidt coefficients must be nonnegative and sum to one, got {lam}")
    return np.clip(lam, 0.0, None)


def entanglement_monotone(lam, d=None):
    """``sum_{j != k} sqrt(lam_j lam_k) / (d - 1)``.

    ``d`` is the local dimension and defaults to ``len(lam)``; pass it
    explicitly when trailing zero coefficients have been dropped.
    """
    lam = _check_coefficients(lam)
    d = lam.size if d is None else int(d)
    if d < 2 or lam.size > d:
        raise ValueError(f"{lam.size} coefficients do not fit local dimension {d}")
    root = np.sqrt(lam)
    return float((root.sum() ** 2 - lam.sum()) / (d - 1))


def pure_state_values(lam, kappa, d):
    """Aligned and complementary block values for a pure state with Schmidt coefficients ``lam``."""
    excess = kappa - 1.0 / d
    return excess, excess * entanglement_monotone(lam, d)


def complementary_rotation(spectrum, pairing="conjugate"):
    """Rotation that makes a Fourier-rotated block report ``(kappa - 1/d) E``.

    Built as ``Q O~ Q^T`` where ``O~`` is a permutation placing its ones where
    the phase factor of the complementary block is stationary: ``(r, r)`` for
    the conjugated pairing, ``(r, -r mod d)`` for the plain pairing.
    """
    d = spectrum.d
    q = q_matrix(spectrum)
    if pairing == "conjugate":
        o_tilde = np.eye(d)
    elif pairing == "plain":
        o_tilde = anticyclic_permutation(d).entries
    else:
        raise InvalidConfigError(f"pairing must be one of {PAIRINGS}, got {pairing!r}")
    return unconjugate_rotation(q, o_tilde)


def anticyclic_rotation(spectrum):
    """``Q P Q^T`` with ``P`` the anti-cyclic permutation ``r -> -r mod d``."""
    return unconjugate_rotation(q_matrix(spectrum), anticyclic_permutation(spectrum.d).entries)


# ---------------------------------------------------------------------------
# separability criteria


def spengler_I(bases_a, bases_b, rho, tol=1e-10):
    """Sum of coincidence probabilities over paired bases (columns are vectors)."""
    if len(bases_a) != len(bases_b):
        raise ValueError("both parties need the same number of bases")
    for name, bases in (("A", bases_a), ("B", bases_b)):
        report = check_mub(bases, tol)
        if len(bases) > 1 and not report.passed:
            raise ValueError(f"bases for party {name} are not mutually unbiased: {report}")
    dense = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    total = 0.0
    for ua, ub in zip(bases_a, bases_b):
        vecs = np.einsum("in,jn->nij", np.asarray(ua), np.asarray(ub)).reshape(len(ua), -1)
        total += float(np.real(np.einsum("ni,ij,nj->", vecs.conj(), dense, vecs)))
    return total


def chen_J(family_a, family_b, rho):
    for name, f in (("A", family_a), ("B", family_b)):
        if f.size != f.d + 1:
            raise IncompleteFamilyError(
                f"family {name} has {f.size} measurements; a complete family needs {f.d + 1}"
            )
    if abs(family_a.kappa - family_b.kappa) > 1e-12:
        raise ValueError("both families must share the same purity")
    dense = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    total = 0.0
    for pa, pb in zip(family_a.povms, family_b.povms):
        for ea, eb in zip(pa.elements, pb.elements):
            total += expectation(tensor(ea, eb), dense)
    return total


# ---------------------------------------------------------------------------
# positive map


def positive_map_apply(x, cfg):
    """Positive trace-preserving map built from MUB projectors (kappa = 1).

    ``phi(X) = Tr(X) I/d - 1/(d-1) sum_b sum_kl O_b[k, l] Tr(X~ E_l) E_k``
    with ``X~`` the traceless part of ``X``.
    """
    if abs(cfg.kappa - 1.0) > 1e-12:
        raise UnsupportedPurityError("the positive map is defined for projective families (kappa = 1)")
    d = cfg.d
    x = np.asarray(x, dtype=complex)
    tr = np.trace(x)
    xt = x - tr * np.eye(d) / d
    out = tr * np.eye(d, dtype=complex) / d
    for b in cfg.included_blocks:
        proj = cfg.family.povms[b].elements
        weights = np.einsum("lij,ji->l", proj, xt)
        out -= np.einsum("kl,l,kij->ij", cfg.rotations[b], weights, proj) / (d - 1)
    return out


# ---------------------------------------------------------------------------
# rotation search (d = 3)


def angle_grid(step):
    n = max(1, int(round(2 * np.pi / step)))
    return 2 * np.pi * np.arange(n) / n


def optimize_rotations_d3(family, rho, blocks=None, step=np.pi / 180, tie_tol=1e-12):
    """Grid search over ``theta_b`` minimising the witness expectation.

    The objective is a sum of independent per-block terms, so each angle is
    optimised on its own; ties go to the smallest angle.

    Returns
    -------
    thetas : tuple of float
        One angle per included block, in block order.
    result : WitnessResult
    """
    if family.d != 3:
        raise InvalidConfigError("rotation search is only available for d = 3")
    rho = _check_state(rho, 3)
    blocks = tuple(range(family.size)) if blocks is None else tuple(sorted(set(blocks)))
    grid = angle_grid(step)
    rots = np.array([rotation_d3(t).entries for t in grid])
    thetas = []
    for b in blocks:
        g = block_gram(family, rho, b)
        vals = np.einsum("tkl,kl->t", rots, g)
        best = np.flatnonzero(vals >= vals.max() - tie_tol)[0]
        thetas.append(float(grid[best]))
    all_thetas = [0.0] * family.size
    for b, t in zip(blocks, thetas):
        all_thetas[b] = t
    cfg = WitnessConfig.from_thetas(family, all_thetas, blocks)
    return tuple(thetas), evaluate(cfg, rho)
