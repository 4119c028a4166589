"""Eigenvalue vectors of a purity-kappa measurement element.

A spectrum ``mu`` of length ``d`` must have zero sum, squared norm
``kappa - 1/d``, entries in ``[-1/d, (d-1)/d]`` and flat circular
autocorrelation: for every nonzero cyclic offset ``k``

    sum_j mu[j] * mu[(j + k) % d] == -(kappa - 1/d) / (d - 1).

Flat off-peak autocorrelation is the same as a flat power spectrum, so the
general construction below works in the Fourier domain: zero DC term, equal
modulus on every other mode, Hermitian symmetry to keep ``mu`` real. What is
left free are the phases of modes ``1 .. (d-1)//2`` and, for even ``d``, the
sign of the real Nyquist mode.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    InfeasibleCompletionError,
    InfeasibleParametersError,
    InvalidDimensionError,
)

EQ_TOL = 1e-10
BOUND_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Spectrum:
    d: int
    kappa: float
    mu: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        if mu.shape != (self.d,):
            raise ValueError(f"mu must have length d={self.d}, got shape {mu.shape}")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    def shifted(self, n):
        """Diagonal of the ``n``-th element: ``mu[(n + j) % d]`` for j = 0..d-1."""
        return np.roll(self.mu, -n)

    def to_json(self):
        return {"d": self.d, "kappa": float(self.kappa), "mu": [float(x) for x in self.mu]}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["d"]), float(obj["kappa"]), obj["mu"])


@dataclass
class SpectrumReport:
    sum_residual: float
    square_residual: float
    bound_violation: float
    cross_residuals: dict = field(default_factory=dict)
    tol: float = EQ_TOL

    @property
    def max_cross_residual(self):
        return max(self.cross_residuals.values(), default=0.0)

    @property
    def passed(self):
        return (
            self.sum_residual <= self.tol
            and self.square_residual <= self.tol
            and self.bound_violation <= BOUND_TOL
            and self.max_cross_residual <= self.tol
        )


def _check_kappa(d, kappa):
    if not (1.0 / d - BOUND_TOL <= kappa <= 1.0 + BOUND_TOL):
        raise InfeasibleParametersError(f"kappa={kappa} outside [1/{d}, 1]")


def independent_param_count(d):
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    return (int(d) - 1) // 2


def purity_of(mu):
    mu = np.asarray(mu, dtype=float)
    return 1.0 / mu.size + float(mu @ mu)


def circular_correlation(mu, offset):
    mu = np.asarray(mu, dtype=float)
    return float(mu @ np.roll(mu, -offset))


def validate_spectrum(s, tol=EQ_TOL):
    """Residuals of every spectrum constraint. Never raises."""
    d, mu = s.d, np.asarray(s.mu, dtype=float)
    excess = s.kappa - 1.0 / d
    low = -1.0 / d - mu
    high = mu - (d - 1.0) / d
    cross_target = -excess / (d - 1)
    cross = {
        k: abs(circular_correlation(mu, k) - cross_target) for k in range(1, d // 2 + 1)
    }
    return SpectrumReport(
        sum_residual=abs(float(mu.sum())),
        square_residual=abs(float(mu @ mu) - excess),
        bound_violation=max(0.0, float(np.max(low)), float(np.max(high))),
        cross_residuals=cross,
        tol=tol,
    )


def _check_bounds(mu, d):
    worst = int(np.argmin(mu))
    if mu[worst] < -1.0 / d - BOUND_TOL:
        raise InfeasibleParametersError(
            f"mu[{worst}] = {mu[worst]:.6g} violates positivity bound -1/{d}",
            index=worst,
            value=float(mu[worst]),
        )


def synthesize_spectrum(d, kappa, phases=(), even_sign=1):
    """Flat-power-spectrum construction of a feasible ``mu``.

    Parameters
    ----------
    d : int
    kappa : float
        Purity in ``[1/d, 1]``.
    phases : sequence of float
        ``(d - 1) // 2`` Fourier phases, one per independent mode.
    even_sign : {+1, -1}
        Sign of the Nyquist mode; only used for even ``d``.

    Raises
    ------
    InfeasibleParametersError
        If an entry falls below ``-1/d``. The offending index is attached.
    """
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    d = int(d)
    _check_kappa(d, kappa)
    phases = np.mod(np.asarray(phases, dtype=float).ravel(), 2 * np.pi)
    if phases.size != independent_param_count(d):
        raise ValueError(f"d={d} takes {independent_param_count(d)} phases, got {phases.size}")
    if even_sign not in (1, -1):
        raise ValueError(f"even_sign must be +1 or -1, got {even_sign!r}")

    amp = np.sqrt(max(d * (kappa - 1.0 / d) / (d - 1), 0.0))
    modes = np.zeros(d, dtype=complex)
    for m, phi in enumerate(phases, start=1):
        modes[m] = amp * np.exp(1j * phi)
        modes[d - m] = np.conj(modes[m])
    if d % 2 == 0:
        modes[d // 2] = even_sign * amp
    mu = np.fft.ifft(modes).real
    _check_bounds(mu, d)
    return Spectrum(d, float(kappa), mu)


def spectrum_d3(kappa, phi):
    _check_kappa(3, kappa)
    amp = np.sqrt(2.0 / 3.0) * np.sqrt(max(kappa - 1.0 / 3.0, 0.0))
    mu = amp * np.cos(phi + np.array([0.0, 2 * np.pi / 3, -2 * np.pi / 3]))
    _check_bounds(mu, 3)
    return Spectrum(3, float(kappa), mu)


def complete_pair(partial, kappa, positions=None):
    """Solve for the two entries missing from ``partial``.

    ``partial`` holds the other ``d - 2`` entries. Returns ``(mu_p, mu_m)``,
    taking the ``+`` root for ``p`` and the ``-`` root for ``m``. Use
    :func:`insert_pair` to assemble the full vector.
    """
    partial = np.asarray(partial, dtype=float).ravel()
    d = partial.size + 2
    if positions is not None:
        p, m = positions
        if p == m or not (0 <= p < d and 0 <= m < d):
            raise ValueError(f"invalid positions {positions} for d={d}")
    s = float(partial.sum())
    t = float(partial @ partial)
    disc = 2.0 * (kappa - 1.0 / d) - 2.0 * t - s * s
    if disc < 0:
        if disc > -EQ_TOL:
            disc = 0.0
        else:
            raise InfeasibleCompletionError(
                f"negative discriminant {disc:.6g}; no real completion", disc
            )
    root = 0.5 * np.sqrt(disc)
    return -0.5 * s + root, -0.5 * s - root


def insert_pair(partial, pair, positions):
    """Place ``pair`` at ``positions = (p, m)`` among the ``partial`` entries."""
    p, m = positions
    partial = list(np.asarray(partial, dtype=float).ravel())
    d = len(partial) + 2
    if p == m or not (0 <= p < d and 0 <= m < d):
        raise ValueError(f"invalid positions {positions} for d={d}")
    out = np.empty(d)
    rest = iter(partial)
    for i in range(d):
        if i == p:
            out[i] = pair[0]
        elif i == m:
            out[i] = pair[1]
        else:
            out[i] = next(rest)
    return out


def shift_phases(d, shift):
    """Phases (and Nyquist sign) that put the MUB delta spectrum at index ``shift``."""
    phases = np.mod([-2 * np.pi * m * shift / d for m in range(1, independent_param_count(d) + 1)], 2 * np.pi)
    sign = -1 if (d % 2 == 0 and shift % 2) else 1
    return phases, sign


def sample_feasible_phases(d, kappa, rng, uniform_tries=500, local_rounds=60):
    """Draw ``(phases, even_sign)`` giving a feasible spectrum.

    Uniform phases are tried first. The feasible set shrinks towards the
    ``d`` cyclic shifts of the MUB spectrum as kappa approaches one, so after
    ``uniform_tries`` failures the sampler perturbs around a random shift with
    a shrinking spread, finally returning the shift itself.
    """
    n = independent_param_count(d)
    for _ in range(uniform_tries):
        phases = rng.uniform(0.0, 2 * np.pi, n)
        sign = int(rng.choice([-1, 1]))
        try:
            synthesize_spectrum(d, kappa, phases, sign)
        except InfeasibleParametersError:
            continue
        return phases, sign
    centre, sign = shift_phases(d, int(rng.integers(d)))
    spread = np.pi
    for _ in range(local_rounds):
        phases = centre + spread * rng.standard_normal(n)
        try:
            synthesize_spectrum(d, kappa, phases, sign)
        except InfeasibleParametersError:
            spread *= 0.7
            continue
        return np.mod(phases, 2 * np.pi), sign
    return centre, sign
