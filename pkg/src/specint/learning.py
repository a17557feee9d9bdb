"""Learning technology: cost families, the feasible-scale frontier, and
the coordination indices derived from it.

A learning-cost function ell maps mastery s in [0,1] to study effort, with
ell(0)=0, ell(1)=1, ell strictly increasing and strictly concave. Two
families ship, selected by config:

    rational(c):     ell(s) = (1+c)s / (1+cs),          c > 0
    exponential(lam): ell(s) = (1-exp(-lam*s)) / (1-exp(-lam)),  lam > 0

Both have finite slope at 0 and positive slope at 1, so every derived
regularity constant below is finite and positive.

Derived objects, for a direction pi on the simplex:

    H(pi)     largest scale t with sum_k ell(t*pi_k) <= 1 (frontier)
    lambda    1/H(pi), the relative inefficiency of a broad direction
    Gamma(z)  ||z||_1 * lambda(z/||z||_1), integrator labor per gap bundle

Constants: ell_bar = ell'(0), ell_under = ell'(1), the concavity-gap
bound c_ell = min over [0,1] of (ell(s)-s)/(s(1-s)), the Gamma Lipschitz
constant L_Gamma = ell_bar + 2*ell_bar**3/ell_under, and the coordination
cutoff theta_bar = min(c_ell/L_Gamma, 1/(2*L_Gamma)). c_ell is a certified
lower bound for the concavity-gap infimum over directions, not the infimum
itself; it is what theta_bar needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

DOMAIN_SLACK = 1e-12
BISECT_RESIDUAL = 1e-12
_CORNER_SNAP = 1e-12

FAMILIES = ("rational", "exponential")


@dataclass(frozen=True)
class LearningTech:
    """A member of one of the shipped learning-cost families."""

    family: str
    param: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(
                f"unknown learning family {self.family!r}; choose one of {FAMILIES}"
            )
        if not (self.param > 0.0 and math.isfinite(self.param)):
            raise ConfigError("learning.param must be a positive finite number")

    def _ell_raw(self, s):
        """Family formula without the domain guard (solver internal)."""
        c = self.param
        if self.family == "rational":
            return (1.0 + c) * s / (1.0 + c * np.asarray(s))
        return (1.0 - np.exp(-c * np.asarray(s))) / (1.0 - math.exp(-c))

    def ell(self, s):
        """Learning cost of mastery s, elementwise; domain [0, 1+1e-12]."""
        arr = np.asarray(s, dtype=float)
        if np.any(arr < -DOMAIN_SLACK) or np.any(arr > 1.0 + DOMAIN_SLACK):
            raise DomainError(f"mastery outside [0,1]: {s!r}")
        clipped = np.clip(arr, 0.0, 1.0)
        out = self._ell_raw(clipped)
        return float(out) if np.isscalar(s) or arr.ndim == 0 else out

    def ell_prime(self, s):
        """Analytic derivative of the cost function on [0,1]."""
        arr = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
        c = self.param
        if self.family == "rational":
            out = (1.0 + c) / (1.0 + c * arr) ** 2
        else:
            out = c * np.exp(-c * arr) / (1.0 - math.exp(-c))
        return float(out) if np.isscalar(s) or arr.ndim == 0 else out

    @property
    def ell_bar(self) -> float:
        """Slope at zero, the steepest marginal learning cost."""
        return float(self.ell_prime(0.0))

    @property
    def ell_under(self) -> float:
        """Slope at one, the flattest marginal learning cost."""
        return float(self.ell_prime(1.0))

    def ell_inverse(self, y: float) -> float:
        """Mastery with cost y, by bisection on [0,1]; |ell(s)-y| <= 1e-12."""
        if not (0.0 <= y <= 1.0):
            raise DomainError(f"cost outside [0,1]: {y!r}")
        if y == 0.0:
            return 0.0
        if y == 1.0:
            return 1.0
        lo, hi = 0.0, 1.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if self._ell_raw(mid) < y:
                lo = mid
            else:
                hi = mid
        s = 0.5 * (lo + hi)
        if abs(self._ell_raw(s) - y) > BISECT_RESIDUAL:
            raise ConvergenceFailure(f"ell_inverse residual too large at y={y}")
        return s


class ConvergenceFailure(RuntimeError):
    """Internal: a bisection failed to meet its residual bound (bug)."""


@dataclass(frozen=True)
class LearningConstants:
    """Regularity constants of a learning technology.

    c_ell is the certified lower bound for the direction-level concavity
    gap (the true infimum is at least c_ell); theta_bar is built from
    c_ell and is therefore conservative.
    """

    ell_bar: float
    ell_under: float
    c_ell: float
    L_Gamma: float
    theta_bar: float


def max_scale(tech: LearningTech, pi: np.ndarray) -> float:
    """Feasible-scale frontier H(pi): solves sum_k ell(H*pi_k) = 1.

    Bisection on [1/ell_bar - 1e-9, 1 + 1e-9], residual <= 1e-12.
    Exactly 1.0 at corners.
    """
    p = np.asarray(pi, dtype=float)
    if p.ndim != 1:
        raise DomainError("direction must be a 1-d vector")
    if abs(float(p.sum()) - 1.0) > 1e-9 or np.any(p < -1e-12):
        raise DomainError("direction must lie on the simplex")
    if float(p.max()) > 1.0 - _CORNER_SNAP:
        return 1.0
    lo = 1.0 / tech.ell_bar - 1e-9
    hi = 1.0 + 1e-9
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if float(tech._ell_raw(mid * p).sum()) > 1.0:
            hi = mid
        else:
            lo = mid
    h = min(0.5 * (lo + hi), 1.0)
    if abs(float(tech._ell_raw(h * p).sum()) - 1.0) > BISECT_RESIDUAL:
        raise ConvergenceFailure("frontier bisection residual too large")
    return h


def max_scale_batch(tech: LearningTech, directions: np.ndarray) -> np.ndarray:
    """Vectorized H() over rows of a (N,K) array of simplex directions."""
    P = np.asarray(directions, dtype=float)
    lo = np.full(P.shape[0], 1.0 / tech.ell_bar - 1e-9)
    hi = np.full(P.shape[0], 1.0 + 1e-9)
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        over = tech._ell_raw(mid[:, None] * P).sum(axis=1) > 1.0
        hi = np.where(over, mid, hi)
        lo = np.where(over, lo, mid)
    h = np.minimum(0.5 * (lo + hi), 1.0)
    return np.where(P.max(axis=1) > 1.0 - _CORNER_SNAP, 1.0, h)


def lambda_index(tech: LearningTech, pi: np.ndarray) -> float:
    """Relative inefficiency 1/H(pi), in [1, ell_bar]; 1 at corners."""
    return 1.0 / max_scale(tech, pi)


def gamma_index(tech: LearningTech, z: np.ndarray) -> float:
    """Coordination index ||z||_1 * lambda(z/||z||_1), 0 at z = 0."""
    v = np.asarray(z, dtype=float)
    if np.any(v < -1e-12):
        raise DomainError("gap bundle must be componentwise nonnegative")
    v = np.clip(v, 0.0, None)
    mass = float(v.sum())
    if mass == 0.0:
        return 0.0
    return mass * lambda_index(tech, v / mass)


def gamma_index_batch(tech: LearningTech, Z: np.ndarray) -> np.ndarray:
    """Vectorized Gamma over rows of a (N,K) array of gap bundles."""
    Z = np.clip(np.asarray(Z, dtype=float), 0.0, None)
    mass = Z.sum(axis=1)
    out = np.zeros(Z.shape[0])
    nz = mass > 0.0
    if np.any(nz):
        dirs = Z[nz] / mass[nz, None]
        out[nz] = mass[nz] / max_scale_batch(tech, dirs)
    return out


def constants(tech: LearningTech, grid_size: int = 10_000) -> LearningConstants:
    """Assemble the regularity constants by grid minimization.

    The concavity-gap function phi(s) = (ell(s)-s)/(s(1-s)) is minimized
    over grid_size uniform interior points plus its analytic endpoint
    limits phi(0) = ell'(0)-1 and phi(1) = 1-ell'(1).
    """
    if grid_size < 1_000:
        raise ConfigError("constants() needs grid_size >= 1000")
    ell_bar = tech.ell_bar
    ell_under = tech.ell_under
    s = np.linspace(0.0, 1.0, grid_size + 1)[1:-1]
    phi = (tech._ell_raw(s) - s) / (s * (1.0 - s))
    c_ell = min(float(phi.min()), ell_bar - 1.0, 1.0 - ell_under)
    if c_ell <= 0.0:
        raise ConfigError(
            "nonpositive concavity gap: the configured learning family is "
            "not strictly concave on [0,1]"
        )
    L = ell_bar + 2.0 * ell_bar**3 / ell_under
    theta_bar = min(c_ell / L, 1.0 / (2.0 * L))
    return LearningConstants(
        ell_bar=ell_bar,
        ell_under=ell_under,
        c_ell=c_ell,
        L_Gamma=L,
        theta_bar=theta_bar,
    )
