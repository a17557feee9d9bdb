"""Simplex and knowledge-profile primitives.

Coverage C(a,b) = sum_k min(a_k, b_k) measures how much of bundle b is
decodable with knowledge a. A citizen with profile s has system knowledge
B = ||s||_1**p * C(s/||s||_1, u) against the civic profile u, with B = 0
at s = 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TwoDomainError
from .learning import LearningTech

SIMPLEX_TOL = 1e-12
RENORM_WARN = 1e-9


def as_simplex(values, *, what: str = "profile") -> np.ndarray:
    """Coerce to a simplex vector; renormalize, warning beyond 1e-9 drift."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        raise DomainError(f"{what} needs at least two domains")
    if np.any(v < -SIMPLEX_TOL):
        raise DomainError(f"{what} has negative entries")
    v = np.clip(v, 0.0, None)
    total = float(v.sum())
    if total <= 0.0:
        raise DomainError(f"{what} has zero mass")
    if abs(total - 1.0) > RENORM_WARN:
        warnings.warn(
            f"{what} off the simplex by {abs(total - 1.0):.3e}; renormalizing",
            stacklevel=2,
        )
    return v / total


def coverage(a, b) -> float:
    """Coverage sum_k min(a_k, b_k) of bundle b by knowledge a."""
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=float)
    if av.shape != bv.shape:
        raise DomainError(f"dimension mismatch: {av.shape} vs {bv.shape}")
    return float(np.minimum(av, bv).sum())


def fragmentation(pi) -> float:
    """Breadth index 1 - sum pi_k**2, in [0, 1-1/K]; 0 at corners."""
    p = np.asarray(pi, dtype=float)
    return float(1.0 - p @ p)


def feasible_bundle(s, tech: LearningTech, slack: float = 1e-10) -> bool:
    """Whether a knowledge bundle fits inside the unit learning budget."""
    v = np.clip(np.asarray(s, dtype=float), 0.0, None)
    if np.any(v > 1.0 + slack):
        return False
    return float(tech._ell_raw(np.clip(v, 0.0, 1.0)).sum()) <= 1.0 + slack


@dataclass(frozen=True)
class CivicParams:
    """Civic profile u (strictly interior) and breadth penalty p > 0."""

    u: np.ndarray
    p: float

    def __post_init__(self):
        object.__setattr__(self, "u", as_simplex(self.u, what="civic profile"))
        if float(self.u.min()) <= 0.0:
            raise DomainError("civic profile must be strictly interior")
        if not self.p > 0.0:
            raise DomainError("breadth penalty p must be positive")


def system_knowledge(s, civ: CivicParams) -> float:
    """System knowledge ||s||_1**p * C(direction, u); 0 for the zero profile."""
    v = np.asarray(s, dtype=float)
    if np.any(v < -SIMPLEX_TOL):
        raise DomainError("knowledge profile must be componentwise nonnegative")
    v = np.clip(v, 0.0, None)
    mass = float(v.sum())
    if mass == 0.0:
        return 0.0
    return mass**civ.p * coverage(v / mass, civ.u)


@dataclass(frozen=True)
class DiffuseCheck:
    """Outcome of the diffuse-civic-relevance test."""

    ok: bool
    bound: float
    p: float


def check_diffuse(civ: CivicParams, tech: LearningTech) -> DiffuseCheck:
    """Test 0 < p < log((u_(1)+u_(2))/u_(K)) / (-log(K * ell^{-1}(1/K))).

    u_(1) <= ... <= u_(K) are the sorted civic weights. Holds the civic
    environment diffuse enough, and the breadth penalty mild enough, for
    interface knowledge to dominate politically. K = 2 is rejected with a
    distinct error: the interface profile is degenerate there and the
    bound does not apply.
    """
    K = civ.u.size
    if K == 2:
        raise TwoDomainError("diffuseness bound is only defined for K >= 3")
    u_sorted = np.sort(civ.u)
    ratio = (u_sorted[0] + u_sorted[1]) / u_sorted[-1]
    denom = -np.log(K * tech.ell_inverse(1.0 / K))
    bound = float(np.log(ratio) / denom)
    return DiffuseCheck(ok=bool(0.0 < civ.p < bound), bound=bound, p=civ.p)
