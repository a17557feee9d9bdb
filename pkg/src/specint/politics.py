"""Electoral competition between two office-motivated candidates.

A platform is a governance quality e >= 0 and an integrator spending
share z. Effective resources are G(e,Y); per-capita services are
t_M = z*G/m and t_S = (1-z)*G/(1-m). A citizen in group g assesses
platforms through logit noise with scale Lambda0/B_g, so the vote share
of the proposing candidate in group g is

    Psi_g(t; t_bar) = t**beta_g / (t**beta_g + t_bar**beta_g),
    beta_g = B_g / Lambda0 in (0,1).

The unique equilibrium sets e to the maximizer of
B_soc*log G(e,Y) - 4*Lambda0*c(e), splits services t_g proportionally to
B_g, and targets z = m*B_M/B_soc.

The shipped resource map is G(e,Y) = tau*Y*e**eta with cost
c(e) = c0*e**2/2, which admits e* = sqrt(eta*B/(4*Lambda0*c0)) as a
solver cross-check; both pieces sit behind the GovernanceTech surface so
other forms satisfying the same curvature conditions can be plugged in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import ConfigError, ConvergenceError, DegenerateGroupError, DomainError
from .knowledge import system_knowledge
from .production import (
    Allocation,
    _specialist_profiles,
    output_of,
)

if TYPE_CHECKING:
    from .economy import Economy

KKT_RESIDUAL = 1e-12


@dataclass(frozen=True)
class GovernanceTech:
    """Resource map G(e,Y) = tau*Y*e**eta and effort cost c(e) = c0*e**2/2."""

    eta: float
    c0: float
    tau: float
    lambda0: float

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ConfigError("gov.eta must lie in (0,1)")
        if not self.c0 > 0.0:
            raise ConfigError("gov.c0 must be positive")
        if not 0.0 < self.tau < 1.0:
            raise ConfigError(
                "gov.tau must lie in (0,1): a zero tax base makes effective "
                "resources vanish and log services undefined"
            )
        if not self.lambda0 >= 1.0:
            raise ConfigError("gov.lambda0 must be at least 1")

    def resources(self, e: float, Y: float) -> float:
        return self.tau * Y * e**self.eta

    def resources_dY(self, e: float, Y: float) -> float:
        return self.tau * e**self.eta

    def resources_de(self, e: float, Y: float) -> float:
        return self.tau * Y * self.eta * e ** (self.eta - 1.0)

    def dlog_de(self, e: float, Y: float) -> float:
        return self.eta / e

    def d2log_de2(self, e: float, Y: float) -> float:
        return -self.eta / e**2

    def d2log_dedY(self, e: float, Y: float) -> float:
        return 0.0

    def cost(self, e: float) -> float:
        return 0.5 * self.c0 * e**2

    def cost_prime(self, e: float) -> float:
        return self.c0 * e

    def cost_second(self, e: float) -> float:
        return self.c0

    def e_star_closed(self, Y: float, B: float) -> float:
        """Closed-form maximizer of B*log G - 4*Lambda0*c for this family."""
        return math.sqrt(self.eta * B / (4.0 * self.lambda0 * self.c0))


def governance_star(gov: GovernanceTech, Y: float, B: float) -> float:
    """Unique maximizer of B*log G(e,Y) - 4*Lambda0*c(e).

    Safeguarded Newton on the first-order condition
    B * dlogG/de = 4*Lambda0*c'(e), residual <= 1e-12, cross-checked
    against the family closed form when one is available.
    """
    if not (Y > 0.0 and B > 0.0):
        raise DomainError("governance problem needs Y > 0 and B > 0")

    lam4 = 4.0 * gov.lambda0

    def foc(e):
        return B * gov.dlog_de(e, Y) - lam4 * gov.cost_prime(e)

    lo, hi = 1e-12, 1.0
    while foc(hi) > 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise ConvergenceError("governance FOC has no sign change")
    e = 0.5 * (lo + hi)
    for _ in range(200):
        r = foc(e)
        if abs(r) <= KKT_RESIDUAL:
            break
        if r > 0.0:
            lo = e
        else:
            hi = e
        slope = B * gov.d2log_de2(e, Y) - lam4 * gov.cost_second(e)
        step = e - r / slope if slope < 0.0 else None
        e = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
    else:
        raise ConvergenceError("governance Newton did not meet the residual bound")

    closed = getattr(gov, "e_star_closed", None)
    if closed is not None:
        ref = closed(Y, B)
        if abs(e - ref) > 1e-8 * (1.0 + ref):
            raise ConvergenceError(
                f"governance solver disagrees with the closed form: {e} vs {ref}"
            )
    return e


def effective_resources(gov: GovernanceTech, Y: float, B: float) -> float:
    """R(Y,B) = G(e*(Y,B), Y)."""
    return gov.resources(governance_star(gov, Y, B), Y)


def resource_sensitivities(
    gov: GovernanceTech, Y: float, B: float, fd: bool = False, step: float = 1e-6
):
    """(R, dR/dY, dR/dB) at the governed optimum.

    Analytic via the implicit-function theorem on the governance FOC by
    default; fd=True switches to central differences (the fallback for a
    plugged-in form without derivative methods).
    """
    e = governance_star(gov, Y, B)
    R = gov.resources(e, Y)
    if fd:
        rY = (
            effective_resources(gov, Y * (1 + step), B)
            - effective_resources(gov, Y * (1 - step), B)
        ) / (2 * step * Y)
        rB = (
            effective_resources(gov, Y, B * (1 + step))
            - effective_resources(gov, Y, B * (1 - step))
        ) / (2 * step * B)
        return R, rY, rB
    lam4 = 4.0 * gov.lambda0
    F_e = B * gov.d2log_de2(e, Y) - lam4 * gov.cost_second(e)
    e_B = -gov.dlog_de(e, Y) / F_e
    e_Y = -(B * gov.d2log_dedY(e, Y)) / F_e
    G_e = gov.resources_de(e, Y)
    return R, gov.resources_dY(e, Y) + G_e * e_Y, G_e * e_B


def vote_share(t: float, t_bar: float, beta: float) -> float:
    """Probability the proposing candidate wins a group-g voter."""
    if not 0.0 < beta < 1.0:
        raise DomainError("responsiveness beta must lie in (0,1)")
    if t < 0.0 or t_bar < 0.0:
        raise DomainError("services must be nonnegative")
    if t == 0.0 and t_bar == 0.0:
        return 0.5
    if t == 0.0:
        return 0.0
    if t_bar == 0.0:
        return 1.0
    a = t**beta
    return a / (a + t_bar**beta)


def vote_share_slope(t: float, t_bar: float, beta: float) -> float:
    """d Psi / d t; at symmetry equals beta/(4t)."""
    a = t**beta
    b = t_bar**beta
    return beta * b * t ** (beta - 1.0) / (a + b) ** 2


def group_knowledge(alloc: Allocation, econ: Economy) -> tuple[float, float]:
    """Average system knowledge of specialists and of integrators."""
    profiles, mu = _specialist_profiles(alloc, econ.tech)
    civ = econ.civ
    B_S = float(sum(w * system_knowledge(row, civ) for w, row in zip(mu, profiles)))
    B_M = system_knowledge(alloc.integrator_profile, civ)
    return B_S, B_M


@dataclass(frozen=True)
class PoliticalOutcome:
    """Equilibrium platform, services, resources, and knowledge aggregates."""

    e_pol: float
    z_pol: float
    t_S: float
    t_M: float
    R: float
    B_S: float
    B_M: float
    B_soc: float
    m: float


def equilibrium_from_groups(
    econ: Economy, Y: float, m: float, B_S: float, B_M: float
) -> PoliticalOutcome:
    """Equilibrium objects given output and the two group knowledge levels."""
    if not 0.0 < m < 1.0:
        raise DegenerateGroupError("voting game needs both groups populated")
    if not (B_S > 0.0 and B_M > 0.0):
        raise DegenerateGroupError("both groups need positive system knowledge")
    B_soc = (1.0 - m) * B_S + m * B_M
    e = governance_star(econ.gov, Y, B_soc)
    R = econ.gov.resources(e, Y)
    return PoliticalOutcome(
        e_pol=e,
        z_pol=m * B_M / B_soc,
        t_S=B_S / B_soc * R,
        t_M=B_M / B_soc * R,
        R=R,
        B_S=B_S,
        B_M=B_M,
        B_soc=B_soc,
        m=m,
    )


def political_equilibrium(econ: Economy, alloc: Allocation) -> PoliticalOutcome:
    """Unique platform equilibrium induced by an allocation."""
    B_S, B_M = group_knowledge(alloc, econ)
    Y = output_of(alloc, econ)
    return equilibrium_from_groups(econ, Y, alloc.m, B_S, B_M)


def kkt_residuals(econ: Economy, alloc: Allocation, out: PoliticalOutcome):
    """Residuals of the equilibrium first-order system.

    Returns |Psi'_S(t_S;t_S) - B_soc/(4*Lambda0*R)|, the same for M, and
    |B_soc * dlogG/de - 4*Lambda0*c'(e)|.
    """
    gov = econ.gov
    mu = out.B_soc / (4.0 * gov.lambda0 * out.R)
    res_S = abs(vote_share_slope(out.t_S, out.t_S, out.B_S / gov.lambda0) - mu)
    res_M = abs(vote_share_slope(out.t_M, out.t_M, out.B_M / gov.lambda0) - mu)
    Y = output_of(alloc, econ)
    res_e = abs(
        out.B_soc * gov.dlog_de(out.e_pol, Y) - 4.0 * gov.lambda0 * gov.cost_prime(out.e_pol)
    )
    return res_S, res_M, res_e


@dataclass(frozen=True)
class Platform:
    """A candidate platform with its implied per-group services."""

    e: float
    z: float
    t_S: float
    t_M: float


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _split_budget(R, m, beta_S, beta_M, tbar_S, tbar_M):
    """Allocate a service budget by equalizing marginal vote shares.

    Bisection on t_S, along which the specialist-side multiplier
    Psi'_S(t_S; tbar_S) falls monotonically while the integrator-side
    multiplier rises, so the balance point is unique.
    """
    lo = 1e-14 * R
    hi = R / (1.0 - m) * (1.0 - 1e-14)
    for _ in range(100):
        t_S = 0.5 * (lo + hi)
        t_M = (R - (1.0 - m) * t_S) / m
        if vote_share_slope(t_S, tbar_S, beta_S) > vote_share_slope(t_M, tbar_M, beta_M):
            lo = t_S
        else:
            hi = t_S
    t_S = 0.5 * (lo + hi)
    return t_S, (R - (1.0 - m) * t_S) / m


def best_response(
    platform: Platform | tuple[float, float],
    econ: Economy,
    alloc: Allocation,
    tol: float = 1e-10,
) -> Platform:
    """Exact best response to an opponent platform.

    Nested solver: for each governance level, the service budget is split
    by equalizing the two marginal vote-share multipliers (bisection);
    the governance level itself is then found by golden-section search,
    both to tolerance 1e-10.
    """
    gov = econ.gov
    B_S, B_M = group_knowledge(alloc, econ)
    Y = output_of(alloc, econ)
    m = alloc.m
    if not 0.0 < m < 1.0:
        raise DegenerateGroupError("voting game needs both groups populated")
    beta_S = B_S / gov.lambda0
    beta_M = B_M / gov.lambda0

    if isinstance(platform, Platform):
        e_bar, z_bar = platform.e, platform.z
    else:
        e_bar, z_bar = platform
    R_bar = gov.resources(e_bar, Y)
    tbar_S = (1.0 - z_bar) * R_bar / (1.0 - m)
    tbar_M = z_bar * R_bar / m
    if not (tbar_S > 0.0 and tbar_M > 0.0):
        raise DomainError("opponent services must be strictly positive")

    def value(e):
        if e <= 0.0:
            return 0.0
        R = gov.resources(e, Y)
        t_S, t_M = _split_budget(R, m, beta_S, beta_M, tbar_S, tbar_M)
        return (
            (1.0 - m) * vote_share(t_S, tbar_S, beta_S)
            + m * vote_share(t_M, tbar_M, beta_M)
            - gov.cost(e)
        )

    e_hi = 1.0
    while gov.cost(e_hi) < 1.5:
        e_hi *= 2.0
    lo, hi = 0.0, e_hi
    a = hi - _GOLDEN * (hi - lo)
    b = lo + _GOLDEN * (hi - lo)
    fa, fb = value(a), value(b)
    for _ in range(300):
        if hi - lo <= tol:
            break
        if fa < fb:
            lo, a, fa = a, b, fb
            b = lo + _GOLDEN * (hi - lo)
            fb = value(b)
        else:
            hi, b, fb = b, a, fa
            a = hi - _GOLDEN * (hi - lo)
            fa = value(a)
    else:
        raise ConvergenceError("golden-section budget exhausted in best_response")
    e = 0.5 * (lo + hi)

    # Golden section resolves e only down to the comparison noise floor of
    # the flat objective; polish on the envelope first-order condition
    # mu(e)*G_e(e,Y) = c'(e), where mu(e) is the common multiplier of the
    # inner split, which is computable to machine precision.
    def foc(e_val):
        R_val = gov.resources(e_val, Y)
        t_s, _ = _split_budget(R_val, m, beta_S, beta_M, tbar_S, tbar_M)
        mu = vote_share_slope(t_s, tbar_S, beta_S)
        return mu * gov.resources_de(e_val, Y) - gov.cost_prime(e_val)

    pad = 1e-4 * (1.0 + e)
    a2, b2 = max(1e-12, e - pad), e + pad
    if foc(a2) > 0.0 > foc(b2):
        for _ in range(80):
            mid = 0.5 * (a2 + b2)
            if foc(mid) > 0.0:
                a2 = mid
            else:
                b2 = mid
        e = 0.5 * (a2 + b2)
    R = gov.resources(e, Y)
    t_S, t_M = _split_budget(R, m, beta_S, beta_M, tbar_S, tbar_M)
    return Platform(e=e, z=m * t_M / R, t_S=t_S, t_M=t_M)


def best_response_fixed_point(
    start: Platform | tuple[float, float],
    econ: Economy,
    alloc: Allocation,
    tol: float = 1e-9,
    max_iter: int = 80,
) -> Platform:
    """Iterate best responses from a starting platform to a fixed point."""
    current = start if isinstance(start, Platform) else Platform(start[0], start[1], 0.0, 0.0)
    for _ in range(max_iter):
        nxt = best_response(current, econ, alloc)
        if abs(nxt.e - current.e) <= tol and abs(nxt.z - current.z) <= tol:
            return nxt
        current = nxt
    raise ConvergenceError("best-response iteration did not converge")
