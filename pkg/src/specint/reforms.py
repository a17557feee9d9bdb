"""Reform families and comparative statics.

Broadening: a share 1-b of routine workers stay corner experts assigned
in proportions q_k; a share b take the broad profile H(q)q, which sits
proportional to the organizational mix and so creates no coordination
gaps. Integrators stay at the minimal feasible mass

    m(b) = theta*(1-b)*D(q) / (H(h*) + theta*(1-b)*D(q)),

and aggregate civic capacity follows the closed form

    B_soc(b) = (1-m(b)) * [(1-b)*(q.u) + b*H(q)**p*C(q,u)] + m(b)*B_M,

whose slope at b=0 is (1-m(0)) * [H(q)**p*C(q,u) - B_soc(0)]. The slope
is positive exactly below the civic cutoff

    theta_cut(q,u) = H(h*) * [H(q)**p*C(q,u) - q.u]
                     / (D(q) * [B_M - H(q)**p*C(q,u)])

whenever q.u < H(q)**p*C(q,u) < B_M (always/never positive outside that
band).

Interface intensity: the civic profile is tilted from q toward the gap
profile, u_alpha = (1-alpha)*q + alpha*h*(q), at the fixed productive
allocation. Specialist knowledge falls at rate
[ (sum q^2)^2 - sum q^3 ] / D(q) <= 0 and integrator knowledge rises at
rate H(h*)**p * [1 - C(h*,q)] >= 0, both strict unless q is uniform.

Integration-cost statics: along theta, the optimum has m rising, output
falling, and civic capacity rising; welfare carries no sign assertion.

Thresholds quoted "for small theta" are located by bisection per scenario
over the (always well-defined) family constructions, and flagged when the
located flip sits above the primitive cutoff where optimality of the
underlying organization is certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .economy import Economy
from .errors import DomainError, OracleError
from .knowledge import coverage, fragmentation, system_knowledge
from .learning import max_scale
from .politics import group_knowledge
from .production import (
    Allocation,
    SpecialistDesign,
    corner_design,
    gap_profile_star,
    minimal_allocation,
    single_atom,
)
from .welfare import Decomposition, Family, decompose_along, total_welfare


def broadening_allocation(b: float, econ: Economy) -> Allocation:
    """Mixed corner/broad specialist organization at broadening share b."""
    if not 0.0 <= b <= 1.0:
        raise DomainError("broadening share must lie in [0,1]")
    q = econ.q
    if b == 0.0:
        design = corner_design(q)
    elif b == 1.0:
        design = single_atom(q)
    else:
        Hq = max_scale(econ.tech, q)
        raw = np.concatenate([(1.0 - b) * q, [b * Hq]])
        dirs = np.vstack([np.eye(q.size), q])
        design = SpecialistDesign(directions=dirs, weights=raw / raw.sum())
    alloc = minimal_allocation(design, econ)
    return Allocation(
        m=alloc.m,
        design=alloc.design,
        integrator_profile=alloc.integrator_profile,
        broadening=b,
    )


@dataclass(frozen=True)
class BroadeningFamily:
    """The broadening reform path of one economy, with its closed forms."""

    econ: Economy

    def allocation(self, b: float) -> Allocation:
        return broadening_allocation(b, self.econ)

    def family(self) -> Family:
        econ = self.econ
        return lambda b: (econ, broadening_allocation(b, econ))

    def integrator_share(self, b: float) -> float:
        econ = self.econ
        D = fragmentation(econ.q)
        H = max_scale(econ.tech, gap_profile_star(econ.q))
        return econ.theta * (1.0 - b) * D / (H + econ.theta * (1.0 - b) * D)

    def civic_capacity(self, b: float) -> float:
        """Closed-form B_soc(b); the assembled-allocation path must agree."""
        econ = self.econ
        h_star = gap_profile_star(econ.q)
        Hq = max_scale(econ.tech, econ.q)
        B_broad = Hq**econ.p * coverage(econ.q, econ.u)
        B_M = system_knowledge(max_scale(econ.tech, h_star) * h_star, econ.civ)
        m = self.integrator_share(b)
        B_spec = (1.0 - b) * float(econ.q @ econ.u) + b * B_broad
        return (1.0 - m) * B_spec + m * B_M


@dataclass(frozen=True)
class BroadeningSlope:
    """Closed-form civic-capacity slope at b=0 and its theta regime."""

    value: float
    cutoff: float | None
    regime: str  # "cutoff", "always_positive", "never_positive"
    cutoff_above_theta_bar: bool


def broadening_derivative(econ: Economy) -> BroadeningSlope:
    """dB_soc/db at b=0 with the civic cutoff, when one exists."""
    q, u = econ.q, econ.u
    h_star = gap_profile_star(q)
    H_h = max_scale(econ.tech, h_star)
    Hq = max_scale(econ.tech, q)
    B_broad = Hq**econ.p * coverage(q, u)
    B_M = system_knowledge(H_h * h_star, econ.civ)
    qu = float(q @ u)
    D = fragmentation(q)
    m0 = econ.theta * D / (H_h + econ.theta * D)
    B_soc0 = (1.0 - m0) * qu + m0 * B_M
    value = (1.0 - m0) * (B_broad - B_soc0)
    if B_broad >= B_M:
        return BroadeningSlope(value, None, "always_positive", False)
    if B_broad <= qu:
        return BroadeningSlope(value, None, "never_positive", False)
    cutoff = H_h * (B_broad - qu) / (D * (B_M - B_broad))
    return BroadeningSlope(value, cutoff, "cutoff", cutoff > econ.theta_bar)


def bisect_broadening_cutoff(
    econ: Economy, step: float = 1e-5, tol: float = 1e-7
) -> float:
    """Locate the theta where the finite-difference slope of B_soc at b=0
    flips sign, independent of the closed form."""

    def slope(theta: float) -> float:
        fam = BroadeningFamily(econ.with_theta(theta))
        b0 = _family_b_soc(fam, 0.0)
        b1 = _family_b_soc(fam, step)
        b2 = _family_b_soc(fam, 2.0 * step)
        return (-3.0 * b0 + 4.0 * b1 - b2) / (2.0 * step)

    lo = 1e-9
    if slope(lo) <= 0.0:
        raise OracleError("civic-capacity slope not positive at tiny theta")
    hi = max(econ.theta_bar, 1.0)
    while slope(hi) > 0.0:
        hi *= 2.0
        if hi > 1e9:
            raise OracleError("civic-capacity slope never flips sign")
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * 0.5:
            break
    return 0.5 * (lo + hi)


def _family_b_soc(fam: BroadeningFamily, b: float) -> float:
    alloc = fam.allocation(b)
    B_S, B_M = group_knowledge(alloc, fam.econ)
    return (1.0 - alloc.m) * B_S + alloc.m * B_M


@dataclass(frozen=True)
class ExcessSpecializationReport:
    """Does a marginal broadening reform raise welfare here?"""

    p_bar: float
    precondition_ok: bool
    b_grid: np.ndarray
    welfare: np.ndarray
    best_b: float
    slope_at_zero: Decomposition
    w_prime_positive: bool
    governance_ratio: float
    governance_ratio_needed: float | None


def excess_specialization_check(
    econ: Economy, b_grid: np.ndarray | None = None
) -> ExcessSpecializationReport:
    """Welfare along the broadening path, its slope at zero, and the
    governance sensitivity that would be needed to make the slope positive."""
    q, u = econ.q, econ.u
    Hq = max_scale(econ.tech, q)
    qu = float(q @ u)
    p_bar = math.log(coverage(q, u) / qu) / (-math.log(Hq))
    precondition_ok = Hq**econ.p * coverage(q, u) > qu

    if b_grid is None:
        b_grid = np.linspace(0.0, 0.95, 20)
    fam = BroadeningFamily(econ).family()
    W = np.array([total_welfare(*fam(b)).welfare for b in b_grid])
    slope = decompose_along(fam, 0.0)

    from .politics import resource_sensitivities

    econ0, alloc0 = fam(0.0)
    rep0 = total_welfare(econ0, alloc0)
    R, R_Y, R_B = resource_sensitivities(econ.gov, rep0.Y, rep0.outcome.B_soc)
    ratio = R_B / R
    needed = None
    if slope.dB_soc > 0.0:
        needed = (slope.dD - ((1.0 - econ.tau) + R_Y / R) * slope.dY) / slope.dB_soc
    return ExcessSpecializationReport(
        p_bar=p_bar,
        precondition_ok=precondition_ok,
        b_grid=b_grid,
        welfare=W,
        best_b=float(b_grid[int(np.argmax(W))]),
        slope_at_zero=slope,
        w_prime_positive=slope.fd_total > 0.0,
        governance_ratio=ratio,
        governance_ratio_needed=needed,
    )


@dataclass(frozen=True)
class InterfaceFamily:
    """Civic profiles tilted from q toward the gap profile h*(q)."""

    econ: Economy

    def u_alpha(self, alpha: float) -> np.ndarray:
        q = self.econ.q
        return (1.0 - alpha) * q + alpha * gap_profile_star(q)

    def family(self) -> Family:
        econ = self.econ
        # The corner organization at mix q with minimal integrators: equals
        # the certified optimum below the cutoff, and stays a well-defined
        # feasible construction above it (used by threshold bisections).
        alloc = minimal_allocation(corner_design(econ.q), econ)
        return lambda alpha: (econ.with_u(self.u_alpha(alpha)), alloc)


@dataclass(frozen=True)
class InterfaceStaticsReport:
    """Curves and slopes along the interface-intensity family."""

    alpha_grid: np.ndarray
    B_S: np.ndarray
    B_M: np.ndarray
    B_soc: np.ndarray
    welfare: np.ndarray
    dispersion: np.ndarray
    B_S_slope: float
    B_M_slope: float
    B_soc_slope: float
    dW: np.ndarray
    dD: np.ndarray
    theta_small: float
    theta_small_capped: bool


def interface_closed_slopes(econ: Economy) -> tuple[float, float]:
    """(B_S'(alpha), B_M'(alpha)): constants of the affine coverage path."""
    q = econ.q
    h = gap_profile_star(q)
    s2 = float((q**2).sum())
    s3 = float((q**3).sum())
    B_S_slope = (s2**2 - s3) / fragmentation(q)
    B_M_slope = max_scale(econ.tech, h) ** econ.p * (1.0 - coverage(h, q))
    return B_S_slope, B_M_slope


def _interface_curves(econ: Economy, alpha_grid: np.ndarray):
    fam = InterfaceFamily(econ).family()
    reports = [total_welfare(*fam(a)) for a in alpha_grid]
    return fam, reports


def dispersion_slope(B_S, B_M, dB_S, dB_M, m) -> float:
    """Closed-form d D / d alpha for linear group-knowledge paths."""
    B_soc = (1.0 - m) * B_S + m * B_M
    return (
        m * (1.0 - m) * (B_M - B_S) / B_soc * (dB_M / B_M - dB_S / B_S)
    )


def interface_statics(
    econ: Economy,
    alpha_grid: np.ndarray | None = None,
    theta_cap_factor: float = 1e6,
) -> InterfaceStaticsReport:
    """Evaluate the interface-intensity comparative statics.

    theta_small is the bisected threshold below which both dB_soc/dalpha
    and dW/dalpha are negative across the alpha grid (capped when no flip
    is found within theta_cap_factor times the primitive cutoff).
    """
    if alpha_grid is None:
        alpha_grid = np.linspace(0.0, 1.0, 21)
    B_S_slope, B_M_slope = interface_closed_slopes(econ)
    fam, reports = _interface_curves(econ, alpha_grid)
    B_S = np.array([r.outcome.B_S for r in reports])
    B_M = np.array([r.outcome.B_M for r in reports])
    B_soc = np.array([r.outcome.B_soc for r in reports])
    W = np.array([r.welfare for r in reports])
    D = np.array([r.dispersion for r in reports])
    m = reports[0].outcome.m
    dB_soc = (1.0 - m) * B_S_slope + m * B_M_slope
    dD = np.array(
        [dispersion_slope(bs, bm, B_S_slope, B_M_slope, m) for bs, bm in zip(B_S, B_M)]
    )
    dW = np.array(
        [
            decompose_along(fam, a, lo=float(alpha_grid[0]), hi=float(alpha_grid[-1])).fd_total
            for a in alpha_grid
        ]
    )

    def all_negative(theta: float) -> bool:
        # Semi-analytic slopes: output is fixed along alpha, so
        # dW = (R_B/R)*dB_soc - dD with everything in closed form except
        # the governed resource level.
        from .politics import resource_sensitivities

        bs_slope, bm_slope = interface_closed_slopes(econ)
        h_star = gap_profile_star(econ.q)
        H = max_scale(econ.tech, h_star)
        D = fragmentation(econ.q)
        m_t = theta * D / (H + theta * D)
        Y_t = econ.V * H / (H + theta * D)
        d_bsoc = (1.0 - m_t) * bs_slope + m_t * bm_slope
        if d_bsoc >= 0.0:
            return False
        fam_obj = InterfaceFamily(econ)
        Hp = H**econ.p
        for a in alpha_grid:
            u_a = fam_obj.u_alpha(float(a))
            B_S_a = float(econ.q @ u_a)
            B_M_a = Hp * coverage(h_star, u_a)
            B_soc_a = (1.0 - m_t) * B_S_a + m_t * B_M_a
            R, _, R_B = resource_sensitivities(econ.gov, Y_t, B_soc_a)
            d_w = (R_B / R) * d_bsoc - dispersion_slope(
                B_S_a, B_M_a, bs_slope, bm_slope, m_t
            )
            if d_w >= 0.0:
                return False
        return True

    if B_S_slope > -1e-14:
        # uniform requirement profile: the gap profile coincides with q,
        # curves are flat, and no negative-slope region exists to bisect
        return InterfaceStaticsReport(
            alpha_grid=alpha_grid,
            B_S=B_S,
            B_M=B_M,
            B_soc=B_soc,
            welfare=W,
            dispersion=D,
            B_S_slope=B_S_slope,
            B_M_slope=B_M_slope,
            B_soc_slope=dB_soc,
            dW=dW,
            dD=dD,
            theta_small=0.0,
            theta_small_capped=False,
        )

    if not all_negative(1e-9 * econ.theta_bar + 1e-12):
        raise OracleError("interface statics not negative at tiny theta")
    lo = 1e-9 * econ.theta_bar
    hi = econ.theta_bar
    capped = False
    while all_negative(hi):
        hi *= 4.0
        if hi > theta_cap_factor * econ.theta_bar:
            capped = True
            break
    if capped:
        theta_small = hi
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if all_negative(mid):
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-6 * max(1.0, lo):
                break
        theta_small = lo
    return InterfaceStaticsReport(
        alpha_grid=alpha_grid,
        B_S=B_S,
        B_M=B_M,
        B_soc=B_soc,
        welfare=W,
        dispersion=D,
        B_S_slope=B_S_slope,
        B_M_slope=B_M_slope,
        B_soc_slope=dB_soc,
        dW=dW,
        dD=dD,
        theta_small=theta_small,
        theta_small_capped=capped,
    )


@dataclass(frozen=True)
class ThetaStaticsReport:
    """Curves of the productive optimum across integration costs."""

    theta_grid: np.ndarray
    m: np.ndarray
    Y: np.ndarray
    B_soc: np.ndarray
    welfare: np.ndarray
    dm_dtheta: np.ndarray
    welfare_monotone: bool


def theta_statics(econ: Economy, theta_grid: np.ndarray) -> ThetaStaticsReport:
    """Productive optimum and welfare across a theta grid in (0, theta_bar).

    Verifies the monotonicity pattern (integrator share rising, output
    falling, civic capacity rising) and raises if the pattern fails;
    welfare is reported without any sign assertion.
    """
    grid = np.asarray(theta_grid, dtype=float)
    if np.any(grid <= 0.0) or np.any(grid >= econ.theta_bar):
        raise DomainError("theta grid must lie strictly inside (0, theta_bar)")
    from .production import productive_optimum

    m_vals, Y_vals, B_vals, W_vals, dm_vals = [], [], [], [], []
    h_star = gap_profile_star(econ.q)
    H = max_scale(econ.tech, h_star)
    D = fragmentation(econ.q)
    for theta in grid:
        econ_t = econ.with_theta(float(theta))
        opt, alloc = productive_optimum(econ_t)
        rep = total_welfare(econ_t, alloc)
        m_vals.append(opt.m_star)
        Y_vals.append(opt.Y_star)
        B_vals.append(rep.outcome.B_soc)
        W_vals.append(rep.welfare)
        dm_vals.append(D * H / (H + theta * D) ** 2)
    m_arr = np.array(m_vals)
    Y_arr = np.array(Y_vals)
    B_arr = np.array(B_vals)
    W_arr = np.array(W_vals)
    if not (np.all(np.diff(m_arr) > 0.0) and np.all(np.diff(Y_arr) < 0.0)):
        raise OracleError("integration-cost monotonicity violated (bug)")
    if not np.all(np.diff(B_arr) > 0.0):
        raise OracleError("civic capacity not rising in integration cost (bug)")
    w_diff = np.diff(W_arr)
    monotone = bool(np.all(w_diff > 0.0) or np.all(w_diff < 0.0))
    return ThetaStaticsReport(
        theta_grid=grid,
        m=m_arr,
        Y=Y_arr,
        B_soc=B_arr,
        welfare=W_arr,
        dm_dtheta=np.array(dm_vals),
        welfare_monotone=monotone,
    )
