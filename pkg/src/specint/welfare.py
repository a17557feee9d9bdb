"""Welfare accounting: service welfare, the dispersion penalty, total
welfare, the three-term slope decomposition along allocation families,
and the civic benchmark.

Total welfare is W = (1-tau)*Y + V_serv with
V_serv = (1-m)*log t_S + m*log t_M = log R - D, where the dispersion
penalty D = log B_soc - [(1-m) log B_S + m log B_M] is nonnegative and
zero exactly when the two groups hold equal system knowledge.

Along a one-parameter family of allocations, the welfare slope splits as

    W' = [(1-tau) + R_Y/R] * Y'  +  (R_B/R) * B_soc'  -  D'

(output channel, governance channel, targeting channel). Slopes are
taken by second-order finite differences; the R sensitivities come from
the governance module.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .economy import Economy
from .errors import NonpositiveServiceError
from .knowledge import CivicParams, coverage
from .learning import LearningTech, max_scale, max_scale_batch
from .politics import PoliticalOutcome, political_equilibrium, resource_sensitivities
from .production import Allocation, output_of, simplex_grid

_DISPERSION_ROUNDOFF = 1e-12


def service_welfare(outcome: PoliticalOutcome, m: float) -> float:
    """Population-weighted log services (1-m)*log t_S + m*log t_M."""
    if outcome.t_S <= 0.0 or outcome.t_M <= 0.0:
        raise NonpositiveServiceError("log service utility needs positive services")
    return (1.0 - m) * math.log(outcome.t_S) + m * math.log(outcome.t_M)


def dispersion(B_S: float, B_M: float, m: float) -> float:
    """Dispersion penalty log B_soc - [(1-m) log B_S + m log B_M].

    Nonnegative by concavity of log; tiny negative round-off (above
    -1e-12) is clamped to zero.
    """
    if B_S <= 0.0 or B_M <= 0.0:
        raise NonpositiveServiceError("dispersion needs positive group knowledge")
    B_soc = (1.0 - m) * B_S + m * B_M
    val = math.log(B_soc) - (1.0 - m) * math.log(B_S) - m * math.log(B_M)
    if -_DISPERSION_ROUNDOFF < val < 0.0:
        return 0.0
    return val


@dataclass(frozen=True)
class WelfareReport:
    """One allocation's welfare accounts.

    CSV row order: Y, service_welfare, dispersion, welfare, then the
    political block e_pol, z_pol, t_S, t_M, R, B_S, B_M, B_soc, m.
    """

    Y: float
    service_welfare: float
    dispersion: float
    welfare: float
    outcome: PoliticalOutcome

    CSV_COLUMNS = (
        "Y",
        "service_welfare",
        "dispersion",
        "welfare",
        "e_pol",
        "z_pol",
        "t_S",
        "t_M",
        "R",
        "B_S",
        "B_M",
        "B_soc",
        "m",
    )

    def csv_row(self) -> list[float]:
        o = self.outcome
        return [
            self.Y,
            self.service_welfare,
            self.dispersion,
            self.welfare,
            o.e_pol,
            o.z_pol,
            o.t_S,
            o.t_M,
            o.R,
            o.B_S,
            o.B_M,
            o.B_soc,
            o.m,
        ]


def total_welfare(econ: Economy, alloc: Allocation) -> WelfareReport:
    """Compose output, the political equilibrium, and the welfare accounts."""
    outcome = political_equilibrium(econ, alloc)
    Y = output_of(alloc, econ)
    V_serv = service_welfare(outcome, alloc.m)
    return WelfareReport(
        Y=Y,
        service_welfare=V_serv,
        dispersion=dispersion(outcome.B_S, outcome.B_M, alloc.m),
        welfare=(1.0 - econ.tau) * Y + V_serv,
        outcome=outcome,
    )


# A family maps a parameter to (economy, allocation); the economy slot lets
# families that move the civic profile reuse the same machinery.
Family = Callable[[float], tuple[Economy, Allocation]]


@dataclass(frozen=True)
class Decomposition:
    """Welfare slope split into output, governance, and targeting terms."""

    productive_term: float
    governance_term: float
    targeting_term: float
    dY: float
    dB_soc: float
    dD: float
    fd_total: float
    residual: float

    @property
    def total(self) -> float:
        return self.productive_term + self.governance_term + self.targeting_term


def _stencil(kind: int, values, h: float) -> float:
    """Second-order first derivative on a 3-point stencil.

    kind 0: values at (b-h, b, b+h); kind +1: (b, b+h, b+2h);
    kind -1: (b, b-h, b-2h).
    """
    f0, f1, f2 = values
    if kind == 0:
        return (f2 - f0) / (2.0 * h)
    if kind == 1:
        return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)
    return (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h)


def decompose_along(
    family: Family,
    b: float,
    step: float = 1e-5,
    lo: float = 0.0,
    hi: float = 1.0,
    residual_tol: float = 1e-4,
) -> Decomposition:
    """Three-term welfare slope at parameter b of an allocation family.

    Uses central differences inside (lo, hi) and one-sided second-order
    stencils at the boundaries; warns when the recomposition residual
    exceeds residual_tol (step too large for the family's curvature).
    """
    if b - step >= lo and b + step <= hi:
        offsets, kind = (b - step, b, b + step), 0
    elif b - step < lo:
        offsets, kind = (b, b + step, b + 2.0 * step), 1
    else:
        offsets, kind = (b, b - step, b - 2.0 * step), -1

    reports = []
    for point in offsets:
        econ_b, alloc_b = family(point)
        reports.append((total_welfare(econ_b, alloc_b), econ_b))
    dY = _stencil(kind, [r.Y for r, _ in reports], step)
    dB = _stencil(kind, [r.outcome.B_soc for r, _ in reports], step)
    dD = _stencil(kind, [r.dispersion for r, _ in reports], step)
    dW = _stencil(kind, [r.welfare for r, _ in reports], step)

    center_report, center_econ = reports[1] if kind == 0 else reports[0]
    R, R_Y, R_B = resource_sensitivities(
        center_econ.gov, center_report.Y, center_report.outcome.B_soc
    )
    productive = ((1.0 - center_econ.tau) + R_Y / R) * dY
    governance = (R_B / R) * dB
    targeting = -dD
    residual = abs(productive + governance + targeting - dW)
    if residual > residual_tol:
        warnings.warn(
            f"decomposition residual {residual:.3e} exceeds {residual_tol:.1e}; "
            "the step may be too large for this family",
            stacklevel=2,
        )
    return Decomposition(
        productive_term=productive,
        governance_term=governance,
        targeting_term=targeting,
        dY=dY,
        dB_soc=dB,
        dD=dD,
        fd_total=dW,
        residual=residual,
    )


def civic_benchmark(civ: CivicParams, tech: LearningTech, resolution: int = 24) -> float:
    """Highest system knowledge a single learner can reach: max over
    directions of H(pi)**p * C(pi, u), by simplex grid search plus
    coordinate-pair refinement."""
    grid = simplex_grid(civ.u.size, resolution)
    H = max_scale_batch(tech, grid)
    cov = np.minimum(grid, civ.u[None, :]).sum(axis=1)
    values = H**civ.p * cov
    best = int(np.argmax(values))
    pi = grid[best].copy()
    best_val = float(values[best])

    def objective(vec):
        return max_scale(tech, vec) ** civ.p * coverage(vec, civ.u)

    K = pi.size
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(60):
        improved = False
        for i in range(K):
            for j in range(K):
                if i == j:
                    continue
                lo_t, hi_t = -pi[i], pi[j]
                a = hi_t - phi * (hi_t - lo_t)
                c = lo_t + phi * (hi_t - lo_t)

                def moved(t):
                    vec = pi.copy()
                    vec[i] += t
                    vec[j] -= t
                    return objective(np.clip(vec, 0.0, None) / np.clip(vec, 0.0, None).sum())

                fa, fc = moved(a), moved(c)
                for _ in range(60):
                    if hi_t - lo_t < 1e-12:
                        break
                    if fa < fc:
                        lo_t, a, fa = a, c, fc
                        c = lo_t + phi * (hi_t - lo_t)
                        fc = moved(c)
                    else:
                        hi_t, c, fc = c, a, fa
                        a = hi_t - phi * (hi_t - lo_t)
                        fa = moved(a)
                t = 0.5 * (lo_t + hi_t)
                cand = pi.copy()
                cand[i] += t
                cand[j] -= t
                cand = np.clip(cand, 0.0, None)
                cand /= cand.sum()
                val = objective(cand)
                if val > best_val + 1e-14:
                    pi, best_val, improved = cand, val, True
        if not improved:
            break
    return best_val
