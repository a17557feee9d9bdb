"""Decentralization of the productive optimum through posted role wages.

With worker indifference across roles (net wage plus political
continuation value) and free entry, the optimum is supported by

    w_M = (V_tilde - delta) / (1 + beta),   w_S = (V_tilde + beta*delta) / (1 + beta),

where delta = log(B_M/B_S) is the continuation-value gap at the optimum,
beta = theta*D(q)/H(h*) is integrator labor per unit of specialist
mastery, and V_tilde = (1-tau)*V. Both wages are positive when
delta < V_tilde; the pair delivers zero profit (w_S + beta*w_M = V_tilde)
and exact indifference (w_S - w_M = delta).

A firm running design (x, nu) at wage ratio r = w_M/w_S pays unit cost

    c(x, nu; r) = (E_nu[lambda] + theta*r*Gamma(z_nu(x))) / C(x, q),

minimized by corner specialists aligned at x = q whenever theta*r is
below the coordination cutoff. The primitive wage-ratio bound
r_bar = 2*(V_tilde + ell_bar*Delta_cap) / (V_tilde*q_min), with
Delta_cap = log(1/(ell_bar**-p * u_min)), turns that into the uniqueness
condition theta < min(theta_bar/r_bar, V_tilde*q_min/(2*ell_bar*Delta_cap)).
The engine verifies the constructed equilibrium (wages, no profitable
deviation on a design grid) rather than searching for one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import learning
from .economy import Economy
from .errors import (
    DeviationFoundError,
    DomainError,
    SupportConditionError,
    ZeroCoverageError,
)
from .knowledge import coverage, fragmentation
from .learning import gamma_index, gamma_index_batch
from .politics import group_knowledge
from .production import (
    SpecialistDesign,
    _compositions,
    design_space_size,
    productive_optimum,
    simplex_grid,
)
from .errors import BudgetExceededError

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class WageSupport:
    """Role wages supporting the optimum, with the objects behind them."""

    w_S: float
    w_M: float
    delta_q: float
    beta: float
    V_tilde: float
    r_bar: float
    B_S: float
    B_M: float


@dataclass(frozen=True)
class RatioBound:
    """Primitive bound on interior wage ratios and the uniqueness cutoffs."""

    r_bar: float
    theta_cap: float
    bound_valid: bool
    uniqueness_cutoff: float
    unique_ok: bool


def ratio_bound(econ: Economy) -> RatioBound:
    """r_bar and the theta conditions under which it certifies uniqueness."""
    V_tilde = (1.0 - econ.tau) * econ.V
    ell_bar = econ.constants.ell_bar
    q_min = float(econ.q.min())
    B_floor = ell_bar ** (-econ.p) * float(econ.u.min())
    delta_cap = math.log(1.0 / B_floor)
    r_bar = 2.0 * (V_tilde + ell_bar * delta_cap) / (V_tilde * q_min)
    theta_cap = V_tilde * q_min / (2.0 * ell_bar * delta_cap)
    uniqueness = min(econ.theta_bar / r_bar, theta_cap)
    return RatioBound(
        r_bar=r_bar,
        theta_cap=theta_cap,
        bound_valid=econ.theta < theta_cap,
        uniqueness_cutoff=uniqueness,
        unique_ok=econ.theta < uniqueness,
    )


def support_wages(econ: Economy) -> WageSupport:
    """Construct and verify the supporting wage pair for the optimum."""
    if econ.theta >= econ.theta_bar:
        raise SupportConditionError(
            f"theta={econ.theta:.6g} not below the coordination cutoff "
            f"{econ.theta_bar:.6g}"
        )
    opt, alloc = productive_optimum(econ)
    B_S, B_M = group_knowledge(alloc, econ)
    delta = math.log(B_M / B_S)
    V_tilde = (1.0 - econ.tau) * econ.V
    if not delta < V_tilde:
        raise SupportConditionError(
            f"continuation gap {delta:.6g} not below net productivity "
            f"{V_tilde:.6g}; positive wages cannot support the optimum"
        )
    beta = econ.theta * fragmentation(econ.q) / opt.H_hstar
    w_M = (V_tilde - delta) / (1.0 + beta)
    w_S = (V_tilde + beta * delta) / (1.0 + beta)
    if abs((w_S - w_M) - delta) > RESIDUAL_TOL:
        raise SupportConditionError("indifference residual too large (bug)")
    if abs((w_S + beta * w_M) - V_tilde) > RESIDUAL_TOL:
        raise SupportConditionError("zero-profit residual too large (bug)")
    return WageSupport(
        w_S=w_S,
        w_M=w_M,
        delta_q=delta,
        beta=beta,
        V_tilde=V_tilde,
        r_bar=ratio_bound(econ).r_bar,
        B_S=B_S,
        B_M=B_M,
    )


def unit_cost(x, design: SpecialistDesign, r: float, econ: Economy) -> float:
    """Unit cost of design (x, nu) at wage ratio r."""
    xv = np.asarray(x, dtype=float)
    if r < 0.0:
        raise DomainError("wage ratio must be nonnegative")
    if float(np.abs(design.mean() - xv).max()) > 1e-10:
        raise DomainError("design mean does not match the stated mix")
    cov = coverage(xv, econ.q)
    if cov <= 0.0:
        raise ZeroCoverageError("zero productive coverage: unit cost undefined")
    e_lam = design.mean_inefficiency(econ.tech)
    gam = gamma_index(econ.tech, design.gap_bundle(xv))
    return (e_lam + econ.theta * r * gam) / cov


@dataclass(frozen=True)
class NoDeviationReport:
    """Grid verification that the aligned corner design is cost-minimal."""

    worst_margin: float
    n_designs: int
    passed: bool
    r: float
    cost_at_optimum: float
    worst_design: SpecialistDesign | None


def no_deviation_check(
    wages: WageSupport,
    econ: Economy,
    resolution: int = 8,
    max_atoms: int = 3,
    max_designs: int = 8_000_000,
    batch_size: int = 200_000,
    margin_tol: float = 1e-9,
) -> NoDeviationReport:
    """Scan grid designs for unit costs below the aligned corner design.

    When the uniqueness cutoffs hold, any violation is raised as an
    error; outside them violations are reported in the margin only.
    """
    K = econ.q.size
    total = design_space_size(K, resolution, max_atoms)
    if total > max_designs:
        raise BudgetExceededError(
            f"{total} candidate designs exceed the budget of {max_designs}; "
            "lower the resolution or atom count"
        )
    r = wages.w_M / wages.w_S
    cost_q = (1.0 + econ.theta * r * gamma_index(econ.tech, econ.q * (1.0 - econ.q))) / 1.0

    dirs = simplex_grid(K, resolution)
    lam = 1.0 / learning.max_scale_batch(econ.tech, dirs)
    theta, q = econ.theta, econ.q

    worst = np.inf
    worst_meta = None
    n_seen = 0
    for a in range(1, max_atoms + 1):
        combos = np.array(list(itertools.combinations(range(dirs.shape[0]), a)))
        weight_rows = [
            np.array(c, dtype=float) / resolution
            for c in _compositions(resolution, a, minimum=1)
        ]
        for start in range(0, combos.shape[0], batch_size):
            idx = combos[start : start + batch_size]
            atom_dirs = dirs[idx]
            atom_lam = lam[idx]
            for w in weight_rows:
                X = np.tensordot(atom_dirs, w, axes=([1], [0]))
                E_lam = atom_lam @ w
                Z = np.zeros_like(X)
                for j in range(a):
                    Z += w[j] * np.clip(X - atom_dirs[:, j, :], 0.0, None)
                gam = gamma_index_batch(econ.tech, Z)
                cov = np.minimum(X, q[None, :]).sum(axis=1)
                ok = cov > 0.0
                n_seen += X.shape[0]
                if not np.any(ok):
                    continue
                cost = (E_lam[ok] + theta * r * gam[ok]) / cov[ok]
                k = int(np.argmin(cost))
                if cost[k] < worst:
                    worst = float(cost[k])
                    sel = np.flatnonzero(ok)[k]
                    worst_meta = (idx[sel].copy(), w.copy())
    worst_margin = worst - cost_q
    worst_design = None
    if worst_meta is not None:
        worst_design = SpecialistDesign(directions=dirs[worst_meta[0]], weights=worst_meta[1])
    passed = worst_margin >= -margin_tol
    if not passed and ratio_bound(econ).unique_ok:
        raise DeviationFoundError(
            f"profitable deviation with margin {worst_margin:.3e} found although "
            f"the uniqueness cutoffs hold; deviating mix {worst_design.mean()!r}"
        )
    return NoDeviationReport(
        worst_margin=worst_margin,
        n_designs=n_seen,
        passed=passed,
        r=r,
        cost_at_optimum=cost_q,
        worst_design=worst_design,
    )
