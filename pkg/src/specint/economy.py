"""Primitive bundle for one model economy."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import ConfigError
from .knowledge import CivicParams, as_simplex
from .learning import LearningConstants, LearningTech, constants
from .politics import GovernanceTech


@dataclass(frozen=True)
class Economy:
    """Everything a scenario pins down: learning technology, productive and
    civic profiles, breadth penalty, integration cost, gross productivity,
    income tax, and the governance technology. tau is the income-side tax
    wedge; the resource map carries its own tau (the same object in the
    model, both set from the one config key)."""

    tech: LearningTech
    q: np.ndarray
    u: np.ndarray
    p: float
    theta: float
    V: float
    tau: float
    gov: GovernanceTech

    def __post_init__(self):
        object.__setattr__(self, "q", as_simplex(self.q, what="productive profile"))
        object.__setattr__(self, "u", as_simplex(self.u, what="civic profile"))
        if self.q.size != self.u.size:
            raise ConfigError("productive and civic profiles must share K")
        if not self.p > 0.0:
            raise ConfigError("economy.p must be positive")
        if not self.theta > 0.0:
            raise ConfigError("economy.theta must be positive")
        if not self.V > 0.0:
            raise ConfigError("economy.v must be positive")
        if not 0.0 <= self.tau < 1.0:
            raise ConfigError("tax rate must lie in [0,1)")

    @property
    def K(self) -> int:
        return self.q.size

    @cached_property
    def constants(self) -> LearningConstants:
        return constants(self.tech)

    @property
    def theta_bar(self) -> float:
        return self.constants.theta_bar

    @cached_property
    def civ(self) -> CivicParams:
        return CivicParams(u=self.u, p=self.p)

    def with_theta(self, theta: float) -> "Economy":
        return replace(self, theta=theta)

    def with_u(self, u) -> "Economy":
        return replace(self, u=np.asarray(u, dtype=float))

    def with_tau(self, tau: float) -> "Economy":
        return replace(self, tau=tau)
