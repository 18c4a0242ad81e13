"""Reliability of k-out-of-n systems with one cold standby unit and
independent discrete component lifetimes."""

from .distributions import (
    DiscreteLifetime,
    DiscreteWeibull,
    FinitePmf,
    Geometric,
    NegBinomial,
    Residual,
    residual_transform,
)
from .errors import (
    ConditioningOnNullEvent,
    ConditioningTooRare,
    DimensionMismatch,
    DomainError,
    InvalidArgs,
    InvalidCounts,
    ReliabilityError,
    SpecError,
    TooLarge,
    UnboundedTail,
)
from .lifetime import AccuracyBudget, choose_t0, expected_T, finiteness_check, pmf_T, reliability_T
from .orders import hr_leq, ifr_class, st_leq, system_st_compare
from .orderstats import SystemSpec, category_sum, h_kn, os_mean, os_sf
from .oracle import Query, SimResult, enumerate_exact, simulate
from .residual import (
    MRLKind,
    mrl_curve,
    syslevel_mrl,
    syslevel_residual_sf,
    usual_mrl,
    usual_residual_sf,
    working_mrl,
    working_residual_sf,
)

__version__ = "0.1.0"
