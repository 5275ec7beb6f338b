"""Hilfer fractional cobweb models evaluated through Mittag-Leffler functions."""

from fraccob.cobweb import (
    DemandModel,
    DerivedParams,
    SupplyModel,
    TimeGrid,
    Trajectory,
    caputo_price,
    classify,
    derive,
    derive_demand,
    derive_supply,
    gamma_param,
    price,
    price_at,
    rl_price,
    trajectory,
)
from fraccob.errors import DegenerateModel, DomainError, FraccobError, NonConvergence
from fraccob.mlf import MLArgument, MLConfig, mittag_leffler, ml_eval

__all__ = [
    "DegenerateModel",
    "DemandModel",
    "DerivedParams",
    "DomainError",
    "FraccobError",
    "MLArgument",
    "MLConfig",
    "NonConvergence",
    "SupplyModel",
    "TimeGrid",
    "Trajectory",
    "caputo_price",
    "classify",
    "derive",
    "derive_demand",
    "derive_supply",
    "gamma_param",
    "mittag_leffler",
    "ml_eval",
    "price",
    "price_at",
    "rl_price",
    "trajectory",
]
