"""Outage and error-rate analysis of multihop optical wireless links via Mellin moments."""

from .analytics import MultihopSpec, SnrDistribution, multihop_distribution, singlehop_distribution
from .channels import HopConfig, derive_hop_params
from .mcsim import MCConfig, mc_evaluate
from .metrics import ModulationParams, aber, diversity_order, outage, outage_asymptotic

__version__ = "0.1.0"

__all__ = [
    "HopConfig",
    "MCConfig",
    "ModulationParams",
    "MultihopSpec",
    "SnrDistribution",
    "aber",
    "derive_hop_params",
    "diversity_order",
    "mc_evaluate",
    "multihop_distribution",
    "outage",
    "outage_asymptotic",
    "singlehop_distribution",
]
