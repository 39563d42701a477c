"""Exact analysis of finite scenario-tree markets with proportional transaction costs."""
from .adjust import adjusted_market, compute_B_sets, verify_t2
from .attain import assemble_A, cone_equal, is_null_space_linear, member_A, member_Ct, null_strategy_cone
from .market import BidAskMatrix, BidAskProcess, chain_tighten, node_cone, validate
from .price import (check_arbitrage, find_consistent, member_dual, superhedge_price,
                    verify_representation)
from .ratlp import LinearSystem, cone_member, extreme_rays, solve
from .tree import AdaptedVector, ScenarioTree, conditional_expectation, is_martingale, node_probability

__version__ = "0.1.0"
