"""Piggybacked systematic MDS storage codes with reduced repair bandwidth."""

from .codec import (TrafficReport, decode_stripe, encode_stripe, repair_node,
                    repair_parity, repair_systematic)
from .gf import gf_add, gf_inv, gf_mul
from .layout import Grouping, PiggybackPlan, build_plan, make_equal_grouping, validate_plan
from .mds import CodeParams, ParityMatrix, build_parity_matrix, mds_decode, mds_encode
from .planner import (average_bandwidth, brute_force_optimum, compare_codes,
                      complexity_metrics, equal_group_rate, optimal_t)

__version__ = "0.1.0"
