"""Exact, greedy and fixed-parameter algorithms for the Test Cover problem."""
from .core import (Instance, Partition, ValidationReport, add_all_singletons, complement_test,
                   induced_partition, is_test_cover, separates, validate)
from .errors import (CoverError, InconsistencyError, InvalidArgument, InvariantViolation,
                     ParseError, ResourceLimitError, SearchTimeout, UnvalidatedInstance)
from .exact import (ExactResult, decide_k_param, decide_nk_brute, find_k_mini_brute,
                    log_lower_bound, min_test_cover_exact)
from .fpt import FptResult, fpt_decide
from .greedy import GreedyState, extend_partial_to_cover, greedy_mini_test, greedy_setcover_approx

__version__ = "0.1.0"
