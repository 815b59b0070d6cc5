from .ansatz import (
    ansatz_config,
    ansatz_singular_set,
    balance_defect,
    check_domain,
    cone_plane_pair,
    limit_quotient,
)
from .closed_form import (
    ansatz_slopes,
    apex_formula_value,
    ball_ansatz,
    lambda_inf_ball,
    lambda_inf_rectangle,
    optimal_touch_point,
)
from .models import AnsatzConfig, LimitSpec, OracleReport, RectangleValue, SweepRow
from .oracle import (
    ansatz_oracle_rectangle,
    compare_ball,
    compare_rectangle,
    compare_with_oracle,
    profile_max_bruteforce,
)
from .sweep import DEFAULT_SCHEDULE, continuation_sweep, reference_value

__all__ = [
    'AnsatzConfig',
    'DEFAULT_SCHEDULE',
    'LimitSpec',
    'OracleReport',
    'RectangleValue',
    'SweepRow',
    'ansatz_config',
    'ansatz_oracle_rectangle',
    'ansatz_singular_set',
    'ansatz_slopes',
    'apex_formula_value',
    'balance_defect',
    'ball_ansatz',
    'check_domain',
    'compare_ball',
    'compare_rectangle',
    'compare_with_oracle',
    'cone_plane_pair',
    'continuation_sweep',
    'lambda_inf_ball',
    'lambda_inf_rectangle',
    'limit_quotient',
    'optimal_touch_point',
    'profile_max_bruteforce',
    'reference_value',
]
