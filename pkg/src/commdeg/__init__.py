"""Degree of commutativity and satisfiability of finitely generated groups.

Exact counts over Cayley balls and random-walk measures, seeded Monte-Carlo
estimates with Wilson intervals, and executable checks of the classical
inequalities (Gustafson's 5/8 bound, Gallagher's inequality, quotient and
finite-index bounds).
"""
__version__ = "0.1.0"

from .cayley import Ball, FBallSpec, ball_distance, coset_density_series, enumerate_ball, f_ball, growth_fit
from .equations import EquationSystem, Word, evaluate, is_solution, parse_word
from .estimator import (
    DcSeries,
    EstimateReport,
    EstimatorSettings,
    centralizer_in_ball,
    dc_exact_on_ball,
    dc_finite,
    dc_series,
    ds_exact,
    ds_sampled,
    wilson_interval,
)
from .groups import check_confluence, inv, make_group, mul, order_of, quotient
from .measures import Measure, padded_measure, random_walk_measure, uniform_on_ball
from .theory import (
    CheckResult,
    centralizer_linear_bound_check,
    gallagher_check,
    gustafson_check,
    index_bound_check,
    negligibility_report,
    quotient_bound_check,
    translation_length,
)
