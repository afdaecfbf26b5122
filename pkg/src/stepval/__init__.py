"""Exact Banach-limit valuations on eventually periodic step functions."""
from stepval.stepfn import (PeriodicCell, StepFn, add, compose, eq_ae, ess_sup_norm, evaluate,
                            has_compact_support, join, make_constant, make_indicator,
                            make_periodic, make_step, meet, prolong_periodic, restrict_left,
                            restrict_right, scale, translate)
from stepval.cesaro import cesaro_eval, cesaro_limit_right, has_limit_right
from stepval.ultra import LEFT, RIGHT, DefinableSet, Verdict, membership, ultralimit
from stepval.valuation import BanachLimit, Series, banach_limit, evaluate as valuate
from stepval.dsl import format_fn, parse_fn, parse_spec

__version__ = "0.1.0"
