"""Exact p-adic dynamics of the map f(x) = a / x^q."""
from .dynamics import (BoundReport, Character, FixedPointReport, PeriodicSearchResult,
                       attraction_bound, closed_form_iterate, cycle_multiplier_norm,
                       find_periodic, fixed_point_analysis, step)
from .errors import (DomainError, NotLiftableError, OutOfRegimeError, PAdicError,
                     PeriodRejectedError, SamplingUnsupportedError)
from .norm_geometry import (MapParams, OuterRegion, TrajectoryClass, ball_mapping_check,
                            classify_start, no_offsphere_periodics, radius_iterate)
from .padic_core import (PAdicContext, PAdicNumber, add, distance, from_rational, inv,
                         mul, norm, power)
from .radius import RadiusExp
from .roots import RootSet, cube_roots, hensel_lift, roots_of_unity

__version__ = "0.1.0"
