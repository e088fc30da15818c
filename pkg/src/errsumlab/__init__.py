"""Error sums of continued fractions with rigorous enclosures."""

from .constexpr import ParseError, eval_enclosure, parse, unparse
from .contfrac import HurwitzFamily, convergents_from_quotients, eval_generalized_cf, extract_cf, hurwitz_stream
from .errorsum import a_closed, a_series, error_sum_abs, error_sum_power_series, komatsu_residual
from .identities import registry, verify
from .numerics import DomainError, Enclosure, PrecisionError

__version__ = "0.1.0"
