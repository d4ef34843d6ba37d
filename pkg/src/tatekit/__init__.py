"""Finite-level computations around Tate's isogeny theorem for elliptic curves over F_p."""

from .curve import Curve, Point, count_points, group_structure, trace
from .errors import CapExceeded, PreconditionError, SearchExhausted, TatekitError

__all__ = ["Curve", "Point", "count_points", "group_structure", "trace",
           "CapExceeded", "PreconditionError", "SearchExhausted", "TatekitError"]
__version__ = "0.1.0"
