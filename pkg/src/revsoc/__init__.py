"""Computable social choice on countable societies.

Weak orders, countable algebras of voter sets indexed by formation
sequences, ultrafilters, social welfare functions with the decisive
coalition extraction, an exhaustive Arrow check and a stage-bounded range
gadget.
"""

from .order import WeakOrder, enumerate_weak_orders
from .setalg import Algebra, finite_cofinite_algebra, powerset_algebra
from .society import Society, canonical_society, finite_society
from .swf import Swf, dictator_swf, find_dictator, ks_extract, swf_from_ultrafilter
from .ultra import Ultrafilter, frechet_ultrafilter, principal_ultrafilter

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "Society",
    "Swf",
    "Ultrafilter",
    "WeakOrder",
    "canonical_society",
    "dictator_swf",
    "enumerate_weak_orders",
    "find_dictator",
    "finite_cofinite_algebra",
    "finite_society",
    "frechet_ultrafilter",
    "ks_extract",
    "powerset_algebra",
    "principal_ultrafilter",
    "swf_from_ultrafilter",
]
