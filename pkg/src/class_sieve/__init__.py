"""Field censuses, class group torsion and a second-moment sieve for low-degree number fields."""
from .arith import Rational, BoundExceeded
from .classgroup import QuadForm, UnsupportedCase, class_group, torsion_count
from .cubic import CubicForm, enumerate_cubic
from .densities import density_table, split_density, delta0
from .quadratic import count_with_conditions_direct, count_with_conditions_sieve, enumerate_quadratic
from .sieve import SieveInstance, certify_lemma, UndefinedBound
from .torsion import dyadic_average_bound, ev_bound

__version__ = "0.1.0"
