from .law import Law, LawKind
from .grammar import parse_law, coerce_law
from .generating import iterate_generating_function, extinction_probability, fractional_linear_iterate
from .mechanism import AdmissibleMechanism
