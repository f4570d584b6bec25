from .colored_forest import ColoredForest, NO_PARENT, vertex_census, census_frame
from .ensemble import OffspringEnsemble
from .generator import generate_forest, grow_forest, simulate_profile, component_sizes, component_roots
from .serialization import forest_to_jsonl, forest_from_jsonl, read_forest, write_forest
