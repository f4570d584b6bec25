from .depth_first import DepthFirstOrder, depth_first_order
from .lukasiewicz import lukasiewicz_path, running_minimum, height_from_lukasiewicz
from .profiles import Profiles, ChildrenWalks, profiles, children_walks
from .bundle import EncodingBundle, encode_forest
from .left_height import LeftHeight, left_height
from .verify import IdentityReport, Violation, verify_discrete_timechange, verify_identities
from .increments import IncrementLawResult, increment_law_check
from .export import bundle_frames, export_bundle
