from .grid_path import GridPath, from_function
from .brownian import BrownianHeight, bridge_maximum, bridge_minimum, reflection_min_cdf, running_low, simulate_brownian_height
from .first_passage import FirstPassage, first_passage_at, first_passage_inverse
from .left_height import LeftHeightPath, build_U, build_U_rows, build_left_height, inverse_rows, stieltjes_drift
from .local_time import LocalTimeField, local_time_field, occupation_residual, band_occupation
from .mcbi import McbiTrajectory, mcbi_sde, mcbi_marginals, mcbi_mean
from .lamperti import DrivingPaths, brownian_driving_paths, function_driving_paths, lamperti_solve
from .ray_knight import RayKnightSample, ray_knight_local_times
from .system import LimitSystem, TypeSystem, build_limit_system
