from .thresholds import Thresholds
from .report import ExperimentReport, StatisticRecord, monotonicity_violations
from .rescale import NORMALIZATION, RescaledPath, rescale, rescaled_values
from .statistics import hill_estimator, ks_against_cdf, ks_two_sample, relative_gap, standard_errors_off
from .stable import stable_cdf, stable_scale
from .experiment import Experiment
from .profile_convergence import ProfileConvergence, run_profile_convergence
from .height_convergence import HeightConvergence, run_height_convergence
from .left_height_convergence import LeftHeightConvergence, run_leftheight_convergence
from .ray_knight_check import RayKnightCheck, run_rayknight_check
from .stable_marginal import StableMarginalCheck, run_stable_marginal_check
from .sde_checks import LampertiCheck, SdeMomentCheck, run_lamperti_check, run_sde_moment_check

EXPERIMENTS: dict[str, type[Experiment]] = {
    cls.name: cls
    for cls in (
        ProfileConvergence,
        HeightConvergence,
        LeftHeightConvergence,
        RayKnightCheck,
        StableMarginalCheck,
        SdeMomentCheck,
        LampertiCheck,
    )
}
