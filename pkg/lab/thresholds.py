from pydantic import BaseModel


class Thresholds(BaseModel):
    ks: float = 0.05
    ks_coupled: float = 0.07
    moment_rel: float = 0.05
    sde_mean_rel: float = 0.02
    standard_errors: float = 3.0
    excluded_fraction: float = 0.05
    clamp_fraction: float = 0.01
    min_replicates: int = 500
