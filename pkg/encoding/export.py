import numpy as np
import polars as pl

from utils.artifact_sink import ArtifactSink
from .bundle import EncodingBundle
from .left_height import left_height


def _frame(values: np.ndarray) -> pl.DataFrame:
    return pl.DataFrame({"index": np.arange(values.size), "value": values})


def bundle_frames(bundle: EncodingBundle) -> dict[str, pl.DataFrame]:
    """One (index, value) frame per (process, type); pair processes are named process_i_j."""
    frames = {}
    prof = bundle.profiles
    for j in range(1, bundle.n_types + 1):
        frames[f"lukasiewicz_{j}"] = _frame(bundle.lukasiewicz[j])
        frames[f"running_min_{j}"] = _frame(bundle.running_min[j])
        frames[f"height_{j}"] = _frame(bundle.height[j])
        frames[f"left_height_{j}"] = _frame(left_height(bundle, j).values)
        frames[f"profile_{j}"] = _frame(prof.Z[j - 1])
        frames[f"cumulative_profile_{j}"] = _frame(prof.C[j - 1])
        frames[f"immigrant_count_{j}"] = _frame(prof.I[j - 1])
        frames[f"immigration_walk_{j}"] = _frame(bundle.walks.immigration(j))
        for i in range(bundle.n_types + 1):
            frames[f"cumulative_profile_{i}_{j}"] = _frame(prof.C_from[i, j - 1])
            if i > 0:
                frames[f"children_walk_{i}_{j}"] = _frame(bundle.walks.walk(i, j))
    return frames


def export_bundle(bundle: EncodingBundle, sink: ArtifactSink, prefix: str = "") -> dict:
    """Write every path as CSV; returns the manifest entries (file and horizon per path)."""
    entries = {}
    for name, frame in bundle_frames(bundle).items():
        path = sink.write_frame(f"{prefix}{name}.csv", frame)
        entries[name] = {"file": path, "length": frame.height}
    entries["horizons"] = {str(j): bundle.horizon(j) for j in range(1, bundle.n_types + 1)}
    return entries
