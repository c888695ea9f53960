"""Dolan-More performance profiles and runtime summaries for benchmark CSVs."""

from .profiles import (
    ProfilePoint,
    dolan_more,
    nearest_rank,
    performance_ratios,
    profile_points,
    read_times,
    render_profiles,
    render_summary,
    runtime_summary,
    write_profile_csv,
)

__all__ = [
    "ProfilePoint",
    "dolan_more",
    "nearest_rank",
    "performance_ratios",
    "profile_points",
    "read_times",
    "render_profiles",
    "render_summary",
    "runtime_summary",
    "write_profile_csv",
]
