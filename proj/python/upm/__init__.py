"""Unsupervised part mining over CNN activation tensors (C++ core)."""

from ._core import (
    UpmError,
    LinearModel,
    apriori,
    bilinear_resize,
    brute_force_mine,
    build_transactions,
    compute_threshold,
    fuse_features,
    global_average_pool,
    kmeans,
    l2_normalize,
    localize,
    planted_fixture,
    read_tensor,
    spectral_cluster,
    support,
    sym_eigen,
    write_tensor,
)

__all__ = [
    "UpmError",
    "LinearModel",
    "apriori",
    "bilinear_resize",
    "brute_force_mine",
    "build_transactions",
    "compute_threshold",
    "fuse_features",
    "global_average_pool",
    "kmeans",
    "l2_normalize",
    "localize",
    "planted_fixture",
    "read_tensor",
    "spectral_cluster",
    "support",
    "sym_eigen",
    "write_tensor",
]
