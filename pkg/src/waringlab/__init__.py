"""waringlab: desk-scale verification of the local and Fourier machinery
behind representing integers as bounded sums of k-th powers drawn from
dense subsets.

Everything here is exact or carries an explicit error bound; randomized
searches are seeded and reproducible.
"""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    EmptyBohrSetError,
    PreconditionError,
    PrecisionError,
    WaringlabError,
)
from .residues import (
    FactoredModulus,
    KContext,
    ResidueSet,
    WContext,
    build_k_context,
    build_w_context,
    crt_combine,
    eta,
    factorize,
    kth_power_classes,
    sigma_W,
    size_Z_formula,
    tau,
    unit_kth_power_classes,
)
from .zk import ZkEstimate, local_factor, zeta, zeta_sandwich, zk_estimate

__all__ = [
    "CapacityError",
    "EmptyBohrSetError",
    "PreconditionError",
    "PrecisionError",
    "WaringlabError",
    "FactoredModulus",
    "KContext",
    "ResidueSet",
    "WContext",
    "build_k_context",
    "build_w_context",
    "crt_combine",
    "eta",
    "factorize",
    "kth_power_classes",
    "sigma_W",
    "size_Z_formula",
    "tau",
    "unit_kth_power_classes",
    "ZkEstimate",
    "local_factor",
    "zeta",
    "zeta_sandwich",
    "zk_estimate",
    "__version__",
]
