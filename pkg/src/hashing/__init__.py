"""4-wise independent hashing over binary fields and seed derivation."""

from .polyhash import (
    FIELD_POLYNOMIALS,
    FULL_FIELD_BITS,
    MAX_SLICE_BITS,
    BinaryField,
    KWiseReport,
    PolyHash,
    SignHash,
    SliceHash,
    binary_field,
    enumerate_family,
    evaluate_batch,
    eval_sign,
    eval_slice,
    is_irreducible,
    kwise_uniformity_report,
    sample_coefficients,
    sample_polyhash,
)
from .seeding import derive_seed, splitmix64, trial_rng

__all__ = [
    "FIELD_POLYNOMIALS",
    "FULL_FIELD_BITS",
    "MAX_SLICE_BITS",
    "BinaryField",
    "KWiseReport",
    "PolyHash",
    "SignHash",
    "SliceHash",
    "binary_field",
    "enumerate_family",
    "evaluate_batch",
    "eval_sign",
    "eval_slice",
    "is_irreducible",
    "kwise_uniformity_report",
    "sample_coefficients",
    "sample_polyhash",
    "derive_seed",
    "splitmix64",
    "trial_rng",
]
