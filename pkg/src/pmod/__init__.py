"""Pythagorean pairs of complex matrices.

Modules are tuples of square complex matrices (A, B, ...) with
sum_k legs[k]* legs[k] = I. The package provides the fusion product, duals
and duality checks, the scalar Lie group, the Kawamura arity-multiplying
product, structural analysis (atomic / diffuse / residual parts, full
decomposition, equivalence) and constructors with closed-form fusion rules
for the classified families, plus a JSON-file CLI (``pmod``).
"""

from .core import (
    DualityReport,
    GroupCoords,
    PModule,
    ScalarModule,
    ValidationReport,
    boxtimes,
    conjugate,
    direct_sum,
    dual_module,
    duality_check,
    flip_permutation,
    in_class_m,
    in_class_n,
    kawamura_tensor,
    scalar_boxtimes,
    scalar_coords_iso,
    scalar_coords_of,
    scalar_inverse,
    scalar_module,
    star,
    unit_module,
    validate,
    word_operator,
)
from .families import (
    AtomicLabel,
    D2FuseReport,
    GPVector,
    atomic_diffuse_fuse,
    atomic_module,
    d2_fuse,
    gp_canonical,
    gp_fuse,
    gp_module,
    prime_words,
    random_module,
)
from .linalg import (
    HermEig,
    PolarPair,
    commutation_kernel,
    hermitian_eig,
    kernel_basis,
    kron,
    polar,
    psd_funcalc,
)
from .structure import (
    AtomicSummand,
    ClassifyReport,
    CompletePart,
    DecompositionReport,
    EquivalenceResult,
    atomic_part,
    classify_parts,
    complete_submodule,
    decompose_full,
    equivalent,
    intertwiner_basis,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicLabel",
    "AtomicSummand",
    "ClassifyReport",
    "CompletePart",
    "D2FuseReport",
    "DecompositionReport",
    "DualityReport",
    "EquivalenceResult",
    "GPVector",
    "GroupCoords",
    "HermEig",
    "PModule",
    "PolarPair",
    "ScalarModule",
    "ValidationReport",
    "atomic_diffuse_fuse",
    "atomic_module",
    "atomic_part",
    "boxtimes",
    "classify_parts",
    "commutation_kernel",
    "complete_submodule",
    "conjugate",
    "d2_fuse",
    "decompose_full",
    "direct_sum",
    "dual_module",
    "duality_check",
    "equivalent",
    "flip_permutation",
    "gp_canonical",
    "gp_fuse",
    "gp_module",
    "hermitian_eig",
    "in_class_m",
    "in_class_n",
    "intertwiner_basis",
    "kawamura_tensor",
    "kernel_basis",
    "kron",
    "polar",
    "prime_words",
    "psd_funcalc",
    "random_module",
    "scalar_boxtimes",
    "scalar_coords_iso",
    "scalar_coords_of",
    "scalar_inverse",
    "scalar_module",
    "star",
    "unit_module",
    "validate",
    "word_operator",
]
