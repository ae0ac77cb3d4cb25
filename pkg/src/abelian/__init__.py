"""Black-box algorithms on finite Abelian groups.

The oracle hides a direct product of cyclic groups behind opaque labels and
counts every access; the library recovers generator chains, canonical
invariant factors, and explicit bases through that interface, decides
isomorphism with verified witnesses, and ships the measurement harness
(sweeps, scaling benchmarks, estimator calibration, lower-bound adversary).
"""

from .errors import InconsistencyError, ModelViolation, RandomizedFailure
from .oracle import (
    GroupOracle,
    GroupSpec,
    format_group_spec,
    make_group,
    parse_group_spec,
)
from .detgen import (
    GeneratorChain,
    RepresentationTable,
    evaluate_exponents,
    generator_plus,
    generators,
    verify_chain,
)
from .monomial import (
    Presentation,
    element_order,
    enumerate_monomials,
    format_presentation,
    multiply,
    parse_presentation,
    psi,
    reduce,
)
from .snf import (
    IntMatrix,
    SnfResult,
    basis_coordinates,
    basis_from_snf,
    build_relation_matrix,
    invariant_factors,
    smith_normal_form,
    unimodular_inverse,
)
from .randgen import (
    SizeEstimate,
    SubgroupTables,
    estimate_size,
    random_generators,
    size_range,
)
from .iso import BasisResult, IsomorphismWitness, find_basis, is_isomorphic
from .adversary import AdversaryOracle, adversary_demo
from .numtheory import canonical_invariant_factors

__version__ = "0.1.0"

__all__ = [
    "AdversaryOracle",
    "BasisResult",
    "GeneratorChain",
    "GroupOracle",
    "GroupSpec",
    "InconsistencyError",
    "IntMatrix",
    "IsomorphismWitness",
    "ModelViolation",
    "Presentation",
    "RandomizedFailure",
    "RepresentationTable",
    "SizeEstimate",
    "SnfResult",
    "SubgroupTables",
    "adversary_demo",
    "basis_coordinates",
    "basis_from_snf",
    "build_relation_matrix",
    "canonical_invariant_factors",
    "element_order",
    "enumerate_monomials",
    "estimate_size",
    "evaluate_exponents",
    "find_basis",
    "format_group_spec",
    "format_presentation",
    "generator_plus",
    "generators",
    "invariant_factors",
    "is_isomorphic",
    "make_group",
    "multiply",
    "parse_group_spec",
    "parse_presentation",
    "psi",
    "random_generators",
    "reduce",
    "size_range",
    "smith_normal_form",
    "unimodular_inverse",
    "verify_chain",
]