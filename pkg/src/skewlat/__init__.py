"""Finite skew lattices: validation, Green's relations, coset geometry and classification."""
from .algebra import (
    ElementMap,
    EquivPartition,
    FiniteSkewLattice,
    ValidationReport,
    check_embedding,
    direct_product,
    find_embedding,
    is_congruence,
    load,
    mirror,
    parse_algebra,
    quotient_by,
    save,
    serialize_algebra,
    subalgebra,
    subalgebra_closure,
    validate,
)
from .classify import (
    ClassificationReport,
    ForbiddenWitness,
    Verdict,
    classify_report,
    find_forbidden,
    is_categorical,
    is_distributive,
    is_order_closed,
    is_strictly_categorical,
    normality_flags,
)
from .constructions import (
    Lcg,
    PrimitiveSpec,
    gen_chain,
    gen_corpus,
    gen_partial_functions,
    gen_primitive,
    gen_rectangular,
    gen_xn,
    gen_yn,
)
from .cosets import (
    PartialBijection,
    SkewChain,
    ac_decomposition,
    are_parallel,
    coset_bijections,
    coset_partitions,
    compose_bijections,
    parallel_classes,
    primitive_factorization,
    reflective_factorization,
)
from .errors import CarrierTooLarge, InternalError, NotACongruence, ParseError, SkewLatticeError
from .order import compute_orders, green_partitions, handedness, maximal_images, verify_pullback

__all__ = [name for name in dir() if not name.startswith("_")]
