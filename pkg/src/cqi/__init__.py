"""Cyclic-quasi-injectivity of finite abelian groups: decision, counting and brute-force checks."""

from cqi.errors import (
    CapExceeded,
    CQIError,
    NonPrime,
    NotAPermutation,
    NotInY,
    OutOfRange,
    ParseError,
    TooLarge,
    ZeroProfile,
)
from cqi.groups import (
    CompositeGroupSpec,
    CyclicSubgroupDescriptor,
    DeltaProfile,
    GroupElement,
    PrimePowerSignature,
    count_cyclic_subgroups,
    crt_decompose,
    element_order_exponent,
    enumerate_cyclic_subgroups,
    euler_phi_prime_power,
    normalize_signature,
    valuation,
    valuation_profile,
)

__version__ = "0.1.0"
