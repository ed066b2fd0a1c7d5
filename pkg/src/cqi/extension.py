"""Extending homomorphisms from cyclic subgroups to endomorphisms.

Two independent routes decide whether ``f: H -> G`` extends:

* the valuation criterion (:func:`is_extendable_formula`), which only looks
  at ``alpha = v_p(generator)``, the order exponent ``u`` and ``v_p(f(h))``;
* brute force over ``End(G)`` (:func:`is_extendable_oracle`), which knows
  nothing about valuations.

An endomorphism of ``Z(q_1) + ... + Z(q_N)`` is a free choice of column
images ``F(e_l)`` in the ``q_l``-torsion, so ``{F(h) : F in End(G)}`` equals
the subgroup ``sum_l h_l * G[q_l]``. The oracle computes that set numerically
(closure in the group, see :meth:`ProductGroup.generated_subgroup`); the
literal odometer search over every table is kept as ``stream=True`` and the
test-suite checks the two agree.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from cqi.errors import CapExceeded, OutOfRange
from cqi.groups import (
    DEFAULT_ENUM_CAP,
    CyclicSubgroupDescriptor,
    DeltaProfile,
    GroupElement,
    PrimePowerSignature,
    ProductGroup,
    valuations_array,
)

DEFAULT_END_CAP = 2**24


@dataclass(frozen=True)
class HomomorphismDescriptor:
    """``f: <generator> -> G`` stored as the image of the canonical generator."""

    source: CyclicSubgroupDescriptor
    image: GroupElement
    beta: tuple[int, ...]

    @classmethod
    def build(cls, H: CyclicSubgroupDescriptor, image: GroupElement, sig: PrimePowerSignature) -> HomomorphismDescriptor:
        image.check(sig)
        if not image.scale(sig.p**H.u, sig).is_zero:
            raise OutOfRange(f"image {image.coords} is not killed by p^{H.u}")
        beta = tuple(a - max(0, M - H.u) for a, M in zip(image.alpha(sig), sig.expanded))
        return cls(H, image, beta)


@dataclass(frozen=True)
class EndomorphismTable:
    """Images ``F(e_l)`` of the standard basis, one per expanded coordinate."""

    columns: tuple[GroupElement, ...]

    def apply(self, g: GroupElement, sig: PrimePowerSignature) -> GroupElement:
        acc = [0] * sig.length
        for h, col in zip(g.coords, self.columns):
            if h:
                for i, a in enumerate(col.coords):
                    acc[i] += h * a
        return GroupElement(tuple(x % q for x, q in zip(acc, sig.moduli)))


# ---------------------------------------------------------------------------
# enumeration


def hom_count(H: CyclicSubgroupDescriptor, sig: PrimePowerSignature) -> int:
    return math.prod(sig.p ** min(H.u, M) for M in sig.expanded)


def hom_images(H: CyclicSubgroupDescriptor, sig: PrimePowerSignature) -> np.ndarray:
    """Every admissible generator image (elements killed by ``p^u``) as a coordinate array."""
    return sig.group().torsion(sig.p**H.u)


def enumerate_homs(
    H: CyclicSubgroupDescriptor, sig: PrimePowerSignature, cap: int = DEFAULT_ENUM_CAP
) -> list[HomomorphismDescriptor]:
    n = hom_count(H, sig)
    if n > cap:
        raise CapExceeded("Hom(H, G)", n, cap)
    return [
        HomomorphismDescriptor.build(H, GroupElement(tuple(int(x) for x in row)), sig)
        for row in hom_images(H, sig)
    ]


def _column_choices(sig: PrimePowerSignature, l: int) -> list[GroupElement]:
    rows = sig.group().torsion(sig.p ** sig.expanded[l])
    return [GroupElement(tuple(int(x) for x in row)) for row in rows]


def enumerate_endomorphisms(sig: PrimePowerSignature, cap: int = DEFAULT_END_CAP) -> Iterator[EndomorphismTable]:
    """Stream every endomorphism once; the last column varies fastest."""
    size = sig.endomorphism_space()
    if size > cap:
        raise CapExceeded("End(G)", size, cap)
    choices = [_column_choices(sig, l) for l in range(sig.length)]
    for cols in itertools.product(*choices):
        yield EndomorphismTable(tuple(cols))


def endomorphism_space(group: ProductGroup) -> int:
    return math.prod(math.gcd(a, b) for a in group.moduli for b in group.moduli)


def endomorphism_images(group: ProductGroup, generator: Sequence[int]) -> np.ndarray:
    """Membership mask of ``{F(h) : F in End(G)}`` for ``h = generator``."""
    h = np.asarray(generator, dtype=np.int64)
    gens = []
    for l, q in enumerate(group.moduli):
        if h[l] == 0:
            continue
        cols = group.torsion_generators(q)
        if len(cols):
            gens.append((int(h[l]) * cols) % group.moduli_arr)
    if not gens:
        mask = np.zeros(group.order, dtype=bool)
        mask[0] = True
        return mask
    return group.generated_subgroup(np.concatenate(gens))


@lru_cache(maxsize=16)
def _image_mask(moduli: tuple[int, ...], generator: tuple[int, ...]) -> np.ndarray:
    mask = endomorphism_images(ProductGroup(moduli), generator)
    mask.setflags(write=False)
    return mask


def _check_end_cap(sig: PrimePowerSignature, cap: int) -> None:
    size = sig.endomorphism_space()
    if size > cap:
        raise CapExceeded("End(G)", size, cap)


# ---------------------------------------------------------------------------
# deciding extendability


def is_extendable_oracle(
    f: HomomorphismDescriptor, sig: PrimePowerSignature, cap: int = DEFAULT_END_CAP, *, stream: bool = False
) -> bool:
    """Brute force: does some ``F in End(G)`` send the generator to ``f``'s image?

    ``stream=True`` walks every endomorphism table (early exit on a hit);
    the default checks membership in the precomputed image set.
    """
    _check_end_cap(sig, cap)
    h = f.source.generator
    if stream:
        return any(F.apply(h, sig) == f.image for F in enumerate_endomorphisms(sig, cap))
    grp = sig.group()
    mask = _image_mask(sig.moduli, h.coords)
    return bool(mask[int(grp.encode(np.asarray([f.image.coords]))[0])])


def _criterion_bounds(alpha: Sequence[int], sig: PrimePowerSignature) -> list[int]:
    # min_l (alpha_l + max(0, M_s - M_l)) for each s
    M = sig.expanded
    return [min(a + max(0, Ms - Ml) for a, Ml in zip(alpha, M)) for Ms in M]


def is_extendable_formula(f: HomomorphismDescriptor, sig: PrimePowerSignature) -> bool:
    u = f.source.u
    bounds = _criterion_bounds(f.source.alpha, sig)
    return not any(b + max(0, Ms - u) < rhs for b, Ms, rhs in zip(f.beta, sig.expanded, bounds))


def has_nonextendable_hom(H: CyclicSubgroupDescriptor, sig: PrimePowerSignature) -> bool:
    """Membership of ``H`` in X(G) via the criterion at ``beta = 0``."""
    bounds = _criterion_bounds(H.alpha, sig)
    return any(max(0, Ms - H.u) < rhs for Ms, rhs in zip(sig.expanded, bounds))


def formula_extendable_mask(H: CyclicSubgroupDescriptor, images: np.ndarray, sig: PrimePowerSignature) -> np.ndarray:
    """:func:`is_extendable_formula` for a batch of generator images (rows of ``images``)."""
    M = np.asarray(sig.expanded, dtype=np.int64)
    v = valuations_array(images, sig.p, M[None, :])
    rhs = np.asarray(_criterion_bounds(H.alpha, sig), dtype=np.int64)
    # v = beta + max(0, M - u)
    return ~(v < rhs[None, :]).any(axis=1)


def oracle_extendable_mask(H: CyclicSubgroupDescriptor, images: np.ndarray, sig: PrimePowerSignature) -> np.ndarray:
    """:func:`is_extendable_oracle` for a batch of generator images."""
    grp = sig.group()
    mask = _image_mask(sig.moduli, H.generator.coords)
    return mask[grp.encode(images)]


def in_X_oracle(group: ProductGroup, generator: Sequence[int]) -> bool:
    """Brute-force X(G) membership of ``<generator>`` in any ``Z(q_1)+...+Z(q_N)``.

    Every image of an endomorphism lies in the ``ord(h)``-torsion, and every
    element of that torsion is the image of some hom ``<h> -> G``; the subgroup
    is in X(G) exactly when the endomorphism images miss part of it.
    """
    h = np.asarray(generator, dtype=np.int64)
    o = int(group.element_orders(h)[0])
    reachable = int(endomorphism_images(group, h).sum())
    torsion = math.prod(math.gcd(q, o) for q in group.moduli)
    return reachable < torsion


def subgroup_in_X_oracle(H: CyclicSubgroupDescriptor, sig: PrimePowerSignature, cap: int = DEFAULT_END_CAP) -> bool:
    _check_end_cap(sig, cap)
    return in_X_oracle(sig.group(), H.generator.coords)


# ---------------------------------------------------------------------------
# conditions on valuation profiles


def _flat(delta: DeltaProfile | Sequence[int]) -> tuple[int, ...]:
    return delta.flat if isinstance(delta, DeltaProfile) else tuple(delta)


def condition1(delta: DeltaProfile | Sequence[int], sig: PrimePowerSignature) -> bool:
    """Coordinatewise criterion over the expanded exponents."""
    d = _flat(delta)
    M = sig.expanded
    if len(d) != len(M):
        raise OutOfRange(f"profile length {len(d)} != {len(M)}")
    norm = max(d)
    for Ms in M:
        lhs = max(0, Ms - norm)
        if all(lhs < max(Ml - dl, Ms - dl) for Ml, dl in zip(M, d)):
            return True
    return False


def condition2(delta: DeltaProfile, sig: PrimePowerSignature) -> bool:
    """Block-norm form of :func:`condition1`."""
    norm = delta.norm
    bn = delta.block_norms
    m = sig.exponents
    for ms in m:
        lhs = max(0, ms - norm)
        if all(lhs < max(ml - b, ms - b) for ml, b in zip(m, bn)):
            return True
    return False


def f_delta_from_norm(norm: int, sig: PrimePowerSignature) -> int:
    m = sig.exponents
    if norm < m[0]:
        return 1
    return max(s for s in range(1, len(m) + 1) if m[s - 1] <= norm)


def f_delta(delta: DeltaProfile, sig: PrimePowerSignature) -> int:
    """1-based block index: 1 below ``m_1``, else the last block with ``m_s <= ||delta||``."""
    return f_delta_from_norm(delta.norm, sig)


def condition3_norms(norm: int, block_norms: Sequence[int], sig: PrimePowerSignature) -> bool:
    m = sig.exponents
    if norm < m[0]:
        return block_norms[0] < norm
    f = f_delta_from_norm(norm, sig)
    mf = m[f - 1]
    if mf == norm:
        return block_norms[f - 1] < mf
    # mf < norm, so block f+1 exists
    return block_norms[f - 1] < mf or block_norms[f] < norm


def condition3(delta: DeltaProfile, sig: PrimePowerSignature) -> bool:
    return condition3_norms(delta.norm, delta.block_norms, sig)


# vectorised twins for exhaustive sweeps; rows of ``d`` are flat profiles


def condition1_batch(d: np.ndarray, sig: PrimePowerSignature) -> np.ndarray:
    M = np.asarray(sig.expanded, dtype=np.int64)
    norm = d.max(axis=1)
    out = np.zeros(len(d), dtype=bool)
    for Ms in M:
        lhs = np.maximum(0, Ms - norm)
        rhs = np.maximum(M[None, :] - d, Ms - d).min(axis=1)
        out |= lhs < rhs
    return out


def _block_norms_batch(d: np.ndarray, sig: PrimePowerSignature) -> np.ndarray:
    return np.stack([d[:, s].max(axis=1) for s in sig.block_slices], axis=1)


def condition2_batch(d: np.ndarray, sig: PrimePowerSignature) -> np.ndarray:
    m = np.asarray(sig.exponents, dtype=np.int64)
    norm = d.max(axis=1)
    bn = _block_norms_batch(d, sig)
    out = np.zeros(len(d), dtype=bool)
    for ms in m:
        lhs = np.maximum(0, ms - norm)
        rhs = np.maximum(m[None, :] - bn, ms - bn).min(axis=1)
        out |= lhs < rhs
    return out


def condition3_batch(d: np.ndarray, sig: PrimePowerSignature) -> np.ndarray:
    m = np.asarray(sig.exponents, dtype=np.int64)
    n = len(m)
    norm = d.max(axis=1)
    bn = _block_norms_batch(d, sig)
    # 0-based f: number of m_s <= norm, minus one, floored at 0
    f = np.maximum(np.searchsorted(m, norm, side="right") - 1, 0)
    rows = np.arange(len(d))
    bf = bn[rows, f]
    mf = m[f]
    bnext = np.where(f + 1 < n, bn[rows, np.minimum(f + 1, n - 1)], norm)
    case1 = norm < m[0]
    case2 = ~case1 & (mf == norm)
    case3 = ~case1 & (mf < norm)
    return (case1 & (bn[:, 0] < norm)) | (case2 & (bf < mf)) | (case3 & ((bf < mf) | (bnext < norm)))
