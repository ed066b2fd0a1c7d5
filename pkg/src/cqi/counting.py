"""Counting X(G), its valuation classes, and the composite-order reduction.

For a p-group the classes of X(G) correspond to the valuation profiles in
Y(G) (the profiles satisfying :func:`cqi.extension.condition3`); each class
holds :func:`orbit_size` subgroups. The closed forms below evaluate both
counts without enumeration.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Literal

from cqi.errors import CapExceeded, ZeroProfile
from cqi.extension import condition3_norms, has_nonextendable_hom, in_X_oracle, subgroup_in_X_oracle
from cqi.groups import (
    DEFAULT_ENUM_CAP,
    CompositeGroupSpec,
    DeltaProfile,
    PrimePowerSignature,
    ProductGroup,
    count_cyclic_subgroups,
    crt_decompose,
    enumerate_cyclic_subgroups,
    euler_phi_prime_power,
    valuation_profile,
)

DEFAULT_Y_CAP = 2**22

Method = Literal["closed_form", "enumeration", "inclusion_exclusion"]


@dataclass
class CountReport:
    spec: str
    subgroups: int
    cqi: bool
    method: Method
    classes: int | None = None  # None: not defined for composite orders
    p: int | None = None
    terms: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "spec": self.spec,
            "classes": "undefined" if self.classes is None else self.classes,
            "subgroups": self.subgroups,
            "cqi": self.cqi,
            "method": self.method,
            "terms": self.terms,
        }
        if self.p is not None:
            out["p"] = self.p
        return out

    def csv_row(self) -> list:
        return [
            self.spec,
            "" if self.p is None else self.p,
            "undefined" if self.classes is None else self.classes,
            self.subgroups,
            str(self.cqi).lower(),
        ]


# ---------------------------------------------------------------------------
# Y(G) and fibres


def _blocks_with_max(k: int, lam: int) -> list[tuple[int, ...]]:
    # tuples in [0, k]^lam whose maximum is exactly k
    return [t for t in itertools.product(range(k + 1), repeat=lam) if max(t) == k]


def _accepted_norms(sig: PrimePowerSignature) -> Iterator[tuple[int, tuple[int, ...]]]:
    for bn in itertools.product(*(range(m + 1) for m in sig.exponents)):
        norm = max(bn)
        if condition3_norms(norm, bn, sig):
            yield norm, bn


def enumerate_Y(sig: PrimePowerSignature, cap: int = DEFAULT_Y_CAP) -> set[DeltaProfile]:
    """All profiles bounded by the exponents that satisfy condition 3.

    Condition 3 reads only the block norms, so candidates are generated per
    block-norm vector and expanded.
    """
    size = sig.candidate_space
    if size > cap:
        raise CapExceeded("profile candidates", size, cap)
    out: set[DeltaProfile] = set()
    cache: dict[tuple[int, int], list[tuple[int, ...]]] = {}
    for _, bn in _accepted_norms(sig):
        per_block = []
        for k, lam in zip(bn, sig.multiplicities):
            if (k, lam) not in cache:
                cache[k, lam] = _blocks_with_max(k, lam)
            per_block.append(cache[k, lam])
        for blocks in itertools.product(*per_block):
            out.add(DeltaProfile(blocks))
    return out


def count_Y(sig: PrimePowerSignature) -> int:
    """``|Y(G)|`` from block-norm vectors; each contributes ``prod ((k+1)^l - k^l)``."""
    return sum(
        math.prod((k + 1) ** lam - k**lam for k, lam in zip(bn, sig.multiplicities))
        for _, bn in _accepted_norms(sig)
    )


def orbit_size(delta: DeltaProfile, p: int) -> int:
    """Number of cyclic subgroups with valuation profile ``delta``."""
    norm = delta.norm
    if norm == 0:
        raise ZeroProfile("the zero profile has no fibre in X(G)")
    num = math.prod(euler_phi_prime_power(p, d) for d in delta.flat)
    q, r = divmod(num, euler_phi_prime_power(p, norm))
    assert r == 0
    return q


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class Breakdown:
    total: int
    terms: dict[str, int]


def count_classes_closed_form(sig: PrimePowerSignature) -> Breakdown:
    m, lam, pre = sig.exponents, sig.multiplicities, sig.prefix_sums
    n, N = len(m), pre[-1]

    s1 = sum(k ** lam[0] * ((k + 1) ** (N - lam[0]) - k ** (N - lam[0])) for k in range(1, m[0]))
    s2 = s3 = 0
    for i in range(n - 1):
        below = math.prod((m[j] + 1) ** lam[j] for j in range(i))
        rest_i = N - pre[i]
        rest_next = N - pre[i + 1]
        for k in range(m[i], m[i + 1]):
            s2 += m[i] ** lam[i] * below * ((k + 1) ** rest_i - k**rest_i)
        for k in range(m[i] + 1, m[i + 1]):
            s3 += (
                k ** lam[i + 1]
                * ((m[i] + 1) ** lam[i] - m[i] ** lam[i])
                * below
                * ((k + 1) ** rest_next - k**rest_next)
            )
    return Breakdown(s1 + s2 + s3, {"S1": s1, "S2": s2, "S3": s3})


def _layer(p: int, k: int, e: int) -> int:
    # (p^{k e} - p^{(k-1) e}) / (p^{k-1} (p-1)), exact
    q, r = divmod(p ** (k * e) - p ** ((k - 1) * e), euler_phi_prime_power(p, k))
    assert r == 0
    return q


def count_subgroups_closed_form(sig: PrimePowerSignature) -> Breakdown:
    p = sig.p
    m, lam, pre = sig.exponents, sig.multiplicities, sig.prefix_sums
    n, N = len(m), pre[-1]

    t1 = sum(p ** ((k - 1) * lam[0]) * _layer(p, k, N - lam[0]) for k in range(1, m[0]))
    t2 = t3 = 0
    for i in range(n - 1):
        below = p ** sum(m[j] * lam[j] for j in range(i))
        for k in range(m[i], m[i + 1]):
            t2 += below * p ** ((m[i] - 1) * lam[i]) * _layer(p, k, N - pre[i])
        for k in range(m[i] + 1, m[i + 1]):
            t3 += (
                below
                * (p ** (m[i] * lam[i]) - p ** ((m[i] - 1) * lam[i]))
                * p ** ((k - 1) * lam[i + 1])
                * _layer(p, k, N - pre[i + 1])
            )
    return Breakdown(t1 + t2 + t3, {"T1": t1, "T2": t2, "T3": t3})


def closed_form_report(sig: PrimePowerSignature) -> CountReport:
    s = count_classes_closed_form(sig)
    t = count_subgroups_closed_form(sig)
    return CountReport(
        spec=sig.text(),
        p=sig.p,
        classes=s.total,
        subgroups=t.total,
        cqi=t.total == 0,
        method="closed_form",
        terms={**s.terms, **t.terms},
    )


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class EnumerationCount:
    classes: int
    subgroups: int
    oracle_subgroups: int | None = None
    oracle_classes: int | None = None
    profile_consistent: bool | None = None


def count_X_enumeration(
    sig: PrimePowerSignature, *, verify: bool = False, cap: int = DEFAULT_ENUM_CAP
) -> EnumerationCount:
    """Count X(G) by listing cyclic subgroups.

    With ``verify`` the brute-force oracle decides membership independently and
    the result also records whether membership is constant on each profile.
    """
    subs = enumerate_cyclic_subgroups(sig, cap)
    members = [H for H in subs if has_nonextendable_hom(H, sig)]
    classes = len({valuation_profile(H, sig) for H in members})
    if not verify:
        return EnumerationCount(classes, len(members))
    by_profile: dict[DeltaProfile, set[bool]] = {}
    oracle_members = []
    for H in subs:
        flag = subgroup_in_X_oracle(H, sig, cap=max(cap, sig.endomorphism_space()))
        by_profile.setdefault(valuation_profile(H, sig), set()).add(flag)
        if flag:
            oracle_members.append(H)
    return EnumerationCount(
        classes,
        len(members),
        oracle_subgroups=len(oracle_members),
        oracle_classes=len({valuation_profile(H, sig) for H in oracle_members}),
        profile_consistent=all(len(v) == 1 for v in by_profile.values()),
    )


def count_X_bruteforce(group: ProductGroup, cap: int = DEFAULT_ENUM_CAP) -> int:
    """``#X(G)`` for any ``Z(q_1)+...+Z(q_N)`` without CRT or valuations."""
    if group.order > cap:
        raise CapExceeded("group order", group.order, cap)
    return sum(in_X_oracle(group, row) for row in group.decode(group.canonical_generators()))


def cyclic_subgroup_count_bruteforce(group: ProductGroup, cap: int = DEFAULT_ENUM_CAP) -> int:
    if group.order > cap:
        raise CapExceeded("group order", group.order, cap)
    return len(group.canonical_generators())


# ---------------------------------------------------------------------------
# composite orders


def homocyclic_verdicts(spec: CompositeGroupSpec) -> dict[int, bool]:
    return {p: sig.is_homocyclic for p, sig in crt_decompose(spec).items()}


def is_cyclic_quasi_injective(spec: CompositeGroupSpec) -> bool:
    return all(homocyclic_verdicts(spec).values())


def count_X_composite(spec: CompositeGroupSpec) -> CountReport:
    """Inclusion-exclusion over the set of primes dividing the order."""
    comps = crt_decompose(spec)
    primes = list(comps)
    x = {p: count_subgroups_closed_form(sig).total for p, sig in comps.items()}
    c = {p: count_cyclic_subgroups(sig) for p, sig in comps.items()}
    total = 0
    subsets = []
    for k in range(1, len(primes) + 1):
        sign = (-1) ** (k - 1)
        for J in itertools.combinations(primes, k):
            term = math.prod(x[p] for p in J) * math.prod(c[p] for p in primes if p not in J)
            total += sign * term
            subsets.append({"J": list(J), "sign": sign, "term": term})
    return CountReport(
        spec=spec.text(),
        subgroups=total,
        cqi=total == 0,
        method="inclusion_exclusion",
        terms={
            "subsets": subsets,
            "components": {str(p): {"X": x[p], "c": c[p]} for p in primes},
        },
    )


# ---------------------------------------------------------------------------
# partition of Y(G) used by the closed form, for verification


def y_partition_sizes(sig: PrimePowerSignature, cap: int = DEFAULT_Y_CAP) -> dict[str, int]:
    """Sizes of the four profile families, each enumerated from its own predicate.

    The predicates only bound ``delta`` by the exponents; membership in Y(G)
    is not assumed, and ``outside`` counts predicate hits that fail condition 3.
    """
    size = sig.candidate_space
    if size > cap:
        raise CapExceeded("profile candidates", size, cap)
    m = sig.exponents
    n = len(m)
    sizes = {"Y1": 0, "Y2": 0, "Y3": 0, "Y4": 0, "Y": 0, "outside": 0}
    for flat in itertools.product(*(range(M + 1) for M in sig.expanded)):
        delta = DeltaProfile.from_flat(flat, sig)
        norm, bn = delta.norm, delta.block_norms
        in_y = condition3_norms(norm, bn, sig)
        y1 = 1 <= norm < m[0] and bn[0] < norm
        y2 = any(m[i] <= norm < m[i + 1] and bn[i] < m[i] for i in range(n - 1))
        y3 = any(m[i] < norm < m[i + 1] and bn[i + 1] < norm for i in range(n - 1))
        y4 = y2 and y3
        hits = (y1, y2, y3, y4)
        for key, hit in zip(("Y1", "Y2", "Y3", "Y4"), hits):
            sizes[key] += hit
        sizes["Y"] += in_y
        if any(hits) and not in_y:
            sizes["outside"] += 1
    return sizes
