"""Cross-checks between closed forms, criteria and brute force, plus the test families.

Each ``check_*`` function returns a :class:`Check` carrying both sides of the
comparison so reports can show the numbers, not just a verdict.
"""

from __future__ import annotations

from collections.abc import Iterator
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from cqi.counting import (
    count_classes_closed_form,
    count_subgroups_closed_form,
    count_X_bruteforce,
    count_X_composite,
    count_X_enumeration,
    count_Y,
    enumerate_Y,
    is_cyclic_quasi_injective,
    orbit_size,
    y_partition_sizes,
)
from cqi.errors import CapExceeded
from cqi.extension import (
    DEFAULT_END_CAP,
    condition1_batch,
    condition2_batch,
    condition3_batch,
    endomorphism_images,
    formula_extendable_mask,
    has_nonextendable_hom,
    hom_images,
)
from cqi.groups import (
    DEFAULT_ENUM_CAP,
    CompositeGroupSpec,
    PrimePowerSignature,
    enumerate_cyclic_subgroups,
    normalize_signature,
)


@dataclass
class Check:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    values: dict = field(default_factory=dict)
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status, "values": self.values}
        if self.note:
            out["note"] = self.note
        return out


def _verdict(name: str, ok: bool, **values) -> Check:
    return Check(name, "pass" if ok else "fail", values)


# ---------------------------------------------------------------------------
# p-group checks


def check_oracle_agreement(sig: PrimePowerSignature, end_cap: int = DEFAULT_END_CAP, enum_cap: int = 2**22) -> Check:
    """Criterion vs brute force on every (cyclic subgroup, hom) pair, plus subgroup-level agreement."""
    size = sig.endomorphism_space()
    if size > end_cap:
        raise CapExceeded("End(G)", size, end_cap)
    grp = sig.group()
    pairs = mismatches = subgroup_mismatches = beta_mismatches = 0
    for H in enumerate_cyclic_subgroups(sig, enum_cap):
        images = hom_images(H, sig)
        reach = endomorphism_images(grp, H.generator.coords)
        oracle = reach[grp.encode(images)]
        formula = formula_extendable_mask(H, images, sig)
        pairs += len(images)
        mismatches += int((oracle != formula).sum())
        in_x = has_nonextendable_hom(H, sig)
        subgroup_mismatches += in_x != bool((~oracle).any())
        beta_mismatches += in_x != (not formula[_beta_zero_row(images, sig, H.u)])
    return _verdict(
        "formula_vs_oracle",
        mismatches == 0 and subgroup_mismatches == 0 and beta_mismatches == 0,
        pairs=pairs,
        mismatches=mismatches,
        subgroup_mismatches=subgroup_mismatches,
        beta_zero_mismatches=beta_mismatches,
    )


def _beta_zero_row(images: np.ndarray, sig: PrimePowerSignature, u: int) -> int:
    # row of the image with v_p(x_s) = max(0, M_s - u) in every coordinate
    target = np.array([sig.p ** max(0, M - u) % q for M, q in zip(sig.expanded, sig.moduli)], dtype=np.int64)
    return int(np.flatnonzero((images == target[None, :]).all(axis=1))[0])


def check_counts(sig: PrimePowerSignature, enum_cap: int = 2**22) -> Check:
    """Closed forms against the brute-force oracle count, the profile count and ``|Y|``."""
    s = count_classes_closed_form(sig).total
    t = count_subgroups_closed_form(sig).total
    e = count_X_enumeration(sig, verify=True, cap=enum_cap)
    y = len(enumerate_Y(sig))
    ok = (
        t == e.oracle_subgroups == e.subgroups
        and s == e.oracle_classes == e.classes == y
        and bool(e.profile_consistent)
    )
    return _verdict(
        "closed_vs_enumeration",
        ok,
        subgroups_closed=t,
        subgroups_oracle=e.oracle_subgroups,
        subgroups_criterion=e.subgroups,
        classes_closed=s,
        classes_oracle=e.oracle_classes,
        classes_criterion=e.classes,
        y_size=y,
        profile_invariant=e.profile_consistent,
    )


def check_profile_invariance(sig: PrimePowerSignature, enum_cap: int = 2**22) -> Check:
    e = count_X_enumeration(sig, verify=True, cap=enum_cap)
    return _verdict("profile_invariance", bool(e.profile_consistent))


def check_fiber_sum(sig: PrimePowerSignature, cap: int = 2**22) -> Check:
    ys = enumerate_Y(sig, cap)
    fib = sum(orbit_size(d, sig.p) for d in ys)
    t = count_subgroups_closed_form(sig).total
    return _verdict("fiber_sum", fib == t, fiber_sum=fib, subgroups_closed=t)


def delta_candidates(sig: PrimePowerSignature) -> np.ndarray:
    """All flat profiles bounded by the expanded exponents, one per row."""
    axes = [np.arange(M + 1, dtype=np.int64) for M in sig.expanded]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in grid], axis=1)


def check_conditions(sig: PrimePowerSignature, cap: int = 10**5) -> Check:
    size = sig.candidate_space
    if size > cap:
        raise CapExceeded("profile candidates", size, cap)
    d = delta_candidates(sig)
    c1, c2, c3 = condition1_batch(d, sig), condition2_batch(d, sig), condition3_batch(d, sig)
    bad = int(((c1 != c2) | (c2 != c3)).sum())
    return _verdict("conditions_1_2_3", bad == 0, candidates=len(d), mismatches=bad, y_size=int(c3.sum()))


def check_partition(sig: PrimePowerSignature, cap: int = 2**22) -> Check:
    z = y_partition_sizes(sig, cap)
    lhs = z["Y1"] + z["Y2"] + z["Y3"] - z["Y4"]
    ok = lhs == z["Y"] and z["outside"] == 0 and count_Y(sig) == z["Y"]
    return _verdict("y_partition", ok, **z)


def verify_signature(sig: PrimePowerSignature, end_cap: int = DEFAULT_END_CAP, enum_cap: int = DEFAULT_ENUM_CAP) -> list[Check]:
    """Every p-group check; checks whose cap is exceeded come back as ``skipped``."""
    runs = [
        ("formula_vs_oracle", lambda: check_oracle_agreement(sig, end_cap, enum_cap)),
        ("closed_vs_enumeration", lambda: check_counts(sig, enum_cap)),
        ("fiber_sum", lambda: check_fiber_sum(sig)),
        ("conditions_1_2_3", lambda: check_conditions(sig, max(enum_cap, 10**5))),
        ("y_partition", lambda: check_partition(sig)),
    ]
    out = []
    for name, run in runs:
        try:
            out.append(run())
        except CapExceeded as exc:
            out.append(Check(name, "skipped", {"size": exc.size, "cap": exc.cap}, note=str(exc)))
    return out


# ---------------------------------------------------------------------------
# composite checks


def check_composite(spec: CompositeGroupSpec, enum_cap: int = DEFAULT_ENUM_CAP) -> list[Check]:
    grp = spec.group()
    if grp.order > enum_cap:
        raise CapExceeded("group order", grp.order, enum_cap)
    brute = count_X_bruteforce(grp, enum_cap)
    ie = count_X_composite(spec).subgroups
    cqi = is_cyclic_quasi_injective(spec)
    return [
        _verdict("inclusion_exclusion", ie == brute, closed=ie, bruteforce=brute),
        _verdict("cqi_decision", cqi == (brute == 0), cqi=cqi, bruteforce_empty=brute == 0),
    ]


# ---------------------------------------------------------------------------
# families


def _exponent_partitions(total: int, smallest: int = 1) -> Iterator[list[int]]:
    # non-decreasing exponent lists summing to ``total``
    if total == 0:
        yield []
        return
    for m in range(smallest, total + 1):
        for rest in _exponent_partitions(total - m, m):
            yield [m, *rest]


def _as_signature(p: int, exps: list[int]) -> PrimePowerSignature:
    return normalize_signature(p, [(m, 1) for m in exps])


def signatures_up_to_order(p: int, max_order: int) -> list[PrimePowerSignature]:
    """Every p-group of order ``<= max_order`` (order >= p), by order then parts."""
    out = []
    e = 1
    while p**e <= max_order:
        out.extend(sorted((_as_signature(p, ex) for ex in _exponent_partitions(e)), key=lambda s: s.parts))
        e += 1
    return out


def signatures_by_endomorphism(p: int, max_log2: int) -> list[PrimePowerSignature]:
    """Every p-group whose endomorphism ring has at most ``2^max_log2`` elements."""
    out = []
    e = 1
    limit = 2**max_log2
    # |End(G)| >= |G|
    while p**e <= limit:
        for ex in _exponent_partitions(e):
            sig = _as_signature(p, ex)
            if sig.endomorphism_space() <= limit:
                out.append(sig)
        e += 1
    return sorted(out, key=lambda s: (s.order, s.parts))


def _candidate_family(limit: int, floor: int = 0) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
    found: list[tuple[int, tuple[tuple[int, int], ...]]] = []

    def rec(start: int, parts: list[tuple[int, int]], prod: int) -> None:
        m = start
        while prod * (m + 1) <= limit:
            lam = 1
            while prod * (m + 1) ** lam <= limit:
                nxt = parts + [(m, lam)]
                size = prod * (m + 1) ** lam
                if size > floor:
                    found.append((size, tuple(nxt)))
                rec(m + 1, nxt, size)
                lam += 1
            m += 1

    rec(1, [], 1)
    found.sort()
    return found


def signatures_by_candidates(limit: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Parts ``((m, l), ...)`` with ``prod (m+1)^l <= limit``, lazily, by candidate space then parts.

    Generated in doubling bands so a consumer can stop early; the full family
    is large (single blocks alone run up to ``m = limit - 1``).
    """
    lo, hi = 0, 2
    while lo < limit:
        hi = min(hi, limit)
        for _, parts in _candidate_family(hi, lo):
            yield parts
        lo, hi = hi, 2 * hi


def candidate_family_size(limit: int) -> tuple[int, int]:
    """``(number of signatures, total candidates)`` for :func:`signatures_by_candidates`."""

    @lru_cache(maxsize=None)
    def count(start: int, budget: int) -> tuple[int, int]:
        # signatures with exponents >= start and candidate space <= budget,
        # weighted by that candidate space; floor division composes
        sigs = total = 0
        m = start
        while m + 1 <= budget:
            size = m + 1
            while size <= budget:
                sub_sigs, sub_total = count(m + 1, budget // size)
                sigs += 1 + sub_sigs
                total += size * (1 + sub_total)
                size *= m + 1
            m += 1
        return sigs, total

    return count(1, limit)


def composite_specs(max_order: int) -> list[CompositeGroupSpec]:
    """Sorted multisets of moduli >= 2 with product ``<= max_order`` (trivial group included)."""
    out: list[CompositeGroupSpec] = [CompositeGroupSpec((1,))]

    def rec(start: int, mods: list[int], prod: int) -> None:
        for m in range(start, max_order // prod + 1):
            nxt = mods + [m]
            out.append(CompositeGroupSpec(tuple(nxt)))
            rec(m, nxt, prod * m)

    rec(2, [], 1)
    return sorted(out, key=lambda s: (s.order, s.moduli))


def prime_count(spec: CompositeGroupSpec) -> int:
    return len(spec.primes())


# ---------------------------------------------------------------------------
# time-bounded sweeps over the candidate-space family


@dataclass
class Coverage:
    """Outcome of a sweep that may stop at a deadline before finishing its family."""

    family_size: int
    processed: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    largest_done: int = 0  # candidate space of the last signature processed

    @property
    def complete(self) -> bool:
        return self.processed == self.family_size

    @property
    def ok(self) -> bool:
        return self.complete and not self.failures

    def summary(self) -> str:
        return (
            f"{self.processed}/{self.family_size} units in {self.elapsed:.2f}s, "
            f"candidate spaces <= {self.largest_done} done, {len(self.failures)} failures"
        )


def _sweep(units: Iterator, family_size: int, run, deadline: float) -> Coverage:

    cov = Coverage(family_size)
    start = time.perf_counter()
    for key, size in units:
        if time.perf_counter() - start > deadline:
            break
        if not run(key):
            cov.failures.append(key)
        cov.processed += 1
        cov.largest_done = size
    cov.elapsed = time.perf_counter() - start
    return cov


def _sized(parts: tuple[tuple[int, int], ...]) -> int:
    out = 1
    for m, lam in parts:
        out *= (m + 1) ** lam
    return out


def conditions_sweep(limit: int = 10**5, deadline: float = 10.0, p: int = 2) -> Coverage:
    """Conditions 1, 2, 3 on every bounded profile of every signature with candidate space ``<= limit``."""
    units = ((parts, _sized(parts)) for parts in signatures_by_candidates(limit))
    return _sweep(
        units,
        candidate_family_size(limit)[0],
        lambda parts: check_conditions(PrimePowerSignature(p, parts), cap=limit).ok,
        deadline,
    )


def fiber_sum_sweep(limit: int = 10**5, primes: tuple[int, ...] = (2, 3, 5), deadline: float = 10.0) -> Coverage:
    """Fibre sums over Y(G) against the closed form, one unit per (signature, prime)."""
    units = (((p, parts), _sized(parts)) for parts in signatures_by_candidates(limit) for p in primes)
    return _sweep(
        units,
        candidate_family_size(limit)[0] * len(primes),
        lambda key: check_fiber_sum(PrimePowerSignature(key[0], key[1]), cap=limit).ok,
        deadline,
    )
