"""Finite abelian groups given as direct sums of cyclic factors.

Two descriptions are supported:

* :class:`PrimePowerSignature` for a p-group ``Z(p^m_1)^l_1 + ... + Z(p^m_n)^l_n``
  with strictly increasing exponents ``m_i``;
* :class:`CompositeGroupSpec` for an arbitrary ``Z(m_1) + ... + Z(m_n)``.

Elements are residue vectors over the *expanded* coordinates, i.e. a block
``Z(p^m)^l`` contributes ``l`` coordinates each taken modulo ``p^m``.

Brute-force work (element and subgroup enumeration) goes through
:class:`ProductGroup`, which encodes elements as integers in mixed radix with
the first coordinate most significant, so integer order equals lexicographic
order of coordinate tuples.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from cqi.errors import CapExceeded, NonPrime, OutOfRange

DEFAULT_ENUM_CAP = 2**20

# residues are machine integers; p^M must stay below this
_MAX_MODULUS = 2**63


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division, ``{prime: exponent}``."""
    if n < 1:
        raise OutOfRange(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi_prime_power(p: int, k: int) -> int:
    if k < 0:
        raise OutOfRange(f"negative exponent {k}")
    if k == 0:
        return 1
    return p ** (k - 1) * (p - 1)


def valuation(x: int, p: int, r: int) -> int:
    """p-adic valuation of ``x`` in ``Z(p^r)``, with the zero residue mapped to ``r``."""
    if not 0 <= x < p**r:
        raise OutOfRange(f"{x} is not a residue modulo {p}^{r}")
    if x == 0:
        return r
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


def valuations_array(xs: np.ndarray, p: int, r: np.ndarray | int) -> np.ndarray:
    """Vectorised :func:`valuation`; ``r`` broadcasts against ``xs``."""
    xs = np.asarray(xs, dtype=np.int64)
    r_arr = np.broadcast_to(np.asarray(r, dtype=np.int64), xs.shape)
    out = np.zeros(xs.shape, dtype=np.int64)
    work = xs.copy()
    live = work != 0
    while live.any():
        div = live & (work % p == 0)
        if not div.any():
            break
        out[div] += 1
        work[div] //= p
        live = div
    zero = xs == 0
    out[zero] = r_arr[zero]
    return out


# ---------------------------------------------------------------------------
# signatures and specs


@dataclass(frozen=True)
class PrimePowerSignature:
    """A p-group as ``p`` plus ``(exponent, multiplicity)`` parts.

    Construct through :func:`normalize_signature` unless the parts are
    already sorted and merged; the constructor only validates.
    """

    p: int
    parts: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise NonPrime(f"{self.p} is not prime")
        if not self.parts:
            raise OutOfRange("signature has no parts")
        prev = 0
        for m, lam in self.parts:
            if m <= prev:
                raise OutOfRange(f"exponents must be positive and strictly increasing: {self.parts}")
            if lam < 1:
                raise OutOfRange(f"multiplicity must be positive: {self.parts}")
            prev = m

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.parts)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(lam for _, lam in self.parts)

    @property
    def n_blocks(self) -> int:
        return len(self.parts)

    @cached_property
    def expanded(self) -> tuple[int, ...]:
        """Exponent ``M_i`` of every expanded coordinate."""
        return tuple(m for m, lam in self.parts for _ in range(lam))

    @property
    def length(self) -> int:
        return len(self.expanded)

    @cached_property
    def prefix_sums(self) -> tuple[int, ...]:
        """``|lambda|_j`` for ``j = 1..n``."""
        out, acc = [], 0
        for lam in self.multiplicities:
            acc += lam
            out.append(acc)
        return tuple(out)

    @cached_property
    def block_slices(self) -> tuple[slice, ...]:
        starts = (0,) + self.prefix_sums[:-1]
        return tuple(slice(a, b) for a, b in zip(starts, self.prefix_sums))

    @property
    def log_order(self) -> int:
        return sum(m * lam for m, lam in self.parts)

    @property
    def order(self) -> int:
        return self.p**self.log_order

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**m for m in self.expanded)

    @property
    def is_homocyclic(self) -> bool:
        return len(self.parts) == 1

    @property
    def candidate_space(self) -> int:
        """Number of profiles ``delta`` bounded by the exponents, ``prod (m_i+1)^l_i``."""
        return math.prod((m + 1) ** lam for m, lam in self.parts)

    def endomorphism_space(self) -> int:
        """``|End(G)| = prod_{l,i} p^min(M_l, M_i)``."""
        e = self.expanded
        return self.p ** sum(min(a, b) for a in e for b in e)

    def group(self) -> ProductGroup:
        return ProductGroup(self.moduli)

    def text(self) -> str:
        return f"p={self.p}: " + "+".join(f"{self.p**m}^{lam}" for m, lam in self.parts)

    def to_json(self) -> dict:
        return {"p": self.p, "parts": [[m, lam] for m, lam in self.parts]}


def normalize_signature(p: int, raw: Iterable[Sequence[int]]) -> PrimePowerSignature:
    """Sort parts by exponent, merge equal exponents and drop zero exponents."""
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    merged: dict[int, int] = {}
    for m, lam in raw:
        if m < 0 or lam < 1:
            raise OutOfRange(f"bad part ({m}, {lam})")
        if m == 0:
            continue
        merged[m] = merged.get(m, 0) + lam
    if not merged:
        raise OutOfRange("signature is empty after normalization")
    return PrimePowerSignature(p, tuple(sorted(merged.items())))


@dataclass(frozen=True)
class CompositeGroupSpec:
    """``Z(m_1) + ... + Z(m_n)``; trivial factors are allowed."""

    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        for m in self.moduli:
            if m < 1:
                raise OutOfRange(f"modulus must be >= 1, got {m}")

    def normalized(self) -> CompositeGroupSpec:
        return CompositeGroupSpec(tuple(sorted(m for m in self.moduli if m > 1)))

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    def primes(self) -> list[int]:
        return sorted(factorize(self.order)) if self.order > 1 else []

    def group(self) -> ProductGroup:
        return ProductGroup(self.normalized().moduli)

    def text(self) -> str:
        mods = self.normalized().moduli or (1,)
        return "+".join(f"Z({m})" for m in mods)


def crt_decompose(spec: CompositeGroupSpec) -> dict[int, PrimePowerSignature]:
    """Split a composite spec into its p-components."""
    raw: dict[int, list[tuple[int, int]]] = {}
    for m in spec.moduli:
        for p, e in factorize(m).items():
            raw.setdefault(p, []).append((e, 1))
    return {p: normalize_signature(p, parts) for p, parts in sorted(raw.items())}


# ---------------------------------------------------------------------------
# elements, cyclic subgroups, profiles


@dataclass(frozen=True, order=True)
class GroupElement:
    coords: tuple[int, ...]

    def check(self, sig: PrimePowerSignature) -> None:
        if len(self.coords) != sig.length:
            raise OutOfRange(f"element has {len(self.coords)} coordinates, group has {sig.length}")
        for x, q in zip(self.coords, sig.moduli):
            if not 0 <= x < q:
                raise OutOfRange(f"coordinate {x} outside Z({q})")

    def alpha(self, sig: PrimePowerSignature) -> tuple[int, ...]:
        return tuple(valuation(x, sig.p, M) for x, M in zip(self.coords, sig.expanded))

    def order_exponent(self, sig: PrimePowerSignature) -> int:
        return element_order_exponent(self, sig)

    def scale(self, k: int, sig: PrimePowerSignature) -> GroupElement:
        return GroupElement(tuple((k * x) % q for x, q in zip(self.coords, sig.moduli)))

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)


def element_order_exponent(g: GroupElement, sig: PrimePowerSignature) -> int:
    g.check(sig)
    return max((M - a for M, a in zip(sig.expanded, g.alpha(sig))), default=0)


@dataclass(frozen=True)
class DeltaProfile:
    """Per-block vector ``delta = (M_i - alpha_i)``."""

    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_flat(cls, flat: Sequence[int], sig: PrimePowerSignature) -> DeltaProfile:
        if len(flat) != sig.length:
            raise OutOfRange(f"profile length {len(flat)} != {sig.length}")
        flat = tuple(int(d) for d in flat)
        return cls(tuple(flat[s] for s in sig.block_slices))

    @property
    def flat(self) -> tuple[int, ...]:
        return tuple(d for b in self.blocks for d in b)

    @property
    def norm(self) -> int:
        return max(self.flat, default=0)

    @property
    def block_norms(self) -> tuple[int, ...]:
        return tuple(max(b) for b in self.blocks)

    def check(self, sig: PrimePowerSignature) -> None:
        if tuple(len(b) for b in self.blocks) != sig.multiplicities:
            raise OutOfRange(f"block shape does not match {sig.parts}")
        for b, m in zip(self.blocks, sig.exponents):
            if any(d < 0 or d > m for d in b):
                raise OutOfRange(f"profile block {b} not bounded by {m}")


@dataclass(frozen=True)
class CyclicSubgroupDescriptor:
    """A cyclic subgroup by its lexicographically smallest generator."""

    generator: GroupElement
    alpha: tuple[int, ...]
    u: int

    @classmethod
    def from_canonical(cls, gen: GroupElement, sig: PrimePowerSignature) -> CyclicSubgroupDescriptor:
        alpha = gen.alpha(sig)
        u = max((M - a for M, a in zip(sig.expanded, alpha)), default=0)
        return cls(gen, alpha, u)

    @property
    def order_exponent(self) -> int:
        return self.u


def valuation_profile(H: CyclicSubgroupDescriptor, sig: PrimePowerSignature) -> DeltaProfile:
    return DeltaProfile.from_flat([M - a for M, a in zip(sig.expanded, H.alpha)], sig)


def cyclic_subgroup(g: GroupElement, sig: PrimePowerSignature, cap: int = DEFAULT_ENUM_CAP) -> CyclicSubgroupDescriptor:
    """Descriptor of ``<g>``; canonicalises by scanning the unit multiples of ``g``."""
    u = element_order_exponent(g, sig)
    o = sig.p**u
    if o > cap:
        raise CapExceeded("generator scan", o, cap)
    grp = sig.group()
    ts = _units(o)
    gens = (ts[:, None] * np.asarray(g.coords, dtype=np.int64)[None, :]) % grp.moduli_arr
    best = gens[np.argmin(grp.encode(gens))] if len(gens) else np.asarray(g.coords)
    return CyclicSubgroupDescriptor.from_canonical(GroupElement(tuple(int(x) for x in best)), sig)


def enumerate_cyclic_subgroups(sig: PrimePowerSignature, cap: int = DEFAULT_ENUM_CAP) -> list[CyclicSubgroupDescriptor]:
    """Every cyclic subgroup exactly once (trivial included), sorted by canonical generator."""
    grp = sig.group()
    if grp.order > cap:
        raise CapExceeded("cyclic subgroup enumeration", grp.order, cap)
    out = []
    for row in grp.decode(grp.canonical_generators()):
        gen = GroupElement(tuple(int(x) for x in row))
        out.append(CyclicSubgroupDescriptor.from_canonical(gen, sig))
    return out


def count_cyclic_subgroups(sig: PrimePowerSignature) -> int:
    """``c(p)`` from the element-order census; no enumeration."""
    p, exps = sig.p, sig.expanded

    def dividing(k: int) -> int:
        # elements of order dividing p^k
        return p ** sum(min(k, M) for M in exps)

    total = 1  # trivial subgroup
    for k in range(1, max(exps) + 1):
        exact = dividing(k) - dividing(k - 1)
        q, r = divmod(exact, euler_phi_prime_power(p, k))
        assert r == 0
        total += q
    return total


# ---------------------------------------------------------------------------
# brute-force backend


_UNIT_CACHE: dict[int, np.ndarray] = {}


def _units(o: int) -> np.ndarray:
    """Residues ``t`` in ``[1, o)`` coprime to ``o`` (``[1]`` for ``o = 1``)."""
    if o not in _UNIT_CACHE:
        if o == 1:
            ts = np.ones(1, dtype=np.int64)
        else:
            ts = np.arange(1, o, dtype=np.int64)
            ts = ts[np.gcd(ts, o) == 1]
        if len(_UNIT_CACHE) > 64:
            _UNIT_CACHE.clear()
        _UNIT_CACHE[o] = ts
    return _UNIT_CACHE[o]


@dataclass(frozen=True)
class ProductGroup:
    """``Z(q_1) + ... + Z(q_N)`` with integer-encoded elements."""

    moduli: tuple[int, ...]
    moduli_arr: np.ndarray = field(init=False, repr=False, compare=False)
    strides: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if any(q < 1 or q >= _MAX_MODULUS for q in self.moduli):
            raise OutOfRange(f"moduli {self.moduli} do not fit in 64 bits")
        mods = np.asarray(self.moduli, dtype=np.int64).reshape(-1)
        strides = np.ones(len(mods), dtype=np.int64)
        for i in range(len(mods) - 2, -1, -1):
            strides[i] = strides[i + 1] * mods[i + 1]
        object.__setattr__(self, "moduli_arr", mods)
        object.__setattr__(self, "strides", strides)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def encode(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(coords, dtype=np.int64) @ self.strides if self.rank else np.zeros(len(coords), dtype=np.int64)

    def decode(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[:, None] // self.strides[None, :]) % self.moduli_arr[None, :]

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + b) % self.moduli_arr

    def element_orders(self, coords: np.ndarray) -> np.ndarray:
        coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
        per = self.moduli_arr[None, :] // np.gcd(coords, self.moduli_arr[None, :])
        return np.lcm.reduce(per, axis=1) if self.rank else np.ones(len(coords), dtype=np.int64)

    def torsion(self, n: int) -> np.ndarray:
        """All elements killed by ``n`` as a coordinate array."""
        steps = [q // math.gcd(q, n) for q in self.moduli]
        axes = [np.arange(0, q, s, dtype=np.int64) for q, s in zip(self.moduli, steps)]
        if not axes:
            return np.zeros((1, 0), dtype=np.int64)
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in grid], axis=1)

    def torsion_generators(self, n: int) -> np.ndarray:
        """Generators ``(q_i / gcd(q_i, n)) e_i`` of the ``n``-torsion, zeros omitted."""
        rows = []
        for i, q in enumerate(self.moduli):
            s = q // math.gcd(q, n)
            if s < q:
                row = np.zeros(self.rank, dtype=np.int64)
                row[i] = s
                rows.append(row)
        return np.asarray(rows, dtype=np.int64).reshape(-1, self.rank)

    def generated_subgroup(self, gens: np.ndarray) -> np.ndarray:
        """Boolean membership mask of the subgroup generated by ``gens``.

        Each generator is folded in by doubling: ``B <- B u (B + 2^t g)``
        covers ``B + <g>`` after ``ceil(log2 ord g)`` rounds.
        """
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        members = np.zeros((1, self.rank), dtype=np.int64)
        gens = np.asarray(gens, dtype=np.int64).reshape(-1, self.rank)
        for g in gens:
            if mask[int(self.encode(g[None, :])[0])]:
                continue
            o = int(self.element_orders(g)[0])
            step = g.copy()
            span = 1
            while span < o:
                shifted = self.add(members, step[None, :])
                idx = self.encode(shifted)
                fresh = ~mask[idx]
                if fresh.any():
                    # translation is injective, so fresh indices are distinct
                    mask[idx[fresh]] = True
                    members = np.concatenate([members, shifted[fresh]])
                step = (2 * step) % self.moduli_arr
                span *= 2
        return mask

    def canonical_generators(self) -> np.ndarray:
        """Encoded lexicographically smallest generator of every cyclic subgroup, ascending."""
        seen = np.zeros(self.order, dtype=bool)
        found = []
        start, chunk = 0, 4096
        while start < self.order:
            window = seen[start : start + chunk]
            free = np.flatnonzero(~window)
            if not len(free):
                start += chunk
                continue
            idx = start + int(free[0])
            found.append(idx)
            g = self.decode(np.array([idx]))[0]
            o = int(self.element_orders(g)[0])
            mult = (_units(o)[:, None] * g[None, :]) % self.moduli_arr
            seen[self.encode(mult)] = True
            start = idx + 1
        return np.asarray(found, dtype=np.int64)


def iter_elements(sig: PrimePowerSignature) -> Iterator[GroupElement]:
    """All elements in lexicographic order (desk scale only)."""
    for coords in itertools.product(*(range(q) for q in sig.moduli)):
        yield GroupElement(coords)
