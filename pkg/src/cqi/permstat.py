"""Permutation codes and the maximum-jump statistic.

Permutations are 1-based one-line tuples ``(sigma(1), ..., sigma(n))``.
The code of ``sigma`` is ``tau_i = #{j >= i : sigma(j) < sigma(i)}``, a
bijection from S_n onto ``W_n = {tau : tau_i <= n - i}`` whose largest entry
equals ``max_i (sigma(i) - i)``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

from cqi.counting import count_classes_closed_form, enumerate_Y
from cqi.errors import NotAPermutation, NotInY, OutOfRange, TooLarge
from cqi.extension import condition3
from cqi.groups import DeltaProfile, PrimePowerSignature

BRUTE_MAX_N = 10


@dataclass(frozen=True)
class PermCode:
    n: int
    perm: tuple[int, ...]
    code: tuple[int, ...]
    max_jump: int


def max_jump(perm: Sequence[int]) -> int:
    return max(v - i for i, v in enumerate(perm, start=1))


def _check_perm(perm: Sequence[int]) -> tuple[int, ...]:
    perm = tuple(int(v) for v in perm)
    if not perm or sorted(perm) != list(range(1, len(perm) + 1)):
        raise NotAPermutation(f"{perm} is not a permutation of 1..{len(perm)}")
    return perm


def code_of(perm: Sequence[int]) -> PermCode:
    perm = _check_perm(perm)
    n = len(perm)
    code = tuple(sum(perm[j] < perm[i] for j in range(i, n)) for i in range(n))
    return PermCode(n, perm, code, max_jump(perm))


def perm_of(code: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`code_of`: position ``i`` takes the unused value with ``tau_i`` smaller unused values."""
    n = len(code)
    unused = list(range(1, n + 1))
    out = []
    for i, t in enumerate(code, start=1):
        if not 0 <= t <= n - i:
            raise OutOfRange(f"code entry {t} at position {i} outside [0, {n - i}]")
        out.append(unused.pop(t))
    return tuple(out)


def jump_sum_brute(n: int) -> int:
    if n > BRUTE_MAX_N:
        raise TooLarge(f"n={n} exceeds brute-force limit {BRUTE_MAX_N}")
    if n < 1:
        raise OutOfRange("n must be positive")
    return sum(max_jump(s) for s in itertools.permutations(range(1, n + 1)))


def jump_sum_closed(n: int) -> int:
    if n < 1:
        raise OutOfRange("n must be positive")
    return sum(k * math.factorial(k) * ((k + 1) ** (n - k) - k ** (n - k)) for k in range(1, n))


def staircase(n: int, p: int = 2) -> PrimePowerSignature:
    """``Z(p) + Z(p^2) + ... + Z(p^n)``."""
    return PrimePowerSignature(p, tuple((i, 1) for i in range(1, n + 1)))


def omega_of(delta: DeltaProfile | Sequence[int]) -> tuple[int, ...]:
    """Drop the entry at position ``||delta||`` (1-based) and prepend 0."""
    flat = delta.flat if isinstance(delta, DeltaProfile) else tuple(delta)
    n = len(flat)
    sig = staircase(n)
    prof = DeltaProfile.from_flat(flat, sig)
    prof.check(sig)
    if not condition3(prof, sig):
        raise NotInY(f"{flat} is not in Y for the staircase group of rank {n}")
    k = prof.norm
    return (0,) + flat[: k - 1] + flat[k:]


def in_w_prime(tau: Sequence[int]) -> bool:
    return all(0 <= t <= i for i, t in enumerate(tau))


@dataclass(frozen=True)
class TripleIdentity:
    n: int
    brute: int
    closed: int
    classes: int
    y_size: int

    @property
    def equal(self) -> bool:
        return self.brute == self.closed == self.classes == self.y_size

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "brute": self.brute,
            "closed": self.closed,
            "classes": self.classes,
            "y_size": self.y_size,
            "equal": self.equal,
        }


def verify_triple_identity(n: int) -> TripleIdentity:
    sig = staircase(n)
    return TripleIdentity(
        n=n,
        brute=jump_sum_brute(n),
        closed=jump_sum_closed(n),
        classes=count_classes_closed_form(sig).total,
        y_size=len(enumerate_Y(sig)),
    )
