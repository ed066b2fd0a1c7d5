"""Slow pure-Python references, independent of the package's numpy paths."""

from __future__ import annotations

import itertools
import math


def elements(moduli):
    return list(itertools.product(*(range(q) for q in moduli)))


def add(a, b, moduli):
    return tuple((x + y) % q for x, y, q in zip(a, b, moduli))


def span(g, moduli):
    """<g> by repeated addition."""
    zero = tuple(0 for _ in moduli)
    out = {zero}
    cur = g
    while cur not in out:
        out.add(cur)
        cur = add(cur, g, moduli)
    return frozenset(out)


def order(g, moduli):
    return len(span(g, moduli))


def cyclic_subgroups(moduli):
    return {span(g, moduli) for g in elements(moduli)}


def endomorphisms(moduli):
    """Every basis-image table: column l is any element killed by q_l."""
    cols = []
    for q in moduli:
        cols.append([y for y in elements(moduli) if all((q * c) % m == 0 for c, m in zip(y, moduli))])
    return itertools.product(*cols)


def apply(table, h, moduli):
    acc = [0] * len(moduli)
    for hl, col in zip(h, table):
        for i, c in enumerate(col):
            acc[i] += hl * c
    return tuple(a % q for a, q in zip(acc, moduli))


def x_members(moduli):
    """Cyclic subgroups carrying a non-extendable hom, straight from the definition.

    A hom ``<h> -> G`` is fixed by the image ``y`` of ``h`` with ``ord(h) y = 0``.
    """
    tables = list(endomorphisms(moduli))
    out = set()
    for H in cyclic_subgroups(moduli):
        h = max(H, key=lambda g: order(g, moduli))
        o = order(h, moduli)
        targets = {y for y in elements(moduli) if all((o * c) % m == 0 for c, m in zip(y, moduli))}
        reached = {apply(F, h, moduli) for F in tables}
        if targets - reached:
            out.add(H)
    return out


def phi(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
