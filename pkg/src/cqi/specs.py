"""Parsing group specs from text.

Accepted forms (whitespace is ignored between tokens):

``Z(6)+Z(12)``
    composite group, one ``Z(m)`` per cyclic factor, ``m >= 1``.
``p=2: 4^1+32^1``
    p-group; each term is ``q^l`` with ``q`` a positive power of ``p`` and
    ``l`` the multiplicity of ``Z(q)``. ``^l`` may be omitted (``l = 1``).
``{"p": 2, "parts": [[2, 1], [5, 1]]}``
    JSON p-group, parts are ``[exponent, multiplicity]``.
``{"moduli": [6, 12]}``
    JSON composite group.

Text starting with ``{`` is always read as JSON.
"""

from __future__ import annotations

import json
import re

from cqi.errors import CQIError, ParseError
from cqi.groups import CompositeGroupSpec, PrimePowerSignature, is_prime, normalize_signature

GroupSpec = PrimePowerSignature | CompositeGroupSpec

_INT = re.compile(r"\s*(\d+)")
_WS = re.compile(r"\s*")


class _Scanner:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        self.pos = _WS.match(self.text, self.pos).end()

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, lit: str) -> bool:
        self.skip()
        return self.text.startswith(lit, self.pos)

    def expect(self, lit: str) -> None:
        self.skip()
        if not self.text.startswith(lit, self.pos):
            raise ParseError(f"expected {lit!r}", self.text, self.pos)
        self.pos += len(lit)

    def integer(self) -> tuple[int, int]:
        m = _INT.match(self.text, self.pos)
        if not m:
            self.skip()
            raise ParseError("expected an integer", self.text, self.pos)
        self.pos = m.end()
        return int(m.group(1)), m.start(1)


def _prime_power_exponent(q: int, p: int) -> int | None:
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return e if q == 1 and e > 0 else None


def _parse_composite(sc: _Scanner) -> CompositeGroupSpec:
    mods = []
    while True:
        sc.expect("Z(")
        m, where = sc.integer()
        if m < 1:
            raise ParseError("modulus must be >= 1", sc.text, where)
        sc.expect(")")
        mods.append(m)
        if sc.at_end():
            return CompositeGroupSpec(tuple(mods))
        sc.expect("+")


def _parse_primary(sc: _Scanner) -> PrimePowerSignature:
    sc.expect("p")
    sc.expect("=")
    p, where = sc.integer()
    if not is_prime(p):
        raise ParseError(f"{p} is not prime", sc.text, where)
    sc.expect(":")
    parts = []
    while True:
        q, qpos = sc.integer()
        lam = 1
        if sc.peek("^"):
            sc.expect("^")
            lam, lpos = sc.integer()
            if lam < 1:
                raise ParseError("multiplicity must be >= 1", sc.text, lpos)
        e = _prime_power_exponent(q, p)
        if e is None:
            raise ParseError(f"{q} is not a positive power of {p}", sc.text, qpos)
        parts.append((e, lam))
        if sc.at_end():
            break
        sc.expect("+")
    try:
        return normalize_signature(p, parts)
    except CQIError as exc:
        raise ParseError(str(exc), sc.text, where) from exc


def _parse_json(text: str) -> GroupSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, text, exc.pos) from exc
    try:
        if isinstance(obj, dict) and "parts" in obj:
            return normalize_signature(int(obj["p"]), [(int(m), int(l)) for m, l in obj["parts"]])
        if isinstance(obj, dict) and "moduli" in obj:
            return CompositeGroupSpec(tuple(int(m) for m in obj["moduli"]))
    except (CQIError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid group object: {exc}", text, 0) from exc
    raise ParseError('JSON spec needs "p" and "parts", or "moduli"', text, 0)


def parse_spec(text: str) -> GroupSpec:
    stripped = text.strip()
    if stripped.startswith("{"):
        return _parse_json(stripped)
    sc = _Scanner(text)
    if sc.peek("Z"):
        return _parse_composite(sc)
    if sc.peek("p"):
        return _parse_primary(sc)
    sc.skip()
    raise ParseError("expected 'Z(' or 'p='", text, sc.pos)
