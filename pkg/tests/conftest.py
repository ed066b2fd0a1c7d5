from __future__ import annotations

from hypothesis import assume
from hypothesis import strategies as st

from cqi.groups import PrimePowerSignature, normalize_signature

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@st.composite
def signatures(draw, primes=(2, 3, 5), max_blocks=3, max_exp=5, max_mult=2, max_candidates=None):
    p = draw(st.sampled_from(primes))
    exps = draw(st.lists(st.integers(1, max_exp), min_size=1, max_size=max_blocks, unique=True))
    parts = [(m, draw(st.integers(1, max_mult))) for m in exps]
    sig = normalize_signature(p, parts)
    if max_candidates is not None:
        assume(sig.candidate_space <= max_candidates)
    return sig


def small_group(sig: PrimePowerSignature, limit: int = 256) -> bool:
    return sig.order <= limit
