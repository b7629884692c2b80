"""Acceptance suite: the ten verification criteria at full settings.

Each criterion prints one PASS/FAIL line (collected into the terminal
summary so it shows without ``-s``); failing parts are listed below it.
"""

import pytest

from fblsec.verify import CHECKS, DEFAULT_SEED, timed

ACCEPTANCE_LINES: list = []


def _line(idx, r):
    status = "PASS" if r.passed else "FAIL"
    head = f"A{idx:<2d} {status}  {r.name:<34s} measured={r.measured:.6g} bound={r.bound:.6g} ({r.seconds:.1f}s)"
    bad = [f"      - {p.name}: measured={p.measured:.6g} bound={p.bound:.6g}" for p in r.parts if not p.passed]
    return "\n".join([head, *bad])


@pytest.mark.slow
@pytest.mark.parametrize("idx,check", list(enumerate(CHECKS, 1)), ids=[c.__name__ for c in CHECKS])
def test_criterion(idx, check):
    r = timed(check, "full", DEFAULT_SEED)
    line = _line(idx, r)
    ACCEPTANCE_LINES.append((idx, line))
    print(line)
    assert r.passed, line
