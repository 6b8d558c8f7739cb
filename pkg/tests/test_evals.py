from __future__ import annotations

from evals.run_evals import QUICK, _context, _load_criteria


def entry(suite: str) -> dict:
    return next(e for e in _load_criteria()["suites"] if e["suite"] == suite)


def test_weitzenbock_acceptance_refines_eight_to_thirty_two():
    ctx = _context(entry("weitzenbock"), quick=False)
    assert ctx.sizes == (8, 16, 32)
    assert ctx.weitzenbock_dim == 4


def test_bounds_acceptance_uses_ten_starts_on_eight_to_the_fourth():
    ctx = _context(entry("bounds"), quick=False)
    assert (ctx.size, ctx.starts) == (8, 10)


def test_quick_profile_shrinks_the_run():
    bounds = _context(entry("bounds"), quick=True)
    assert (bounds.size, bounds.starts) == (QUICK["size"], QUICK["starts"])
    weitzenbock = _context(entry("weitzenbock"), quick=True)
    assert weitzenbock.sizes == (8, 16, 32)
    assert weitzenbock.weitzenbock_dim == 3
