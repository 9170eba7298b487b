"""Acceptance criteria 1-13, each checked across every parameter set.

The shared checks live in :mod:`metacyc.verify`; each parameter set is run
once and the results are grouped by criterion here.
"""

from functools import cache

import pytest

from metacyc.lattices import GammaParams
from metacyc.verify import PARAMETER_SETS, run_suite

CRITERIA = list(range(1, 14))

# criterion 13 does not depend on (p, r); it is run with the first set only
PARAM_FREE = {13}


@cache
def suite_results(p: int, r: int):
    return run_suite(GammaParams(p, r), "all", seed=0)


def results_for(criterion: int):
    sets = PARAMETER_SETS[:1] if criterion in PARAM_FREE else PARAMETER_SETS
    for p, r in sets:
        for res in suite_results(p, r):
            if res.criterion == criterion:
                yield (p, r), res


@pytest.mark.parametrize("criterion", CRITERIA)
def test_criterion(criterion):
    found = list(results_for(criterion))
    assert found, f"no check registered for criterion {criterion}"
    failed = [f"(p={p}, r={r}) {res.name}: {res.detail or res.computed}" for (p, r), res in found if not res.passed]
    assert not failed, "\n".join(failed)
    if criterion == 1:
        total = sum(res.seconds for _, res in found)
        assert total < 60, f"classification took {total:.1f}s"
