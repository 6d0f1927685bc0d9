from __future__ import annotations

import pytest

from barnes_zeta.context import EvalContext


@pytest.fixture(scope="session")
def ctx() -> EvalContext:
    return EvalContext()


def pytest_collection_modifyitems(config, items):
    if "slow" in (config.getoption("-m") or ""):
        return
    skip_slow = pytest.mark.skip(reason="slow series check, run with -m slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
