from __future__ import annotations

import pytest

from revsoc.setalg import finite_cofinite_algebra, powerset_algebra
from revsoc.society import canonical_society, finite_society


@pytest.fixture(scope="session")
def fc_society():
    return canonical_society(finite_cofinite_algebra())


@pytest.fixture(scope="session", params=[2, 3])
def small_society(request):
    return finite_society(request.param)


@pytest.fixture(scope="session")
def p3():
    return powerset_algebra(range(3))
