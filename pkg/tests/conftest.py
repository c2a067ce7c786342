from __future__ import annotations

import pytest

from durfee_qmf.quantumset import RootVector


@pytest.fixture(scope="session")
def zeta45():
    return RootVector.parse("1/4,1/5")


@pytest.fixture(scope="session")
def zeta35():
    return RootVector.parse("1/3,1/5")


@pytest.fixture(scope="session")
def pi45(zeta45):
    from durfee_qmf.ranksum import solve_pi_dagger

    return solve_pi_dagger(zeta45)
