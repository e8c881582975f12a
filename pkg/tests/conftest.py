import pytest

from bttrep.arithmetic.ideals import PrimePlace, place_by_label
from bttrep.arithmetic.numfield import QuadraticField
from bttrep.config import BttConfig
from bttrep.factory import BttStudioFactory
from bttrep.studio.studio import BttStudio


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    """Keep BTTREP_ variables and .env files of the host out of the tests"""
    monkeypatch.chdir(tmp_path)
    for name in ("CLASS_DATA_PATH", "LOG_LEVEL", "BFS_DEPTH_BOUND", "GROUP_ORDER_BOUND"):
        monkeypatch.delenv(f"BTTREP_{name}", raising=False)


@pytest.fixture()
def Q() -> QuadraticField:
    """The rational field"""
    return QuadraticField.rationals()


@pytest.fixture()
def K5() -> QuadraticField:
    """Q(sqrt(-5)), class number 2"""
    return QuadraticField(-5)


@pytest.fixture()
def Ki() -> QuadraticField:
    """The Gaussian field Q(i)"""
    return QuadraticField(-1)


@pytest.fixture()
def q2(Q: QuadraticField) -> PrimePlace:
    """The place 2 of Q"""
    return place_by_label(Q, "2")


@pytest.fixture()
def q3(Q: QuadraticField) -> PrimePlace:
    """The place 3 of Q"""
    return place_by_label(Q, "3")


@pytest.fixture()
def P2(K5: QuadraticField) -> PrimePlace:
    """The ramified place over 2 in Q(sqrt(-5))"""
    return place_by_label(K5, "2_1")


@pytest.fixture()
def studio() -> BttStudio:
    """A studio with the default configuration"""
    return BttStudioFactory.create(BttConfig())
