import pytest

from khall.laurent import LaurentPoly
from khall.ring import Ring, preset


@pytest.fixture(autouse=True)
def _fixed_order(monkeypatch):
    # tests pass explicit orders; a stray environment value must not leak in
    monkeypatch.delenv("KHALL_ORDER", raising=False)


@pytest.fixture
def free2():
    return Ring(["u", "q"], label="free")


@pytest.fixture
def p2():
    return preset("p2")


def var(ring, name):
    return LaurentPoly.variable(ring, name)


def const(ring, c):
    return LaurentPoly.constant(ring, c)
