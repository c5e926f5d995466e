import pytest

from tasteauth.bank import CATEGORIES, ImageBank
from tasteauth.enrollment import Portfolio


def build_bank(n: int = 300, activate: bool = True) -> ImageBank:
    bank = ImageBank()
    for i in range(n):
        bank.ingest_image(
            uri=f"https://img.example/{i:04d}.jpg",
            category=CATEGORIES[i % len(CATEGORIES)],
            source="fixture",
        )
    if activate:
        bank.activate_all()
    return bank


def eligible_values(n: int = 72) -> list[int]:
    """Rating values whose partition has a wide key/decoy gap at 20/60 split.

    For n=72: 15 top ratings of 9..10, a 13-image middle band at 6, and 44 low
    ratings of 1..4, so min key - max decoy = 9 - 4 = 5.
    """
    import math

    key_n = math.ceil(0.2 * n)
    decoy_n = min(math.ceil(0.6 * n), n - key_n)
    buffer_n = n - key_n - decoy_n
    values = [10 if i % 2 else 9 for i in range(key_n)]
    values += [6] * buffer_n
    values += [(i % 4) + 1 for i in range(decoy_n)]
    return values


def eligible_portfolio(user_id: str = "u1", n: int = 72) -> Portfolio:
    values = eligible_values(n)
    return Portfolio.from_values(
        user_id, {f"img{i:04d}": v for i, v in enumerate(values)}
    )


class FakeClock:
    def __init__(self, start: float = 1_700_000_000.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


@pytest.fixture
def bank():
    return build_bank()


@pytest.fixture
def clock():
    return FakeClock()
