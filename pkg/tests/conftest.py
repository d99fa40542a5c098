import os
import sys
from fractions import Fraction

import hypothesis
import hypothesis.strategies as strat
import pytest

# プロジェクトルートを Python パスに追加
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.models.cone import ConeVec, DiscreteCone  # noqa: E402
from src.models.extreal import INF, ExtNonneg  # noqa: E402

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.load_profile("default")


def rationals(max_num: int = 20, max_den: int = 6):
    return strat.builds(Fraction, strat.integers(0, max_num), strat.integers(1, max_den))


def extended(max_num: int = 20, max_den: int = 6):
    """[0,∞] の値 (+∞ をときどき含む)"""
    return strat.one_of(rationals(max_num, max_den).map(ExtNonneg), strat.just(INF))


def cone_vecs(n: int):
    return strat.lists(extended(), min_size=n, max_size=n).map(ConeVec)


@pytest.fixture
def uniform3() -> DiscreteCone:
    return DiscreteCone.uniform(3)


@pytest.fixture
def half_half() -> DiscreteCone:
    return DiscreteCone([Fraction(1, 2), Fraction(1, 2)])
