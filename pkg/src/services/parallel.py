import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from src.config import THREADS

# ロガーの設定
logger = logging.getLogger(__name__)

C = TypeVar("C")
R = TypeVar("R")


def run_cases(fn: Callable[[C], R], cases: Sequence[C], threads: Optional[int] = None) -> List[R]:
    """
    純粋関数をケース列に適用する (結果はケースの順序どおり)

    Args:
        fn: 各ケースに適用する関数
        cases: ケースの列
        threads: ワーカー数 (省略時は THREADS)

    Returns:
        List[R]: ケース順の結果
    """
    threads = THREADS if threads is None else threads
    cases = list(cases)
    if threads <= 1 or len(cases) <= 1:
        return [fn(case) for case in cases]
    workers = min(threads, len(cases))
    logger.debug(f"{len(cases)} 件を {workers} ワーカーで実行します")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, cases))
