import os
from pathlib import Path

# 基本パス設定
BASE_DIR = Path(__file__).resolve().parent.parent
DATA_DIR = os.path.join(BASE_DIR, "data")

# 環境設定
ENVIRONMENT = os.environ.get("ENVIRONMENT", "development")

# レポート出力先
REPORT_DIR = os.environ.get("HYPERCONE_REPORT_DIR", os.path.join(DATA_DIR, "reports"))

# 並列実行設定（ワーカー数の上限）
THREADS = int(os.environ.get("HYPERCONE_THREADS", "4"))

# 探索予算
CHAIN_LENGTH = int(os.environ.get("HYPERCONE_CHAIN_LENGTH", "32"))
SAMPLED_CHAINS = int(os.environ.get("HYPERCONE_SAMPLED_CHAINS", "64"))
ITERATION_DEPTH = int(os.environ.get("HYPERCONE_ITERATION_DEPTH", "8"))
# 分岐半順序集合のサンプリングに使う添字の窓
WINDOW = int(os.environ.get("HYPERCONE_WINDOW", "6"))
# 拡張ステップの LP サイズ上限 (生成元数 + 次元)
LP_MAX_SIZE = int(os.environ.get("HYPERCONE_LP_MAX_SIZE", "12"))

# 許容誤差
TOL_EXACT_FLOAT = 1e-12
TOL_RELATIVE = 1e-9
TOL_MATRIX = 1e-8
TOL_LORENTZ = 1e-6
PSD_SLACK = 1e-10

# 乱数シード
DEFAULT_SEED = int(os.environ.get("HYPERCONE_SEED", "7"))

# レポート形式
SCHEMA_VERSION = 1

# 環境別設定
if ENVIRONMENT == "development":
    DEBUG = True
    # 開発用設定
else:
    DEBUG = False
    # 本番用設定

# アプリケーション設定
APP_NAME = "hypercone 順序・錐・双曲ノルム検証ツール"
APP_VERSION = "0.1.0"
