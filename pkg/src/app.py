import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from src.config import APP_NAME, APP_VERSION, DEBUG, DEFAULT_SEED, SAMPLED_CHAINS, THREADS
from src.data import storage
from src.data.parsers import document_parser as parsers
from src.models.errors import HyperconeError, ValidationError
from src.models.functional import DualVector
from src.models.poset import FinitePoset
from src.services import (chrono_service, closure_service, completion_service, extension_service,
                          geometry_service, lattice_service, lorentz_service, matrix_service, mcp_service,
                          norm_service, suite_service)

# ロガーの設定
logging.basicConfig(level=logging.DEBUG if DEBUG else logging.INFO,
                    format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)
logger = logging.getLogger(__name__)

# 終了コード
EXIT_PASS = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_INPUT_ERROR = 2

FAILING_VERDICTS = ("fail", "counterexample")

# 負の値 (-inf, -1/2 など) を取りうるオプション
SIGNED_OPTIONS = ("--p", "--s", "--lam", "--eta")


@dataclass
class RunConfig:
    """1回の実行の設定 (同じ設定なら同じレポートのバイト列になる)"""
    command: str
    seed: int = DEFAULT_SEED
    budget: int = SAMPLED_CHAINS
    tol: Optional[float] = None
    normalize: bool = False
    out: Optional[str] = None
    fmt: str = "json"
    threads: int = THREADS
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        common = {"command", "seed", "budget", "tol", "normalize", "out", "format", "handler"}
        return cls(command=args.command, seed=args.seed, budget=args.budget, tol=args.tol,
                   normalize=args.normalize, out=args.out, fmt=args.format,
                   options={k: v for k, v in vars(args).items() if k not in common})

    def get(self, key: str, default: Any = None) -> Any:
        value = self.options.get(key)
        return default if value is None else value


# ----------------------------------------------------------------------
# サブコマンド
# ----------------------------------------------------------------------
def cmd_complete(cfg: RunConfig) -> Dict[str, Any]:
    """有向完備化 (分岐表示は層ごと、有限半順序集合はそのまま) と閉包"""
    P = parsers.parse_poset(cfg.get("source"))
    result: Dict[str, Any] = {}
    completion = completion_service.directed_completion_branch(P, enhanced=cfg.get("enhanced", False))
    if isinstance(completion, FinitePoset):
        result["completion"] = {"layers": 0, "presentation": completion.to_json()}
    else:
        result["completion"] = completion.to_dict()
    if cfg.get("subset") is not None:
        subset = parsers.load_document(cfg.get("subset"))
        result["closure"] = closure_service.closure_suite(P, subset).to_dict()
    result["verdict"] = "pass"
    return result


def cmd_dm(cfg: RunConfig) -> Dict[str, Any]:
    P = parsers.parse_poset(cfg.get("source"))
    if isinstance(P, FinitePoset):
        result: Dict[str, Any] = {"dm": completion_service.dm_completion(P).to_dict()}
    else:
        result = {"dm": completion_service.dm_completion_branch(P)}
    if cfg.get("compare", False):
        result["comparison"] = completion_service.compare_completions(P).to_dict()
    result["verdict"] = "pass"
    return result


def cmd_check_mcp(cfg: RunConfig) -> Dict[str, Any]:
    if cfg.get("map") is not None:
        T = parsers.parse_map(cfg.get("map"))
    elif cfg.get("catalog") is not None:
        T = mcp_service.catalog_functional_map(cfg.get("catalog"), cfg.get("lam", "1"), cfg.get("eta", "1"))
    else:
        raise ValidationError("--map か --catalog のいずれかを指定してください")
    return mcp_service.check_mcp(T, budget=cfg.budget, seed=cfg.seed).to_dict()


def cmd_project(cfg: RunConfig) -> Dict[str, Any]:
    """{"source": 半順序, "target": 完備束, "mapping": [...]} の射影 Pr (と --iterate で P の反復)"""
    doc = parsers.parse_json_object(cfg.get("source"), "射影の入力")
    for key in ("source", "target", "mapping"):
        if key not in doc:
            raise ValidationError(f"射影の入力に '{key}' がありません")
    P, L = parsers.parse_poset(doc["source"]), parsers.parse_poset(doc["target"])
    if not (isinstance(P, FinitePoset) and isinstance(L, FinitePoset)):
        raise ValidationError("project は有限半順序集合のみ扱います")
    T = [int(x) for x in doc["mapping"]]
    result = mcp_service.pr_project_finite(P, L, T).to_dict(L)
    if cfg.get("iterate", False):
        result["p_iterates"] = mcp_service.p_iterate_finite(P, L, T)
    return result


def cmd_cone_suite(cfg: RunConfig) -> Dict[str, Any]:
    return lattice_service.lattice_law_suite(n=cfg.get("n", 4), cases=cfg.get("cases", 1000), seed=cfg.seed)


def cmd_rk(cfg: RunConfig) -> Dict[str, Any]:
    """2つの双対ベクトルの上限・下限 (指定がなければ順序の一致の監査)"""
    if cfg.get("l1") is None:
        return extension_service.order_coincidence_audit(n=cfg.get("n", 3), cases=cfg.get("cases", 32),
                                                         seed=cfg.seed)
    L1 = DualVector.from_json(parsers.parse_json_object(cfg.get("l1"), "--l1"))
    L2 = DualVector.from_json(parsers.parse_json_object(cfg.get("l2"), "--l2"))
    v = parsers.load_document(cfg.get("v"))
    if v is None:
        raise ValidationError("--v (評価点) を指定してください")
    _, vec = parsers.parse_vector(v, [str(m) for m in L1.cone.mu])
    result = extension_service.rk_join_meet(L1, L2, vec).to_dict()
    result.setdefault("verdict", "pass")
    return result


def cmd_extend(cfg: RunConfig) -> Dict[str, Any]:
    spec, bounds, order = parsers.parse_extension(cfg.get("spec"))
    extension_service.check_hypothesis(spec, bounds)
    return extension_service.extend_all(spec, bounds, order, budget=cfg.budget, seed=cfg.seed).to_dict()


def cmd_hahn_banach(cfg: RunConfig) -> Dict[str, Any]:
    """--p: {"forms": [...]} (p = 形式の最大値)、--t: {"basis": [...], "values": [...]}"""
    p_doc = parsers.load_document(cfg.get("p"))
    forms = p_doc.get("forms") if isinstance(p_doc, dict) else p_doc
    t_doc = parsers.parse_json_object(cfg.get("t"), "--t")
    if not forms or "basis" not in t_doc or "values" not in t_doc:
        raise ValidationError("--p には forms、--t には basis と values が必要です")
    return extension_service.hahn_banach(forms, t_doc["basis"], t_doc["values"],
                                         budget=cfg.budget, seed=cfg.seed).to_dict()


def _norm_input(cfg: RunConfig) -> Any:
    cone, f = parsers.parse_vector(cfg.get("f"), cfg.get("mu"))
    if cfg.normalize:
        cone = norm_service.normalize(cone)
    return cone, f


def cmd_norm(cfg: RunConfig) -> Dict[str, Any]:
    cone, f = _norm_input(cfg)
    result = norm_service.norm_report(cone, f, cfg.get("p"))
    result["verdict"] = "pass"
    return result


def cmd_norm_dual(cfg: RunConfig) -> Dict[str, Any]:
    cone, f = _norm_input(cfg)
    result = norm_service.dual_attain(cone, f, cfg.get("p")).to_dict()
    if cfg.get("bidual", False):
        result["bidual"] = norm_service.bidual_audit(cone, f, cfg.get("p")).to_dict()
    return result


def cmd_matrix_dual(cfg: RunConfig) -> Dict[str, Any]:
    A = parsers.parse_matrix(cfg.get("a"))
    samples = cfg.get("samples", matrix_service.DUAL_SAMPLES)
    result = matrix_service.matrix_dual_attain(A, cfg.get("p"), samples=samples, seed=cfg.seed).to_dict()
    result["eigen"] = matrix_service.eigen_report(A)
    return result


def cmd_lorentz(cfg: RunConfig) -> Dict[str, Any]:
    action = cfg.get("action")
    if action in ("dual", "norm"):
        if cfg.get("point") is None:
            raise ValidationError("--point を 's,y' の形式で指定してください")
        return lorentz_service.lorentz_report(action, p=cfg.get("p", "2"), point=parsers.parse_point(cfg.get("point")),
                                              tol=cfg.tol)
    if action == "classify":
        if cfg.get("ray") is None:
            raise ValidationError("--ray を指定してください")
        return lorentz_service.lorentz_report("classify", ray=parsers.parse_ray(cfg.get("ray")))
    m = parsers.load_document(cfg.get("m"))
    if cfg.get("s") is None or not isinstance(m, list):
        raise ValidationError("positive には --s と --m (配列) が必要です")
    return lorentz_service.lorentz_report("positive", s=cfg.get("s"), m=m, banach=cfg.get("banach", "l2"))


def cmd_baire_shrink(cfg: RunConfig) -> Dict[str, Any]:
    spec = parsers.parse_open_spec(cfg.get("spec")) if cfg.get("spec") is not None else None
    return chrono_service.baire_shrink_report(spec, iters=cfg.get("iters", 10), seed=cfg.seed)


def cmd_bm(cfg: RunConfig) -> Dict[str, Any]:
    if cfg.get("a") is None or cfg.get("b") is None:
        return geometry_service.bm_suite(cases=cfg.get("cases", 200), seed=cfg.seed)
    return geometry_service.bm_report(parsers.parse_polygon(cfg.get("a")), parsers.parse_polygon(cfg.get("b")))


def cmd_suite(cfg: RunConfig) -> Dict[str, Any]:
    ids = None
    if not cfg.get("all", False):
        if not cfg.get("ids"):
            raise ValidationError("--all か --ids を指定してください")
        try:
            ids = [int(x) for x in str(cfg.get("ids")).split(",") if x.strip()]
        except ValueError as e:
            raise ValidationError(f"--ids はカンマ区切りの整数です: {cfg.get('ids')}") from e
    config = suite_service.SuiteConfig(seed=cfg.seed, budget=cfg.budget, quick=cfg.get("quick", False))
    return suite_service.run_suite(ids, config)


# ----------------------------------------------------------------------
# 引数の解析
# ----------------------------------------------------------------------
def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=SAMPLED_CHAINS, help="鎖・反復の探索予算")
    common.add_argument("--tol", type=float, default=None, help="浮動小数点の比較の許容誤差")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="乱数の種")
    common.add_argument("--normalize", action="store_true", help="重みを確率測度に正規化する")
    common.add_argument("--out", default=None, help="レポートの出力先 (相対パスはレポートディレクトリ基準)")
    common.add_argument("--format", choices=storage.FORMATS, default="json", help="出力形式")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="hypercone", description=f"{APP_NAME} v{APP_VERSION}")
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    sub = parser.add_subparsers(dest="command", metavar="<subcommand>")
    sub.required = True

    def add(name: str, handler: Callable[[RunConfig], Dict[str, Any]], help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("complete", cmd_complete, "有向完備化と閉包")
    p.add_argument("--in", dest="source", required=True, help="半順序集合の JSON")
    p.add_argument("--enhanced", action="store_true", help="最小元がなければ ⊥ を加える")
    p.add_argument("--subset", default=None, help="閉包を求める部分集合 (JSON 配列)")

    p = add("dm", cmd_dm, "Dedekind–MacNeille 完備化")
    p.add_argument("--in", dest="source", required=True, help="半順序集合の JSON")
    p.add_argument("--compare", action="store_true", help="有向完備化との比較写像も求める")

    p = add("check-mcp", cmd_check_mcp, "鎖による Mcp 検査")
    p.add_argument("--map", default=None, help="写像の JSON")
    p.add_argument("--catalog", default=None, help="カタログの錐 ID (a〜f)")
    p.add_argument("--lam", default="1")
    p.add_argument("--eta", default="1")

    p = add("project", cmd_project, "射影 Pr と P の反復")
    p.add_argument("--in", dest="source", required=True, help="{source, target, mapping} の JSON")
    p.add_argument("--iterate", action="store_true")

    p = add("cone-suite", cmd_cone_suite, "錐の束演算の法則")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--cases", type=int, default=1000)

    p = add("rk", cmd_rk, "Riesz–Kantorovich の上限・下限")
    p.add_argument("--l1", default=None, help="双対ベクトル {mu, f}")
    p.add_argument("--l2", default=None, help="双対ベクトル {mu, f}")
    p.add_argument("--v", default=None, help="評価点 (配列)")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--cases", type=int, default=32)

    p = add("extend", cmd_extend, "部分楔からの拡張")
    p.add_argument("--spec", required=True, help="部分楔と上下界の JSON")

    p = add("hahn-banach", cmd_hahn_banach, "劣線形な上界のもとでの線形拡張")
    p.add_argument("--p", required=True, help="劣線形汎関数の形式 (JSON)")
    p.add_argument("--t", required=True, help="部分空間の基底と値 (JSON)")

    for name, handler, help_text in (("norm", cmd_norm, "双曲 L^p ノルム"),
                                     ("norm-dual", cmd_norm_dual, "双対表示の達成点")):
        p = add(name, handler, help_text)
        p.add_argument("--p", required=True, help="指数 (例: -1, 1/2, -inf, 0+)")
        p.add_argument("--f", required=True, help="ベクトル (配列または {mu, v})")
        p.add_argument("--mu", default=None, help="重み (省略時は一様 1/n)")
        if name == "norm-dual":
            p.add_argument("--bidual", action="store_true")

    p = add("matrix-dual", cmd_matrix_dual, "行列の双曲ノルムの双対表示")
    p.add_argument("--p", required=True)
    p.add_argument("--a", required=True, help="対称正定値行列 (行の配列)")
    p.add_argument("--samples", type=int, default=None)

    p = add("lorentz", cmd_lorentz, "三角形ノルムとローレンツ空間")
    p.add_argument("action", choices=("dual", "norm", "classify", "positive"))
    p.add_argument("--p", default="2")
    p.add_argument("--point", default=None, help="'s,y' 形式の点")
    p.add_argument("--ray", default=None, help="列の JSON")
    p.add_argument("--s", default=None)
    p.add_argument("--m", default=None, help="配列")
    p.add_argument("--banach", default="l2")

    p = add("baire-shrink", cmd_baire_shrink, "菱形の縮小の反復")
    p.add_argument("--spec", default=None, help="基本開集合の JSON")
    p.add_argument("--iters", type=int, default=10)

    p = add("bm", cmd_bm, "Brunn–Minkowski の不等式")
    p.add_argument("--a", default=None, help="凸多角形の頂点")
    p.add_argument("--b", default=None, help="凸多角形の頂点")
    p.add_argument("--cases", type=int, default=200)

    p = add("suite", cmd_suite, "受け入れスイート")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true")
    group.add_argument("--ids", default=None, help="カンマ区切りのスイート ID")
    p.add_argument("--quick", action="store_true", help="縮小した規模で実行する")
    return parser


def join_signed_values(argv: Sequence[str]) -> List[str]:
    """`--p -inf` を `--p=-inf` にする (argparse は "-inf" をオプションとみなすため)"""
    joined: List[str] = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in SIGNED_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") and len(argv[i + 1]) > 1 \
                and not argv[i + 1].startswith("--"):
            joined.append(f"{arg}={argv[i + 1]}")
            i += 2
            continue
        joined.append(arg)
        i += 1
    return joined


def exit_code(report: Dict[str, Any]) -> int:
    return EXIT_COUNTEREXAMPLE if report.get("verdict") in FAILING_VERDICTS else EXIT_PASS


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    コマンドラインを実行してレポートを出力する

    Args:
        argv: 引数 (省略時は sys.argv[1:])

    Returns:
        int: 0 (成功)、1 (反例を確認)、2 (入力エラー)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(join_signed_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as e:
        return EXIT_PASS if e.code == 0 else EXIT_INPUT_ERROR
    cfg = RunConfig.from_args(args)
    logger.debug(f"実行設定: {cfg}")
    try:
        result = args.handler(cfg)
        report = storage.make_report(cfg.command, result, seed=cfg.seed)
        text = storage.write_report(report, cfg.out, cfg.fmt)
    except ValidationError as e:
        logger.error(f"入力エラー: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except HyperconeError as e:
        witness = getattr(e, "witness", None)
        logger.error(f"{type(e).__name__}: {str(e)}" + (f" (反例: {witness})" if witness else ""))
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if cfg.out is None:
        sys.stdout.write(text)
    code = exit_code(report)
    if code == EXIT_COUNTEREXAMPLE:
        logger.warning(f"{cfg.command}: 反例が見つかりました")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
