import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.config import DEFAULT_SEED, PSD_SLACK, TOL_MATRIX
from src.models.cone import DiscreteCone
from src.models.errors import NotPD, NotPSD, ValidationError
from src.models.extreal import as_float, to_fraction
from src.models.matrix import SymMatrix
from src.models.norms import ESSINF, POWER, LpTag
from src.services.norm_service import batch_norms, dual_attain, float_norm
from src.services.parallel import run_cases

# ロガーの設定
logger = logging.getLogger(__name__)

# Jacobi 法のスイープ数の上限
MAX_SWEEPS = 50
# 非対角成分の残差の目標 (‖A‖_F に対する比)
OFF_DIAGONAL_TARGET = 1e-14
# 回転を省略する非対角成分の相対的な大きさ
ROUNDOFF = 1e-17
# 双対の達成を確かめる乱数行列の数
DUAL_SAMPLES = 10 ** 4


@dataclass
class EigenResult:
    """固有値 (昇順) と正規直交な固有ベクトル (列)"""
    values: np.ndarray
    frame: np.ndarray
    sweeps: int
    residual: float
    orthogonality: float

    def reconstruct(self) -> np.ndarray:
        return self.frame @ np.diag(self.values) @ self.frame.T

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalues": self.values.tolist(),
            "frame": self.frame.tolist(),
            "sweeps": self.sweeps,
            "residual": self.residual,
            "orthogonality": self.orthogonality,
        }


def _off_diagonal(a: np.ndarray) -> float:
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.sqrt(np.sum(off ** 2)))


def _rotation(a: np.ndarray, k: int, l: int) -> Tuple[float, float]:
    """a[k,l] を 0 にする回転の (cos, sin)"""
    diff = a[l, l] - a[k, k]
    if abs(a[k, l]) < abs(diff) * 1.0e-36:
        t = a[k, l] / diff
    else:
        phi = diff / (2.0 * a[k, l])
        t = 1.0 / (abs(phi) + math.sqrt(phi ** 2 + 1.0))
        if phi < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t ** 2 + 1.0)
    return c, t * c


def _rotate(a: np.ndarray, P: np.ndarray, k: int, l: int, c: float, s: float) -> None:
    """a ← Jᵀ a J, P ← P J をその場で更新する (J は (k,l) 平面の回転)"""
    row_k, row_l = a[k, :].copy(), a[l, :].copy()
    a[k, :] = c * row_k - s * row_l
    a[l, :] = s * row_k + c * row_l
    col_k, col_l = a[:, k].copy(), a[:, l].copy()
    a[:, k] = c * col_k - s * col_l
    a[:, l] = s * col_k + c * col_l
    a[k, l] = a[l, k] = 0.0
    p_k, p_l = P[:, k].copy(), P[:, l].copy()
    P[:, k] = c * p_k - s * p_l
    P[:, l] = s * p_k + c * p_l


def eigen_sym(A: SymMatrix) -> EigenResult:
    """
    巡回 Jacobi 法で対称行列を対角化する

    (k,l) を行順に回るスイープを、非対角成分のフロベニウスノルムが
    ‖A‖_F の OFF_DIAGONAL_TARGET 倍以下になるか、回転が起きなくなるまで繰り返す。
    残差は ‖A V − V Λ‖_F / ‖A‖_F。

    Args:
        A: 対称行列

    Returns:
        EigenResult: 昇順の固有値、固有ベクトル、残差
    """
    d = A.d
    a = A.array.astype(float).copy()
    P = np.eye(d)
    scale = A.frobenius()
    sweeps = 0
    while sweeps < MAX_SWEEPS and _off_diagonal(a) > OFF_DIAGONAL_TARGET * scale:
        rotated = False
        for k in range(d - 1):
            for l in range(k + 1, d):
                # 対角成分に比べて丸め誤差以下の成分は回さない
                if abs(a[k, l]) <= ROUNDOFF * math.sqrt(abs(a[k, k] * a[l, l])) or a[k, l] == 0.0:
                    a[k, l] = a[l, k] = 0.0
                    continue
                c, s = _rotation(a, k, l)
                _rotate(a, P, k, l, c, s)
                rotated = True
        sweeps += 1
        if not rotated:
            break
    if sweeps >= MAX_SWEEPS and _off_diagonal(a) > OFF_DIAGONAL_TARGET * scale:
        logger.warning(f"Jacobi 法が {MAX_SWEEPS} スイープで収束しませんでした")
    order = np.argsort(np.diagonal(a), kind="stable")
    values = np.diagonal(a)[order].copy()
    frame = P[:, order]
    if scale > 0:
        residual = float(np.linalg.norm(A.array @ frame - frame * values) / scale)
    else:
        residual = 0.0
    orthogonality = float(np.max(np.abs(frame.T @ frame - np.eye(d))))
    return EigenResult(values, frame, sweeps, residual, orthogonality)


def _spectrum(A: SymMatrix, definite: bool = False) -> EigenResult:
    """半正定値 (definite なら正定値) を確認し、微小な負の固有値を 0 に丸める"""
    eig = eigen_sym(A)
    low = float(eig.values[0])
    if low < -PSD_SLACK:
        raise NotPSD(f"最小固有値 {low:.3e} が負です")
    if definite and low <= PSD_SLACK:
        raise NotPD(f"最小固有値 {low:.3e} が正ではありません")
    eig.values = np.clip(eig.values, 0.0, None)
    return eig


def _tag(p: Any) -> LpTag:
    # 行列では p = 0 を det^{1/d} (0+ と 0- は一致する) として受け付ける
    if str(p).strip() == "0":
        return LpTag.parse("0+")
    return LpTag.parse(p)


def matrix_power(A: SymMatrix, e: Any) -> np.ndarray:
    """
    スペクトル分解による A^e

    Raises:
        NotPSD: 半正定値でない場合
        NotPD: e ≤ 0 で特異な場合
    """
    e = float(to_fraction(e))
    eig = _spectrum(A, definite=e <= 0)
    return eig.frame @ np.diag(eig.values ** e) @ eig.frame.T


def matrix_p_norm(A: SymMatrix, p: Any) -> float:
    """
    スペクトルの一様重み 1/d での L^p ノルム (p = 0 では det(A)^{1/d})

    Raises:
        NotPSD: 半正定値でない場合
    """
    tag = _tag(p)
    eig = _spectrum(A)
    return float_norm(eig.values, [1.0 / A.d] * A.d, tag)


def random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    return q * np.sign(np.diagonal(r))


def random_pd(d: int, rng: np.random.Generator) -> SymMatrix:
    """既知のスペクトル (対数正規) から Q Λ Qᵀ として正定値行列を作る"""
    Q = random_orthogonal(d, rng)
    lam = np.exp(rng.normal(size=d))
    return SymMatrix.symmetrized(Q @ np.diag(lam) @ Q.T)


# ----------------------------------------------------------------------
# Young の不等式と双対の達成
# ----------------------------------------------------------------------
@dataclass
class YoungResult:
    p: LpTag
    lhs: float
    rhs: float
    distance: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - TOL_MATRIX * max(1.0, abs(self.rhs))

    @property
    def equality(self) -> bool:
        return self.distance <= TOL_MATRIX

    @property
    def tight(self) -> bool:
        return abs(self.lhs - self.rhs) <= TOL_MATRIX * max(1.0, abs(self.rhs))

    def to_dict(self) -> Dict[str, Any]:
        return {"p": str(self.p), "q": str(self.p.conjugate()), "lhs": self.lhs, "rhs": self.rhs,
                "distance": self.distance, "holds": self.holds, "equality": self.equality,
                "tight": self.tight}


def young_audit(A: SymMatrix, B: SymMatrix, p: Any) -> YoungResult:
    """
    Tr(AB) ≥ (1/p)Tr(A^p) + (1/q)Tr(B^q) を確認する (等号は A^p = B^q のとき)

    Raises:
        ValidationError: p が (−∞,1) の 0 以外の有理数でない場合
        NotPD: A, B が正定値でない場合
    """
    tag = _tag(p)
    if tag.kind != POWER or tag.p == 1:
        raise ValidationError(f"Young の不等式の指数は (−∞,1) の 0 以外の有理数です: {p}")
    q = tag.conjugate().p
    Ap = matrix_power(A, tag.p)
    Bq = matrix_power(B, q)
    lhs = float(np.trace(A.array @ B.array))
    rhs = float(np.trace(Ap)) / float(tag.p) + float(np.trace(Bq)) / float(q)
    return YoungResult(tag, lhs, rhs, float(np.linalg.norm(Ap - Bq, "fro")))


@dataclass
class MatrixDualResult:
    p: LpTag
    norm: float
    b_star: np.ndarray
    b_star_norm: float
    pairing: float
    samples: int
    best_sampled: float
    vector_formula: Optional[bool] = None

    @property
    def attains(self) -> bool:
        return math.isclose(self.pairing, self.norm, rel_tol=TOL_MATRIX, abs_tol=TOL_MATRIX)

    @property
    def normalized(self) -> bool:
        return math.isclose(self.b_star_norm, 1.0, rel_tol=TOL_MATRIX)

    @property
    def oracle_ok(self) -> bool:
        return self.best_sampled >= self.norm * (1 - TOL_MATRIX)

    @property
    def passed(self) -> bool:
        return self.attains and self.normalized and self.oracle_ok and self.vector_formula is not False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": str(self.p),
            "q": str(self.p.conjugate()),
            "norm": self.norm,
            "b_star": self.b_star.tolist(),
            "b_star_norm": self.b_star_norm,
            "pairing": self.pairing,
            "gap": self.pairing - self.norm,
            "samples": self.samples,
            "best_sampled": self.best_sampled,
            "vector_formula": self.vector_formula,
            "verdict": "pass" if self.passed else "fail",
        }


def _attaining_matrix(A: SymMatrix, eig: Any, tag: LpTag, norm: float) -> np.ndarray:
    d = A.d
    if tag.kind == ESSINF:
        v = eig.frame[:, 0]
        return d * np.outer(v, v)
    if tag.kind == POWER:
        if tag.p == 1:
            return np.eye(d)
        e = float(tag.p) - 1.0
        return eig.frame @ np.diag(eig.values ** e) @ eig.frame.T / norm ** e
    # 0±: B* = ‖A‖₀ A^{-1}
    return norm * (eig.frame @ np.diag(1.0 / eig.values) @ eig.frame.T)


def _sampled_minimum(A: SymMatrix, q: LpTag, samples: int, seed: int) -> float:
    """ランダムな正定値 B (スペクトル既知) での (1/d)Tr(AB)/‖B‖_q の最小値"""
    d = A.d
    rng = np.random.default_rng(seed)
    Q, r = np.linalg.qr(rng.normal(size=(samples, d, d)))
    Q = Q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
    lam = np.exp(rng.normal(size=(samples, d)))
    # Tr(A Q Λ Qᵀ) = Σ_k λ_k q_kᵀ A q_k
    quad = np.einsum("nik,ij,njk->nk", Q, A.array, Q)
    pair = (lam * quad).sum(axis=1) / d
    norms = batch_norms(lam, np.full(d, 1.0 / d), q)
    return float(np.min(pair / norms))


def matrix_dual_attain(A: SymMatrix, p: Any, samples: int = DUAL_SAMPLES,
                       seed: int = DEFAULT_SEED) -> MatrixDualResult:
    """
    ‖A‖_p = min { (1/d)Tr(AB) : ‖B‖_q ≥ 1 } の達成点 B* = A^{p−1}/‖A‖_p^{p−1}

    p = 1 では B* = I、p = −∞ では最小固有ベクトルへの射影の d 倍、0± では ‖A‖₀ A^{−1}。
    乱数の正定値 B が B* より小さい値を与えないことを確かめる。A が対角なら
    ベクトルの公式 (dual_attain) と一致することも確認する。

    Raises:
        NotPD: 正定値でない場合
    """
    tag = _tag(p)
    q = tag.conjugate()
    eig = _spectrum(A, definite=True)
    norm = float_norm(eig.values, [1.0 / A.d] * A.d, tag)
    B = SymMatrix.symmetrized(_attaining_matrix(A, eig, tag, norm))
    result = MatrixDualResult(tag, norm, B.array, matrix_p_norm(B, q),
                              A.trace_pairing(B), samples, _sampled_minimum(A, q, samples, seed))
    if A.is_diagonal:
        cone = DiscreteCone.uniform(A.d)
        vector = dual_attain(cone, [to_fraction(float(x)) for x in np.diagonal(A.array)], tag, levels=())
        expected = np.diag([as_float(v) for v in vector.g])
        result.vector_formula = bool(np.allclose(B.array, expected, rtol=TOL_MATRIX, atol=TOL_MATRIX))
    logger.debug(f"matrix_dual_attain p={tag}: ‖A‖={norm:.6g} (1/d)Tr(AB*)={result.pairing:.6g}")
    return result


# ----------------------------------------------------------------------
# 標本による不変量の確認
# ----------------------------------------------------------------------
def _matrix_case(args: Tuple[int, LpTag, int, int]) -> Dict[str, bool]:
    d, tag, seed, index = args
    rng = np.random.default_rng([seed, index])
    A, B = random_pd(d, rng), random_pd(d, rng)
    Q = random_orthogonal(d, rng)
    q = tag.conjugate()
    na, nb = matrix_p_norm(A, tag), matrix_p_norm(B, q)
    rotated = matrix_p_norm(SymMatrix.symmetrized(Q @ A.array @ Q.T), tag)
    nab = matrix_p_norm(A + B, tag)
    nb_p = matrix_p_norm(B, tag)
    pairing = A.trace_pairing(B)
    return {
        "unitary_invariance": math.isclose(rotated, na, rel_tol=1e-10, abs_tol=1e-10),
        "trace_duality": pairing >= na * nb * (1 - TOL_MATRIX),
        "reverse_triangle": nab >= (na + nb_p) * (1 - TOL_MATRIX),
    }


def matrix_audit(d: int = 3, p: Any = "-1", cases: int = 1000, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    ユニタリ不変性・トレース双対の不等式・逆三角不等式を乱数の正定値行列で確認する

    Returns:
        Dict[str, Any]: 不変量ごとの行と判定
    """
    tag = _tag(p)
    if d < 1:
        raise ValidationError(f"次元は正である必要があります: {d}")
    results = run_cases(_matrix_case, [(d, tag, seed, i) for i in range(cases)])
    rows: List[Dict[str, Any]] = []
    for family in ("unitary_invariance", "trace_duality", "reverse_triangle"):
        failed = [i for i, r in enumerate(results) if not r[family]]
        rows.append({"family": family, "checked": len(results), "failed": len(failed),
                     "first_failure": failed[0] if failed else None})
    verdict = "pass" if all(r["failed"] == 0 for r in rows) else "fail"
    logger.info(f"行列の監査 d={d} p={tag}: {cases} 例, 判定 {verdict}")
    return {"d": d, "p": str(tag), "rows": rows, "verdict": verdict}


def eigen_report(A: SymMatrix) -> Dict[str, Any]:
    eig = eigen_sym(A)
    report = eig.to_dict()
    report["reconstruction_error"] = float(np.max(np.abs(eig.reconstruct() - A.array)))
    return report


def young_equality_case(A: SymMatrix, p: Any) -> YoungResult:
    """B := A^{p/q} とした等号の場合"""
    tag = _tag(p)
    ratio = Fraction(tag.p) / tag.conjugate().p
    return young_audit(A, SymMatrix.symmetrized(matrix_power(A, ratio)), tag)
