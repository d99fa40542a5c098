import math

import numpy as np
import pytest

from src.models.errors import NotPD, NotPSD, NotSymmetric, ValidationError
from src.models.matrix import SymMatrix
from src.services import matrix_service

A2 = SymMatrix([[2, 1], [1, 2]])


def test_jacobi_eigenvalues():
    eig = matrix_service.eigen_sym(A2)
    assert eig.values == pytest.approx([1.0, 3.0])
    assert np.allclose(eig.reconstruct(), A2.array)
    assert eig.orthogonality < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_jacobi_residual_on_random_pd_matrices(d, caplog):
    rng = np.random.default_rng(d)
    for _ in range(40):
        A = matrix_service.random_pd(d, rng)
        eig = matrix_service.eigen_sym(A)
        assert math.isfinite(eig.residual)
        assert eig.residual <= 1e-12
        assert eig.orthogonality < 1e-12
        assert eig.sweeps < matrix_service.MAX_SWEEPS
    assert "収束しませんでした" not in caplog.text


def test_eigen_report_of_identity():
    report = matrix_service.eigen_report(SymMatrix.identity(3))
    assert report["eigenvalues"] == pytest.approx([1.0, 1.0, 1.0])
    assert report["reconstruction_error"] < 1e-12


@pytest.mark.parametrize("p, expected", [
    ("1", 2.0),
    ("-inf", 1.0),
    ("0", math.sqrt(3.0)),
    ("-1", 1.5),
])
def test_matrix_norms(p, expected):
    assert matrix_service.matrix_p_norm(A2, p) == pytest.approx(expected)


def test_zero_exponent_is_root_of_determinant():
    A = SymMatrix.diag([1, 2, 4])
    assert matrix_service.matrix_p_norm(A, "0") == pytest.approx(2.0)


def test_negative_eigenvalue_is_rejected():
    with pytest.raises(NotPSD):
        matrix_service.matrix_p_norm(SymMatrix([[1, 2], [2, 1]]), "1/2")


def test_singular_matrix_has_no_negative_power():
    with pytest.raises(NotPD):
        matrix_service.matrix_power(SymMatrix.diag([1, 0]), -1)


def test_asymmetric_input_is_rejected():
    with pytest.raises(NotSymmetric):
        SymMatrix([[1, 2], [0, 1]])
    with pytest.raises(ValidationError):
        SymMatrix([[1, 2, 3]])


def test_young_inequality():
    result = matrix_service.young_audit(SymMatrix.diag([1, 4]), SymMatrix.identity(2), "-1")
    assert result.lhs == pytest.approx(5.0)
    assert result.rhs == pytest.approx(2.75)
    assert result.holds
    assert not result.equality


@pytest.mark.parametrize("p", ["-1", "1/2", "-1/3"])
def test_young_equality_case(p):
    result = matrix_service.young_equality_case(A2, p)
    assert result.equality
    assert result.tight


def test_young_needs_power_exponent():
    with pytest.raises(ValidationError):
        matrix_service.young_audit(A2, A2, "-inf")


@pytest.mark.parametrize("p", ["-1", "1/2", "-inf", "0"])
def test_matrix_dual_attainment(p):
    result = matrix_service.matrix_dual_attain(A2, p, samples=500)
    assert result.attains
    assert result.normalized
    assert result.passed


def test_diagonal_matrix_matches_vector_formula():
    result = matrix_service.matrix_dual_attain(SymMatrix.diag([1, 4]), "-1", samples=200)
    assert result.vector_formula is True
    assert result.norm == pytest.approx(1.6)


def test_matrix_audit_small():
    report = matrix_service.matrix_audit(d=3, p="-1", cases=40)
    assert report["verdict"] == "pass"
    assert [r["family"] for r in report["rows"]] == ["unitary_invariance", "trace_duality", "reverse_triangle"]
