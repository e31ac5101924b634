import numpy as np
import pytest

from tmp3 import make_case
from tmp3.bases import basis_Bk, basis_Rk1, basis_Vk
from tmp3.certify import (
    Certificate,
    NotPsd,
    ShapeMismatch,
    reassemble_gram,
    sos_from_gram,
    verify_certificate,
)
from tmp3.curves import chi_flags
from tmp3.linalg import SymmetricForm
from tmp3.poly import BivarPoly, normal_low

_M = BivarPoly.monomial
_C = BivarPoly.const


def _coeff_vec(labels, pairs):
    v = np.zeros(len(labels))
    for lbl, c in pairs:
        v[labels.index(lbl)] = c
    return v


class TestVerifyCertificate:
    def test_forward_square_nodal(self):
        case = make_case("P4")
        k = 2
        b = basis_Bk(case, k)
        vec = _coeff_vec(b.labels(), [("1", 2.0), ("[t^2-t^0]", 1.0)])  # 1+x
        g0 = SymmetricForm(b.labels(), np.outer(vec, vec))
        p = (_C(1.0) + _M(1, 0)) ** 2
        res = verify_certificate(p, Certificate("v1", g0), case, k)
        assert res.sampled < 1e-10
        assert res.symbolic is not None and res.symbolic < 1e-10

    def test_example_weier_identity(self):
        """x*(y/x)^2 equals q(x) on the disconnected Weierstrass curve."""
        case = make_case("P1", dict(a=1.0, b=2.0))
        k = 2
        b0 = basis_Bk(case, k)
        v = basis_Vk(case, k)
        g0 = SymmetricForm(b0.labels(), np.zeros((len(b0), len(b0))))
        w = _coeff_vec(v.labels(), [("y/x", 1.0)])
        g1 = SymmetricForm(v.labels(), np.outer(w, w))
        q = (_M(1, 0) - _C(1.0)) * (_M(1, 0) - _C(2.0))
        res = verify_certificate(q, Certificate("v1", g0, g1), case, k)
        assert res.sampled < 1e-10
        assert res.symbolic < 1e-10

    def test_perturbation_detected(self):
        case = make_case("P4")
        k = 2
        b = basis_Bk(case, k)
        vec = _coeff_vec(b.labels(), [("1", 2.0), ("[t^2-t^0]", 1.0)])
        g0 = SymmetricForm(b.labels(), np.outer(vec, vec))
        eps = 1e-3
        p = (_C(1.0) + _M(1, 0)) ** 2 + _M(1, 0, eps)
        res = verify_certificate(p, Certificate("v1", g0), case, k)
        assert res.sampled > eps / 100
        assert res.symbolic > eps / 100

    def test_v2_certificate(self):
        case = make_case("P19")
        k = 2
        b0 = basis_Bk(case, k)
        br = basis_Rk1(case, k)
        g0 = SymmetricForm(b0.labels(), np.zeros((len(b0), len(b0))))
        h = _coeff_vec(br.labels(), [("1", 1.0)])
        g2 = SymmetricForm(br.labels(), np.outer(h, h))
        chi1, chi2 = chi_flags(case)
        p = normal_low(float(chi2) * case.factors()[1], case)
        res = verify_certificate(p, Certificate("v2", g0, None, g2), case, k)
        assert res.sampled < 1e-10

    def test_shape_mismatch(self):
        case = make_case("P4")
        g0 = SymmetricForm(["1"], np.eye(1))
        with pytest.raises(ShapeMismatch):
            verify_certificate(_C(1.0), Certificate("v1", g0), case, 2)

    def test_not_psd(self):
        case = make_case("P4")
        b = basis_Bk(case, 2)
        M = np.zeros((6, 6))
        M[0, 0] = -1.0
        with pytest.raises(NotPsd):
            verify_certificate(_C(1.0), Certificate("v1", SymmetricForm(b.labels(), M)),
                               case, 2)


class TestSosFromGram:
    def test_identity(self):
        sq = sos_from_gram(SymmetricForm(["a", "b"], np.eye(2)), None)
        assert len(sq) == 2
        assert np.allclose(reassemble_gram(sq, 2), np.eye(2))

    def test_rank_one(self):
        w = np.array([1.0, 2.0, -1.0])
        sq = sos_from_gram(SymmetricForm(list("abc"), np.outer(w, w)), None)
        assert len(sq) == 1
        assert np.allclose(np.abs(sq[0]), np.abs(w))

    def test_random_roundtrip(self):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((6, 6))
        Q = A @ A.T
        sq = sos_from_gram(SymmetricForm([str(i) for i in range(6)], Q), None)
        assert len(sq) <= 6
        assert np.abs(reassemble_gram(sq, 6) - Q).max() < 1e-9 * np.abs(Q).max()

    def test_rejects_indefinite(self):
        M = np.diag([1.0, -1.0])
        with pytest.raises(NotPsd):
            sos_from_gram(SymmetricForm(["a", "b"], M), None)
