import numpy as np
import pytest

from conftest import CASE_PARAMS
from tmp3 import make_case, normalize
from tmp3.curves import (
    InvalidParams,
    NotApplicable,
    Unsupported,
    chi_flags,
    multiplier,
    parametrization,
    sample_points,
)
from tmp3.poly import BivarPoly, UnivarPoly

_M = BivarPoly.monomial
_C = BivarPoly.const


class TestMakeCase:
    def test_valid(self):
        make_case("P1", dict(a=1.0, b=2.0))

    def test_order_violation(self):
        with pytest.raises(InvalidParams):
            make_case("P1", dict(a=2.0, b=1.0))

    def test_p15_needs_large_a(self):
        with pytest.raises(InvalidParams):
            make_case("P15", dict(a=1.5))

    @pytest.mark.parametrize("cid,params", [
        ("P2", dict(c=0.0)),
        ("P6", dict(a=0.0, d=1.0, e=0.0)),
        ("P6", dict(a=2.0, d=1.0, e=2.0)),  # e^2 = a^2 d -> reducible
        ("P8", dict(c=0.0, d=0.0, e=0.0)),
        ("P10", dict(a=0.0, c=0.0, d=0.0, e=1.0)),
        ("P12", dict(c2=0.0, c1=0.0, c0=0.0)),
        ("P14", dict(a=0.0)),
        ("P24", dict(a=2.0)),
        ("P26", dict(a=1.0, b=1.0)),
    ])
    def test_invalid(self, cid, params):
        with pytest.raises(InvalidParams):
            make_case(cid, params)

    def test_missing_and_extra_params(self):
        with pytest.raises(InvalidParams):
            make_case("P1", dict(a=1.0))
        with pytest.raises(InvalidParams):
            make_case("P3", dict(a=1.0))


class TestMultiplier:
    def test_p10_anchor(self):
        m = multiplier(make_case("P10", dict(a=100.0, c=-5.0, d=-1.0, e=3.0)))
        assert m.source_cubic.coeffs == [62494.0, -10014.0, 2.0, 1.0]
        assert m.alpha == pytest.approx(-104.033, abs=1e-2)
        f = m.f.numerator
        assert f.coeffs[(0, 2)] == 1.0 and f.coeffs[(2, 0)] == -1.0
        assert f.coeffs[(1, 0)] == 5.0
        assert f.coeffs[(0, 0)] == pytest.approx(104.033, abs=1e-2)

    def test_p11_anchor(self):
        m = multiplier(make_case("P11", dict(a=1.0, c=-7.0, d=1.0, e=3.0)))
        assert m.source_cubic.coeffs == [24.25, -19.0, -2.0, 1.0]
        assert m.alpha == pytest.approx(-4.091, abs=1e-2)

    def test_nodal_is_one(self):
        m = multiplier(make_case("P4"))
        assert m.alpha is None
        assert m.f.numerator.allclose(_C(1.0))

    def test_alpha_satisfies_cubic(self):
        for cid in ("P7", "P8", "P9", "P10", "P11"):
            m = multiplier(make_case(cid, CASE_PARAMS[cid]))
            assert abs(m.source_cubic.eval(m.alpha)) < 1e-8 * max(1.0, m.source_cubic.norm())
            roots = [m.alpha]
            assert m.selection_rule in ("smallest", "largest")

    @pytest.mark.parametrize("cid", ["P1", "P2", "P7", "P8", "P9", "P10", "P11"])
    def test_multiplier_nonnegative_on_locus(self, cid):
        case = make_case(cid, CASE_PARAMS[cid])
        m = multiplier(case)
        pts = sample_points(case, 500, seed=8)
        vals = [m.f.eval(x, y) for x, y, _ in pts]
        scale = max(1.0, max(abs(v) for v in vals))
        assert min(vals) >= -1e-8 * scale


class TestChiFlags:
    def test_p24(self):
        assert chi_flags(make_case("P24", dict(a=-1.0))) == (0, 1)

    def test_p19(self):
        assert chi_flags(make_case("P19")) == (-1, 1)

    def test_p15(self):
        c1, c2 = chi_flags(make_case("P15", dict(a=-3.0)))
        assert c2 == 1 and c1 in (-1, 1)

    def test_not_applicable(self):
        with pytest.raises(NotApplicable):
            chi_flags(make_case("P4"))

    @pytest.mark.parametrize("cid", ["P15", "P19", "P24"])
    def test_sign_consistency(self, cid):
        case = make_case(cid, CASE_PARAMS[cid])
        c1, c2 = chi_flags(case)
        f1, f2 = case.factors()
        par = parametrization(case)
        rng = np.random.default_rng(0)
        conic = par.components[1]
        line = par.components[0]
        for _ in range(200):
            t = float(rng.uniform(-3, 3))
            if any(abs(t - ex) < 1e-2 for ex in conic.excluded_t):
                continue
            if c1 != 0:
                v = c1 * f1.eval(conic.x_at(t), conic.y_at(t))
                assert v >= -1e-8 * max(1.0, abs(v))
            v2 = c2 * f2.eval(line.x_at(t), line.y_at(t))
            assert v2 >= -1e-8 * max(1.0, abs(v2))


class TestParametrization:
    def test_neile(self):
        par = parametrization(make_case("P3"))
        assert len(par.components) == 1
        assert par.components[0].excluded_t == ()
        assert par.components[0].x_at(2.0) == 4.0
        assert par.components[0].y_at(2.0) == 8.0

    def test_p6_exclusions(self):
        par = parametrization(make_case("P6", dict(a=0.5, d=1.0, e=3.0)))
        assert sorted(par.components[0].excluded_t) == [-1.0, 1.0]

    def test_p26_components(self):
        par = parametrization(make_case("P26", dict(a=1.0, b=2.0)))
        assert len(par.components) == 3
        ys = sorted(c.y_at(0.3) for c in par.components)
        assert ys == [-2.0, -1.0, 0.0]
        assert any("b*(g_{i-1}" in m for m in par.matching_conditions)

    def test_smooth_cases_have_none(self):
        from tmp3.poly import UnsupportedCase

        with pytest.raises(UnsupportedCase):
            parametrization(make_case("P1", dict(a=1.0, b=2.0)))


class TestSamplePoints:
    def test_on_curve_p4(self):
        case = make_case("P4")
        P = case.defining_poly()
        for x, y, _ in sample_points(case, 3, seed=0):
            assert abs(P.eval(x, y)) < 1e-9 * max(1.0, (1 + abs(x) + abs(y)) ** 3)

    def test_p1_real_locus(self):
        case = make_case("P1", dict(a=1.0, b=2.0))
        for x, y, _ in sample_points(case, 25, seed=1):
            assert (-1e-9 <= x <= 1.0 + 1e-9) or x >= 2.0 - 1e-9

    def test_p26_components(self):
        pts = sample_points(make_case("P26", dict(a=1.0, b=2.0)), 6, seed=2)
        comps = sorted({c for _, _, c in pts})
        assert comps == [0, 1, 2]


class TestNormalize:
    def test_already_canonical_weierstrass(self):
        p = _M(0, 2) - _M(1, 0) * (_M(1, 0) - _C(1.0)) * (_M(1, 0) - _C(3.0))
        case, amap = normalize(p)
        assert case.id == "P1"
        assert case.params["a"] == pytest.approx(1.0)
        assert case.params["b"] == pytest.approx(3.0)

    def test_out_of_scope(self):
        with pytest.raises(Unsupported):
            normalize(_M(3, 0) + _M(0, 3) - _C(1.0))

    def test_newton_family_scaling(self):
        # x y^2 + y - 4 x^3 - 2: the b>0, a != 0 family, e != 0 so valid
        p = _M(1, 2) + _M(0, 1) - _M(3, 0, 4.0) - _C(2.0)
        case, amap = normalize(p)
        assert case.id == "P10"
        _check_pushforward(p, case, amap)

    @pytest.mark.parametrize("poly,expect", [
        (_M(0, 2) - _M(3, 0, 4.0) + _M(2, 0, 4.0), "P5"),   # y^2 = 4x^2(x-1)
        (_M(0, 2) - _M(3, 0, 4.0) + _M(2, 0, 16.0) - _M(1, 0, 16.0), "P4"),
        (_M(1, 1) - _M(3, 0, 2.0) - _C(3.0), "P12"),
        (_M(0, 1) - _M(3, 0, 8.0) - _M(2, 0, 2.0), "P13"),
        (_M(0, 1) * (_C(1.0) + _M(0, 1, 2.0) + _M(2, 0, 3.0)), "P19"),
        (_M(0, 1) * (_M(0, 1, 2.0) + _M(2, 0, 0.5) + _M(0, 2, 0.5)), "P14"),
    ])
    def test_families(self, poly, expect):
        case, amap = normalize(poly)
        assert case.id == expect
        _check_pushforward(poly, case, amap)


def _check_pushforward(p, case, amap, n=100):
    P = case.defining_poly()
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(4000):
        x = float(rng.uniform(-3, 3))
        ymax = max(j for _, j in p.coeffs)
        co = [0.0] * (ymax + 1)
        for (i, j), v in p.coeffs.items():
            co[j] += v * x**i
        q = UnivarPoly(co)
        if q.is_zero() or q.degree() < 1:
            continue
        from tmp3.poly import cubic_real_roots

        for y in cubic_real_roots(q):
            u, v = amap.apply(x, y)
            assert abs(P.eval(u, v)) < 1e-8 * max(1.0, (1 + abs(u) + abs(v)) ** 3) \
                * max(1.0, P.max_abs_coeff())
            checked += 1
        if checked >= n:
            return
    assert checked > 0
