"""Lattice identities: exact arithmetic, twists, catalog consistency."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowup_paths.lattice import (
    ChernClass,
    DivisorClass,
    REGION_GLUED,
    build_catalog,
    c_multiple,
    chern_of,
    default_model,
    euler_pairing_point_curve,
    hn_factor_classes,
    make_surface_model,
    oc_class,
    pullback_divisor,
    pullback_line_class,
    pullback_structure_class,
    skyscraper_class,
    twist,
)
from blowup_paths.lattice import SurfaceModel

rationals = st.fractions(
    min_value=Fraction(-20), max_value=Fraction(20), max_denominator=16)


def rational_class(model, r, d, e, c2):
    return ChernClass(Fraction(r), (Fraction(d),) * model.rho, Fraction(e),
                      Fraction(c2))


def chi_p1_oracle(k: int) -> int:
    """Euler characteristic of O(k) on the projective line by dimension
    count: h^0 = max(k+1, 0), h^1 = max(-k-1, 0) (Serre duality)."""
    return max(k + 1, 0) - max(-k - 1, 0)


def brute_twist(model, v: ChernClass, B: DivisorClass) -> ChernClass:
    """Multiply ch(v) by the truncated exponential 1 - B + B^2/2 in the
    graded intersection ring; independent of the componentwise identities."""
    deg0 = v.r
    deg2 = (v.d, v.e)
    deg4 = v.c2
    # (e^{-B} ch)_0 = ch_0
    out0 = deg0
    # (e^{-B} ch)_2 = ch_1 - B ch_0
    out2 = (tuple(v.d[i] - B.b[i] * deg0 for i in range(model.rho)),
            v.e - B.bC * deg0)
    # (e^{-B} ch)_4 = ch_2 - B.ch_1 + (B.B/2) ch_0
    b_dot_ch1 = model.dot_Y(B.b, deg2[0]) - B.bC * deg2[1]
    out4 = deg4 - b_dot_ch1 + model.divisor_square(B) * deg0 / 2
    return ChernClass(out0, out2[0], out2[1], out4)


class TestSurfaceModel:
    def test_default_is_f1(self, model):
        assert model.rho == 1
        assert model.QY[0][0] == 1
        assert model.KY[0] == -3

    def test_parameter_passthrough(self):
        m = make_surface_model(1, ((2,),), (0,))
        assert m.QY[0][0] == 2 and m.KY[0] == 0

    def test_non_symmetric_rejected(self):
        with pytest.raises(ValueError):
            make_surface_model(2, ((1, 2), (3, 1)), (0, 0))

    def test_rho_positive(self):
        with pytest.raises(ValueError):
            make_surface_model(0, (), ())

    def test_intersection_rules(self, model):
        # f*D.C = 0, C.C = -1, f*D.f*D' = D.D'_Y on basis vectors
        fd = pullback_divisor(model, (Fraction(1),))
        c = c_multiple(model, Fraction(1))
        assert model.divisor_dot(fd, c) == 0
        assert model.divisor_dot(c, c) == -1
        assert model.divisor_dot(fd, fd) == model.dot_Y((1,), (1,))

    def test_canonical_X(self, model):
        kx = model.canonical_X()
        # C.K_X = -1 hence C.(-K_X) = 1
        c = c_multiple(model, Fraction(1))
        assert model.divisor_dot(c, kx) == -1

    def test_json_roundtrip(self, model):
        again = SurfaceModel.from_json(model.to_json())
        assert again == model


class TestChernCharacters:
    def test_skyscraper(self, model):
        assert skyscraper_class(model).key() == (0, (0,), 0, 1)

    def test_oc_zero(self, model):
        assert oc_class(model, 0).key() == (0, (0,), 1, Fraction(1, 2))

    def test_jh_difference_is_point(self, model):
        sky = skyscraper_class(model)
        for k in range(-10, 11):
            assert oc_class(model, k + 1) - oc_class(model, k) == sky

    def test_shift_sign(self, model):
        assert oc_class(model, 3, 1) == -oc_class(model, 3)
        assert oc_class(model, 3, 2) == oc_class(model, 3)

    def test_pullback_line(self, model):
        v = pullback_line_class(model, (Fraction(2),))
        assert v.key() == (1, (2,), 0, 2)

    def test_name_resolution(self, model):
        assert chern_of(model, "O_x") == skyscraper_class(model)
        assert chern_of(model, "O_C(-1)[1]") == -oc_class(model, -1)
        assert chern_of(model, "f*O_Y") == pullback_structure_class(model)
        with pytest.raises(ValueError):
            chern_of(model, "O_mystery")

    def test_euler_pairing_matches_p1_oracle(self, model):
        for k in range(-10, 11):
            assert euler_pairing_point_curve(k, model) == chi_p1_oracle(k)


class TestTwist:
    def test_skyscraper_invariant(self, model):
        sky = skyscraper_class(model)
        B = DivisorClass((Fraction(3, 2),), Fraction(-2, 3))
        assert twist(model, sky, B) == sky

    def test_structure_by_sC(self, model):
        s = Fraction(5, 7)
        v = twist(model, pullback_structure_class(model), c_multiple(model, s))
        assert v.key() == (1, (0,), -s, -s * s / 2)

    def test_identity(self, model):
        v = oc_class(model, 2)
        assert twist(model, v, DivisorClass((Fraction(0),), Fraction(0))) == v

    @given(r=st.integers(-5, 5), d=rationals, e=rationals, c2=rationals,
           b1=rationals, bc1=rationals, b2=rationals, bc2=rationals)
    @settings(max_examples=120, deadline=None)
    def test_group_action_exact(self, r, d, e, c2, b1, bc1, b2, bc2):
        model = default_model()
        v = ChernClass(Fraction(r), (d,), e, c2)
        B1 = DivisorClass((b1,), bc1)
        B2 = DivisorClass((b2,), bc2)
        assert twist(model, twist(model, v, B1), B2) == twist(model, v, B1 + B2)
        assert twist(model, twist(model, v, B1), -B1) == v

    @given(r=st.integers(-5, 5), d=rationals, e=rationals, c2=rationals,
           b=rationals, bc=rationals)
    @settings(max_examples=120, deadline=None)
    def test_matches_brute_force_exponential(self, r, d, e, c2, b, bc):
        model = default_model()
        v = ChernClass(Fraction(r), (d,), e, c2)
        B = DivisorClass((b,), bc)
        assert twist(model, v, B) == brute_twist(model, v, B)


class TestCatalog:
    def test_declared_factors_sum_to_class(self, model):
        cat = build_catalog(model)
        for obj in cat.values():
            for region in (REGION_GLUED, "geometric"):
                total = ChernClass.zero(model.rho)
                for _, _, cls in hn_factor_classes(model, obj, region, cat):
                    total = total + cls
                assert total == obj.chern, (obj.name, region)

    def test_shift_classes(self, model):
        cat = build_catalog(model)
        assert cat["O_C(-1)[1]"].chern == -cat["O_C(-1)"].chern
        assert cat["O_C(-1)[2]"].chern == cat["O_C(-1)"].chern

    def test_bound_is_configurable(self, model):
        cat = build_catalog(model, bound=3)
        assert "O_C(3)" in cat and "O_C(4)" not in cat

    def test_equal_class_aliases(self, model):
        cat = build_catalog(model)
        assert cat["f*O_y"].chern == cat["O_x_offC"].chern
