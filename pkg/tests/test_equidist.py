import cmath
import math
from fractions import Fraction

import mpmath
import pytest

from siegelfam import volumes
from siegelfam.bessel_measure import _class_group
from siegelfam.equidist import (
    EigenBlock,
    FamilyMember,
    IdentityDataError,
    RayClassData,
    WeightedFamily,
    a_d_lambda,
    basis_invariance_check,
    bessel_identity_check,
    c_k_d_lambda,
    ray_class_group,
    ray_class_order_formula,
    volume,
    weight_omega,
    weyl_sum,
)
from siegelfam.form_factory import (
    SiegelEisenstein,
    cusp_times_eisenstein,
    igusa_cusp_forms,
)
from siegelfam.fourier import FourierExpansion
from siegelfam.hecke import SatakeParams
from siegelfam.quadform import QuadForm


@pytest.fixture(scope="module")
def chis():
    return igusa_cusp_forms(64)


@pytest.fixture(scope="module")
def ch4():
    return _class_group(4).trivial_character()


class TestConstant:
    def test_d_lambda_ratio(self):
        cg = _class_group(23)
        triv = cg.trivial_character()
        nontriv = next(ch for ch in cg.characters if ch.order == 3)
        ratio = c_k_d_lambda(10, 23, triv) / c_k_d_lambda(10, 23, nontriv)
        assert ratio == pytest.approx(0.5, rel=1e-13)

    def test_gamma_recurrence(self):
        for k in (6, 10, 14):
            direct = c_k_d_lambda(k + 2, 4, _class_group(4).trivial_character())
            via = (c_k_d_lambda(k, 4, _class_group(4).trivial_character())
                   * (4 * math.pi) ** -4 * (k - 0.5) * (k - 1.5) * (k - 1) * (k - 2))
            assert direct == pytest.approx(via, rel=1e-12)

    def test_fifty_digit_oracle(self, ch4):
        mpmath.mp.dps = 50
        k, d = 10, 4
        oracle = (mpmath.sqrt(mpmath.pi) * (4 * mpmath.pi) ** (3 - 2 * k)
                  * mpmath.gamma(k - mpmath.mpf(3) / 2) * mpmath.gamma(k - 2)
                  * mpmath.mpf(1) ** (mpmath.mpf(3) / 2 - k) / (4 * 1))
        assert c_k_d_lambda(k, d, ch4) == pytest.approx(float(oracle), rel=1e-13)


class TestADLambda:
    def test_d4_is_identity_coefficient(self, chis, ch4):
        chi10, _ = chis
        assert a_d_lambda(chi10, 4, ch4) == complex(chi10.coefficient(QuadForm(1, 0, 1)))

    def test_linear(self, chis, ch4):
        chi10, _ = chis
        doubled = chi10.scaled(2)
        assert a_d_lambda(doubled, 4, ch4) == 2 * a_d_lambda(chi10, 4, ch4)

    def test_representative_independence(self, chis):
        # recompute with transformed (non-reduced) representatives: the
        # coefficient lookup reduces internally, so values must agree
        chi10, _ = chis
        cg = _class_group(23)
        for ch in cg.characters:
            total = 0j
            for form in cg.elements:
                moved = form.transform(((1, 0), (3, 1)))
                total += ch.value(form).conjugate() * complex(chi10.coefficient(moved))
            assert abs(total - a_d_lambda(chi10, 23, ch)) < 1e-12


class TestVolume:
    def test_enumerated_index_matches(self):
        assert volumes.gamma0_index_enumerated(2) == volumes.gamma0_index(2)

    def test_volume_ratio_n2(self):
        assert volume(2) / volume(1) == pytest.approx(15.0, rel=1e-14)

    def test_n_cubed_window(self):
        vals = [volume(n) / n ** 3 for n in (1, 2, 3, 5, 6)]
        assert max(vals) / min(vals) < 4.0


class TestWeightOmega:
    def test_scale_invariance(self, chis, ch4):
        chi10, _ = chis
        base = weight_omega(chi10, 1, 10, 4, ch4, petersson_norm=2.5)
        for alpha in (Fraction(3), Fraction(-7, 2), Fraction(1, 12)):
            scaled = chi10.scaled(alpha)
            norm = 2.5 * float(alpha) ** 2
            val = weight_omega(scaled, 1, 10, 4, ch4, petersson_norm=norm)
            assert val == pytest.approx(base, rel=1e-12)

    def test_level_raising(self, chis, ch4):
        chi10, _ = chis
        w1 = weight_omega(chi10, 1, 10, 4, ch4, petersson_norm=1.0)
        w6 = weight_omega(chi10, 6, 10, 4, ch4, petersson_norm=1.0)
        assert w6 == pytest.approx(w1 * volume(1) / volume(6), rel=1e-13)

    def test_zero_coefficient_gives_zero(self, ch4):
        f = FourierExpansion(10, 1, 4, {QuadForm(1, 1, 1): Fraction(5)})
        assert weight_omega(f, 1, 10, 4, ch4, petersson_norm=1.0) == 0

    def test_missing_norm_rejected(self, chis, ch4):
        chi10, _ = chis
        with pytest.raises(ValueError):
            weight_omega(chi10, 1, 10, 4, ch4, petersson_norm=0.0)


def tempered(t1, t2):
    return SatakeParams(cmath.exp(1j * t1), cmath.exp(1j * t2))


class TestWeylSum:
    def test_zero_indices_total_mass(self, ch4):
        fam = WeightedFamily(k=10, level=1, primes=(2, 3), d=4, character=ch4)
        fam.members = [
            FamilyMember("a", None, {2: tempered(1, 2), 3: tempered(0.5, 0.7)}, 0.25),
            FamilyMember("b", None, {2: tempered(0.3, 3.0), 3: tempered(1.5, 2.5)}, 0.5),
        ]
        out = weyl_sum(fam, {})
        assert out["value"] == pytest.approx(0.75)
        assert out["target"] == 1.0

    def test_empty_family(self, ch4):
        fam = WeightedFamily(k=10, level=1, primes=(2,), d=4, character=ch4)
        out = weyl_sum(fam, {2: (1, 0)})
        assert out["value"] == 0
        assert out["target"] == 0.0

    def test_error_scale_fields(self, ch4):
        fam = WeightedFamily(k=10, level=2, primes=(2, 3), d=4, character=ch4)
        out = weyl_sum(fam, {2: (0, 1), 3: (2, 0)})
        assert out["L"] == 9 and out["M"] == 2
        assert out["error_scale"] == pytest.approx(
            0.5 * 10 ** (-2 / 3) * 9 ** 1.01 * 2 ** 1.51)


class TestRayClass:
    def test_m1_is_class_group(self):
        rc = ray_class_group(23, 1)
        assert rc.order == 3
        assert all(rc.images[e] == e for e in rc.elements)

    @pytest.mark.parametrize("d,m", [(4, 3), (4, 2), (3, 2), (3, 5), (23, 2), (23, 3)])
    def test_order_formula(self, d, m):
        rc = ray_class_group(d, m)
        assert rc.order == ray_class_order_formula(d, m)

    @pytest.mark.parametrize("d,m", [(4, 3), (23, 2)])
    def test_surjection_kernel_size(self, d, m):
        rc = ray_class_group(d, m)
        cg = _class_group(d)
        fibers = {}
        for e in rc.elements:
            fibers.setdefault(rc.images[e], 0)
            fibers[rc.images[e]] += 1
        assert set(fibers) == set(cg.elements)  # surjective
        expected = rc.order // cg.h
        assert all(v == expected for v in fibers.values())

    def test_composite_modulus_rejected(self):
        with pytest.raises(ValueError):
            ray_class_group(4, 6)


class TestBesselIdentity:
    def test_lm_one_exact_zero(self, chis, ch4):
        chi10, _ = chis
        lhs, rhs, err = bessel_identity_check(chi10, 10, 2, 1, 1, 4, ch4)
        assert err == 0.0
        assert lhs == rhs

    @pytest.mark.parametrize("L,p", [(2, 2), (3, 3), (4, 2)])
    def test_chi10_criterion_cells(self, chis, ch4, L, p):
        chi10, _ = chis
        lhs, rhs, err = bessel_identity_check(chi10, 10, p, L, 1, 4, ch4)
        assert err <= 1e-9

    @pytest.mark.parametrize("L,p", [(2, 2), (3, 3), (4, 2)])
    def test_chi12_criterion_cells(self, chis, ch4, L, p):
        _, chi12 = chis
        lhs, rhs, err = bessel_identity_check(chi12, 12, p, L, 1, 4, ch4)
        assert err <= 1e-9

    def test_modulus_case_u01(self, chis, ch4):
        chi10, chi12 = chis
        for f, k in ((chi10, 10), (chi12, 12)):
            lhs, rhs, err = bessel_identity_check(f, k, 2, 1, 2, 4, ch4)
            assert err <= 1e-9

    def test_d23_with_characters(self, chis):
        # all three class group characters of d = 23, (L, M) = (2, 1)
        chi10, _ = chis
        cg = _class_group(23)
        for ch in cg.characters:
            lhs, rhs, err = bessel_identity_check(chi10, 10, 2, 2, 1, 23, ch)
            assert err <= 1e-9, (ch.order, err)

    def test_truncation_error(self, ch4):
        small = FourierExpansion(10, 1, 1, {QuadForm(1, 0, 1): Fraction(1)})
        with pytest.raises(IdentityDataError):
            bessel_identity_check(small, 10, 2, 4, 1, 4, ch4,
                                  satake=tempered(1.0, 2.0))


@pytest.fixture(scope="module")
def s16_pair():
    chi10, chi12 = igusa_cusp_forms(16)
    e4 = SiegelEisenstein(4, 16)
    e6 = SiegelEisenstein(6, 16)
    f1 = cusp_times_eisenstein(chi12, e4, 4, label="E4chi12")
    f2 = cusp_times_eisenstein(chi10, e6, 4, label="E6chi10")
    return f1, f2


class TestBasisInvariance:
    def block(self, f1, f2):
        return EigenBlock(
            expansions=[f1, f2],
            satake={2: tempered(1.1, 2.0), 3: tempered(0.4, 2.8)})

    def test_scalar_rescale(self, s16_pair, ch4):
        f1, f2 = s16_pair
        blocks = [EigenBlock([f1], {2: tempered(1.0, 2.0)}),
                  EigenBlock([f2], {2: tempered(0.5, 1.5)})]
        phase = cmath.exp(0.3j)
        mixing = [[phase, 0], [0, 1]]
        ok, diff = basis_invariance_check(blocks, mixing, 1, 16, 4, ch4)
        assert ok, diff

    def test_rotation_within_block(self, s16_pair, ch4):
        f1, f2 = s16_pair
        blocks = [self.block(f1, f2)]
        c, s = math.cos(0.62), math.sin(0.62)
        mixing = [[c, -s], [s, c]]
        ok, diff = basis_invariance_check(blocks, mixing, 1, 16, 4, ch4)
        assert ok, diff

    def test_complex_unitary_within_block(self, s16_pair, ch4):
        f1, f2 = s16_pair
        blocks = [self.block(f1, f2)]
        c, s = math.cos(1.1), math.sin(1.1)
        phase = cmath.exp(0.77j)
        mixing = [[c * phase, -s], [s, c * phase.conjugate()]]
        ok, diff = basis_invariance_check(blocks, mixing, 1, 16, 4, ch4)
        assert ok, diff

    def test_cross_block_mixing_rejected(self, s16_pair, ch4):
        f1, f2 = s16_pair
        blocks = [EigenBlock([f1], {2: tempered(1.0, 2.0)}),
                  EigenBlock([f2], {2: tempered(0.5, 1.5)})]
        c, s = math.cos(0.5), math.sin(0.5)
        mixing = [[c, -s], [s, c]]
        with pytest.raises(ValueError):
            basis_invariance_check(blocks, mixing, 1, 16, 4, ch4)

    def test_non_unitary_rejected(self, s16_pair, ch4):
        f1, f2 = s16_pair
        blocks = [self.block(f1, f2)]
        with pytest.raises(ValueError):
            basis_invariance_check(blocks, [[1, 1], [0, 1]], 1, 16, 4, ch4)
