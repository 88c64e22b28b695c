import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from siegelfam import volumes
from siegelfam.fourier import (
    FormatError,
    FourierExpansion,
    TruncationError,
    linear_combine,
    load,
    petersson_pairing_constant,
    reduced_keys_up_to,
    save,
)
from siegelfam.quadform import QuadForm, gl2_reduce

SMALL_SL2 = [
    ((a, b), (c, d))
    for a in range(-2, 3)
    for b in range(-2, 3)
    for c in range(-2, 3)
    for d in range(-2, 3)
    if a * d - b * c == 1
]


def sample_expansion():
    coeffs = {
        QuadForm(1, 1, 1): Fraction(1),
        QuadForm(1, 0, 1): Fraction(-2),
        QuadForm(1, 1, 2): Fraction(3, 7),
    }
    return FourierExpansion(10, 1, 8, coeffs, label="sample")


class TestLookup:
    def test_stored_key(self):
        f = sample_expansion()
        assert f.coefficient(QuadForm(1, 1, 1)) == 1

    def test_transformed_key(self):
        f = sample_expansion()
        t = QuadForm(1, 1, 2).transform(((1, 0), (2, 1)))
        assert f.coefficient(t) == Fraction(3, 7)

    def test_out_of_bound_is_error(self):
        f = sample_expansion()
        with pytest.raises(TruncationError):
            f.coefficient(QuadForm(3, 0, 3))

    def test_missing_key_within_bound_is_zero(self):
        f = sample_expansion()
        assert f.coefficient(QuadForm(1, 0, 2)) == 0

    def test_rejects_non_reduced_key(self):
        with pytest.raises(ValueError):
            FourierExpansion(10, 1, 8, {QuadForm(2, 1, 1): Fraction(1)})

    @given(st.sampled_from(reduced_keys_up_to(32)), st.sampled_from(SMALL_SL2))
    @settings(max_examples=300)
    def test_reduction_invariance(self, key, mat):
        f = FourierExpansion(10, 1, 8, {k: Fraction(i + 1) for i, k in
                                        enumerate(reduced_keys_up_to(32))})
        t = key.transform(mat)
        assert f.coefficient(t) == f.coefficient(key)


class TestLinearCombine:
    def test_identity(self):
        f = sample_expansion()
        g = FourierExpansion(10, 1, 8, {QuadForm(1, 0, 1): Fraction(5)})
        out = linear_combine([(1, f), (0, g)])
        assert out.coeffs == f.coeffs

    def test_cancellation(self):
        f = sample_expansion()
        out = linear_combine([(1, f), (-1, f)])
        assert out.coeffs == {}

    def test_doubling(self):
        f = sample_expansion()
        out = linear_combine([(2, f)])
        assert all(out.coefficient(k) == 2 * v for k, v in f.coeffs.items())

    def test_mismatch_rejected(self):
        f = sample_expansion()
        g = FourierExpansion(12, 1, 8, {})
        with pytest.raises(ValueError):
            linear_combine([(1, f), (1, g)])


class TestIO:
    def test_round_trip(self, tmp_path):
        f = sample_expansion()
        path = tmp_path / "f.txt"
        save(f, path)
        g = load(path)
        assert g == f
        assert g.label == "sample"
        # bit-exact second pass
        path2 = tmp_path / "g.txt"
        save(g, path2)
        assert path.read_text() == path2.read_text()

    def test_rational_value_parses_exactly(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("# k=10\n# N=1\n# detBound=8\n1 1 1 : -3/7\n")
        f = load(path)
        assert f.coefficient(QuadForm(1, 1, 1)) == Fraction(-3, 7)

    def test_non_reduced_key_rejected(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("# k=10\n# N=1\n# detBound=8\n2 1 1 : 1\n")
        with pytest.raises(FormatError) as err:
            load(path)
        assert ":4:" in str(err.value)

    def test_det_over_bound_rejected(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("# k=10\n# N=1\n# detBound=1\n1 0 2 : 1\n")
        with pytest.raises(FormatError):
            load(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("# k=10\n1 0 1 : 1\n")
        with pytest.raises(FormatError):
            load(path)


def mp_petersson(k, level, q):
    det_q = mpmath.mpf(q.det4) / 4
    vol = mpmath.pi ** 3 / 270 * volumes.gamma0_index(level)
    return (2 / vol * mpmath.sqrt(mpmath.pi) * (4 * mpmath.pi) ** (3 - 2 * k)
            * mpmath.gamma(k - mpmath.mpf(3) / 2) * mpmath.gamma(k - 2)
            * det_q ** (mpmath.mpf(3) / 2 - k))


class TestPeterssonConstant:
    def test_det_ratio(self):
        q1, q2 = QuadForm(1, 0, 1), QuadForm(1, 0, 2)
        c1 = petersson_pairing_constant(10, 1, q1)
        c2 = petersson_pairing_constant(10, 1, q2)
        expected = float(q1.det / q2.det) ** (-10 + 1.5)
        assert c1.value / c2.value == pytest.approx(expected, rel=1e-12)

    def test_gamma_recurrence(self):
        # c(k+2)/c(k) = (4pi)^-4 (k-1/2)(k-3/2)(k-1)(k-2) det(Q)^-2
        q = QuadForm(1, 1, 1)
        for k in (6, 8, 10, 16):
            c1 = petersson_pairing_constant(k, 1, q)
            c2 = petersson_pairing_constant(k + 2, 1, q)
            ratio = ((4 * math.pi) ** -4 * (k - 0.5) * (k - 1.5) * (k - 1) * (k - 2)
                     * float(q.det) ** -2)
            assert c2.value / c1.value == pytest.approx(ratio, rel=1e-12)

    def test_against_high_precision_oracle(self):
        mpmath.mp.dps = 50
        q = QuadForm(1, 0, 1)
        c = petersson_pairing_constant(10, 1, q)
        oracle = float(mp_petersson(10, 1, q))
        assert c.value == pytest.approx(oracle, rel=1e-13)

    def test_decreasing_in_det(self):
        prev = None
        for q in [QuadForm(1, 1, 1), QuadForm(1, 0, 1), QuadForm(1, 0, 2),
                  QuadForm(2, 1, 3), QuadForm(3, 1, 5)]:
            c = petersson_pairing_constant(8, 2, q)
            if prev is not None:
                assert c.value < prev
            prev = c.value

    def test_weight_bound(self):
        with pytest.raises(ValueError):
            petersson_pairing_constant(4, 1, QuadForm(1, 0, 1))


class TestVolumes:
    def test_siegel_constant(self):
        assert volumes.SIEGEL_VOLUME_SP4 == pytest.approx(math.pi ** 3 / 270, rel=1e-15)

    def test_index_n2_against_enumeration(self):
        assert volumes.sp4_f2_order() == 720
        assert volumes.gamma0_index_enumerated(2) == volumes.gamma0_index(2) == 15

    def test_index_multiplicative(self):
        assert volumes.gamma0_index(6) == volumes.gamma0_index(2) * volumes.gamma0_index(3)

    def test_volume_growth(self):
        ratios = [volumes.volume(n) / n ** 3 for n in (1, 2, 3, 5, 6)]
        assert max(ratios) / min(ratios) < 4  # consistent with N^3 up to constants
