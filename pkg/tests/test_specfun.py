import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fracbvp.errors import InvalidArgument, PoleError, UndefinedValue
from fracbvp.specfun import SignedLog, falling_factorial, is_gamma_pole, log_gamma_signed


class TestSignedLog:
    def test_zero_round_trip(self):
        z = SignedLog.from_float(0.0)
        assert z.sign == 0
        assert z.to_float() == 0.0

    @given(st.floats(min_value=1e-300, max_value=1e300).flatmap(
        lambda m: st.sampled_from([m, -m])))
    @settings(deadline=None)
    def test_round_trip(self, x):
        sl = SignedLog.from_float(x)
        back = sl.to_float()
        assert math.copysign(1.0, back) == math.copysign(1.0, x)
        # exp turns each ulp of log_abs into |log x| relative ulps of the value
        assert back == pytest.approx(x, rel=(4.0 + abs(sl.log_abs)) * 2.3e-16)
        # the log representation itself is reproduced to within an ulp
        again = SignedLog.from_float(back)
        assert again.sign == sl.sign
        assert again.log_abs == pytest.approx(sl.log_abs, rel=1e-15, abs=5e-16)

    def test_arithmetic(self):
        a = SignedLog.from_float(-6.0)
        b = SignedLog.from_float(2.0)
        assert (a * b).to_float() == pytest.approx(-12.0, rel=1e-15)
        assert (a / b).to_float() == pytest.approx(-3.0, rel=1e-15)
        assert (SignedLog.from_float(0.0) * a).sign == 0


class TestIsGammaPole:
    def test_examples(self):
        assert is_gamma_pole(0.0, 1e-9)
        assert is_gamma_pole(-2.0 + 1e-12, 1e-9)
        assert not is_gamma_pole(0.5, 1e-9)
        assert not is_gamma_pole(3.0, 1e-9)
        assert is_gamma_pole(-7.0, 1e-9)

    def test_positive_values_measure_distance_to_zero(self):
        assert not is_gamma_pole(1.0, 0.5)
        assert is_gamma_pole(0.3, 0.4)

    def test_tol_must_be_positive(self):
        with pytest.raises(InvalidArgument):
            is_gamma_pole(1.0, 0.0)


class TestLogGammaSigned:
    def test_factorial_point(self):
        r = log_gamma_signed(5.0)
        assert r.sign == 1
        assert r.log_abs == pytest.approx(math.log(24.0), rel=1e-14)

    def test_half(self):
        # Gamma(1/2)^2 = pi by the reflection identity
        r = log_gamma_signed(0.5)
        assert r.sign == 1
        assert r.log_abs == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)

    def test_negative_half(self):
        # Gamma(-1/2) = -2 sqrt(pi) from Gamma(1/2) = -1/2 * Gamma(-1/2)
        r = log_gamma_signed(-0.5)
        assert r.sign == -1
        assert r.log_abs == pytest.approx(math.log(2.0) + 0.5 * math.log(math.pi), rel=1e-14)

    @pytest.mark.parametrize("x", [0.0, -3.0, -1.0, -2.0 + 1e-13])
    def test_poles(self, x):
        with pytest.raises(PoleError):
            log_gamma_signed(x)

    def test_non_finite(self):
        with pytest.raises(InvalidArgument):
            log_gamma_signed(math.inf)

    def test_sign_alternates_per_unit_interval(self):
        for k in range(10):
            assert log_gamma_signed(-k - 0.5).sign == (-1) ** (k + 1)

    @given(st.floats(min_value=0.05, max_value=50.0))
    @settings(deadline=None)
    def test_matches_gamma_on_positives(self, x):
        assert math.exp(log_gamma_signed(x).log_abs) == pytest.approx(
            math.gamma(x), rel=1e-12
        )


class TestFallingFactorial:
    def test_integer_case(self):
        assert falling_factorial(5.0, 2.0) == pytest.approx(20.0, rel=1e-12)

    def test_zero_exponent(self):
        assert falling_factorial(3.7, 0.0) == pytest.approx(1.0, rel=1e-14)

    def test_half_integer(self):
        # Gamma(3.5)/Gamma(2) = 2.5 * 1.5 * 0.5 * sqrt(pi)
        expected = 1.875 * math.sqrt(math.pi)
        assert falling_factorial(2.5, 1.5) == pytest.approx(expected, rel=1e-13)

    def test_denominator_pole_gives_zero(self):
        v = 2.6
        assert falling_factorial(v - 3.0, v - 2.0) == 0.0

    def test_numerator_pole_is_undefined(self):
        with pytest.raises(UndefinedValue):
            falling_factorial(-2.0, 0.5)

    def test_double_pole_is_undefined(self):
        with pytest.raises(UndefinedValue):
            falling_factorial(-1.0, 2.0)

    def test_non_finite(self):
        with pytest.raises(InvalidArgument):
            falling_factorial(math.nan, 1.0)

    def test_integer_agreement(self):
        for t in range(0, 21):
            for v in range(0, t + 1):
                exact = math.prod(range(t, t - v, -1)) if v else 1
                assert falling_factorial(float(t), float(v)) == pytest.approx(
                    exact, rel=1e-12
                )

    def test_pole_convention_on_grid(self):
        # k + 1 - v within 1e-12 of a nonpositive integer while k + 1 is not
        v = 2.6
        for j in range(3):  # t + 1 - v = j - 2 in {-2, -1, 0}
            assert falling_factorial(v - 3.0 + j, v) == 0.0

    @given(
        st.floats(min_value=-10.0, max_value=25.0),
        st.floats(min_value=-4.0, max_value=8.0),
    )
    @settings(deadline=None, max_examples=300)
    def test_recurrence(self, t, v):
        # (t+1)^(v) = (t+1)/(t+1-v) * t^(v), away from poles and the zero divisor
        for arg in (t + 1.0, t + 2.0, t + 1.0 - v, t + 2.0 - v):
            assume(not is_gamma_pole(arg, 1e-3))
        assume(abs(t + 1.0 - v) > 1e-2)
        lhs = falling_factorial(t + 1.0, v)
        rhs = (t + 1.0) / (t + 1.0 - v) * falling_factorial(t, v)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    @given(
        st.floats(min_value=-5.0, max_value=20.0),
        st.floats(min_value=-3.0, max_value=6.0),
    )
    @settings(deadline=None, max_examples=300)
    def test_power_rule(self, t, v):
        # first difference of t^(v) is v * t^(v-1)
        for arg in (t + 1.0, t + 2.0, t + 1.0 - v, t + 2.0 - v):
            assume(not is_gamma_pole(arg, 1e-3))
        a = falling_factorial(t + 1.0, v)
        b = falling_factorial(t, v)
        c = v * falling_factorial(t, v - 1.0)
        assert abs((a - b) - c) <= 1e-9 * (abs(a) + abs(b) + abs(c) + 1.0)
