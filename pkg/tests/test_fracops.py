import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracbvp.errors import InvalidArgument
from fracbvp.fracgrid import grid_fn, make_grid, sample
from fracbvp.fracops import FracOrder, caputo_diff, frac_sum
from fracbvp.specfun import falling_factorial

ORDER_SWEEP = [2.1, 2.5, 8.0 / 3.0, 2.9, 3.0]


def caputo_reference(vals, v):
    """Explicit double-sum evaluation with math.gamma, independent of the
    frac_sum/delta composition."""
    n = math.ceil(v)
    mu = n - v
    m = len(vals)
    d_n = np.array(
        [
            sum((-1) ** (n - j) * math.comb(n, j) * vals[i + j] for j in range(n + 1))
            for i in range(m - n)
        ]
    )
    if mu == 0:
        return d_n
    out = np.zeros(m - n)
    for k in range(m - n):
        acc = 0.0
        for i in range(k + 1):
            d = k - i
            acc += math.gamma(mu + d) / math.gamma(d + 1) * d_n[i]
        out[k] = acc / math.gamma(mu)
    return out


class TestFracOrder:
    def test_ceiling(self):
        assert FracOrder.of(2.5) == FracOrder(2.5, 3)
        assert FracOrder.of(3.0).integer
        assert not FracOrder.of(8.0 / 3.0).integer

    def test_positive_only(self):
        with pytest.raises(InvalidArgument):
            FracOrder.of(0.0)
        with pytest.raises(InvalidArgument):
            FracOrder.of(-1.5)

    @given(st.floats(min_value=1e-6, max_value=10.0))
    @settings(deadline=None)
    def test_bracket(self, v):
        order = FracOrder.of(v)
        assert order.n - 1 < order.v <= order.n


class TestFracSum:
    def test_zero_in_zero_out(self):
        out = frac_sum(grid_fn(0.0, np.zeros(6)), 1.7)
        assert np.all(out.values == 0.0)
        assert out.grid.offset == pytest.approx(1.7)

    def test_order_one_is_cumulative_sum(self):
        out = frac_sum(grid_fn(0.0, np.ones(6)), 1.0)
        assert out.values == pytest.approx(np.arange(1.0, 7.0), rel=1e-13)

    def test_half_order_of_ones_matches_power_rule(self):
        # sum of 1 from 0 equals t^(v) / Gamma(v+1); expected values built from
        # half-integer Gamma products, independent of the library kernel
        out = frac_sum(grid_fn(0.0, np.ones(8)), 0.5)

        def gamma_at_k_plus_three_halves(k):
            p = math.sqrt(math.pi)
            x = 0.5
            for _ in range(k + 1):
                p *= x
                x += 1.0
            return p

        expected = [
            gamma_at_k_plus_three_halves(k) / math.factorial(k) / math.gamma(1.5)
            for k in range(8)
        ]
        assert out.values == pytest.approx(expected, rel=1e-12)
        assert out.grid.offset == pytest.approx(0.5)

    def test_each_point_uses_only_earlier_inputs(self):
        base = grid_fn(0.0, np.ones(6))
        bumped = grid_fn(0.0, np.array([1.0, 1.0, 1.0, 1.0, 1.0, 50.0]))
        a = frac_sum(base, 0.7)
        b = frac_sum(bumped, 0.7)
        assert a.values[:5] == pytest.approx(b.values[:5], rel=1e-15)
        assert a.values[5] != b.values[5]

    def test_order_must_be_positive(self):
        with pytest.raises(InvalidArgument):
            frac_sum(grid_fn(0.0, np.ones(3)), 0.0)

    def test_linearity(self, rng):
        f = grid_fn(-0.5, rng.normal(size=9))
        g = grid_fn(-0.5, rng.normal(size=9))
        lhs = frac_sum(2.5 * f + (-1.25) * g, 1.3)
        rhs = 2.5 * frac_sum(f, 1.3) + (-1.25) * frac_sum(g, 1.3)
        assert lhs.values == pytest.approx(rhs.values, rel=1e-12, abs=1e-12)


class TestCaputoDiff:
    def test_annihilates_constants(self):
        out = caputo_diff(grid_fn(0.3, np.full(9, 4.2)), 2.5)
        assert np.max(np.abs(out.values)) <= 1e-12

    def test_annihilates_quadratic_falling_polynomial(self):
        a = -0.4
        f = sample(lambda t: falling_factorial(t - a, 2.0), make_grid(a, 10))
        out = caputo_diff(f, 2.5)
        assert np.max(np.abs(out.values)) <= 1e-10

    def test_integer_order_cubic(self):
        a = 0.0
        f = sample(lambda t: falling_factorial(t - a, 3.0), make_grid(a, 8))
        out = caputo_diff(f, 3.0)
        assert out.values == pytest.approx(np.full(5, 6.0), rel=1e-11)
        assert out.grid.offset == a

    def test_matches_explicit_double_sum(self, rng):
        a = 8.0 / 3.0 - 3.0
        vals = rng.normal(size=12)
        got = caputo_diff(grid_fn(a, vals), 8.0 / 3.0)
        ref = caputo_reference(vals, 8.0 / 3.0)
        assert got.values == pytest.approx(ref, rel=1e-12, abs=1e-12)
        assert got.grid.offset == pytest.approx(a + 1.0 / 3.0)
        assert got.grid.count == 9

    def test_needs_enough_points(self):
        with pytest.raises(InvalidArgument):
            caputo_diff(grid_fn(0.0, np.ones(3)), 2.5)

    def test_linearity(self, rng):
        f = grid_fn(0.0, rng.normal(size=10))
        g = grid_fn(0.0, rng.normal(size=10))
        lhs = caputo_diff(0.7 * f + 3.0 * g, 2.2)
        rhs = 0.7 * caputo_diff(f, 2.2) + 3.0 * caputo_diff(g, 2.2)
        assert lhs.values == pytest.approx(rhs.values, rel=1e-12, abs=1e-12)


class TestInversion:
    @pytest.mark.parametrize("v", ORDER_SWEEP)
    def test_sum_of_caputo_differs_by_quadratic(self, v, rng):
        # frac_sum(caputo_diff(f), v) - f extends a combination of the falling
        # monomials of degree <= 2: fit on three points, predict the rest
        a = -0.5
        vals = rng.normal(size=12)
        z = frac_sum(caputo_diff(grid_fn(a, vals), v), v)
        assert z.grid.offset == pytest.approx(a + 3.0)
        r = z.values - vals[3:]
        ks = np.arange(3.0, 12.0)
        basis = np.stack([np.ones(9), ks, ks * (ks - 1.0)], axis=1)
        coeffs = np.linalg.solve(basis[:3], r[:3])
        pred = basis @ coeffs
        scale = max(1.0, float(np.max(np.abs(r))))
        assert np.max(np.abs(pred - r)) <= 1e-8 * scale

    @pytest.mark.parametrize("v", ORDER_SWEEP)
    def test_annihilation_of_low_degree(self, v, rng):
        a = 0.25
        coeffs = rng.normal(size=3)
        grid = make_grid(a, 12)
        f = sample(
            lambda t: sum(c * falling_factorial(t - a, k) for k, c in enumerate(coeffs)),
            grid,
        )
        out = caputo_diff(f, v)
        assert np.max(np.abs(out.values)) <= 1e-10
