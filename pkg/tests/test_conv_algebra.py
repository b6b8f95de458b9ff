"""
卷积代数测试
"""
import cmath
import os
import sys
import unittest

import numpy as np

# 添加项目根目录到Python路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.data_models import GenChar
from services.characters import direct_sum, evaluate
from services.conv_algebra import (
    DiracOnContinuousFactorError, GridMisalignedError, StepMismatchError, convolve, delta, element_at,
    from_values, gelfand_transform, grid_points, indicator, l1_norm, linear_combination, point_masses,
    support_bounds, tensor_product, tent, translate, translation_l1_distance, translation_modulus,
)
from services.group_model import SpecMismatchError, add, make_element, make_group


MIXED = make_group(1, 1, [3])


def relative_gap(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


class TestConstruction(unittest.TestCase):
    """函数构造测试类"""

    def test_indicator_half_open(self):
        """1_[0,1) 在 h=0.1 下取 j=0..9"""
        f = indicator(0.1, 0.0, 1.0)
        self.assertEqual(f.values.shape, (10,))
        self.assertEqual(f.real_offset, (0,))
        self.assertEqual(f.extents, (9,))
        self.assertAlmostEqual(l1_norm(f), 1.0, places=12)

    def test_indicator_empty_interval(self):
        with self.assertRaises(ValueError):
            indicator(0.1, 0.5, 0.5)

    def test_tent(self):
        f = tent(0.25, 1.0)
        np.testing.assert_allclose(f.values.real, [0, 0.25, 0.5, 0.75, 1, 0.75, 0.5, 0.25, 0])
        self.assertEqual(support_bounds(f), [(-1.0, 1.0)])

    def test_delta_on_real_factor_rejected(self):
        with self.assertRaises(DiracOnContinuousFactorError):
            delta(MIXED, make_element(MIXED, [0.0], [0], [0]))

    def test_from_values_shape_mismatch(self):
        with self.assertRaises(SpecMismatchError):
            from_values(MIXED, np.ones((2, 2)), real_step=(0.1,))

    def test_grid_points(self):
        group = make_group(0, 1, [2])
        f = point_masses(group, {make_element(group, (), [-1], [1]): 2.0, make_element(group, (), [1], [0]): 1.0})
        points = grid_points(f)
        self.assertEqual(len(points), 6)
        self.assertEqual(points[0], make_element(group, (), [-1], [0]))
        self.assertEqual(f.values[element_index(f, make_element(group, (), [-1], [1]))], 2.0)


def element_index(f, t):
    for index in np.ndindex(f.values.shape):
        if element_at(f, index) == t:
            return index
    raise KeyError(t)


class TestConvolution(unittest.TestCase):
    """卷积与 Gel'fand 变换测试类"""

    def setUp(self):
        self.rng = np.random.default_rng(2024)

    def random_function(self, shape, offsets):
        values = self.rng.normal(size=shape) + 1j * self.rng.normal(size=shape)
        return from_values(MIXED, values, real_step=(0.1,), real_offset=(offsets[0],), int_offset=(offsets[1],))

    def random_character(self):
        z = complex(self.rng.uniform(-1, 1), self.rng.uniform(-3, 3))
        w = self.rng.uniform(0.7, 1.4) * cmath.exp(1j * self.rng.uniform(0, 6.3))
        return GenChar(MIXED, (z,), (w,), (int(self.rng.integers(0, 3)),))

    def test_convolution_theorem(self):
        """(f*g)^(α) = f̂(α)·ĝ(α)"""
        for _ in range(20):
            f = self.random_function((5, 3, 3), (-2, 1))
            g = self.random_function((4, 2, 3), (3, -1))
            alpha = self.random_character()
            lhs = gelfand_transform(convolve(f, g), alpha)
            rhs = gelfand_transform(f, alpha) * gelfand_transform(g, alpha)
            self.assertLess(relative_gap(lhs, rhs), 1e-9)

    def test_square_identity(self):
        """(f*f)^(α) = f̂(α)²，且 τ_s f * τ_{−s} f = f * f"""
        f = self.random_function((6, 2, 3), (0, 0))
        alpha = self.random_character()
        self.assertLess(relative_gap(gelfand_transform(convolve(f, f), alpha),
                                     gelfand_transform(f, alpha) ** 2), 1e-9)
        s = make_element(MIXED, [0.3], [2], [1])
        shifted = convolve(translate(f, s), translate(f, make_element(MIXED, [-0.3], [-2], [2])))
        square = convolve(f, f)
        self.assertEqual(shifted.offsets, square.offsets)
        np.testing.assert_allclose(shifted.values, square.values, rtol=0, atol=1e-12)

    def test_binomial_on_integers(self):
        """(δ₀ + δ₁) * (δ₀ + δ₁) = δ₀ + 2δ₁ + δ₂"""
        group = make_group(0, 1)
        f = from_values(group, [1.0, 1.0])
        square = convolve(f, f)
        self.assertEqual(square.offsets, (0,))
        np.testing.assert_array_equal(square.values.real, [1.0, 2.0, 1.0])

    def test_convolution_theorem_random_integers(self):
        """ℤ 上支撑 ≤ 32 的 100 个随机函数对"""
        group = make_group(0, 1)
        for _ in range(100):
            f, g = (from_values(group, self.rng.normal(size=n) + 1j * self.rng.normal(size=n),
                                int_offset=(int(self.rng.integers(-10, 10)),))
                    for n in self.rng.integers(1, 33, size=2))
            alpha = GenChar(group, (), (self.rng.uniform(0.8, 1.25) * cmath.exp(1j * self.rng.uniform(0, 6.3)),))
            fa, ga = gelfand_transform(f, alpha), gelfand_transform(g, alpha)
            gap = abs(gelfand_transform(convolve(f, g), alpha) - fa * ga)
            self.assertLessEqual(gap, 1e-9 * (1 + abs(fa) * abs(ga)))

    def test_convolution_theorem_random_real_line(self):
        """ℝ 网格 h=0.01 上不超过 512 个样本的 100 个随机函数对"""
        group = make_group(1, 0)
        for _ in range(100):
            f, g = (from_values(group, self.rng.normal(size=n) + 1j * self.rng.normal(size=n), real_step=(0.01,),
                                real_offset=(int(self.rng.integers(-300, 300)),))
                    for n in self.rng.integers(1, 513, size=2))
            alpha = GenChar(group, (complex(self.rng.uniform(-1, 1), self.rng.uniform(-20, 20)),))
            fa, ga = gelfand_transform(f, alpha), gelfand_transform(g, alpha)
            gap = abs(gelfand_transform(convolve(f, g), alpha) - fa * ga)
            self.assertLessEqual(gap, 1e-9 * (1 + abs(fa) * abs(ga)))

    def test_translation_identity(self):
        """[τ_t f]^(α) = α(t)·f̂(α)"""
        f = self.random_function((5, 3, 3), (1, 2))
        for _ in range(10):
            alpha = self.random_character()
            t = make_element(MIXED, [0.1 * int(self.rng.integers(-20, 20))],
                             [int(self.rng.integers(-5, 5))], [int(self.rng.integers(0, 3))])
            lhs = gelfand_transform(translate(f, t), alpha)
            rhs = evaluate(alpha, t) * gelfand_transform(f, alpha)
            self.assertLess(relative_gap(lhs, rhs), 1e-10)

    def test_transform_matches_pointwise_sum(self):
        """张量缩并与逐点求和一致"""
        f = self.random_function((3, 2, 3), (-1, 4))
        alpha = self.random_character()
        direct = sum(f.values[index] * evaluate(alpha, element_at(f, index))
                     for index in np.ndindex(f.values.shape)) * 0.1
        self.assertLess(relative_gap(gelfand_transform(f, alpha), direct), 1e-12)

    def test_support_additivity(self):
        """supp(f*g) 的跨度等于两者跨度之和"""
        f = self.random_function((5, 3, 3), (-2, 1))
        g = self.random_function((4, 2, 3), (3, -1))
        h = convolve(f, g)
        self.assertEqual(h.extents, tuple(a + b for a, b in zip(f.extents, g.extents)))
        self.assertEqual(h.offsets, (1, 0))
        low, high = support_bounds(h)[0]
        self.assertAlmostEqual(low, support_bounds(f)[0][0] + support_bounds(g)[0][0])
        self.assertAlmostEqual(high, support_bounds(f)[0][1] + support_bounds(g)[0][1])

    def test_norm_submultiplicative(self):
        f = self.random_function((5, 3, 3), (0, 0))
        g = self.random_function((4, 2, 3), (0, 0))
        self.assertLessEqual(l1_norm(convolve(f, g)), l1_norm(f) * l1_norm(g) * (1 + 1e-12))

    def test_dirac_convolution(self):
        """δ_s * δ_t = δ_{s+t}，循环轴按模约化"""
        group = make_group(0, 1, [4])
        s = make_element(group, (), [2], [3])
        t = make_element(group, (), [-5], [2])
        product = convolve(delta(group, s), delta(group, t))
        expected = delta(group, add(s, t))
        self.assertEqual(product.offsets, expected.offsets)
        np.testing.assert_array_equal(product.values, expected.values)

    def test_box_convolution_is_triangle(self):
        """1_[0,1) * 1_[0,1) 与三角函数的偏差不超过 h"""
        for h in (0.1, 0.01):
            box = indicator(h, 0.0, 1.0)
            conv = convolve(box, box)
            ts = conv.axis_coordinates(0)
            triangle = np.clip(1 - np.abs(ts - 1), 0.0, None)
            self.assertLessEqual(float(np.max(np.abs(conv.values.real - triangle))), h * (1 + 1e-9))

    def test_indicator_transform(self):
        """1_[0,1) 的变换逼近 (e^z − 1)/z"""
        f = indicator(0.001, 0.0, 1.0)
        group = make_group(1, 0)
        for z in (0.5j, 1.0, -0.7 + 2j):
            exact = (cmath.exp(z) - 1) / z
            self.assertLess(abs(gelfand_transform(f, GenChar(group, (z,))) - exact), 5e-3)
        self.assertAlmostEqual(gelfand_transform(f, GenChar(group, (0j,))).real, 1.0, places=9)

    def test_step_mismatch(self):
        with self.assertRaises(StepMismatchError):
            convolve(indicator(0.1, 0, 1), indicator(0.05, 0, 1))

    def test_group_mismatch(self):
        with self.assertRaises(SpecMismatchError):
            gelfand_transform(indicator(0.1, 0, 1), GenChar(make_group(0, 1), (), (1.0,)))


class TestTranslation(unittest.TestCase):
    """平移与连续性模测试类"""

    def test_misaligned_shift(self):
        f = indicator(0.1, 0.0, 1.0)
        with self.assertRaises(GridMisalignedError):
            translate(f, make_element(make_group(1, 0), [0.05]))

    def test_cyclic_shift(self):
        group = make_group(0, 0, [3])
        f = from_values(group, [1.0, 2.0, 3.0])
        shifted = translate(f, make_element(group, (), (), [1]))
        np.testing.assert_array_equal(shifted.values.real, [3.0, 1.0, 2.0])

    def test_modulus_shrinks_with_step(self):
        """帐篷函数的单步连续性模等于 h"""
        moduli = []
        for h in (0.1, 0.05, 0.025):
            modulus = translation_modulus(tent(h, 1.0))
            self.assertAlmostEqual(modulus, h, places=12)
            moduli.append(modulus)
        self.assertEqual(moduli, sorted(moduli, reverse=True))

    def test_translation_l1_distance_bounds_transforms(self):
        """|[τ_s f]^(α) − [τ_t f]^(α)| ≤ ‖τ_s f − τ_t f‖₁ 对酉特征成立"""
        group = make_group(1, 0)
        f = indicator(0.01, 0.0, 1.0)
        s, t = make_element(group, [0.5]), make_element(group, [0.0])
        distance = translation_l1_distance(f, s, t)
        self.assertAlmostEqual(distance, 1.0, places=9)
        for y in (0.3, 1.0, 4.0):
            alpha = GenChar(group, (1j * y,))
            gap = abs(gelfand_transform(translate(f, s), alpha) - gelfand_transform(translate(f, t), alpha))
            self.assertLessEqual(gap, distance + 1e-12)

    def test_linear_combination_aligns_supports(self):
        group = make_group(0, 1)
        f = from_values(group, [1.0, 1.0], int_offset=(0,))
        g = from_values(group, [2.0], int_offset=(3,))
        combined = linear_combination(f, g, 1.0, -1.0)
        self.assertEqual(combined.offsets, (0,))
        np.testing.assert_array_equal(combined.values.real, [1.0, 1.0, 0.0, -2.0])


class TestTensorProduct(unittest.TestCase):
    """张量积测试类"""

    def test_transform_factorizes(self):
        """(f × g)^(α₁ ⊕ α₂) = f̂(α₁)·ĝ(α₂)"""
        discrete = make_group(0, 1, [3])
        f = tent(0.05, 1.0)
        g = point_masses(discrete, {make_element(discrete, (), [0], [1]): 1.0,
                                    make_element(discrete, (), [2], [0]): -0.5j})
        product = tensor_product(f, g)
        self.assertEqual(product.group, MIXED)
        self.assertEqual(product.values.shape, f.values.shape + g.values.shape)
        a1 = GenChar(make_group(1, 0), (0.3 + 1.0j,))
        a2 = GenChar(discrete, (), (1.2 - 0.4j,), (2,))
        lhs = gelfand_transform(product, direct_sum(a1, a2))
        rhs = gelfand_transform(f, a1) * gelfand_transform(g, a2)
        self.assertLess(relative_gap(lhs, rhs), 1e-12)


if __name__ == '__main__':
    unittest.main()
