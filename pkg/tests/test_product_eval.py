# Copyright (C) 2022  Max Wiklund
#
# Licensed under the Apache License, Version 2.0 (the “License”);
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an “AS IS” BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
from unittest import TestCase

import numpy as np

from zetawalk import product_eval, trend
from zetawalk.errors import CapacityError, DomainError, SingularPointError
from zetawalk.params import create_product_params


class TestLogFactorCoefficients(TestCase):
    def test_log_cos(self):
        # ln cos x = -x^2/2 - x^4/12 - x^6/45 - 17 x^8/2520
        expected = [-1.0 / 2.0, -1.0 / 12.0, -1.0 / 45.0, -17.0 / 2520.0]
        np.testing.assert_allclose(expected, product_eval.log_factor_coefficients(1.0, 4), rtol=1e-13)

    def test_general_p(self):
        p = 0.3
        coefficients = product_eval.log_factor_coefficients(p, 2)
        self.assertAlmostEqual(-p / 2.0, coefficients[0], places=15)
        self.assertAlmostEqual(p / 24.0 - p * p / 8.0, coefficients[1], places=15)


class TestTruncation(TestCase):
    params = create_product_params("1/3", 2)

    def test_bound_below_tol(self):
        plan = product_eval.truncation_plan(self.params, 100.0, 1e-12)
        self.assertLess(plan.tail_bound, 0.5e-12)
        self.assertLessEqual(100.0 / (plan.n_terms + 1) ** 2, 0.1)

    def test_plan_for_terms(self):
        plan = product_eval.plan_for_terms(self.params, 10.0, 100)
        self.assertEqual(100, plan.n_terms)
        self.assertGreater(plan.tail_bound, 0.0)
        with self.assertRaises(DomainError):
            product_eval.plan_for_terms(self.params, 1e6, 100)

    def test_doubling_terms_stays_within_bound(self):
        for params, t in ((self.params, 10.0), (create_product_params("0.7", 1.5), 25.0), (create_product_params(1, 1), 3.0)):
            for n_terms in (50, 200):
                plan = product_eval.plan_for_terms(params, t, n_terms)
                doubled = product_eval.plan_for_terms(params, t, 2 * n_terms)
                coarse = product_eval.cl_for_plan(params, [t, -0.5 * t], plan)
                fine = product_eval.cl_for_plan(params, [t, -0.5 * t], doubled)
                self.assertTrue(np.all(np.abs(coarse - fine) <= plan.tail_bound + doubled.tail_bound + 1e-15))
                self.assertLessEqual(abs(coarse[0] - product_eval.eval_cl(params, t, tol=1e-14)), plan.tail_bound + 1e-14)

    def test_invalid_tol(self):
        with self.assertRaises(DomainError):
            product_eval.eval_cl(self.params, 1.0, tol=0.0)

    def test_capacity(self):
        with self.assertRaises(CapacityError) as context:
            product_eval.eval_cl(create_product_params("1/3", 0.6), 1e6)
        self.assertGreater(context.exception.required, context.exception.cap)


class TestEvalCl(TestCase):
    def test_origin(self):
        for p, s in (("1/3", 2), (1, 1), ("1/2", 0.75)):
            self.assertEqual(1.0, product_eval.eval_cl(create_product_params(p, s), 0.0))

    def test_even(self):
        params = create_product_params("1/3", 2)
        self.assertEqual(product_eval.eval_cl(params, 7.5), product_eval.eval_cl(params, -7.5))

    def test_against_finite_product(self):
        params = create_product_params("1/3", 2)
        t = np.array([0.5, 3.0, 12.0, 40.0])
        expected = product_eval.finite_product(params, t, 200000)
        np.testing.assert_allclose(expected, product_eval.cl_values(params, t), rtol=0.0, atol=1e-9)

    def test_bounded_by_one(self):
        params = create_product_params("1/3", 1)
        values = product_eval.cl_values(params, np.linspace(-30.0, 30.0, 301))
        self.assertTrue(np.all(np.abs(values) <= 1.0))

    def test_half_is_square(self):
        # 1/2 + 1/2 cos x = cos(x/2)^2
        t = np.linspace(-50.0, 50.0, 201)
        for s in (0.75, 1.0, 1.5, 2.0, 3.0):
            half = product_eval.cl_values(create_product_params("1/2", s), t, tol=1e-14)
            one = product_eval.cl_values(create_product_params(1, s), t / 2.0, tol=1e-14)
            self.assertLess(np.max(np.abs(half - one**2)), 1e-12)

    def test_sign_changes(self):
        params = create_product_params(1, 1)
        self.assertGreater(product_eval.eval_cl(params, 1.5), 0.0)
        self.assertLess(product_eval.eval_cl(params, 1.7), 0.0)


class TestZeros(TestCase):
    def test_no_zeros_below_half(self):
        params = create_product_params("1/3", 2)
        self.assertEqual([], product_eval.product_zeros(params, 10, 100.0))
        self.assertIsNone(product_eval.nearest_zero(params, 3.0))

    def test_harmonic_zeros(self):
        params = create_product_params(1, 1)
        zeros = product_eval.product_zeros(params, 3, 5.0)
        np.testing.assert_allclose([math.pi / 2.0, math.pi, 1.5 * math.pi], zeros, rtol=1e-14)
        for zero in zeros:
            self.assertLess(abs(product_eval.eval_cl(params, zero)), 1e-12)

    def test_zero_residual(self):
        params = create_product_params("3/4", 2)
        beta = math.acos(1.0 / 3.0)
        for zero in product_eval.product_zeros(params, 20, 200.0):
            n = [k for k in range(1, 21) if abs(math.cos(zero / k**2) + 1.0 / 3.0) < 1e-10]
            self.assertTrue(n, f"{zero} is not a zero of any factor")
        self.assertAlmostEqual(math.pi - beta, product_eval.product_zeros(params, 1, 2.0)[0], places=14)

    def test_nearest_zero(self):
        params = create_product_params(1, 1)
        self.assertAlmostEqual(math.pi / 2.0, product_eval.nearest_zero(params, 1.6), places=14)
        self.assertAlmostEqual(-math.pi, product_eval.nearest_zero(params, -3.0), places=14)

    def test_invalid_scan(self):
        with self.assertRaises(DomainError):
            product_eval.product_zeros(create_product_params(1, 1), 0, 5.0)


class TestLogCl(TestCase):
    def test_matches_log(self):
        params = create_product_params("1/3", 2)
        for t in (1.0, 25.0, 300.0):
            expected = math.log(abs(product_eval.eval_cl(params, t)))
            self.assertAlmostEqual(expected, product_eval.eval_log_cl(params, t), places=9)

    def test_deep_tail(self):
        # Cl underflows long before its logarithm loses accuracy.
        params = create_product_params("1/3", 2)
        value = product_eval.eval_log_cl(params, 1e7)
        self.assertTrue(math.isfinite(value))
        self.assertLess(value, -1000.0)

    def test_singular(self):
        params = create_product_params(1, 1)
        with self.assertRaises(SingularPointError) as context:
            product_eval.eval_log_cl(params, math.pi / 2.0)
        self.assertAlmostEqual(math.pi / 2.0, context.exception.nearest_zero, places=14)


class TestFluctuationFactor(TestCase):
    def test_definition(self):
        params = create_product_params("1/3", 2)
        constants = trend.trend_constants(params)
        t = 50.0
        expected = product_eval.eval_cl(params, t) * math.exp(constants.c_ps * math.sqrt(t))
        self.assertAlmostEqual(expected, product_eval.fluctuation_factor(params, t, constants), places=9)

    def test_mismatch(self):
        constants = trend.trend_constants(create_product_params("1/3", 2))
        with self.assertRaises(DomainError):
            product_eval.fluctuation_factor(create_product_params("1/4", 2), 1.0, constants)


class TestPowerProducts(TestCase):
    def test_euler_sinc(self):
        t = np.linspace(-20.0, 20.0, 401)
        values = product_eval.power_product_values("euler_sinc", t)
        self.assertLess(np.max(np.abs(values - np.sinc(t / math.pi))), 1e-9)

    def test_morrison_two_thirds(self):
        t = np.linspace(-20.0, 20.0, 401)
        values = product_eval.power_product_values("morrison_p23", t)
        self.assertLess(np.max(np.abs(values - np.sinc(t / (2.0 * math.pi)))), 1e-9)

    def test_morrison_general(self):
        t = np.linspace(-20.0, 20.0, 201)
        for base in (2, 3, 4, 5):
            values = product_eval.power_product_values("morrison_general", t, s=base)
            self.assertLess(np.max(np.abs(values - np.sinc(t / math.pi))), 1e-9)

    def test_weights(self):
        base, m, w = product_eval.power_factor_weights("morrison_general", 3)
        self.assertEqual(3, base)
        np.testing.assert_array_equal([-2.0, 0.0, 2.0], m)
        self.assertAlmostEqual(1.0, float(np.sum(w)), places=15)

    def test_cantor(self):
        self.assertEqual(1.0, product_eval.eval_power_product("cantor", 0.0))
        expected = np.prod(np.cos(2.0 / 3.0 ** np.arange(1, 40)))
        self.assertAlmostEqual(expected, product_eval.eval_power_product("cantor", 2.0), places=12)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            product_eval.eval_power_product("wallis", 1.0)
        with self.assertRaises(DomainError):
            product_eval.eval_power_product("morrison_general", 1.0, s=1)
