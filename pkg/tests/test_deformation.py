__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from critlink.deformation import *
from critlink.errors import DeformationError, FlowStallError, HypothesisError
from critlink.functional import DoubleWell, Saddle
from critlink.space import FiniteSampleSet


def saddle_sets():
    E = FiniteSampleSet([[0.0, 1.0], [0.0, -1.0]])
    D = FiniteSampleSet([[1.0, 0.0], [-1.0, 0.0]])
    return D, E


def double_well_sets():
    E = FiniteSampleSet([[0.55, 0.0], [0.6, 0.0]])
    D = FiniteSampleSet([[1.0, 2.0]])
    return D, E


class TestCutoffs(unittest.TestCase):
    def test_cutoff_h_endpoints(self):
        A1 = FiniteSampleSet([[0.0, 0.0]])
        A2 = FiniteSampleSet([[2.0, 0.0]])
        self.assertAlmostEqual(cutoff_h([0.0, 0.0], A1, A2), 0.0)
        self.assertAlmostEqual(cutoff_h([2.0, 0.0], A1, A2), 1.0)
        self.assertAlmostEqual(cutoff_h([1.0, 0.0], A1, A2), 0.5)

    def test_cutoff_h_overlap(self):
        A = FiniteSampleSet([[0.0, 0.0]])
        with self.assertRaises(DeformationError):
            cutoff_h([0.0, 0.0], A, A)

    @given(st.floats(min_value=0.0, max_value=1e6))
    @settings(max_examples=100, deadline=None)
    def test_cutoff_rho_saturates(self, s):
        self.assertAlmostEqual(s * cutoff_rho(s), min(s, 1.0))

    def test_cutoff_rho_negative(self):
        with self.assertRaises(DeformationError):
            cutoff_rho(-1.0)

    def test_gap_set(self):
        band = GapSet(2, lambda x: np.maximum(np.abs(np.asarray(x)[..., 0]) - 1.0, 0.0), 'strip')
        self.assertTrue(band.contains([0.5, 7.0]))
        self.assertFalse(band.contains([1.5, 0.0]))
        with self.assertRaises(DeformationError):
            band.sample()


class TestFlow(unittest.TestCase):
    def test_rk4_linear_decay(self):
        trajectory = rk4(lambda x: -x, np.array([[1.0, 2.0]]), 1.0, 64)
        np.testing.assert_allclose(trajectory.endpoint, [[np.exp(-1.0), 2.0 * np.exp(-1.0)]], rtol=1e-8)
        self.assertEqual(trajectory.steps, 64)

    def test_flow_backwards_returns(self):
        field = lambda x: np.column_stack([-x[:, 1], x[:, 0]])
        start = np.array([[1.0, 0.0], [0.0, 0.5]])
        forward = flow(field, start, 1.0)
        np.testing.assert_allclose(forward.endpoint[0], [np.cos(1.0), np.sin(1.0)], atol=1e-9)
        backward = flow(field, forward.endpoint, -1.0)
        np.testing.assert_allclose(backward.endpoint, start, atol=1e-9)

    def test_zero_time(self):
        trajectory = flow(lambda x: x, [3.0, 4.0], 0.0)
        np.testing.assert_allclose(trajectory.endpoint, [[3.0, 4.0]])

    def test_stall(self):
        with self.assertRaises(FlowStallError):
            flow(lambda x: 10.0 * x, [1.0], 1.0, initial_steps=4, max_steps=8)


class TestField(unittest.TestCase):
    def setUp(self):
        self.f = DoubleWell()
        self.D, self.E = double_well_sets()
        self.config = DeformationConfig(c=-0.5, eps_bar=0.1, delta=0.5, seed=3)

    def test_field_bounds(self):
        field = build_field(self.f, self.D, self.E, self.config)
        rng = np.random.default_rng(0)
        samples = rng.uniform(-2.0, 2.0, (500, 2))
        norms = np.linalg.norm(field(samples), axis=-1)
        self.assertLessEqual(np.max(norms), self.config.delta / 3.0 * (1.0 + 1e-12))
        far = self.E.distance(samples) > self.config.delta
        np.testing.assert_array_equal(norms[far], 0.0)
        np.testing.assert_array_equal(field(self.D.points), 0.0)

    def test_field_descends(self):
        field = build_field(self.f, self.D, self.E, self.config)
        points = self.E.points
        slopes = np.sum(self.f.gradient(points) * field(points), axis=-1)
        self.assertTrue(np.all(slopes <= 0.0))
        self.assertTrue(np.any(slopes < 0.0))

    def test_E_above_level(self):
        with self.assertRaises(HypothesisError) as context:
            build_field(self.f, self.D, FiniteSampleSet([[0.0, 1.0]]), self.config)
        np.testing.assert_allclose(context.exception.point, [0.0, 1.0])

    def test_D_below_level(self):
        with self.assertRaises(HypothesisError):
            build_field(self.f, FiniteSampleSet([[-1.0, 0.0]]), self.E, self.config)

    def test_delta_reaches_D(self):
        config = DeformationConfig(c=-0.5, eps_bar=0.1, delta=3.0)
        with self.assertRaises(HypothesisError):
            build_field(self.f, self.D, self.E, config)

    def test_large_delta_warns(self):
        D = FiniteSampleSet([[0.6, 1.2]])
        with self.assertLogs('critlink.deformation.field', level='WARNING'):
            try:
                build_field(self.f, D, self.E, self.config)
            except DeformationError:
                pass

    def test_near_critical_band(self):
        config = DeformationConfig(c=0.0, eps_bar=0.1, delta=0.3)
        with self.assertRaises(HypothesisError):
            build_field(self.f, None, FiniteSampleSet([[0.0, 0.0]]), config)

    def test_config_validation(self):
        with self.assertRaises(DeformationError):
            DeformationConfig(c=0.0, eps_bar=0.0, delta=0.1).validate()


class TestDeform(unittest.TestCase):
    def test_double_well(self):
        f = DoubleWell()
        D, E = double_well_sets()
        config = DeformationConfig(c=-0.5, eps_bar=0.1, delta=0.5, seed=7)
        result = deform(f, D, E, -0.5, config, starts=100)
        self.assertLessEqual(result.reversibility_error, config.tau_flow)
        self.assertEqual(result.monotonicity_violations, 0)
        self.assertEqual(result.fixed_drift, 0.0)
        self.assertLessEqual(result.e_value_max, -0.5 - result.eps)
        self.assertLessEqual(result.eps, config.eps_bar / 3.0)
        np.testing.assert_array_equal(result.eta(D.points), D.points)
        self.assertTrue(np.all(f._value(result.eta(E.points)) <= -0.5 - result.eps))

    def test_saddle(self):
        f = Saddle()
        D, E = saddle_sets()
        config = DeformationConfig(c=0.0, eps_bar=0.3, delta=0.5, seed=3)
        result = deform(f, D, E, 0.0, config)
        self.assertEqual(len(result.starts), 200 + 4)
        self.assertLessEqual(result.reversibility_error, config.tau_flow)
        self.assertEqual(result.monotonicity_violations, 0)
        self.assertEqual(result.fixed_drift, 0.0)
        self.assertGreaterEqual(result.eps, 0.01)
        self.assertTrue(np.all(f._value(result.eta(E.points)) <= -result.eps))
        np.testing.assert_array_equal(result.eta(D.points), D.points)
        np.testing.assert_array_equal(result.field(D.points), np.zeros((2, 2)))
        self.assertTrue(np.all(np.linalg.norm(result.field(result.starts), axis=-1) <= 0.5 / 3.0 + 1e-12))

    def test_saddle_critical_point_in_E(self):
        D, _ = saddle_sets()
        with self.assertRaises(HypothesisError):
            deform(Saddle(), D, FiniteSampleSet([[0.0, 0.0]]), 0.0,
                   DeformationConfig(c=0.0, eps_bar=0.3, delta=0.5))

    def test_values_never_increase(self):
        f = DoubleWell()
        D, E = double_well_sets()
        result = deform(f, D, E, -0.5, DeformationConfig(c=-0.5, eps_bar=0.1, delta=0.5), starts=50)
        values = result.trajectory.values(f)
        self.assertTrue(np.all(np.diff(values, axis=0) <= 1e-10))


class TestClassicalDeform(unittest.TestCase):
    def test_sublevel_pushed_down(self):
        f = DoubleWell()
        sample = np.column_stack([np.linspace(0.3, 0.9, 25), np.zeros(25)])
        result = classical_deform(f, -0.5, 0.1, sample)
        values = f._value(sample)
        moved = f._value(result.images)
        covered = values <= -0.5 + result.eps
        self.assertTrue(np.any(covered))
        self.assertTrue(np.all(moved[covered] <= -0.5 - result.eps))
        self.assertTrue(np.all(moved <= values + 1e-12))

    def test_critical_level_refused(self):
        sample = np.array([[0.0, 0.0], [0.1, 0.0]])
        with self.assertRaises(HypothesisError):
            classical_deform(DoubleWell(), 0.0, 0.1, sample)

    def test_band_width(self):
        with self.assertRaises(DeformationError):
            classical_deform(DoubleWell(), 0.0, 0.0, [[0.5, 0.0]])


if __name__ == '__main__':
    unittest.main()
