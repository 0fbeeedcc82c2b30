__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from critlink.errors import CriticalPointError, FunctionalError
from critlink.functional import *


def library_instances():
    return [DoubleWell(), DoubleWell(dim=3, shift=1.0), Saddle(), Saddle(dim=3, split=2), Exp1d(),
            RadialPlateau(), RadialPlateau(dim=3, radius=2.0), BvpQuartic(m=8), Constant(level=2.5),
            NegNormSquared(), MuellerBrown()]


class TestLibrary(unittest.TestCase):
    def test_gradients_match_central_differences(self):
        rng = np.random.default_rng(1)
        for f in library_instances():
            if isinstance(f, MuellerBrown):
                points = np.column_stack([rng.uniform(-1.5, 1.0, 100), rng.uniform(-0.3, 2.0, 100)])
                error = check_gradient(f, points, step=1e-6)
            else:
                error = check_gradient(f, rng.uniform(-2.0, 2.0, (100, f.dimension)))
            self.assertLessEqual(error, 1e-6, msg=repr(f))

    def test_known_critical_points(self):
        for f in library_instances():
            for point, level in f.known_critical_points:
                self.assertAlmostEqual(f.value(point), level, msg=repr(f))
                self.assertLessEqual(f.gradient_norm(point), 1e-12, msg=repr(f))

    def test_double_well_levels(self):
        f = DoubleWell()
        self.assertAlmostEqual(f.value([0.0, 0.0]), 0.0)
        self.assertAlmostEqual(f.value([1.0, 0.0]), -1.0)
        self.assertAlmostEqual(f.value([-1.0, 0.0]), -1.0)

    def test_saddle_sign(self):
        f = Saddle()
        self.assertAlmostEqual(f.value([2.0, 1.0]), 3.0)

    def test_level_predicates(self):
        f = Saddle()
        points = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
        np.testing.assert_array_equal(f.in_sublevel(points, 0.0), [False, True, True])
        np.testing.assert_array_equal(f.in_band(points, -0.5, 0.5), [False, False, True])

    def test_plateau_is_flat_on_ball(self):
        f = RadialPlateau(radius=1.0)
        inside = np.array([[0.5, 0.5], [0.0, -1.0], [0.0, 0.0]])
        np.testing.assert_allclose(f._value(inside), 0.0)
        np.testing.assert_allclose(f.gradient(inside), 0.0)
        self.assertAlmostEqual(f.value([3.0, 0.0]), 4.0)

    def test_batched_shapes(self):
        f = DoubleWell()
        x = np.zeros((4, 5, 2))
        self.assertEqual(f._value(x).shape, (4, 5))
        self.assertEqual(f.gradient(x).shape, (4, 5, 2))

    def test_make_test_functional(self):
        f = make_test_functional('saddle', {'dim': 3, 'split': 1})
        self.assertIsInstance(f, Saddle)
        self.assertEqual(f.dimension, 3)

    def test_unknown_functional(self):
        with self.assertRaises(FunctionalError):
            make_test_functional('no_such_functional')
        with self.assertRaises(FunctionalError):
            make_test_functional('saddle', {'bogus': 1})

    def test_registry(self):
        library = {}
        update_functional_dictionary(library)
        for name in ('double_well', 'saddle', 'exp1d', 'radial_plateau', 'bvp_quartic', 'mueller_brown'):
            self.assertIn(name, library)

    def test_callable_functional(self):
        f = CallableFunctional(lambda x: np.sum(x ** 2, axis=-1), lambda x: 2.0 * x, 2,
                               critical_points=[([0.0, 0.0], 0.0)])
        self.assertAlmostEqual(f.value([1.0, 2.0]), 5.0)
        self.assertLessEqual(check_gradient(f, [[1.0, 2.0], [-0.5, 0.3]]), 1e-8)
        self.assertEqual(len(f.known_critical_points), 1)

    def test_dimension_check(self):
        with self.assertRaises(FunctionalError):
            Saddle(dim=0)

    def test_hessian(self):
        hessian = hessian_fd(DoubleWell(), [1.0, 0.0])
        np.testing.assert_allclose(hessian, [[8.0, 0.0], [0.0, 2.0]], atol=1e-5)


class TestPseudogradient(unittest.TestCase):
    def test_critical_point_rejected(self):
        with self.assertRaises(CriticalPointError):
            pseudogradient(Saddle(), [0.0, 0.0])

    @given(st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=-3.0, max_value=3.0))
    @settings(max_examples=100, deadline=None)
    def test_pseudogradient_bounds(self, x, y):
        f = DoubleWell()
        gradient = f.gradient([x, y])
        norm = np.linalg.norm(gradient)
        if norm <= 1e-9:
            return
        w = pseudogradient(f, [x, y])
        self.assertLessEqual(np.linalg.norm(w), 2.0 * norm + 1e-12)
        self.assertGreaterEqual(np.dot(gradient, w), norm ** 2 - 1e-9)

    def test_field_vanishes_at_critical_points(self):
        f = DoubleWell()
        points = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]])
        np.testing.assert_allclose(pseudogradient_field(f, points), 0.0)


class TestPalaisSmale(unittest.TestCase):
    def test_converging_sequence(self):
        f = DoubleWell()
        points = [np.array([2.0 ** -k, 0.0]) for k in range(5, 40)]
        diagnosis = check_ps(f, PalaisSmaleTrace.record(f, points, 0.0), 0.0)
        self.assertTrue(diagnosis.almost_critical)
        self.assertTrue(diagnosis.clustered)
        self.assertFalse(diagnosis.divergent)

    def test_escaping_sequence(self):
        f = Exp1d()
        points = [np.array([-float(k)]) for k in range(1, 40)]
        diagnosis = check_ps(f, PalaisSmaleTrace.record(f, points, 0.0), 0.0)
        self.assertTrue(diagnosis.almost_critical)
        self.assertFalse(diagnosis.clustered)
        self.assertTrue(diagnosis.divergent)

    def test_trace_validation(self):
        f = Saddle()
        trace = PalaisSmaleTrace.record(f, [[1.0, 0.0], [0.5, 0.5]], 0.0)
        self.assertTrue(trace.validate(f))
        trace.values[0] = 7.0
        self.assertFalse(trace.validate(f))

    def test_empty_trace(self):
        with self.assertRaises(FunctionalError):
            check_ps(Saddle(), PalaisSmaleTrace(), 0.0)


if __name__ == '__main__':
    unittest.main()
