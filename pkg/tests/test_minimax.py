__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import unittest

import numpy as np

from critlink.errors import CriticalPointError, GeometryBoundsError, GeometryError, MinimaxError
from critlink.functional import CallableFunctional, DoubleWell, RadialPlateau, Saddle
from critlink.geometry import PathPair, SaddlePair
from critlink.minimax import *
from critlink.space import Decomposition


def mountain_pass_pair():
    return PathPair(rho=0.5, start=[-1.0, 0.0], end=[1.0, 0.0], center=[-1.0, 0.0])


def saddle_pair():
    return SaddlePair(Decomposition.coordinate(2, [0], [1]), 1.0)


class TestAdmissibleMap(unittest.TestCase):
    def setUp(self):
        self.pair = saddle_pair()

    def test_identity(self):
        gamma = AdmissibleMap.identity(self.pair)
        np.testing.assert_array_equal(gamma.node_images, self.pair.nodes)
        self.assertEqual(gamma.boundary_deviation(), 0.0)

    def test_perturbation_keeps_boundary(self):
        gamma = AdmissibleMap.perturbed_identity(self.pair, 0.3, np.random.default_rng(2))
        self.assertEqual(gamma.boundary_deviation(), 0.0)
        shift = np.linalg.norm(gamma.node_images - self.pair.nodes, axis=1)
        self.assertLessEqual(np.max(shift), 0.3 + 1e-12)
        self.assertGreater(np.max(shift), 0.0)

    def test_moved_boundary_rejected(self):
        images = self.pair.nodes.copy()
        images[self.pair.mesh.boundary_nodes[0]] += 0.1
        with self.assertRaises(GeometryError):
            AdmissibleMap(self.pair, images)

    def test_wrong_shape(self):
        with self.assertRaises(GeometryError):
            AdmissibleMap(self.pair, np.zeros((3, 2)))

    def test_from_function_pins_boundary(self):
        gamma = AdmissibleMap.from_function(self.pair, lambda points: points + 1.0)
        self.assertEqual(gamma.boundary_deviation(), 0.0)
        np.testing.assert_allclose(gamma.node_images[self.pair.mesh.interior_nodes],
                                   self.pair.nodes[self.pair.mesh.interior_nodes] + 1.0)

    def test_compose(self):
        gamma = AdmissibleMap.identity(self.pair)
        composed, drift = gamma.compose(lambda points: 2.0 * points)
        self.assertAlmostEqual(drift, 1.0)
        self.assertEqual(composed.boundary_deviation(), 0.0)
        interior = self.pair.mesh.interior_nodes
        np.testing.assert_allclose(composed.node_images[interior], 2.0 * self.pair.nodes[interior])


class TestGeometryBounds(unittest.TestCase):
    def test_saddle_bounds(self):
        bounds = check_geometry_bounds(Saddle(), saddle_pair())
        self.assertTrue(bounds.holds)
        self.assertEqual(bounds.alpha, 0.0)
        self.assertAlmostEqual(bounds.boundary_max, -1.0)
        self.assertAlmostEqual(bounds.subspace_max, 0.0)

    def test_violated_bounds(self):
        pair = PathPair(rho=0.5, start=[1.0, 0.0], end=[-1.0, 0.0], center=[0.0, 0.0])
        bounds = check_geometry_bounds(DoubleWell(shift=0.0), pair)
        self.assertTrue(bounds.holds)
        pair = PathPair(rho=0.5, start=[0.0, 0.0], end=[1.0, 0.0], center=[1.0, 0.0])
        with self.assertRaises(GeometryBoundsError):
            estimate_cgamma(DoubleWell(), pair)


class TestEstimate(unittest.TestCase):
    def test_mountain_pass(self):
        f = DoubleWell()
        report = estimate_cgamma(f, mountain_pass_pair())
        self.assertLessEqual(abs(report.c_estimate), 1e-4)
        np.testing.assert_allclose(report.candidate_critical, [0.0, 0.0], atol=1e-3)
        self.assertLessEqual(report.grad_norm_at_candidate, 1e-5)
        self.assertFalse(report.limiting_case)
        self.assertGreater(report.c_estimate, report.alpha)

    def test_saddle_limiting_case(self):
        f = Saddle()
        pair = saddle_pair()
        report = estimate_cgamma(f, pair)
        self.assertLessEqual(abs(report.c_estimate), 1e-4)
        self.assertEqual(report.alpha, 0.0)
        self.assertTrue(report.limiting_case)
        self.assertEqual(report.stop_reason, 'limiting')
        localization = locate_on_S(report, pair, f)
        self.assertLessEqual(localization.dist_to_S, 1e-3)
        self.assertLessEqual(localization.grad_norm, 1e-3)

    def test_perturbed_start_descends(self):
        f = Saddle()
        pair = saddle_pair()
        gamma0 = AdmissibleMap.perturbed_identity(pair, 0.3, np.random.default_rng(4))
        report = estimate_cgamma(f, pair, gamma0, max_iters=60)
        values = [value for _, value in report.iteration_history]
        self.assertTrue(all(later < earlier for earlier, later in zip(values, values[1:])))
        for earlier, later, eps in zip(values, values[1:], report.deformation_eps):
            self.assertLessEqual(later, earlier - eps + 1e-12)
        self.assertGreaterEqual(report.c_estimate, report.alpha - TAU_C)
        self.assertEqual(len(report.deformation_eps), len(values) - 1)
        self.assertEqual(report.best_map.boundary_deviation(), 0.0)

    def test_report_dict(self):
        report = estimate_cgamma(DoubleWell(), mountain_pass_pair())
        payload = report.to_dict()
        self.assertEqual(payload['iteration_history'][0][0], 0)
        self.assertIn('ps_diagnosis', payload)

    def test_localization_needs_limiting_case(self):
        f = DoubleWell()
        pair = mountain_pass_pair()
        with self.assertRaises(MinimaxError):
            locate_on_S(estimate_cgamma(f, pair), pair, f)

    def test_sup_refinement(self):
        report = estimate_cgamma(DoubleWell(), mountain_pass_pair())
        self.assertTrue(report.sup_converged)
        self.assertGreaterEqual(report.sup_refined, report.c_estimate)
        self.assertLessEqual(report.sup_refined - report.c_estimate, 1e-3)

    def test_refine_sup_bisects_argmax_cells(self):
        pair = PathPair(rho=0.5, start=[-1.0, 0.0], end=[1.0, 0.0], mesh_resolution=4)
        f = CallableFunctional(lambda x: -(x[..., 0] - 0.25) ** 2,
                               lambda x: np.stack([-2.0 * (x[..., 0] - 0.25), np.zeros(x.shape[:-1])], axis=-1), 2)
        gamma = AdmissibleMap.identity(pair)
        value, node = sup_on_map(f, gamma)
        self.assertAlmostEqual(value, -0.0625)
        refined, divisions, converged = refine_sup(f, gamma, node)
        self.assertTrue(converged)
        self.assertEqual(divisions, 4)
        self.assertAlmostEqual(refined, 0.0)
        self.assertGreater(refined - value, 1e-6)
        refined, divisions, converged = refine_sup(f, gamma, node, max_divisions=2)
        self.assertFalse(converged)
        self.assertEqual(divisions, 2)

    def test_sup_on_map(self):
        pair = mountain_pass_pair()
        value, node = sup_on_map(DoubleWell(), AdmissibleMap.identity(pair))
        self.assertEqual(value, 0.0)
        np.testing.assert_allclose(pair.nodes[node], [0.0, 0.0], atol=1e-12)


class TestCorollaries(unittest.TestCase):
    def test_strict_minimum(self):
        f = DoubleWell()
        np.testing.assert_allclose(check_strict_minimum(f, [1.0, 0.0]), [1.0, 0.0])
        with self.assertRaises(CriticalPointError):
            check_strict_minimum(f, [0.0, 0.0])
        with self.assertRaises(CriticalPointError):
            check_strict_minimum(f, [0.5, 0.0])

    def test_pucci_serrin(self):
        f = DoubleWell(shift=1.0)
        candidate = pucci_serrin_third(f, [-1.0, 0.0], [1.0, 0.0])
        np.testing.assert_allclose(candidate, [0.0, 0.0], atol=1e-3)

    def test_pucci_serrin_needs_critical_candidate(self):
        # curved valley: the straight path tops out at (0, 0), the pass sits at (0, 0.5)
        def value(x):
            return (x[..., 0] ** 2 - 1.0) ** 2 + (x[..., 1] - 0.5 * (1.0 - x[..., 0] ** 2)) ** 2

        def gradient(x):
            g = x[..., 1] - 0.5 * (1.0 - x[..., 0] ** 2)
            return np.stack([4.0 * x[..., 0] * (x[..., 0] ** 2 - 1.0) + 2.0 * g * x[..., 0], 2.0 * g], axis=-1)

        f = CallableFunctional(value, gradient, 2, name='curved_valley')
        with self.assertRaises(MinimaxError):
            pucci_serrin_third(f, [-1.0, 0.0], [1.0, 0.0], max_iters=0)

    def test_pucci_serrin_same_minimum(self):
        with self.assertRaises(MinimaxError):
            pucci_serrin_third(DoubleWell(), [1.0, 0.0], [1.0, 0.0])

    def test_rabinowitz_sphere(self):
        localization = rabinowitz_sphere(RadialPlateau(radius=2.0), [1.5, 0.0], 1.0)
        self.assertLessEqual(localization.grad_norm, 1e-6)
        self.assertLessEqual(abs(np.linalg.norm(localization.point) - 1.0), 1e-3)

    def test_rabinowitz_needs_limiting_case(self):
        with self.assertRaises(MinimaxError):
            rabinowitz_sphere(DoubleWell(), [1.0, 0.0], 0.5)


if __name__ == '__main__':
    unittest.main()
