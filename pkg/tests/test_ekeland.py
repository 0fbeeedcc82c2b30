__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import unittest
from types import SimpleNamespace

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from critlink.ekeland import *
from critlink.errors import EkelandError, EkelandPreconditionError, OracleExhaustedError
from critlink.functional import DoubleWell, RadialPlateau, Saddle
from critlink.geometry import PathPair, SaddlePair
from critlink.minimax import AdmissibleMap
from critlink.space import Decomposition, SphereSet, SubspaceSet

EPS_SWEEP = (0.2, 0.1, 0.05)


def saddle_instance():
    pair = SaddlePair(Decomposition.coordinate(2, [0], [1]), 1.0)
    return Saddle(), pair, AdmissibleMap.identity(pair)


def plateau_instance():
    pair = PathPair(rho=1.0, end=[1.5, 0.0])
    return RadialPlateau(radius=2.0), pair, AdmissibleMap.identity(pair)


def random_grid(rng):
    dimension = int(rng.integers(1, 3))
    points = rng.uniform(-1.0, 1.0, (int(rng.integers(20, 80)), dimension))
    values = np.sin(3.0 * points).sum(axis=1) + rng.normal(0.0, 0.3, len(points))
    return grid_space(points, values)


class TestEkelandPoint(unittest.TestCase):
    def test_random_grid_certificates(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            space = random_grid(rng)
            eps = float(rng.uniform(0.05, 1.0))
            delta = float(rng.uniform(0.05, 1.0))
            eligible = np.flatnonzero(space.values <= space.infimum + eps)
            x = int(rng.choice(eligible))
            certificate = ekeland_point(space, space.phi, x, eps, delta)
            self.assertTrue(certificate.a_holds)
            self.assertTrue(certificate.b_holds)
            self.assertLessEqual(certificate.value, space.phi(x))
            self.assertLessEqual(certificate.distance, delta * (1.0 + 1e-12))
            violations, examined = count_violations(space, space.phi, certificate.y, eps, delta,
                                                    range(len(space)))
            self.assertEqual(violations, 0)
            self.assertEqual(examined, len(space) - 1)

    def test_start_above_slack(self):
        space = grid_space([[0.0], [1.0]], [0.0, 2.0])
        with self.assertRaises(EkelandPreconditionError):
            ekeland_point(space, space.phi, 1, 0.5, 1.0)

    def test_bad_parameters(self):
        space = grid_space([[0.0], [1.0]], [0.0, 2.0])
        with self.assertRaises(EkelandPreconditionError):
            ekeland_point(space, space.phi, 0, 0.0, 1.0)

    def test_unbounded_oracle(self):
        line = SimpleNamespace(distance=lambda a, b: abs(a - b))
        with self.assertRaises(OracleExhaustedError) as context:
            ekeland_point(line, lambda y: -y, 0.0, 1e9, 1e9, lambda y: [y + 1.0], max_moves=5)
        self.assertEqual(context.exception.candidate, 6.0)

    def test_infinite_grid_values(self):
        with self.assertRaises(EkelandError):
            grid_space([[0.0]], [np.inf])


class TestSubdifferential(unittest.TestCase):
    def test_maximizer_ties(self):
        M, simplex = max_subdifferential([1.0, 3.0, 3.0 - 1e-10, 2.0])
        np.testing.assert_array_equal(M, [1, 2])
        self.assertEqual(simplex.dimension, 1)
        np.testing.assert_array_equal(simplex.support, M)

    def test_measure_validation(self):
        with self.assertRaises(EkelandError):
            DiscreteMeasure([0, 1], [0.7, 0.7])
        self.assertAlmostEqual(DiscreteMeasure([0, 2], [0.5, 0.5]).pair([1.0, 5.0, 3.0]), 2.0)

    def test_min_norm_descent(self):
        t0, bound, direction = min_norm_descent([[3.0, 4.0], [0.0, 2.0], [1.0, 1.0]])
        self.assertEqual(t0, 2)
        self.assertAlmostEqual(bound, np.sqrt(2.0))
        np.testing.assert_allclose(direction, -np.ones(2) / np.sqrt(2.0))

    def test_min_norm_descent_zero_gradient(self):
        t0, bound, direction = min_norm_descent([[1.0, 0.0], [0.0, 0.0]])
        self.assertEqual((t0, bound), (1, 0.0))
        np.testing.assert_array_equal(direction, [0.0, 0.0])

    def test_decoupled_minimax_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            m = int(rng.integers(1, 7))
            n = int(rng.integers(1, 4))
            norms = 0.1 + 0.2 * rng.permutation(m) + rng.uniform(0.0, 0.05, m)
            directions = rng.standard_normal((m, n))
            gradients = norms[:, None] * directions / np.linalg.norm(directions, axis=1, keepdims=True)
            t0, bound, _ = min_norm_descent(gradients)
            value, measure, binding = decoupled_minimax_value(gradients)
            self.assertLessEqual(abs(value + bound), 1e-2)
            self.assertEqual(binding, t0)
            self.assertAlmostEqual(float(np.sum(measure.weights)), 1.0)
            self.assertLessEqual(measure.pair(-np.linalg.norm(gradients, axis=1)), -bound + 1e-9)


class TestPenalty(unittest.TestCase):
    @given(st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=-3.0, max_value=3.0),
           st.floats(min_value=1e-3, max_value=1.0))
    @settings(max_examples=100, deadline=None)
    def test_penalty_range(self, x, y, eps):
        value = penalty_psi([x, y], SphereSet(np.zeros(2), 1.0), eps)
        self.assertGreaterEqual(value, 0.0)
        self.assertLessEqual(value, eps ** 2 + 1e-15)

    def test_penalty_on_set(self):
        axis = SubspaceSet(np.array([[1.0], [0.0]]))
        self.assertAlmostEqual(penalty_psi([5.0, 0.0], axis, 0.1), 0.01)
        self.assertEqual(penalty_psi([0.0, 0.5], axis, 0.1), 0.0)
        np.testing.assert_allclose(penalty_gradient([0.0, 0.05], axis, 0.1), [0.0, -0.1], atol=1e-6)

    def test_penalty_eps(self):
        with self.assertRaises(EkelandPreconditionError):
            penalty_psi([0.0, 0.0], SphereSet(np.zeros(2), 1.0), 0.0)


class TestRegion(unittest.TestCase):
    def test_build_A(self):
        _, pair, g = saddle_instance()
        region = build_A(g, pair, 0.1)
        self.assertTrue(np.all(np.abs(pair.nodes[region.nodes, 1]) < 0.1))
        self.assertEqual(len(region.boundary), 2)
        self.assertEqual(len(region.free), len(region.nodes) - 2)

    def test_build_A_eps_range(self):
        _, pair, g = saddle_instance()
        with self.assertRaises(EkelandPreconditionError):
            build_A(g, pair, pair.boundary_margin)

    def test_crossings_on_subspace(self):
        _, pair, g = saddle_instance()
        crossings = crossing_witnesses(pair, g.node_images, np.arange(len(pair.mesh.cells)))
        self.assertGreaterEqual(len(crossings), 1)
        for cell, weights in crossings:
            np.testing.assert_allclose(pair.interpolate(g.node_images, cell, weights), [0.0, 0.0], atol=1e-12)

    def test_crossings_on_sphere(self):
        _, pair, g = plateau_instance()
        crossings = crossing_witnesses(pair, g.node_images, np.arange(len(pair.mesh.cells)))
        self.assertGreaterEqual(len(crossings), 1)
        for cell, weights in crossings:
            self.assertAlmostEqual(np.linalg.norm(pair.interpolate(g.node_images, cell, weights)), 1.0)

    def test_functional_I_at_identity(self):
        f, pair, g = saddle_instance()
        value, maximizers = functional_I(f, g, pair.S, 0.1)
        self.assertAlmostEqual(value, 0.01)
        self.assertTrue(any(np.allclose(entry.point, 0.0) for entry in maximizers))


class TestMapSpace(unittest.TestCase):
    def setUp(self):
        _, self.pair, self.g = saddle_instance()
        region = build_A(self.g, self.pair, 0.1)
        self.space = MapSpace(self.pair, self.g.node_images, region.nodes, region.boundary)

    def test_pinned_nodes(self):
        space = self.space
        np.testing.assert_array_equal(space.pin_values, self.g.node_images[space.pinned])
        self.assertTrue(space.contains(space.initial()))
        moved = space.moved(space.initial(), space.region, [0.1, 0.0])
        self.assertTrue(space.contains(moved))
        self.assertAlmostEqual(space.distance(moved, space.initial()), 0.1)
        moved[space.pinned[0]] += 0.1
        self.assertFalse(space.contains(moved))

    def test_oracle_moves_free_nodes_only(self):
        objective = NodeMax(Saddle(), self.space)
        oracle = LadderOracle(self.space, objective, top=0.1, floor=1e-3, slope=0.5)
        self.assertEqual(len(oracle.magnitudes), 7)
        self.assertAlmostEqual(oracle.tie_band, oracle.magnitudes[-1])
        y = self.space.moved(self.space.initial(), self.space.free, [0.05, 0.0])
        candidates = list(oracle(y))
        self.assertTrue(all(self.space.contains(z) for z in candidates))
        self.assertLess(min(objective(z) for z in candidates), objective(y))

    def test_negative_slope(self):
        with self.assertRaises(EkelandError):
            LadderOracle(self.space, NodeMax(Saddle(), self.space), top=0.1, floor=1e-3, slope=-1.0)


class TestLimitingCase(unittest.TestCase):
    def check_sweep(self, f, pair, g):
        for eps in EPS_SWEEP:
            self.check_point(limiting_case_search(f, pair, g, eps), eps)

    def check_point(self, point, eps):
        tolerance = 1e-8
        self.assertGreaterEqual(point.f_value, point.c - tolerance)
        self.assertLessEqual(point.f_value, point.c + 1.25 * eps ** 2 + tolerance)
        self.assertLessEqual(point.dist_to_S, 1.5 * eps + tolerance)
        self.assertLessEqual(point.grad_norm, 1.5 * eps + tolerance)
        chain = point.chain
        self.assertLessEqual(chain['lower'] - tolerance, chain['I_hat'])
        self.assertLessEqual(chain['I_hat'], chain['I_tilde'] + tolerance)
        self.assertLessEqual(chain['I_tilde'], chain['upper'] + tolerance)
        self.assertTrue(point.holds)
        self.assertTrue(point.certificate.holds)

    def test_saddle_sweep(self):
        self.check_sweep(*saddle_instance())

    def test_plateau_sweep(self):
        self.check_sweep(*plateau_instance())

    def test_shifted_start_descends(self):
        f, pair, _ = saddle_instance()
        for eps in EPS_SWEEP:
            shift = 0.4 * eps
            g = AdmissibleMap.from_function(
                pair, lambda points: points + np.outer(shift * (1.0 - points[:, 1] ** 2), [1.0, 0.0]))
            self.assertLess(float(np.max(f._value(g.node_images))), eps ** 2 / 4.0)
            point = limiting_case_search(f, pair, g, eps, c=0.0)
            self.assertGreater(point.certificate.moves, 0)
            self.check_point(point, eps)
            self.assertLess(point.chain['I_hat'], point.chain['I_tilde'])
            self.assertLessEqual(point.certificate.distance, eps / 2.0 + 1e-12)
            region = build_A(g, pair, eps)
            space = MapSpace(pair, g.node_images, region.nodes, region.boundary)
            self.assertTrue(space.contains(point.certificate.y))

    def test_saddle_point_at_origin(self):
        f, pair, g = saddle_instance()
        point = limiting_case_search(f, pair, g, 0.1, c=0.0)
        np.testing.assert_allclose(point.x_eps, [0.0, 0.0], atol=1e-9)
        self.assertIn('M', point.to_dict())

    def test_eps_too_large(self):
        f, pair, g = plateau_instance()
        with self.assertRaises(EkelandPreconditionError):
            limiting_case_search(f, pair, g, 0.3)

    def test_sup_above_level(self):
        f, pair, _ = saddle_instance()
        g = AdmissibleMap.from_function(pair, lambda points: points + np.array([0.5, 0.0]))
        with self.assertRaises(EkelandPreconditionError):
            limiting_case_search(f, pair, g, 0.1, c=0.0)


class TestStrictCase(unittest.TestCase):
    def setUp(self):
        self.f = DoubleWell()
        self.pair = PathPair(rho=1.0, start=[-1.0, 0.0], end=[1.0, 0.0])
        self.p = AdmissibleMap.identity(self.pair)

    def test_double_well(self):
        point = strict_case_search(self.f, self.pair, self.p, 0.25, 0.0, d=-1.0)
        sup_p = float(np.max(self.f._value(self.p.node_images)))
        self.assertGreaterEqual(point.f_value, -0.25)
        self.assertLessEqual(point.f_value, sup_p)
        self.assertLessEqual(point.dist_to_image, 0.5)
        self.assertLessEqual(point.grad_norm, 0.5)
        self.assertTrue(point.holds)

    def test_bent_path_descends(self):
        pair = PathPair(rho=0.5, start=[-1.0, 0.0], end=[1.0, 0.0], center=[-1.0, 0.0])
        for height in (0.3, 0.4):
            p = AdmissibleMap.from_function(
                pair, lambda points: points + np.outer(height * (1.0 - points[:, 0] ** 2), [0.0, 1.0]))
            self.assertAlmostEqual(float(np.max(self.f._value(p.node_images))), height ** 2)
            point = strict_case_search(self.f, pair, p, 0.25, 0.0, d=-1.0)
            self.assertGreater(point.certificate.moves, 0)
            self.assertLess(point.certificate.value, height ** 2)
            self.assertGreaterEqual(point.f_value, -0.25)
            self.assertLessEqual(point.f_value, height ** 2 + 1e-8)
            self.assertLessEqual(point.dist_to_image, 0.5 + 1e-8)
            self.assertLessEqual(point.grad_norm, 0.5 + 1e-8)
            self.assertTrue(point.holds)
            self.assertTrue(point.certificate.holds)

    def test_default_boundary_level(self):
        point = strict_case_search(self.f, self.pair, self.p, 0.25, 0.0)
        self.assertEqual(point.d, -1.0)

    def test_no_gap(self):
        with self.assertRaises(EkelandPreconditionError):
            strict_case_search(self.f, self.pair, self.p, 0.25, -1.0, d=-1.0)

    def test_eps_beyond_gap(self):
        with self.assertRaises(EkelandPreconditionError):
            strict_case_search(self.f, self.pair, self.p, 2.0, 0.0, d=-1.0)

    def test_start_above_level(self):
        with self.assertRaises(EkelandPreconditionError):
            strict_case_search(self.f, self.pair, self.p, 0.25, -0.5, d=-1.0)


if __name__ == '__main__':
    unittest.main()
