import unittest

import numpy as np

from .utils import InputError, dataset
from .kernels import *


def _direct_kernel(cfg, X, Y):
    if cfg.kind == 'linear':
        return np.dot(X, Y.T)
    if cfg.kind == 'polynomial':
        return (cfg.gamma*np.dot(X, Y.T) + cfg.coef0)**cfg.degree
    D = ((X[:, None, :] - Y[None, :, :])**2).sum(axis = 2)
    return np.exp(-cfg.gamma*D)

KERNELS = [kernel_config('linear'), kernel_config('poly', gamma = 0.2, coef0 = 1., degree = 3),
           kernel_config('rbf', gamma = 0.1)]


class TestKernelConfig(unittest.TestCase):

    def test_aliases(self):
        self.assertEqual(kernel_config('rbf').kind, 'gaussian')
        self.assertEqual(kernel_config('poly').kind, 'polynomial')

    def test_resolve(self):
        cfg = kernel_config('rbf').resolve(8)
        self.assertEqual(cfg.gamma, 0.125)
        self.assertEqual(kernel_config('rbf', gamma = 2.).resolve(8).gamma, 2.)

    def test_string(self):
        cfg = kernel_config('poly', gamma = 0.3, coef0 = 0.5, degree = 2)
        self.assertEqual(kernel_config.from_string(cfg.to_string()), cfg)

    def test_apply(self):
        self.assertEqual(kernel_config('rbf', gamma = 1.).apply(None, np.array([0.]))[0], 1.)
        self.assertEqual(kernel_config('poly', gamma = 1., coef0 = 1., degree = 3).apply(np.array([1.]), None)[0], 8.)

    def test_invalid(self):
        with self.assertRaises(InputError):
            kernel_config('sigmoid')
        with self.assertRaises(InputError):
            kernel_config('rbf', gamma = -1.)


class TestPairStats(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(11)
        self.X = rng.normal(size = [12, 9])

    def test_kernel_matrix(self):
        ps = pair_stats(self.X)
        for cfg in KERNELS:
            np.testing.assert_allclose(kernel_matrix(cfg, ps), _direct_kernel(cfg, self.X, self.X), atol = 1e-10)
            rows, cols = [0, 3, 5], [1, 2]
            np.testing.assert_allclose(kernel_matrix(cfg, ps, rows, cols),
                                       _direct_kernel(cfg, self.X[rows], self.X[cols]), atol = 1e-10)
            self.assertAlmostEqual(kernel_eval(cfg, ps, 2, 7), _direct_kernel(cfg, self.X[[2]], self.X[[7]])[0, 0])

    def test_small_example(self):
        ps = pair_stats([[1., 2.], [3., 4.]])
        self.assertEqual(ps.ip[0, 1], 11.)
        self.assertEqual(ps.sqdist[0, 1], 8.)
        ps.remove_feature(1)
        self.assertEqual(ps.ip[0, 1], 3.)
        self.assertEqual(ps.sqdist[0, 1], 4.)
        self.assertAlmostEqual(radius_sq(kernel_config('linear'), pair_stats([[1., 2.], [3., 4.]])), 8.)

    def test_recursive_removal(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size = [30, 600])
        ps = pair_stats(X)
        for m in rng.permutation(600)[:500]:
            ps.remove_feature(int(m))
        fresh = ps.recompute()
        self.assertEqual(len(ps.retained), 100)
        scale = np.max(np.abs(fresh.ip))
        np.testing.assert_allclose(ps.ip, fresh.ip, atol = 1e-8*scale)
        np.testing.assert_allclose(ps.sqdist, fresh.sqdist, atol = 1e-8*np.max(fresh.sqdist))
        self.assertTrue(ps.check_consistency(tol = 1e-8))
        Xr = X[:, ps.retained]
        np.testing.assert_allclose(fresh.ip, np.dot(Xr, Xr.T), atol = 1e-10*scale)
        for cfg in [kernel_config('linear'), kernel_config('rbf', gamma = 0.01)]:
            for space in ['feature', 'input']:
                expected = radius_sq(cfg, fresh, space = space)
                self.assertAlmostEqual(radius_sq(cfg, ps, space = space), expected, delta = 1e-8*expected)

    def test_removal_never_increases_distances(self):
        rng = np.random.default_rng(6)
        ps = pair_stats(rng.normal(size = [20, 40]))
        for m in rng.permutation(40):
            before = ps.sqdist.copy()
            ps.remove_feature(int(m))
            self.assertTrue(np.all(ps.sqdist <= before))
            self.assertTrue(np.all(ps.sqdist >= 0.))

    def test_init_from_dataset(self):
        ps = init_pair_stats(dataset([1, -1], [[1., 2.], [3., 4.]]))
        np.testing.assert_array_equal(ps.ip, [[5., 11.], [11., 25.]])
        np.testing.assert_array_equal(ps.sqdist, [[0., 8.], [8., 0.]])
        self.assertEqual(ps.retained, [0, 1])
        same = init_pair_stats(dataset([1, -1], [[1., 2.], [1., 2.]]))
        np.testing.assert_array_equal(same.sqdist, 0.)
        remove_feature(ps, 1)
        self.assertEqual(ps.ip[0, 1], 3.)

    def test_remove_all(self):
        ps = pair_stats(self.X[:, :2])
        ps.remove_feature(0)
        ps.remove_feature(1)
        self.assertEqual(ps.retained, [])
        np.testing.assert_array_equal(ps.ip, 0.)
        np.testing.assert_array_equal(ps.sqdist, 0.)

    def test_remove_twice(self):
        ps = pair_stats(self.X)
        ps.remove_feature(4)
        with self.assertRaises(InputError):
            ps.remove_feature(4)
        with self.assertRaises(InputError):
            ps.remove_feature(9)

    def test_candidate_view(self):
        ps = pair_stats(self.X)
        view = remove_feature(ps, 3, commit = False)
        self.assertEqual(view.retained, [0, 1, 2, 4, 5, 6, 7, 8])
        self.assertEqual(len(ps.retained), 9)
        fresh = pair_stats(self.X, retained = view.retained)
        for cfg in KERNELS:
            np.testing.assert_allclose(kernel_matrix(cfg, view), kernel_matrix(cfg, fresh), atol = 1e-10)

    def test_candidate_views_leave_stats_untouched(self):
        ps = pair_stats(self.X)
        ps.remove_feature(6)
        ip, sqdist, retained, mask = ps.ip.copy(), ps.sqdist.copy(), list(ps.retained), ps.mask.copy()
        for m in ps.retained:
            view = ps.remove_feature(m, commit = False)
            for cfg in KERNELS:
                kernel_matrix(cfg, view)
                kernel_matrix(cfg, view, [0, 2], [1, 5, 7])
                radius_sq(cfg, view)
        for cfg in KERNELS:
            for positions, K in candidate_kernel_blocks(cfg, ps, [0, 1, 2], [3, 4], ps.retained, block = 3):
                pass
            candidate_radius_sq(cfg, ps, [0, 1, 2, 3], ps.retained, block = 3)
        self.assertTrue(np.array_equal(ps.ip, ip))
        self.assertTrue(np.array_equal(ps.sqdist, sqdist))
        self.assertEqual(ps.retained, retained)
        self.assertTrue(np.array_equal(ps.mask, mask))

    def test_gram_is_psd(self):
        rng = np.random.default_rng(8)
        for trial in range(10):
            X = rng.normal(size = [20, 6])*rng.uniform(0.1, 3.)
            ps = pair_stats(X)
            ps.remove_feature(int(rng.integers(6)))
            views = [ps, ps.remove_feature(ps.retained[0], commit = False)]
            for cfg in KERNELS:
                for view in views:
                    K = kernel_matrix(cfg, view)
                    np.testing.assert_allclose(K, K.T, rtol = 1e-12, atol = 1e-12)
                    eig = np.linalg.eigvalsh(K)
                    self.assertGreaterEqual(eig[0], -1e-8*max(eig[-1], 1e-300))

    def test_copy_is_independent(self):
        ps = pair_stats(self.X)
        other = ps.copy()
        other.remove_feature(0)
        self.assertEqual(len(ps.retained), 9)
        np.testing.assert_allclose(ps.ip, np.dot(self.X, self.X.T))


class TestCandidateBlocks(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(2)
        self.X = rng.normal(size = [10, 7])
        self.ps = pair_stats(self.X)
        self.ps.remove_feature(2)

    def test_blocks_match_recomputation(self):
        rows, cols = [0, 1, 4], [2, 3, 5, 9]
        candidates = self.ps.retained
        for cfg in KERNELS:
            seen = []
            for positions, K in candidate_kernel_blocks(cfg, self.ps, rows, cols, candidates, block = 4):
                self.assertEqual(K.shape, (len(positions), 3, 4))
                for i, p in enumerate(positions):
                    m = candidates[p]
                    fresh = pair_stats(self.X, retained = [k for k in self.ps.retained if k != m])
                    np.testing.assert_allclose(K[i], kernel_matrix(cfg, fresh, rows, cols), atol = 1e-10)
                    seen.append(p)
            self.assertEqual(seen, list(range(len(candidates))))

    def test_radius(self):
        linear = kernel_config('linear')
        rows = [0, 2, 3, 7]
        # For the linear kernel both spaces coincide:
        self.assertAlmostEqual(radius_sq(linear, self.ps, rows), radius_sq(linear, self.ps, rows, space = 'input'))
        Xr = self.X[np.ix_(rows, self.ps.retained)]
        expected = max(np.sum((Xr[i] - Xr[j])**2) for i in range(4) for j in range(4))
        self.assertAlmostEqual(radius_sq(linear, self.ps, rows, space = 'input'), expected)
        # Gaussian feature-space distances are bounded by 2:
        self.assertLessEqual(radius_sq(kernel_config('rbf', gamma = 0.5), self.ps, rows), 2.)

    def test_candidate_radius(self):
        rows = [0, 1, 2, 5, 8]
        candidates = self.ps.retained
        for cfg in KERNELS:
            for space in ['feature', 'input']:
                r = candidate_radius_sq(cfg, self.ps, rows, candidates, space = space, block = 2)
                for i, m in enumerate(candidates):
                    view = self.ps.remove_feature(m, commit = False)
                    self.assertAlmostEqual(r[i], radius_sq(cfg, view, rows, space = space), places = 9)
