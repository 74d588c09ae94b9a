import unittest

import numpy as np

from .utils import InputError
from .oned import *


def _hinge_terms(W, z, y):
    """
    For every slope in W: the best knot of min_b sum_n max(0, 1 - y_n (w z_n + b)), its loss and the derivative
    of that loss in w (b following the knot).
    """
    W = np.atleast_1d(np.asarray(W, dtype = float))
    loss = np.zeros(len(W))
    slope = np.zeros(len(W))
    for start in range(0, len(W), 200):
        w = W[start:start + 200]
        # Knot i puts sample i on the margin, b = y_i - w z_i:
        g = y[None, None, :]*(w[:, None, None]*(z[None, None, :] - z[None, :, None]) + y[None, :, None])
        xi = np.maximum(0., 1. - g)
        total = xi.sum(axis = 2)
        best = np.argmin(total, axis = 1)
        rows = np.arange(len(w))
        active = xi[rows, best] > 0.
        dz = z[None, :] - z[best][:, None]
        loss[start:start + 200] = total[rows, best]
        slope[start:start + 200] = -np.sum(np.where(active, y[None, :]*dz, 0.), axis = 1)
    return loss, slope

def exact_1d(z, y, C):
    """
    Exact minimum of 0.5 w^2 + C min_b sum hinge by enumerating the slopes at which the hinge term changes and
    the stationary point of every linear piece. Returns the objective and w.
    """
    z = np.asarray(z, dtype = float)
    y = np.asarray(y, dtype = float)
    dz = z[:, None] - z[None, :]
    dy = y[:, None] - y[None, :]
    ok = dz != 0.
    breaks = np.unique(np.concatenate([dy[ok]/dz[ok], [0.]]))
    mids = np.concatenate([[breaks[0] - 1.], 0.5*(breaks[1:] + breaks[:-1]), [breaks[-1] + 1.]])
    lows = np.concatenate([[-np.inf], breaks])
    highs = np.concatenate([breaks, [np.inf]])
    loss, slope = _hinge_terms(mids, z, y)
    stationary = -C*slope
    inside = (stationary >= lows) & (stationary <= highs)
    candidates = np.concatenate([breaks, stationary[inside]])
    loss, slope = _hinge_terms(candidates, z, y)
    f = 0.5*candidates**2 + C*loss
    k = int(np.argmin(f))
    return f[k], candidates[k]

def _random_instance(rng, integer = False):
    N = int(rng.integers(2, 51))
    y = np.where(rng.random(N) > 0.5, 1., -1.)
    y[0], y[1] = 1., -1.
    z = rng.uniform(-10., 10., N)
    if integer:
        z = np.round(z)
    C = 10.**rng.uniform(-3., 3.)
    return z, y, C


class TestSolve1d(unittest.TestCase):

    def test_symmetric_pair(self):
        sol = solve_1d(projected_data([-1., 1.], [-1, 1]), 10.)
        self.assertAlmostEqual(sol.w, 1.)
        self.assertAlmostEqual(sol.b, 0.)
        self.assertAlmostEqual(sol.objective, 0.5)
        np.testing.assert_allclose(sol.xi, 0.)
        self.assertEqual(sol.kind, 'pair')
        self.assertEqual(sol.margin_setters, (1, 0))

    def test_label_flip_mirrors(self):
        rng = np.random.default_rng(1)
        for i in range(20):
            z, y, C = _random_instance(rng)
            a = solve_1d(projected_data(z, y), C)
            b = solve_1d(projected_data(z, -y), C)
            self.assertAlmostEqual(a.objective, b.objective, delta = 1e-9*(1. + a.objective))
            self.assertAlmostEqual(a.w, -b.w, delta = 1e-9*(1. + abs(a.w)))

    def test_mixed_example(self):
        pd = projected_data([-2., 0.5, -0.5, 2.], [-1, -1, 1, 1])
        sol = solve_1d(pd, 1.)
        expected, w = exact_1d(pd.z, pd.labels, 1.)
        self.assertAlmostEqual(sol.objective, expected, delta = 1e-8)
        oracle = solve_1d_oracle(pd, 1.)
        self.assertAlmostEqual(sol.objective, oracle.objective, delta = 1e-7)
        self.assertAlmostEqual(sol.w, oracle.w, delta = 1e-5)

    def test_saturated_optimum(self):
        # No sample sits on the margin at the optimum:
        pd = projected_data([1., 3., -1., 2.], [1, 1, -1, -1])
        sol = solve_1d(pd, 0.01)
        self.assertEqual(sol.kind, 'saturated')
        self.assertAlmostEqual(sol.w, 0.03)
        self.assertAlmostEqual(sol.objective, 0.03955)
        self.assertAlmostEqual(sol.objective, exact_1d(pd.z, pd.labels, 0.01)[0], delta = 1e-10)
        self.assertIsNone(sol.margin_setters)

    def test_flat_optimum(self):
        pd = projected_data([3., 3., 3., 3., 3.], [1, 1, -1, -1, -1])
        sol = solve_1d(pd, 2.)
        self.assertEqual(sol.kind, 'flat')
        self.assertEqual(sol.w, 0.)
        self.assertEqual(sol.b, -1.)
        self.assertAlmostEqual(sol.objective, 8.)
        self.assertAlmostEqual(solve_1d_oracle(pd, 2.).objective, 8., delta = 1e-8)

    def test_against_exact_enumeration(self):
        rng = np.random.default_rng(2024)
        for i in range(10000):
            integer = i % 4 == 3
            z, y, C = _random_instance(rng, integer = integer)
            sol = solve_1d(projected_data(z, y), C)
            expected, w = exact_1d(z, y, C)
            self.assertLessEqual(abs(sol.objective - expected), max(1e-7, 1e-6*expected))
            np.testing.assert_allclose(sol.xi, np.maximum(0., 1. - y*(sol.w*z + sol.b)), atol = 1e-10)
            if sol.kind == 'pair':
                ip, ineg = sol.margin_setters
                self.assertEqual(y[ip], 1.)
                self.assertEqual(y[ineg], -1.)
                self.assertAlmostEqual(y[ip]*(sol.w*z[ip] + sol.b), 1., delta = 1e-8)
                self.assertAlmostEqual(y[ineg]*(sol.w*z[ineg] + sol.b), 1., delta = 1e-8)
                if not integer:
                    violators = sol.xi > 1e-10
                    self.assertEqual(np.sum(violators & (y > 0)), np.sum(violators & (y < 0)))

    def test_batch_matches_single(self):
        rng = np.random.default_rng(5)
        y = np.where(rng.random(15) > 0.5, 1., -1.)
        y[0], y[1] = 1., -1.
        Z = rng.normal(size = [30, 15])
        Z[3] = 0.
        out = solve_1d_batch(Z, y, 0.7)
        for c in range(30):
            sol = solve_1d(projected_data(Z[c], y), 0.7)
            self.assertAlmostEqual(out['objective'][c], sol.objective, delta = 1e-12*(1. + sol.objective))
            self.assertAlmostEqual(out['w'][c], sol.w, delta = 1e-12*(1. + abs(sol.w)))
        self.assertEqual(out['kind'][3], 2)

    def test_translation(self):
        rng = np.random.default_rng(7)
        for i in range(20):
            z, y, C = _random_instance(rng)
            a = solve_1d(projected_data(z, y), C)
            b = solve_1d(projected_data(z + 3.5, y), C)
            self.assertAlmostEqual(a.objective, b.objective, delta = 1e-8*(1. + a.objective))
            self.assertAlmostEqual(a.w, b.w, delta = 1e-7*(1. + abs(a.w)))

    def test_scaling(self):
        rng = np.random.default_rng(8)
        for i in range(20):
            z, y, C = _random_instance(rng)
            sol = solve_1d(projected_data(4.*z, y), C)
            expected, w = exact_1d(4.*z, y, C)
            self.assertLessEqual(abs(sol.objective - expected), max(1e-7, 1e-6*expected))

    def test_errors(self):
        with self.assertRaises(InputError):
            solve_1d(projected_data([1., 2.], [1, 1]), 1.)
        with self.assertRaises(InputError):
            solve_1d(projected_data([1., 2.], [1, -1]), 0.)
        with self.assertRaises(InputError):
            projected_data([1., 2.], [1, -1], norm_used = 0.)


class TestSolveLo(unittest.TestCase):

    def test_closed_form(self):
        sol = solve_lo([2., 3., 1., -4.], [1, 1, -1, -1])
        self.assertAlmostEqual(sol.a_scale, 2.)
        self.assertAlmostEqual(sol.intercept, -3.)
        self.assertAlmostEqual(sol.post_margin, 0.5)

    def test_mirrored_orientation(self):
        z, y = np.array([-2., -3., 1., 4.]), np.array([1., 1., -1., -1.])
        sol = solve_lo(z, y, w_norm = 2.)
        self.assertLess(sol.a_scale, 0.)
        g = y*(sol.a_scale*z + sol.intercept)
        self.assertAlmostEqual(np.min(g[y > 0]), 1.)
        self.assertAlmostEqual(np.min(g[y < 0]), 1.)
        self.assertAlmostEqual(sol.post_margin, 1./(abs(sol.a_scale)*2.))

    def test_overlap(self):
        self.assertIsNone(solve_lo([1., 3., 2., 0.], [1, 1, -1, -1]))
        self.assertIsNone(solve_lo([1., 1.], [1, -1]))

    def test_dominates_unrescaled_margin(self):
        rng = np.random.default_rng(3)
        y = np.where(np.arange(12) < 5, 1., -1.)
        U = np.where(y > 0, rng.uniform(1., 5., [1000, 12]), rng.uniform(-5., 0.5, [1000, 12]))
        w0 = -0.7
        w_norm = rng.uniform(0.1, 3., 1000)
        A, b, feasible = lo_fit(U, y)
        self.assertTrue(np.all(feasible))
        g = y*(A[:, None]*U + b[:, None])
        self.assertTrue(np.all(g >= 1. - 1e-9))
        pre = np.min(y*(U + w0), axis = 1)/w_norm
        post = 1./(np.abs(A)*w_norm)
        self.assertTrue(np.all(post >= pre - 1e-9))
