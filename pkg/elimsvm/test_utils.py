import os
import shutil
import tempfile
import unittest

import numpy as np

from .utils import *


class TestParseLibsvm(unittest.TestCase):

    def test_dense_values(self):
        ds = parse_libsvm('+1 1:0.5 3:2\n-1 2:1\n')
        self.assertEqual(ds.n_samples, 2)
        self.assertEqual(ds.n_features, 3)
        np.testing.assert_array_equal(ds.values, [[0.5, 0., 2.], [0., 1., 0.]])
        np.testing.assert_array_equal(ds.labels, [1., -1.])

    def test_labels_mapped_to_pm1(self):
        ds = parse_libsvm('2 1:1\n0 1:2\n')
        np.testing.assert_array_equal(ds.labels, [1., -1.])

    def test_blank_lines_and_hint(self):
        ds = parse_libsvm('\n+1 1:1\n\n-1 2:1\n', n_features_hint = 5)
        self.assertEqual(ds.n_features, 5)
        self.assertEqual(ds.n_samples, 2)

    def test_sample_without_features(self):
        ds = parse_libsvm('+1\n-1 2:3\n')
        np.testing.assert_array_equal(ds.values[0], [0., 0.])

    def test_errors(self):
        bad = ['+1 1:1 1:2\n-1 1:1\n',
               '+1 2:1 1:2\n-1 1:1\n',
               'a 1:1\n-1 1:1\n',
               '+1 1-1\n-1 1:1\n',
               '+1 0:1\n-1 1:1\n',
               '+1 1:x\n-1 1:1\n',
               '+1 1:nan\n-1 1:1\n',
               '',
               '+1 1:1\n+1 1:2\n']
        for text in bad:
            with self.assertRaises(DataFormatError):
                parse_libsvm(text)

    def test_error_reports_line(self):
        try:
            parse_libsvm('+1 1:1\n-1 1:1\n-1 3:1 2:1\n')
            self.fail('no error raised')
        except DataFormatError as e:
            self.assertIn('line 3', str(e))

    def test_write_and_read(self):
        folder = tempfile.mkdtemp()
        try:
            ds = dataset([1, -1, -1], [[0.25, 0., -3.], [0., 0., 1.5], [1e-3, 2., 0.]])
            fname = os.path.join(folder, 'toy.libsvm')
            write_libsvm(ds, fname)
            back = read_libsvm(fname, n_features_hint = 3)
            np.testing.assert_array_equal(back.values, ds.values)
            np.testing.assert_array_equal(back.labels, ds.labels)
            self.assertEqual(back.name, 'toy.libsvm')
        finally:
            shutil.rmtree(folder)

    def test_missing_file(self):
        with self.assertRaises(InputError):
            read_libsvm('/nonexistent/elimsvm/data.libsvm')


class TestDataset(unittest.TestCase):

    def test_single_class(self):
        with self.assertRaises(InputError):
            dataset([1, 1], [[0.], [1.]])

    def test_shape_mismatch(self):
        with self.assertRaises(InputError):
            dataset([1, -1, 1], [[0.], [1.]])

    def test_class_counts(self):
        ds = dataset([1, -1, 1, 1], np.zeros([4, 2]))
        self.assertEqual(ds.class_counts(), (3, 1))
        self.assertEqual(ds.class_counts([1, 2]), (1, 1))


class TestSplits(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(3)
        self.ds = dataset(np.where(np.arange(21) % 2 == 0, 1, -1), rng.normal(size = [21, 4]))

    def test_trial_halves(self):
        trial = make_trial(self.ds, 12345, trial_id = 4)
        self.assertEqual(len(trial.train_indices), 11)
        self.assertEqual(len(trial.test_indices), 10)
        both = np.concatenate([trial.train_indices, trial.test_indices])
        np.testing.assert_array_equal(np.sort(both), np.arange(21))
        np.testing.assert_array_equal(trial.train_indices, np.sort(trial.train_indices))
        self.assertEqual(trial.trial_id, 4)

    def test_trial_deterministic(self):
        a = make_trial(self.ds, 99)
        b = make_trial(self.ds, 99)
        c = make_trial(self.ds, 100)
        np.testing.assert_array_equal(a.train_indices, b.train_indices)
        self.assertFalse(np.array_equal(a.train_indices, c.train_indices))

    def test_trial_too_small(self):
        ds = dataset([1, -1, 1], np.zeros([3, 1]))
        with self.assertRaises(InputError):
            make_trial(ds, 0)

    def test_trial_seed(self):
        self.assertEqual(trial_seed(7, 3), trial_seed(7, 3))
        self.assertNotEqual(trial_seed(7, 3), trial_seed(7, 4))
        self.assertNotEqual(trial_seed(7, 3), trial_seed(8, 3))

    def test_folds(self):
        idx = np.arange(3, 26)
        for seed in range(1000):
            k = 2 + seed % 9
            folds = make_folds(idx, k, seed)
            self.assertEqual(len(folds), k)
            sizes = [len(f) for f in folds]
            self.assertLessEqual(max(sizes) - min(sizes), 1)
            self.assertEqual(sizes, sorted(sizes, reverse = True))
            merged = np.concatenate(folds)
            self.assertEqual(len(np.unique(merged)), len(merged))
            np.testing.assert_array_equal(np.sort(merged), idx)
            for f in folds:
                np.testing.assert_array_equal(f, np.sort(f))

    def test_folds_deterministic(self):
        idx = np.arange(40)
        a = make_folds(idx, 5, trial_seed(3, 1))
        b = make_folds(idx, 5, trial_seed(3, 1))
        c = make_folds(idx, 5, trial_seed(3, 2))
        for fa, fb in zip(a, b):
            np.testing.assert_array_equal(fa, fb)
        self.assertFalse(all(np.array_equal(fa, fc) for fa, fc in zip(a, c)))

    def test_folds_errors(self):
        with self.assertRaises(InputError):
            make_folds(np.arange(10), 1, 0)
        with self.assertRaises(InputError):
            make_folds(np.arange(3), 5, 0)

    def test_minmax_scale(self):
        values = np.array([[0., 5., 1.], [2., 5., 3.], [4., 5., -1.], [10., 5., 0.]])
        ds = dataset([1, -1, 1, -1], values)
        scaled = minmax_scale(ds, [0, 1, 2])
        np.testing.assert_allclose(scaled.values[:3, 0], [0., 0.5, 1.])
        np.testing.assert_allclose(scaled.values[:, 1], 0.)
        np.testing.assert_allclose(scaled.values[3, 0], 2.5)
        np.testing.assert_allclose(scaled.values[:3, 2], [0.5, 1., 0.])


class TestConfigFiles(unittest.TestCase):

    def test_read_write(self):
        folder = tempfile.mkdtemp()
        try:
            fname = os.path.join(folder, 'exp.cfg')
            write_config(fname, {'kernel':'rbf', 'trials':10, 'methods':'MFE,RFE-FRsub'})
            fout = open(fname, 'a')
            fout.write('# a comment\n\n  seed =  4 \n')
            fout.close()
            config = read_config(fname)
            self.assertEqual(config, {'kernel':'rbf', 'trials':'10', 'methods':'MFE,RFE-FRsub', 'seed':'4'})
        finally:
            shutil.rmtree(folder)

    def test_bad_line(self):
        folder = tempfile.mkdtemp()
        try:
            fname = os.path.join(folder, 'exp.cfg')
            fout = open(fname, 'w')
            fout.write('kernel rbf\n')
            fout.close()
            with self.assertRaises(InputError):
                read_config(fname)
        finally:
            shutil.rmtree(folder)
