import os
import numpy as np
from sklearn.model_selection import KFold
from sklearn.preprocessing import MinMaxScaler

__all__ = ['ElimsvmError', 'InputError', 'DataFormatError', 'ConvergenceError', 'NoCandidateError',
           'SeparabilityExhausted', 'LOInapplicable', 'TAU_SEP', 'dataset', 'trial_split',
           'parse_libsvm', 'read_libsvm', 'write_libsvm', 'make_trial', 'make_folds', 'trial_seed',
           'minmax_scale', 'read_config', 'write_config']

# Threshold above which y*f(x) counts as strictly positive (separability test):
TAU_SEP = 1e-9

class ElimsvmError(Exception):
    """Base class of every error raised by elimsvm."""
    pass

class InputError(ElimsvmError):
    pass

class DataFormatError(InputError):
    pass

class ConvergenceError(ElimsvmError):
    """
    Raised when the dual solver hits its iteration cap. The number of iterations performed is
    stored in ``n_iter``.
    """
    def __init__(self, message, n_iter = None):
        ElimsvmError.__init__(self, message)
        self.n_iter = n_iter

class NoCandidateError(ElimsvmError):
    """Raised by an elimination step when no retained feature is an admissible candidate."""
    pass

class SeparabilityExhausted(NoCandidateError):
    pass

class LOInapplicable(NoCandidateError):
    pass

class dataset(object):
    """
    Labelled data held in dense form. Example usage:

               >>> ds = elimsvm.dataset(labels = [1, -1], values = [[0.5, 0., -2.], [0., 1., 0.]])

    :param labels: (array-like)
        Labels of the ``N`` samples. Any positive value is mapped to ``+1``, everything else to ``-1``.

    :param values: (array-like)
        Array of shape ``(N, M)`` with the feature values of each sample.

    :param name: (optional, string)
        Name of the dataset (e.g., the file it was read from). Only used for reporting.

    """

    def to_libsvm(self):
        """
        Returns the dataset as LIBSVM-formatted text (zero values omitted, 1-based indices).
        """
        lines = []
        for n in range(self.n_samples):
            tokens = ['+1' if self.labels[n] > 0 else '-1']
            for m in np.where(self.values[n] != 0.)[0]:
                tokens.append('{0:}:{1:}'.format(m + 1, repr(float(self.values[n, m]))))
            lines.append(' '.join(tokens))
        return '\n'.join(lines) + '\n'

    def class_counts(self, idx = None):
        """
        Returns the number of positive and negative samples (optionally, only among indexes ``idx``).
        """
        y = self.labels if idx is None else self.labels[np.asarray(idx, dtype = int)]
        return int(np.sum(y > 0)), int(np.sum(y < 0))

    def __init__(self, labels, values, name = None):
        labels = np.asarray(labels, dtype = float)
        values = np.atleast_2d(np.asarray(values, dtype = float))
        if labels.ndim != 1 or values.shape[0] != len(labels):
            raise InputError('INPUT ERROR: labels and values have inconsistent shapes ('+str(labels.shape)+\
                             ' vs '+str(values.shape)+').')
        self.labels = np.where(labels > 0, 1., -1.)
        self.values = values
        self.name = name
        self.n_samples, self.n_features = values.shape
        if self.n_samples < 2:
            raise InputError('INPUT ERROR: a dataset needs at least two samples.')
        if self.n_features < 1:
            raise InputError('INPUT ERROR: a dataset needs at least one feature.')
        if not np.all(np.isfinite(values)):
            raise InputError('INPUT ERROR: dataset values must all be finite.')
        npos, nneg = self.class_counts()
        if npos == 0 or nneg == 0:
            raise InputError('INPUT ERROR: only one class present in the dataset; both +1 and -1 samples are needed.')

class trial_split(object):
    """
    A random 50-50 split of a dataset into a training (non-heldout) half and a test (heldout) half.
    ``train_indices`` and ``test_indices`` are sorted ascending.
    """
    def __init__(self, trial_id, seed, train_indices, test_indices):
        self.trial_id = trial_id
        self.seed = seed
        self.train_indices = np.asarray(train_indices, dtype = int)
        self.test_indices = np.asarray(test_indices, dtype = int)

def parse_libsvm(text, n_features_hint = None, name = None):
    """
    Parses LIBSVM-formatted data (``label idx:val idx:val ...``, 1-based and strictly increasing indexes) and
    returns a ``dataset``. ``text`` can be either a string or any iterable of lines (e.g., an open file).
    Unspecified entries are set to zero; the number of features is the largest index seen or
    ``n_features_hint``, whichever is larger.
    """
    if isinstance(text, str):
        text = text.splitlines()
    labels = []
    rows = []
    max_index = 0
    for line_no, line in enumerate(text, start = 1):
        vector = line.split()
        if len(vector) == 0:
            continue
        try:
            label = float(vector[0])
        except ValueError:
            raise DataFormatError('DATA ERROR: line '+str(line_no)+': label "'+vector[0]+'" is not numeric.')
        row = {}
        last_index = 0
        for token in vector[1:]:
            if token.count(':') != 1:
                raise DataFormatError('DATA ERROR: line '+str(line_no)+': token "'+token+'" is not of the form index:value.')
            sidx, sval = token.split(':')
            try:
                idx = int(sidx)
            except ValueError:
                raise DataFormatError('DATA ERROR: line '+str(line_no)+': index "'+sidx+'" is not an integer.')
            try:
                val = float(sval)
            except ValueError:
                raise DataFormatError('DATA ERROR: line '+str(line_no)+': value "'+sval+'" is not numeric.')
            if idx in row:
                raise DataFormatError('DATA ERROR: line '+str(line_no)+': duplicate index '+str(idx)+'.')
            if idx < 1 or idx <= last_index:
                raise DataFormatError('DATA ERROR: line '+str(line_no)+': indexes must be 1-based and strictly increasing.')
            if not np.isfinite(val):
                raise DataFormatError('DATA ERROR: line '+str(line_no)+': value for index '+str(idx)+' is not finite.')
            row[idx] = val
            last_index = idx
        max_index = max(max_index, last_index)
        labels.append(label)
        rows.append(row)
    if len(rows) == 0:
        raise DataFormatError('DATA ERROR: empty dataset; no samples were found.')
    n_features = max_index
    if n_features_hint is not None:
        n_features = max(n_features, int(n_features_hint))
    values = np.zeros([len(rows), n_features])
    for n in range(len(rows)):
        for idx in rows[n].keys():
            values[n, idx - 1] = rows[n][idx]
    labels = np.array(labels)
    if np.all(labels > 0) or np.all(labels <= 0):
        raise DataFormatError('DATA ERROR: single class; all labels map to the same class.')
    return dataset(labels, values, name = name)

def read_libsvm(fname, n_features_hint = None):
    """
    Reads a LIBSVM-formatted file into a ``dataset``.
    """
    if not os.path.exists(fname):
        raise InputError('INPUT ERROR: data file '+fname+' not found.')
    with open(fname, 'r') as fin:
        return parse_libsvm(fin, n_features_hint = n_features_hint, name = os.path.basename(fname))

def write_libsvm(ds, fname):
    fout = open(fname, 'w')
    fout.write(ds.to_libsvm())
    fout.close()

def trial_seed(base_seed, attempt):
    """
    Derives the 64-bit seed of a trial attempt from the base seed; this is the only entropy source of an experiment.
    """
    return int(np.random.SeedSequence([int(base_seed), int(attempt)]).generate_state(1, dtype = np.uint64)[0])

def make_trial(ds, seed, trial_id = 0):
    """
    Randomly splits ``ds`` 50-50 into a training and a test half (odd ``N`` puts the extra sample in the
    training half). The split is a uniform permutation (no stratification), deterministic for a given ``seed``.
    """
    if ds.n_samples < 4:
        raise InputError('INPUT ERROR: at least 4 samples are needed to split a dataset into trials (got '+\
                         str(ds.n_samples)+').')
    rng = np.random.default_rng(seed)
    perm = rng.permutation(ds.n_samples)
    n_train = (ds.n_samples + 1)//2
    return trial_split(trial_id, seed, np.sort(perm[:n_train]), np.sort(perm[n_train:]))

def make_folds(indices, k, seed):
    """
    Partitions ``indices`` into ``k`` disjoint folds whose sizes differ by at most one (larger folds first).
    Each fold is returned sorted.
    """
    indices = np.asarray(indices, dtype = int)
    if k < 2:
        raise InputError('INPUT ERROR: at least 2 folds are needed for cross-validation (got '+str(k)+').')
    if k > len(indices):
        raise InputError('INPUT ERROR: cannot make '+str(k)+' folds out of '+str(len(indices))+' samples.')
    # KFold seeds a RandomState, which only takes 32-bit seeds:
    random_state = int(np.random.SeedSequence(int(seed)).generate_state(1)[0])
    kfold = KFold(n_splits = k, shuffle = True, random_state = random_state)
    return [np.sort(indices[valid]) for train, valid in kfold.split(indices)]

def minmax_scale(ds, train_idx):
    """
    Returns a copy of ``ds`` where every feature is min-max scaled to [0,1] using the training samples only.
    Constant features (on the training half) are set to zero.
    """
    train_idx = np.asarray(train_idx, dtype = int)
    scaler = MinMaxScaler().fit(ds.values[train_idx])
    scaled = scaler.transform(ds.values)
    scaled[:, scaler.data_range_ == 0.] = 0.
    return dataset(ds.labels, scaled, name = ds.name)

def read_config(fname):
    """
    Reads a flat ``key = value`` configuration file into a dictionary of strings. Lines starting with ``#`` are
    comments; inline comments are not supported.
    """
    if not os.path.exists(fname):
        raise InputError('INPUT ERROR: configuration file '+fname+' not found.')
    config = {}
    fin = open(fname, 'r')
    line_no = 0
    while True:
        line = fin.readline()
        line_no += 1
        if line != '':
            line = line.strip()
            if line == '' or line[0] == '#':
                continue
            if '=' not in line:
                fin.close()
                raise InputError('INPUT ERROR: line '+str(line_no)+' of '+fname+' is not of the form key = value.')
            key, value = line.split('=', 1)
            config[key.strip()] = value.strip()
        else:
            break
    fin.close()
    return config

def write_config(fname, config):
    """
    Writes a dictionary out as a ``key = value`` file (keys in insertion order).
    """
    fout = open(fname, 'w')
    for key in config.keys():
        fout.write('{0:} = {1:}\n'.format(key, config[key]))
    fout.close()
