import numpy as np
from scipy.spatial.distance import cdist

from .utils import InputError

__all__ = ['kernel_config', 'pair_stats', 'candidate_view', 'init_pair_stats', 'remove_feature', 'kernel_eval',
           'kernel_matrix', 'radius_sq', 'candidate_kernel_blocks', 'candidate_radius_sq']

KERNEL_ALIASES = {'linear':'linear', 'poly':'polynomial', 'polynomial':'polynomial',
                  'rbf':'gaussian', 'gaussian':'gaussian'}

# Number of candidate features whose reduced-space kernels are materialised at once:
CANDIDATE_BLOCK = 256

class kernel_config(object):
    """
    Kernel definition used to evaluate K(x_i, x_j) over the retained features. Example usage:

               >>> cfg = elimsvm.kernel_config('gaussian', gamma = 0.5)

    :param kind: (string)
        One of ``linear``, ``polynomial`` (alias ``poly``) or ``gaussian`` (alias ``rbf``).

    :param gamma: (optional, float)
        Scale of the polynomial kernel, ``(gamma*<x_i,x_j> + coef0)^degree``, or width of the gaussian kernel,
        ``exp(-gamma*||x_i - x_j||^2)``. If ``None``, it is set to ``1/M`` by ``resolve``.

    :param coef0: (optional, float)
        Offset of the polynomial kernel. Default is ``1``.

    :param degree: (optional, int)
        Degree of the polynomial kernel. Default is ``3``.

    """

    def resolve(self, n_features):
        """
        Returns a copy of this configuration with ``gamma`` set to ``1/n_features`` if it was not given.
        """
        gamma = self.gamma
        if gamma is None:
            gamma = 1./n_features
        return kernel_config(self.kind, gamma = gamma, coef0 = self.coef0, degree = self.degree)

    def apply(self, ip, sqdist):
        """
        Evaluates the kernel elementwise given arrays of inner products and squared distances (only the one the
        kernel needs is used; the other can be ``None``).
        """
        if self.kind == 'linear':
            return ip
        elif self.kind == 'polynomial':
            return (self.gamma*ip + self.coef0)**self.degree
        else:
            return np.exp(-self.gamma*sqdist)

    def diagonal(self, ip_diag):
        """
        Returns K(x_i, x_i) given the squared norms of the samples.
        """
        if self.kind == 'gaussian':
            return np.ones(np.shape(ip_diag))
        return self.apply(ip_diag, None)

    def needs_sqdist(self):
        return self.kind == 'gaussian'

    def to_string(self):
        return '{0:} gamma={1:} coef0={2:} degree={3:}'.format(self.kind, repr(self.gamma), repr(self.coef0), self.degree)

    @staticmethod
    def from_string(string):
        vector = string.split()
        values = dict(v.split('=') for v in vector[1:])
        gamma = None if values['gamma'] == 'None' else float(values['gamma'])
        return kernel_config(vector[0], gamma = gamma, coef0 = float(values['coef0']), degree = int(values['degree']))

    def __eq__(self, other):
        return isinstance(other, kernel_config) and self.to_string() == other.to_string()

    def __repr__(self):
        return 'kernel_config('+self.to_string()+')'

    def __init__(self, kind = 'gaussian', gamma = None, coef0 = 1., degree = 3):
        if kind not in KERNEL_ALIASES:
            raise InputError('INPUT ERROR: kernel "'+str(kind)+'" not understood. Has to be linear, polynomial (poly) '+\
                             'or gaussian (rbf).')
        self.kind = KERNEL_ALIASES[kind]
        self.gamma = None if gamma is None else float(gamma)
        self.coef0 = float(coef0)
        self.degree = int(degree)
        if self.gamma is not None and self.gamma <= 0.:
            raise InputError('INPUT ERROR: kernel gamma has to be positive (got '+str(gamma)+').')
        if self.kind == 'polynomial' and self.degree < 1:
            raise InputError('INPUT ERROR: polynomial degree has to be at least 1 (got '+str(degree)+').')

class pair_stats(object):
    """
    Pairwise inner products and squared distances between all samples of a dataset, computed over the retained
    feature set and updated recursively as features are removed. Example usage:

               >>> ps = elimsvm.pair_stats(ds.values)
               >>> ps.remove_feature(3)

    :param X: (array)
        Array of shape ``(N, M)`` with the feature values of the samples.

    :param retained: (optional, list of ints)
        Features (0-based) over which statistics are computed. Default is all ``M`` features.

    """

    def get_ip(self, rows = None, cols = None):
        return _submatrix(self.ip, rows, cols)

    def get_sqdist(self, rows = None, cols = None):
        return _submatrix(self.sqdist, rows, cols)

    def remove_feature(self, m, commit = True):
        """
        Removes feature ``m`` from the retained set. If ``commit`` is True the statistics are updated in place
        and this object is returned; otherwise a ``candidate_view`` that applies the removal on read is returned
        and this object is left untouched.
        """
        if m < 0 or m >= self.n_features or not self.mask[m]:
            raise InputError('INPUT ERROR: feature '+str(m)+' is not in the retained set.')
        if not commit:
            return candidate_view(self, m)
        col = self.X[:, m]
        self.ip -= np.outer(col, col)
        self.sqdist -= (col[:, None] - col[None, :])**2
        self.mask[m] = False
        self.retained.remove(m)
        if len(self.retained) == 0:
            self.ip[:] = 0.
            self.sqdist[:] = 0.
        else:
            # Distances are non-negative and exactly zero on the diagonal:
            np.maximum(self.sqdist, 0., out = self.sqdist)
            np.fill_diagonal(self.sqdist, 0.)
        return self

    def recompute(self):
        """
        Returns a new ``pair_stats`` computed from scratch over the current retained set.
        """
        return pair_stats(self.X, retained = list(self.retained))

    def check_consistency(self, tol = 1e-9):
        """
        Cross-checks the redundant storage: sqdist[i,j] = ip[i,i] + ip[j,j] - 2 ip[i,j].
        """
        d = np.diag(self.ip)
        implied = d[:, None] + d[None, :] - 2.*self.ip
        scale = max(1., np.max(np.abs(d))) if len(d) > 0 else 1.
        return bool(np.all(np.abs(implied - self.sqdist) <= tol*scale))

    def copy(self):
        out = pair_stats.__new__(pair_stats)
        out.X = self.X
        out.n_samples, out.n_features = self.n_samples, self.n_features
        out.retained = list(self.retained)
        out.mask = self.mask.copy()
        out.ip = self.ip.copy()
        out.sqdist = self.sqdist.copy()
        return out

    def __init__(self, X, retained = None):
        self.X = np.atleast_2d(np.asarray(X, dtype = float))
        self.n_samples, self.n_features = self.X.shape
        if retained is None:
            retained = list(range(self.n_features))
        self.retained = sorted(int(m) for m in retained)
        self.mask = np.zeros(self.n_features, dtype = bool)
        self.mask[self.retained] = True
        Xr = self.X[:, self.retained]
        if len(self.retained) == 0:
            self.ip = np.zeros([self.n_samples, self.n_samples])
            self.sqdist = np.zeros([self.n_samples, self.n_samples])
        else:
            self.ip = np.dot(Xr, Xr.T)
            self.sqdist = cdist(Xr, Xr, 'sqeuclidean')

class candidate_view(object):
    """
    Read-only view of a ``pair_stats`` object under candidate removal of feature ``m``. Statistics are obtained
    by subtracting the feature's contribution from the parent on read.
    """

    @property
    def retained(self):
        return [k for k in self.parent.retained if k != self.m]

    def get_ip(self, rows = None, cols = None):
        xr, xc = _columns(self.parent.X, self.m, rows, cols)
        return self.parent.get_ip(rows, cols) - np.outer(xr, xc)

    def get_sqdist(self, rows = None, cols = None):
        xr, xc = _columns(self.parent.X, self.m, rows, cols)
        return np.maximum(self.parent.get_sqdist(rows, cols) - (xr[:, None] - xc[None, :])**2, 0.)

    def __init__(self, parent, m):
        self.parent = parent
        self.m = m
        self.n_samples = parent.n_samples
        self.n_features = parent.n_features

def _submatrix(A, rows, cols):
    if rows is None and cols is None:
        return A.copy()
    if rows is None:
        rows = np.arange(A.shape[0])
    if cols is None:
        cols = np.arange(A.shape[1])
    return A[np.ix_(np.asarray(rows, dtype = int), np.asarray(cols, dtype = int))]

def _columns(X, m, rows, cols):
    xr = X[:, m] if rows is None else X[np.asarray(rows, dtype = int), m]
    xc = X[:, m] if cols is None else X[np.asarray(cols, dtype = int), m]
    return xr, xc

def init_pair_stats(ds):
    return pair_stats(ds.values)

def remove_feature(ps, m, commit = True):
    return ps.remove_feature(m, commit = commit)

def kernel_matrix(cfg, ps, rows = None, cols = None):
    """
    Kernel matrix K(x_i, x_j) for ``i`` in ``rows`` and ``j`` in ``cols``, evaluated on the retained features of
    ``ps`` (a ``pair_stats`` or a ``candidate_view``).
    """
    if cfg.needs_sqdist():
        return cfg.apply(None, ps.get_sqdist(rows, cols))
    return cfg.apply(ps.get_ip(rows, cols), None)

def kernel_eval(cfg, ps, i, j):
    return float(kernel_matrix(cfg, ps, [i], [j])[0, 0])

def radius_sq(cfg, ps, rows = None, space = 'feature'):
    """
    Squared data radius: the largest squared pairwise distance between the samples in ``rows``. With
    ``space = 'feature'`` distances are measured in the kernel-induced space (K_ii - 2K_ij + K_jj); with
    ``space = 'input'`` they are plain squared distances over the retained features.
    """
    if space == 'input':
        D = ps.get_sqdist(rows, rows)
    else:
        K = kernel_matrix(cfg, ps, rows, rows)
        d = np.diag(K)
        D = d[:, None] + d[None, :] - 2.*K
    return max(0., float(np.max(D)))

def candidate_kernel_blocks(cfg, ps, rows, cols, candidates, block = CANDIDATE_BLOCK):
    """
    Generator over blocks of candidate features. For each block it yields ``(positions, K)``, where ``positions``
    indexes into ``candidates`` and ``K`` has shape ``(len(positions), len(rows), len(cols))`` with the kernel
    matrix under removal of each candidate feature.
    """
    rows = np.asarray(rows, dtype = int)
    cols = np.asarray(cols, dtype = int)
    candidates = np.asarray(candidates, dtype = int)
    if cfg.needs_sqdist():
        base = ps.get_sqdist(rows, cols)
    else:
        base = ps.get_ip(rows, cols)
    for start in range(0, len(candidates), block):
        positions = np.arange(start, min(start + block, len(candidates)))
        xr = ps.X[np.ix_(rows, candidates[positions])].T
        xc = ps.X[np.ix_(cols, candidates[positions])].T
        if cfg.needs_sqdist():
            reduced = np.maximum(base[None, :, :] - (xr[:, :, None] - xc[:, None, :])**2, 0.)
            yield positions, cfg.apply(None, reduced)
        else:
            reduced = base[None, :, :] - xr[:, :, None]*xc[:, None, :]
            yield positions, cfg.apply(reduced, None)

def candidate_radius_sq(cfg, ps, rows, candidates, space = 'feature', block = CANDIDATE_BLOCK):
    """
    Squared data radius over ``rows`` under removal of each feature in ``candidates``.
    """
    rows = np.asarray(rows, dtype = int)
    out = np.zeros(len(candidates))
    if space == 'input':
        base = ps.get_sqdist(rows, rows)
        candidates = np.asarray(candidates, dtype = int)
        for start in range(0, len(candidates), block):
            positions = np.arange(start, min(start + block, len(candidates)))
            xr = ps.X[np.ix_(rows, candidates[positions])].T
            reduced = base[None, :, :] - (xr[:, :, None] - xr[:, None, :])**2
            out[positions] = np.max(reduced.reshape(len(positions), -1), axis = 1)
    else:
        for positions, K in candidate_kernel_blocks(cfg, ps, rows, rows, candidates, block = block):
            d = np.diagonal(K, axis1 = 1, axis2 = 2)
            D = d[:, :, None] + d[:, None, :] - 2.*K
            out[positions] = np.max(D.reshape(len(positions), -1), axis = 1)
    return np.maximum(out, 0.)
