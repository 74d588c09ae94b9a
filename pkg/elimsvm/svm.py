import contextlib
from multiprocessing import Pool

import numpy as np
from sklearn.model_selection import ParameterGrid

from .utils import InputError, ConvergenceError, TAU_SEP, make_folds
from .kernels import kernel_config, pair_stats, kernel_matrix

__all__ = ['smo_solve', 'svm_model', 'margin_view', 'train', 'decision_values', 'discriminant', 'weight_norm_sq',
           'margins', 'default_grid', 'cv_select', 'test_error']

# Default grids; gaussian gammas are multiplied by 1/M:
C_GRID = [2.**e for e in range(-5, 16, 2)]
GAMMA_FACTORS = [2.**-15, 2.**-11, 2.**-7, 2.**-3, 2.**1]

def smo_solve(Q, y, C, tol = 1e-3, max_iter = 10**7, verbose = False):
    """
    Solves the SVM dual, min 0.5 a^T Q a - sum(a) s.t. y^T a = 0 and 0 <= a <= C, by sequential minimal
    optimization with maximal-violating-pair working-set selection. Returns the multipliers, the final gradient
    and the number of iterations.

    :param Q: (array)
        Matrix of shape ``(n, n)`` with entries ``y_i y_j K(x_i, x_j)``.

    :param y: (array)
        Labels (+1/-1).

    :param C: (float)
        Upper bound of the multipliers.

    :param tol: (optional, float)
        Stopping tolerance on the maximal KKT violation. Default is ``1e-3``.

    :param max_iter: (optional, int)
        Hard cap on the number of iterations; reaching it raises a ``ConvergenceError``. Default is ``1e7``.

    """
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    Qd = np.diag(Q).copy()
    n_iter = 0
    while True:
        yg = -y*grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not np.any(up) or not np.any(low):
            break
        i = int(np.argmax(np.where(up, yg, -np.inf)))
        j = int(np.argmin(np.where(low, yg, np.inf)))
        if yg[i] - yg[j] < tol:
            break
        if n_iter >= max_iter:
            raise ConvergenceError('SOLVER ERROR: SMO did not converge after '+str(n_iter)+' iterations (maximal KKT '+\
                                   'violation '+str(yg[i] - yg[j])+', tolerance '+str(tol)+').', n_iter = n_iter)
        n_iter += 1
        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = Qd[i] + Qd[j] + 2.*Q[i, j]
            if quad <= 0.:
                quad = 1e-12
            delta = (-grad[i] - grad[j])/quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0.:
                if aj < 0.:
                    aj = 0.
                    ai = diff
            else:
                if ai < 0.:
                    ai = 0.
                    aj = -diff
            if diff > 0.:
                if ai > C:
                    ai = C
                    aj = C - diff
            else:
                if aj > C:
                    aj = C
                    ai = C + diff
        else:
            quad = Qd[i] + Qd[j] - 2.*Q[i, j]
            if quad <= 0.:
                quad = 1e-12
            delta = (grad[i] - grad[j])/quad
            total = ai + aj
            ai -= delta
            aj += delta
            if total > C:
                if ai > C:
                    ai = C
                    aj = total - C
                if aj > C:
                    aj = C
                    ai = total - C
            else:
                if aj < 0.:
                    aj = 0.
                    ai = total
                if ai < 0.:
                    ai = 0.
                    aj = total
        dai, daj = ai - alpha[i], aj - alpha[j]
        alpha[i], alpha[j] = ai, aj
        grad += Q[:, i]*dai + Q[:, j]*daj
    if verbose:
        print('\t SMO converged after '+str(n_iter)+' iterations.')
    return alpha, grad, n_iter

def _intercept(alpha, grad, y, C):
    """
    Intercept from the KKT conditions: average over free multipliers or, if there are none, the midpoint of the
    feasible interval.
    """
    yg = y*grad
    free = (alpha > 0.) & (alpha < C)
    if np.any(free):
        return -float(np.mean(yg[free]))
    upper = alpha >= C
    lower = alpha <= 0.
    ub_set = (upper & (y < 0)) | (lower & (y > 0))
    lb_set = (upper & (y > 0)) | (lower & (y < 0))
    ub = np.min(yg[ub_set]) if np.any(ub_set) else np.inf
    lb = np.max(yg[lb_set]) if np.any(lb_set) else -np.inf
    if not np.isfinite(ub):
        return -float(lb)
    if not np.isfinite(lb):
        return -float(ub)
    return -0.5*float(ub + lb)

class svm_model(object):
    """
    A trained soft-margin kernel SVM, f(x) = sum_k lambda_k y_k K(s_k, x) + w0. Support-vector indexes refer to
    rows of the dataset the model was trained on. Models are not modified after training.

    :param sv_indices: (array of ints)
        Dataset indexes of the support vectors.

    :param multipliers: (array)
        Lagrange multipliers (0 < lambda_k <= C) of the support vectors.

    :param sv_labels: (array)
        Labels of the support vectors.

    :param intercept: (float)
        The intercept w0.

    :param c_param: (float)
        The trade-off parameter C the model was trained with.

    :param kernel: (elimsvm.kernel_config)
        Kernel of the model.

    :param w_norm_sq: (float)
        Squared weight-vector norm, sum_k sum_l lambda_k y_k lambda_l y_l K(s_k, s_l), on the features the model
        was trained on.

    :param objective: (float)
        Primal objective 0.5||w||^2 + C sum(xi) on the training samples.

    :param train_indices: (array of ints)
        Dataset indexes of the training samples.

    """

    @property
    def coef(self):
        return self.multipliers*self.sv_labels

    def decision_values(self, ps, idx):
        return decision_values(self, ps, idx)

    def to_text(self):
        """
        Text snapshot of the model (kernel, C, intercept, cached norms and support vectors).
        """
        lines = ['kernel '+self.kernel.to_string(),
                 'C '+repr(self.c_param),
                 'intercept '+repr(self.intercept),
                 'w_norm_sq '+repr(self.w_norm_sq),
                 'objective '+repr(self.objective),
                 'train_indices '+','.join(str(i) for i in self.train_indices)]
        for k in range(len(self.sv_indices)):
            lines.append('sv {0:} {1:} {2:+d}'.format(int(self.sv_indices[k]), repr(float(self.multipliers[k])),
                                                     int(self.sv_labels[k])))
        return '\n'.join(lines) + '\n'

    @staticmethod
    def from_text(text):
        fields = {}
        svs = []
        for line in text.splitlines():
            if line.strip() == '':
                continue
            key, value = line.split(' ', 1)
            if key == 'sv':
                svs.append(value.split())
            else:
                fields[key] = value
        train_indices = [int(i) for i in fields['train_indices'].split(',') if i != '']
        return svm_model(np.array([int(s[0]) for s in svs], dtype = int), np.array([float(s[1]) for s in svs]),
                         np.array([float(s[2]) for s in svs]), float(fields['intercept']), float(fields['C']),
                         kernel_config.from_string(fields['kernel']), float(fields['w_norm_sq']),
                         float(fields['objective']), train_indices)

    def __init__(self, sv_indices, multipliers, sv_labels, intercept, c_param, kernel, w_norm_sq, objective,
                 train_indices, n_iter = 0, tol = 1e-3):
        self.sv_indices = np.asarray(sv_indices, dtype = int)
        self.multipliers = np.asarray(multipliers, dtype = float)
        self.sv_labels = np.asarray(sv_labels, dtype = float)
        self.intercept = float(intercept)
        self.c_param = float(c_param)
        self.kernel = kernel
        self.w_norm_sq = float(w_norm_sq)
        self.objective = float(objective)
        self.train_indices = np.asarray(train_indices, dtype = int)
        self.n_iter = n_iter
        self.tol = tol

class margin_view(object):
    """
    Functional margins g_n = y_n f(x_n) of a set of samples, whether they are all above ``TAU_SEP`` and, if so,
    the geometric margin min(g)/||w||.
    """
    def __init__(self, g, w_norm):
        self.g = np.asarray(g, dtype = float)
        self.separable = bool(np.min(self.g) > TAU_SEP)
        if self.separable and w_norm > 0.:
            self.margin = float(np.min(self.g))/w_norm
        else:
            self.margin = None

def train(ds, subset, cfg, ps, C, tol = 1e-3, max_iter = 10**7, verbose = False):
    """
    Trains a soft-margin SVM on the samples ``subset`` of ``ds``, with kernels evaluated through ``ps`` (i.e., on
    its retained features). Returns an ``svm_model``.

    :param ds: (elimsvm.dataset)
        The dataset.

    :param subset: (array of ints)
        Indexes of the training samples; both classes have to be present.

    :param cfg: (elimsvm.kernel_config)
        Kernel to use (``gamma`` has to be resolved).

    :param ps: (elimsvm.pair_stats or elimsvm.candidate_view)
        Pairwise statistics over the features the SVM is trained on.

    :param C: (float)
        Trade-off parameter (positive).

    :param tol: (optional, float)
        KKT tolerance of the dual solver. Default is ``1e-3``.

    :param verbose: (optional, boolean)
        If True, solver progress is printed to terminal. Default is False.

    """
    subset = np.asarray(subset, dtype = int)
    if C <= 0.:
        raise InputError('INPUT ERROR: C has to be positive (got '+str(C)+').')
    if cfg.gamma is None and cfg.kind != 'linear':
        cfg = cfg.resolve(ds.n_features)
    y = ds.labels[subset]
    if np.all(y > 0) or np.all(y < 0):
        raise InputError('INPUT ERROR: SVM training needs both classes in the training subset.')
    K = kernel_matrix(cfg, ps, subset, subset)
    Q = (y[:, None]*y[None, :])*K
    alpha, grad, n_iter = smo_solve(Q, y, C, tol = tol, max_iter = max_iter, verbose = verbose)
    w0 = _intercept(alpha, grad, y, C)
    sv = np.where(alpha > 1e-8*C)[0]
    coef = alpha[sv]*y[sv]
    w_norm_sq = max(0., float(np.dot(coef, np.dot(K[np.ix_(sv, sv)], coef))))
    f = np.dot(coef, K[sv, :]) + w0
    objective = 0.5*w_norm_sq + C*float(np.sum(np.maximum(0., 1. - y*f)))
    if verbose:
        print('\t Trained SVM with C = '+str(C)+', '+str(len(sv))+' support vectors, objective = '+str(objective))
    return svm_model(subset[sv], alpha[sv], y[sv], w0, C, cfg, w_norm_sq, objective, subset, n_iter = n_iter, tol = tol)

def decision_values(model, ps, idx):
    """
    Discriminant values f(x_n) = sum_k lambda_k y_k K(s_k, x_n) + w0 of samples ``idx`` over the retained features
    of ``ps``.
    """
    idx = np.asarray(idx, dtype = int)
    if len(model.sv_indices) == 0:
        return np.zeros(len(idx)) + model.intercept
    K = kernel_matrix(model.kernel, ps, model.sv_indices, idx)
    return np.dot(model.coef, K) + model.intercept

def discriminant(model, ps, n):
    return float(decision_values(model, ps, [n])[0])

def weight_norm_sq(model, ps):
    """
    Squared weight-vector norm in kernel form, sum_k sum_l lambda_k y_k lambda_l y_l K(s_k, s_l), on the retained
    features of ``ps``.
    """
    if len(model.sv_indices) == 0:
        return 0.
    K = kernel_matrix(model.kernel, ps, model.sv_indices, model.sv_indices)
    return max(0., float(np.dot(model.coef, np.dot(K, model.coef))))

def margins(boundary, ps, idx, labels, w_norm = None):
    """
    Returns the ``margin_view`` of a boundary (an ``svm_model`` or anything with a ``decision_values`` method) on
    samples ``idx`` with labels ``labels``.
    """
    g = np.asarray(labels, dtype = float)*boundary.decision_values(ps, idx)
    if w_norm is None:
        w_norm = np.sqrt(weight_norm_sq(boundary, ps))
    return margin_view(g, w_norm)

def test_error(boundary, ps_test, test_idx, labels, count = False):
    """
    Fraction of samples ``test_idx`` (with labels ``labels``) for which y f(x) <= 0, i.e., a boundary value of zero
    counts as an error. ``boundary`` is an ``svm_model`` or a ``boundary_state`` (whose rescale, if any, is applied).
    If ``count`` is True, the number of errors is returned as well.
    """
    test_idx = np.asarray(test_idx, dtype = int)
    if len(test_idx) == 0:
        raise InputError('INPUT ERROR: cannot compute a test error on an empty test set.')
    g = np.asarray(labels, dtype = float)*boundary.decision_values(ps_test, test_idx)
    errors = int(np.sum(g <= 0.))
    if count:
        return errors/float(len(test_idx)), errors
    return errors/float(len(test_idx))

def default_grid(kind, n_features, c_grid = None, gamma_factors = None, coef0 = 1., degree = 3):
    """
    Default hyperparameter grid: C in 2^-5, 2^-3, ..., 2^15; for the gaussian kernel gamma in
    {2^-15, 2^-11, 2^-7, 2^-3, 2^1}/M; the polynomial kernel is fixed to degree 3, gamma = 1/M and coef0 = 1.
    Returns a list of ``(kernel_config, C)`` tuples in grid order (C outermost, kernels in the order given).
    """
    if c_grid is None:
        c_grid = C_GRID
    if gamma_factors is None:
        gamma_factors = GAMMA_FACTORS
    kind = kernel_config(kind).kind
    if kind == 'gaussian':
        kernels = [kernel_config('gaussian', gamma = g/float(n_features)) for g in gamma_factors]
    elif kind == 'polynomial':
        kernels = [kernel_config('polynomial', gamma = 1./n_features, coef0 = coef0, degree = degree)]
    else:
        kernels = [kernel_config('linear')]
    grid = ParameterGrid({'C':[float(C) for C in c_grid], 'kernel':kernels})
    return [(point['kernel'], point['C']) for point in grid]

def _fold_accuracy(args):
    ds, ps, train_part, valid_part, cfg, C, tol = args
    y_valid = ds.labels[valid_part]
    npos, nneg = ds.class_counts(train_part)
    if npos == 0 or nneg == 0:
        # Single-class training part: every validation sample is predicted as that class.
        return float(np.mean(y_valid == (1. if npos > 0 else -1.)))
    model = train(ds, train_part, cfg, ps, C, tol = tol)
    return 1. - test_error(model, ps, valid_part, y_valid)

def _cv_accuracies(ds, train_idx, grid, ps, k, seed, tol, nthreads):
    """
    Validation accuracy of every grid point (rows) on every fold (columns).
    """
    folds = make_folds(train_idx, k, seed)
    parts = []
    degenerate = 0
    for f in range(k):
        train_part = np.sort(np.concatenate([folds[l] for l in range(k) if l != f]))
        npos, nneg = ds.class_counts(train_part)
        if npos == 0 or nneg == 0:
            degenerate += 1
            print('\t Warning: cross-validation fold '+str(f)+' has a single class in its training part; its '+\
                  'validation samples are scored with that class.')
        parts.append((train_part, folds[f]))
    if degenerate == k:
        raise InputError('INPUT ERROR: every cross-validation fold is degenerate (single-class training part).')
    tasks = [(ds, ps, tp, vp, cfg, C, tol) for (cfg, C) in grid for (tp, vp) in parts]
    if nthreads is not None and nthreads > 1:
        with contextlib.closing(Pool(processes = nthreads)) as executor:
            accuracies = executor.map(_fold_accuracy, tasks)
    else:
        accuracies = [_fold_accuracy(t) for t in tasks]
    return np.array(accuracies).reshape(len(grid), k)

def cv_select(ds, train_idx, grid, ps = None, k = 5, seed = 0, tol = 1e-3, nthreads = None, verbose = False):
    """
    Selects the grid point with the highest mean k-fold validation accuracy on samples ``train_idx``. Ties are
    broken by smaller C, then by grid order. A fold whose training part lacks a class is scored with the constant
    prediction of the class it has. Returns the ``(kernel_config, C)`` tuple selected.

    :param grid: (list)
        List of ``(kernel_config, C)`` tuples.

    :param ps: (optional, elimsvm.pair_stats)
        Pairwise statistics; computed from ``ds`` over all features if not given.

    :param k: (optional, int)
        Number of folds. Default is ``5``.

    :param seed: (optional, int)
        Seed of the fold partition.

    :param nthreads: (optional, int)
        If larger than 1, the (fold, grid point) trainings are distributed on a ``multiprocessing`` pool.

    """
    if len(grid) == 0:
        raise InputError('INPUT ERROR: the hyperparameter grid is empty.')
    if len(grid) == 1:
        return grid[0]
    if ps is None:
        ps = pair_stats(ds.values)
    train_idx = np.asarray(train_idx, dtype = int)
    accuracies = _cv_accuracies(ds, train_idx, grid, ps, k, seed, tol, nthreads)
    best = None
    for g in range(len(grid)):
        key = (-float(np.mean(accuracies[g])), grid[g][1], g)
        if verbose:
            print('\t CV: '+grid[g][0].to_string()+' C = '+str(grid[g][1])+' -> accuracy '+str(-key[0]))
        if best is None or key < best:
            best = key
    return grid[best[2]]
