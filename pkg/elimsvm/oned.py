import numpy as np

from .utils import InputError
from .svm import smo_solve

__all__ = ['projected_data', 'oned_solution', 'lo_solution', 'solve_1d', 'solve_1d_batch', 'solve_1d_oracle',
           'lo_fit', 'solve_lo', 'hinge_objective']

KIND_NAMES = ['pair', 'saturated', 'flat']

# Largest number of floats materialised by the batched intercept search:
_INTERCEPT_CHUNK = 2*10**7

class projected_data(object):
    """
    Scalar projections z_n of the samples on a (reduced-space) weight vector, together with their labels.

    :param z: (array)
        Projections; for a kernel SVM these are sum_k lambda_k y_k K(s_k, x_n)/||w||.

    :param labels: (array)
        Labels (+1/-1) of the samples.

    :param norm_used: (optional, float)
        The ||w|| the projections were divided by. Default is ``1``.

    """
    def __init__(self, z, labels, norm_used = 1.):
        self.z = np.asarray(z, dtype = float)
        self.labels = np.where(np.asarray(labels, dtype = float) > 0, 1., -1.)
        if self.z.shape != self.labels.shape:
            raise InputError('INPUT ERROR: projections and labels have different lengths.')
        if not np.all(np.isfinite(self.z)):
            raise InputError('INPUT ERROR: projections must be finite.')
        if not norm_used > 0.:
            raise InputError('INPUT ERROR: norm_used has to be positive (got '+str(norm_used)+').')
        self.norm_used = float(norm_used)

class oned_solution(object):
    """
    Solution (w, b) of a 1-d soft-margin SVM, min 0.5 w^2 + C sum_n max(0, 1 - y_n (w z_n + b)).

    ``kind`` is ``pair`` if one sample of each class sits exactly on the margin (``margin_setters`` holds their
    indexes, positive class first), ``saturated`` if every multiplier sits at a bound, and ``flat`` for the
    w = 0 solution.
    """
    def __init__(self, w, b, xi, objective, margin_setters = None, kind = 'pair'):
        self.w = float(w)
        self.b = float(b)
        self.xi = xi
        self.objective = float(objective)
        self.margin_setters = margin_setters
        self.kind = kind

class lo_solution(object):
    """
    Result of the linear rescaling (A, w0) of a separable projection: every sample satisfies
    y_n (A z'_n + w0) >= 1 and A^2 is minimal. ``post_margin`` is the resulting margin 1/(|A| ||w||).
    """
    def __init__(self, a_scale, intercept, w_norm = 1.):
        self.a_scale = float(a_scale)
        self.intercept = float(intercept)
        self.post_margin = 1./(abs(self.a_scale)*w_norm)

def hinge_objective(w, b, z, y, C):
    """
    Direct evaluation of 0.5 w^2 + C sum(xi). ``w`` and ``b`` may be arrays of shape ``(c,)`` for ``z`` of
    shape ``(c, N)``.
    """
    w = np.asarray(w, dtype = float)
    b = np.asarray(b, dtype = float)
    xi = np.maximum(0., 1. - y*(w[..., None]*z + b[..., None]))
    return 0.5*w**2 + C*np.sum(xi, axis = -1)

def _best_intercept(Z, y, w):
    """
    For each row of ``Z`` (with slope ``w``), the intercept minimising sum_n max(0, 1 - y_n (w z_n + b)). This is
    piecewise linear in b with knots at b = y_n - w z_n, so the first knot attaining the minimum is returned.
    """
    c, N = Z.shape
    b = np.zeros(c)
    step = max(1, _INTERCEPT_CHUNK//(N*N))
    for start in range(0, c, step):
        sl = slice(start, min(c, start + step))
        wz = w[sl, None]*Z[sl]
        knots = y[None, :] - wz
        # losses[row, knot, sample]:
        losses = np.maximum(0., 1. - y[None, None, :]*(wz[:, None, :] + knots[:, :, None])).sum(axis = 2)
        b[sl] = knots[np.arange(knots.shape[0]), np.argmin(losses, axis = 1)]
    return b

def _sorted_classes(V, pos, neg):
    """
    Per row, positive-class values ascending and negative-class values descending (stable, so ties keep sample
    order), with the permutations used.
    """
    Vp, Vn = V[:, pos], V[:, neg]
    order_p = np.argsort(Vp, axis = 1, kind = 'stable')
    order_n = np.argsort(-Vn, axis = 1, kind = 'stable')
    return np.take_along_axis(Vp, order_p, axis = 1), np.take_along_axis(Vn, order_n, axis = 1), order_p, order_n

def solve_1d_batch(Z, labels, C):
    """
    Exact 1-d soft-margin SVM solved independently on every row of ``Z`` (shape ``(c, N)``), all rows sharing the
    labels ``labels``. Returns a dictionary of arrays of length ``c``: ``w``, ``b``, ``objective``, ``kind``
    (index in ``KIND_NAMES``) and ``setter_pos``/``setter_neg`` (margin-setter sample indexes, -1 if none).

    Three candidate families are scanned per row and the one of smallest objective is kept (ties resolved in
    the order pair, saturated, flat):

        - margin-setter pairs: in each of the two orientations, the positive class is sorted inwards-out
          (p_0 <= p_1 <= ...) and the negative one likewise (q_0 >= q_1 >= ...). Pair j (p_j > q_j) fixes
          w = 2/(p_j - q_j), b = 1 - w p_j and leaves exactly j violators per class, with total slack
          2j - w (d+_j - d-_j) where d+_j, d-_j are the prefix sums of p and q.
        - saturated solutions: all multipliers at 0 or C, k of them at C in each class. The weight is then
          C (d+_k - d-_k) and the best k maximises the dual value 2kC - w^2/2.
        - the flat solution w = 0, b = +/-1.

    """
    Z = np.atleast_2d(np.asarray(Z, dtype = float))
    y = np.where(np.asarray(labels, dtype = float) > 0, 1., -1.)
    if not C > 0.:
        raise InputError('INPUT ERROR: C has to be positive (got '+str(C)+').')
    pos = np.where(y > 0)[0]
    neg = np.where(y < 0)[0]
    if len(pos) == 0 or len(neg) == 0:
        raise InputError('INPUT ERROR: the 1-d SVM needs samples of both classes.')
    c = Z.shape[0]
    L = min(len(pos), len(neg))
    rows = np.arange(c)

    pair_obj = np.full(c, np.inf)
    pair_w = np.zeros(c)
    pair_b = np.zeros(c)
    pair_sp = np.full(c, -1, dtype = int)
    pair_sn = np.full(c, -1, dtype = int)
    D = []
    for s in [1., -1.]:
        p, q, order_p, order_n = _sorted_classes(s*Z, pos, neg)
        cp = np.concatenate([np.zeros([c, 1]), np.cumsum(p[:, :L], axis = 1)], axis = 1)
        cn = np.concatenate([np.zeros([c, 1]), np.cumsum(q[:, :L], axis = 1)], axis = 1)
        D.append(cp - cn)
        # Margin-setter pairs:
        gap = p[:, :L] - q[:, :L]
        valid = gap > 0.
        w = 2./np.where(valid, gap, 1.)
        j = np.arange(L)[None, :]
        obj = np.where(valid, 0.5*w**2 + C*(2.*j - w*(cp[:, :L] - cn[:, :L])), np.inf)
        jbest = np.argmin(obj, axis = 1)
        obest = obj[rows, jbest]
        better = obest < pair_obj
        wb = w[rows, jbest]
        pair_obj = np.where(better, obest, pair_obj)
        pair_w = np.where(better, s*wb, pair_w)
        pair_b = np.where(better, 1. - wb*p[rows, jbest], pair_b)
        pair_sp = np.where(better, pos[order_p[rows, jbest]], pair_sp)
        pair_sn = np.where(better, neg[order_n[rows, jbest]], pair_sn)
    has_pair = np.isfinite(pair_obj)

    # Saturated solutions (at most one orientation has a positive weight for a given k):
    W1, W2 = C*D[0], C*D[1]
    d = np.maximum(0., np.maximum(W1, W2))
    k = np.arange(L + 1)[None, :]
    G = np.where(d > 0., 2.*k*C - 0.5*d**2, -np.inf)
    kbest = np.argmax(G, axis = 1)
    has_sat = np.isfinite(G[rows, kbest])
    sat_w = np.where(W1[rows, kbest] > 0., W1[rows, kbest], -W2[rows, kbest])
    sat_w = np.where(has_sat, sat_w, 0.)
    sat_b = np.zeros(c)
    if np.any(has_sat):
        sat_b[has_sat] = _best_intercept(Z[has_sat], y, sat_w[has_sat])

    # Flat solution:
    flat_b = 1. if len(neg) <= len(pos) else -1.

    w = np.zeros(c)
    b = np.zeros(c) + flat_b
    kind = np.full(c, 2, dtype = int)
    best = hinge_objective(w, b, Z, y, C)
    sat_obj = np.where(has_sat, hinge_objective(sat_w, sat_b, Z, y, C), np.inf)
    take = sat_obj <= best
    w, b, best = np.where(take, sat_w, w), np.where(take, sat_b, b), np.where(take, sat_obj, best)
    kind[take] = 1
    pair_direct = np.where(has_pair, hinge_objective(pair_w, pair_b, Z, y, C), np.inf)
    take = pair_direct <= best
    w, b, best = np.where(take, pair_w, w), np.where(take, pair_b, b), np.where(take, pair_direct, best)
    kind[take] = 0
    setter_pos = np.where(kind == 0, pair_sp, -1)
    setter_neg = np.where(kind == 0, pair_sn, -1)
    return {'w':w, 'b':b, 'objective':best, 'kind':kind, 'setter_pos':setter_pos, 'setter_neg':setter_neg}

def _as_solution(z, y, C, w, b, kind, setters):
    xi = np.maximum(0., 1. - y*(w*z + b))
    return oned_solution(w, b, xi, 0.5*w**2 + C*np.sum(xi), margin_setters = setters, kind = kind)

def solve_1d(pd, C):
    """
    Exact global optimum of the 1-d soft-margin SVM on the projections ``pd`` (a ``projected_data``) for the
    trade-off parameter ``C``, in O(N log N). Returns an ``oned_solution``. Example usage:

               >>> sol = elimsvm.solve_1d(elimsvm.projected_data([-1., 1.], [-1, 1]), 10.)
               >>> sol.w, sol.b
               (1.0, 0.0)

    """
    out = solve_1d_batch(pd.z[None, :], pd.labels, C)
    kind = KIND_NAMES[out['kind'][0]]
    setters = (int(out['setter_pos'][0]), int(out['setter_neg'][0])) if kind == 'pair' else None
    return _as_solution(pd.z, pd.labels, C, float(out['w'][0]), float(out['b'][0]), kind, setters)

def solve_1d_oracle(pd, C, tol = 1e-10, max_iter = 10**7):
    """
    Reference solution of the same problem by the generic SMO dual solver; the intercept is then chosen by an
    exact search over the hinge-loss knots. Slow, intended for testing ``solve_1d``.
    """
    z, y = pd.z, pd.labels
    if not np.any(y > 0) or not np.any(y < 0):
        raise InputError('INPUT ERROR: the 1-d SVM needs samples of both classes.')
    yz = y*z
    alpha, grad, n_iter = smo_solve(np.outer(yz, yz), y, C, tol = tol, max_iter = max_iter)
    w = float(np.dot(alpha, yz))
    b = float(_best_intercept(z[None, :], y, np.array([w]))[0])
    g = y*(w*z + b)
    on_margin = np.abs(g - 1.) <= 1e-8
    if abs(w) <= 1e-12:
        kind, setters = 'flat', None
    elif np.any(on_margin & (y > 0)) and np.any(on_margin & (y < 0)):
        kind = 'pair'
        setters = (int(np.where(on_margin & (y > 0))[0][0]), int(np.where(on_margin & (y < 0))[0][0]))
    else:
        kind, setters = 'saturated', None
    return _as_solution(z, y, C, w, b, kind, setters)

def lo_fit(U, labels):
    """
    Linear rescaling (A, w0) of minimal A^2 with y_n (A u_n + w0) >= 1 for every row of ``U`` (shape ``(..., N)``).
    Returns the arrays ``A``, ``w0`` and ``feasible``; rows whose classes overlap are infeasible (``A`` is zero
    there).
    """
    U = np.asarray(U, dtype = float)
    y = np.asarray(labels, dtype = float)
    Up, Un = U[..., y > 0], U[..., y < 0]
    min_p, max_p = np.min(Up, axis = -1), np.max(Up, axis = -1)
    min_n, max_n = np.min(Un, axis = -1), np.max(Un, axis = -1)
    right = min_p > max_n
    left = max_p < min_n
    feasible = right | left
    gap = np.where(right, min_p - max_n, np.where(left, max_p - min_n, 1.))
    A = np.where(feasible, 2./gap, 0.)
    w0 = np.where(right, 1. - A*min_p, np.where(left, 1. - A*max_p, 0.))
    return A, w0, feasible

def solve_lo(z_prime, labels, w_norm = 1.):
    """
    Closed-form rescaling of unnormalised projections ``z_prime``. Returns a ``lo_solution``, or ``None`` if
    the classes overlap along ``z_prime``.

    :param w_norm: (optional, float)
        Norm of the weight vector the projections were taken on; only used for ``post_margin``.

    """
    y = np.where(np.asarray(labels, dtype = float) > 0, 1., -1.)
    if not np.any(y > 0) or not np.any(y < 0):
        raise InputError('INPUT ERROR: LO rescaling needs samples of both classes.')
    A, w0, feasible = lo_fit(np.asarray(z_prime, dtype = float), y)
    if not feasible:
        return None
    return lo_solution(float(A), float(w0), w_norm = w_norm)
