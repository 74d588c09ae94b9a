import os
import numpy as np

from .utils import InputError, NoCandidateError, SeparabilityExhausted, LOInapplicable, TAU_SEP
from .kernels import pair_stats, candidate_kernel_blocks, candidate_radius_sq, kernel_matrix
from .svm import svm_model, train, weight_norm_sq, test_error
from .oned import solve_1d_batch, lo_fit

__all__ = ['METHODS', 'parse_method', 'method_label', 'boundary_state', 'step_decision', 'bound_terms', 'vc_confidence',
           'step_record', 'elimination_trace', 'step_basic_mfe', 'step_mfe_slack', 'step_mfe_hybrid',
           'step_mfe_lo_emb', 'step_mfe_qp_emb', 'step_bmfe_qp_emb', 'step_bme_qp_emb', 'step_bmfe_slack',
           'step_rfe', 'apply_frsub', 'read_snapshots', 'run_elimination']

# Confidence level of the expected-risk bound:
ETA = 0.05

# Candidates whose reduced-space weight norm falls below this are not scored by norm-dependent criteria:
MIN_W_NORM = 1e-12

class boundary_state(object):
    """
    Decision boundary carried through the elimination steps: a trained base model, evaluated on whatever features
    the pair statistics passed to its methods retain, optionally overridden by a rescale (a, b). With a rescale
    the discriminant is f(x) = a sum_k lambda_k y_k K(s_k, x) + b; otherwise it is the base model's own f(x).

    :param base_model: (elimsvm.svm_model)
        The model whose multipliers are held fixed.

    :param rescale: (optional, tuple)
        The ``(a, b)`` pair, or ``None``.

    """

    def projections(self, ps, idx):
        """
        sum_k lambda_k y_k K(s_k, x_n) for samples ``idx`` (no intercept, no rescale).
        """
        model = self.base_model
        K = kernel_matrix(model.kernel, ps, model.sv_indices, idx)
        return np.dot(model.coef, K)

    def decision_values(self, ps, idx):
        u = self.projections(ps, idx)
        if self.rescale is None:
            return u + self.base_model.intercept
        return self.rescale[0]*u + self.rescale[1]

    def w_norm_sq(self, ps):
        wsq = weight_norm_sq(self.base_model, ps)
        if self.rescale is None:
            return wsq
        return self.rescale[0]**2*wsq

    def objective(self, ps, idx, labels):
        """
        Primal objective 0.5||w||^2 + C sum(xi) of the boundary on samples ``idx``.
        """
        xi = np.maximum(0., 1. - np.asarray(labels, dtype = float)*self.decision_values(ps, idx))
        return 0.5*self.w_norm_sq(ps) + self.base_model.c_param*float(np.sum(xi))

    def __init__(self, base_model, rescale = None):
        self.base_model = base_model
        self.rescale = None if rescale is None else (float(rescale[0]), float(rescale[1]))

class step_decision(object):
    """
    Outcome of one elimination step: the feature to eliminate and its criterion value. ``per_candidate`` maps
    every scored feature to its criterion value (only kept in diagnostics mode), ``anchor`` is the margin-setting
    sample of slack-type criteria, ``rescale`` the boundary adjustment the criterion proposes and ``sub_criterion``
    which criterion MFEhybrid used.
    """
    def __init__(self, eliminated, criterion_value, per_candidate = None, anchor = None, rescale = None,
                 sub_criterion = None):
        self.eliminated = int(eliminated)
        self.criterion_value = float(criterion_value)
        self.per_candidate = per_candidate
        self.anchor = anchor
        self.rescale = rescale
        self.sub_criterion = sub_criterion

def vc_confidence(h, n, eta = ETA):
    """
    VC confidence sqrt((h (log(2n/h) + 1) - log(eta/4))/n). The capacity term is clamped at zero, which also
    covers h = 0. Works element-wise on arrays of ``h``.
    """
    h = np.asarray(h, dtype = float)
    safe = np.where(h > 0., h, 1.)
    term = np.where(h > 0., safe*(np.log(2.*n/safe) + 1.), 0.)
    return np.sqrt(np.maximum(0., np.maximum(term, 0.) - np.log(eta/4.))/n)

class bound_terms(object):
    """
    Terms of the expected-risk bound r_emp + VCC of one or several candidate boundaries. The arguments can be
    floats or arrays of equal length; the attributes follow.

    :param r_sq: (float or array)
        Squared data radius.

    :param w_norm_sq_eff: (float or array)
        Squared norm of the (rescaled) weight vector.

    :param r_emp: (float or array)
        Empirical 0-1 error rate on the training samples.

    :param n: (int)
        Number of training samples.

    :param eta: (optional, float)
        Confidence parameter. Default is ``0.05``.

    :param vc_plus_one: (optional, boolean)
        If True, the capacity used is r^2 ||w||^2 + 1 instead of r^2 ||w||^2. Default is False.

    """

    def clamped(self):
        """
        True where the capacity term h (log(2n/h) + 1) is not positive, i.e., h >= 2 e n, so that the VCC no
        longer depends on h.
        """
        return self.h >= 2.*np.e*self.n

    def __init__(self, r_sq, w_norm_sq_eff, r_emp, n, eta = ETA, vc_plus_one = False):
        self.r_sq = _as_float(r_sq)
        self.w_norm_sq_eff = _as_float(w_norm_sq_eff)
        self.r_emp = _as_float(r_emp)
        self.eta = eta
        self.n = n
        self.h = self.r_sq*self.w_norm_sq_eff + (1. if vc_plus_one else 0.)
        self.vcc = _as_float(vc_confidence(self.h, n, eta))
        self.bound_value = self.r_emp + self.vcc

def _as_float(value):
    value = np.asarray(value, dtype = float)
    return float(value) if value.ndim == 0 else value

METHODS = ['MFE', 'MFE-Slack', 'MFEhybrid', 'MFE-LOemb', 'MFE-QPemb', 'BMFE-QPemb', 'BME-QPemb', 'BMFE-Slack', 'RFE']

def parse_method(name):
    """
    Splits a method id into its criterion and whether full retraining (``-FRsub``) follows each step. Example:

               >>> elimsvm.parse_method('MFE-Slack-FRsub')
               ('MFE-Slack', True)

    """
    frsub = False
    base = name.strip()
    if base.upper().endswith('-FRSUB'):
        frsub = True
        base = base[:-len('-FRsub')]
    lookup = dict((m.upper(), m) for m in METHODS)
    if base.upper() not in lookup:
        raise InputError('INPUT ERROR: unknown elimination method "'+name+'". Available methods are '+\
                         ', '.join(METHODS)+' (optionally with the -FRsub suffix).')
    base = lookup[base.upper()]
    if base == 'RFE' and not frsub:
        raise InputError('INPUT ERROR: RFE is only available with full retraining; use RFE-FRsub.')
    return base, frsub

def method_label(name):
    base, frsub = parse_method(name)
    return base + ('-FRsub' if frsub else '')

def _candidate_scan(state, ps, train_idx, candidates):
    """
    Yields ``(positions, U, wsq)`` per block of candidates, with U[c, n] = sum_k lambda_k y_k K^{-m}(s_k, x_n) over
    the training samples and wsq[c] the reduced-space squared weight norm, multipliers held fixed.
    """
    model = state.base_model
    S = model.sv_indices
    nT = len(train_idx)
    cols = np.concatenate([train_idx, S])
    for positions, K in candidate_kernel_blocks(model.kernel, ps, S, cols, candidates):
        U = np.einsum('r,crk->ck', model.coef, K[:, :, :nT])
        wsq = np.maximum(np.einsum('r,crk,k->c', model.coef, K[:, :, nT:], model.coef), 0.)
        yield positions, U, wsq

def _functional_margins(state, U, y):
    if state.rescale is None:
        return y*(U + state.base_model.intercept)
    return y*(state.rescale[0]*U + state.rescale[1])

def _effective_wsq(state, wsq):
    if state.rescale is None:
        return wsq
    return state.rescale[0]**2*wsq

def _setup(ds, train_idx, ps):
    if len(ps.retained) < 2:
        raise InputError('INPUT ERROR: an elimination step needs at least two retained features.')
    train_idx = np.asarray(train_idx, dtype = int)
    y = ds.labels[train_idx]
    if not np.any(y > 0) or not np.any(y < 0):
        raise InputError('INPUT ERROR: an elimination step needs both classes among the training samples.')
    return train_idx, y, np.array(ps.retained, dtype = int)

def _pick(candidates, scores, maximize, diagnostics):
    """
    Arg-optimum of ``scores`` (NaN marks a skipped candidate); ties go to the first, i.e., smallest, feature.
    Returns the position of the winner and the per-candidate map, or ``None`` if every candidate was skipped.
    """
    ok = ~np.isnan(scores)
    if not np.any(ok):
        return None, None
    if maximize:
        pos = int(np.argmax(np.where(ok, scores, -np.inf)))
    else:
        pos = int(np.argmin(np.where(ok, scores, np.inf)))
    per_candidate = None
    if diagnostics:
        per_candidate = dict((int(candidates[i]), float(scores[i])) for i in np.where(ok)[0])
    return pos, per_candidate

def step_basic_mfe(ds, train_idx, state, ps, C = None, diagnostics = False, **kwargs):
    """
    Basic MFE: among the candidates whose removal keeps every training sample strictly on its side of the
    (unchanged) boundary, eliminates the one leaving the largest margin min_n g_n^{-m}/||w^{-m}||. Raises
    ``SeparabilityExhausted`` if no candidate keeps the data separated.
    """
    train_idx, y, candidates = _setup(ds, train_idx, ps)
    scores = np.full(len(candidates), np.nan)
    for positions, U, wsq in _candidate_scan(state, ps, train_idx, candidates):
        g = _functional_margins(state, U, y)
        gmin = np.min(g, axis = 1)
        wn = np.sqrt(_effective_wsq(state, wsq))
        ok = (gmin > TAU_SEP) & (wn > MIN_W_NORM)
        scores[positions] = np.where(ok, gmin/np.where(ok, wn, 1.), np.nan)
    pos, per_candidate = _pick(candidates, scores, True, diagnostics)
    if pos is None:
        raise SeparabilityExhausted('No candidate feature removal keeps the training data separable.')
    return step_decision(candidates[pos], scores[pos], per_candidate = per_candidate)

def _slack_scores(ds, train_idx, state, ps, C, candidates, radius = None):
    """
    For every candidate, the smallest over anchors n_a (with g_{n_a} > 0) of
    0.5 ||w^{-m}||^2 rho^2 + C sum_n max(0, 1 - rho g_n), rho = 1/g_{n_a}, optionally multiplied by ``radius``.
    Returns the scores and the anchor (training-set position) of each candidate.
    """
    y = ds.labels[train_idx]
    scores = np.full(len(candidates), np.nan)
    anchors = np.full(len(candidates), -1, dtype = int)
    for positions, U, wsq in _candidate_scan(state, ps, train_idx, candidates):
        g = _functional_margins(state, U, y)
        wsq = _effective_wsq(state, wsq)
        valid = g > TAU_SEP
        rho = 1./np.where(valid, g, 1.)
        # obj[c, anchor] summing over samples on the last axis:
        slack = np.maximum(0., 1. - rho[:, :, None]*g[:, None, :]).sum(axis = 2)
        obj = np.where(valid, 0.5*wsq[:, None]*rho**2 + C*slack, np.inf)
        best = np.argmin(obj, axis = 1)
        value = obj[np.arange(len(positions)), best]
        if radius is not None:
            value = radius[positions]*value
        has_anchor = np.any(valid, axis = 1)
        scores[positions] = np.where(has_anchor, value, np.nan)
        anchors[positions] = np.where(has_anchor, best, -1)
    return scores, anchors

def step_mfe_slack(ds, train_idx, state, ps, C = None, diagnostics = False, **kwargs):
    """
    MFE-Slack: jointly picks the candidate feature m and the anchor sample n_a that, once the boundary is
    rescaled to put n_a on the margin, minimise the soft-margin objective in the reduced space. Candidates with
    no correctly classified sample are skipped.
    """
    train_idx, y, candidates = _setup(ds, train_idx, ps)
    if C is None:
        C = state.base_model.c_param
    scores, anchors = _slack_scores(ds, train_idx, state, ps, C, candidates)
    pos, per_candidate = _pick(candidates, scores, False, diagnostics)
    if pos is None:
        raise NoCandidateError('No candidate feature leaves a correctly classified training sample.')
    return step_decision(candidates[pos], scores[pos], per_candidate = per_candidate,
                         anchor = int(train_idx[anchors[pos]]))

def step_bmfe_slack(ds, train_idx, state, ps, C = None, diagnostics = False, radius_space = 'feature', **kwargs):
    """
    BMFE-Slack: MFE-Slack with the objective multiplied by the reduced-space squared data radius.
    """
    train_idx, y, candidates = _setup(ds, train_idx, ps)
    if C is None:
        C = state.base_model.c_param
    r_sq = candidate_radius_sq(state.base_model.kernel, ps, train_idx, candidates, space = radius_space)
    scores, anchors = _slack_scores(ds, train_idx, state, ps, C, candidates, radius = r_sq)
    pos, per_candidate = _pick(candidates, scores, False, diagnostics)
    if pos is None:
        raise NoCandidateError('No candidate feature leaves a correctly classified training sample.')
    return step_decision(candidates[pos], scores[pos], per_candidate = per_candidate,
                         anchor = int(train_idx[anchors[pos]]))

def step_mfe_hybrid(ds, train_idx, state, ps, C = None, diagnostics = False, **kwargs):
    """
    MFEhybrid: basic MFE while some removal keeps the data separable, MFE-Slack afterwards.
    """
    try:
        decision = step_basic_mfe(ds, train_idx, state, ps, C = C, diagnostics = diagnostics)
        decision.sub_criterion = 'basic'
    except SeparabilityExhausted:
        decision = step_mfe_slack(ds, train_idx, state, ps, C = C, diagnostics = diagnostics)
        decision.sub_criterion = 'slack'
    return decision

def step_mfe_lo_emb(ds, train_idx, state, ps, C = None, diagnostics = False, **kwargs):
    """
    MFE-LOemb: for every candidate, the reduced-space projections are linearly rescaled (A, w0) to the
    largest margin that keeps the training samples separated; the candidate with the largest post-rescaling
    margin 1/(|A| ||w^{-m}||) is eliminated and its (A, w0) becomes the boundary rescale. Raises
    ``LOInapplicable`` when no candidate leaves the classes separable.
    """
    train_idx, y, candidates = _setup(ds, train_idx, ps)
    scores = np.full(len(candidates), np.nan)
    A = np.zeros(len(candidates))
    w0 = np.zeros(len(candidates))
    for positions, U, wsq in _candidate_scan(state, ps, train_idx, candidates):
        a, b, feasible = lo_fit(U, y)
        wn = np.sqrt(wsq)
        ok = feasible & (wn > MIN_W_NORM)
        scores[positions] = np.where(ok, 1./np.where(ok, np.abs(a)*wn, 1.), np.nan)
        A[positions] = a
        w0[positions] = b
    pos, per_candidate = _pick(candidates, scores, True, diagnostics)
    if pos is None:
        raise LOInapplicable('No candidate feature removal leaves the training data linearly separable along '+\
                             'the boundary direction.')
    return step_decision(candidates[pos], scores[pos], per_candidate = per_candidate, rescale = (A[pos], w0[pos]))

def _qp_scan(ds, train_idx, state, ps, C, candidates):
    """
    Solves the 1-d SVM on the normalised reduced-space projections of every candidate. Returns the objectives
    (NaN for skipped candidates), the rescales (a, b) and the 1-d solutions' w, b and training 0-1 errors.
    """
    y = ds.labels[train_idx]
    n = len(candidates)
    out = {'objective':np.full(n, np.nan), 'a':np.zeros(n), 'b':np.zeros(n), 'w1d':np.zeros(n),
           'errors':np.zeros(n, dtype = int)}
    for positions, U, wsq in _candidate_scan(state, ps, train_idx, candidates):
        wn = np.sqrt(wsq)
        ok = wn > MIN_W_NORM
        if not np.any(ok):
            continue
        Z = U[ok]/wn[ok, None]
        sol = solve_1d_batch(Z, y, C)
        idx = positions[ok]
        out['objective'][idx] = sol['objective']
        out['a'][idx] = sol['w']/wn[ok]
        out['b'][idx] = sol['b']
        out['w1d'][idx] = sol['w']
        out['errors'][idx] = np.sum(y*(sol['w'][:, None]*Z + sol['b'][:, None]) <= 0., axis = 1)
    return out

def _qp_decision(candidates, scores, qp, diagnostics):
    pos, per_candidate = _pick(candidates, scores, False, diagnostics)
    if pos is None:
        raise NoCandidateError('Every candidate feature removal leaves a zero weight vector.')
    return step_decision(candidates[pos], scores[pos], per_candidate = per_candidate,
                         rescale = (qp['a'][pos], qp['b'][pos]))

def step_mfe_qp_emb(ds, train_idx, state, ps, C = None, diagnostics = False, **kwargs):
    """
    MFE-QPemb: for every candidate the boundary is re-optimised along its own (reduced-space) direction by the
    exact 1-d SVM; the candidate with the smallest 1-d objective is eliminated and its 1-d solution becomes the
    boundary rescale.
    """
    train_idx, y, candidates = _setup(ds, train_idx, ps)
    if C is None:
        C = state.base_model.c_param
    qp = _qp_scan(ds, train_idx, state, ps, C, candidates)
    return _qp_decision(candidates, qp['objective'], qp, diagnostics)

def step_bmfe_qp_emb(ds, train_idx, state, ps, C = None, diagnostics = False, radius_space = 'feature', **kwargs):
    """
    BMFE-QPemb: MFE-QPemb with the 1-d objective multiplied by the reduced-space squared data radius.
    """
    train_idx, y, candidates = _setup(ds, train_idx, ps)
    if C is None:
        C = state.base_model.c_param
    qp = _qp_scan(ds, train_idx, state, ps, C, candidates)
    r_sq = candidate_radius_sq(state.base_model.kernel, ps, train_idx, candidates, space = radius_space)
    return _qp_decision(candidates, r_sq*qp['objective'], qp, diagnostics)

def step_bme_qp_emb(ds, train_idx, state, ps, C = None, diagnostics = False, radius_space = 'feature',
                    vc_plus_one = False, eta = ETA, **kwargs):
    """
    BME-QPemb: eliminates the candidate whose 1-d re-optimised boundary minimises the expected-risk bound
    r_emp + VCC, with the capacity taken as r^2 w^2 (w the 1-d slope on normalised projections). Once
    r^2 w^2 >= 2 e N the VCC is the same for every such candidate; if that leaves all candidates tied, a warning
    is printed and the smallest feature goes.
    """
    train_idx, y, candidates = _setup(ds, train_idx, ps)
    if C is None:
        C = state.base_model.c_param
    qp = _qp_scan(ds, train_idx, state, ps, C, candidates)
    r_sq = candidate_radius_sq(state.base_model.kernel, ps, train_idx, candidates, space = radius_space)
    n = len(train_idx)
    terms = bound_terms(r_sq, qp['w1d']**2, qp['errors']/float(n), n, eta = eta, vc_plus_one = vc_plus_one)
    scored = ~np.isnan(qp['objective'])
    bound = np.where(scored, terms.bound_value, np.nan)
    if np.sum(scored) > 1 and np.all(bound[scored] == bound[scored][0]):
        print('\t Warning: BME-QPemb bound is identical for all '+str(int(np.sum(scored)))+' candidates ('+\
              str(int(np.sum(terms.clamped()[scored])))+' with a clamped capacity term); the smallest feature index '+\
              'is eliminated.')
    return _qp_decision(candidates, bound, qp, diagnostics)

def step_rfe(ds, train_idx, state, ps, C = None, diagnostics = False, **kwargs):
    """
    RFE criterion: eliminates the feature whose removal changes 0.5||w||^2 the least, multipliers held fixed
    (for the linear kernel this is the feature of smallest w_m^2).
    """
    train_idx, y, candidates = _setup(ds, train_idx, ps)
    full = weight_norm_sq(state.base_model, ps)
    scores = np.full(len(candidates), np.nan)
    for positions, U, wsq in _candidate_scan(state, ps, train_idx, candidates):
        scores[positions] = 0.5*np.abs(full - wsq)
    pos, per_candidate = _pick(candidates, scores, False, diagnostics)
    return step_decision(candidates[pos], scores[pos], per_candidate = per_candidate)

STEPS = {'MFE':step_basic_mfe, 'MFE-Slack':step_mfe_slack, 'MFEhybrid':step_mfe_hybrid,
         'MFE-LOemb':step_mfe_lo_emb, 'MFE-QPemb':step_mfe_qp_emb, 'BMFE-QPemb':step_bmfe_qp_emb,
         'BME-QPemb':step_bme_qp_emb, 'BMFE-Slack':step_bmfe_slack, 'RFE':step_rfe}

# Criteria whose proposed rescale is installed on the boundary:
INSTALLS_RESCALE = ['MFE-LOemb', 'MFE-QPemb', 'BMFE-QPemb', 'BME-QPemb']

def apply_frsub(ds, train_idx, state, decision, ps, tol = 1e-3, verbose = False):
    """
    Full retraining: commits the removal of ``decision.eliminated`` in ``ps`` and retrains an SVM on the reduced
    training data with the kernel and C of the current model. Returns the new ``boundary_state`` (no rescale).
    """
    ps.remove_feature(decision.eliminated)
    model = state.base_model
    try:
        new_model = train(ds, train_idx, model.kernel, ps, model.c_param, tol = tol, verbose = verbose)
    except Exception as e:
        e.args = ('while retraining after eliminating feature '+str(decision.eliminated + 1)+': '+str(e),)
        raise
    return boundary_state(new_model)

class step_record(object):
    """
    One elimination step of a trace. ``eliminated`` is 0-based; ``model``/``rescale`` form the boundary snapshot
    after the step.
    """
    def __init__(self, step, eliminated, retained_count, separable, train_objective, criterion_value, test_error,
                 model, rescale = None, anchor = None, sub_criterion = None, per_candidate = None):
        self.step = step
        self.eliminated = eliminated
        self.retained_count = retained_count
        self.separable = separable
        self.train_objective = train_objective
        self.criterion_value = criterion_value
        self.test_error = test_error
        self.model = model
        self.rescale = rescale
        self.anchor = anchor
        self.sub_criterion = sub_criterion
        self.per_candidate = per_candidate

class elimination_trace(object):
    """
    Sequence of elimination steps of one method on one trial. ``terminated`` holds the reason if the method
    stopped before reaching its target number of features, ``None`` otherwise.
    """

    CSV_COLUMNS = ['trial_id', 'method', 'step', 'eliminated_feature', 'retained_count', 'separable',
                   'train_objective', 'criterion_value', 'test_error', 'anchor', 'sub_criterion', 'rescale_a',
                   'rescale_b']

    def eliminated_features(self):
        return [r.eliminated for r in self.records]

    def retained_counts(self):
        return [r.retained_count for r in self.records]

    def test_errors(self):
        return [r.test_error for r in self.records]

    def retained_after(self, step):
        """
        Retained feature set (0-based, sorted) after ``step`` steps.
        """
        removed = set(self.eliminated_features()[:step])
        return [m for m in range(self.n_features) if m not in removed]

    def to_csv(self):
        lines = [','.join(self.CSV_COLUMNS)]
        for r in self.records:
            a, b = ('', '') if r.rescale is None else ('{0:.17g}'.format(r.rescale[0]), '{0:.17g}'.format(r.rescale[1]))
            lines.append('{0:},{1:},{2:},{3:},{4:},{5:},{6:.17g},{7:.17g},{8:.17g},{9:},{10:},{11:},{12:}'.format(
                         self.trial_id, self.method, r.step, r.eliminated + 1, r.retained_count,
                         int(r.separable), r.train_objective, r.criterion_value, r.test_error,
                         '' if r.anchor is None else r.anchor + 1,
                         '' if r.sub_criterion is None else r.sub_criterion, a, b))
        if self.terminated is not None:
            lines.append('# terminated: '+self.terminated.replace('\n', ' '))
        return '\n'.join(lines) + '\n'

    def write_csv(self, fname):
        fout = open(fname, 'w')
        fout.write(self.to_csv())
        fout.close()

    def to_snapshots(self):
        """
        Boundary snapshot after every step (the initial model as step 0). Each block starts with a
        ``# step <k> eliminated <feature> retained <count> rescale <a> <b>`` header followed by ``svm_model.to_text``.
        """
        blocks = [_snapshot_header(0, None, self.n_features, None) + self.initial_model.to_text()]
        for r in self.records:
            blocks.append(_snapshot_header(r.step, r.eliminated, r.retained_count, r.rescale) + r.model.to_text())
        return ''.join(blocks)

    def write_snapshots(self, fname):
        fout = open(fname, 'w')
        fout.write(self.to_snapshots())
        fout.close()

    def __init__(self, method, trial_id, n_features, initial_model):
        self.method = method
        self.trial_id = trial_id
        self.n_features = n_features
        self.initial_model = initial_model
        self.records = []
        self.terminated = None

def _snapshot_header(step, eliminated, retained_count, rescale):
    rescale = 'none' if rescale is None else '{0:.17g} {1:.17g}'.format(rescale[0], rescale[1])
    return '# step {0:} eliminated {1:} retained {2:} rescale {3:}\n'.format(
           step, 'none' if eliminated is None else eliminated + 1, retained_count, rescale)

def read_snapshots(fname):
    """
    Reads a file written by ``elimination_trace.write_snapshots``. Returns one dictionary per step with keys
    ``step``, ``eliminated`` (0-based, ``None`` for step 0), ``retained_count``, ``rescale`` and ``model``.
    """
    if not os.path.exists(fname):
        raise InputError('INPUT ERROR: snapshot file '+fname+' not found.')
    fin = open(fname, 'r')
    text = fin.read()
    fin.close()
    snapshots = []
    for block in text.split('# step ')[1:]:
        header, body = block.split('\n', 1)
        fields = header.split()
        if len(fields) < 7 or fields[1] != 'eliminated' or fields[3] != 'retained' or fields[5] != 'rescale':
            raise InputError('INPUT ERROR: malformed snapshot header "# step '+header+'" in '+fname+'.')
        rescale = None if fields[6] == 'none' else (float(fields[6]), float(fields[7]))
        snapshots.append({'step':int(fields[0]), 'eliminated':None if fields[2] == 'none' else int(fields[2]) - 1,
                          'retained_count':int(fields[4]), 'rescale':rescale, 'model':svm_model.from_text(body)})
    return snapshots

def run_elimination(method, ds, trial, model, stop_at = 1, diagnostics = False, radius_space = 'feature',
                    vc_plus_one = False, tol = 1e-3, verbose = False):
    """
    Runs backward elimination with ``method`` (e.g., ``BMFE-QPemb`` or ``MFE-Slack-FRsub``) from the initial
    model ``model``, one feature per step, until ``stop_at`` features remain. After each step the boundary is
    evaluated on the trial's test half. Returns an ``elimination_trace``. Example usage:

               >>> trace = elimsvm.run_elimination('BMFE-QPemb', ds, trial, model, stop_at = 10)

    :param method: (string)
        Method id; one of ``elimsvm.METHODS``, optionally with the ``-FRsub`` suffix.

    :param ds: (elimsvm.dataset)
        The dataset.

    :param trial: (elimsvm.trial_split)
        Training/test split; ``model`` has to be trained on its training half.

    :param model: (elimsvm.svm_model)
        Initial SVM trained on all features.

    :param stop_at: (optional, int)
        Number of features left when elimination stops. Default is ``1``.

    :param diagnostics: (optional, boolean)
        If True, every step keeps the criterion value of each candidate. Default is False.

    :param radius_space: (optional, string)
        ``feature`` (default) for the data radius in kernel space, ``input`` for input space.

    :param vc_plus_one: (optional, boolean)
        Use r^2 ||w||^2 + 1 as capacity in BME-QPemb. Default is False.

    :param tol: (optional, float)
        KKT tolerance of the retraining in ``-FRsub`` methods.

    :param verbose: (optional, boolean)
        If True, prints one line per step. Default is False.

    """
    base, frsub = parse_method(method)
    label = base + ('-FRsub' if frsub else '')
    if not 1 <= stop_at < ds.n_features:
        raise InputError('INPUT ERROR: stop_at has to be between 1 and '+str(ds.n_features - 1)+' (got '+\
                         str(stop_at)+').')
    step_fn = STEPS[base]
    train_idx = trial.train_indices
    test_idx = trial.test_indices
    y_train = ds.labels[train_idx]
    ps = pair_stats(ds.values)
    state = boundary_state(model)
    trace = elimination_trace(label, trial.trial_id, ds.n_features, model)
    step = 0
    while len(ps.retained) > stop_at:
        step += 1
        try:
            decision = step_fn(ds, train_idx, state, ps, C = model.c_param, diagnostics = diagnostics,
                               radius_space = radius_space, vc_plus_one = vc_plus_one)
        except NoCandidateError as e:
            trace.terminated = label+' not applicable at step '+str(step)+' ('+str(len(ps.retained))+\
                               ' features retained): '+str(e)
            print('\t Warning: trial '+str(trial.trial_id)+', '+trace.terminated)
            break
        if frsub:
            state = apply_frsub(ds, train_idx, state, decision, ps, tol = tol)
        else:
            ps.remove_feature(decision.eliminated)
            rescale = decision.rescale if base in INSTALLS_RESCALE else None
            state = boundary_state(state.base_model, rescale = rescale)
        g = y_train*state.decision_values(ps, train_idx)
        error = test_error(state, ps, test_idx, ds.labels[test_idx])
        trace.records.append(step_record(step, decision.eliminated, len(ps.retained), bool(np.min(g) > TAU_SEP),
                                         state.objective(ps, train_idx, y_train), decision.criterion_value,
                                         error, state.base_model, rescale = state.rescale,
                                         anchor = decision.anchor, sub_criterion = decision.sub_criterion,
                                         per_candidate = decision.per_candidate))
        if verbose:
            print('\t '+label+' trial '+str(trial.trial_id)+' step '+str(step)+': eliminated feature '+\
                  str(decision.eliminated + 1)+', '+str(len(ps.retained))+' retained, test error '+str(error))
    return trace
