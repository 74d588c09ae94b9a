import os
import time
# Useful imports for parallelization:
from multiprocessing import Pool
import contextlib

import numpy as np

from ._version import __version__
from .utils import ElimsvmError, InputError, TAU_SEP, read_libsvm, make_trial, trial_seed, minmax_scale, \
                   read_config, write_config
from .kernels import kernel_config, pair_stats, KERNEL_ALIASES
from .svm import train, cv_select, default_grid, C_GRID, GAMMA_FACTORS
from .eliminate import parse_method, run_elimination

__all__ = ['experiment_config', 'curve_table', 'experiment', 'run_experiment', 'emit_outputs', 'read_curves']

# Maximum number of split attempts per requested trial:
ATTEMPTS_PER_TRIAL = 10

def _to_bool(value):
    if isinstance(value, bool):
        return value
    value = str(value).strip().lower()
    if value in ['1', 'true', 'yes', 'on']:
        return True
    if value in ['0', 'false', 'no', 'off']:
        return False
    raise InputError('INPUT ERROR: "'+value+'" is not a boolean (use true or false).')

def _to_list(value, cast):
    if isinstance(value, (list, tuple)):
        return [cast(v) for v in value]
    return [cast(v) for v in str(value).split(',') if v.strip() != '']

class experiment_config(object):
    """
    Configuration of an elimination experiment. It can be built from keyword arguments or from a ``key = value``
    file (``experiment_config.from_file``); values given as strings are converted. Example usage:

               >>> cfg = elimsvm.experiment_config(data = 'colon.libsvm', kernel = 'rbf',
               ...                                 methods = ['BMFE-QPemb', 'MFE-Slack'], trials = 10, out = 'results')

    :param data: (string)
        Path to the LIBSVM-formatted dataset.

    :param kernel: (optional, string)
        ``linear``, ``poly`` or ``rbf``. Default is ``rbf``.

    :param methods: (list or comma-separated string)
        Elimination methods to run on each trial (e.g., ``MFE-QPemb``, ``RFE-FRsub``).

    :param trials: (optional, int)
        Number of (kept) random trials. Default is ``1``.

    :param seed: (optional, int)
        Base seed; every split and fold partition derives from it. Default is ``0``.

    :param out: (optional, string)
        Output folder. Default is ``elimsvm_out``.

    :param stop_at: (optional, int)
        Number of features left when elimination stops. Default is ``1``.

    :param scale: (optional, boolean)
        Min-max scale every feature to [0,1] using each trial's training half. Default is False.

    :param keep_only_separable_trials: (optional, boolean)
        Discard trials whose initial SVM does not separate its training half. Default is True.

    :param diagnostics: (optional, boolean)
        Keep per-candidate criterion values in the traces. Default is False.

    :param c_grid: (optional, list of floats)
        Candidate values of C. Default is 2^-5, 2^-3, ..., 2^15.

    :param gamma_grid: (optional, list of floats)
        Gaussian kernel widths, in units of 1/M. Default is 2^-15, 2^-11, 2^-7, 2^-3, 2^1.

    :param degree: (optional, int)
        Polynomial kernel degree. Default is ``3``.

    :param coef0: (optional, float)
        Polynomial kernel offset. Default is ``1``.

    :param radius_space: (optional, string)
        ``feature`` or ``input``; where the data radius of the bound-based methods is measured.

    :param vc_plus_one: (optional, boolean)
        Use r^2 ||w||^2 + 1 as the capacity of BME-QPemb. Default is False.

    :param nthreads: (optional, int)
        Number of worker processes. Default is ``1``.

    :param folds: (optional, int)
        Number of cross-validation folds. Default is ``5``.

    :param tol: (optional, float)
        KKT tolerance of the SVM solver. Default is ``1e-3``.

    """

    KEYS = ['data', 'kernel', 'methods', 'trials', 'seed', 'out', 'stop_at', 'scale', 'keep_only_separable_trials',
            'diagnostics', 'c_grid', 'gamma_grid', 'degree', 'coef0', 'radius_space', 'vc_plus_one', 'nthreads',
            'folds', 'tol']

    @staticmethod
    def from_file(fname, **overrides):
        """
        Reads a configuration file; keyword arguments that are not ``None`` override file values.
        """
        values = read_config(fname)
        for key in values.keys():
            if key not in experiment_config.KEYS:
                raise InputError('INPUT ERROR: unknown configuration key "'+key+'" in '+fname+'.')
        for key in overrides.keys():
            if overrides[key] is not None:
                values[key] = overrides[key]
        return experiment_config(**values)

    def validate(self):
        if self.data is None:
            raise InputError('INPUT ERROR: no dataset given (data).')
        if self.kernel not in KERNEL_ALIASES.keys():
            raise InputError('INPUT ERROR: kernel "'+str(self.kernel)+'" not supported; use linear, poly or rbf.')
        if self.trials < 1:
            raise InputError('INPUT ERROR: trials has to be at least 1 (got '+str(self.trials)+').')
        if len(self.methods) == 0:
            raise InputError('INPUT ERROR: no elimination method given (methods).')
        for method in self.methods:
            parse_method(method)
        if self.stop_at < 1:
            raise InputError('INPUT ERROR: stop_at has to be at least 1 (got '+str(self.stop_at)+').')
        if self.folds < 2:
            raise InputError('INPUT ERROR: folds has to be at least 2 (got '+str(self.folds)+').')
        if self.radius_space not in ['feature', 'input']:
            raise InputError('INPUT ERROR: radius_space has to be feature or input (got '+str(self.radius_space)+').')
        if len(self.c_grid) == 0 or np.any(np.array(self.c_grid) <= 0.):
            raise InputError('INPUT ERROR: c_grid has to hold positive values.')
        if len(self.gamma_grid) == 0 or np.any(np.array(self.gamma_grid) <= 0.):
            raise InputError('INPUT ERROR: gamma_grid has to hold positive values.')
        if self.nthreads < 1:
            raise InputError('INPUT ERROR: nthreads has to be at least 1.')
        if not self.tol > 0.:
            raise InputError('INPUT ERROR: tol has to be positive.')

    def to_dict(self):
        out = {}
        for key in self.KEYS:
            value = getattr(self, key)
            if isinstance(value, list):
                value = ','.join(repr(v) if isinstance(v, float) else str(v) for v in value)
            out[key] = value
        return out

    def __init__(self, data = None, kernel = 'rbf', methods = None, trials = 1, seed = 0, out = 'elimsvm_out',
                 stop_at = 1, scale = False, keep_only_separable_trials = True, diagnostics = False, c_grid = None,
                 gamma_grid = None, degree = 3, coef0 = 1., radius_space = 'feature', vc_plus_one = False,
                 nthreads = 1, folds = 5, tol = 1e-3):
        self.data = data
        self.kernel = str(kernel).strip().lower()
        self.methods = [m.strip() for m in _to_list(methods, str)] if methods is not None else []
        try:
            self.trials = int(trials)
            self.seed = int(seed)
            self.stop_at = int(stop_at)
            self.degree = int(degree)
            self.coef0 = float(coef0)
            self.nthreads = int(nthreads)
            self.folds = int(folds)
            self.tol = float(tol)
            self.c_grid = list(C_GRID) if c_grid is None else _to_list(c_grid, float)
            self.gamma_grid = list(GAMMA_FACTORS) if gamma_grid is None else _to_list(gamma_grid, float)
        except ValueError as e:
            raise InputError('INPUT ERROR: invalid numeric configuration value ('+str(e)+').')
        self.out = out
        self.scale = _to_bool(scale)
        self.keep_only_separable_trials = _to_bool(keep_only_separable_trials)
        self.diagnostics = _to_bool(diagnostics)
        self.vc_plus_one = _to_bool(vc_plus_one)
        self.radius_space = str(radius_space).strip().lower()

class curve_table(object):
    """
    Mean test error per method and number of retained features, over the kept trials. Each row is a
    ``(method, retained_count, mean, n_trials, std)`` tuple (``std`` is the population standard deviation); rows
    are grouped by method and sorted by decreasing retained count.
    """

    def methods(self):
        out = []
        for r in self.rows:
            if r[0] not in out:
                out.append(r[0])
        return out

    def rows_for(self, method):
        return [r for r in self.rows if r[0] == method]

    def to_csv(self):
        lines = ['method,retained_count,mean_test_error,n_trials,std_test_error']
        for r in self.rows:
            lines.append('{0:},{1:},{2:.17g},{3:},{4:.17g}'.format(*r))
        return '\n'.join(lines) + '\n'

    def write_csv(self, fname):
        fout = open(fname, 'w')
        fout.write(self.to_csv())
        fout.close()

    @staticmethod
    def from_traces(traces, methods):
        rows = []
        for method in methods:
            errors = {}
            for trace in traces:
                if trace.method != method:
                    continue
                for r in trace.records:
                    errors.setdefault(r.retained_count, []).append(r.test_error)
            for count in sorted(errors.keys(), reverse = True):
                e = np.array(errors[count])
                rows.append((method, int(count), float(np.mean(e)), len(e), float(np.std(e))))
        return curve_table(rows)

    def __init__(self, rows = None):
        self.rows = [] if rows is None else list(rows)

def read_curves(fname):
    """
    Reads a ``curves.csv`` file back into a ``curve_table``.
    """
    if not os.path.exists(fname):
        raise InputError('INPUT ERROR: curves file '+fname+' not found.')
    rows = []
    fin = open(fname, 'r')
    header = fin.readline()
    while True:
        line = fin.readline()
        if line != '':
            vector = line.strip().split(',')
            if len(vector) != 5:
                continue
            rows.append((vector[0], int(vector[1]), float(vector[2]), int(vector[3]), float(vector[4])))
        else:
            break
    fin.close()
    return curve_table(rows)

def _prepare_trial(args):
    """
    Split, cross-validation and initial training of one trial attempt. Returns a dictionary with the trial, its
    (possibly scaled) dataset, the initial model and whether it separates the training half, or ``None`` if
    the training half lacks a class.
    """
    ds, cfg, attempt = args
    seed = trial_seed(cfg.seed, attempt)
    trial = make_trial(ds, seed, trial_id = attempt)
    npos, nneg = ds.class_counts(trial.train_indices)
    if npos == 0 or nneg == 0:
        return None
    if cfg.scale:
        ds = minmax_scale(ds, trial.train_indices)
    ps = pair_stats(ds.values)
    grid = default_grid(cfg.kernel, ds.n_features, c_grid = cfg.c_grid, gamma_factors = cfg.gamma_grid,
                        coef0 = cfg.coef0, degree = cfg.degree)
    kcfg, C = cv_select(ds, trial.train_indices, grid, ps = ps, k = cfg.folds, seed = trial_seed(seed, 1),
                        tol = cfg.tol)
    model = train(ds, trial.train_indices, kcfg, ps, C, tol = cfg.tol)
    g = ds.labels[trial.train_indices]*model.decision_values(ps, trial.train_indices)
    return {'trial':trial, 'ds':ds, 'model':model, 'separable':bool(np.min(g) > TAU_SEP)}

def _run_method(args):
    prepared, method, cfg = args
    return run_elimination(method, prepared['ds'], prepared['trial'], prepared['model'], stop_at = cfg.stop_at,
                           diagnostics = cfg.diagnostics, radius_space = cfg.radius_space,
                           vc_plus_one = cfg.vc_plus_one, tol = cfg.tol)

def _map(function, tasks, nthreads):
    if nthreads > 1 and len(tasks) > 1:
        with contextlib.closing(Pool(processes = nthreads)) as executor:
            return executor.map(function, tasks)
    return [function(t) for t in tasks]

class experiment(object):
    """
    Runs a full elimination experiment: random 50-50 trials, hyperparameter selection by cross-validation on
    each training half, the initial SVM, and every configured elimination method started from that same
    model. Example usage:

               >>> exp = elimsvm.experiment(cfg, verbose = True)
               >>> exp.run()
               >>> exp.table.write_csv('curves.csv')

    :param cfg: (elimsvm.experiment_config)
        The configuration.

    :param ds: (optional, elimsvm.dataset)
        Dataset to use instead of reading ``cfg.data``.

    :param verbose: (optional, boolean)
        If True, progress is printed to terminal. Default is False.

    """

    def prepare_trials(self):
        """
        Prepares trials attempt by attempt until ``cfg.trials`` are kept or the attempt cap is reached.
        """
        cfg = self.cfg
        cap = ATTEMPTS_PER_TRIAL*cfg.trials
        self.trials = []
        attempt = 0
        while len(self.trials) < cfg.trials and attempt < cap:
            batch = list(range(attempt, min(cap, attempt + max(cfg.trials - len(self.trials), cfg.nthreads))))
            results = _map(_prepare_trial, [(self.ds, cfg, a) for a in batch], cfg.nthreads)
            for a, prepared in zip(batch, results):
                if len(self.trials) == cfg.trials:
                    break
                if prepared is None:
                    self.discarded.append((a, 'single class in the training half'))
                    print('\t Warning: trial attempt '+str(a)+' discarded (single class in the training half).')
                elif cfg.keep_only_separable_trials and not prepared['separable']:
                    self.discarded.append((a, 'initial SVM does not separate the training half'))
                    if self.verbose:
                        print('\t Trial attempt '+str(a)+' discarded (not initially separable).')
                else:
                    self.trials.append(prepared)
                    if self.verbose:
                        model = prepared['model']
                        print('\t Trial '+str(a)+' kept: '+model.kernel.to_string()+', C = '+str(model.c_param)+\
                              ', '+str(len(model.sv_indices))+' support vectors.')
            attempt = batch[-1] + 1
        if len(self.trials) == 0:
            raise ElimsvmError('RUNTIME ERROR: no trial was kept after '+str(attempt)+' attempts (every split '+\
                               'was discarded). Consider setting keep_only_separable_trials = false.')
        if len(self.trials) < cfg.trials:
            print('\t Warning: only '+str(len(self.trials))+' of '+str(cfg.trials)+' trials kept after '+\
                  str(attempt)+' attempts.')

    def run(self):
        """
        Prepares the trials, runs every method on each of them and aggregates the curves.
        """
        t0 = time.time()
        self.prepare_trials()
        if self.verbose:
            print('\t '+str(len(self.trials))+' trials prepared in '+'{0:.2f}'.format(time.time() - t0)+' s.')
        tasks = [(prepared, method, self.cfg) for prepared in self.trials for method in self.methods]
        self.traces = _map(_run_method, tasks, self.cfg.nthreads)
        for trace in self.traces:
            if self.verbose:
                status = 'complete' if trace.terminated is None else 'terminated early'
                print('\t Trial '+str(trace.trial_id)+', '+trace.method+': '+str(len(trace.records))+' steps, '+status)
        self.table = curve_table.from_traces(self.traces, self.methods)
        if self.verbose:
            print('\t Experiment done in '+'{0:.2f}'.format(time.time() - t0)+' s.')
        return self.table, self.traces

    def __init__(self, cfg, ds = None, verbose = False):
        cfg.validate()
        self.cfg = cfg
        self.verbose = verbose
        self.methods = []
        for method in cfg.methods:
            base, frsub = parse_method(method)
            label = base + ('-FRsub' if frsub else '')
            if label not in self.methods:
                self.methods.append(label)
        if ds is None:
            ds = read_libsvm(cfg.data)
        self.ds = ds
        if cfg.stop_at >= ds.n_features:
            raise InputError('INPUT ERROR: stop_at ('+str(cfg.stop_at)+') has to be smaller than the number of '+\
                             'features ('+str(ds.n_features)+').')
        self.trials = []
        self.discarded = []
        self.traces = []
        self.table = None

def run_experiment(cfg, ds = None, verbose = False):
    """
    Runs the experiment described by ``cfg`` and returns the ``experiment`` object (with its ``table`` and
    ``traces``).
    """
    exp = experiment(cfg, ds = ds, verbose = verbose)
    exp.run()
    return exp

def emit_outputs(exp, out_folder = None):
    """
    Writes ``curves.csv``, one ``trace_<trial>_<method>.csv`` and one ``models_<trial>_<method>.txt`` (boundary
    snapshots) per trace, ``config.txt`` (the resolved configuration) and ``curves.svg`` to the output folder.
    """
    from .plots import plot_curves
    cfg = exp.cfg
    if out_folder is None:
        out_folder = cfg.out
    if out_folder[-1] != '/':
        out_folder = out_folder + '/'
    try:
        if not os.path.exists(out_folder):
            os.makedirs(out_folder)
        exp.table.write_csv(out_folder+'curves.csv')
        for trace in exp.traces:
            trace.write_csv(out_folder+'trace_'+str(trace.trial_id)+'_'+trace.method+'.csv')
            trace.write_snapshots(out_folder+'models_'+str(trace.trial_id)+'_'+trace.method+'.txt')
        config = cfg.to_dict()
        config['version'] = __version__
        config['n_samples'] = exp.ds.n_samples
        config['n_features'] = exp.ds.n_features
        config['kept_trials'] = ','.join(str(p['trial'].trial_id) for p in exp.trials)
        config['trial_seeds'] = ','.join(str(p['trial'].seed) for p in exp.trials)
        config['discarded_trials'] = ','.join(str(d[0]) for d in exp.discarded)
        for p in exp.trials:
            model = p['model']
            config['selected_'+str(p['trial'].trial_id)] = model.kernel.to_string()+' C='+repr(model.c_param)
        config['tie_break'] = 'smallest feature index, then smallest anchor index; CV: accuracy, smaller C, grid order'
        write_config(out_folder+'config.txt', config)
        plot_curves(exp.table, out_folder+'curves.svg', title = exp.ds.name)
    except OSError as e:
        raise ElimsvmError('RUNTIME ERROR: could not write outputs to '+out_folder+' ('+str(e)+').')
