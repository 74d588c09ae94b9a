import sys
import argparse

from ._version import __version__
from .utils import ElimsvmError, InputError
from .experiment import experiment_config, run_experiment, emit_outputs

def build_parser():
    parser = argparse.ArgumentParser(prog = 'elimsvm', description = 'Backward feature elimination for kernel SVMs.')
    parser.add_argument('--version', action = 'version', version = 'elimsvm '+__version__)
    subparsers = parser.add_subparsers(dest = 'command')
    run = subparsers.add_parser('run', help = 'run an elimination experiment')
    # Configuration file; flags given below override its values:
    run.add_argument('--config', default = None)
    # LIBSVM-formatted dataset:
    run.add_argument('--data', default = None)
    # Kernel (linear, poly or rbf):
    run.add_argument('--kernel', default = None)
    # Comma-separated list of methods (e.g., BMFE-QPemb,MFE-Slack,RFE-FRsub):
    run.add_argument('--methods', default = None)
    run.add_argument('--trials', default = None, type = int)
    run.add_argument('--seed', default = None, type = int)
    run.add_argument('--out', default = None)
    run.add_argument('--stop-at', dest = 'stop_at', default = None, type = int)
    run.add_argument('--nthreads', default = None, type = int)
    # Min-max scale features on each training half:
    run.add_argument('--scale', dest = 'scale', action = 'store_true', default = None)
    # Keep every trial, not only the initially separable ones:
    run.add_argument('--all-trials', dest = 'all_trials', action = 'store_true')
    # Keep per-candidate criterion values in the traces:
    run.add_argument('--diagnostics', dest = 'diagnostics', action = 'store_true', default = None)
    run.add_argument('--verbose', dest = 'verbose', action = 'store_true')
    return parser

def main(args = None):
    if args is None:
        args = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(args)
    if args.command != 'run':
        parser.print_help()
        return 1
    overrides = {'data':args.data, 'kernel':args.kernel, 'methods':args.methods, 'trials':args.trials,
                 'seed':args.seed, 'out':args.out, 'stop_at':args.stop_at, 'nthreads':args.nthreads,
                 'scale':args.scale, 'diagnostics':args.diagnostics,
                 'keep_only_separable_trials':(False if args.all_trials else None)}
    try:
        if args.config is not None:
            cfg = experiment_config.from_file(args.config, **overrides)
        else:
            cfg = experiment_config(**dict((k, v) for k, v in overrides.items() if v is not None))
        cfg.validate()
    except InputError as e:
        print(str(e), file = sys.stderr)
        return 1
    try:
        exp = run_experiment(cfg, verbose = args.verbose)
        emit_outputs(exp)
    except InputError as e:
        print(str(e), file = sys.stderr)
        return 1
    except (ElimsvmError, OSError) as e:
        print(str(e), file = sys.stderr)
        return 2
    if args.verbose:
        print('\t Outputs written to '+cfg.out)
    return 0

if __name__ == "__main__":
    sys.exit(main())
