from ._version import __version__
__all__ = ['utils', 'kernels', 'svm', 'oned', 'eliminate', 'experiment', 'plots']

from .utils import *
from .kernels import *
from .svm import *
from .oned import *
from .eliminate import *
from .experiment import *
