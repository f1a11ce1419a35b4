from . import config
from . import core
from . import function_registry
from .core import fun2m, frechet_derivative, kronecker_apply
from .function import BivariateFunction
from .function_registry import builtin_function
