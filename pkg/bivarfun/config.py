import os

from . import constant
from .errors import ArgumentError

STRATEGIES = ('balanced', 'single')
ATOM_METHODS = ('taylor', 'diag')


def _seed_from_env():
    value = os.environ.get('BIVARFUN_SEED')
    if value is None or value.strip() == '':
        return 0
    try:
        return int(value)
    except ValueError:
        raise ArgumentError(f"BIVARFUN_SEED={value!r} is not an integer.")


def _defaults():
    return {
        'seed': _seed_from_env(),
        'delta': 0.1,
        'delta1': 5e-3,
        'n_min': 4,
        'gamma': 10.0,
        'strategy': 'balanced',
        'atom_method': 'diag',
        'epsilon': constant.U,
        'k_max': constant.K_MAX,
    }


_config = _defaults()


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def reset():
    """
    Restore every setting to its default, re-reading BIVARFUN_SEED.
    """
    defaults = _defaults()
    _config.clear()
    _config.update(defaults)


def set_seed(seed):
    """
    Set the master seed of all random streams (perturbations, gallery draws).
    :param seed: nonnegative int
    :return:
    """
    if isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0:
        _config['seed'] = seed
    else:
        raise ArgumentError(f"{seed} is not a nonnegative integer.")


def get_seed():
    return _config['seed']


def set_delta(delta):
    """
    Set the eigenvalue separation used by blocking, default value is 0.1
    :param delta: positive number
    :return:
    """
    if _is_number(delta) and delta > 0:
        _config['delta'] = float(delta)
    else:
        raise ArgumentError(f"{delta} is not a positive number.")


def get_delta():
    return _config['delta']


def set_delta1(delta1):
    """
    Set the sub-blocking separation of the condition number heuristic,
    default value is 5e-3
    :param delta1: positive number
    :return:
    """
    if _is_number(delta1) and delta1 > 0:
        _config['delta1'] = float(delta1)
    else:
        raise ArgumentError(f"{delta1} is not a positive number.")


def get_delta1():
    return _config['delta1']


def set_n_min(n_min):
    if isinstance(n_min, int) and not isinstance(n_min, bool) and n_min >= 1:
        _config['n_min'] = n_min
    else:
        raise ArgumentError(f"{n_min} is not a positive integer.")


def get_n_min():
    return _config['n_min']


def set_gamma(gamma):
    """
    Set the constant of the ill-conditioned Sylvester test r > gamma / delta,
    default value is 10
    :param gamma: positive number
    :return:
    """
    if _is_number(gamma) and gamma > 0:
        _config['gamma'] = float(gamma)
    else:
        raise ArgumentError(f"{gamma} is not a positive number.")


def get_gamma():
    return _config['gamma']


def set_strategy(strategy):
    if strategy in STRATEGIES:
        _config['strategy'] = strategy
    else:
        raise ArgumentError(f"{strategy!r} is not one of {', '.join(STRATEGIES)}.")


def get_strategy():
    return _config['strategy']


def set_atom_method(method):
    if method in ATOM_METHODS:
        _config['atom_method'] = method
    else:
        raise ArgumentError(f"{method!r} is not one of {', '.join(ATOM_METHODS)}.")


def get_atom_method():
    return _config['atom_method']


def set_epsilon(epsilon):
    if _is_number(epsilon) and 0 < epsilon < 1:
        _config['epsilon'] = float(epsilon)
    else:
        raise ArgumentError(f"{epsilon} is not in (0, 1).")


def get_epsilon():
    return _config['epsilon']


def set_k_max(k_max):
    if isinstance(k_max, int) and not isinstance(k_max, bool) and k_max >= 0:
        _config['k_max'] = k_max
    else:
        raise ArgumentError(f"{k_max} is not a nonnegative integer.")


def get_k_max():
    return _config['k_max']
