"""
Núcleo aritmético do Laboratório de Valores Médios
"""
from .catalog import BUILTIN_NAMES, builtin_spec
from .dirichlet import euler_product, g0_factor, halasz_pointwise, halasz_sweep, j_integral, parseval_oracle, zeta
from .mult_fn import FunctionClass, MultFnSpec, load_spec, validate_class_membership
from .prime_analysis import pretentious_distance, rho_min
from .sieve import SummatoryTable, sieve_table

__all__ = [
    'BUILTIN_NAMES',
    'builtin_spec',
    'euler_product',
    'g0_factor',
    'halasz_pointwise',
    'halasz_sweep',
    'j_integral',
    'parseval_oracle',
    'zeta',
    'FunctionClass',
    'MultFnSpec',
    'load_spec',
    'validate_class_membership',
    'pretentious_distance',
    'rho_min',
    'SummatoryTable',
    'sieve_table',
]
