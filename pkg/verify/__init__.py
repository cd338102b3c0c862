"""
Verificadores de teoremas sobre tabelas de somatórias
"""
from .chains import ChainReport, verify_compavg, verify_integral_average_chain
from .halasz import r_h_lambda, verify_asymptotic, verify_upper_explicit, verify_upper_general
from .reports import AsymptoticReport, TheoremReport, default_grid
from .wirsing import WirsingExtResult, verify_lower_mean_value, verify_wirsing_ext, verify_wirsing_limit

__all__ = [
    'ChainReport',
    'verify_compavg',
    'verify_integral_average_chain',
    'r_h_lambda',
    'verify_asymptotic',
    'verify_upper_explicit',
    'verify_upper_general',
    'AsymptoticReport',
    'TheoremReport',
    'default_grid',
    'WirsingExtResult',
    'verify_lower_mean_value',
    'verify_wirsing_ext',
    'verify_wirsing_limit',
]
