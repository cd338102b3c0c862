"""
Módulo de configuração do Laboratório de Valores Médios
"""
from .settings import settings, Settings
from .logger import setup_logger, app_logger

__all__ = ['settings', 'Settings', 'setup_logger', 'app_logger']
