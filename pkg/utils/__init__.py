# Utils module for configuration and logging
from .config_loader import ConfigLoader, ConfigValidationError
from .logger import ApplicationLogger, LoggerSetup

__all__ = ['ConfigLoader', 'ConfigValidationError', 'ApplicationLogger', 'LoggerSetup']
