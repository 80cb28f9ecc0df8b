"""
LinkSched - Core Module
Numerical domain, experiment coordination and persistence
"""

from .errors import (
    CapacityError, ConvergenceWarning, DomainError, LinkSchedError,
    NumericalError, StorageError, ValidationError
)
from .file_operations import FileOperations
from .experiment_manager import ExperimentManager

__all__ = [
    "CapacityError",
    "ConvergenceWarning",
    "DomainError",
    "LinkSchedError",
    "NumericalError",
    "StorageError",
    "ValidationError",
    "FileOperations",
    "ExperimentManager"
]
