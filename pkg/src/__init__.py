"""
LinkSched - Link Scheduling for D2D Networks
"""

from .core.experiment_manager import VERSION
from .run import launch

__version__ = VERSION
__all__ = [ "launch" ]
