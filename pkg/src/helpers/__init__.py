"""
LinkSched - Helpers Module
"""

from .ui import ratio_background, ratio_cell, refresh_close

__all__ = [ "ratio_background", "ratio_cell", "refresh_close" ]
