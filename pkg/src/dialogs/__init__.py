"""
LinkSched - Dialogs Module
"""

from .report_dialog import ReportDialog

__all__ = [
    "ReportDialog"
]
