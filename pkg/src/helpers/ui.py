"""
LinkSched - UI Elements
Helper functions for dialog widgets
"""

from typing import Callable

from PyQt6.QtGui import QColor
from PyQt6.QtWidgets import QDialogButtonBox, QPushButton, QTableWidgetItem

# ratio thresholds (%) and cell backgrounds, best first
RATIO_COLORS = (
    ( 95.0, QColor( 200, 255, 200 ) ),  # Light green
    ( 85.0, QColor( 255, 255, 200 ) ),  # Light yellow
    ( 70.0, QColor( 255, 225, 200 ) ),  # Light orange
    ( 50.0, QColor( 255, 200, 200 ) ),  # Light red
)
LOW_RATIO_COLOR = QColor( 255, 200, 255 )  # Light purple


def refresh_close ( refresh: Callable, reject: Callable ) -> QDialogButtonBox :
    """
    Create a Refresh/Close button box
    Args:
        refresh: Function to call when refresh button is clicked
        reject: Function to call when rejected
    """

    button_box = QDialogButtonBox( QDialogButtonBox.StandardButton.Close )
    button_box.rejected.connect( reject )

    btn = QPushButton( "Refresh" )
    btn.clicked.connect( refresh )
    button_box.addButton( btn, QDialogButtonBox.ButtonRole.ActionRole )

    return button_box


def ratio_background ( ratio_pct: float ) -> QColor :
    """Background colour of a sum-rate ratio"""

    for threshold, color in RATIO_COLORS :
        if ratio_pct >= threshold :
            return color

    return LOW_RATIO_COLOR


def ratio_cell ( ratio_pct: float, activation_pct: float ) -> QTableWidgetItem :
    """Create a table item "ratio% / activation%" with colour coding"""

    item = QTableWidgetItem( f"{ratio_pct:.2f}% / {activation_pct:.1f}%" )
    item.setForeground( QColor( 0, 0, 0 ) )
    item.setBackground( ratio_background( ratio_pct ) )

    return item
