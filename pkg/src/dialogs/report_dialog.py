"""
LinkSched - Report Dialog
Dialog showing a results CSV as a scheme x field-length table
"""

from typing import List, Optional, Sequence

from PyQt6.QtWidgets import (
    QAbstractItemView, QDialog, QTableWidget, QTableWidgetItem,
    QVBoxLayout, QWidget
)

from ..core.experiment_manager import EvalRow, load_results_csv, pivot_results
from ..helpers import ratio_cell, refresh_close


class ReportDialog ( QDialog ) :
    """Dialog showing sum-rate ratio and activation per scheme and field length"""

    def __init__ (
        self, parent: Optional[ QWidget ] = None,
        results_path: Optional[ str ] = None,
        rows: Optional[ Sequence[ EvalRow ] ] = None
    ) :
        """
        Initialize report dialog
        Args:
            parent: Parent widget
            results_path: CSV to show and to re-read on refresh
            rows: Rows already read from results_path
        """

        super().__init__( parent )
        self.results_path = results_path
        self.rows: List[ EvalRow ] = list( rows or [] )
        self.setWindowTitle( f"Results - {results_path}" if results_path else "Results" )
        self.resize( 800, 400 )

        self.layout: QVBoxLayout = QVBoxLayout()

        # Results table
        self.table = QTableWidget()
        self.table.setEditTriggers( QAbstractItemView.EditTrigger.NoEditTriggers )
        self.table.setSelectionMode( QAbstractItemView.SelectionMode.SingleSelection )
        self.layout.addWidget( self.table )

        self.layout.addWidget( refresh_close( self._refresh, self.reject ) )

        self.setLayout( self.layout )

        if not self.rows and results_path :
            self.rows = load_results_csv( results_path )

        self._populate()


    def _refresh ( self ) -> None :
        """Re-read the CSV file"""

        if self.results_path :
            self.rows = load_results_csv( self.results_path )

        self._populate()


    def _populate ( self ) -> None :
        """Fill the table: one row per scheme, one column per field length"""

        schemes, lengths, cells = pivot_results( self.rows )

        self.table.clear()
        self.table.setRowCount( len( schemes ) )
        self.table.setColumnCount( len( lengths ) )

        for j, fl in enumerate( lengths ) :
            self.table.setHorizontalHeaderItem( j, QTableWidgetItem( f"{fl:g} m" ) )

        for i, scheme in enumerate( schemes ) :
            self.table.setVerticalHeaderItem( i, QTableWidgetItem( scheme ) )

            for j, fl in enumerate( lengths ) :
                row = cells.get( ( scheme, fl ) )
                if row is None :
                    self.table.setItem( i, j, QTableWidgetItem( "N/A" ) )
                    continue

                item = ratio_cell( row.ratio_pct, row.activation_pct )
                tip = f"mean rate {row.mean_rate:.4g} bit/s, accuracy {row.accuracy_pct:.2f}%"
                if row.time_s is not None :
                    tip += f", time {row.time_s:.4f} s"
                item.setToolTip( tip )
                self.table.setItem( i, j, item )

        self.table.resizeColumnsToContents()
        self.table.resizeRowsToContents()
