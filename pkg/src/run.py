"""
LinkSched - Runner
Run the LinkSched command line
"""

import sys

from .cli import main


def launch () -> None :
    """Main application entry point"""

    sys.exit( main( sys.argv[ 1: ] ) )
